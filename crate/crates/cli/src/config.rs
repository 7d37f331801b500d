//! Resolution of effective settings from flags, the optional config file
//! and built-in defaults, in that order of precedence.
//!
//! The config file is a flat sequence of `key = value` lines; keys match
//! the long flag names (for example `noise-pct = 5`). `#` starts a comment.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use mollify::experiment::Rule;
use mollify::{Conductivity, Error, Result};

use crate::args::CommonArgs;

/// Fully resolved settings for one command invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub example: Option<u8>,
    pub n: usize,
    pub l: f64,
    pub noise_pct: f64,
    pub seed: u64,
    pub rule_name: String,
    pub c: Option<f64>,
    pub s_exp: f64,
    pub r: f64,
    pub beta0: f64,
    pub q: f64,
    pub trunc_radius: Option<f64>,
    pub out: PathBuf,
    pub threads: usize,
    pub u0: Option<PathBuf>,
    pub tau: Option<f64>,
    pub gamma_file: Option<PathBuf>,
    pub reps: usize,
    pub noise_grid: Vec<f64>,
}

fn parse_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Malformed {
            path: path.to_path_buf(),
            reason: format!("line {}: expected `key = value`, got {raw:?}", lineno + 1),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
    path: &Path,
) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse().map(Some).map_err(|_| Error::Malformed {
            path: path.to_path_buf(),
            reason: format!("bad value for {key}: {raw:?}"),
        }),
    }
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Settings> {
        let (file, fpath) = match &args.config {
            Some(p) => (parse_file(p)?, p.clone()),
            None => (HashMap::new(), PathBuf::new()),
        };
        let fp = fpath.as_path();

        let example = match args.example.or(get(&file, "example", fp)?) {
            Some(id) if (1..=4).contains(&id) => Some(id),
            Some(id) => {
                return Err(Error::Domain(format!("example must be 1..=4, got {id}")))
            }
            None => None,
        };
        let u0 = args.u0.clone().or(get(&file, "u0", fp)?);
        if example.is_some() && u0.is_some() {
            return Err(Error::Domain(
                "--example and --u0 are mutually exclusive".into(),
            ));
        }
        let rule_name = args
            .rule
            .clone()
            .or(get(&file, "rule", fp)?)
            .unwrap_or_else(|| "apriori".to_string());
        if rule_name != "apriori" && rule_name != "morozov" {
            return Err(Error::Domain(format!(
                "unknown rule {rule_name:?}, expected apriori or morozov"
            )));
        }
        let noise_grid = match args.noise_grid.clone().or(get(&file, "noise-grid", fp)?) {
            None => vec![10.0, 5.0, 2.0, 1.0, 0.5, 0.2, 0.1],
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad noise level {tok:?}")))
                })
                .collect::<Result<Vec<f64>>>()?,
        };

        Ok(Settings {
            example,
            n: args.n.or(get(&file, "n", fp)?).unwrap_or(256),
            l: args.l.or(get(&file, "l", fp)?).unwrap_or(10.0),
            noise_pct: args.noise_pct.or(get(&file, "noise-pct", fp)?).unwrap_or(1.0),
            seed: args.seed.or(get(&file, "seed", fp)?).unwrap_or(0),
            rule_name,
            c: args.c.or(get(&file, "c", fp)?),
            s_exp: args.s_exp.or(get(&file, "s-exp", fp)?).unwrap_or(2.0),
            r: args.r.or(get(&file, "r", fp)?).unwrap_or(1.0),
            beta0: args.beta0.or(get(&file, "beta0", fp)?).unwrap_or(10.0),
            q: args.q.or(get(&file, "q", fp)?).unwrap_or(0.98),
            trunc_radius: args.trunc_radius.or(get(&file, "trunc-radius", fp)?),
            out: args
                .out
                .clone()
                .or(get(&file, "out", fp)?)
                .unwrap_or_else(|| PathBuf::from(".")),
            threads: args.threads.or(get(&file, "threads", fp)?).unwrap_or(0),
            u0,
            tau: args.tau.or(get(&file, "tau", fp)?),
            gamma_file: args.gamma_file.clone().or(get(&file, "gamma-file", fp)?),
            reps: args.reps.or(get(&file, "reps", fp)?).unwrap_or(200),
            noise_grid,
        })
    }

    /// Example id for records: the built-in id, or 0 for custom problems.
    pub fn example_id(&self) -> u8 {
        self.example.unwrap_or(0)
    }

    /// The selection rule with per-example defaults filled in.
    pub fn rule(&self) -> Rule {
        match self.rule_name.as_str() {
            "morozov" => Rule::Morozov {
                r: self.r,
                beta0: self.beta0,
                q: self.q,
            },
            _ => Rule::APriori {
                c: self.c.unwrap_or(if self.example == Some(4) { 0.02 } else { 0.2 }),
                s: self.s_exp,
                delta_floor: 1e-12,
            },
        }
    }

    /// Conductivity for custom problems.
    pub fn custom_conductivity(&self) -> Result<Conductivity> {
        match &self.gamma_file {
            Some(path) => Conductivity::from_csv(path),
            None => Err(Error::Domain(
                "custom problems need --gamma-file".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_the_documented_values() {
        let s = Settings::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(s.n, 256);
        assert_eq!(s.l, 10.0);
        assert_eq!(s.noise_pct, 1.0);
        assert_eq!(s.beta0, 10.0);
        assert_eq!(s.q, 0.98);
        assert_eq!(s.r, 1.0);
        assert_eq!(s.s_exp, 2.0);
        assert_eq!(s.reps, 200);
        assert_eq!(s.rule_name, "apriori");
        assert_eq!(s.noise_grid.len(), 7);
    }

    #[test]
    fn example4_gets_the_smaller_apriori_constant() {
        let mut args = CommonArgs::default();
        args.example = Some(4);
        let s = Settings::resolve(&args).unwrap();
        match s.rule() {
            Rule::APriori { c, .. } => assert_eq!(c, 0.02),
            _ => panic!("expected a-priori rule"),
        }
        args.example = Some(1);
        let s = Settings::resolve(&args).unwrap();
        match s.rule() {
            Rule::APriori { c, .. } => assert_eq!(c, 0.2),
            _ => panic!("expected a-priori rule"),
        }
    }

    #[test]
    fn file_fills_gaps_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment\nn = 64\nnoise-pct = 5\nrule = morozov\nq = 0.9").unwrap();
        drop(f);
        let mut args = CommonArgs::default();
        args.config = Some(path);
        args.noise_pct = Some(2.0); // flag wins over file
        let s = Settings::resolve(&args).unwrap();
        assert_eq!(s.n, 64);
        assert_eq!(s.noise_pct, 2.0);
        assert_eq!(s.rule_name, "morozov");
        assert_eq!(s.q, 0.9);
    }

    #[test]
    fn rejects_bad_values() {
        let mut args = CommonArgs::default();
        args.example = Some(9);
        assert!(Settings::resolve(&args).is_err());

        let mut args = CommonArgs::default();
        args.rule = Some("golden".into());
        assert!(Settings::resolve(&args).is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "n: 64\n").unwrap();
        let mut args = CommonArgs::default();
        args.config = Some(path);
        assert!(Settings::resolve(&args).is_err());
    }
}
