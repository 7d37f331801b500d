//! Experiment harness: single reconstructions, Monte Carlo studies over
//! replicated noise, convergence-rate curves, and their CSV artifacts.
//!
//! Every run is a pure function of `(example, rule, config, seed)`; Monte
//! Carlo replications draw from independent streams indexed by replication
//! number, so results do not depend on scheduling. All CSV columns except
//! the wall-clock time are bitwise reproducible.

use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{fmt_f64, RealField};
use crate::filter::{select_beta_apriori, FilterSpec, SelectionResult};
use crate::grid::Grid2D;
use crate::mollifier::MollifierSymbol;
use crate::noise::NoiseSpec;
use crate::problems::ProblemSpec;

/// Parameter selection rule used by a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// `beta = c * max(delta, delta_floor)^(1 / 2s)`; the floor keeps the
    /// rule usable on noise-free data.
    APriori { c: f64, s: f64, delta_floor: f64 },
    /// Geometric descent from `beta0` with ratio `q` down to the first
    /// residual at most `delta + delta^r`.
    Morozov { r: f64, beta0: f64, q: f64 },
}

impl Rule {
    /// The paper-default a-priori rule: `c = 0.2` (`0.02` for Example 4),
    /// `s = 2`.
    pub fn apriori_default(example_id: u8) -> Rule {
        Rule::APriori {
            c: if example_id == 4 { 0.02 } else { 0.2 },
            s: 2.0,
            delta_floor: 1e-12,
        }
    }

    /// The default a-posteriori rule: `r = 1`, `beta0 = 10`, `q = 0.98`.
    pub fn morozov_default() -> Rule {
        Rule::Morozov {
            r: 1.0,
            beta0: 10.0,
            q: 0.98,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::APriori { .. } => "apriori",
            Rule::Morozov { .. } => "morozov",
        }
    }

    /// The rule parameter reported in run records: `c` or `r`.
    pub fn param(&self) -> f64 {
        match self {
            Rule::APriori { c, .. } => *c,
            Rule::Morozov { r, .. } => *r,
        }
    }

    fn select(&self, filter: &FilterSpec, g_delta: &RealField, delta: f64) -> Result<SelectionResult> {
        match *self {
            Rule::APriori { c, s, delta_floor } => select_beta_apriori(delta.max(delta_floor), c, s),
            Rule::Morozov { r, beta0, q } => filter.select_beta_morozov(g_delta, delta, r, beta0, q),
        }
    }
}

/// Grid and operator options shared by the runners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub l: f64,
    /// Truncate the diffusion symbol to `|xi| <= radius` (noisy operator).
    pub trunc_radius: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 256,
            l: 10.0,
            trunc_radius: None,
        }
    }
}

/// Record of one reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub example_id: u8,
    pub perc_noise: f64,
    pub delta: f64,
    pub rule: String,
    pub param: f64,
    pub beta: f64,
    pub rel_err: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

/// Aggregates of a Monte Carlo study.
#[derive(Debug, Clone, PartialEq)]
pub struct MCSummary {
    pub example_id: u8,
    pub perc_noise: f64,
    pub rule: String,
    pub n_reps: usize,
    pub mean_rel_err: f64,
    pub var_rel_err: f64,
    pub mean_beta: f64,
}

/// Axis of a convergence-rate fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitAxis {
    /// `ln(rel_err)` against `ln(delta)`.
    LogLogDelta,
    /// `ln(rel_err)` against `ln(-ln(delta))`.
    LogVsLogLog,
}

impl FitAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitAxis::LogLogDelta => "loglog_delta",
            FitAxis::LogVsLogLog => "log_vs_loglog",
        }
    }
}

/// Least-squares line through `(x, y)` pairs: slope, intercept and `R^2`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain("line fit needs at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("line fit needs distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r2))
}

/// A convergence-rate curve: one `(delta, rel_err)` point per noise level
/// plus the line fit on the declared axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub example_id: u8,
    pub rule: String,
    /// `(delta, rel_err)` with deltas strictly decreasing.
    pub points: Vec<(f64, f64)>,
    pub fit_axis: FitAxis,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl RateCurve {
    fn fit(example_id: u8, rule: String, points: Vec<(f64, f64)>, axis: FitAxis) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::domain("rate curves need at least 4 noise levels"));
        }
        if !points.windows(2).all(|w| w[0].0 > w[1].0) {
            return Err(Error::domain("rate-curve deltas must be strictly decreasing"));
        }
        let xs: Vec<f64> = points
            .iter()
            .map(|(d, _)| match axis {
                FitAxis::LogLogDelta => Ok(d.ln()),
                FitAxis::LogVsLogLog => {
                    if *d >= 1.0 {
                        Err(Error::domain(format!(
                            "log_vs_loglog axis needs delta < 1, got {d}"
                        )))
                    } else {
                        Ok((-d.ln()).ln())
                    }
                }
            })
            .collect::<Result<_>>()?;
        let ys: Vec<f64> = points.iter().map(|(_, r)| r.ln()).collect();
        let (slope, intercept, r2) = line_fit(&xs, &ys)?;
        Ok(RateCurve {
            example_id,
            rule,
            points,
            fit_axis: axis,
            slope,
            intercept,
            r2,
        })
    }

    /// Refits the same points on another axis.
    pub fn refit(&self, axis: FitAxis) -> Result<RateCurve> {
        RateCurve::fit(self.example_id, self.rule.clone(), self.points.clone(), axis)
    }
}

/// Derives the per-point seed for rate studies: `hash(seed, index)` so that
/// inserting a level does not reshuffle the others. SplitMix64 finalizer.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Problem data prepared once and shared across replications.
struct Prepared {
    filter: FilterSpec,
    u0: RealField,
    g: RealField,
    u0_norm: f64,
}

fn prepare(example_id: u8, cfg: &RunConfig) -> Result<Prepared> {
    let grid = Grid2D::new(cfg.n, cfg.l)?;
    let problem = ProblemSpec::example(example_id)?;
    let u0 = problem.make_initial(&grid)?;
    let mut diffusion = problem.diffusion_symbol()?;
    if let Some(r) = cfg.trunc_radius {
        diffusion = diffusion.truncated(r)?.0;
    }
    let g = crate::forward::apply_forward(&diffusion, &u0)?;
    let u0_norm = u0.l2_norm();
    Ok(Prepared {
        filter: FilterSpec::new(diffusion, MollifierSymbol::gaussian(), grid),
        u0,
        g,
        u0_norm,
    })
}

fn run_prepared(
    p: &Prepared,
    example_id: u8,
    perc_noise: f64,
    rule: &Rule,
    seed: u64,
    replication: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let noise = NoiseSpec::new(perc_noise, seed)?;
    let (g_delta, delta) = noise.draw(&p.g, replication)?;
    let selection = rule.select(&p.filter, &g_delta, delta)?;
    let u = p.filter.reconstruct(selection.beta, &g_delta)?;
    let rel_err = u.sub(&p.u0).l2_norm() / p.u0_norm;
    Ok(RunRecord {
        example_id,
        perc_noise,
        delta,
        rule: rule.name().to_string(),
        param: rule.param(),
        beta: selection.beta,
        rel_err,
        seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One full run: problem setup, noise, selection, reconstruction.
pub fn run_once(
    example_id: u8,
    perc_noise: f64,
    rule: &Rule,
    cfg: &RunConfig,
    seed: u64,
) -> Result<RunRecord> {
    let p = prepare(example_id, cfg)?;
    run_prepared(&p, example_id, perc_noise, rule, seed, 0)
}

/// Monte Carlo study over `n_reps` independent replication streams.
/// Replications run in parallel; aggregation order is fixed by index.
pub fn run_monte_carlo(
    example_id: u8,
    perc_noise: f64,
    rule: &Rule,
    cfg: &RunConfig,
    n_reps: usize,
    seed: u64,
) -> Result<MCSummary> {
    if n_reps == 0 {
        return Err(Error::domain("Monte Carlo needs at least one replication"));
    }
    let p = prepare(example_id, cfg)?;
    let records: Vec<RunRecord> = (0..n_reps as u64)
        .into_par_iter()
        .map(|rep| run_prepared(&p, example_id, perc_noise, rule, seed, rep))
        .collect::<Result<_>>()?;
    let n = n_reps as f64;
    let mean_rel_err = records.iter().map(|r| r.rel_err).sum::<f64>() / n;
    let var_rel_err = if n_reps == 1 {
        0.0
    } else {
        records
            .iter()
            .map(|r| (r.rel_err - mean_rel_err).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    };
    let mean_beta = records.iter().map(|r| r.beta).sum::<f64>() / n;
    Ok(MCSummary {
        example_id,
        perc_noise,
        rule: rule.name().to_string(),
        n_reps,
        mean_rel_err,
        var_rel_err,
        mean_beta,
    })
}

/// Convergence-rate study: one run per noise percentage (strictly
/// decreasing, at least 4), each with the seed derived from its index, then
/// a least-squares fit on the requested axis.
pub fn run_rate_study(
    example_id: u8,
    rule: &Rule,
    cfg: &RunConfig,
    percentages: &[f64],
    seed: u64,
    axis: FitAxis,
) -> Result<RateCurve> {
    if percentages.len() < 4 {
        return Err(Error::domain("rate studies need at least 4 noise levels"));
    }
    if !percentages.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::domain("noise levels must be strictly decreasing"));
    }
    if percentages.iter().any(|p| *p <= 0.0) {
        return Err(Error::domain("noise levels must be positive"));
    }
    let p = prepare(example_id, cfg)?;
    let points: Vec<(f64, f64)> = percentages
        .par_iter()
        .enumerate()
        .map(|(i, pct)| {
            let rec = run_prepared(&p, example_id, *pct, rule, derive_seed(seed, i as u64), 0)?;
            Ok((rec.delta, rec.rel_err))
        })
        .collect::<Result<_>>()?;
    RateCurve::fit(example_id, rule.name().to_string(), points, axis)
}

/// A record type with a fixed CSV schema.
pub trait CsvRecord: Sized {
    fn header() -> &'static str;
    fn to_row(&self) -> String;
    fn from_row(row: &str) -> std::result::Result<Self, String>;
}

/// Writes records to an RFC-4180 CSV file with the type's fixed header;
/// floats carry 17 significant digits. An empty slice produces a
/// header-only file.
pub fn emit_csv<T: CsvRecord>(records: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{}", T::header()).map_err(io_err)?;
    for r in records {
        writeln!(w, "{}", r.to_row()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads back a CSV file written by [`emit_csv`].
pub fn read_csv<T: CsvRecord>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == T::header() => {}
        other => {
            return Err(Error::malformed(
                path,
                format!("expected header {:?}, got {other:?}", T::header()),
            ))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| T::from_row(l).map_err(|reason| Error::malformed(path, reason)))
        .collect()
}

fn split_fields(row: &str, expected: usize) -> std::result::Result<Vec<&str>, String> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() == expected {
        Ok(fields)
    } else {
        Err(format!("expected {expected} fields, got {}", fields.len()))
    }
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("bad {what}: {s:?}"))
}

impl CsvRecord for RunRecord {
    fn header() -> &'static str {
        "example,perc_noise,delta,rule,param,beta,rel_err,seed,wall_time_s"
    }

    fn to_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.example_id,
            fmt_f64(self.perc_noise),
            fmt_f64(self.delta),
            self.rule,
            fmt_f64(self.param),
            fmt_f64(self.beta),
            fmt_f64(self.rel_err),
            self.seed,
            fmt_f64(self.wall_time_s),
        )
    }

    fn from_row(row: &str) -> std::result::Result<Self, String> {
        let f = split_fields(row, 9)?;
        Ok(RunRecord {
            example_id: parse(f[0], "example id")?,
            perc_noise: parse(f[1], "perc_noise")?,
            delta: parse(f[2], "delta")?,
            rule: f[3].to_string(),
            param: parse(f[4], "param")?,
            beta: parse(f[5], "beta")?,
            rel_err: parse(f[6], "rel_err")?,
            seed: parse(f[7], "seed")?,
            wall_time_s: parse(f[8], "wall_time_s")?,
        })
    }
}

impl CsvRecord for MCSummary {
    fn header() -> &'static str {
        "example,perc_noise,rule,n_reps,mean_rel_err,var_rel_err,mean_beta"
    }

    fn to_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.example_id,
            fmt_f64(self.perc_noise),
            self.rule,
            self.n_reps,
            fmt_f64(self.mean_rel_err),
            fmt_f64(self.var_rel_err),
            fmt_f64(self.mean_beta),
        )
    }

    fn from_row(row: &str) -> std::result::Result<Self, String> {
        let f = split_fields(row, 7)?;
        Ok(MCSummary {
            example_id: parse(f[0], "example id")?,
            perc_noise: parse(f[1], "perc_noise")?,
            rule: f[2].to_string(),
            n_reps: parse(f[3], "n_reps")?,
            mean_rel_err: parse(f[4], "mean_rel_err")?,
            var_rel_err: parse(f[5], "var_rel_err")?,
            mean_beta: parse(f[6], "mean_beta")?,
        })
    }
}

/// One `(delta, rel_err)` row of a rate-curve CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePointRow {
    pub example_id: u8,
    pub rule: String,
    pub delta: f64,
    pub rel_err: f64,
}

/// The fit row accompanying a rate curve, written to a separate file.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFitRow {
    pub example_id: u8,
    pub rule: String,
    pub fit_axis: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl CsvRecord for RatePointRow {
    fn header() -> &'static str {
        "example,rule,delta,rel_err"
    }

    fn to_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.example_id,
            self.rule,
            fmt_f64(self.delta),
            fmt_f64(self.rel_err)
        )
    }

    fn from_row(row: &str) -> std::result::Result<Self, String> {
        let f = split_fields(row, 4)?;
        Ok(RatePointRow {
            example_id: parse(f[0], "example id")?,
            rule: f[1].to_string(),
            delta: parse(f[2], "delta")?,
            rel_err: parse(f[3], "rel_err")?,
        })
    }
}

impl CsvRecord for RateFitRow {
    fn header() -> &'static str {
        "example,rule,fit_axis,slope,intercept,r2"
    }

    fn to_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.example_id,
            self.rule,
            self.fit_axis,
            fmt_f64(self.slope),
            fmt_f64(self.intercept),
            fmt_f64(self.r2)
        )
    }

    fn from_row(row: &str) -> std::result::Result<Self, String> {
        let f = split_fields(row, 6)?;
        Ok(RateFitRow {
            example_id: parse(f[0], "example id")?,
            rule: f[1].to_string(),
            fit_axis: f[2].to_string(),
            slope: parse(f[3], "slope")?,
            intercept: parse(f[4], "intercept")?,
            r2: parse(f[5], "r2")?,
        })
    }
}

impl RateCurve {
    /// Point rows for the curve CSV.
    pub fn point_rows(&self) -> Vec<RatePointRow> {
        self.points
            .iter()
            .map(|(delta, rel_err)| RatePointRow {
                example_id: self.example_id,
                rule: self.rule.clone(),
                delta: *delta,
                rel_err: *rel_err,
            })
            .collect()
    }

    /// The fit row for the companion fit CSV.
    pub fn fit_row(&self) -> RateFitRow {
        RateFitRow {
            example_id: self.example_id,
            rule: self.rule.clone(),
            fit_axis: self.fit_axis.as_str().to_string(),
            slope: self.slope,
            intercept: self.intercept,
            r2: self.r2,
        }
    }
}
