//! Monte Carlo experiments against the limit laws and the exact finite-size
//! expectations.
//!
//! Replicate `i` always uses the random stream `(seed, i)`, and results are
//! collected in replicate order, so reports do not depend on scheduling.

pub mod config;
pub mod ks;

use std::io::Write;
use std::path::Path;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, rayleigh_cdf, CharacteristicSolution};
use crate::counting::ExactExpectations;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::sampling::Sampler;
use crate::weights::Family;

pub use config::Tolerances;
pub use ks::ks_statistic;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub statistic: String,
    pub k: Option<usize>,
    pub observed: f64,
    pub reference: f64,
    /// KS distance, relative error, or distance in standard errors.
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub family: String,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Set when `n` is too small for the statistic to be meaningful.
    pub out_of_regime: bool,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        !self.out_of_regime && self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with columns `statistic,k,observed,reference,metric,pass`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(e.to_string());
        w.write_record(["statistic", "k", "observed", "reference", "metric", "pass"]).map_err(io)?;
        for r in &self.rows {
            let k = r.k.map(|k| k.to_string()).unwrap_or_default();
            w.write_record([
                r.statistic.clone(),
                k,
                r.observed.to_string(),
                r.reference.to_string(),
                r.metric.to_string(),
                r.pass.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes CSV when `path` ends in `.csv`, JSON otherwise.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let body = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            self.to_csv()?
        } else {
            self.to_json()? + "\n"
        };
        let mut f = std::fs::File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Per-tree summary needed by the experiments.
#[derive(Clone, Debug, Default)]
struct Observation {
    /// Height of one uniformly chosen leaf.
    leaf_height: usize,
    leaves_at: Vec<u32>,
    nodes_at: Vec<u32>,
}

/// Leaf heights and height profiles from a preorder degree sequence.
fn observe(degrees: &[usize], pick: usize, kmax: usize) -> Observation {
    let mut obs = Observation { leaves_at: vec![0; kmax + 1], nodes_at: vec![0; kmax + 1], ..Default::default() };
    // Remaining children to visit at each open ancestor.
    let mut open: Vec<usize> = Vec::new();
    let mut leaf_index = 0;
    for &d in degrees {
        let depth = open.len();
        if depth <= kmax {
            obs.nodes_at[depth] += 1;
        }
        if d == 0 {
            if depth <= kmax {
                obs.leaves_at[depth] += 1;
            }
            if leaf_index == pick {
                obs.leaf_height = depth;
            }
            leaf_index += 1;
            while let Some(top) = open.last_mut() {
                *top -= 1;
                if *top > 0 {
                    break;
                }
                open.pop();
            }
        } else {
            open.push(d);
        }
    }
    obs
}

fn replicate(family: &Family, n: usize, reps: usize, seed: u64, kmax: usize) -> Result<Vec<Observation>> {
    if reps == 0 {
        return Err(Error::EmptySample);
    }
    let sampler = Sampler::for_family(family, n)?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let degrees = sampler.sample_degrees(&mut rng);
            let pick = rand::Rng::gen_range(&mut rng, 0..n);
            observe(&degrees, pick, kmax)
        })
        .collect())
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn relative_row(statistic: &str, k: Option<usize>, observed: f64, reference: f64, tol: f64) -> ReportRow {
    let metric = ((observed - reference) / reference).abs();
    ReportRow { statistic: statistic.into(), k, observed, reference, metric, tolerance: tol, pass: metric <= tol }
}

/// Distance in standard errors; with zero spread the values must agree.
fn se_row(statistic: &str, k: Option<usize>, observed: f64, se: f64, reference: f64, mult: f64) -> ReportRow {
    let diff = (observed - reference).abs();
    let (metric, pass) = if se > 0.0 {
        (diff / se, diff / se <= mult)
    } else {
        (if diff <= 1e-9 { 0.0 } else { f64::INFINITY }, diff <= 1e-9)
    };
    ReportRow { statistic: statistic.into(), k, observed, reference, metric, tolerance: mult, pass }
}

fn exact_row(statistic: &str, k: usize, observed: f64, reference: f64) -> ReportRow {
    let metric = (observed - reference).abs();
    ReportRow { statistic: statistic.into(), k: Some(k), observed, reference, metric, tolerance: 0.0, pass: metric == 0.0 }
}

fn report(experiment: &str, f: &Family, n: usize, reps: usize, seed: u64, rows: Vec<ReportRow>) -> ExperimentReport {
    ExperimentReport {
        experiment: experiment.into(),
        family: f.name().into(),
        n,
        replicates: reps,
        seed,
        out_of_regime: n < 2,
        rows,
    }
}

fn constants(f: &Family) -> Result<CharacteristicSolution> {
    analytics::family_constants(f)
}

/// Kolmogorov–Smirnov distance between `λ H_n / √n` (one uniform leaf per
/// tree) and the Rayleigh(1) law.
pub fn run_rayleigh(f: &Family, n: usize, reps: usize, seed: u64, tol: &Tolerances) -> Result<ExperimentReport> {
    let sol = constants(f)?;
    let lambda = sol.lambda.to_f64();
    let obs = replicate(f, n, reps, seed, 0)?;
    let scaled: Vec<f64> = obs.iter().map(|o| lambda * o.leaf_height as f64 / (n as f64).sqrt()).collect();
    let d = ks_statistic(&scaled, rayleigh_cdf)?;
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let row = ReportRow {
        statistic: "rayleigh_ks".into(),
        k: None,
        observed: mean,
        reference: (std::f64::consts::PI / 2.0).sqrt(),
        metric: d,
        tolerance: tol.ks_tolerance,
        pass: d <= tol.ks_tolerance,
    };
    Ok(report("rayleigh", f, n, reps, seed, vec![row]))
}

/// Mean height of a uniform leaf against `heightConst·√n` (for
/// `n > exact_max_n`) or against the exact value `E[φ]/n` (otherwise).
pub fn run_expected_height(f: &Family, n: usize, reps: usize, seed: u64, tol: &Tolerances) -> Result<ExperimentReport> {
    let obs = replicate(f, n, reps, seed, 0)?;
    let (mean, se) = mean_and_se(obs.iter().map(|o| o.leaf_height as f64));
    let row = if n > tol.exact_max_n {
        let reference = constants(f)?.height_const.to_f64() * (n as f64).sqrt();
        relative_row("expected_height", None, mean, reference, tol.relative_tolerance)
    } else {
        let exact = ExactExpectations::new(&f.weights(), n).sum_leaf_heights(n)?;
        let reference = exact.to_f64().unwrap_or(f64::NAN) / n as f64;
        se_row("expected_height_exact", None, mean, se, reference, tol.se_multiplier)
    };
    Ok(report("height", f, n, reps, seed, vec![row]))
}

/// Mean numbers of leaves and of vertices at heights `0..=kmax` against
/// the linear asymptotes (for `n > exact_max_n`) or the exact values.
pub fn run_height_profile(
    f: &Family,
    n: usize,
    kmax: usize,
    reps: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ExperimentReport> {
    let obs = replicate(f, n, reps, seed, kmax)?;
    let mut rows = Vec::new();
    let exact = (n <= tol.exact_max_n).then(|| ExactExpectations::new(&f.weights(), n));
    let sol = if exact.is_none() { Some(constants(f)?) } else { None };
    for k in 0..=kmax {
        let (leaf_mean, leaf_se) = mean_and_se(obs.iter().map(|o| o.leaves_at[k] as f64));
        let (node_mean, node_se) = mean_and_se(obs.iter().map(|o| o.nodes_at[k] as f64));
        match (&exact, &sol) {
            (Some(ex), _) => {
                let lr = ex.leaf_profile(n, k)?.to_f64().unwrap_or(f64::NAN);
                let nr = ex.node_profile(n, k)?.to_f64().unwrap_or(f64::NAN);
                rows.push(se_row("leaf_profile_exact", Some(k), leaf_mean, leaf_se, lr, tol.se_multiplier));
                rows.push(se_row("node_profile_exact", Some(k), node_mean, node_se, nr, tol.se_multiplier));
            }
            (None, Some(_)) if k == 0 => {
                rows.push(exact_row("leaf_profile", 0, leaf_mean, 0.0));
                rows.push(exact_row("node_profile", 0, node_mean, 1.0));
            }
            (None, Some(sol)) => {
                let rt = tol.relative_tolerance;
                rows.push(relative_row("leaf_profile", Some(k), leaf_mean, sol.leaf_profile_asymptote(k), rt));
                rows.push(relative_row("node_profile", Some(k), node_mean, sol.node_profile_asymptote(k), rt));
            }
            (None, None) => unreachable!("either exact values or constants are available"),
        }
    }
    Ok(report("profile", f, n, reps, seed, rows))
}
