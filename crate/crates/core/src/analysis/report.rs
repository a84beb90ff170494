//! Convergence studies: sample a model across a size grid and judge the
//! result against the limit its family predicts.

use serde::{Deserialize, Serialize};

use super::condensation::condensation_study;
use super::limits::{limit_family, LimitFamily};
use super::sampling::{
    check_grid, grid_seed, rho_r_samples, scaled_distance_samples, tightness_from_rows, DistanceSamples,
    TightnessReport, TightnessRow,
};
use super::scaling::Scaling;
use super::stats::{fit_line, ks_one_sample, ks_two_sample, mean, quantile, total_variation_to_pmf, LineFit};
use crate::dendrons::{crt_dendron, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::generators::model::ModelSpec;
use crate::histogram::Histogram;
use crate::rng::{derive_seed, replica_rng};
use rayon::prelude::*;

pub const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
/// Relative tolerance on slopes and characteristic sizes.
pub const RELATIVE_TOLERANCE: f64 = 0.10;
pub const KS_FLOOR: f64 = 0.05;
/// Asymptotic 1% point of the Kolmogorov distribution.
pub const KS_NULL_COEFFICIENT: f64 = 1.63;
pub const TV_THRESHOLD: f64 = 0.05;
pub const DEGREE_TOLERANCE: f64 = 0.1;
pub const ADDITIVITY_THRESHOLD: f64 = 0.02;
pub const QUENCHED_TV_THRESHOLD: f64 = 0.08;
/// Fraction of scaled distances that must lie within the relative
/// tolerance of 2a when no rescaling is applied.
pub const CONCENTRATION_LEVEL: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeConfig {
    pub model: ModelSpec,
    pub n_grid: Vec<usize>,
    pub m_trees: usize,
    pub m_pairs: usize,
    /// Overrides the family's natural scaling.
    pub scaling: Option<Scaling>,
    /// Order of the distance matrices checked beyond pairs (2 = pairs only).
    pub r: usize,
    pub seed: u64,
    /// Grid size for excursion-tree limits.
    pub excursion_grid: usize,
}

impl ConvergeConfig {
    pub fn new(model: ModelSpec, n_grid: Vec<usize>) -> Self {
        ConvergeConfig {
            model,
            n_grid,
            m_trees: 20,
            m_pairs: 500,
            scaling: None,
            r: 2,
            seed: 1,
            excursion_grid: DEFAULT_GRID,
        }
    }
}

/// Trees and pairs per tree suited to the family. Excursion limits are
/// compared by KS with trees as the independent units, so they favour
/// many trees with few pairs each.
pub fn default_sampling(family: &LimitFamily) -> (usize, usize) {
    match family {
        LimitFamily::Crt { .. } => (1000, 2),
        _ => (20, 500),
    }
}

/// A size grid suited to the family when the caller gives none.
pub fn default_grid(model: &ModelSpec, family: &LimitFamily) -> Vec<usize> {
    match (model, family) {
        (ModelSpec::CompleteBary { .. }, _) => vec![10, 14, 18],
        (ModelSpec::SimplyGenerated { .. }, _) => vec![50, 100, 200],
        (_, LimitFamily::Logarithmic { .. }) => vec![1 << 10, 1 << 12, 1 << 14, 1 << 17],
        (_, LimitFamily::Crt { .. }) => vec![1000, 10_000],
        _ => vec![1000, 10_000, 100_000],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One replayable verdict: statistic, threshold, sample size and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
    /// Whether the check enters the overall verdict.
    pub gating: bool,
    pub m: usize,
    pub seed: u64,
}

impl Check {
    fn new(name: &str, statistic: f64, bound: Bound, threshold: f64, m: usize, seed: u64) -> Self {
        let passed = match bound {
            Bound::AtMost => statistic <= threshold,
            Bound::AtLeast => statistic >= threshold,
        };
        Check { name: name.into(), statistic, bound, threshold, passed, gating: true, m, seed }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub level: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    pub n: usize,
    pub scale: f64,
    pub mean_vertices: f64,
    /// Mean of the scaled distance.
    pub mean: f64,
    pub stderr: f64,
    pub quantiles: Vec<QuantilePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub value: Option<f64>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ConvergeConfig,
    pub family: LimitFamily,
    pub target: Target,
    pub per_n: Vec<GridStats>,
    pub fit: Option<LineFit>,
    pub tightness: Option<TightnessReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ConvergenceReport {
    /// Recomputes the verdict from the stored checks.
    pub fn verdict(&self) -> bool {
        let gating: Vec<&Check> = self.checks.iter().filter(|c| c.gating).collect();
        !gating.is_empty() && gating.iter().all(|c| c.passed)
    }
}

/// Report plus named histograms (unscaled distances per n and any
/// family-specific profiles) for CSV export.
#[derive(Debug, Clone)]
pub struct ConvergeOutcome {
    pub report: ConvergenceReport,
    pub histograms: Vec<(String, Histogram)>,
}

fn grid_stats(s: &DistanceSamples) -> GridStats {
    let mut xs = s.pooled();
    xs.sort_by(f64::total_cmp);
    GridStats {
        n: s.n,
        scale: s.scale,
        mean_vertices: s.mean_vertices(),
        mean: mean(&xs),
        stderr: s.mean_stderr(),
        quantiles: QUANTILE_LEVELS.iter().map(|&level| QuantilePoint { level, value: quantile(&xs, level) }).collect(),
    }
}

/// Independent units behind a pooled sample: trees for random families,
/// pairs for a single deterministic tree.
fn effective_units(s: &DistanceSamples) -> usize {
    if s.per_tree.len() == 1 {
        s.per_tree[0].len()
    } else {
        s.per_tree.len()
    }
}

fn ks_threshold(units_a: usize, units_b: usize) -> f64 {
    let null = KS_NULL_COEFFICIENT * (1.0 / units_a as f64 + 1.0 / units_b as f64).sqrt();
    null.max(KS_FLOOR)
}

/// Law of X₁ + X₂ for i.i.d. X with the given pmf.
fn self_convolution(pmf: impl Fn(usize) -> f64, horizon: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..horizon).map(pmf).collect();
    let mut out = vec![0.0; 2 * horizon];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn run_converge(config: &ConvergeConfig) -> Result<ConvergeOutcome> {
    let family = limit_family(&config.model)?;
    let mut config = config.clone();
    if config.n_grid.is_empty() {
        config.n_grid = default_grid(&config.model, &family);
    }
    check_grid(&config.n_grid, 1)?;
    if config.m_trees == 0 || config.m_pairs == 0 {
        return Err(Error::InvalidSpec("m_trees and m_pairs must be positive".into()));
    }
    if config.r < 2 {
        return Err(Error::InvalidSpec("r must be at least 2".into()));
    }
    let natural = family.scaling();
    let scaling = config.scaling.unwrap_or(natural);
    config.scaling = Some(scaling);
    let seed = config.seed;

    let mut per_n = Vec::new();
    let mut samples = Vec::new();
    let mut histograms = Vec::new();
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let prepared = config.model.prepare(n)?;
        let s =
            scaled_distance_samples(&prepared, scaling.factor(n), config.m_trees, config.m_pairs, grid_seed(seed, n))?;
        let stats = grid_stats(&s);
        rows.push(TightnessRow { n, quantiles: stats.quantiles.iter().map(|q| q.value).collect() });
        histograms.push((format!("distance_n{n}"), s.histogram()));
        per_n.push(stats);
        samples.push(s);
    }
    let last_n = *config.n_grid.last().unwrap();
    let last = samples.last().unwrap();
    // the sample at the largest n under the family's own scaling
    let natural_sample: Vec<f64> = {
        let ratio = natural.factor(last_n) / scaling.factor(last_n);
        last.pooled().iter().map(|x| x * ratio).collect()
    };
    let pooled_m = natural_sample.len();
    let last_seed = grid_seed(seed, last_n);

    let mut checks = Vec::new();
    let mut fit = None;
    let raw_means: Vec<f64> = per_n.iter().map(|g| g.mean / g.scale).collect();
    let target = match &family {
        LimitFamily::Logarithmic { a } => {
            let two_a = 2.0 * a;
            let decades = (last_n as f64 / config.n_grid[0] as f64).log10();
            if config.n_grid.len() >= 3 && decades >= 2.0 {
                let x: Vec<f64> = per_n.iter().map(|g| g.mean_vertices.ln()).collect();
                let f = fit_line(&x, &raw_means)?;
                let rel = (f.slope - two_a).abs() / two_a;
                checks.push(Check::new("slope_vs_log_n", rel, Bound::AtMost, RELATIVE_TOLERANCE, pooled_m, seed));
                fit = Some(f);
            } else {
                let ratio = mean(&natural_sample);
                let rel = (ratio - two_a).abs() / two_a;
                checks.push(Check::new("mean_over_log_n", rel, Bound::AtMost, RELATIVE_TOLERANCE, pooled_m, last_seed));
            }
            Target { value: Some(two_a), description: "characteristic size 2a of the logarithmic limit".into() }
        }
        LimitFamily::Constant { a, scaling: own } => {
            let two_a = 2.0 * a;
            let close = natural_sample.iter().filter(|&&x| ((x - two_a) / two_a).abs() <= RELATIVE_TOLERANCE).count();
            let concentration = Check::new(
                "concentration_near_2a",
                close as f64 / pooled_m as f64,
                Bound::AtLeast,
                CONCENTRATION_LEVEL,
                pooled_m,
                last_seed,
            );
            if *own != Scaling::None && config.n_grid.len() >= 2 {
                let x: Vec<f64> = config.n_grid.iter().map(|&n| 1.0 / own.factor(n)).collect();
                let f = fit_line(&x, &raw_means)?;
                let rel = (f.slope - two_a).abs() / two_a;
                checks.push(Check::new(
                    "slope_vs_inverse_scale",
                    rel,
                    Bound::AtMost,
                    RELATIVE_TOLERANCE,
                    pooled_m,
                    seed,
                ));
                checks.push(concentration.informational());
                fit = Some(f);
            } else {
                checks.push(concentration);
            }
            Target { value: Some(two_a), description: "constant pair distance 2a".into() }
        }
        LimitFamily::Interval { length, .. } => {
            let l = *length;
            let cdf = move |x: f64| {
                let u = (x / l).clamp(0.0, 1.0);
                1.0 - (1.0 - u) * (1.0 - u)
            };
            let ks = ks_one_sample(&natural_sample, cdf, cdf)?;
            let lattice = natural.factor(last_n);
            let threshold = KS_NULL_COEFFICIENT / (effective_units(last) as f64).sqrt() + lattice;
            checks.push(Check::new("ks_interval", ks, Bound::AtMost, threshold, pooled_m, last_seed));
            let m = mean(&natural_sample);
            checks.push(
                Check::new(
                    "mean_abs_error",
                    (m - l / 3.0).abs(),
                    Bound::AtMost,
                    0.01 * l.max(1.0),
                    pooled_m,
                    last_seed,
                )
                .informational(),
            );
            Target { value: Some(l / 3.0), description: "mean |U - V| times the interval length".into() }
        }
        LimitFamily::Point { nu, .. } => {
            let horizon = 64;
            let law = self_convolution(|k| nu.pmf(k), horizon);
            let hist = Histogram::from_samples(natural_sample.iter().map(|x| x.round() as usize));
            let tv = total_variation_to_pmf(&hist, |k| law.get(k).copied().unwrap_or(0.0), law.len());
            checks.push(Check::new("tv_point_law", tv, Bound::AtMost, TV_THRESHOLD, pooled_m, last_seed));
            Target { value: Some(2.0 * nu.mean()), description: "mean of X1 + X2 for the point law".into() }
        }
        LimitFamily::Crt { sigma } => {
            let dseed = derive_seed(seed, u64::MAX);
            let m_pairs = config.m_pairs;
            let grid = config.excursion_grid;
            let sigma = *sigma;
            let limit: Vec<f64> = (0..config.m_trees)
                .into_par_iter()
                .map(|i| {
                    let mut rng = replica_rng(dseed, i as u64);
                    let d = crt_dendron(sigma, grid, &mut rng)?;
                    Ok((0..m_pairs).map(|_| d.pair_distance(&mut rng)).collect::<Vec<f64>>())
                })
                .collect::<Result<Vec<_>>>()?
                .concat();
            let ks = ks_two_sample(&natural_sample, &limit)?;
            let units = effective_units(last);
            checks.push(Check::new("ks_vs_crt", ks, Bound::AtMost, ks_threshold(units, units), pooled_m, dseed));
            Target { value: None, description: "pair distance in the excursion tree of (2/sigma) B^ex".into() }
        }
        LimitFamily::Condensation { kappa } => {
            let study =
                condensation_study(&config.model.prepare(last_n)?, *kappa, config.m_trees, config.m_pairs, last_seed)?;
            let m = study.trees.len();
            checks.push(Check::new(
                "max_degree_fraction_error",
                (study.degree_fraction - (1.0 - kappa)).abs(),
                Bound::AtMost,
                DEGREE_TOLERANCE,
                m,
                last_seed,
            ));
            checks.push(Check::new("tv_geometric", study.tv_pooled, Bound::AtMost, TV_THRESHOLD, pooled_m, last_seed));
            checks.push(Check::new(
                "additivity_failure",
                study.additivity_pooled,
                Bound::AtMost,
                ADDITIVITY_THRESHOLD,
                pooled_m,
                last_seed,
            ));
            checks.push(Check::new(
                "quenched_tv_q90",
                study.tv_quantile(0.9),
                Bound::AtMost,
                QUENCHED_TV_THRESHOLD,
                m,
                last_seed,
            ));
            histograms.push((format!("condensation_profile_n{last_n}"), study.profile.clone()));
            Target { value: Some(1.0 - kappa), description: "1 - kappa, parameter of the geometric point law".into() }
        }
    };

    let tightness = (config.n_grid.len() >= 2).then(|| tightness_from_rows(scaling, QUANTILE_LEVELS.to_vec(), rows));
    if let Some(t) = &tightness {
        checks.push(Check::new(
            "tightness_envelope",
            t.envelope_ratio,
            Bound::AtMost,
            1.0 + t.tolerance,
            pooled_m,
            seed,
        ));
    }

    if config.r > 2 {
        let rseed = derive_seed(seed, config.r as u64);
        let m_draws = (config.m_pairs / config.r).max(1);
        let tau = rho_r_samples(
            &config.model.prepare(last_n)?,
            config.r,
            scaling.factor(last_n),
            config.m_trees,
            m_draws,
            rseed,
        )?;
        let bad = tau.draws.iter().filter(|d| !d.is_tree_metric(1e-9)).count();
        checks.push(Check::new("four_point_violations", bad as f64, Bound::AtMost, 0.0, tau.draws.len(), rseed));
        let ks = ks_two_sample(&tau.entries(0, 1), &last.pooled())?;
        let units = if config.model.is_deterministic() { tau.draws.len() } else { config.m_trees };
        checks.push(Check::new(
            "restriction_consistency_ks",
            ks,
            Bound::AtMost,
            ks_threshold(units, effective_units(last)),
            tau.draws.len(),
            rseed,
        ));
    }

    let mut report = ConvergenceReport { config, family, target, per_n, fit, tightness, checks, passed: false };
    report.passed = report.verdict();
    Ok(ConvergeOutcome { report, histograms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(model: ModelSpec, grid: Vec<usize>) -> ConvergenceReport {
        let mut c = ConvergeConfig::new(model, grid);
        c.m_trees = 10;
        c.m_pairs = 200;
        run_converge(&c).unwrap().report
    }

    #[test]
    fn star_passes() {
        let r = quick(ModelSpec::Star, vec![1000, 10_000]);
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.verdict(), r.passed);
    }

    #[test]
    fn path_passes_and_wrong_scaling_fails() {
        let r = quick(ModelSpec::Path, vec![1000, 10_000]);
        assert!(r.passed, "{:#?}", r.checks);
        let mut c = ConvergeConfig::new(ModelSpec::Path, vec![1000, 10_000]);
        c.scaling = Some(Scaling::None);
        let bad = run_converge(&c).unwrap().report;
        assert!(!bad.passed);
    }

    #[test]
    fn quantiles_are_monotone() {
        let r = quick(ModelSpec::preset("rrt").unwrap(), vec![500]);
        for g in &r.per_n {
            assert!(g.quantiles.windows(2).all(|w| w[0].value <= w[1].value));
        }
    }

    #[test]
    fn report_roundtrips_as_json() {
        let r = quick(ModelSpec::preset("superstar").unwrap(), vec![1000]);
        let text = serde_json::to_string(&r).unwrap();
        let back: ConvergenceReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.verdict(), r.passed);
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn restriction_checks_run() {
        let mut c = ConvergeConfig::new(ModelSpec::Star, vec![1000]);
        c.r = 4;
        let r = run_converge(&c).unwrap().report;
        assert!(r.checks.iter().any(|c| c.name == "four_point_violations" && c.passed));
        assert!(r.passed, "{:#?}", r.checks);
    }
}
