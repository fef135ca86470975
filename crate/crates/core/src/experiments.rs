//! Reproducible Monte Carlo runs over parameter grids.
//!
//! Every replicate draws from its own ChaCha8 stream keyed on
//! `(master_seed, domain, grid index, replicate, attempt)`, so results do
//! not depend on scheduling or thread count. Replicates run in parallel and
//! are reduced sequentially in replicate order.

use std::fmt;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DistributionSpec, Family, TheoreticalCoefficients};
use crate::error::{EstimatorError, ExperimentError};
use crate::estimators::{self, BivariateSample, CoefficientKind, CoefficientSet};

/// Redraws allowed per replicate after a tie before it counts as failed.
pub const MAX_ATTEMPTS: u64 = 16;

const DOMAIN_TABLE: u64 = 1;
const DOMAIN_META: u64 = 2;
const DOMAIN_BIAS: u64 = 3;
const DOMAIN_EXTEND: u64 = 4;

/// The stream for one replicate attempt.
pub fn replicate_rng(master_seed: u64, domain: u64, index: u64, replicate: u64, attempt: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let words = [master_seed, (domain << 32) | index, replicate, attempt];
    for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// User-supplied outlier generator: receives the clean sample and the
/// number of points to produce.
pub type OutlierFn = Arc<dyn Fn(&BivariateSample, usize, &mut dyn RngCore) -> Vec<(f64, f64)> + Send + Sync>;

/// How contaminating points are placed.
#[derive(Clone)]
pub enum OutlierRule {
    /// `scale` standard deviations out in x, and in y against the sign of
    /// the clean sample's correlation, with unit-sd jitter per point.
    Opposing { scale: f64 },
    /// At the sample mean, offset by `k * 1e-9` standard deviations for the
    /// k-th point so points stay distinct.
    AtMean,
    Custom(OutlierFn),
}

impl Default for OutlierRule {
    fn default() -> Self {
        OutlierRule::Opposing { scale: 10.0 }
    }
}

impl fmt::Debug for OutlierRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutlierRule::Opposing { scale } => f.debug_struct("Opposing").field("scale", scale).finish(),
            OutlierRule::AtMean => f.write_str("AtMean"),
            OutlierRule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl OutlierRule {
    pub fn name(&self) -> String {
        match self {
            OutlierRule::Opposing { scale } => format!("opposing({scale})"),
            OutlierRule::AtMean => "at-mean".into(),
            OutlierRule::Custom(_) => "custom".into(),
        }
    }

    pub fn generate(&self, sample: &BivariateSample, count: usize, rng: &mut dyn RngCore) -> Vec<(f64, f64)> {
        let (mx, sx) = mean_sd(sample.x());
        let (my, sy) = mean_sd(sample.y());
        match self {
            OutlierRule::Opposing { scale } => {
                let sign = match estimators::pearson_rho_n(sample) {
                    Ok(rho) if rho < 0.0 => -1.0,
                    _ => 1.0,
                };
                (0..count)
                    .map(|_| {
                        let zx: f64 = StandardNormal.sample(rng);
                        let zy: f64 = StandardNormal.sample(rng);
                        (mx + (scale + zx) * sx, my - sign * scale * sy + zy * sy)
                    })
                    .collect()
            }
            OutlierRule::AtMean => (0..count)
                .map(|k| {
                    let off = k as f64 * 1e-9;
                    (mx + off * sx, my + off * sy)
                })
                .collect(),
            OutlierRule::Custom(f) => f(sample, count, rng),
        }
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Default)]
pub struct Contamination {
    pub count: usize,
    pub rule: OutlierRule,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Parameter values; a single placeholder entry for the
    /// parameter-free family.
    pub grid: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub contamination: Option<Contamination>,
}

impl ExperimentConfig {
    pub fn new(family: Family, grid: Vec<f64>, n: usize, reps: usize, master_seed: u64) -> Self {
        Self {
            family,
            grid,
            n,
            reps,
            master_seed,
            contamination: None,
        }
    }

    pub fn with_contamination(mut self, count: usize, rule: OutlierRule) -> Self {
        self.contamination = Some(Contamination { count, rule });
        self
    }

    pub fn validate(&self) -> Result<Vec<DistributionSpec>, ExperimentError> {
        if self.n < 2 {
            return Err(ExperimentError::Config(format!("n must be >= 2, got {}", self.n)));
        }
        if self.reps < 1 {
            return Err(ExperimentError::Config("reps must be >= 1".into()));
        }
        if self.grid.is_empty() {
            return Err(ExperimentError::Config("parameter grid is empty".into()));
        }
        Ok(self
            .grid
            .iter()
            .map(|&t| self.family.with_parameter(t))
            .collect::<Result<_, _>>()?)
    }

    fn outliers(&self) -> Option<&Contamination> {
        self.contamination.as_ref().filter(|c| c.count > 0)
    }
}

/// Mean, unbiased variance and standard error of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    /// `NaN` with fewer than two values.
    pub variance: f64,
    pub se: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() < 2 {
            f64::NAN
        } else {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        };
        Self {
            mean,
            variance,
            se: (variance / n).sqrt(),
        }
    }

    /// `(mean - target) / se`.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub t: f64,
    pub pearson: Moments,
    pub spearman: Moments,
    pub kendall: Moments,
    pub r: Moments,
    /// Replicates that contributed.
    pub succeeded: usize,
    /// Replicates dropped after exhausting redraws or hitting a degenerate sample.
    pub failed: usize,
    /// Redraws caused by ties.
    pub tie_redraws: usize,
}

impl SummaryRow {
    pub fn get(&self, kind: CoefficientKind) -> &Moments {
        match kind {
            CoefficientKind::Pearson => &self.pearson,
            CoefficientKind::Spearman => &self.spearman,
            CoefficientKind::Kendall => &self.kendall,
            CoefficientKind::R => &self.r,
        }
    }

    pub fn success_rate(&self) -> f64 {
        self.succeeded as f64 / (self.succeeded + self.failed) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub family: Family,
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn row(&self, t: f64) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.t == t)
    }

    /// Lowest per-row share of successful replicates.
    pub fn min_success_rate(&self) -> f64 {
        self.rows.iter().map(SummaryRow::success_rate).fold(1.0, f64::min)
    }
}

struct Replicate {
    set: Result<CoefficientSet, EstimatorError>,
    redraws: usize,
}

fn run_replicate(
    spec: &DistributionSpec,
    n: usize,
    outliers: Option<&Contamination>,
    mut stream: impl FnMut(u64) -> ChaCha8Rng,
) -> Replicate {
    let mut last = EstimatorError::TooShort(0);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(attempt);
        let pairs = (0..n).map(|_| spec.draw(&mut rng)).collect::<Vec<_>>();
        let result = BivariateSample::from_pairs(&pairs).and_then(|sample| match outliers {
            Some(c) => {
                let extra = c.rule.generate(&sample, c.count, &mut rng);
                estimators::coefficient_set(&sample.extended(&extra)?)
            }
            None => estimators::coefficient_set(&sample),
        });
        match result {
            Err(e @ EstimatorError::Tie { .. }) => last = e,
            set => {
                return Replicate {
                    set,
                    redraws: attempt as usize,
                }
            }
        }
    }
    Replicate {
        set: Err(last),
        redraws: MAX_ATTEMPTS as usize,
    }
}

/// Per-replicate coefficient sets for one grid point, in replicate order.
fn replicate_sets(
    spec: &DistributionSpec,
    n: usize,
    reps: usize,
    outliers: Option<&Contamination>,
    seed: u64,
    domain: u64,
    index: u64,
) -> Vec<Replicate> {
    (0..reps as u64)
        .into_par_iter()
        .map(|k| run_replicate(spec, n, outliers, |a| replicate_rng(seed, domain, index, k, a)))
        .collect()
}

fn summarize(t: f64, reps: &[Replicate]) -> SummaryRow {
    let sets: Vec<CoefficientSet> = reps.iter().filter_map(|r| r.set.as_ref().ok().copied()).collect();
    let column = |kind| Moments::of(&sets.iter().map(|s| s.get(kind)).collect::<Vec<_>>());
    SummaryRow {
        t,
        pearson: column(CoefficientKind::Pearson),
        spearman: column(CoefficientKind::Spearman),
        kendall: column(CoefficientKind::Kendall),
        r: column(CoefficientKind::R),
        succeeded: sets.len(),
        failed: reps.len() - sets.len(),
        tie_redraws: reps.iter().map(|r| r.redraws).sum(),
    }
}

/// Means and variances of the four coefficients at each grid point.
/// Applies the config's contamination if present.
pub fn run_table(cfg: &ExperimentConfig) -> Result<SummaryTable, ExperimentError> {
    let specs = cfg.validate()?;
    let rows = specs
        .iter()
        .zip(&cfg.grid)
        .enumerate()
        .map(|(i, (spec, &t))| {
            let reps = replicate_sets(spec, cfg.n, cfg.reps, cfg.outliers(), cfg.master_seed, DOMAIN_TABLE, i as u64);
            summarize(t, &reps)
        })
        .collect();
    Ok(SummaryTable {
        family: cfg.family,
        n: cfg.n,
        reps: cfg.reps,
        master_seed: cfg.master_seed,
        rows,
    })
}

/// [`run_table`] with `count` outliers appended to every replicate.
pub fn run_contaminated(cfg: &ExperimentConfig) -> Result<SummaryTable, ExperimentError> {
    if cfg.contamination.is_none() {
        return Err(ExperimentError::Config("contamination settings missing".into()));
    }
    run_table(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaEntry {
    /// Meta-estimator applied between the two coefficient vectors.
    pub meta: CoefficientKind,
    pub a: CoefficientKind,
    pub b: CoefficientKind,
    pub mean: f64,
    pub se: f64,
    /// Repetitions that produced a value.
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaCorrelationReport {
    pub family: Family,
    pub t: f64,
    pub group_size: usize,
    pub repetitions: usize,
    pub entries: Vec<MetaEntry>,
    /// Datasets dropped after exhausting redraws.
    pub failed_datasets: usize,
}

impl MetaCorrelationReport {
    /// Looks up a pair in either order; a kind against itself is 1.
    pub fn get(&self, meta: CoefficientKind, a: CoefficientKind, b: CoefficientKind) -> Option<f64> {
        if a == b {
            return Some(1.0);
        }
        self.entries
            .iter()
            .find(|e| e.meta == meta && ((e.a, e.b) == (a, b) || (e.a, e.b) == (b, a)))
            .map(|e| e.mean)
    }
}

/// Meta-estimators used between coefficient vectors.
pub const META_KINDS: [CoefficientKind; 3] = [CoefficientKind::Pearson, CoefficientKind::Spearman, CoefficientKind::Kendall];

/// The six unordered pairs of distinct coefficient kinds.
pub fn coefficient_pairs() -> Vec<(CoefficientKind, CoefficientKind)> {
    let all = CoefficientKind::ALL;
    (0..4).flat_map(|i| (i + 1..4).map(move |j| (all[i], all[j]))).collect()
}

/// Correlations between coefficients computed on the same datasets.
///
/// Each of `cfg.reps` repetitions draws `group_size` datasets of size
/// `group_size`, forms the four coefficient vectors and correlates every
/// pair with each meta-estimator. Values are averaged over repetitions;
/// a repetition whose vectors are constant is skipped for that entry.
/// Only the first grid value is used.
pub fn run_meta_correlation(cfg: &ExperimentConfig, group_size: usize) -> Result<MetaCorrelationReport, ExperimentError> {
    let specs = cfg.validate()?;
    if group_size < 3 {
        return Err(ExperimentError::Config(format!("group size must be >= 3, got {group_size}")));
    }
    let spec = specs[0];
    let g = group_size as u64;
    let pairs = coefficient_pairs();
    let per_rep: Vec<(Vec<Option<f64>>, usize)> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|m| {
            let sets: Vec<Replicate> = (0..g)
                .map(|j| run_replicate(&spec, group_size, None, |a| replicate_rng(cfg.master_seed, DOMAIN_META, 0, m * g + j, a)))
                .collect();
            let ok: Vec<CoefficientSet> = sets.iter().filter_map(|r| r.set.as_ref().ok().copied()).collect();
            let failed = sets.len() - ok.len();
            let vector = |k: CoefficientKind| ok.iter().map(|s| s.get(k)).collect::<Vec<_>>();
            let values = META_KINDS
                .iter()
                .flat_map(|&meta| pairs.iter().map(move |&(a, b)| (meta, a, b)))
                .map(|(meta, a, b)| {
                    if ok.len() < 3 {
                        return None;
                    }
                    estimators::correlate(meta, &vector(a), &vector(b)).ok()
                })
                .collect();
            (values, failed)
        })
        .collect();

    let mut entries = Vec::new();
    for (idx, (meta, (a, b))) in META_KINDS
        .iter()
        .flat_map(|&meta| pairs.iter().map(move |&p| (meta, p)))
        .enumerate()
    {
        let values: Vec<f64> = per_rep.iter().filter_map(|(v, _)| v[idx]).collect();
        let m = Moments::of(&values);
        entries.push(MetaEntry {
            meta,
            a,
            b,
            mean: m.mean,
            se: m.se,
            used: values.len(),
        });
    }
    Ok(MetaCorrelationReport {
        family: cfg.family,
        t: cfg.grid[0],
        group_size,
        repetitions: cfg.reps,
        entries,
        failed_datasets: per_rep.iter().map(|(_, f)| f).sum(),
    })
}

/// Monte Carlo mean against the exact finite-sample expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasCell {
    pub expected: f64,
    pub mean: f64,
    pub se: f64,
    pub z: f64,
}

impl BiasCell {
    fn new(expected: f64, m: &Moments) -> Self {
        Self {
            expected,
            mean: m.mean,
            se: m.se,
            z: m.z(expected),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub n: usize,
    pub succeeded: usize,
    pub spearman: BiasCell,
    pub kendall: BiasCell,
    pub r: BiasCell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub theoretical: TheoreticalCoefficients,
    pub reps: usize,
    pub rows: Vec<BiasRow>,
}

/// Checks `E rho_{n,S} = ((n-2) rho_S + 3 tau)/(n+1)`,
/// `E tau_n = tau` and `E r_n = (3 n tau - (n-2) rho_S)/(2(n+1))` by simulation.
pub fn check_bias_formulas(
    spec: &DistributionSpec,
    n_grid: &[usize],
    reps: usize,
    master_seed: u64,
) -> Result<BiasReport, ExperimentError> {
    let theoretical = spec.theoretical()?;
    if reps < 2 {
        return Err(ExperimentError::Config("bias check needs reps >= 2".into()));
    }
    if n_grid.is_empty() || n_grid.iter().any(|&n| n < 2) {
        return Err(ExperimentError::Config("sample sizes must be >= 2".into()));
    }
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let row = summarize(n as f64, &replicate_sets(spec, n, reps, None, master_seed, DOMAIN_BIAS, i as u64));
            let (es, et, er) = theoretical.rank_expectations(n);
            BiasRow {
                n,
                succeeded: row.succeeded,
                spearman: BiasCell::new(es, &row.spearman),
                kendall: BiasCell::new(et, &row.kendall),
                r: BiasCell::new(er, &row.r),
            }
        })
        .collect();
    Ok(BiasReport { theoretical, reps, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Following,
    Violating,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::Following => "trend-following",
            Trend::Violating => "trend-violating",
        }
    }
}

/// Simulated stand-in for Pearson's coefficient where second moments may not exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PearsonExtension {
    /// Mean sample Pearson coefficient.
    pub rho_tilde: f64,
    pub se: f64,
    pub half_means: (f64, f64),
    /// Half-sample means differ by less than twice their combined SE.
    pub stable: bool,
    pub spearman_mean: f64,
    pub kendall_mean: f64,
    pub r_mean: f64,
    /// `|rho_tilde - m|` for the spearman, kendall and r means.
    pub distances: [f64; 3],
    pub trend: Trend,
    /// Population Pearson value when it exists.
    pub theoretical: Option<f64>,
    /// `rho_tilde - theoretical`.
    pub gap: Option<f64>,
    pub succeeded: usize,
}

/// `rho_tilde` with stability and trend diagnostics.
///
/// The trend is followed when `rho_tilde` shares the sign of all three rank
/// means and is at least as large in magnitude as the smallest of them.
pub fn extend_pearson(
    spec: &DistributionSpec,
    n: usize,
    reps: usize,
    master_seed: u64,
) -> Result<PearsonExtension, ExperimentError> {
    spec.validate()?;
    if n < 2 || reps < 4 {
        return Err(ExperimentError::Config("extension needs n >= 2 and reps >= 4".into()));
    }
    let reps = replicate_sets(spec, n, reps, None, master_seed, DOMAIN_EXTEND, 0);
    let row = summarize(spec.parameter().unwrap_or(0.0), &reps);
    let pearson: Vec<f64> = reps.iter().filter_map(|r| r.set.as_ref().ok().map(|s| s.pearson)).collect();
    let (first, second) = pearson.split_at(pearson.len() / 2);
    let (h1, h2) = (Moments::of(first), Moments::of(second));
    let stable = (h1.mean - h2.mean).abs() < 2.0 * (h1.se.powi(2) + h2.se.powi(2)).sqrt();

    let rho = row.pearson.mean;
    let rank_means = [row.spearman.mean, row.kendall.mean, row.r.mean];
    let follows = rank_means.iter().all(|m| m.signum() == rho.signum())
        && rho.abs() >= rank_means.iter().fold(f64::INFINITY, |a, m| a.min(m.abs()));
    let theoretical = spec.theoretical().ok().and_then(|tc| tc.pearson);
    Ok(PearsonExtension {
        rho_tilde: rho,
        se: row.pearson.se,
        half_means: (h1.mean, h2.mean),
        stable,
        spearman_mean: rank_means[0],
        kendall_mean: rank_means[1],
        r_mean: rank_means[2],
        distances: rank_means.map(|m| (rho - m).abs()),
        trend: if follows { Trend::Following } else { Trend::Violating },
        theoretical,
        gap: theoretical.map(|p| rho - p),
        succeeded: row.succeeded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_repeatable() {
        let mut a = replicate_rng(1, DOMAIN_TABLE, 0, 0, 0);
        let mut b = replicate_rng(1, DOMAIN_TABLE, 0, 0, 0);
        assert_eq!(a.next_u64(), b.next_u64());
        let draws: Vec<u64> = [
            replicate_rng(1, DOMAIN_TABLE, 0, 0, 0),
            replicate_rng(2, DOMAIN_TABLE, 0, 0, 0),
            replicate_rng(1, DOMAIN_META, 0, 0, 0),
            replicate_rng(1, DOMAIN_TABLE, 1, 0, 0),
            replicate_rng(1, DOMAIN_TABLE, 0, 1, 0),
            replicate_rng(1, DOMAIN_TABLE, 0, 0, 1),
        ]
        .into_iter()
        .map(|mut r| r.next_u64())
        .collect();
        for i in 0..draws.len() {
            for j in i + 1..draws.len() {
                assert_ne!(draws[i], draws[j]);
            }
        }
    }

    #[test]
    fn moments_match_hand_values() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((m.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(Moments::of(&[1.0]).variance.is_nan());
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(Family::Normal, vec![0.5], 10, 5, 1);
        assert!(ok.validate().is_ok());
        let bad_n = ExperimentConfig { n: 1, ..ok.clone() };
        assert!(matches!(bad_n.validate(), Err(ExperimentError::Config(_))));
        let bad_reps = ExperimentConfig { reps: 0, ..ok.clone() };
        assert!(bad_reps.validate().is_err());
        let bad_t = ExperimentConfig { grid: vec![1.0], ..ok.clone() };
        assert!(matches!(bad_t.validate(), Err(ExperimentError::Spec(_))));
        let empty = ExperimentConfig { grid: vec![], ..ok };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn at_mean_outlier_leaves_pearson_nearly_unchanged() {
        let mut rng = replicate_rng(3, 9, 0, 0, 0);
        let spec = DistributionSpec::Normal(0.6);
        let sample = spec.sample(30, &mut rng).unwrap();
        let extra = OutlierRule::AtMean.generate(&sample, 1, &mut rng);
        let before = estimators::pearson_rho_n(&sample).unwrap();
        let after = estimators::pearson_rho_n(&sample.extended(&extra).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-12, "{before} {after}");
        let extra = OutlierRule::AtMean.generate(&sample, 3, &mut rng);
        let after = estimators::pearson_rho_n(&sample.extended(&extra).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-8);
    }

    #[test]
    fn opposing_outliers_sit_against_the_association() {
        let mut rng = replicate_rng(4, 9, 0, 0, 0);
        let sample = DistributionSpec::Normal(-0.9).sample(200, &mut rng).unwrap();
        let pts = OutlierRule::default().generate(&sample, 5, &mut rng);
        assert_eq!(pts.len(), 5);
        for (x, y) in pts {
            assert!(x > 5.0 && y > 5.0, "({x}, {y})");
        }
    }

    #[test]
    fn custom_rule_is_called() {
        let rule = OutlierRule::Custom(Arc::new(|_, k, _| (0..k).map(|i| (100.0 + i as f64, -100.0)).collect()));
        let mut rng = replicate_rng(5, 9, 0, 0, 0);
        let sample = DistributionSpec::Normal(0.0).sample(10, &mut rng).unwrap();
        assert_eq!(rule.generate(&sample, 2, &mut rng), vec![(100.0, -100.0), (101.0, -100.0)]);
        assert_eq!(format!("{rule:?}"), "Custom(..)");
    }

    #[test]
    fn pairs_are_the_six_unordered_combinations() {
        let p = coefficient_pairs();
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|(a, b)| a < b));
    }
}
