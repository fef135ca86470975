//! Sample correlation coefficients built on concomitants of order statistics.
//!
//! Every rank statistic here is computed from the concomitant sequence
//! `Y[1..n]`, the y-values reordered by increasing x. Kendall's tau uses the
//! sequential ranks `R_j = #{i < j : Y[i] <= Y[j]}`, Spearman's rho uses the
//! full ranks `R_{j,n}` of `Y[j]` among all concomitants, and the mixed
//! coefficient is `r_n = 1.5 tau_n - 0.5 rho_{n,S}`.
//!
//! The rank formulas are only valid for tie-free data, so exact ties are
//! reported as [`EstimatorError::Tie`] unless the caller opts into
//! [`TiePolicy::BreakByIndex`].

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Coordinate, EstimatorError};

/// Paired observations `(x_i, y_i)`, `n >= 2`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl BivariateSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, EstimatorError> {
        if x.len() != y.len() {
            return Err(EstimatorError::LengthMismatch(x.len(), y.len()));
        }
        if x.len() < 2 {
            return Err(EstimatorError::TooShort(x.len()));
        }
        for (coordinate, values) in [(Coordinate::X, &x), (Coordinate::Y, &y)] {
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(EstimatorError::NonFinite { coordinate, index });
            }
        }
        Ok(Self { x, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, EstimatorError> {
        let (x, y) = pairs.iter().copied().unzip();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false for a constructed sample; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// Returns a new sample with `extra` points appended.
    pub fn extended(&self, extra: &[(f64, f64)]) -> Result<Self, EstimatorError> {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        for &(a, b) in extra {
            x.push(a);
            y.push(b);
        }
        Self::new(x, y)
    }
}

/// How exact ties are handled by [`coefficient_set_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Any tie is an error.
    #[default]
    Reject,
    /// Tied values are ordered by their position in the sample. For
    /// exchangeable data this is a uniformly random tie-break.
    BreakByIndex,
}

/// Order statistics of x together with their concomitants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcomitantSequence {
    x_sorted: Vec<f64>,
    y_conc: Vec<f64>,
}

impl ConcomitantSequence {
    /// Builds a sequence directly from concomitant values, taking the
    /// j-th order statistic of x to be `j`.
    pub fn from_concomitants(y_conc: Vec<f64>) -> Result<Self, EstimatorError> {
        if y_conc.len() < 2 {
            return Err(EstimatorError::TooShort(y_conc.len()));
        }
        if let Some(index) = y_conc.iter().position(|v| !v.is_finite()) {
            return Err(EstimatorError::NonFinite {
                coordinate: Coordinate::Y,
                index,
            });
        }
        let x_sorted = (1..=y_conc.len()).map(|j| j as f64).collect();
        Ok(Self { x_sorted, y_conc })
    }

    pub fn x_sorted(&self) -> &[f64] {
        &self.x_sorted
    }

    pub fn y_conc(&self) -> &[f64] {
        &self.y_conc
    }

    pub fn len(&self) -> usize {
        self.y_conc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_conc.is_empty()
    }
}

/// Sequential and full ranks of a concomitant sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVectors {
    /// `R_j` for `j = 2..=n`; element 0 holds `R_2`.
    pub seq_ranks: Vec<usize>,
    /// `R_{j,n}` for `j = 1..=n`, a permutation of `1..=n`.
    pub full_ranks: Vec<usize>,
}

/// The four sample coefficients of one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub pearson: f64,
    pub spearman: f64,
    pub kendall: f64,
    pub r: f64,
}

/// Which of the four coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    Pearson,
    Spearman,
    Kendall,
    R,
}

impl CoefficientKind {
    pub const ALL: [CoefficientKind; 4] = [
        CoefficientKind::Pearson,
        CoefficientKind::Spearman,
        CoefficientKind::Kendall,
        CoefficientKind::R,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::Pearson => "pearson",
            CoefficientKind::Spearman => "spearman",
            CoefficientKind::Kendall => "kendall",
            CoefficientKind::R => "r",
        }
    }
}

impl CoefficientSet {
    pub fn get(&self, kind: CoefficientKind) -> f64 {
        match kind {
            CoefficientKind::Pearson => self.pearson,
            CoefficientKind::Spearman => self.spearman,
            CoefficientKind::Kendall => self.kendall,
            CoefficientKind::R => self.r,
        }
    }
}

/// `1.5 tau - 0.5 rho_S`. Shared by every code path that forms `r_n` so the
/// identity holds bit for bit.
#[inline]
pub fn mixed(kendall: f64, spearman: f64) -> f64 {
    1.5 * kendall - 0.5 * spearman
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("finite values")
}

/// Indices of `values` in increasing order, ties ordered by index.
fn argsort(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_f64(values[a], values[b]).then(a.cmp(&b)));
    order
}

/// First adjacent tie in a sorted index order, reported as (smaller, larger) index.
fn find_tie(values: &[f64], order: &[usize]) -> Option<(usize, usize)> {
    order.windows(2).find_map(|w| {
        (values[w[0]] == values[w[1]]).then(|| (w[0].min(w[1]), w[0].max(w[1])))
    })
}

fn tie_free_order(values: &[f64], coordinate: Coordinate) -> Result<Vec<usize>, EstimatorError> {
    let order = argsort(values);
    match find_tie(values, &order) {
        Some((first, second)) => Err(EstimatorError::Tie {
            coordinate,
            first,
            second,
        }),
        None => Ok(order),
    }
}

/// Reorders the sample by increasing x.
pub fn concomitants(sample: &BivariateSample) -> Result<ConcomitantSequence, EstimatorError> {
    let order = tie_free_order(sample.x(), Coordinate::X)?;
    Ok(ConcomitantSequence {
        x_sorted: order.iter().map(|&i| sample.x[i]).collect(),
        y_conc: order.iter().map(|&i| sample.y[i]).collect(),
    })
}

/// `R_j = sum_{i<j} I(Y[i] <= Y[j])` for `j = 2..=n`, by direct counting.
pub fn sequential_ranks(conc: &ConcomitantSequence) -> Result<Vec<usize>, EstimatorError> {
    let y = conc.y_conc();
    tie_free_order(y, Coordinate::Y)?;
    Ok((1..y.len())
        .map(|j| y[..j].iter().filter(|&&yi| yi <= y[j]).count())
        .collect())
}

/// `R_{j,n}`: rank (1-based) of `Y[j]` among all concomitants.
pub fn full_ranks(conc: &ConcomitantSequence) -> Result<Vec<usize>, EstimatorError> {
    let order = tie_free_order(conc.y_conc(), Coordinate::Y)?;
    Ok(ranks_from_order(&order))
}

fn ranks_from_order(order: &[usize]) -> Vec<usize> {
    let mut ranks = vec![0; order.len()];
    for (position, &index) in order.iter().enumerate() {
        ranks[index] = position + 1;
    }
    ranks
}

pub fn rank_vectors(conc: &ConcomitantSequence) -> Result<RankVectors, EstimatorError> {
    Ok(RankVectors {
        seq_ranks: sequential_ranks(conc)?,
        full_ranks: full_ranks(conc)?,
    })
}

fn kendall_from_rank_sum(rank_sum: u64, n: usize) -> f64 {
    let n = n as f64;
    4.0 * rank_sum as f64 / (n * (n - 1.0)) - 1.0
}

/// `tau_n = 4 sum R_j / (n(n-1)) - 1` from the sequential ranks. O(n^2).
pub fn kendall_tau_n(conc: &ConcomitantSequence) -> Result<f64, EstimatorError> {
    let rank_sum: u64 = sequential_ranks(conc)?.iter().map(|&r| r as u64).sum();
    Ok(kendall_from_rank_sum(rank_sum, conc.len()))
}

/// Same value as [`kendall_tau_n`] in O(n log n): the sequential-rank sum
/// equals `C(n,2)` minus the number of inversions in the concomitants.
pub fn kendall_tau_n_fast(conc: &ConcomitantSequence) -> Result<f64, EstimatorError> {
    let order = tie_free_order(conc.y_conc(), Coordinate::Y)?;
    Ok(kendall_from_ranks(&ranks_from_order(&order)))
}

fn kendall_from_ranks(ranks: &[usize]) -> f64 {
    let n = ranks.len();
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    let mut work = ranks.to_vec();
    kendall_from_rank_sum(pairs - count_inversions(&mut work), n)
}

/// Number of pairs `i < j` with `v[i] > v[j]`; sorts `v` in place.
fn count_inversions(v: &mut [usize]) -> u64 {
    let n = v.len();
    let mut buf = vec![0usize; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            if mid < end {
                let (mut i, mut j, mut k) = (start, mid, start);
                while i < mid && j < end {
                    if v[i] <= v[j] {
                        buf[k] = v[i];
                        i += 1;
                    } else {
                        buf[k] = v[j];
                        inversions += (mid - i) as u64;
                        j += 1;
                    }
                    k += 1;
                }
                buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
                k += mid - i;
                buf[k..k + end - j].copy_from_slice(&v[j..end]);
                v[start..end].copy_from_slice(&buf[start..end]);
            }
            start += 2 * width;
        }
        width *= 2;
    }
    inversions
}

fn spearman_from_ranks(ranks: &[usize]) -> f64 {
    let n = ranks.len() as u128;
    let sum_sq: u128 = ranks
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let d = r.abs_diff(j + 1) as u128;
            d * d
        })
        .sum();
    1.0 - 6.0 * sum_sq as f64 / (n * n * n - n) as f64
}

/// `rho_{n,S} = 1 - 6 sum (R_{j,n} - j)^2 / (n^3 - n)`.
pub fn spearman_rho_n(conc: &ConcomitantSequence) -> Result<f64, EstimatorError> {
    Ok(spearman_from_ranks(&full_ranks(conc)?))
}

/// `r_n = 1.5 tau_n - 0.5 rho_{n,S}`.
pub fn r_n(conc: &ConcomitantSequence) -> Result<f64, EstimatorError> {
    let ranks = full_ranks(conc)?;
    Ok(mixed(kendall_from_ranks(&ranks), spearman_from_ranks(&ranks)))
}

/// Sample Pearson coefficient.
///
/// Two-pass: means first, then centered sums. Deviations are divided by the
/// largest absolute deviation of their coordinate before squaring, so
/// heavy-tailed samples with values near 1e170 do not overflow. The ratio is
/// clamped to `[-1, 1]`.
pub fn pearson_rho_n(sample: &BivariateSample) -> Result<f64, EstimatorError> {
    pearson_slices(sample.x(), sample.y())
}

pub(crate) fn pearson_slices(x: &[f64], y: &[f64]) -> Result<f64, EstimatorError> {
    let n = x.len() as f64;
    let mean = |v: &[f64]| v.iter().map(|&a| a / n).sum::<f64>();
    let (mx, my) = (mean(x), mean(y));
    let spread = |v: &[f64], m: f64| v.iter().fold(0.0f64, |acc, &a| acc.max((a - m).abs()));
    let (sx, sy) = (spread(x, mx), spread(y, my));
    if sx == 0.0 {
        return Err(EstimatorError::Degenerate(Coordinate::X));
    }
    if sy == 0.0 {
        return Err(EstimatorError::Degenerate(Coordinate::Y));
    }
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = (a - mx) / sx;
        let dy = (b - my) / sy;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// All four coefficients with ties rejected.
pub fn coefficient_set(sample: &BivariateSample) -> Result<CoefficientSet, EstimatorError> {
    coefficient_set_with(sample, TiePolicy::Reject)
}

/// All four coefficients; the Kendall value uses the O(n log n) path.
pub fn coefficient_set_with(
    sample: &BivariateSample,
    policy: TiePolicy,
) -> Result<CoefficientSet, EstimatorError> {
    let pearson = pearson_rho_n(sample)?;
    let ranks = match policy {
        TiePolicy::Reject => {
            let conc = concomitants(sample)?;
            ranks_from_order(&tie_free_order(conc.y_conc(), Coordinate::Y)?)
        }
        TiePolicy::BreakByIndex => tie_broken_ranks(sample),
    };
    let kendall = kendall_from_ranks(&ranks);
    let spearman = spearman_from_ranks(&ranks);
    Ok(CoefficientSet {
        pearson,
        spearman,
        kendall,
        r: mixed(kendall, spearman),
    })
}

/// Ranks of y in x order, with ties in either coordinate ordered by index.
fn tie_broken_ranks(sample: &BivariateSample) -> Vec<usize> {
    let x_order = argsort(sample.x());
    let y_rank = ranks_from_order(&argsort(sample.y()));
    x_order.iter().map(|&i| y_rank[i]).collect()
}

/// One coefficient between two equal-length vectors, ties broken by index.
/// Used for correlations between vectors of coefficients, which are
/// lattice-valued and tie routinely.
pub fn correlate(kind: CoefficientKind, a: &[f64], b: &[f64]) -> Result<f64, EstimatorError> {
    let sample = BivariateSample::new(a.to_vec(), b.to_vec())?;
    if kind == CoefficientKind::Pearson {
        return pearson_rho_n(&sample);
    }
    let ranks = tie_broken_ranks(&sample);
    let kendall = kendall_from_ranks(&ranks);
    let spearman = spearman_from_ranks(&ranks);
    Ok(match kind {
        CoefficientKind::Kendall => kendall,
        CoefficientKind::Spearman => spearman,
        _ => mixed(kendall, spearman),
    })
}
