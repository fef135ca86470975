//! The four bivariate families, their exact samplers and closed-form
//! population coefficients.
//!
//! | family | joint CDF | support |
//! |---|---|---|
//! | `Normal(t)` | standard bivariate normal, correlation `t` | R^2 |
//! | `Pareto(t)` | `1 - (1+y)^-t - (1+x)^-t + (1+x+y)^-t` | x, y > 0 |
//! | `ExpPareto(t)` | `1 - e^-x - (1+y)^-t + e^{-x(1+y)^t} (1+y)^-t` | x, y > 0 |
//! | `ExpParetoTransformed` | `v - e^-x + (1-v) e^{-x/(1-v)}` | x > 0, 0 <= v <= 1 |
//! | `Fgm(t)` | piecewise, split at y = 0 | [0,1] x [-1,1] |

pub mod normal;

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::SpecError;
use crate::estimators::BivariateSample;
use crate::quadrature::{GaussLegendre, UnitNode};
use crate::theory::{self, QuadratureConfig};

/// Family tag without a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Normal,
    Pareto,
    ExpPareto,
    ExpParetoTransformed,
    Fgm,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Normal,
        Family::Pareto,
        Family::ExpPareto,
        Family::ExpParetoTransformed,
        Family::Fgm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Pareto => "pareto",
            Family::ExpPareto => "exp-pareto",
            Family::ExpParetoTransformed => "exp-pareto-transformed",
            Family::Fgm => "fgm",
        }
    }

    /// Whether the family takes a parameter `t`.
    pub fn is_parametric(self) -> bool {
        self != Family::ExpParetoTransformed
    }

    /// Builds a validated spec. `t` is ignored for the transformed family.
    pub fn with_parameter(self, t: f64) -> Result<DistributionSpec, SpecError> {
        let spec = match self {
            Family::Normal => DistributionSpec::Normal(t),
            Family::Pareto => DistributionSpec::Pareto(t),
            Family::ExpPareto => DistributionSpec::ExpPareto(t),
            Family::ExpParetoTransformed => DistributionSpec::ExpParetoTransformed,
            Family::Fgm => DistributionSpec::Fgm(t),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "normal" => Ok(Family::Normal),
            "pareto" => Ok(Family::Pareto),
            "exp-pareto" | "exppareto" => Ok(Family::ExpPareto),
            "exp-pareto-transformed" | "expparetotransformed" => Ok(Family::ExpParetoTransformed),
            "fgm" => Ok(Family::Fgm),
            _ => Err(SpecError::UnknownFamily(s.to_string())),
        }
    }
}

/// A family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// Standard bivariate normal with correlation `t`, `-1 < t < 1`.
    Normal(f64),
    /// Bivariate Pareto (Lomax margins), `t > 0`.
    Pareto(f64),
    /// Exponential x, Pareto-tailed y, `t > 0`.
    ExpPareto(f64),
    /// `ExpPareto` with y mapped through its own marginal, `v = 1 - (1+y)^-t`.
    ExpParetoTransformed,
    /// FGM-like family on `[0,1] x [-1,1]`, `-1 <= t <= 1`.
    Fgm(f64),
}

/// Population coefficients. `pearson` is `None` when second moments do not exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalCoefficients {
    pub pearson: Option<f64>,
    pub spearman: f64,
    pub kendall: f64,
    pub r: f64,
}

impl TheoreticalCoefficients {
    /// Fills `r = (3 kendall - spearman) / 2`.
    pub fn new(pearson: Option<f64>, spearman: f64, kendall: f64) -> Self {
        Self {
            pearson,
            spearman,
            kendall,
            r: (3.0 * kendall - spearman) / 2.0,
        }
    }

    /// Exact finite-sample expectations `(E rho_{n,S}, E tau_n, E r_n)`.
    pub fn rank_expectations(&self, n: usize) -> (f64, f64, f64) {
        let n = n as f64;
        let spearman = ((n - 2.0) * self.spearman + 3.0 * self.kendall) / (n + 1.0);
        let r = (3.0 * n * self.kendall - (n - 2.0) * self.spearman) / (2.0 * (n + 1.0));
        (spearman, self.kendall, r)
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

impl DistributionSpec {
    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::Normal(_) => Family::Normal,
            DistributionSpec::Pareto(_) => Family::Pareto,
            DistributionSpec::ExpPareto(_) => Family::ExpPareto,
            DistributionSpec::ExpParetoTransformed => Family::ExpParetoTransformed,
            DistributionSpec::Fgm(_) => Family::Fgm,
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            DistributionSpec::Normal(t)
            | DistributionSpec::Pareto(t)
            | DistributionSpec::ExpPareto(t)
            | DistributionSpec::Fgm(t) => Some(t),
            DistributionSpec::ExpParetoTransformed => None,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let (ok, family, domain, t) = match *self {
            DistributionSpec::Normal(t) => (t > -1.0 && t < 1.0, "normal", "(-1, 1)", t),
            DistributionSpec::Pareto(t) => (t > 0.0 && t.is_finite(), "pareto", "(0, inf)", t),
            DistributionSpec::ExpPareto(t) => (t > 0.0 && t.is_finite(), "exp-pareto", "(0, inf)", t),
            DistributionSpec::Fgm(t) => ((-1.0..=1.0).contains(&t), "fgm", "[-1, 1]", t),
            DistributionSpec::ExpParetoTransformed => return Ok(()),
        };
        if ok {
            Ok(())
        } else {
            Err(SpecError::OutOfDomain { family, t, domain })
        }
    }

    /// One draw `(x, y)`. The spec must be valid.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match *self {
            DistributionSpec::Normal(t) => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                (z1, t * z1 + (1.0 - t * t).sqrt() * z2)
            }
            DistributionSpec::Pareto(t) => {
                // X = U1^(-1/t) - 1; P(Y > y | X = x) = ((1+x)/(1+x+y))^(t+1)
                let x = (-open01(rng).ln() / t).exp_m1();
                let y = (1.0 + x) * (-open01(rng).ln() / (t + 1.0)).exp_m1();
                (x, y)
            }
            DistributionSpec::ExpPareto(t) => {
                // P(Y <= y | X = x) = 1 - exp(-x((1+y)^t - 1))
                let x = -open01(rng).ln();
                let e = -open01(rng).ln();
                (x, ((e / x).ln_1p() / t).exp_m1())
            }
            DistributionSpec::ExpParetoTransformed => {
                // 1 - (1+y)^-t with (1+y)^t = 1 + E/x
                let x = -open01(rng).ln();
                let e = -open01(rng).ln();
                (x, e / (x + e))
            }
            DistributionSpec::Fgm(t) => {
                let x = open01(rng);
                let envelope = 0.5 * (1.0 + t.abs());
                loop {
                    let y = 2.0 * open01(rng) - 1.0;
                    if open01(rng) * envelope <= self.density(x, y) {
                        return (x, y);
                    }
                }
            }
        }
    }

    /// `n` i.i.d. draws, `n >= 1`.
    pub fn sample_pairs<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<(f64, f64)>, SpecError> {
        self.validate()?;
        if n == 0 {
            return Err(SpecError::EmptySample);
        }
        Ok((0..n).map(|_| self.draw(rng)).collect())
    }

    /// `n >= 2` i.i.d. draws as a sample.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<BivariateSample, SampleError> {
        let pairs = self.sample_pairs(n, rng)?;
        Ok(BivariateSample::from_pairs(&pairs)?)
    }

    /// `H(x)`.
    pub fn marginal_h(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Normal(_) => normal::cdf(x),
            DistributionSpec::Pareto(t) => lomax_cdf(x, t),
            DistributionSpec::ExpPareto(_) | DistributionSpec::ExpParetoTransformed => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            DistributionSpec::Fgm(_) => x.clamp(0.0, 1.0),
        }
    }

    /// `G(y)`.
    pub fn marginal_g(&self, y: f64) -> f64 {
        match *self {
            DistributionSpec::Normal(_) => normal::cdf(y),
            DistributionSpec::Pareto(t) | DistributionSpec::ExpPareto(t) => lomax_cdf(y, t),
            DistributionSpec::ExpParetoTransformed => y.clamp(0.0, 1.0),
            DistributionSpec::Fgm(_) => (0.5 * (y + 1.0)).clamp(0.0, 1.0),
        }
    }

    /// `F(x, y)`, clamped to 0/1 outside the support.
    pub fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        match *self {
            DistributionSpec::Normal(t) => normal::bvn_cdf(x, y, t),
            DistributionSpec::Pareto(t) => {
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                let a = (-t * y.ln_1p()).exp();
                let b = (-t * x.ln_1p()).exp();
                let c = (-t * (x + y).ln_1p()).exp();
                (1.0 - a - b + c).clamp(0.0, 1.0)
            }
            DistributionSpec::ExpPareto(t) => {
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                let grow = (t * y.ln_1p()).exp();
                let a = 1.0 / grow;
                let tail = if a == 0.0 { 0.0 } else { (-x * grow).exp() * a };
                (1.0 - (-x).exp() - a + tail).clamp(0.0, 1.0)
            }
            DistributionSpec::ExpParetoTransformed => {
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                if y >= 1.0 {
                    return self.marginal_h(x);
                }
                let s = 1.0 - y;
                (y - (-x).exp() + s * (-x / s).exp()).clamp(0.0, 1.0)
            }
            DistributionSpec::Fgm(t) => {
                if x <= 0.0 || y <= -1.0 {
                    return 0.0;
                }
                let x = x.min(1.0);
                let y = y.min(1.0);
                if y <= 0.0 {
                    0.5 * x * (y + 1.0) * (1.0 + t * (1.0 - x) * y)
                } else {
                    0.5 * x + 0.5 * x * y * (1.0 + t * (1.0 - x) * (1.0 - y))
                }
            }
        }
    }

    /// `f(x, y)`, zero outside the support.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        match *self {
            DistributionSpec::Normal(t) => {
                let s = 1.0 - t * t;
                (-(x * x - 2.0 * t * x * y + y * y) / (2.0 * s)).exp() / (2.0 * PI * s.sqrt())
            }
            DistributionSpec::Pareto(t) => {
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                t * (t + 1.0) * (-(t + 2.0) * (x + y).ln_1p()).exp()
            }
            DistributionSpec::ExpPareto(t) => {
                if x <= 0.0 || y <= 0.0 {
                    return 0.0;
                }
                let grow = (t * y.ln_1p()).exp();
                x * t * grow / (1.0 + y) * (-x * grow).exp()
            }
            DistributionSpec::ExpParetoTransformed => {
                if x <= 0.0 || y <= 0.0 || y >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - y;
                x * (-x / s).exp() / (s * s)
            }
            DistributionSpec::Fgm(t) => {
                if !(0.0..=1.0).contains(&x) || !(-1.0..=1.0).contains(&y) {
                    return 0.0;
                }
                0.5 * (1.0 + t * (1.0 - 2.0 * x) * (1.0 - 2.0 * y.abs()))
            }
        }
    }

    /// `x = H^{-1}(u)`.
    pub(crate) fn x_quantile(&self, u: UnitNode) -> f64 {
        match *self {
            DistributionSpec::Normal(_) => {
                if u.value < 0.5 {
                    normal::quantile(u.value)
                } else {
                    normal::upper_quantile(u.complement)
                }
            }
            DistributionSpec::Pareto(t) => (-u.complement.ln() / t).exp_m1(),
            DistributionSpec::ExpPareto(_) | DistributionSpec::ExpParetoTransformed => -u.complement.ln(),
            DistributionSpec::Fgm(_) => u.value,
        }
    }

    /// `y` with `P(Y <= y | X = x) = w`.
    pub(crate) fn conditional_y_quantile(&self, x: f64, w: UnitNode) -> f64 {
        match *self {
            DistributionSpec::Normal(t) => {
                let z = if w.value < 0.5 {
                    normal::quantile(w.value)
                } else {
                    normal::upper_quantile(w.complement)
                };
                t * x + (1.0 - t * t).sqrt() * z
            }
            DistributionSpec::Pareto(t) => (1.0 + x) * (-w.complement.ln() / (t + 1.0)).exp_m1(),
            DistributionSpec::ExpPareto(t) => ((-w.complement.ln() / x).ln_1p() / t).exp_m1(),
            DistributionSpec::ExpParetoTransformed => {
                let e = -w.complement.ln();
                e / (x + e)
            }
            DistributionSpec::Fgm(t) => {
                // Conditional CDF: (y+1)(1+a y)/2 for y <= 0, 1/2 + y(1 + a(1-y))/2 for y > 0.
                let a = t * (1.0 - 2.0 * x);
                if w.value <= 0.5 {
                    let s = 4.0 * w.value / ((1.0 - a) + ((1.0 - a).powi(2) + 8.0 * a * w.value).sqrt());
                    s - 1.0
                } else {
                    let q = 1.0 - 2.0 * w.complement;
                    2.0 * q / ((1.0 + a) + ((1.0 + a).powi(2) - 4.0 * a * q).sqrt())
                }
            }
        }
    }

    /// Closed-form population coefficients; Pareto's Spearman value comes
    /// from quadrature and is cached per parameter.
    pub fn theoretical(&self) -> Result<TheoreticalCoefficients, SpecError> {
        self.validate()?;
        Ok(match *self {
            DistributionSpec::Normal(t) => TheoreticalCoefficients::new(
                Some(t),
                6.0 / PI * (t / 2.0).asin(),
                2.0 / PI * t.asin(),
            ),
            DistributionSpec::Pareto(t) => TheoreticalCoefficients::new(
                (t > 2.0).then(|| 1.0 / t),
                pareto_spearman(t)?,
                1.0 / (2.0 * t + 1.0),
            ),
            DistributionSpec::ExpPareto(t) => TheoreticalCoefficients::new(
                (t > 2.0).then(|| -(t * (t - 2.0)).sqrt() / (2.0 * t - 1.0)),
                12.0 * LN_2 - 9.0,
                -0.5,
            ),
            DistributionSpec::ExpParetoTransformed => {
                TheoreticalCoefficients::new(Some(-1.0 / 3.0f64.sqrt()), 12.0 * LN_2 - 9.0, -0.5)
            }
            DistributionSpec::Fgm(_) => TheoreticalCoefficients::new(Some(0.0), 0.0, 0.0),
        })
    }
}

fn lomax_cdf(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-t * x.ln_1p()).exp_m1()
    }
}

fn pareto_spearman(t: f64) -> Result<f64, SpecError> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache poisoned").get(&t.to_bits()) {
        return Ok(v);
    }
    let value = theory::integrate_coefficients(&DistributionSpec::Pareto(t), &QuadratureConfig::default())
        .map_err(SpecError::Quadrature)?
        .spearman;
    cache.lock().expect("cache poisoned").insert(t.to_bits(), value);
    Ok(value)
}

/// Errors from [`DistributionSpec::sample`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Estimator(#[from] crate::error::EstimatorError),
}

/// Conditional means of the FGM-like family, which is uncorrelated with
/// `E(Y|X) = EY = 0` but has `E(X|Y=y) = 1/2 - t(1 - 2|y|)/6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiIndependence {
    pub t: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    /// `E(X | Y = 0) = 1/2 - t/6`, the extreme of `E(X|Y)`.
    pub e_x_given_y_at_zero: f64,
}

impl SemiIndependence {
    /// `E(X | Y = y)` in closed form.
    pub fn e_x_given_y(&self, y: f64) -> f64 {
        0.5 - self.t * (1.0 - 2.0 * y.abs()) / 6.0
    }

    /// Average of `E(X | Y = y)` over `y` uniform on `[lo, hi]`, the target
    /// of a binned conditional mean.
    pub fn e_x_given_y_bin(&self, lo: f64, hi: f64) -> f64 {
        let mean_abs = if lo >= 0.0 {
            0.5 * (lo + hi)
        } else if hi <= 0.0 {
            -0.5 * (lo + hi)
        } else {
            (lo * lo + hi * hi) / (2.0 * (hi - lo))
        };
        0.5 - self.t * (1.0 - 2.0 * mean_abs) / 6.0
    }

    /// `E(Y | X = x)` by Gauss–Legendre integration of `y f(x, y)` over
    /// each polynomial piece (exact up to rounding).
    pub fn e_y_given_x(&self, x: f64) -> f64 {
        let spec = DistributionSpec::Fgm(self.t);
        let gl = GaussLegendre::new(4);
        gl.integrate(-1.0, 0.0, |y| y * spec.density(x, y)) + gl.integrate(0.0, 1.0, |y| y * spec.density(x, y))
    }
}

/// Conditional-mean summary for the FGM-like family.
pub fn semi_independence_check(spec: &DistributionSpec) -> Result<SemiIndependence, SpecError> {
    spec.validate()?;
    match *spec {
        DistributionSpec::Fgm(t) => Ok(SemiIndependence {
            t,
            mean_x: 0.5,
            mean_y: 0.0,
            e_x_given_y_at_zero: 0.5 - t / 6.0,
        }),
        other => Err(SpecError::OutOfDomain {
            family: other.family().name(),
            t: other.parameter().unwrap_or(f64::NAN),
            domain: "fgm only",
        }),
    }
}
