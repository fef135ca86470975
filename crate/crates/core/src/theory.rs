//! Population rank coefficients by numerical integration, the dependence
//! function `D(x, y) = 6 (F(x, y) - H(x) G(y))`, and the bounds linking
//! Kendall's tau and Spearman's rho.
//!
//! All three rank coefficients are expectations over the joint law:
//!
//! * `tau   = 4 E[F(X, Y)] - 1`
//! * `rho_S = 12 E[H(X) G(Y)] - 3`
//! * `r     = E[D(X, Y)] = 6 E[F(X, Y) - H(X) G(Y)]`
//!
//! Expectations are taken over the unit square in coordinates
//! `u = H(x)` and `w = P(Y <= y | X = x)`, which are independent uniforms,
//! so no density factor enters the integrand. Each axis uses a composite
//! Gauss–Legendre rule with panels halving toward both edges, which absorbs
//! the logarithmic endpoint behaviour of heavy-tailed quantile maps.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DistributionSpec, TheoreticalCoefficients};
use crate::error::QuadratureError;
use crate::quadrature::{graded_unit_nodes, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Graded panels per axis on the first pass; even, at least 16.
    pub panels: usize,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Absolute tolerance between successive refinements.
    pub tolerance: f64,
    /// Refinement stops with an error beyond this many panels per axis.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels: 16,
            order: 8,
            tolerance: 1e-6,
            max_panels: 256,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.panels < 16 || !self.panels.is_multiple_of(2) {
            return Err(QuadratureError::Config(format!(
                "panels must be even and >= 16, got {}",
                self.panels
            )));
        }
        if self.order < 2 {
            return Err(QuadratureError::Config(format!("order must be >= 2, got {}", self.order)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(QuadratureError::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_panels < self.panels {
            return Err(QuadratureError::Config("max_panels is below panels".into()));
        }
        Ok(())
    }
}

/// Converged quadrature estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub kendall: f64,
    pub spearman: f64,
    /// `6 E[F - HG]` integrated directly.
    pub r_direct: f64,
    /// `(3 tau - rho_S) / 2` from the two integrals above.
    pub r_identity: f64,
    /// `E[D^2]`.
    pub d_second_moment: f64,
    /// Panels per axis at the accepted level.
    pub panels: usize,
}

impl QuadratureResult {
    pub fn coefficients(&self) -> TheoreticalCoefficients {
        TheoreticalCoefficients::new(None, self.spearman, self.kendall)
    }

    pub fn var_d(&self) -> f64 {
        self.d_second_moment - self.r_direct * self.r_direct
    }
}

/// `D(x, y) = 6 (F(x, y) - H(x) G(y))`.
pub fn dependence_function(spec: &DistributionSpec, x: f64, y: f64) -> f64 {
    6.0 * (spec.joint_cdf(x, y) - spec.marginal_h(x) * spec.marginal_g(y))
}

/// Sums of F, HG, F - HG and (F - HG)^2 against the product rule.
fn integrate_level(spec: &DistributionSpec, rule: &GaussLegendre, depth: usize) -> [f64; 4] {
    let nodes = graded_unit_nodes(rule, depth);
    let rows: Vec<[f64; 4]> = nodes
        .par_iter()
        .map(|u| {
            let x = spec.x_quantile(*u);
            let mut acc = [0.0; 4];
            for w in &nodes {
                let y = spec.conditional_y_quantile(x, *w);
                let f = spec.joint_cdf(x, y);
                let hg = u.value * spec.marginal_g(y);
                let d = f - hg;
                acc[0] += w.weight * f;
                acc[1] += w.weight * hg;
                acc[2] += w.weight * d;
                acc[3] += w.weight * d * d;
            }
            acc.map(|a| a * u.weight)
        })
        .collect();
    rows.iter().fold([0.0; 4], |mut total, row| {
        for (t, r) in total.iter_mut().zip(row) {
            *t += r;
        }
        total
    })
}

fn finish(sums: [f64; 4], panels: usize) -> QuadratureResult {
    let kendall = 4.0 * sums[0] - 1.0;
    let spearman = 12.0 * sums[1] - 3.0;
    QuadratureResult {
        kendall,
        spearman,
        r_direct: 6.0 * sums[2],
        r_identity: (3.0 * kendall - spearman) / 2.0,
        d_second_moment: 36.0 * sums[3],
        panels,
    }
}

fn max_diff(a: &QuadratureResult, b: &QuadratureResult) -> f64 {
    [
        a.kendall - b.kendall,
        a.spearman - b.spearman,
        a.r_direct - b.r_direct,
        a.d_second_moment - b.d_second_moment,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Integrates tau, rho_S and r, doubling the panel count until two
/// successive levels agree within `cfg.tolerance`.
pub fn integrate_coefficients(
    spec: &DistributionSpec,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError> {
    cfg.validate()?;
    spec.validate()
        .map_err(|e| QuadratureError::Config(e.to_string()))?;
    let rule = GaussLegendre::new(cfg.order);
    let mut panels = cfg.panels;
    let mut previous = finish(integrate_level(spec, &rule, panels / 2), panels);
    loop {
        if ![previous.kendall, previous.spearman, previous.r_direct, previous.d_second_moment]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(QuadratureError::NonFinite);
        }
        let next_panels = panels * 2;
        if next_panels > cfg.max_panels {
            return Err(QuadratureError::NotConverged {
                diff: f64::NAN,
                tolerance: cfg.tolerance,
                panels,
            });
        }
        let current = finish(integrate_level(spec, &rule, next_panels / 2), next_panels);
        let diff = max_diff(&previous, &current);
        if diff <= cfg.tolerance {
            if (current.r_direct - current.r_identity).abs() > cfg.tolerance {
                return Err(QuadratureError::Inconsistent {
                    direct: current.r_direct,
                    identity: current.r_identity,
                });
            }
            return Ok(current);
        }
        if next_panels * 2 > cfg.max_panels {
            return Err(QuadratureError::NotConverged {
                diff,
                tolerance: cfg.tolerance,
                panels: next_panels,
            });
        }
        previous = current;
        panels = next_panels;
    }
}

/// `Var D(X, Y) = E[D^2] - r^2`; zero exactly under independence.
pub fn var_d(spec: &DistributionSpec, cfg: &QuadratureConfig) -> Result<f64, QuadratureError> {
    integrate_coefficients(spec, cfg).map(|q| q.var_d())
}

/// Outcome of the tau/rho_S bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsCheck {
    /// `rho_S - (3 tau - 1)/2`, checked when `tau >= 0`.
    pub lower_margin: Option<f64>,
    /// `(1 + 3 tau)/2 - rho_S`, checked when `tau <= 0`.
    pub upper_margin: Option<f64>,
    /// `(3 tau - rho_S) / 2`.
    pub r: f64,
}

impl BoundsCheck {
    pub fn passed(&self) -> bool {
        const SLACK: f64 = 1e-12;
        self.lower_margin.is_none_or(|m| m >= -SLACK)
            && self.upper_margin.is_none_or(|m| m >= -SLACK)
            && self.r.abs() <= 1.0 + SLACK
    }
}

/// `(3 tau - 1)/2 <= rho_S` for `tau >= 0` and `rho_S <= (1 + 3 tau)/2` for
/// `tau <= 0`; together they keep `r` in `[-1, 1]`.
pub fn check_bounds(tc: &TheoreticalCoefficients) -> BoundsCheck {
    let (tau, rho) = (tc.kendall, tc.spearman);
    BoundsCheck {
        lower_margin: (tau >= 0.0).then(|| rho - (3.0 * tau - 1.0) / 2.0),
        upper_margin: (tau <= 0.0).then(|| (1.0 + 3.0 * tau) / 2.0 - rho),
        r: (3.0 * tau - rho) / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn independence_gives_zero() {
        for spec in [DistributionSpec::Normal(0.0), DistributionSpec::Fgm(0.0)] {
            let q = integrate_coefficients(&spec, &cfg()).unwrap();
            assert!(q.kendall.abs() < 1e-8, "{spec:?} {q:?}");
            assert!(q.spearman.abs() < 1e-8);
            assert!(q.r_direct.abs() < 1e-8);
            assert!(q.var_d().abs() < 1e-8);
        }
    }

    #[test]
    fn normal_matches_arcsine_forms() {
        for t in [-0.7f64, -0.3, -0.1, 0.1, 0.3, 0.7] {
            let q = integrate_coefficients(&DistributionSpec::Normal(t), &cfg()).unwrap();
            assert!((q.kendall - 2.0 / PI * f64::asin(t)).abs() < 1e-6, "t = {t}");
            assert!((q.spearman - 6.0 / PI * f64::asin(t / 2.0)).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn pareto_one_spearman() {
        let q = integrate_coefficients(&DistributionSpec::Pareto(1.0), &cfg()).unwrap();
        assert!((q.spearman - 0.4784).abs() < 5e-4, "{q:?}");
        assert!((q.kendall - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn direct_and_identity_r_agree_everywhere() {
        let specs = [
            DistributionSpec::Normal(0.99),
            DistributionSpec::Normal(-0.7),
            DistributionSpec::Pareto(0.1),
            DistributionSpec::Pareto(100.0),
            DistributionSpec::ExpPareto(0.5),
            DistributionSpec::ExpParetoTransformed,
            DistributionSpec::Fgm(-1.0),
        ];
        for spec in specs {
            let q = integrate_coefficients(&spec, &cfg()).unwrap();
            assert!((q.r_direct - q.r_identity).abs() <= cfg().tolerance, "{spec:?} {q:?}");
        }
    }

    #[test]
    fn dependence_function_examples() {
        let d = dependence_function(&DistributionSpec::Normal(0.99), 0.0, 0.0);
        assert!((d - 6.0 * f64::asin(0.99) / (2.0 * PI)).abs() < 1e-13);
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!(dependence_function(&DistributionSpec::Fgm(0.8), x, 0.0).abs() < 1e-15);
        }
        assert!(dependence_function(&DistributionSpec::Normal(0.0), 0.4, -1.3).abs() < 1e-15);
        assert!(dependence_function(&DistributionSpec::Pareto(2.0), 1.0, 1.0) > 0.0);
    }

    #[test]
    fn var_d_detects_dependence() {
        assert!(var_d(&DistributionSpec::Fgm(1.0), &cfg()).unwrap() > 0.0);
        assert!(var_d(&DistributionSpec::Normal(0.99), &cfg()).unwrap() > 0.0);
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let values: Vec<f64> = grid
            .iter()
            .map(|&t| var_d(&DistributionSpec::Fgm(t), &cfg()).unwrap())
            .collect();
        assert!(values[0].abs() < 1e-10);
        assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    }

    #[test]
    fn bounds_examples() {
        let tc = DistributionSpec::Normal(0.7).theoretical().unwrap();
        let b = check_bounds(&tc);
        assert!(b.passed());
        assert!((b.lower_margin.unwrap() - (tc.spearman - (3.0 * tc.kendall - 1.0) / 2.0)).abs() < 1e-15);
        let b = check_bounds(&TheoreticalCoefficients::new(None, 0.0, 0.0));
        assert_eq!(b.lower_margin, Some(0.5));
        assert_eq!(b.upper_margin, Some(0.5));
        assert!(b.passed());
        let bad = TheoreticalCoefficients::new(None, -0.9, 0.9);
        assert!(!check_bounds(&bad).passed());
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.panels = 8;
        assert!(matches!(c.validate(), Err(QuadratureError::Config(_))));
        c.panels = 17;
        assert!(c.validate().is_err());
        let c = QuadratureConfig { tolerance: 0.0, ..cfg() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let c = QuadratureConfig {
            tolerance: 1e-300,
            max_panels: 64,
            ..cfg()
        };
        assert!(matches!(
            integrate_coefficients(&DistributionSpec::Pareto(0.3), &c),
            Err(QuadratureError::NotConverged { .. })
        ));
    }
}
