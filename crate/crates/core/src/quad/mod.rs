//! Quadrature engines: Gauss-Laguerre and double-exponential rules on the
//! half-line, composite Gauss-Legendre on intervals, tanh-sinh on finite
//! intervals, and polar cubature on `B_p` and `Cⁿ`.

mod cubature;
pub(crate) mod rules;

pub use cubature::{
    bp_rule, cn_rule, integrate_bp, integrate_cn, weighted_sphere_minimum, CubatureRule, Decay, NodeSet, RuleSet,
};
pub use rules::{gauss_laguerre, gauss_legendre, gauss_legendre_on, tanh_sinh_on};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};

/// Value, error estimate and evaluation count of a quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        Self { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, nodes_used: 0 }
    }

    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Rule used by [`integrate_halfline`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalflineRule {
    /// Gauss-Laguerre with 16, 32 and 64 nodes; exact for polynomial `f`.
    GaussLaguerre,
    /// Exp-sinh rule in `u = s·t`, with `u` measured in units of `scale`.
    DoubleExponential { scale: f64 },
}

/// `∫_0^∞ f(t) e^{-s t} dt`, evaluated along the ray `t = u/s`.
///
/// `f` must be analytic between the ray and the positive axis and of at
/// most polynomial growth there relative to `e^{-s t}`.
pub fn integrate_halfline<F>(f: F, s: Complex64, rule: HalflineRule) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(s.re > 0.0) {
        return Err(Error::Divergence(format!("decay rate {s} has nonpositive real part")));
    }
    let inv_s = s.inv();
    match rule {
        HalflineRule::GaussLaguerre => {
            let sum = |n: usize| -> Complex64 {
                gauss_laguerre(n).iter().map(|&(u, w)| f(u * inv_s) * w).sum::<Complex64>() * inv_s
            };
            let r32 = sum(32);
            let r64 = sum(64);
            let err = (r64 - r32).norm();
            Ok(QuadratureResult { value: r64, error_estimate: err, nodes_used: 96 })
        }
        HalflineRule::DoubleExponential { scale } => {
            let (fine, coarse, n) = rules::exp_sinh_sums(|x| {
                let u = scale * x;
                f(u * inv_s) * (-u).exp()
            });
            Ok(QuadratureResult {
                value: fine * scale * inv_s,
                error_estimate: ((fine - coarse) * scale * inv_s).norm(),
                nodes_used: n,
            })
        }
    }
}

/// `∫_0^∞ f(t) dt` by the exp-sinh rule on the real axis, with `t` measured
/// in units of `scale`.
pub fn integrate_halfline_real<F>(f: F, scale: f64) -> QuadratureResult
where
    F: Fn(f64) -> Complex64,
{
    let (fine, coarse, n) = rules::exp_sinh_sums(|x| f(scale * x));
    QuadratureResult { value: fine * scale, error_estimate: ((fine - coarse) * scale).norm(), nodes_used: n }
}

/// `∫ g` along the ray `{dir·x : x ≥ 0}` by the exp-sinh rule, with `x`
/// measured in units of `scale`. `g` must decay along the ray.
pub fn integrate_ray<F>(g: F, dir: Complex64, scale: f64) -> QuadratureResult
where
    F: Fn(Complex64) -> Complex64,
{
    let h = dir * scale;
    let (fine, coarse, n) = rules::exp_sinh_sums(|x| g(h * x));
    QuadratureResult { value: fine * h, error_estimate: ((fine - coarse) * h).norm(), nodes_used: n }
}

/// `∫_a^b f(x) dx` by the tanh-sinh rule; endpoint singularities allowed.
pub fn integrate_interval<F>(f: F, a: f64, b: f64) -> QuadratureResult
where
    F: Fn(f64) -> Complex64,
{
    let (fine, coarse, n) = rules::tanh_sinh_sums(f, a, b);
    QuadratureResult { value: fine, error_estimate: (fine - coarse).norm(), nodes_used: n }
}

/// Composite Gauss-Legendre rule on `[lower, upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineRule {
    pub lower: f64,
    pub upper: f64,
    pub panel_width: f64,
    pub nodes: usize,
    /// Interior points where panels must break (kinks, jumps).
    pub breakpoints: Vec<f64>,
}

impl LineRule {
    pub fn symmetric(half_width: f64, panel_width: f64, nodes: usize) -> Self {
        Self { lower: -half_width, upper: half_width, panel_width, nodes, breakpoints: vec![] }
    }

    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(points);
        self
    }

    /// Panel endpoints covering the window.
    pub fn panels(&self) -> Vec<(f64, f64)> {
        let mut cuts: Vec<f64> =
            self.breakpoints.iter().copied().filter(|&x| x > self.lower && x < self.upper).collect();
        cuts.push(self.lower);
        cuts.push(self.upper);
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.dedup();
        let mut panels = Vec::new();
        for seg in cuts.windows(2) {
            let len = seg[1] - seg[0];
            let k = ((len / self.panel_width).ceil() as usize).max(1);
            let h = len / k as f64;
            for i in 0..k {
                let lo = seg[0] + i as f64 * h;
                let hi = if i + 1 == k { seg[1] } else { lo + h };
                panels.push((lo, hi));
            }
        }
        panels
    }
}

/// `∫ g` over the rule's window. The error estimate compares `nodes` and
/// `nodes/2` points per panel; truncation of the window is the caller's
/// responsibility.
pub fn integrate_line<F>(g: F, rule: &LineRule, mode: ExecMode) -> QuadratureResult
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    let panels = rule.panels();
    let fine_rule = gauss_legendre(rule.nodes.max(2));
    let coarse_rule = gauss_legendre((rule.nodes / 2).max(1));
    let sums = exec::map_slice(mode, &panels, |&(lo, hi)| {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let fine: Complex64 = fine_rule.iter().map(|&(x, w)| g(c + h * x) * w).sum::<Complex64>() * h;
        let coarse: Complex64 = coarse_rule.iter().map(|&(x, w)| g(c + h * x) * w).sum::<Complex64>() * h;
        (fine, coarse)
    });
    let (fine, coarse) =
        sums.into_iter().fold((Complex64::default(), Complex64::default()), |(a, b), (f, c)| (a + f, b + c));
    QuadratureResult {
        value: fine,
        error_estimate: (fine - coarse).norm(),
        nodes_used: panels.len() * (fine_rule.len() + coarse_rule.len()),
    }
}
