use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};

use super::rules::{exp_sinh_nodes, gauss_legendre_on};
use super::QuadratureResult;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::polynomials::BalancedPolynomial;

/// Resolution of the polar tensor grids and of the QMC fallback.
#[derive(Clone, Debug, PartialEq)]
pub struct CubatureRule {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub qmc_log2_points: u32,
    pub qmc_replicates: u32,
    pub seed: u32,
    pub exec: ExecMode,
}

impl Default for CubatureRule {
    fn default() -> Self {
        Self {
            radial_nodes: 40,
            angular_nodes: 24,
            qmc_log2_points: 14,
            qmc_replicates: 8,
            seed: 0x5eed,
            exec: ExecMode::default(),
        }
    }
}

impl CubatureRule {
    pub fn with_exec(mut self, exec: ExecMode) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_nodes(mut self, radial: usize, angular: usize) -> Self {
        self.radial_nodes = radial;
        self.angular_nodes = angular;
        self
    }

    pub fn with_seed(mut self, seed: u32) -> Self {
        self.seed = seed;
        self
    }
}

/// Decay profile of a `Cⁿ` integrand, used to scale the radial map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// Integrand dominated by `e^{-rate·p(w)}`.
    Exponential { rate: f64 },
    /// Integrand decaying algebraically beyond `p(w) ≈ scale`.
    Algebraic { scale: f64 },
}

/// Flat list of cubature points in `Cⁿ` with real weights.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    dim: usize,
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl NodeSet {
    fn single_point() -> Self {
        Self { dim: 0, points: vec![], weights: vec![1.0] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn integrate<F>(&self, g: &F, mode: ExecMode) -> Complex64
    where
        F: Fn(&[Complex64]) -> Complex64 + Sync + Send,
    {
        exec::sum_indexed(mode, self.len(), |i| g(self.point(i)) * self.weights[i])
    }

    /// Vector-valued integral: `g(point, weight, acc)` adds its weighted
    /// contribution into `acc`.
    pub fn integrate_vec<F>(&self, len: usize, g: &F, mode: ExecMode) -> Vec<Complex64>
    where
        F: Fn(&[Complex64], f64, &mut [Complex64]) + Sync + Send,
    {
        exec::sum_indexed_vec(mode, self.len(), len, |i, acc| g(self.point(i), self.weights[i], acc))
    }
}

/// A tensor rule with a coarse companion for error estimation, or a set of
/// independently scrambled QMC replicates.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleSet {
    Tensor { fine: NodeSet, coarse: NodeSet },
    Qmc { replicates: Vec<NodeSet> },
}

impl RuleSet {
    pub fn primary(&self) -> &NodeSet {
        match self {
            RuleSet::Tensor { fine, .. } => fine,
            RuleSet::Qmc { replicates } => &replicates[0],
        }
    }

    pub fn is_qmc(&self) -> bool {
        matches!(self, RuleSet::Qmc { .. })
    }

    pub fn integrate<F>(&self, g: &F, mode: ExecMode) -> QuadratureResult
    where
        F: Fn(&[Complex64]) -> Complex64 + Sync + Send,
    {
        match self {
            RuleSet::Tensor { fine, coarse } => {
                let a = fine.integrate(g, mode);
                let b = coarse.integrate(g, mode);
                QuadratureResult { value: a, error_estimate: (a - b).norm(), nodes_used: fine.len() + coarse.len() }
            }
            RuleSet::Qmc { replicates } => {
                let vals: Vec<Complex64> = replicates.iter().map(|r| r.integrate(g, mode)).collect();
                let (mean, err) = mean_and_error(&vals);
                QuadratureResult {
                    value: mean,
                    error_estimate: err,
                    nodes_used: replicates.iter().map(NodeSet::len).sum(),
                }
            }
        }
    }

    pub fn integrate_vec<F>(&self, len: usize, g: &F, mode: ExecMode) -> Vec<QuadratureResult>
    where
        F: Fn(&[Complex64], f64, &mut [Complex64]) + Sync + Send,
    {
        match self {
            RuleSet::Tensor { fine, coarse } => {
                let a = fine.integrate_vec(len, g, mode);
                let b = coarse.integrate_vec(len, g, mode);
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| QuadratureResult {
                        value: *x,
                        error_estimate: (x - y).norm(),
                        nodes_used: fine.len() + coarse.len(),
                    })
                    .collect()
            }
            RuleSet::Qmc { replicates } => {
                let vals: Vec<Vec<Complex64>> = replicates.iter().map(|r| r.integrate_vec(len, g, mode)).collect();
                let used = replicates.iter().map(NodeSet::len).sum();
                (0..len)
                    .map(|k| {
                        let col: Vec<Complex64> = vals.iter().map(|v| v[k]).collect();
                        let (mean, err) = mean_and_error(&col);
                        QuadratureResult { value: mean, error_estimate: err, nodes_used: used }
                    })
                    .collect()
            }
        }
    }
}

fn mean_and_error(vals: &[Complex64]) -> (Complex64, f64) {
    let r = vals.len() as f64;
    let mean = vals.iter().sum::<Complex64>() / r;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Minimum of `p` on the weighted sphere `Σ |w_j|^{2m_j} = 1`: exact for
/// diagonal `p`, sampled otherwise.
pub fn weighted_sphere_minimum(p: &BalancedPolynomial) -> f64 {
    if let Some(c) = p.diagonal_coefficients() {
        return c.iter().copied().fold(f64::INFINITY, f64::min);
    }
    let n = p.dim();
    let m = p.weights().m();
    let mut rng = ChaCha8Rng::seed_from_u64(0x73706865);
    let mut w = vec![Complex64::default(); n];
    let mut best = f64::INFINITY;
    for _ in 0..16_384 {
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        for j in 0..n {
            let u = e[j] / s;
            w[j] = Complex64::from_polar(u.powf(1.0 / (2.0 * m[j] as f64)), TAU * rng.random::<f64>());
        }
        best = best.min(p.eval(&w));
    }
    best
}

fn radial_polydisc_bounds(p: &BalancedPolynomial) -> Result<Vec<f64>> {
    let pmin = 0.5 * weighted_sphere_minimum(p);
    if !(pmin > 1e-12) {
        return Err(Error::InvalidPolynomial("p vanishes on the weighted sphere, so B_p is unbounded".into()));
    }
    Ok(p.weights().m().iter().map(|&mj| (1.0 / pmin).powf(1.0 / (2.0 * mj as f64))).collect())
}

fn angles(k: usize) -> Vec<f64> {
    (0..k).map(|i| TAU * i as f64 / k as f64).collect()
}

/// Expands radial nodes `(ρ_1..ρ_n, weight)` (with `ρ_j = |w_j|²`) by the
/// angular trapezoid rule in every coordinate.
fn expand_angles(n: usize, radial: &[(Vec<f64>, f64)], nang: usize) -> NodeSet {
    let th = angles(nang);
    let aw = (0.5 * TAU / nang as f64).powi(n as i32);
    let combos = nang.pow(n as u32);
    let mut points = Vec::with_capacity(radial.len() * combos * n);
    let mut weights = Vec::with_capacity(radial.len() * combos);
    for (rho, w) in radial {
        let r: Vec<f64> = rho.iter().map(|x| x.sqrt()).collect();
        for c in 0..combos {
            let mut k = c;
            for &rj in &r {
                points.push(Complex64::from_polar(rj, th[k % nang]));
                k /= nang;
            }
            weights.push(w * aw);
        }
    }
    NodeSet { dim: n, points, weights }
}

fn nested_bp_radial(m: &[u32], c: &[f64], nr: usize) -> Vec<(Vec<f64>, f64)> {
    fn rec(
        j: usize,
        budget: f64,
        m: &[u32],
        c: &[f64],
        nr: usize,
        cur: &mut Vec<f64>,
        w: f64,
        out: &mut Vec<(Vec<f64>, f64)>,
    ) {
        if j == m.len() {
            out.push((cur.clone(), w));
            return;
        }
        let top = (budget / c[j]).powf(1.0 / m[j] as f64);
        for (rho, wr) in gauss_legendre_on(0.0, top, nr) {
            cur.push(rho);
            let rest = (budget - c[j] * rho.powi(m[j] as i32)).max(0.0);
            rec(j + 1, rest, m, c, nr, cur, w * wr, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 1.0, m, c, nr, &mut Vec::new(), 1.0, &mut out);
    out
}

/// Radial nodes `(ρ, weight)` on `[0, ∞)` in units of the scale.
fn tan_map_nodes(nr: usize) -> Vec<(f64, f64)> {
    gauss_legendre_on(0.0, FRAC_PI_2, nr)
        .into_iter()
        .map(|(phi, w)| {
            let sec = 1.0 / phi.cos();
            (phi.tan(), w * sec * sec)
        })
        .collect()
}

fn tensor_cn_radial(scales: &[f64], base: &[(f64, f64)]) -> Vec<(Vec<f64>, f64)> {
    let nr = base.len();
    let n = scales.len();
    let total = nr.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut rho = Vec::with_capacity(n);
            let mut w = 1.0;
            for &l in scales {
                let (x, wx) = base[k % nr];
                k /= nr;
                rho.push(l * x);
                w *= wx * l;
            }
            (rho, w)
        })
        .collect()
}

fn sobol(i: u32, dim: u32, seed: u32) -> f64 {
    sobol_burley::sample(i, dim, seed) as f64
}

/// Cubature on `B_p = {p < 1}`.
pub fn bp_rule(p: &BalancedPolynomial, rule: &CubatureRule) -> Result<RuleSet> {
    let n = p.dim();
    if n == 0 {
        return Ok(RuleSet::Tensor { fine: NodeSet::single_point(), coarse: NodeSet::single_point() });
    }
    let m = p.weights().m();
    if let Some(c) = p.diagonal_coefficients() {
        let fine = expand_angles(n, &nested_bp_radial(m, c, rule.radial_nodes), rule.angular_nodes);
        let coarse = expand_angles(n, &nested_bp_radial(m, c, (rule.radial_nodes / 2).max(1)), rule.angular_nodes);
        return Ok(RuleSet::Tensor { fine, coarse });
    }
    let radii = radial_polydisc_bounds(p)?;
    let npts = 1u32 << rule.qmc_log2_points;
    let vol: f64 = radii.iter().map(|r| PI * r * r).product::<f64>() / npts as f64;
    let replicates = (0..rule.qmc_replicates)
        .map(|rep| {
            let seed = rule.seed.wrapping_add(rep.wrapping_mul(0x9e37_79b9));
            let mut points = Vec::new();
            let mut weights = Vec::new();
            let mut w = vec![Complex64::default(); n];
            for i in 0..npts {
                for j in 0..n {
                    let u = sobol(i, 2 * j as u32, seed);
                    let v = sobol(i, 2 * j as u32 + 1, seed);
                    w[j] = Complex64::from_polar(radii[j] * u.sqrt(), TAU * v);
                }
                if p.eval(&w) < 1.0 {
                    points.extend_from_slice(&w);
                    weights.push(vol);
                }
            }
            NodeSet { dim: n, points, weights }
        })
        .collect();
    Ok(RuleSet::Qmc { replicates })
}

/// Cubature on `Cⁿ` with a tan-mapped radial coordinate scaled by `decay`.
pub fn cn_rule(p: &BalancedPolynomial, decay: Decay, rule: &CubatureRule) -> Result<RuleSet> {
    let n = p.dim();
    if n == 0 {
        return Ok(RuleSet::Tensor { fine: NodeSet::single_point(), coarse: NodeSet::single_point() });
    }
    let m = p.weights().m();
    let (coef, diagonal): (Vec<f64>, bool) = match p.diagonal_coefficients() {
        Some(c) => (c.to_vec(), true),
        None => (vec![0.5 * weighted_sphere_minimum(p); n], false),
    };
    if coef.iter().any(|&c| !(c > 1e-12)) {
        return Err(Error::InvalidPolynomial("p vanishes on the weighted sphere".into()));
    }
    let scales: Vec<f64> = m
        .iter()
        .zip(&coef)
        .map(|(&mj, &cj)| match decay {
            Decay::Exponential { rate } => (rate * cj).powf(-1.0 / mj as f64),
            Decay::Algebraic { scale } => (scale / cj).powf(1.0 / mj as f64),
        })
        .collect();
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidArgument("decay scale must be positive and finite".into()));
    }
    if diagonal {
        let (fine_r, coarse_r) = match decay {
            Decay::Exponential { .. } => {
                let x_max = 60f64.powf(1.0 / *m.iter().min().expect("n > 0") as f64);
                exp_sinh_nodes(x_max)
            }
            Decay::Algebraic { .. } => {
                (tan_map_nodes(rule.radial_nodes), tan_map_nodes((rule.radial_nodes / 2).max(1)))
            }
        };
        let fine = expand_angles(n, &tensor_cn_radial(&scales, &fine_r), rule.angular_nodes);
        let coarse = expand_angles(n, &tensor_cn_radial(&scales, &coarse_r), rule.angular_nodes);
        return Ok(RuleSet::Tensor { fine, coarse });
    }
    let npts = 1u32 << rule.qmc_log2_points;
    let replicates = (0..rule.qmc_replicates)
        .map(|rep| {
            let seed = rule.seed.wrapping_add(rep.wrapping_mul(0x9e37_79b9));
            let mut points = Vec::with_capacity(npts as usize * n);
            let mut weights = Vec::with_capacity(npts as usize);
            for i in 0..npts {
                let mut w = 1.0 / npts as f64;
                for (j, &scale) in scales.iter().enumerate() {
                    let u = sobol(i, 2 * j as u32, seed);
                    let v = sobol(i, 2 * j as u32 + 1, seed);
                    let phi = FRAC_PI_2 * u;
                    let sec = 1.0 / phi.cos();
                    let rho = scale * phi.tan();
                    points.push(Complex64::from_polar(rho.sqrt(), TAU * v));
                    w *= 0.5 * PI * PI * scale * sec * sec;
                }
                weights.push(w);
            }
            NodeSet { dim: n, points, weights }
        })
        .collect();
    Ok(RuleSet::Qmc { replicates })
}

/// `∫_{B_p} g dV`.
pub fn integrate_bp<F>(p: &BalancedPolynomial, g: F, rule: &CubatureRule) -> Result<QuadratureResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync + Send,
{
    Ok(bp_rule(p, rule)?.integrate(&g, rule.exec))
}

/// `∫_{Cⁿ} g dV`.
pub fn integrate_cn<F>(p: &BalancedPolynomial, g: F, decay: Decay, rule: &CubatureRule) -> Result<QuadratureResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync + Send,
{
    Ok(cn_rule(p, decay, rule)?.integrate(&g, rule.exec))
}
