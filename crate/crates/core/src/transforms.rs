//! The multivariate representation maps: the rotation series `T` on `E_p`,
//! the translation Fourier integral `T_S` and the scaling Mellin integral
//! `T_V` on `U_p`, with their norm identities and equivariance residuals.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;

use crate::domains::{rho_hat, DomainSpec, Point};
use crate::error::{check_dim, Error, Result};
use crate::exec::{self, ExecMode};
use crate::polynomials::HoloPolynomial;
use crate::quad::{bp_rule, cn_rule, gauss_legendre, CubatureRule, Decay, QuadratureResult};
use crate::transforms1d::{integrate_layout, line_inverse, InverseOptions, Piece, Profile1D, SampledProfile};
use crate::weights::{norm_hp, norm_xp, norm_yp};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Target space of a [`SpectralElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Profiles on `t > 0` with weight `e^{−4πp(w)t}/(4πt)`.
    Hp,
    /// Profiles on `ℝ` with weight `λ(p(ζ), t)`.
    Xp,
}

/// A finite sequence `a_0, …, a_K` of holomorphic polynomials in `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySequence {
    entries: Vec<HoloPolynomial>,
}

impl PolySequence {
    pub fn new(entries: Vec<HoloPolynomial>) -> Result<Self> {
        if let Some(first) = entries.first() {
            for e in &entries {
                check_dim(first.dim(), e.dim())?;
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[HoloPolynomial] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(HoloPolynomial::is_zero)
    }

    /// `a_k ↦ e^{ikθ} a_k`.
    pub fn rotate(&self, theta: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, a)| a.scale(Complex64::from_polar(1.0, k as f64 * theta)))
            .collect();
        Self { entries }
    }
}

/// A finite sum `Σ_j φ_j(t) q_j(w)` of separable terms.
#[derive(Clone, Debug)]
pub struct SpectralElement {
    terms: Vec<(Profile1D, HoloPolynomial)>,
    spec: DomainSpec,
    space: SpaceKind,
}

impl SpectralElement {
    /// Builds an element and checks that its norm in `space` is finite.
    pub fn new(spec: &DomainSpec, space: SpaceKind, terms: Vec<(Profile1D, HoloPolynomial)>) -> Result<Self> {
        let f = Self::unchecked(spec, space, terms)?;
        let norm = match space {
            SpaceKind::Hp => {
                for (p, _) in &f.terms {
                    if p.pieces().iter().any(|x| !matches!(x, Piece::OneSided { .. })) {
                        return Err(Error::NotInSpace("H_p elements take one-sided exponential profiles".into()));
                    }
                }
                norm_hp(spec, &f)?
            }
            SpaceKind::Xp => norm_xp(spec, &f)?,
        };
        if !norm.value.is_finite() {
            return Err(Error::NotInSpace(format!("norm is {}", norm.value)));
        }
        Ok(f)
    }

    fn unchecked(spec: &DomainSpec, space: SpaceKind, terms: Vec<(Profile1D, HoloPolynomial)>) -> Result<Self> {
        for (_, q) in &terms {
            check_dim(spec.dim(), q.dim())?;
        }
        let terms = terms.into_iter().filter(|(p, q)| !p.is_zero() && !q.is_zero()).collect();
        Ok(Self { terms, spec: spec.clone(), space })
    }

    pub fn zero(spec: &DomainSpec, space: SpaceKind) -> Self {
        Self { terms: vec![], spec: spec.clone(), space }
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[(Profile1D, HoloPolynomial)] {
        &self.terms
    }

    pub fn polynomials(&self) -> impl Iterator<Item = &HoloPolynomial> {
        self.terms.iter().map(|(_, q)| q)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `f(t, w)`.
    pub fn eval(&self, t: f64, w: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(p, q)| p.eval(t) * q.eval(w)).sum()
    }

    /// Smallest decay length of the profiles, used to scale `t`-quadratures.
    pub fn profile_scale(&self) -> f64 {
        let s = self
            .terms
            .iter()
            .flat_map(|(p, _)| p.pieces())
            .map(|x| match *x {
                Piece::OneSided { b, .. } | Piece::Reflected { b, .. } => 1.0 / b.re,
                Piece::Gaussian { sigma, .. } => 1.0 / sigma.sqrt(),
                Piece::Box { lo, hi, .. } => hi - lo,
            })
            .fold(f64::INFINITY, f64::min);
        if s.is_finite() {
            s
        } else {
            1.0
        }
    }

    /// `(χ_θ f)(t, w) = e^{2πiθt} f(t, w)`.
    pub fn modulate(&self, theta: f64) -> Self {
        let terms = self.terms.iter().map(|(p, q)| (p.modulate(theta), q.clone())).collect();
        Self { terms, spec: self.spec.clone(), space: self.space }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|(p, q)| (p.scale(s), q.clone())).collect();
        Self::unchecked(&self.spec, self.space, terms).expect("dimensions already checked")
    }

    pub fn add(&self, other: &SpectralElement) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::InvalidArgument("cannot add elements of different spaces".into()));
        }
        check_dim(self.spec.dim(), other.spec.dim())?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::unchecked(&self.spec, self.space, terms)
    }
}

/// `Ta(z, w) = Σ_k a_k(w) z^k` on `E_p`.
pub fn t_compact(spec: &DomainSpec, a: &PolySequence, x: &Point) -> Result<Complex64> {
    spec.require_ep(x)?;
    if let Some(first) = a.entries.first() {
        check_dim(first.dim(), x.w.len())?;
    }
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for ak in &a.entries {
        sum += ak.eval(&x.w) * pow;
        pow *= x.z;
    }
    Ok(sum)
}

fn require_space(f: &SpectralElement, kind: SpaceKind) -> Result<()> {
    if f.space != kind {
        return Err(Error::NotInSpace(format!("element declared for {:?}, not {kind:?}", f.space)));
    }
    Ok(())
}

/// `T_S f(z, w) = ∫_0^∞ f(t, w) e^{2πizt} dt`, in closed form.
pub fn t_s_multi(f: &SpectralElement, x: &Point) -> Result<Complex64> {
    require_space(f, SpaceKind::Hp)?;
    f.spec.require_up(x)?;
    Ok(f.terms.iter().map(|(p, q)| p.forward(x.z) * q.eval(&x.w)).sum())
}

/// `T_S f(z, w)` by quadrature in `t`.
pub fn t_s_multi_numeric(f: &SpectralElement, x: &Point) -> Result<QuadratureResult> {
    require_space(f, SpaceKind::Hp)?;
    f.spec.require_up(x)?;
    let mut out = QuadratureResult::zero();
    for (p, q) in &f.terms {
        let r = crate::transforms1d::strip_forward_numeric(p, x.z)?;
        let qw = q.eval(&x.w);
        out.value += r.value * qw;
        out.error_estimate += r.error_estimate * qw.norm();
        out.nodes_used += r.nodes_used;
    }
    Ok(out)
}

/// Samples `t ↦ e^{2πct} ∫ F(x + ic, w) e^{−2πixt} dx` for fixed `w`, with
/// `c > p(w)`.
pub fn t_s_inverse<F>(
    spec: &DomainSpec,
    big_f: F,
    w: &[Complex64],
    c: f64,
    ts: &[f64],
    opts: &InverseOptions,
) -> Result<SampledProfile>
where
    F: Fn(&Point) -> Complex64 + Sync + Send,
{
    check_dim(spec.dim(), w.len())?;
    let pw = spec.p(w);
    if !(c > pw) {
        return Err(Error::Domain(format!("c = {c} must exceed p(w) = {pw}")));
    }
    let w = w.to_vec();
    line_inverse(move |z| big_f(&Point::new(z, w.clone())), pw, f64::INFINITY, c, ts, opts)
}

fn tv_setup(g: &SpectralElement, x: &Point) -> Result<(Complex64, Vec<Complex64>, Complex64)> {
    require_space(g, SpaceKind::Xp)?;
    g.spec.require_up(x)?;
    let zeta = rho_hat(1.0 / x.z, &x.w, g.spec.m())?;
    let lz = x.z.ln();
    let pref = (-(1.0 + 0.5 * g.spec.inv_mu()) * lz).exp();
    Ok((lz, zeta, pref))
}

/// `T_V g(z, w) = ∫_ℝ g(t, ρ̂_{1/z} w) z^{2πit} z^{−1−1/(2μ)} dt`, with
/// the `t`-integral in closed form.
pub fn t_v_multi_closed(g: &SpectralElement, x: &Point) -> Result<Complex64> {
    let (lz, zeta, pref) = tv_setup(g, x)?;
    Ok(pref * g.terms.iter().map(|(p, q)| p.forward(lz) * q.eval(&zeta)).sum::<Complex64>())
}

/// `T_V g(z, w)` by quadrature in `t`.
pub fn t_v_multi(g: &SpectralElement, x: &Point) -> Result<QuadratureResult> {
    let (lz, zeta, pref) = tv_setup(g, x)?;
    if g.is_zero() {
        return Ok(QuadratureResult::zero());
    }
    let qs: Vec<Complex64> = g.terms.iter().map(|(_, q)| q.eval(&zeta)).collect();
    let layout = Profile1D::sum(g.terms.iter().map(|(p, _)| p));
    let mut r = integrate_layout(&layout, |t| {
        let v: Complex64 = g.terms.iter().zip(&qs).map(|((p, _), q)| p.eval(t) * q).sum();
        if v.norm() == 0.0 {
            v
        } else {
            v * (TAU * I * t * lz).exp()
        }
    });
    r.value *= pref;
    r.error_estimate *= pref.norm();
    Ok(r)
}

/// Which commuting diagram an equivariance residual refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivarianceKind {
    Translation,
    Rotation,
    Scaling,
}

/// `|T_S(χ_θ f)(z, w) − T_S f(z + θ, w)|`.
pub fn equivariance_translation(f: &SpectralElement, theta: f64, x: &Point) -> Result<f64> {
    let lhs = t_s_multi(&f.modulate(theta), x)?;
    let rhs = t_s_multi(f, &Point::new(x.z + theta, x.w.clone()))?;
    Ok((lhs - rhs).norm())
}

/// `|T(e^{ikθ} a_k)(z, w) − Ta(e^{iθ} z, w)|`.
pub fn equivariance_rotation(spec: &DomainSpec, a: &PolySequence, theta: f64, x: &Point) -> Result<f64> {
    let lhs = t_compact(spec, &a.rotate(theta), x)?;
    let rhs = t_compact(spec, a, &Point::new(x.z * Complex64::from_polar(1.0, theta), x.w.clone()))?;
    Ok((lhs - rhs).norm())
}

/// `|θ^{−1−1/(2μ)} T_V(θ^{2πit} g)(z, w) − T_V g(θz, ρ̂_θ w)|` for `θ > 0`.
pub fn equivariance_scaling(g: &SpectralElement, theta: f64, x: &Point) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!("scaling factor must be positive, got {theta}")));
    }
    let lhs = theta.powf(-1.0 - 0.5 * g.spec.inv_mu()) * t_v_multi_closed(&g.modulate(theta.ln()), x)?;
    let scaled = Point::new(x.z * theta, rho_hat(Complex64::new(theta, 0.0), &x.w, g.spec.m())?);
    let rhs = t_v_multi_closed(g, &scaled)?;
    Ok((lhs - rhs).norm())
}

/// Left and right sides of a norm identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub error_estimate: f64,
}

impl IsometryCheck {
    pub fn rel_error(&self) -> f64 {
        if self.rhs == 0.0 {
            self.lhs.abs()
        } else {
            (self.lhs - self.rhs).abs() / self.rhs.abs()
        }
    }
}

/// Gauss-Legendre nodes of `x = s·tan θ` on `ℝ`, weights including `dx/dθ`.
fn tan_line(nodes: usize, scale: f64) -> Vec<(f64, f64)> {
    gauss_legendre(nodes)
        .iter()
        .map(|&(u, w)| {
            let th = FRAC_PI_2 * u;
            let sec = 1.0 / th.cos();
            (scale * th.tan(), w * FRAC_PI_2 * scale * sec * sec)
        })
        .collect()
}

/// Gauss-Legendre nodes of `y = y₀ + s·tan θ` on `(y₀, ∞)`.
fn tan_halfline(nodes: usize, y0: f64, scale: f64) -> Vec<(f64, f64)> {
    gauss_legendre(nodes)
        .iter()
        .map(|&(u, w)| {
            let th = FRAC_PI_4 * (u + 1.0);
            let sec = 1.0 / th.cos();
            (y0 + scale * th.tan(), w * FRAC_PI_4 * scale * sec * sec)
        })
        .collect()
}

/// Resolution of the isometry quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryOptions {
    pub cubature: CubatureRule,
    /// Gauss-Legendre nodes per mapped real direction.
    pub line_nodes: usize,
}

impl Default for IsometryOptions {
    fn default() -> Self {
        Self { cubature: CubatureRule::default(), line_nodes: 64 }
    }
}

/// `‖Ta‖²_{A²(E_p)}` by cubature over `B_p` and a polar rule on each disc
/// fiber, against `‖a‖²_{Y_p}`.
pub fn isometry_rotation(spec: &DomainSpec, a: &PolySequence, opts: &IsometryOptions) -> Result<IsometryCheck> {
    let rhs = norm_yp(spec, a)?;
    let k = a.entries.len();
    let angles = 2 * k + 2;
    let radial = gauss_legendre(k.max(2) + 2);
    let rule = bp_rule(spec.poly(), &opts.cubature)?;
    let lhs = rule.integrate(
        &|w: &[Complex64]| {
            let r = (1.0 - spec.p(w)).max(0.0).sqrt();
            let coeffs: Vec<Complex64> = a.entries.iter().map(|q| q.eval(w)).collect();
            let mut acc = 0.0;
            for &(u, wr) in radial.iter() {
                let rho = 0.5 * r * (u + 1.0);
                for j in 0..angles {
                    let z = Complex64::from_polar(rho, TAU * j as f64 / angles as f64);
                    let mut pow = Complex64::new(1.0, 0.0);
                    let mut v = Complex64::new(0.0, 0.0);
                    for c in &coeffs {
                        v += c * pow;
                        pow *= z;
                    }
                    acc += v.norm_sqr() * rho * wr * 0.5 * r * TAU / angles as f64;
                }
            }
            Complex64::new(acc, 0.0)
        },
        opts.cubature.exec,
    );
    Ok(IsometryCheck { lhs: lhs.value.re, rhs: rhs.value, error_estimate: lhs.error_estimate + rhs.error_estimate })
}

/// `‖T_S f‖²_{A²(U_p)}` as `∫_{Cⁿ} ∫_{Im z > p(w)} |T_S f|² dA dV`, by
/// tan-mapped Gauss rules in `z` and cubature over `Cⁿ`, against `‖f‖²_{H_p}`.
pub fn isometry_translation(f: &SpectralElement, opts: &IsometryOptions) -> Result<IsometryCheck> {
    let rhs = norm_hp(&f.spec, f)?;
    let beta = f
        .terms
        .iter()
        .flat_map(|(p, _)| p.pieces())
        .filter_map(|x| match *x {
            Piece::OneSided { b, .. } => Some(b.re / TAU),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let beta = if beta.is_finite() { beta } else { 1.0 };
    let n = opts.line_nodes;
    let inner = |w: &[Complex64]| -> f64 {
        let pw = f.spec.p(w);
        let qs: Vec<Complex64> = f.terms.iter().map(|(_, q)| q.eval(w)).collect();
        let mut acc = 0.0;
        for (y, wy) in tan_halfline(n, pw, pw + beta) {
            let d = y + beta;
            for (x, wx) in tan_line(n, d) {
                let z = Complex64::new(x, y);
                let v: Complex64 = f.terms.iter().zip(&qs).map(|((p, _), q)| p.forward(z) * q).sum();
                acc += v.norm_sqr() * wx * wy;
            }
        }
        acc
    };
    let lhs = if f.spec.dim() == 0 {
        let v = inner(&[]);
        QuadratureResult { value: Complex64::new(v, 0.0), error_estimate: 0.0, nodes_used: n * n }
    } else {
        let rule = cn_rule(f.spec.poly(), Decay::Algebraic { scale: 1.0 }, &opts.cubature)?;
        rule.integrate(&|w: &[Complex64]| Complex64::new(inner(w), 0.0), opts.cubature.exec)
    };
    Ok(IsometryCheck { lhs: lhs.value.re, rhs: rhs.value, error_estimate: lhs.error_estimate + rhs.error_estimate })
}

/// `‖T_V g‖²_{A²(U_p)}` in coordinates `z = e^{s+iθ}`, `w = ρ̂_z ρ̂_{sin θ} η`
/// with `η ∈ B_p`, against `‖g‖²_{X_p}`.
pub fn isometry_scaling(g: &SpectralElement, opts: &IsometryOptions) -> Result<IsometryCheck> {
    let rhs = norm_xp(&g.spec, g)?;
    let spec = &g.spec;
    let inv_mu = spec.inv_mu();
    let n = opts.line_nodes;
    // θ = π(1 − cos φ)/2 flattens the (sin θ)^{1/μ} endpoints.
    let thetas: Vec<(f64, f64)> = gauss_legendre(n)
        .iter()
        .map(|&(u, w)| {
            let phi = FRAC_PI_2 * (u + 1.0);
            (FRAC_PI_2 * (1.0 - phi.cos()), w * FRAC_PI_2 * FRAC_PI_2 * phi.sin())
        })
        .collect();
    let s_scale = g.profile_scale().max(0.25);
    let ss = tan_line(n, s_scale);
    let rule = bp_rule(spec.poly(), &opts.cubature)?;
    let inner = |eta: &[Complex64]| -> Complex64 {
        let mut acc = 0.0;
        for &(th, wt) in &thetas {
            let sin = th.sin();
            let zeta = match rho_hat(Complex64::new(sin, 0.0), eta, spec.m()) {
                Ok(z) => z,
                Err(_) => return Complex64::new(f64::NAN, 0.0),
            };
            for &(s, ws) in &ss {
                let scaled = if s.abs() < 200.0 {
                    let z = Complex64::from_polar(s.exp(), th);
                    let w = match rho_hat(z, &zeta, spec.m()) {
                        Ok(w) => w,
                        Err(_) => return Complex64::new(f64::NAN, 0.0),
                    };
                    match t_v_multi_closed(g, &Point::new(z, w)) {
                        Ok(v) => v.norm_sqr() * (2.0 * s + s * inv_mu).exp(),
                        Err(_) => return Complex64::new(f64::NAN, 0.0),
                    }
                } else {
                    // |z|^{2+1/μ}|T_V g|² without forming |z|.
                    let lz = Complex64::new(s, th);
                    g.terms.iter().map(|(p, q)| p.forward(lz) * q.eval(&zeta)).sum::<Complex64>().norm_sqr()
                };
                let term = scaled * sin.powf(inv_mu) * wt * ws;
                if term.is_finite() {
                    acc += term;
                }
            }
        }
        Complex64::new(acc, 0.0)
    };
    let lhs = rule.integrate(&inner, opts.cubature.exec);
    if !lhs.value.re.is_finite() {
        return Err(Error::Accuracy("scaling isometry quadrature produced a non-finite value".into()));
    }
    Ok(IsometryCheck { lhs: lhs.value.re, rhs: rhs.value, error_estimate: lhs.error_estimate + rhs.error_estimate })
}

/// Maximum Cauchy-Riemann residual of `F` in `z` over `points`.
pub fn holomorphy_residual<F>(big_f: F, points: &[Point], h: f64, mode: ExecMode) -> f64
where
    F: Fn(&Point) -> Complex64 + Sync + Send,
{
    exec::map_slice(mode, points, |x| {
        crate::transforms1d::cauchy_riemann_residual(|z| big_f(&Point::new(z, x.w.clone())), x.z, h)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::MultiIndex;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    fn w1() -> HoloPolynomial {
        HoloPolynomial::monomial(MultiIndex::new(vec![1]), one())
    }

    fn const1(n: usize) -> HoloPolynomial {
        HoloPolynomial::constant(n, one())
    }

    #[test]
    fn t_compact_examples() {
        let spec = DomainSpec::half_plane();
        let a = PolySequence::new(vec![HoloPolynomial::zero(0), const1(0)]).unwrap();
        let x = Point::scalar(c(0.3, 0.2));
        assert_eq!(t_compact(&spec, &a, &x).unwrap(), c(0.3, 0.2));
        assert!((norm_yp(&spec, &a).unwrap().value - PI / 2.0).abs() < 1e-14);
        let r = equivariance_rotation(&spec, &a, FRAC_PI_2, &x).unwrap();
        assert!(r < 1e-12);
        assert!(t_compact(&spec, &a, &Point::scalar(c(1.0, 0.0))).is_err());
    }

    #[test]
    fn t_s_examples() {
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let e = Profile1D::one_sided(one(), 0.0, one()).unwrap();
        let f = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(e, const1(1))]).unwrap();
        let x = Point::new(c(0.2, 1.0), vec![c(0.3, 0.1)]);
        let expect = 1.0 / (1.0 - TAU * I * x.z);
        assert!((t_s_multi(&f, &x).unwrap() - expect).norm() < 1e-15);
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        let g = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(te, w1())]).unwrap();
        let expect = x.w[0] / (1.0 - TAU * I * x.z).powi(2);
        assert!((t_s_multi(&g, &x).unwrap() - expect).norm() < 1e-15);
        let num = t_s_multi_numeric(&g, &x).unwrap().value;
        assert!((num - expect).norm() < 1e-10);
        let zero = SpectralElement::zero(&spec, SpaceKind::Hp);
        assert_eq!(t_s_multi(&zero, &x).unwrap(), c(0.0, 0.0));
        assert!(t_s_multi(&g, &Point::new(c(0.0, 0.05), vec![c(0.3, 0.0)])).is_err());
        let r = equivariance_translation(&g, 3.0, &Point::new(I, vec![c(0.0, 0.0)])).unwrap();
        assert!(r < 1e-10);
        assert_eq!(equivariance_translation(&g, 0.0, &x).unwrap(), 0.0);
    }

    #[test]
    fn t_s_element_must_have_finite_norm() {
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        assert!(SpectralElement::new(&spec, SpaceKind::Hp, vec![(te, w1())]).is_err());
        let t2e = Profile1D::one_sided(one(), 2.0, one()).unwrap();
        assert!(SpectralElement::new(&spec, SpaceKind::Hp, vec![(t2e, w1())]).is_ok());
    }

    #[test]
    fn t_v_examples() {
        let spec = DomainSpec::half_plane();
        let e = Profile1D::one_sided(one(), 0.0, one()).unwrap();
        let g = SpectralElement::new(&spec, SpaceKind::Xp, vec![(e, const1(0))]).unwrap();
        let expect = 1.0 / (I * (1.0 + PI * PI));
        let x = Point::scalar(I);
        assert!((t_v_multi_closed(&g, &x).unwrap() - expect).norm() < 1e-15);
        assert!((t_v_multi(&g, &x).unwrap().value - expect).norm() < 1e-10);
        assert!(equivariance_scaling(&g, 1.0, &x).unwrap() < 1e-15);
        let zero = SpectralElement::zero(&spec, SpaceKind::Xp);
        assert_eq!(t_v_multi_closed(&zero, &x).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn t_v_closed_matches_quadrature_in_two_variables() {
        let spec = DomainSpec::standard(vec![2]).unwrap();
        let gauss = Profile1D::gaussian(c(1.0, 0.5), 1, 2.0, 0.3).unwrap();
        let e = Profile1D::one_sided(c(0.5, 0.0), 1.0, c(1.5, 0.0)).unwrap();
        let g = SpectralElement::new(&spec, SpaceKind::Xp, vec![(gauss, w1()), (e, const1(1))]).unwrap();
        let x = Point::new(c(-0.4, 1.3), vec![c(0.5, 0.4)]);
        let a = t_v_multi_closed(&g, &x).unwrap();
        let b = t_v_multi(&g, &x).unwrap().value;
        assert!((a - b).norm() < 1e-10 * a.norm(), "{a} vs {b}");
        let r = equivariance_scaling(&g, 2.5, &x).unwrap();
        assert!(r < 1e-12 * a.norm().max(1.0), "{r}");
    }

    #[test]
    fn t_s_inverse_round_trip() {
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        let f = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(te.clone(), w1())]).unwrap();
        let w = vec![c(0.3, 0.2)];
        let ts: Vec<f64> = (0..20).map(|i| 0.1 + 4.9 * i as f64 / 19.0).collect();
        let opts = InverseOptions::default();
        let pw = spec.p(&w);
        let big_f = |x: &Point| t_s_multi(&f, x).unwrap_or_default();
        let r1 = t_s_inverse(&spec, big_f, &w, pw + 0.1, &ts, &opts).unwrap();
        let r2 = t_s_inverse(&spec, big_f, &w, pw + 0.2, &ts, &opts).unwrap();
        let truth = te.scale(w[0]);
        assert!(r1.sup_error(&truth) < 1e-6, "{}", r1.sup_error(&truth));
        assert!(r2.sup_error(&truth) < 1e-6, "{}", r2.sup_error(&truth));
        assert!(t_s_inverse(&spec, big_f, &w, 0.5 * pw, &ts, &opts).is_err());
    }

    #[test]
    fn rotation_isometry() {
        for m in [1u32, 2] {
            let spec = DomainSpec::standard(vec![m]).unwrap();
            let a = PolySequence::new(vec![
                const1(1),
                w1(),
                HoloPolynomial::new(1, vec![(MultiIndex::new(vec![2]), c(0.5, -1.0))]).unwrap(),
            ])
            .unwrap();
            let r = isometry_rotation(&spec, &a, &IsometryOptions::default()).unwrap();
            assert!(r.rel_error() < 1e-6, "m = {m}: {r:?}");
        }
    }

    #[test]
    fn translation_isometry_single_element() {
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let t2e = Profile1D::one_sided(one(), 2.0, c(1.0, 0.5)).unwrap();
        let f = SpectralElement::new(&spec, SpaceKind::Hp, vec![(t2e, w1())]).unwrap();
        let r = isometry_translation(&f, &IsometryOptions::default()).unwrap();
        assert!(r.rel_error() < 1e-6, "{r:?}");
    }

    #[test]
    fn scaling_isometry_single_element() {
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let g0 = Profile1D::gaussian(one(), 0, 1.0, 0.0).unwrap();
        let g = SpectralElement::new(&spec, SpaceKind::Xp, vec![(g0, w1())]).unwrap();
        let r = isometry_scaling(&g, &IsometryOptions::default()).unwrap();
        assert!(r.rel_error() < 1e-4, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn translation_equivariance(theta in -3.0f64..3.0, x in -1.0f64..1.0, y in 0.3f64..2.0, wr in -0.4f64..0.4) {
            let spec = DomainSpec::standard(vec![1]).unwrap();
            let p = Profile1D::one_sided(c(1.0, 0.2), 2.0, c(1.0, -0.3)).unwrap();
            let f = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(p, w1())]).unwrap();
            let pt = Point::new(c(x, y), vec![c(wr, 0.1)]);
            let scale = t_s_multi(&f, &pt).unwrap().norm().max(1e-300);
            prop_assert!(equivariance_translation(&f, theta, &pt).unwrap() <= 1e-10 * scale.max(1.0));
        }

        #[test]
        fn t_s_is_linear(s in -2.0f64..2.0, x in -1.0f64..1.0) {
            let spec = DomainSpec::standard(vec![1]).unwrap();
            let p = Profile1D::one_sided(one(), 2.0, one()).unwrap();
            let q = Profile1D::one_sided(I, 3.0, c(2.0, 1.0)).unwrap();
            let f = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(p, w1())]).unwrap();
            let g = SpectralElement::unchecked(&spec, SpaceKind::Hp, vec![(q, const1(1))]).unwrap();
            let pt = Point::new(c(x, 0.8), vec![c(0.2, 0.3)]);
            let lhs = t_s_multi(&f.scale(c(s, 1.0)).add(&g).unwrap(), &pt).unwrap();
            let rhs = t_s_multi(&f, &pt).unwrap() * c(s, 1.0) + t_s_multi(&g, &pt).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }
}
