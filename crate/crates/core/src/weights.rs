//! The scalar weights `ω_{a,b}(t)` and `λ(s,t)`, their radial moments, and
//! squared norms on the spaces `Y_p`, `H_p` and `X_p`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::kernels::{FiberWeight, MonomialGramBasis};
use crate::quad::{integrate_bp, integrate_cn, integrate_interval, CubatureRule, Decay};
use crate::transforms::{PolySequence, SpaceKind, SpectralElement};
use crate::transforms1d::{integrate_against, integrate_layout, Piece, Profile1D};

const SERIES_CUTOFF: f64 = 1e-4;

/// `(1 − e^{−x})/x`, accurate near `x = 0`.
pub(crate) fn one_minus_exp_over(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // 1 − x/2 + x²/6 − x³/24 + x⁴/120 − x⁵/720
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 2..=6 {
            term *= -x / k as f64;
            sum += term;
        }
        sum
    } else {
        -(-x).exp_m1() / x
    }
}

/// `ω_{a,b}(t) = (e^{−4πat} − e^{−4πbt})/(4πt)`; `b = ∞` is allowed for `t > 0`.
pub fn omega(a: f64, b: f64, t: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("weight needs a < b, got a = {a}, b = {b}")));
    }
    if b == f64::INFINITY {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("ω_(a,∞) is defined for t > 0 only, got t = {t}")));
        }
        return Ok((-4.0 * PI * a * t).exp() / (4.0 * PI * t));
    }
    Ok((-4.0 * PI * a * t).exp() * (b - a) * one_minus_exp_over(4.0 * PI * (b - a) * t))
}

/// `λ(s,t) = ω_{arcsin s, π − arcsin s}(t)`, with `λ(s,0) = π − 2 arcsin s`.
pub fn lambda_weight(s: f64, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("λ needs s in [0, 1), got {s}")));
    }
    let a = s.asin();
    omega(a, PI - a, t)
}

fn lambda_unchecked(s: f64, t: f64) -> f64 {
    let a = s.min(1.0).asin();
    let width = PI - 2.0 * a;
    if width <= 0.0 {
        return 0.0;
    }
    (-4.0 * PI * a * t).exp() * width * one_minus_exp_over(4.0 * PI * width * t)
}

/// A strip weight `ω_{a,b}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripWeight {
    pub a: f64,
    pub b: f64,
}

impl StripWeight {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a.is_nan() || a == f64::INFINITY {
            return Err(Error::InvalidArgument(format!("strip weight needs a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        omega(self.a, self.b, t)
    }

    pub fn is_half_infinite(&self) -> bool {
        self.b == f64::INFINITY
    }
}

/// `A ∫_0^1 s^{A−1} λ(s,t) ds`, the λ-moment of a shell with homogeneity
/// `A`; equals `λ(0,t)` at `A = 0`.
pub fn lambda_moment(big_a: f64, t: f64) -> f64 {
    if t < 0.0 {
        return (4.0 * PI * PI * -t).exp() * lambda_moment(big_a, -t);
    }
    if big_a == 0.0 {
        return lambda_unchecked(0.0, t);
    }
    // u = s^A removes the endpoint singularity.
    let g = |u: f64| Complex64::new(lambda_unchecked(u.powf(1.0 / big_a), t), 0.0);
    let split = (1.0 + 4.0 * PI * t).powf(-big_a);
    if split < 0.25 && split > 1e-250 {
        integrate_interval(g, 0.0, split).value.re + integrate_interval(g, split, 1.0).value.re
    } else {
        integrate_interval(g, 0.0, 1.0).value.re
    }
}

/// A squared norm with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

impl NormEstimate {
    fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0 }
    }
}

/// `‖a‖²_{Y_p} = π Σ_k ‖a_k‖²_{W_p(k)}/(k+1)` from the monomial Gram basis.
pub fn norm_yp(spec: &DomainSpec, a: &PolySequence) -> Result<NormEstimate> {
    if a.is_empty() {
        return Ok(NormEstimate::zero());
    }
    let basis = MonomialGramBasis::for_polynomials(spec, a.entries())?;
    let mut out = NormEstimate::zero();
    for (k, ak) in a.entries().iter().enumerate() {
        let (v, e) = basis.weighted_norm_sq(ak, FiberWeight::EllipsoidPower(k as u32))?;
        out.value += PI * v / (k as f64 + 1.0);
        out.error_estimate += PI * e / (k as f64 + 1.0);
    }
    Ok(out)
}

/// `‖a‖²_{Y_p}` by cubature over `B_p`.
pub fn norm_yp_numeric(spec: &DomainSpec, a: &PolySequence, rule: &CubatureRule) -> Result<NormEstimate> {
    if a.is_empty() {
        return Ok(NormEstimate::zero());
    }
    let r = integrate_bp(
        spec.poly(),
        |w| {
            let one_minus_p = (1.0 - spec.p(w)).max(0.0);
            let mut acc = 0.0;
            let mut pow = one_minus_p;
            for (k, ak) in a.entries().iter().enumerate() {
                acc += ak.eval(w).norm_sqr() * pow / (k as f64 + 1.0);
                pow *= one_minus_p;
            }
            Complex64::new(PI * acc, 0.0)
        },
        rule,
    )?;
    Ok(NormEstimate { value: r.value.re, error_estimate: r.error_estimate })
}

fn require_space(f: &SpectralElement, kind: SpaceKind) -> Result<()> {
    if f.space() != kind {
        return Err(Error::NotInSpace(format!("element declared for {:?}, not {kind:?}", f.space())));
    }
    Ok(())
}

/// `‖f‖²_{H_p} = ∫_{Cⁿ}∫_0^∞ |f|² e^{−4πp(w)t}/(4πt) dt dV`, reduced to
/// Gamma functions shell by shell.
pub fn norm_hp(spec: &DomainSpec, f: &SpectralElement) -> Result<NormEstimate> {
    require_space(f, SpaceKind::Hp)?;
    if f.is_zero() {
        return Ok(NormEstimate::zero());
    }
    let basis = MonomialGramBasis::for_polynomials(spec, f.polynomials())?;
    let terms = f.terms();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (pj, qj) in terms {
        for (pk, qk) in terms {
            for (shell, form, form_err) in basis.cross_forms(qj, qk)? {
                let big_a = basis.homogeneity(shell);
                let scale = statrs::function::gamma::ln_gamma(big_a + 1.0) - (big_a + 1.0) * (4.0 * PI).ln();
                let mut integral = Complex64::new(0.0, 0.0);
                for x in pj.pieces() {
                    for y in pk.pieces() {
                        integral += onesided_pair(x, y, big_a)?;
                    }
                }
                let v = form * integral * scale.exp();
                total += v;
                err += form_err * (integral * scale.exp()).norm();
            }
        }
    }
    Ok(NormEstimate { value: total.re, error_estimate: err + 1e-15 * total.norm() })
}

/// `∫_0^∞ x(t) conj(y(t)) t^{−A−1} dt` for one-sided exponential pieces.
fn onesided_pair(x: &Piece, y: &Piece, big_a: f64) -> Result<Complex64> {
    match (x, y) {
        (Piece::OneSided { c: c1, a: a1, b: b1 }, Piece::OneSided { c: c2, a: a2, b: b2 }) => {
            let s = a1 + a2 - big_a;
            if s <= 0.0 {
                return Err(Error::Divergence(format!(
                    "t-profile exponent {} too small for the H_p weight near t = 0",
                    0.5 * (a1 + a2)
                )));
            }
            let beta = b1 + b2.conj();
            let ln_g = statrs::function::gamma::ln_gamma(s);
            Ok(c1 * c2.conj() * (Complex64::new(ln_g, 0.0) - s * beta.ln()).exp())
        }
        _ => Err(Error::NotInSpace("H_p elements take one-sided exponential profiles".into())),
    }
}

/// `‖f‖²_{H_p}` by iterated quadrature: exp-sinh in `t`, cubature over `Cⁿ`
/// at each node.
pub fn norm_hp_numeric(spec: &DomainSpec, f: &SpectralElement, rule: &CubatureRule) -> Result<NormEstimate> {
    require_space(f, SpaceKind::Hp)?;
    if f.is_zero() {
        return Ok(NormEstimate::zero());
    }
    let first_error = std::cell::RefCell::new(None);
    let scale = f.profile_scale();
    let r = crate::quad::integrate_halfline_real(
        |t| {
            let inner = integrate_cn(
                spec.poly(),
                |w| {
                    let v = f.eval(t, w);
                    Complex64::new(v.norm_sqr() * (-4.0 * PI * spec.p(w) * t).exp(), 0.0)
                },
                Decay::Exponential { rate: 4.0 * PI * t },
                rule,
            );
            match inner {
                Ok(q) => Complex64::new(q.value.re / (4.0 * PI * t), 0.0),
                Err(e) => {
                    first_error.borrow_mut().get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        },
        scale,
    );
    if let Some(e) = first_error.into_inner() {
        return Err(e);
    }
    Ok(NormEstimate { value: r.value.re, error_estimate: r.error_estimate })
}

/// `‖g‖²_{X_p} = ∫_ℝ∫_{B_p} |g|² λ(p(ζ),t) dV dt`, with the `ζ`-integral
/// reduced to λ-moments shell by shell.
pub fn norm_xp(spec: &DomainSpec, g: &SpectralElement) -> Result<NormEstimate> {
    require_space(g, SpaceKind::Xp)?;
    if g.is_zero() {
        return Ok(NormEstimate::zero());
    }
    let basis = MonomialGramBasis::for_polynomials(spec, g.polynomials())?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (pj, qj) in g.terms() {
        for (pk, qk) in g.terms() {
            for (shell, form, form_err) in basis.cross_forms(qj, qk)? {
                let big_a = basis.homogeneity(shell);
                let r = integrate_against(pj, pk, |t| lambda_moment(big_a, t));
                total += form * r.value;
                err += form.norm() * r.error_estimate + form_err * r.value.norm();
            }
        }
    }
    Ok(NormEstimate { value: total.re, error_estimate: err + 1e-14 * total.norm() })
}

/// `‖g‖²_{X_p}` by quadrature in `t` with cubature over `B_p` at each node.
pub fn norm_xp_numeric(spec: &DomainSpec, g: &SpectralElement, rule: &CubatureRule) -> Result<NormEstimate> {
    require_space(g, SpaceKind::Xp)?;
    if g.is_zero() {
        return Ok(NormEstimate::zero());
    }
    let nodes = crate::quad::bp_rule(spec.poly(), rule)?;
    let probe = Profile1D::sum(g.terms().iter().map(|(p, _)| p));
    let r = integrate_layout(&probe, |t| {
        let inner = nodes.integrate(
            &|w: &[Complex64]| {
                let v = g.eval(t, w);
                Complex64::new(v.norm_sqr() * lambda_unchecked(spec.p(w).max(0.0), t), 0.0)
            },
            rule.exec,
        );
        Complex64::new(inner.value.re, 0.0)
    });
    Ok(NormEstimate { value: r.value.re, error_estimate: r.error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_omega(a: f64, b: f64, t: f64) -> f64 {
        ((-4.0 * PI * a * t).exp() - (-4.0 * PI * b * t).exp()) / (4.0 * PI * t)
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(0.0, 1.0, 0.0).unwrap(), 1.0);
        assert!((omega(0.0, f64::INFINITY, 1.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-16);
        let expect = (1.0 - (-4.0 * PI).exp()) / (4.0 * PI);
        assert!((omega(0.0, 1.0, 1.0).unwrap() - expect).abs() < 1e-16);
        assert!(omega(0.0, f64::INFINITY, 0.0).is_err());
        assert!(omega(0.0, f64::INFINITY, -1.0).is_err());
        assert!(omega(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_weight(0.0, 0.0).unwrap(), PI);
        assert!(lambda_weight(1.0 - 1e-15, 0.0).unwrap() < 1e-6);
        let expect = (1.0 - (-4.0 * PI * PI).exp()) / (4.0 * PI);
        assert!((lambda_weight(0.0, 1.0).unwrap() - expect).abs() < 1e-16);
        assert!(lambda_weight(1.0, 0.0).is_err());
    }

    #[test]
    fn omega_continuity_at_zero() {
        for k in 4..=12 {
            let eps = 10f64.powi(-k);
            let v = omega(0.3, 1.7, eps).unwrap();
            assert!((v - 1.4).abs() < 20.0 * eps, "k = {k}: {v}");
        }
    }

    #[test]
    fn lambda_moment_values() {
        // ∫_0^1 (π − 2 arcsin s) ds = 2
        assert!((lambda_moment(1.0, 0.0) - 2.0).abs() < 1e-13);
        assert_eq!(lambda_moment(0.0, 0.7), lambda_weight(0.0, 0.7).unwrap());
        let direct = integrate_interval(|s| Complex64::new(2.0 * s * lambda_unchecked(s, 1.3), 0.0), 0.0, 1.0);
        assert!((lambda_moment(2.0, 1.3) - direct.value.re).abs() < 1e-13);
        let neg = lambda_moment(1.5, -0.4);
        let pos = lambda_moment(1.5, 0.4);
        assert!((neg - (4.0 * PI * PI * 0.4).exp() * pos).abs() < 1e-12 * neg);
    }

    proptest! {
        #[test]
        fn lambda_matches_omega(s in 0.0f64..0.999, t in -3.0f64..3.0) {
            let l = lambda_weight(s, t).unwrap();
            let w = omega(s.asin(), PI - s.asin(), t).unwrap();
            prop_assert!((l - w).abs() <= 1e-12 * l.abs());
        }

        #[test]
        fn omega_matches_direct_formula(a in -1.0f64..1.0, width in 0.1f64..2.0, t in 0.01f64..2.0) {
            let v = omega(a, a + width, t).unwrap();
            let d = direct_omega(a, a + width, t);
            prop_assert!((v - d).abs() <= 1e-12 * d.abs());
            let neg = omega(a, a + width, -t).unwrap();
            prop_assert!((neg - direct_omega(a, a + width, -t)).abs() <= 1e-12 * neg.abs());
        }

        #[test]
        fn omega_positive_and_shift_identity(a in -1.0f64..1.0, width in 0.01f64..3.0, t in -2.0f64..2.0) {
            let v = omega(a, a + width, t).unwrap();
            prop_assert!(v > 0.0);
            let shifted = (-4.0 * PI * a * t).exp() * omega(0.0, width, t).unwrap();
            prop_assert!((v - shifted).abs() <= 1e-12 * v);
        }

        #[test]
        fn lambda_reflection(s in 0.0f64..0.99, tau in 0.0f64..1.5) {
            let neg = lambda_weight(s, -tau).unwrap();
            let pos = lambda_weight(s, tau).unwrap();
            prop_assert!((neg - (4.0 * PI * PI * tau).exp() * pos).abs() <= 1e-12 * neg);
        }
    }
}
