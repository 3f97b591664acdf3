//! The domains `U_p`, `E_p`, `B_p`, `C_p`, the maps `Λ`, `Ψ`, `ρ̂_γ`, the
//! automorphism families and pullbacks.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::polynomials::{BalancedPolynomial, WeightTuple};

/// Points within this distance of a boundary count as outside.
pub const BOUNDARY_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A balanced polynomial together with the domains it defines.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    p: BalancedPolynomial,
}

/// A point `(z, w) ∈ C^{1+n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub w: Vec<Complex64>,
}

impl Point {
    pub fn new(z: Complex64, w: Vec<Complex64>) -> Self {
        Self { z, w }
    }

    /// A point with no `w` coordinates (n = 0).
    pub fn scalar(z: Complex64) -> Self {
        Self { z, w: vec![] }
    }

    pub fn coords(&self) -> Vec<Complex64> {
        std::iter::once(self.z).chain(self.w.iter().copied()).collect()
    }

    pub fn from_coords(c: &[Complex64]) -> Self {
        Self { z: c[0], w: c[1..].to_vec() }
    }
}

impl DomainSpec {
    pub fn new(p: BalancedPolynomial) -> Self {
        Self { p }
    }

    /// n = 0: `U_p` is the upper half-plane and `E_p` the unit disc.
    pub fn half_plane() -> Self {
        Self { p: BalancedPolynomial::zero() }
    }

    /// `p = Σ |w_j|^{2 m_j}`.
    pub fn standard(m: Vec<u32>) -> Result<Self> {
        Ok(Self { p: BalancedPolynomial::standard(m)? })
    }

    /// Parses a polynomial JSON document; returns the number of terms added
    /// by Hermitian completion.
    pub fn from_json_str(s: &str) -> Result<(Self, usize)> {
        let (p, added) = BalancedPolynomial::from_json_str(s)?;
        Ok((Self { p }, added))
    }

    pub fn poly(&self) -> &BalancedPolynomial {
        &self.p
    }

    pub fn weights(&self) -> &WeightTuple {
        self.p.weights()
    }

    pub fn m(&self) -> &[u32] {
        self.p.weights().m()
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn inv_mu(&self) -> f64 {
        self.p.weights().inv_mu_f64()
    }

    pub fn p(&self, w: &[Complex64]) -> f64 {
        self.p.eval(w)
    }

    fn check(&self, w: &[Complex64]) -> Result<()> {
        check_dim(self.dim(), w.len())
    }

    pub fn in_up(&self, x: &Point) -> Result<bool> {
        self.check(&x.w)?;
        let p = self.p(&x.w);
        Ok(x.z.im - p > BOUNDARY_TOL * (x.z.norm() + p.abs()))
    }

    pub fn in_ep(&self, x: &Point) -> Result<bool> {
        self.check(&x.w)?;
        Ok(1.0 - x.z.norm_sqr() - self.p(&x.w) > BOUNDARY_TOL)
    }

    pub fn in_bp(&self, w: &[Complex64]) -> Result<bool> {
        self.check(w)?;
        Ok(1.0 - self.p(w) > BOUNDARY_TOL)
    }

    /// `C_p = {(γ, ζ) : Im γ > p(ζ)|γ|}`.
    pub fn in_cp(&self, x: &Point) -> Result<bool> {
        self.check(&x.w)?;
        let bound = self.p(&x.w) * x.z.norm();
        Ok(x.z.im - bound > BOUNDARY_TOL * (x.z.norm() + bound))
    }

    pub(crate) fn require_up(&self, x: &Point) -> Result<()> {
        if self.in_up(x)? {
            Ok(())
        } else {
            Err(Error::Domain("U_p".into()))
        }
    }

    pub(crate) fn require_ep(&self, x: &Point) -> Result<()> {
        if self.in_ep(x)? {
            Ok(())
        } else {
            Err(Error::Domain("E_p".into()))
        }
    }

    pub(crate) fn require_bp(&self, w: &[Complex64]) -> Result<()> {
        if self.in_bp(w)? {
            Ok(())
        } else {
            Err(Error::Domain("B_p".into()))
        }
    }
}

fn principal_pow(x: Complex64, e: f64) -> Complex64 {
    if x == Complex64::new(0.0, 0.0) {
        return if e == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    (x.ln() * e).exp()
}

/// `Λ(z, w) = ((1 + iz/4)/(1 − iz/4), w_j (1 − iz/4)^{−1/m_j})`.
pub fn lambda_map(spec: &DomainSpec, x: &Point) -> Result<Point> {
    spec.require_up(x)?;
    let q = 1.0 - I * x.z / 4.0;
    let z = (1.0 + I * x.z / 4.0) / q;
    let w = x.w.iter().zip(spec.m()).map(|(wj, &mj)| wj * principal_pow(q, -1.0 / mj as f64)).collect();
    Ok(Point { z, w })
}

/// Inverse of [`lambda_map`], from `E_p` to `U_p`.
pub fn lambda_inverse(spec: &DomainSpec, x: &Point) -> Result<Point> {
    spec.require_ep(x)?;
    let z = -4.0 * I * (x.z - 1.0) / (x.z + 1.0);
    let q = 2.0 / (x.z + 1.0);
    let w = x.w.iter().zip(spec.m()).map(|(wj, &mj)| wj * principal_pow(q, 1.0 / mj as f64)).collect();
    Ok(Point { z, w })
}

/// `det Λ′ = (i/2)(1 − iz/4)^{−2−1/μ}`.
pub fn det_lambda_prime(spec: &DomainSpec, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain("upper half-plane".into()));
    }
    let q = 1.0 - I * z / 4.0;
    Ok(0.5 * I * principal_pow(q, -2.0 - spec.inv_mu()))
}

/// `ρ̂_γ(w) = (γ^{1/2m_1} w_1, …)` with the principal branch.
pub fn rho_hat(gamma: Complex64, w: &[Complex64], m: &[u32]) -> Result<Vec<Complex64>> {
    check_dim(m.len(), w.len())?;
    if gamma.im == 0.0 && gamma.re <= 0.0 {
        return Err(Error::Branch(format!("γ = {gamma} lies on the slit (−∞, 0]")));
    }
    let lg = gamma.ln();
    Ok(w.iter().zip(m).map(|(wj, &mj)| wj * (lg / (2.0 * mj as f64)).exp()).collect())
}

/// `Ψ(z, w) = (z, ρ̂_{1/z} w)`, mapping `U_p` onto `C_p`.
pub fn psi_map(spec: &DomainSpec, x: &Point) -> Result<Point> {
    spec.require_up(x)?;
    let lz = x.z.ln();
    let w = x.w.iter().zip(spec.m()).map(|(wj, &mj)| wj * (-lz / (2.0 * mj as f64)).exp()).collect();
    Ok(Point { z: x.z, w })
}

/// `(γ, ζ) ↦ (γ, ρ̂_γ ζ)`, the inverse of [`psi_map`].
pub fn psi_inverse(spec: &DomainSpec, x: &Point) -> Result<Point> {
    if !spec.in_cp(x)? {
        return Err(Error::Domain("C_p".into()));
    }
    Ok(Point { z: x.z, w: rho_hat(x.z, &x.w, spec.m())? })
}

/// `det Ψ′ = z^{−1/(2μ)}`.
pub fn det_psi_prime(spec: &DomainSpec, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain("upper half-plane".into()));
    }
    Ok((-z.ln() * (0.5 * spec.inv_mu())).exp())
}

/// Which model domain a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    HalfSpace,
    Ellipsoid,
}

/// The one-parameter automorphism groups `σ_θ` (on `E_p`), `τ_θ` and `ρ_θ`
/// (on `U_p`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Automorphism {
    Rotation(f64),
    Translation(f64),
    Scaling(f64),
}

impl Automorphism {
    pub fn domain(&self) -> DomainKind {
        match self {
            Automorphism::Rotation(_) => DomainKind::Ellipsoid,
            _ => DomainKind::HalfSpace,
        }
    }

    /// Constant Jacobian determinant: `e^{iθ}`, `1`, `θ^{1+1/(2μ)}`.
    pub fn jacobian_det(&self, spec: &DomainSpec) -> Complex64 {
        match *self {
            Automorphism::Rotation(t) => Complex64::from_polar(1.0, t),
            Automorphism::Translation(_) => Complex64::new(1.0, 0.0),
            Automorphism::Scaling(t) => Complex64::new(t.powf(1.0 + 0.5 * spec.inv_mu()), 0.0),
        }
    }
}

/// Applies an automorphism to a point of the given domain kind.
pub fn automorphism_apply(spec: &DomainSpec, kind: DomainKind, a: Automorphism, x: &Point) -> Result<Point> {
    if kind != a.domain() {
        return Err(Error::Domain(format!("{a:?} does not act on {kind:?}")));
    }
    spec.check(&x.w)?;
    match a {
        Automorphism::Rotation(t) => Ok(Point { z: Complex64::from_polar(1.0, t) * x.z, w: x.w.clone() }),
        Automorphism::Translation(t) => Ok(Point { z: x.z + t, w: x.w.clone() }),
        Automorphism::Scaling(t) => {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument("scaling parameter must be positive".into()));
            }
            Ok(Point { z: x.z * t, w: crate::polynomials::rho_hat_real(t, &x.w, spec.m()) })
        }
    }
}

/// A biholomorphic map with its Jacobian determinant.
pub trait Biholomorphism: Send + Sync {
    fn map(&self, x: &Point) -> Result<Point>;
    fn jacobian_det(&self, x: &Point) -> Result<Complex64>;
}

pub struct Identity;

impl Biholomorphism for Identity {
    fn map(&self, x: &Point) -> Result<Point> {
        Ok(x.clone())
    }
    fn jacobian_det(&self, _: &Point) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }
}

/// `Λ: U_p → E_p`.
pub struct LambdaMap(pub DomainSpec);

impl Biholomorphism for LambdaMap {
    fn map(&self, x: &Point) -> Result<Point> {
        lambda_map(&self.0, x)
    }
    fn jacobian_det(&self, x: &Point) -> Result<Complex64> {
        self.0.require_up(x)?;
        det_lambda_prime(&self.0, x.z)
    }
}

/// `Λ^{-1}: E_p → U_p`.
pub struct LambdaInverse(pub DomainSpec);

impl Biholomorphism for LambdaInverse {
    fn map(&self, x: &Point) -> Result<Point> {
        lambda_inverse(&self.0, x)
    }
    fn jacobian_det(&self, x: &Point) -> Result<Complex64> {
        let y = lambda_inverse(&self.0, x)?;
        Ok(det_lambda_prime(&self.0, y.z)?.inv())
    }
}

/// `Ψ: U_p → C_p`.
pub struct PsiMap(pub DomainSpec);

impl Biholomorphism for PsiMap {
    fn map(&self, x: &Point) -> Result<Point> {
        psi_map(&self.0, x)
    }
    fn jacobian_det(&self, x: &Point) -> Result<Complex64> {
        self.0.require_up(x)?;
        det_psi_prime(&self.0, x.z)
    }
}

/// An automorphism as a [`Biholomorphism`].
pub struct AutomorphismMap {
    pub spec: DomainSpec,
    pub automorphism: Automorphism,
}

impl Biholomorphism for AutomorphismMap {
    fn map(&self, x: &Point) -> Result<Point> {
        automorphism_apply(&self.spec, self.automorphism.domain(), self.automorphism, x)
    }
    fn jacobian_det(&self, _: &Point) -> Result<Complex64> {
        Ok(self.automorphism.jacobian_det(&self.spec))
    }
}

/// A function of `(z, w)` that may fail outside its domain.
pub type HoloFn = Arc<dyn Fn(&Point) -> Result<Complex64> + Send + Sync>;

/// `φ*f = (f ∘ φ)·det φ′`.
pub fn pullback(f: HoloFn, phi: Arc<dyn Biholomorphism>) -> HoloFn {
    Arc::new(move |x: &Point| {
        let y = phi.map(x)?;
        Ok(f(&y)? * phi.jacobian_det(x)?)
    })
}

/// Complex Jacobian determinant of a holomorphic map by central differences
/// along the real coordinate directions.
pub fn numerical_jacobian_det<F>(f: F, x: &Point, h: f64) -> Result<Complex64>
where
    F: Fn(&Point) -> Result<Point>,
{
    let c = x.coords();
    let d = c.len();
    let mut jac = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        let mut plus = c.clone();
        let mut minus = c.clone();
        plus[j] += h;
        minus[j] -= h;
        let fp = f(&Point::from_coords(&plus))?.coords();
        let fm = f(&Point::from_coords(&minus))?.coords();
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac.determinant())
}
