//! Monomial Gram bases and the fiber kernels of `S_p(t)`, `W_p(k)` and `Q_p(t)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::{KernelEstimate, Method};
use crate::domains::DomainSpec;
use crate::error::{check_dim, Error, Result};
use crate::polynomials::{HoloPolynomial, MultiIndex};
use crate::quad::{bp_rule, CubatureRule};
use crate::weights::{lambda_moment, lambda_weight};

/// Gram matrices with a larger condition number are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Default number of weighted-degree shells for the dense Gram path.
pub const DENSE_SHELLS: u64 = 12;

/// Shell cap for the diagonal series.
pub const DIAGONAL_SHELLS: u64 = 400;

const MAX_DIAGONAL_MONOMIALS: usize = 200_000;

/// Weight defining a fiber space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiberWeight {
    /// `S_p(t) = A²(Cⁿ, e^{−4πp t})`, `t > 0`.
    SegalBargmann(f64),
    /// `W_p(k) = A²(B_p, (1−p)^{k+1})`.
    EllipsoidPower(u32),
    /// `Q_p(t) = A²(B_p, λ(p, t))`.
    Lambda(f64),
}

impl FiberWeight {
    /// `ln(A ∫ s^{A−1} g(s) ds)`: the factor by which the weight rescales the
    /// `B_p` volume Gram block of homogeneity `A`.
    pub fn ln_moment(&self, big_a: f64) -> f64 {
        match *self {
            FiberWeight::SegalBargmann(t) => ln_gamma(big_a + 1.0) - big_a * (4.0 * PI * t).ln(),
            FiberWeight::EllipsoidPower(k) => {
                let k = k as f64;
                ln_gamma(big_a + 1.0) + ln_gamma(k + 2.0) - ln_gamma(big_a + k + 2.0)
            }
            FiberWeight::Lambda(t) => {
                let key = (big_a.to_bits(), t.to_bits());
                if let Some(&v) = lambda_moment_cache().lock().expect("moment cache").get(&key) {
                    return v;
                }
                let v = if t < 0.0 {
                    4.0 * PI * PI * -t + lambda_moment(big_a, -t).ln()
                } else {
                    lambda_moment(big_a, t).ln()
                };
                lambda_moment_cache().lock().expect("moment cache").insert(key, v);
                v
            }
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            FiberWeight::SegalBargmann(t) if !(t > 0.0) => {
                Err(Error::Domain(format!("Segal-Bargmann parameter t = {t} must be positive")))
            }
            FiberWeight::Lambda(t) if !t.is_finite() => Err(Error::InvalidArgument("t must be finite".into())),
            _ => Ok(()),
        }
    }

    fn on_ball(&self) -> bool {
        !matches!(self, FiberWeight::SegalBargmann(_))
    }
}

#[derive(Clone, Debug)]
enum ShellGram {
    /// `ln ∫_{B_p} |w^α|² dV` per monomial.
    Diagonal(Vec<f64>),
    Dense {
        gram: DMatrix<Complex64>,
        chol: DMatrix<Complex64>,
        error: f64,
        condition: f64,
    },
}

#[derive(Clone, Debug)]
struct Shell {
    alphas: Vec<MultiIndex>,
    gram: ShellGram,
}

/// Volume Gram blocks `G⁰_{αβ} = ∫_{B_p} w^α conj(w^β) dV`, one block per
/// weighted-degree shell. Monomials of different weight are orthogonal for
/// every radial weight, and a radial weight `g(p)` rescales the block of
/// homogeneity `A = wt α + wt β + 1/μ` by `A ∫_0^1 s^{A−1} g(s) ds`.
#[derive(Clone, Debug)]
pub struct MonomialGramBasis {
    spec: DomainSpec,
    shells: Vec<Shell>,
}

fn lambda_moment_cache() -> &'static Mutex<HashMap<(u64, u64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

type BasisCache = Mutex<HashMap<(String, u64), Arc<MonomialGramBasis>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl MonomialGramBasis {
    /// Builds shells `0..=max_shell`.
    pub fn new(spec: &DomainSpec, max_shell: u64) -> Result<Self> {
        let wt = spec.weights();
        if let Some(c) = spec.poly().diagonal_coefficients() {
            let m = spec.m();
            let mut shells = Vec::new();
            let mut count = 0usize;
            for d in 0..=max_shell {
                let alphas = wt.shell(d);
                count += alphas.len();
                if count > MAX_DIAGONAL_MONOMIALS {
                    break;
                }
                let big_a = Self::homogeneity_of(spec, d);
                let norms = alphas
                    .iter()
                    .map(|a| {
                        a.entries()
                            .iter()
                            .zip(m)
                            .zip(c)
                            .map(|((&aj, &mj), &cj)| {
                                let x = (aj as f64 + 1.0) / mj as f64;
                                (PI / mj as f64).ln() + ln_gamma(x) - x * cj.ln()
                            })
                            .sum::<f64>()
                            - ln_gamma(big_a + 1.0)
                    })
                    .collect();
                shells.push(Shell { alphas, gram: ShellGram::Diagonal(norms) });
            }
            return Ok(Self { spec: spec.clone(), shells });
        }
        Self::dense(spec, max_shell, &CubatureRule::default())
    }

    fn dense(spec: &DomainSpec, max_shell: u64, rule: &CubatureRule) -> Result<Self> {
        let wt = spec.weights();
        let shells_alphas: Vec<Vec<MultiIndex>> = (0..=max_shell).map(|d| wt.shell(d)).collect();
        let mut offsets = Vec::new();
        let mut len = 0;
        for a in &shells_alphas {
            offsets.push(len);
            len += a.len() * a.len();
        }
        let nodes = bp_rule(spec.poly(), rule)?;
        let results = nodes.integrate_vec(
            len,
            &|w: &[Complex64], weight: f64, acc: &mut [Complex64]| {
                for (alphas, &off) in shells_alphas.iter().zip(&offsets) {
                    let v: Vec<Complex64> = alphas.iter().map(|a| a.monomial(w)).collect();
                    let k = v.len();
                    for i in 0..k {
                        let vi = v[i] * weight;
                        for j in 0..k {
                            acc[off + i * k + j] += vi * v[j].conj();
                        }
                    }
                }
            },
            rule.exec,
        );
        let mut shells = Vec::new();
        for (alphas, &off) in shells_alphas.into_iter().zip(&offsets) {
            let k = alphas.len();
            if k == 0 {
                shells.push(Shell { alphas, gram: ShellGram::Diagonal(vec![]) });
                continue;
            }
            let mut gram = DMatrix::<Complex64>::zeros(k, k);
            let mut error = 0.0f64;
            for i in 0..k {
                for j in 0..k {
                    gram[(i, j)] = results[off + i * k + j].value;
                    error = error.max(results[off + i * k + j].error_estimate);
                }
            }
            let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = herm.clone().symmetric_eigenvalues();
            let max = eig.iter().cloned().fold(f64::MIN, f64::max);
            let min = eig.iter().cloned().fold(f64::MAX, f64::min);
            let condition = if min > 0.0 { max / min } else { f64::INFINITY };
            if condition > MAX_CONDITION {
                return Err(Error::Conditioning(condition));
            }
            let chol = herm.clone().cholesky().ok_or(Error::Conditioning(condition))?.l();
            shells.push(Shell { alphas, gram: ShellGram::Dense { gram: herm, chol, error, condition } });
        }
        Ok(Self { spec: spec.clone(), shells })
    }

    /// A shared basis for `(spec, max_shell)`, built on first use.
    pub fn cached(spec: &DomainSpec, max_shell: u64) -> Result<Arc<Self>> {
        let key = (format!("{:?}", spec.poly()), max_shell);
        if let Some(b) = basis_cache().lock().expect("basis cache").get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(Self::new(spec, max_shell)?);
        Ok(basis_cache().lock().expect("basis cache").entry(key).or_insert(b).clone())
    }

    /// A basis covering every monomial of the given polynomials.
    pub fn for_polynomials<'a, I>(spec: &DomainSpec, polys: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = &'a HoloPolynomial>,
    {
        let wt = spec.weights();
        let mut top = 0;
        for q in polys {
            check_dim(spec.dim(), q.dim())?;
            for (a, _) in q.terms() {
                top = top.max(wt.shell_of(a));
            }
        }
        let cap = if spec.poly().diagonal_coefficients().is_some() { top.max(64) } else { top.max(DENSE_SHELLS) };
        Self::cached(spec, cap)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn is_diagonal(&self) -> bool {
        self.spec.poly().diagonal_coefficients().is_some()
    }

    pub fn max_shell(&self) -> u64 {
        self.shells.len() as u64 - 1
    }

    fn homogeneity_of(spec: &DomainSpec, d: u64) -> f64 {
        2.0 * d as f64 / spec.weights().shell_unit() as f64 + spec.inv_mu()
    }

    /// `A = 2·wt + 1/μ` for shell `d`.
    pub fn homogeneity(&self, d: u64) -> f64 {
        Self::homogeneity_of(&self.spec, d)
    }

    /// Condition number of the volume Gram block of shell `d` (1 when diagonal).
    pub fn condition_number(&self, d: u64) -> Option<f64> {
        self.shells.get(d as usize).map(|s| match &s.gram {
            ShellGram::Diagonal(norms) => {
                if norms.is_empty() {
                    1.0
                } else {
                    let max = norms.iter().cloned().fold(f64::MIN, f64::max);
                    let min = norms.iter().cloned().fold(f64::MAX, f64::min);
                    (max - min).exp()
                }
            }
            ShellGram::Dense { condition, .. } => *condition,
        })
    }

    /// Volume Gram block of shell `d` with its monomials.
    pub fn gram_block(&self, d: u64) -> Option<(Vec<MultiIndex>, DMatrix<Complex64>)> {
        let s = self.shells.get(d as usize)?;
        let g = match &s.gram {
            ShellGram::Diagonal(norms) => DMatrix::from_diagonal(&DVector::from_iterator(
                norms.len(),
                norms.iter().map(|l| Complex64::new(l.exp(), 0.0)),
            )),
            ShellGram::Dense { gram, .. } => gram.clone(),
        };
        Some((s.alphas.clone(), g))
    }

    fn coefficients(&self, q: &HoloPolynomial) -> Result<HashMap<u64, Vec<Complex64>>> {
        check_dim(self.spec.dim(), q.dim())?;
        let wt = self.spec.weights();
        let mut out: HashMap<u64, Vec<Complex64>> = HashMap::new();
        for (a, c) in q.terms() {
            let d = wt.shell_of(a);
            let shell = self
                .shells
                .get(d as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("monomial {:?} beyond the basis", a.entries())))?;
            let idx = shell.alphas.iter().position(|b| b == a).expect("shell enumerates every index");
            out.entry(d).or_insert_with(|| vec![Complex64::new(0.0, 0.0); shell.alphas.len()])[idx] += c;
        }
        Ok(out)
    }

    /// `∫_{B_p} q_j conj(q_k) dV` split by shell, with an error bound per shell.
    pub fn cross_forms(&self, qj: &HoloPolynomial, qk: &HoloPolynomial) -> Result<Vec<(u64, Complex64, f64)>> {
        let cj = self.coefficients(qj)?;
        let ck = self.coefficients(qk)?;
        let mut shells: Vec<u64> = cj.keys().filter(|d| ck.contains_key(d)).copied().collect();
        shells.sort_unstable();
        Ok(shells
            .into_iter()
            .map(|d| {
                let (x, y) = (&cj[&d], &ck[&d]);
                match &self.shells[d as usize].gram {
                    ShellGram::Diagonal(norms) => {
                        let v = x.iter().zip(y).zip(norms).map(|((a, b), l)| a * b.conj() * l.exp()).sum();
                        (d, v, 0.0)
                    }
                    ShellGram::Dense { gram, error, .. } => {
                        let mut v = Complex64::new(0.0, 0.0);
                        let mut e = 0.0;
                        for i in 0..x.len() {
                            for j in 0..y.len() {
                                v += x[i] * gram[(i, j)] * y[j].conj();
                                e += x[i].norm() * y[j].norm() * error;
                            }
                        }
                        (d, v, e)
                    }
                }
            })
            .collect())
    }

    /// `‖q‖²` under a fiber weight, with an error estimate.
    pub fn weighted_norm_sq(&self, q: &HoloPolynomial, weight: FiberWeight) -> Result<(f64, f64)> {
        weight.check()?;
        let mut v = 0.0;
        let mut e = 0.0;
        for (d, form, err) in self.cross_forms(q, q)? {
            let scale = weight.ln_moment(self.homogeneity(d)).exp();
            v += form.re * scale;
            e += err * scale;
        }
        Ok((v, e + 1e-15 * v))
    }

    /// Unweighted shell kernel `κ_d(w, W)` of the volume Gram block.
    fn shell_kernel(
        &self,
        d: usize,
        lw: &[Option<Complex64>],
        w: &[Complex64],
        big_w: &[Complex64],
        shift: Complex64,
    ) -> Complex64 {
        let s = &self.shells[d];
        match &s.gram {
            ShellGram::Diagonal(norms) => s
                .alphas
                .iter()
                .zip(norms)
                .map(|(a, l)| {
                    let mut log = -shift - l;
                    for (&aj, lj) in a.entries().iter().zip(lw) {
                        if aj == 0 {
                            continue;
                        }
                        match lj {
                            Some(x) => log += x * aj as f64,
                            None => return Complex64::new(0.0, 0.0),
                        }
                    }
                    log.exp()
                })
                .sum(),
            ShellGram::Dense { chol, .. } => {
                let v = DVector::from_iterator(s.alphas.len(), s.alphas.iter().map(|a| a.monomial(w)));
                let vw = DVector::from_iterator(s.alphas.len(), s.alphas.iter().map(|a| a.monomial(big_w)));
                let y = chol.solve_lower_triangular(&v).expect("nonsingular factor");
                let x = chol.solve_lower_triangular(&vw).expect("nonsingular factor");
                y.iter().zip(x.iter()).map(|(a, b)| a * b.conj()).sum::<Complex64>() * (-shift).exp()
            }
        }
    }

    /// Reproducing kernel of the fiber space, summed shell by shell until the
    /// geometric tail estimate drops below machine precision.
    pub fn kernel(&self, weight: FiberWeight, w: &[Complex64], big_w: &[Complex64]) -> Result<KernelEstimate> {
        weight.check()?;
        let (value, tail) = self.kernel_with(|a| Complex64::new(weight.ln_moment(a), 0.0), w, big_w)?;
        let method = if self.is_diagonal() { Method::Series } else { Method::Gram };
        Ok(KernelEstimate { value, error_estimate: tail, method })
    }

    /// `Σ_d κ_d(w, W)·exp(−ln_moment(A_d))` for an arbitrary (possibly complex)
    /// log-moment; returns the sum and its tail estimate.
    pub fn kernel_with<F>(&self, ln_moment: F, w: &[Complex64], big_w: &[Complex64]) -> Result<(Complex64, f64)>
    where
        F: Fn(f64) -> Complex64,
    {
        check_dim(self.spec.dim(), w.len())?;
        check_dim(self.spec.dim(), big_w.len())?;
        let lw: Vec<Option<Complex64>> = w
            .iter()
            .zip(big_w)
            .map(|(a, b)| {
                let x = a * b.conj();
                (x.norm() > 0.0).then(|| x.ln())
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut prev: Option<f64> = None;
        let mut tail = f64::INFINITY;
        for d in 0..self.shells.len() {
            if self.shells[d].alphas.is_empty() {
                continue;
            }
            let shift = ln_moment(self.homogeneity(d as u64));
            let term = self.shell_kernel(d, &lw, w, big_w, shift);
            sum += term;
            let b = term.norm();
            if let Some(pb) = prev {
                if b == 0.0 && pb == 0.0 {
                    tail = 0.0;
                    break;
                }
                let r = if pb > 0.0 { b / pb } else { f64::INFINITY };
                if r < 1.0 {
                    tail = b * r / (1.0 - r);
                    if tail <= 1e-17 * sum.norm() {
                        break;
                    }
                } else {
                    tail = f64::INFINITY;
                }
            }
            prev = Some(b);
        }
        if self.spec.dim() == 0 {
            tail = 0.0;
        }
        Ok((sum, tail))
    }
}

fn diagonal_unit_weights(spec: &DomainSpec) -> Option<&[f64]> {
    let c = spec.poly().diagonal_coefficients()?;
    (spec.dim() > 0 && spec.m().iter().all(|&mj| mj == 1)).then_some(c)
}

fn weighted_inner(c: &[f64], w: &[Complex64], big_w: &[Complex64]) -> Complex64 {
    c.iter().zip(w).zip(big_w).map(|((cj, a), b)| cj * a * b.conj()).sum()
}

fn series_basis(spec: &DomainSpec) -> Result<Arc<MonomialGramBasis>> {
    if spec.poly().diagonal_coefficients().is_some() {
        MonomialGramBasis::cached(spec, DIAGONAL_SHELLS)
    } else {
        MonomialGramBasis::cached(spec, DENSE_SHELLS)
    }
}

/// Kernel of `S_p(t)`; closed form `Π c_j (4t)^n e^{4πt Σ c_j w_j W̄_j}` when
/// every `m_j = 1`.
pub fn segal_bargmann_kernel(
    spec: &DomainSpec,
    t: f64,
    w: &[Complex64],
    big_w: &[Complex64],
) -> Result<KernelEstimate> {
    let weight = FiberWeight::SegalBargmann(t);
    weight.check()?;
    check_dim(spec.dim(), w.len())?;
    check_dim(spec.dim(), big_w.len())?;
    if spec.dim() == 0 {
        return Ok(KernelEstimate::exact(Complex64::new(1.0, 0.0), Method::ClosedForm));
    }
    if let Some(c) = diagonal_unit_weights(spec) {
        let n = spec.dim() as i32;
        let pref: f64 = c.iter().product::<f64>() * (4.0 * t).powi(n);
        let v = pref * (4.0 * PI * t * weighted_inner(c, w, big_w)).exp();
        return Ok(KernelEstimate::exact(v, Method::ClosedForm));
    }
    series_basis(spec)?.kernel(weight, w, big_w)
}

/// Kernel `Y_p(k; w, W)` of `W_p(k)`; closed form
/// `Π c_j (n+k+1)!/(πⁿ (k+1)!) (1 − Σ c_j w_j W̄_j)^{−(n+k+2)}` when every `m_j = 1`.
pub fn ellipsoid_fiber_kernel(
    spec: &DomainSpec,
    k: u32,
    w: &[Complex64],
    big_w: &[Complex64],
) -> Result<KernelEstimate> {
    spec.require_bp(w)?;
    spec.require_bp(big_w)?;
    if spec.dim() == 0 {
        return Ok(KernelEstimate::exact(Complex64::new(1.0, 0.0), Method::ClosedForm));
    }
    if let Some(c) = diagonal_unit_weights(spec) {
        let n = spec.dim() as f64;
        let kf = k as f64;
        let ln_pref = c.iter().map(|x| x.ln()).sum::<f64>() + ln_gamma(n + kf + 2.0) - ln_gamma(kf + 2.0) - n * PI.ln();
        let base = Complex64::new(1.0, 0.0) - weighted_inner(c, w, big_w);
        let v = (ln_pref - (n + kf + 2.0) * base.ln()).exp();
        return Ok(KernelEstimate::exact(v, Method::ClosedForm));
    }
    series_basis(spec)?.kernel(FiberWeight::EllipsoidPower(k), w, big_w)
}

/// Kernel `X_p(t; ζ, Z)` of `Q_p(t)`; for n = 0 the space is `C` with
/// `‖1‖² = λ(0, t)`.
pub fn lambda_fiber_kernel(
    spec: &DomainSpec,
    t: f64,
    zeta: &[Complex64],
    big_z: &[Complex64],
) -> Result<KernelEstimate> {
    spec.require_bp(zeta)?;
    spec.require_bp(big_z)?;
    if spec.dim() == 0 {
        let v = 1.0 / lambda_weight(0.0, t)?;
        return Ok(KernelEstimate::exact(Complex64::new(v, 0.0), Method::ClosedForm));
    }
    series_basis(spec)?.kernel(FiberWeight::Lambda(t), zeta, big_z)
}

/// Kernel of any fiber space through the Gram basis, without closed forms.
pub fn fiber_kernel_series(
    spec: &DomainSpec,
    weight: FiberWeight,
    w: &[Complex64],
    big_w: &[Complex64],
) -> Result<KernelEstimate> {
    if weight.on_ball() {
        spec.require_bp(w)?;
        spec.require_bp(big_w)?;
    }
    series_basis(spec)?.kernel(weight, w, big_w)
}

/// Squared norm of `w^α` in a fiber space for diagonal `p`.
pub fn monomial_norm_sq(spec: &DomainSpec, weight: FiberWeight, alpha: &MultiIndex) -> Result<f64> {
    weight.check()?;
    check_dim(spec.dim(), alpha.len())?;
    if spec.poly().diagonal_coefficients().is_none() {
        return Err(Error::InvalidArgument("closed-form monomial norms need a diagonal p".into()));
    }
    let d = spec.weights().shell_of(alpha);
    let basis = MonomialGramBasis::cached(spec, d)?;
    let q = HoloPolynomial::monomial(alpha.clone(), Complex64::new(1.0, 0.0));
    Ok(basis.weighted_norm_sq(&q, weight)?.0)
}

/// Smallest eigenvalue relative to the largest of the Hermitian matrix
/// `[K(x_i, x_j)]`.
pub fn gram_min_eigen_ratio(k: &DMatrix<Complex64>) -> f64 {
    let herm = (k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    min / max.abs().max(f64::MIN_POSITIVE)
}
