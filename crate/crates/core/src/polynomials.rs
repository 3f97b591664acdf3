//! Weighted homogeneous balanced polynomials and holomorphic polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub type Rational = Ratio<i64>;

const HERMITIAN_TOL: f64 = 1e-12;
const NONNEG_SAMPLES: usize = 10_000;
const NONNEG_TOL: f64 = 1e-10;

/// Multi-index α ∈ ℕⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `k·e_j` in dimension `n`.
    pub fn unit(n: usize, j: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[j] = k;
        Self(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        check_dim(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// `w^α`.
    pub fn monomial(&self, w: &[Complex64]) -> Complex64 {
        self.0.iter().zip(w).fold(Complex64::new(1.0, 0.0), |acc, (&a, &x)| acc * x.powu(a))
    }
}

/// The weight tuple m together with 1/μ and M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTuple {
    m: Vec<u32>,
    inv_mu: Rational,
    big_m: u64,
    shell_unit: u64,
}

impl WeightTuple {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.contains(&0) {
            return Err(Error::InvalidArgument("weights m_j must be positive".into()));
        }
        let inv_mu = m.iter().fold(Rational::from_integer(0), |acc, &x| acc + Rational::new(1, x as i64));
        let big_m = m.iter().fold(2u64, |acc, &x| acc.lcm(&(x as u64)));
        let shell_unit = m.iter().fold(2u64, |acc, &x| acc.lcm(&(2 * x as u64)));
        Ok(Self { m, inv_mu, big_m, shell_unit })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn inv_mu(&self) -> Rational {
        self.inv_mu
    }

    pub fn inv_mu_f64(&self) -> f64 {
        *self.inv_mu.numer() as f64 / *self.inv_mu.denom() as f64
    }

    pub fn big_m(&self) -> u64 {
        self.big_m
    }

    /// lcm(2m_1, …, 2m_n): every monomial weight is an integer multiple of
    /// `1/shell_unit`.
    pub fn shell_unit(&self) -> u64 {
        self.shell_unit
    }

    pub fn weight(&self, alpha: &MultiIndex) -> Result<Rational> {
        weight_of(alpha, self)
    }

    /// Integer shell index `wt(α)·shell_unit`.
    pub fn shell_of(&self, alpha: &MultiIndex) -> u64 {
        alpha.entries().iter().zip(&self.m).map(|(&a, &mj)| a as u64 * (self.shell_unit / (2 * mj as u64))).sum()
    }

    /// All multi-indices in shell `d`, in lexicographic order.
    pub fn shell(&self, d: u64) -> Vec<MultiIndex> {
        let steps: Vec<u64> = self.m.iter().map(|&mj| self.shell_unit / (2 * mj as u64)).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.m.len()];
        fn rec(j: usize, rem: u64, steps: &[u64], cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if j == steps.len() {
                if rem == 0 {
                    out.push(MultiIndex(cur.clone()));
                }
                return;
            }
            let mut a = 0u64;
            while a * steps[j] <= rem {
                cur[j] = a as u32;
                rec(j + 1, rem - a * steps[j], steps, cur, out);
                a += 1;
            }
            cur[j] = 0;
        }
        rec(0, d, &steps, &mut cur, &mut out);
        out
    }
}

/// `Σ α_i/(2 m_i)` as an exact rational.
pub fn weight_of(alpha: &MultiIndex, m: &WeightTuple) -> Result<Rational> {
    check_dim(m.dim(), alpha.len())?;
    Ok(alpha
        .entries()
        .iter()
        .zip(m.m())
        .fold(Rational::from_integer(0), |acc, (&a, &mj)| acc + Rational::new(a as i64, 2 * mj as i64)))
}

/// One term `c·w^α·w̄^β` of a balanced polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub c: Complex64,
}

/// A real, nonnegative, weighted homogeneous balanced polynomial
/// `p(w) = Σ C_{αβ} w^α w̄^β` with `wt(α) = wt(β) = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedPolynomial {
    m: WeightTuple,
    terms: Vec<Term>,
    diagonal: Option<Vec<f64>>,
}

impl BalancedPolynomial {
    /// Validates weights, Hermitian symmetry and sampled nonnegativity.
    pub fn new(m: WeightTuple, terms: Vec<Term>) -> Result<Self> {
        let terms = merge_terms(&m, terms)?;
        for t in &terms {
            let mirror = terms.iter().find(|u| u.alpha == t.beta && u.beta == t.alpha);
            match mirror {
                Some(u) if (u.c - t.c.conj()).norm() <= HERMITIAN_TOL * t.c.norm().max(1.0) => {}
                _ => {
                    return Err(Error::InvalidPolynomial(format!(
                        "term {:?},{:?} has no Hermitian mirror",
                        t.alpha.entries(),
                        t.beta.entries()
                    )))
                }
            }
        }
        let diagonal = detect_diagonal(&m, &terms);
        let p = Self { m, terms, diagonal };
        p.check_nonnegative()?;
        Ok(p)
    }

    /// Like [`BalancedPolynomial::new`], but first adds the missing mirror
    /// term `(β, α, conj c)` of every term that lacks one. Returns the number
    /// of added terms.
    pub fn with_hermitian_completion(m: WeightTuple, terms: Vec<Term>) -> Result<(Self, usize)> {
        let merged = merge_terms(&m, terms)?;
        let mut extra = Vec::new();
        for t in &merged {
            if t.alpha != t.beta && !merged.iter().any(|u| u.alpha == t.beta && u.beta == t.alpha) {
                extra.push(Term { alpha: t.beta.clone(), beta: t.alpha.clone(), c: t.c.conj() });
            }
        }
        let added = extra.len();
        let mut all = merged;
        all.extend(extra);
        Ok((Self::new(m, all)?, added))
    }

    /// `Σ c_j |w_j|^{2 m_j}` with all `c_j > 0`.
    pub fn diagonal(m: WeightTuple, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(m.dim(), coeffs.len())?;
        if coeffs.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::InvalidPolynomial("diagonal coefficients must be positive".into()));
        }
        let n = m.dim();
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let a = MultiIndex::unit(n, j, m.m()[j]);
                Term { alpha: a.clone(), beta: a, c: Complex64::new(c, 0.0) }
            })
            .collect();
        Self::new(m, terms)
    }

    /// `Σ |w_j|^{2 m_j}`.
    pub fn standard(m: Vec<u32>) -> Result<Self> {
        let n = m.len();
        Self::diagonal(WeightTuple::new(m)?, vec![1.0; n])
    }

    /// The n = 0 polynomial `p ≡ 0`.
    pub fn zero() -> Self {
        Self { m: WeightTuple::new(vec![]).expect("empty tuple"), terms: vec![], diagonal: Some(vec![]) }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn weights(&self) -> &WeightTuple {
        &self.m
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Coefficients `c_j` when `p = Σ c_j |w_j|^{2 m_j}`.
    pub fn diagonal_coefficients(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn raw_eval(&self, w: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.c * t.alpha.monomial(w) * t.beta.monomial(w).conj()).sum()
    }

    /// Evaluates `p(w)` without dimension checks.
    pub fn eval(&self, w: &[Complex64]) -> f64 {
        if let Some(c) = &self.diagonal {
            return c.iter().zip(self.m.m()).zip(w).map(|((&cj, &mj), x)| cj * x.norm_sqr().powi(mj as i32)).sum();
        }
        self.raw_eval(w).re
    }

    /// Polarization `p̃(w, W) = Σ C_{αβ} w^α conj(W)^β`, so `p̃(w, w) = p(w)`.
    pub fn polarized(&self, w: &[Complex64], big_w: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.c * t.alpha.monomial(w) * t.beta.monomial(big_w).conj()).sum()
    }

    /// `Σ |C_{αβ}| |w^α| |w^β|`, an upper bound for `|p̃|` used for scaling.
    pub fn magnitude(&self, w: &[Complex64]) -> f64 {
        self.terms.iter().map(|t| t.c.norm() * t.alpha.monomial(w).norm() * t.beta.monomial(w).norm()).sum()
    }

    fn check_nonnegative(&self) -> Result<()> {
        if self.diagonal.is_some() || self.dim() == 0 {
            return Ok(());
        }
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e6f6e6e);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for s in 0..NONNEG_SAMPLES {
            let radius = 2f64.powi((s % 7) as i32 - 2);
            for x in w.iter_mut() {
                let r = radius * rng.random::<f64>().sqrt();
                let th = std::f64::consts::TAU * rng.random::<f64>();
                *x = Complex64::from_polar(r, th);
            }
            let v = self.raw_eval(&w).re;
            if v < -NONNEG_TOL * self.magnitude(&w).max(1.0) {
                return Err(Error::InvalidPolynomial(format!("p takes the negative value {v:e} at a sampled point")));
            }
        }
        Ok(())
    }

    /// Parses the JSON encoding `{"m": [...], "terms": [{"alpha", "beta", "c": [re, im]}]}`,
    /// applying Hermitian completion. Returns the number of completed terms.
    pub fn from_json_str(s: &str) -> Result<(Self, usize)> {
        let raw: PolynomialJson = serde_json::from_str(s)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        raw.build()
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            m: self.m.m().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson { alpha: t.alpha.clone(), beta: t.beta.clone(), c: [t.c.re, t.c.im] })
                .collect(),
        }
    }
}

/// Serialized form of a balanced polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub m: Vec<u32>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub c: [f64; 2],
}

impl PolynomialJson {
    pub fn build(&self) -> Result<(BalancedPolynomial, usize)> {
        let m = WeightTuple::new(self.m.clone())?;
        let terms = self
            .terms
            .iter()
            .map(|t| Term { alpha: t.alpha.clone(), beta: t.beta.clone(), c: Complex64::new(t.c[0], t.c[1]) })
            .collect();
        BalancedPolynomial::with_hermitian_completion(m, terms)
    }
}

fn merge_terms(m: &WeightTuple, terms: Vec<Term>) -> Result<Vec<Term>> {
    let half = Rational::new(1, 2);
    let mut map: BTreeMap<(MultiIndex, MultiIndex), Complex64> = BTreeMap::new();
    for t in terms {
        if weight_of(&t.alpha, m)? != half || weight_of(&t.beta, m)? != half {
            return Err(Error::InvalidPolynomial(format!(
                "term {:?},{:?} is not balanced (weights must be 1/2)",
                t.alpha.entries(),
                t.beta.entries()
            )));
        }
        if !(t.c.re.is_finite() && t.c.im.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        *map.entry((t.alpha, t.beta)).or_insert(Complex64::new(0.0, 0.0)) += t.c;
    }
    Ok(map
        .into_iter()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .map(|((alpha, beta), c)| Term { alpha, beta, c })
        .collect())
}

fn detect_diagonal(m: &WeightTuple, terms: &[Term]) -> Option<Vec<f64>> {
    let n = m.dim();
    let mut coeffs = vec![0.0; n];
    for t in terms {
        if t.alpha != t.beta || t.c.im != 0.0 || t.c.re <= 0.0 {
            return None;
        }
        let nz: Vec<usize> = (0..n).filter(|&j| t.alpha.entries()[j] > 0).collect();
        if nz.len() != 1 {
            return None;
        }
        coeffs[nz[0]] = t.c.re;
    }
    coeffs.iter().all(|&c| c > 0.0).then_some(coeffs)
}

/// Evaluates `p(w)` with dimension and reality checks.
pub fn eval_p(p: &BalancedPolynomial, w: &[Complex64]) -> Result<f64> {
    check_dim(p.dim(), w.len())?;
    let raw = p.raw_eval(w);
    if raw.im.abs() > HERMITIAN_TOL * raw.norm().max(p.magnitude(w)) {
        return Err(Error::InvalidPolynomial(format!("p has imaginary part {:e}", raw.im)));
    }
    Ok(raw.re)
}

/// `ρ̂_θ w` for real `θ > 0`.
pub(crate) fn rho_hat_real(theta: f64, w: &[Complex64], m: &[u32]) -> Vec<Complex64> {
    w.iter().zip(m).map(|(x, &mj)| x * theta.powf(1.0 / (2.0 * mj as f64))).collect()
}

/// Checks `p(ρ̂_θ w) = θ p(w)`.
pub fn check_scaling_identity(p: &BalancedPolynomial, theta: f64, w: &[Complex64], tol: f64) -> bool {
    if !(theta > 0.0) || w.len() != p.dim() {
        return false;
    }
    let lhs = p.eval(&rho_hat_real(theta, w, p.weights().m()));
    let base = p.eval(w);
    (lhs - theta * base).abs() <= tol * (1.0 + theta * base.abs())
}

/// A holomorphic polynomial `q(w) = Σ c_α w^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloPolynomial {
    dim: usize,
    terms: Vec<(MultiIndex, Complex64)>,
}

impl HoloPolynomial {
    /// Merges repeated multi-indices; terms are kept sorted.
    pub fn new(dim: usize, terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, c) in terms {
            check_dim(dim, a.len())?;
            *map.entry(a).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self { dim, terms: map.into_iter().filter(|(_, c)| c.norm() != 0.0).collect() })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: vec![] }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::monomial(MultiIndex::zeros(dim), c)
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let dim = alpha.len();
        let terms = if c.norm() == 0.0 { vec![] } else { vec![(alpha, c)] };
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.iter().find(|(a, _)| a == alpha).map(|(_, c)| *c).unwrap_or_default()
    }

    pub fn eval(&self, w: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(a, c)| c * a.monomial(w)).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, terms: self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect() }
    }

    pub fn add(&self, other: &HoloPolynomial) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Self::new(self.dim, self.terms.iter().chain(&other.terms).cloned().collect())
    }
}

/// Buckets the monomials of `q` by weighted degree. Keys are the exact
/// rationals `wt(α)·M`, which are integers whenever `wt(α)` is a multiple of `1/M`.
pub fn homogeneous_decompose(q: &HoloPolynomial, m: &WeightTuple) -> Result<BTreeMap<Rational, HoloPolynomial>> {
    check_dim(m.dim(), q.dim())?;
    let big_m = Rational::from_integer(m.big_m() as i64);
    let mut buckets: BTreeMap<Rational, Vec<(MultiIndex, Complex64)>> = BTreeMap::new();
    for (a, c) in q.terms() {
        let key = weight_of(a, m)? * big_m;
        buckets.entry(key).or_default().push((a.clone(), *c));
    }
    buckets.into_iter().map(|(k, terms)| Ok((k, HoloPolynomial::new(q.dim(), terms)?))).collect()
}
