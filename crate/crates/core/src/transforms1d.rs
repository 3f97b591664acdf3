//! The strip and sector Paley-Wiener transforms: forward maps on
//! exponential-polynomial profiles, numerical inversion along horizontal
//! lines, and `A²` norms over strips and sectors.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::quad::rules::{exp_sinh_nodes, tanh_sinh_nodes};
use crate::quad::{
    gauss_legendre, integrate_halfline, integrate_halfline_real, integrate_interval, integrate_line, HalflineRule,
    LineRule, QuadratureResult,
};
use crate::weights::{omega, StripWeight};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One summand of a [`Profile1D`].
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    /// `c·t^a·e^{−bt}` for `t > 0`.
    OneSided { c: Complex64, a: f64, b: Complex64 },
    /// `c·(−t)^a·e^{bt}` for `t < 0`.
    Reflected { c: Complex64, a: f64, b: Complex64 },
    /// `c·e^{2πiνt}` on `[lo, hi]`.
    Box { c: Complex64, lo: f64, hi: f64, nu: f64 },
    /// `c·t^k·e^{−σ(t−t₀)²}·e^{2πiνt}`.
    Gaussian { c: Complex64, k: u32, sigma: f64, center: f64, nu: f64 },
}

/// `(e^x − 1)/x` for complex `x`.
fn expm1_over(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=7 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

impl Piece {
    pub fn eval(&self, t: f64) -> Complex64 {
        match *self {
            Piece::OneSided { c, a, b } => {
                if t > 0.0 {
                    c * t.powf(a) * (-b * t).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Piece::Reflected { c, a, b } => {
                if t < 0.0 {
                    c * (-t).powf(a) * (b * t).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Piece::Box { c, lo, hi, nu } => {
                if t >= lo && t <= hi {
                    c * Complex64::from_polar(1.0, TAU * nu * t)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Piece::Gaussian { c, k, sigma, center, nu } => {
                let d = t - center;
                c * t.powi(k as i32) * (-sigma * d * d).exp() * Complex64::from_polar(1.0, TAU * nu * t)
            }
        }
    }

    /// `∫ piece(t) e^{2πizt} dt` in closed form.
    pub fn forward_closed(&self, z: Complex64) -> Complex64 {
        match *self {
            Piece::OneSided { c, a, b } => c * gamma(a + 1.0) * (b - TAU * I * z).powf(-(a + 1.0)),
            Piece::Reflected { c, a, b } => c * gamma(a + 1.0) * (b + TAU * I * z).powf(-(a + 1.0)),
            Piece::Box { c, lo, hi, nu } => {
                let kappa = TAU * I * (z + nu);
                c * (kappa * lo).exp() * (hi - lo) * expm1_over(kappa * (hi - lo))
            }
            Piece::Gaussian { c, k, sigma, center, nu } => {
                // Shifted Gaussian moments: mean t₀ + iκ/(2σ), variance 1/(2σ).
                let kappa = TAU * (z + nu);
                let mean = center + I * kappa / (2.0 * sigma);
                let mut moment = Complex64::new(0.0, 0.0);
                let mut binom = 1.0;
                let mut dfact = 1.0;
                for j in 0..=k {
                    if j > 0 {
                        binom *= (k - j + 1) as f64 / j as f64;
                    }
                    if j % 2 == 0 {
                        if j >= 2 {
                            dfact *= (j - 1) as f64;
                        }
                        moment += binom * mean.powu(k - j) * dfact * (2.0 * sigma).powf(-(j as f64) / 2.0);
                    }
                }
                c * (PI / sigma).sqrt() * (I * kappa * center - kappa * kappa / (4.0 * sigma)).exp() * moment
            }
        }
    }

    /// `∫ piece(t) e^{2πizt} dt` by quadrature.
    pub fn forward_numeric(&self, z: Complex64) -> Result<QuadratureResult> {
        let rule = |a: f64| {
            if a.fract() == 0.0 {
                HalflineRule::GaussLaguerre
            } else {
                HalflineRule::DoubleExponential { scale: 1.0 }
            }
        };
        match *self {
            Piece::OneSided { c, a, b } => integrate_halfline(|t| c * t.powf(a), b - TAU * I * z, rule(a)),
            Piece::Reflected { c, a, b } => integrate_halfline(|t| c * t.powf(a), b + TAU * I * z, rule(a)),
            Piece::Box { lo, hi, .. } => Ok(integrate_interval(|t| self.eval(t) * (TAU * I * z * t).exp(), lo, hi)),
            Piece::Gaussian { sigma, center, .. } => {
                let half = 12.0 / sigma.sqrt();
                let rule = LineRule {
                    lower: center - half,
                    upper: center + half,
                    panel_width: 0.5 / sigma.sqrt(),
                    nodes: 24,
                    breakpoints: vec![],
                };
                Ok(integrate_line(|t| self.eval(t) * (TAU * I * z * t).exp(), &rule, ExecMode::Sequential))
            }
        }
    }

    /// Multiplication by `e^{2πiθt}`.
    pub fn modulate(&self, theta: f64) -> Piece {
        match *self {
            Piece::OneSided { c, a, b } => Piece::OneSided { c, a, b: b - TAU * I * theta },
            Piece::Reflected { c, a, b } => Piece::Reflected { c, a, b: b + TAU * I * theta },
            Piece::Box { c, lo, hi, nu } => Piece::Box { c, lo, hi, nu: nu + theta },
            Piece::Gaussian { c, k, sigma, center, nu } => Piece::Gaussian { c, k, sigma, center, nu: nu + theta },
        }
    }

    pub fn scale(&self, s: Complex64) -> Piece {
        let mut p = self.clone();
        match &mut p {
            Piece::OneSided { c, .. }
            | Piece::Reflected { c, .. }
            | Piece::Box { c, .. }
            | Piece::Gaussian { c, .. } => *c *= s,
        }
        p
    }

    fn coefficient(&self) -> Complex64 {
        match *self {
            Piece::OneSided { c, .. }
            | Piece::Reflected { c, .. }
            | Piece::Box { c, .. }
            | Piece::Gaussian { c, .. } => c,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Piece::OneSided { a, b, .. } | Piece::Reflected { a, b, .. } => a >= 0.0 && a.is_finite() && b.re > 0.0,
            Piece::Box { lo, hi, nu, .. } => lo < hi && lo.is_finite() && hi.is_finite() && nu.is_finite(),
            Piece::Gaussian { sigma, center, nu, .. } => sigma > 0.0 && center.is_finite() && nu.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid profile piece {self:?}")))
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Piece::OneSided { .. } => (0.0, f64::INFINITY),
            Piece::Reflected { .. } => (f64::NEG_INFINITY, 0.0),
            Piece::Box { lo, hi, .. } => (lo, hi),
            Piece::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match *self {
            Piece::OneSided { .. } | Piece::Reflected { .. } => out.push(0.0),
            Piece::Box { lo, hi, .. } => out.extend([lo, hi]),
            Piece::Gaussian { sigma, center, .. } => {
                let s = 1.0 / sigma.sqrt();
                out.extend([center - 6.0 * s, center, center + 6.0 * s]);
            }
        }
    }

    /// Length scale of the decay towards `+∞` (`right`) or `−∞`.
    fn tail_scale(&self, right: bool) -> Option<f64> {
        match *self {
            Piece::OneSided { b, .. } if right => Some(1.0 / b.re),
            Piece::Reflected { b, .. } if !right => Some(1.0 / b.re),
            Piece::Gaussian { sigma, .. } => Some(1.0 / sigma.sqrt()),
            _ => None,
        }
    }

    fn is_exp_poly(&self) -> bool {
        matches!(self, Piece::OneSided { .. } | Piece::Reflected { .. })
    }
}

/// A finite sum of [`Piece`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Profile1D {
    pieces: Vec<Piece>,
}

impl Profile1D {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            p.validate()?;
        }
        Ok(Self { pieces: pieces.into_iter().filter(|p| p.coefficient().norm() != 0.0).collect() })
    }

    pub fn zero() -> Self {
        Self { pieces: vec![] }
    }

    /// `c·t^a·e^{−bt}` on `t > 0`.
    pub fn one_sided(c: Complex64, a: f64, b: Complex64) -> Result<Self> {
        Self::new(vec![Piece::OneSided { c, a, b }])
    }

    pub fn reflected(c: Complex64, a: f64, b: Complex64) -> Result<Self> {
        Self::new(vec![Piece::Reflected { c, a, b }])
    }

    pub fn boxcar(c: Complex64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Piece::Box { c, lo, hi, nu: 0.0 }])
    }

    pub fn gaussian(c: Complex64, k: u32, sigma: f64, center: f64) -> Result<Self> {
        Self::new(vec![Piece::Gaussian { c, k, sigma, center, nu: 0.0 }])
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Profile1D>>(items: I) -> Self {
        Self { pieces: items.into_iter().flat_map(|p| p.pieces.iter().cloned()).collect() }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.pieces.iter().map(|p| p.eval(t)).sum()
    }

    pub fn add(&self, other: &Profile1D) -> Self {
        Self::sum([self, other])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s.norm() == 0.0 {
            return Self::zero();
        }
        Self { pieces: self.pieces.iter().map(|p| p.scale(s)).collect() }
    }

    /// `t ↦ e^{2πiθt} f(t)`.
    pub fn modulate(&self, theta: f64) -> Self {
        Self { pieces: self.pieces.iter().map(|p| p.modulate(theta)).collect() }
    }

    /// `∫ f(t) e^{2πizt} dt` in closed form.
    pub fn forward(&self, z: Complex64) -> Complex64 {
        self.pieces.iter().map(|p| p.forward_closed(z)).sum()
    }

    pub fn is_exp_poly(&self) -> bool {
        self.pieces.iter().all(Piece::is_exp_poly)
    }

    /// `(inf, sup)` of the support.
    pub fn support(&self) -> (f64, f64) {
        self.pieces
            .iter()
            .map(Piece::support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    /// `∫ |f|² ω_{a,b} dt`; closed form for exponential-polynomial profiles.
    pub fn norm_sq(&self, w: StripWeight) -> Result<f64> {
        if self.is_exp_poly() {
            let mut total = Complex64::new(0.0, 0.0);
            for x in &self.pieces {
                for y in &self.pieces {
                    total += exp_poly_pair(x, y, w)?;
                }
            }
            return Ok(total.re);
        }
        self.check_weight_integrable(w)?;
        let r = self.norm_sq_numeric(w);
        Ok(r.value.re)
    }

    /// `∫ |f|² ω_{a,b} dt` by quadrature.
    pub fn norm_sq_numeric(&self, w: StripWeight) -> QuadratureResult {
        integrate_against(self, self, |t| omega(w.a, w.b, t).unwrap_or(0.0))
    }

    fn check_weight_integrable(&self, w: StripWeight) -> Result<()> {
        for p in &self.pieces {
            match *p {
                Piece::OneSided { a, b, .. } => {
                    if !(2.0 * b.re + 4.0 * PI * w.a > 0.0) {
                        return Err(Error::NotInSpace(format!("e^(-{b}t) decays too slowly for the weight")));
                    }
                    if w.is_half_infinite() && a == 0.0 {
                        return Err(Error::NotInSpace("profile must vanish at t = 0 for a half-infinite strip".into()));
                    }
                }
                Piece::Reflected { b, .. } => {
                    if w.is_half_infinite() {
                        return Err(Error::NotInSpace("negative-t support with a half-infinite strip".into()));
                    }
                    if !(2.0 * b.re - 4.0 * PI * w.b > 0.0) {
                        return Err(Error::NotInSpace(format!("e^({b}t) decays too slowly for the weight")));
                    }
                }
                Piece::Box { lo, .. } => {
                    if w.is_half_infinite() && lo <= 0.0 {
                        return Err(Error::NotInSpace(
                            "box support must lie in t > 0 for a half-infinite strip".into(),
                        ));
                    }
                }
                Piece::Gaussian { .. } => {
                    if w.is_half_infinite() {
                        return Err(Error::NotInSpace("Gaussian profiles need a finite strip".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `∫ x(t) conj(y(t)) ω_{a,b}(t) dt` for exponential pieces.
fn exp_poly_pair(x: &Piece, y: &Piece, w: StripWeight) -> Result<Complex64> {
    let four_pi = 4.0 * PI;
    let (c1, a1, b1, c2, a2, b2, reflected) = match (x, y) {
        (Piece::OneSided { c: c1, a: a1, b: b1 }, Piece::OneSided { c: c2, a: a2, b: b2 }) => {
            (c1, a1, b1, c2, a2, b2, false)
        }
        (Piece::Reflected { c: c1, a: a1, b: b1 }, Piece::Reflected { c: c2, a: a2, b: b2 }) => {
            (c1, a1, b1, c2, a2, b2, true)
        }
        (Piece::OneSided { .. }, Piece::Reflected { .. }) | (Piece::Reflected { .. }, Piece::OneSided { .. }) => {
            return Ok(Complex64::new(0.0, 0.0))
        }
        _ => unreachable!("exponential pieces only"),
    };
    let s = a1 + a2;
    let beta = b1 + b2.conj();
    let coef = c1 * c2.conj() / four_pi;
    // ∫_0^∞ u^{s−1} (e^{−p u} − e^{−q u}) du with p, q the two decay rates.
    let (p, q) = if reflected {
        if w.is_half_infinite() {
            return Err(Error::NotInSpace("negative-t support with a half-infinite strip".into()));
        }
        (beta - four_pi * w.b, Some(beta - four_pi * w.a))
    } else {
        (beta + four_pi * w.a, if w.is_half_infinite() { None } else { Some(beta + four_pi * w.b) })
    };
    if !(p.re > 0.0) {
        return Err(Error::NotInSpace(format!("profile decay {beta} too slow for the weight")));
    }
    if s == 0.0 {
        return match q {
            None => Err(Error::NotInSpace("profile must vanish at t = 0 for a half-infinite strip".into())),
            Some(q) => Ok(coef * (q.ln() - p.ln())),
        };
    }
    let g = ln_gamma(s);
    let first = (g - s * p.ln()).exp();
    let second = q.map(|q| (g - s * q.ln()).exp()).unwrap_or_default();
    Ok(coef * (first - second))
}

/// Quadrature over the support of `f` split at its breakpoints: tanh-sinh on
/// finite segments, exp-sinh on infinite tails. `g` is the full integrand.
pub fn integrate_layout<G>(f: &Profile1D, g: G) -> QuadratureResult
where
    G: Fn(f64) -> Complex64,
{
    let (lo, hi) = f.support();
    if f.is_zero() || !(lo < hi) {
        return QuadratureResult::zero();
    }
    let mut pts = Vec::new();
    for p in &f.pieces {
        p.breakpoints(&mut pts);
    }
    pts.retain(|x| x.is_finite() && (lo == f64::NEG_INFINITY || *x >= lo) && (hi == f64::INFINITY || *x <= hi));
    if lo.is_finite() {
        pts.push(lo);
    }
    if hi.is_finite() {
        pts.push(hi);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    let mut total = QuadratureResult::zero();
    let mut add = |r: QuadratureResult| {
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.nodes_used += r.nodes_used;
    };
    for seg in pts.windows(2) {
        add(integrate_interval(&g, seg[0], seg[1]));
    }
    let scale =
        |right: bool| f.pieces.iter().filter_map(|p| p.tail_scale(right)).fold(f64::INFINITY, f64::min).min(1.0);
    if hi == f64::INFINITY {
        let start = *pts.last().expect("nonempty");
        add(integrate_halfline_real(|u| g(start + u), scale(true)));
    }
    if lo == f64::NEG_INFINITY {
        let start = pts[0];
        add(integrate_halfline_real(|u| g(start - u), scale(false)));
    }
    total
}

/// `∫ f(t) conj(g(t)) weight(t) dt` over the union of both supports.
pub fn integrate_against<W>(f: &Profile1D, g: &Profile1D, weight: W) -> QuadratureResult
where
    W: Fn(f64) -> f64,
{
    let layout = Profile1D::sum([f, g]);
    integrate_layout(&layout, |t| {
        let v = f.eval(t) * g.eval(t).conj();
        if v.norm() == 0.0 {
            v
        } else {
            v * weight(t)
        }
    })
}

/// A strip `{a < Im z < b}` or a sector `{a < arg z < b}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region1D {
    Strip { a: f64, b: f64 },
    Sector { a: f64, b: f64 },
}

impl Region1D {
    pub fn strip(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("strip needs finite a < b, got ({a}, {b})")));
        }
        Ok(Region1D::Strip { a, b })
    }

    pub fn sector(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a < -PI || b > PI {
            return Err(Error::InvalidArgument(format!("sector needs −π ≤ a < b ≤ π, got ({a}, {b})")));
        }
        Ok(Region1D::Sector { a, b })
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Region1D::Strip { a, b } | Region1D::Sector { a, b } => (a, b),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region1D::Strip { a, b } => z.im > a && z.im < b,
            Region1D::Sector { a, b } => z.norm() > 0.0 && z.arg() > a && z.arg() < b,
        }
    }

    pub fn weight(&self) -> StripWeight {
        let (a, b) = self.bounds();
        StripWeight { a, b }
    }
}

type Holo = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A holomorphic function on a strip or sector.
#[derive(Clone)]
pub struct HoloFunction1D {
    region: Region1D,
    f: Holo,
    closed_form: bool,
}

impl std::fmt::Debug for HoloFunction1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HoloFunction1D").field("region", &self.region).field("closed_form", &self.closed_form).finish()
    }
}

impl HoloFunction1D {
    pub fn new<F>(region: Region1D, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { region, f: Arc::new(f), closed_form: false }
    }

    pub fn region(&self) -> Region1D {
        self.region
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !self.region.contains(z) {
            return Err(Error::Domain(format!("{z} outside {:?}", self.region)));
        }
        Ok((self.f)(z))
    }

    /// Evaluation without the region check (used on contours inside the region).
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
}

/// `T_S f(z) = ∫ f(t) e^{2πizt} dt` on the strip `(a, b)`.
pub fn strip_forward(f: &Profile1D, a: f64, b: f64) -> Result<HoloFunction1D> {
    let region = Region1D::strip(a, b)?;
    f.norm_sq(region.weight())?;
    let g = f.clone();
    Ok(HoloFunction1D { region, f: Arc::new(move |z| g.forward(z)), closed_form: true })
}

/// `T_S f(z)` by quadrature, one piece at a time.
pub fn strip_forward_numeric(f: &Profile1D, z: Complex64) -> Result<QuadratureResult> {
    let mut out = QuadratureResult::zero();
    for p in &f.pieces {
        let r = p.forward_numeric(z)?;
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.nodes_used += r.nodes_used;
    }
    Ok(out)
}

/// `T_V f(z) = ∫ f(t) z^{2πit}/z dt` on the sector `(a, b)`, evaluated as
/// `T_S f(Log z)/z`.
pub fn sector_forward(f: &Profile1D, a: f64, b: f64) -> Result<HoloFunction1D> {
    let region = Region1D::sector(a, b)?;
    f.norm_sq(region.weight())?;
    let g = f.clone();
    Ok(HoloFunction1D { region, f: Arc::new(move |z| g.forward(z.ln()) / z), closed_form: true })
}

/// `∫ f(t) e^{2πit Log z}/z dt` by quadrature over the profile's support.
pub fn sector_forward_direct(f: &Profile1D, z: Complex64) -> QuadratureResult {
    let lz = z.ln();
    let mut r = integrate_layout(f, |t| f.eval(t) * (TAU * I * t * lz).exp());
    r.value /= z;
    r.error_estimate /= z.norm();
    r
}

/// A profile sampled on a grid, with per-point error estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
}

impl SampledProfile {
    /// `max_i |values_i − f(t_i)|`.
    pub fn sup_error(&self, f: &Profile1D) -> f64 {
        self.t.iter().zip(&self.values).map(|(&t, v)| (v - f.eval(t)).norm()).fold(0.0, f64::max)
    }

    pub fn max_error_estimate(&self) -> f64 {
        self.errors.iter().cloned().fold(0.0, f64::max)
    }
}

/// Settings of the line inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseOptions {
    /// Minimal half-width of the `x`-window.
    pub window: f64,
    pub nodes: usize,
    /// Terms of the asymptotic tail correction.
    pub tail_terms: usize,
    pub exec: ExecMode,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { window: 20.0, nodes: 16, tail_terms: 6, exec: ExecMode::default() }
    }
}

/// Derivatives `g^{(k)}(x0)`, `k = 0..=kmax`, by the Cauchy integral on a
/// circle of radius `r`.
fn cauchy_derivatives<G: Fn(Complex64) -> Complex64>(g: &G, x0: Complex64, r: f64, kmax: usize) -> Vec<Complex64> {
    let n = 64;
    let samples: Vec<Complex64> = (0..n).map(|j| g(x0 + Complex64::from_polar(r, TAU * j as f64 / n as f64))).collect();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut fact = 1.0;
    for k in 0..=kmax {
        if k > 0 {
            fact *= k as f64;
        }
        let s: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, v)| v * Complex64::from_polar(1.0, -TAU * (j * k) as f64 / n as f64))
            .sum();
        out.push(s / n as f64 * fact / r.powi(k as i32));
    }
    out
}

/// `∫_{±T}^{±∞} G(x) e^{−iωx} dx` by repeated integration by parts.
fn oscillatory_tail(derivs: &[Complex64], omega: f64, edge: f64, right: bool) -> (Complex64, f64) {
    let iw = Complex64::new(0.0, omega);
    let phase = (-iw * edge).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = iw;
    let mut last = 0.0;
    let k = derivs.len() - 1;
    for d in &derivs[..k] {
        let term = d * phase / pow;
        sum += term;
        pow *= iw;
        last = term.norm();
    }
    let next = (derivs[k] * phase / pow).norm();
    let sign = if right { 1.0 } else { -1.0 };
    let _ = last;
    (sum * sign, next)
}

/// `f(t) = e^{2πct} ∫ G(x + ic) e^{−2πixt} dx` at each `t`. `G` must be
/// holomorphic on the strip `(a, b) ∋ c` and decay along horizontal lines.
pub fn line_inverse<G>(g: G, a: f64, b: f64, c: f64, ts: &[f64], opts: &InverseOptions) -> Result<SampledProfile>
where
    G: Fn(Complex64) -> Complex64 + Sync + Send,
{
    if !(c > a && c < b) {
        return Err(Error::InvalidArgument(format!("c = {c} must lie inside ({a}, {b})")));
    }
    let dist = (c - a).min(b - c);
    let radius = 0.5 * dist.min(1.0);
    let rule = gauss_legendre(opts.nodes.max(2));
    let coarse = gauss_legendre((opts.nodes / 2).max(1));
    let results = exec::map_slice(opts.exec, ts, |&t| -> Result<(Complex64, f64)> {
        if t == 0.0 {
            return Err(Error::Accuracy("the inversion integral is not absolutely convergent at t = 0".into()));
        }
        let omega = TAU * t;
        let width = 0.25 / t.abs();
        let big_t = opts.window.max(40.0 / t.abs());
        let h = |x: f64| g(Complex64::new(x, c)) * Complex64::from_polar(1.0, -omega * x);
        let mut fine = Complex64::new(0.0, 0.0);
        let mut rough = Complex64::new(0.0, 0.0);
        let mut x = 0.0;
        while x < big_t {
            let step = width.min(0.5 * dist + 0.25 * x);
            let hi = (x + step).min(big_t);
            for side in [1.0, -1.0] {
                let (lo_s, hi_s) = if side > 0.0 { (x, hi) } else { (-hi, -x) };
                let mid = 0.5 * (lo_s + hi_s);
                let half = 0.5 * (hi_s - lo_s);
                fine += rule.iter().map(|&(u, w)| h(mid + half * u) * w).sum::<Complex64>() * half;
                rough += coarse.iter().map(|&(u, w)| h(mid + half * u) * w).sum::<Complex64>() * half;
            }
            x = hi;
        }
        let gc = |z: Complex64| g(z);
        let right = cauchy_derivatives(&gc, Complex64::new(big_t, c), radius, opts.tail_terms);
        let left = cauchy_derivatives(&gc, Complex64::new(-big_t, c), radius, opts.tail_terms);
        let (tr, er) = oscillatory_tail(&right, omega, big_t, true);
        let (tl, el) = oscillatory_tail(&left, omega, -big_t, false);
        let amp = (TAU * c * t).exp();
        let value = (fine + tr + tl) * amp;
        let err = ((fine - rough).norm() + er + el) * amp;
        Ok((value, err))
    });
    let mut values = Vec::with_capacity(ts.len());
    let mut errors = Vec::with_capacity(ts.len());
    for r in results {
        let (v, e) = r?;
        values.push(v);
        errors.push(e);
    }
    Ok(SampledProfile { t: ts.to_vec(), values, errors })
}

/// Inverse strip transform along `Im z = c`.
pub fn strip_inverse(f: &HoloFunction1D, c: f64, ts: &[f64], opts: &InverseOptions) -> Result<SampledProfile> {
    match f.region {
        Region1D::Strip { a, b } => {
            let h = f.clone();
            line_inverse(move |z| h.eval_unchecked(z), a, b, c, ts, opts)
        }
        Region1D::Sector { .. } => Err(Error::InvalidArgument("strip_inverse needs a strip function".into())),
    }
}

/// Inverse sector transform: the strip inverse of `ζ ↦ F(e^ζ) e^ζ`.
pub fn sector_inverse(f: &HoloFunction1D, c: f64, ts: &[f64], opts: &InverseOptions) -> Result<SampledProfile> {
    match f.region {
        Region1D::Sector { a, b } => {
            let h = f.clone();
            line_inverse(move |z| h.eval_unchecked(z.exp()) * z.exp(), a, b, c, ts, opts)
        }
        Region1D::Strip { .. } => Err(Error::InvalidArgument("sector_inverse needs a sector function".into())),
    }
}

/// `∫_S |F|² dA` over a strip by nested double-exponential rules.
pub fn strip_a2_norm_sq<F>(f: F, a: f64, b: f64, mode: ExecMode) -> QuadratureResult
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    let row = |y: f64| {
        integrate_halfline_real(
            |x| Complex64::new(f(Complex64::new(x, y)).norm_sqr() + f(Complex64::new(-x, y)).norm_sqr(), 0.0),
            1.0,
        )
    };
    let (fine, coarse) = if b == f64::INFINITY {
        let (f, c) = exp_sinh_nodes(f64::INFINITY);
        let shift = |v: Vec<(f64, f64)>| v.into_iter().map(|(y, w)| (a + y, w)).collect::<Vec<_>>();
        (shift(f), shift(c))
    } else {
        tanh_sinh_nodes(a, b)
    };
    let rows = exec::map_slice(mode, &fine, |&(y, _)| row(y));
    let mut value = 0.0;
    let mut inner_err = 0.0;
    let mut by_y = Vec::with_capacity(fine.len());
    for (&(y, w), r) in fine.iter().zip(&rows) {
        let v = r.value.re;
        if v.is_finite() {
            value += w * v;
            inner_err += w * r.error_estimate;
        }
        by_y.push((y, v));
    }
    let mut rough = 0.0;
    for &(y, w) in &coarse {
        if let Some(&(_, v)) = by_y.iter().find(|(yy, _)| *yy == y) {
            if v.is_finite() {
                rough += w * v;
            }
        }
    }
    let n = rows.iter().map(|r| r.nodes_used).sum();
    QuadratureResult {
        value: Complex64::new(value, 0.0),
        error_estimate: inner_err + (value - rough).abs(),
        nodes_used: n,
    }
}

/// `∫_V |F|² dA` over a sector, as the strip norm of `F(e^ζ) e^ζ`.
pub fn sector_a2_norm_sq<F>(f: F, a: f64, b: f64, mode: ExecMode) -> QuadratureResult
where
    F: Fn(Complex64) -> Complex64 + Sync + Send,
{
    strip_a2_norm_sq(|z| f(z.exp()) * z.exp(), a, b, mode)
}

/// `|∂F/∂y − i ∂F/∂x| / |∂F/∂x|` by central differences.
pub fn cauchy_riemann_residual<F>(f: F, z: Complex64, h: f64) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let fx = (f(z + h) - f(z - h)) / (2.0 * h);
    let fy = (f(z + I * h) - f(z - I * h)) / (2.0 * h);
    (fy - I * fx).norm() / fx.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn strip_forward_examples() {
        let e = Profile1D::one_sided(one(), 0.0, one()).unwrap();
        let z = c(0.3, 0.4);
        let f = strip_forward(&e, -0.1, 1.0).unwrap();
        assert!((f.eval(z).unwrap() - 1.0 / (1.0 - TAU * I * z)).norm() < 1e-15);
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        let f = strip_forward(&te, 0.0, f64::INFINITY).unwrap();
        assert!((f.eval(z).unwrap() - 1.0 / (1.0 - TAU * I * z).powi(2)).norm() < 1e-15);
        let zero = strip_forward(&Profile1D::zero(), 0.0, 1.0).unwrap();
        assert_eq!(zero.eval(z).unwrap(), c(0.0, 0.0));
        assert!(strip_forward(&e, 0.0, f64::INFINITY).is_err(), "e^-t is not in L²(ω_(0,∞))");
        assert!(f.eval(c(0.0, -0.1)).is_err());
    }

    #[test]
    fn closed_and_numeric_forward_agree() {
        let profiles = [
            Profile1D::new(vec![
                Piece::OneSided { c: c(1.0, 0.5), a: 1.5, b: c(2.0, 1.0) },
                Piece::Reflected { c: c(-0.3, 0.0), a: 2.0, b: c(3.0, -0.5) },
            ])
            .unwrap(),
            Profile1D::new(vec![Piece::Box { c: c(0.7, 0.0), lo: -0.5, hi: 1.5, nu: 0.3 }]).unwrap(),
            Profile1D::new(vec![Piece::Gaussian { c: c(0.4, -0.2), k: 3, sigma: 1.5, center: 0.7, nu: -0.2 }]).unwrap(),
        ];
        for f in &profiles {
            for z in [c(0.2, 0.1), c(-1.0, -0.05), c(0.0, 0.2)] {
                let closed = f.forward(z);
                let numeric = strip_forward_numeric(f, z).unwrap().value;
                assert!((closed - numeric).norm() < 1e-10 * closed.norm(), "{closed} vs {numeric}");
            }
        }
    }

    #[test]
    fn sector_examples() {
        let e = Profile1D::one_sided(one(), 0.0, one()).unwrap();
        let f = sector_forward(&e, 0.0, PI).unwrap();
        let expect = 1.0 / (I * (1.0 + PI * PI));
        assert!((f.eval(I).unwrap() - expect).norm() < 1e-15);
        let direct = sector_forward_direct(&e, I).value;
        assert!((direct - expect).norm() < 1e-10);
        let g = strip_forward(&e, -0.1, PI).unwrap();
        for theta in [0.3, 1.0, 2.5] {
            let lhs = f.eval(Complex64::from_polar(1.0, theta)).unwrap();
            let rhs = g.eval(c(0.0, theta)).unwrap() * Complex64::from_polar(1.0, -theta);
            assert!((lhs - rhs).norm() < 1e-15);
        }
        assert!(f.eval(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn norm_closed_vs_numeric() {
        let w = StripWeight::new(-0.1, 0.4).unwrap();
        let f = Profile1D::new(vec![
            Piece::OneSided { c: c(1.0, 0.5), a: 0.5, b: c(1.5, 2.0) },
            Piece::OneSided { c: c(0.2, 0.0), a: 0.0, b: c(3.0, 0.0) },
            Piece::Reflected { c: c(-0.3, 1.0), a: 1.0, b: c(4.0, -0.5) },
        ])
        .unwrap();
        let closed = f.norm_sq(w).unwrap();
        let numeric = f.norm_sq_numeric(w).value.re;
        assert!((closed - numeric).abs() < 1e-10 * closed, "{closed} vs {numeric}");
        let h = StripWeight::new(0.0, f64::INFINITY).unwrap();
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        // ∫ t² e^{−2t}/(4πt) dt = 1/(16π)
        assert!((te.norm_sq(h).unwrap() - 1.0 / (16.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn strip_plancherel() {
        let f = Profile1D::new(vec![
            Piece::OneSided { c: c(1.0, 0.0), a: 1.0, b: c(1.0, 0.5) },
            Piece::Reflected { c: c(0.5, -0.5), a: 1.0, b: c(2.0, 0.0) },
        ])
        .unwrap();
        let (a, b) = (-0.1, 0.2);
        let lhs = strip_a2_norm_sq(|z| f.forward(z), a, b, ExecMode::Sequential).value.re;
        let rhs = f.norm_sq(StripWeight::new(a, b).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-7 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn strip_round_trip() {
        let te = Profile1D::one_sided(one(), 1.0, one()).unwrap();
        assert!(strip_forward(&te, -0.2, f64::INFINITY).is_err());
        let f = strip_forward(&te, -0.15, 1.0).unwrap();
        let ts: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
        let opts = InverseOptions::default();
        let r1 = strip_inverse(&f, 0.1, &ts, &opts).unwrap();
        let r2 = strip_inverse(&f, 0.2, &ts, &opts).unwrap();
        assert!(r1.sup_error(&te) < 1e-6, "{}", r1.sup_error(&te));
        let diff = r1.values.iter().zip(&r2.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    proptest! {
        #[test]
        fn modulation_is_translation(theta in -2.0f64..2.0, x in -1.0f64..1.0, y in 0.0f64..0.3) {
            let f = Profile1D::new(vec![
                Piece::OneSided { c: c(1.0, 0.3), a: 1.0, b: c(1.0, 0.0) },
                Piece::Box { c: c(0.5, 0.0), lo: 0.0, hi: 2.0, nu: 0.0 },
            ]).unwrap();
            let z = c(x, y);
            let lhs = f.modulate(theta).forward(z);
            let rhs = f.forward(z + theta);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }

        #[test]
        fn forward_is_linear(s in -2.0f64..2.0, x in -1.0f64..1.0) {
            let f = Profile1D::one_sided(c(1.0, 0.0), 1.0, c(1.0, 0.0)).unwrap();
            let g = Profile1D::reflected(c(0.0, 1.0), 0.5, c(2.0, 0.0)).unwrap();
            let z = c(x, 0.05);
            let lhs = f.scale(c(s, 0.5)).add(&g).forward(z);
            let rhs = f.forward(z) * c(s, 0.5) + g.forward(z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }
}
