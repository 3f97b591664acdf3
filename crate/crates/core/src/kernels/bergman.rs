use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::fiber::{ellipsoid_fiber_kernel, FiberWeight, MonomialGramBasis, DENSE_SHELLS, DIAGONAL_SHELLS};
use super::{KernelEstimate, Method};
use crate::domains::{psi_map, Biholomorphism, DomainSpec, LambdaMap, Point};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::quad::{gauss_legendre, integrate_halfline, integrate_ray, HalflineRule};

fn full_basis(spec: &DomainSpec) -> Result<std::sync::Arc<MonomialGramBasis>> {
    if spec.poly().diagonal_coefficients().is_some() {
        MonomialGramBasis::cached(spec, DIAGONAL_SHELLS)
    } else {
        MonomialGramBasis::cached(spec, DENSE_SHELLS)
    }
}

/// `B = Σ_{k ≤ K} (k+1)/π · Y_p(k; w, W) (zZ̄)^k` on `E_p`.
pub fn bergman_series(spec: &DomainSpec, x: &Point, y: &Point, k_max: usize) -> Result<KernelEstimate> {
    spec.require_ep(x)?;
    spec.require_ep(y)?;
    let q = x.z * y.z.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut last = [0.0f64; 2];
    for k in 0..=k_max {
        let yk = ellipsoid_fiber_kernel(spec, k as u32, &x.w, &y.w)?;
        let coef = pow * (k as f64 + 1.0) / PI;
        let term = coef * yk.value;
        sum += term;
        err += coef.norm() * yk.error_estimate;
        last = [last[1], term.norm()];
        pow *= q;
        if pow.norm() == 0.0 {
            last = [0.0, 0.0];
            break;
        }
    }
    let tail = if last[1] == 0.0 {
        0.0
    } else {
        let r = last[1] / last[0];
        if r < 1.0 {
            last[1] * r / (1.0 - r)
        } else {
            f64::INFINITY
        }
    };
    Ok(KernelEstimate { value: sum, error_estimate: err + tail, method: Method::Series })
}

/// `K = 4π ∫_0^∞ t H_p(t; w, W) e^{2πi(z − Z̄)t} dt` on `U_p`.
pub fn bergman_fourier(spec: &DomainSpec, x: &Point, y: &Point) -> Result<KernelEstimate> {
    spec.require_up(x)?;
    spec.require_up(y)?;
    let s = Complex64::new(0.0, -2.0 * PI) * (x.z - y.z.conj());
    let n = spec.dim();
    if let Some(c) = spec.poly().diagonal_coefficients() {
        if spec.m().iter().all(|&mj| mj == 1) {
            // H_p(t) = Π c_j (4t)^n e^{4πt p̃}: absorb the exponential into the decay rate.
            let pt: Complex64 = c.iter().zip(&x.w).zip(&y.w).map(|((cj, a), b)| cj * a * b.conj()).sum();
            let s_eff = s - 4.0 * PI * pt;
            let pref = 4.0 * PI * c.iter().product::<f64>() * 4f64.powi(n as i32);
            let r = integrate_halfline(|t| pref * t.powu(n as u32 + 1), s_eff, HalflineRule::GaussLaguerre)?;
            return Ok(KernelEstimate { value: r.value, error_estimate: r.error_estimate, method: Method::Fourier });
        }
    }
    let basis = full_basis(spec)?;
    let kappa = 2.0 * PI * (spec.p(&x.w) + spec.p(&y.w)) / s.norm();
    if !(kappa < 1.0) {
        return Err(Error::Divergence(format!("Fourier integrand grows along the ray (κ = {kappa})")));
    }
    let failure = std::cell::RefCell::new(None);
    let tail = std::cell::Cell::new(0.0f64);
    let r = integrate_ray(
        |t| {
            let l4 = (4.0 * PI * t).ln();
            let shift = |a: f64| Complex64::new(ln_gamma(a + 1.0), 0.0) - a * l4 + s * t - l4;
            match basis.kernel_with(shift, &x.w, &y.w) {
                Ok((v, e)) => {
                    tail.set(tail.get().max(e));
                    v
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        s.inv(),
        1.0 / (1.0 - kappa),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let err = r.error_estimate + tail.get() / (s.norm() * (1.0 - kappa));
    Ok(KernelEstimate { value: r.value, error_estimate: err, method: Method::Fourier })
}

/// Quadrature settings for [`bergman_mellin`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinOptions {
    pub panel_width: f64,
    pub nodes: usize,
    /// Blocks of panels are added until a block contributes less than this
    /// fraction of the running sum.
    pub tail_tol: f64,
    pub max_t: f64,
    pub exec: ExecMode,
}

impl Default for MellinOptions {
    fn default() -> Self {
        Self { panel_width: 0.25, nodes: 16, tail_tol: 1e-15, max_t: 200.0, exec: ExecMode::default() }
    }
}

/// `K = ∫_ℝ X_p(t; w′, W′) z^{2πit} conj(Z^{2πit}) z^{−c} conj(Z^{−c}) dt`
/// with `w′ = ρ̂_{1/z} w`, `W′ = ρ̂_{1/Z} W` and `c = 1 + 1/(2μ)`.
pub fn bergman_mellin(spec: &DomainSpec, x: &Point, y: &Point, opts: &MellinOptions) -> Result<KernelEstimate> {
    let xp = psi_map(spec, x)?;
    let yp = psi_map(spec, y)?;
    let basis = full_basis(spec)?;
    let c = 1.0 + 0.5 * spec.inv_mu();
    let lz = x.z.ln();
    let lzb = y.z.ln().conj();
    let phase = lz - lzb;
    let base = -c * (lz + lzb);
    // X(−τ) = e^{−4π²τ} X(τ), so both half-lines share one fiber evaluation.
    let folded = |tau: f64| -> Result<Complex64> {
        let weight = FiberWeight::Lambda(tau);
        let (xv, _) = basis.kernel_with(|a| Complex64::new(weight.ln_moment(a), 0.0), &xp.w, &yp.w)?;
        let i2pt = Complex64::new(0.0, 2.0 * PI * tau);
        let e_pos = (i2pt * phase + base).exp();
        let e_neg = (-i2pt * phase + base - 4.0 * PI * PI * tau).exp();
        Ok(xv * (e_pos + e_neg))
    };
    let fine_rule = gauss_legendre(opts.nodes.max(2));
    let coarse_rule = gauss_legendre((opts.nodes / 2).max(1));
    let per_block = 8usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut lo = 0.0;
    loop {
        let panels: Vec<(f64, f64)> = (0..per_block)
            .map(|i| (lo + i as f64 * opts.panel_width, lo + (i + 1) as f64 * opts.panel_width))
            .collect();
        let parts = exec::map_slice(opts.exec, &panels, |&(a, b)| -> Result<(Complex64, Complex64)> {
            let mid = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut fine = Complex64::new(0.0, 0.0);
            for &(u, wt) in fine_rule.iter() {
                fine += folded(mid + h * u)? * wt;
            }
            let mut coarse = Complex64::new(0.0, 0.0);
            for &(u, wt) in coarse_rule.iter() {
                coarse += folded(mid + h * u)? * wt;
            }
            Ok((fine * h, coarse * h))
        });
        let mut block = Complex64::new(0.0, 0.0);
        for p in parts {
            let (f, co) = p?;
            block += f;
            err += (f - co).norm();
        }
        sum += block;
        lo += per_block as f64 * opts.panel_width;
        if block.norm() <= opts.tail_tol * sum.norm() {
            err += block.norm();
            break;
        }
        if lo >= opts.max_t {
            return Err(Error::Accuracy(format!("Mellin integrand has not decayed by |t| = {lo}")));
        }
    }
    Ok(KernelEstimate { value: sum, error_estimate: err, method: Method::Mellin })
}

/// `K(x, y) = K_src(φx, φy)·det φ′(x)·conj(det φ′(y))`.
pub fn kernel_transport<F>(source: F, phi: &dyn Biholomorphism, x: &Point, y: &Point) -> Result<KernelEstimate>
where
    F: Fn(&Point, &Point) -> Result<KernelEstimate>,
{
    let k = source(&phi.map(x)?, &phi.map(y)?)?;
    let j = phi.jacobian_det(x)? * phi.jacobian_det(y)?.conj();
    Ok(KernelEstimate { value: k.value * j, error_estimate: k.error_estimate * j.norm(), method: k.method })
}

/// Bergman kernel of `U_p` from the `E_p` series, transported through `Λ`.
pub fn bergman_up_via_series(spec: &DomainSpec, x: &Point, y: &Point, k_max: usize) -> Result<KernelEstimate> {
    let lam = LambdaMap(spec.clone());
    kernel_transport(|a, b| bergman_series(spec, a, b, k_max), &lam, x, y)
}
