use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::domains::Point;
use crate::error::{Error, Result};

/// Classical Bergman kernels used as validation oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Upper half-plane, `−1/(π(z − Z̄)²)`.
    HalfPlane,
    /// Unit disc, `1/(π(1 − zZ̄)²)`.
    Disc,
    /// Unit ball of `C^{n+1}`, `(n+1)!/π^{n+1}·(1 − ⟨x, y⟩)^{−(n+2)}`.
    Ball,
    /// Siegel domain `Im z > |w|²`, `4^{n+1}π(n+1)!·s^{−(n+2)}` with
    /// `s = −2πi[(z − Z̄) − 2i⟨w, W⟩]`.
    Siegel,
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "halfplane" => Oracle::HalfPlane,
            "disc" => Oracle::Disc,
            "ball" => Oracle::Ball,
            "siegel" => Oracle::Siegel,
            _ => return Err(Error::InvalidArgument(format!("unknown oracle '{s}'"))),
        })
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Evaluates an oracle kernel at `(x, y)`.
pub fn oracle_kernel(oracle: Oracle, x: &Point, y: &Point) -> Result<Complex64> {
    if x.w.len() != y.w.len() {
        return Err(Error::Dimension { expected: x.w.len(), got: y.w.len() });
    }
    let n = x.w.len() as f64;
    match oracle {
        Oracle::HalfPlane => {
            if !x.w.is_empty() {
                return Err(Error::Dimension { expected: 0, got: x.w.len() });
            }
            if !(x.z.im > 0.0 && y.z.im > 0.0) {
                return Err(Error::Domain("upper half-plane".into()));
            }
            let d = x.z - y.z.conj();
            Ok(-1.0 / (PI * d * d))
        }
        Oracle::Disc => {
            if !x.w.is_empty() {
                return Err(Error::Dimension { expected: 0, got: x.w.len() });
            }
            if !(x.z.norm() < 1.0 && y.z.norm() < 1.0) {
                return Err(Error::Domain("unit disc".into()));
            }
            let d = 1.0 - x.z * y.z.conj();
            Ok(1.0 / (PI * d * d))
        }
        Oracle::Ball => {
            if !(x.z.norm_sqr() + norm_sq(&x.w) < 1.0 && y.z.norm_sqr() + norm_sq(&y.w) < 1.0) {
                return Err(Error::Domain("unit ball".into()));
            }
            let base = 1.0 - x.z * y.z.conj() - inner(&x.w, &y.w);
            let ln_pref = ln_gamma(n + 2.0) - (n + 1.0) * PI.ln();
            Ok((ln_pref - (n + 2.0) * base.ln()).exp())
        }
        Oracle::Siegel => {
            if !(x.z.im > norm_sq(&x.w) && y.z.im > norm_sq(&y.w)) {
                return Err(Error::Domain("Siegel domain".into()));
            }
            let s = Complex64::new(0.0, -2.0 * PI) * (x.z - y.z.conj() - Complex64::new(0.0, 2.0) * inner(&x.w, &y.w));
            let ln_pref = (n + 1.0) * 4f64.ln() + PI.ln() + ln_gamma(n + 2.0);
            Ok((ln_pref - (n + 2.0) * s.ln()).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn oracle_examples() {
        let o = Point::scalar(c(0.0, 0.0));
        assert!((oracle_kernel(Oracle::Disc, &o, &o).unwrap() - 1.0 / PI).norm() < 1e-16);
        let i = Point::scalar(c(0.0, 1.0));
        assert!((oracle_kernel(Oracle::HalfPlane, &i, &i).unwrap() - 1.0 / (4.0 * PI)).norm() < 1e-16);
        let x = Point::new(c(0.0, 1.0), vec![c(0.0, 0.0)]);
        let v = oracle_kernel(Oracle::Siegel, &x, &x).unwrap();
        assert!((v - 1.0 / (2.0 * PI * PI)).norm() < 1e-14 * v.norm(), "{v}");
        let h = Point::scalar(c(0.3, 2.0));
        let hy = Point::scalar(c(-1.0, 0.5));
        let a = oracle_kernel(Oracle::Siegel, &h, &hy).unwrap();
        let b = oracle_kernel(Oracle::HalfPlane, &h, &hy).unwrap();
        assert!((a - b).norm() < 1e-14 * b.norm());
        let bo = Point::new(c(0.0, 0.0), vec![c(0.0, 0.0)]);
        assert!((oracle_kernel(Oracle::Ball, &bo, &bo).unwrap() - 2.0 / (PI * PI)).norm() < 1e-15);
        assert!(oracle_kernel(Oracle::Disc, &Point::scalar(c(1.0, 0.0)), &o).is_err());
    }
}
