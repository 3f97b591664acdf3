//! Seeded test elements for the `isometry` subcommand.

use bergman_core::domains::DomainSpec;
use bergman_core::polynomials::{HoloPolynomial, MultiIndex};
use bergman_core::transforms::{PolySequence, SpaceKind, SpectralElement};
use bergman_core::transforms1d::Profile1D;
use bergman_core::{Complex64, Result};
use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};

pub struct Suite {
    rng: ChaCha8Rng,
    spec: DomainSpec,
}

impl Suite {
    pub fn new(spec: &DomainSpec, seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spec: spec.clone() }
    }

    fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn coef(&mut self) -> Complex64 {
        Complex64::new(2.0 * self.unit() - 1.0, 2.0 * self.unit() - 1.0)
    }

    /// A monomial of total degree at most 2 and its weight.
    fn monomial(&mut self) -> (MultiIndex, f64) {
        let n = self.spec.dim();
        let mut alpha = vec![0u32; n];
        let mut left = self.rng.random::<u32>() % 3;
        for (j, a) in alpha.iter_mut().enumerate() {
            if left == 0 {
                break;
            }
            let k = if j + 1 == n { left } else { self.rng.random::<u32>() % (left + 1) };
            *a = k;
            left -= k;
        }
        let weight = alpha.iter().zip(self.spec.m()).map(|(&a, &m)| a as f64 / (2.0 * m as f64)).sum();
        (MultiIndex::new(alpha), weight)
    }

    fn polynomial(&mut self) -> Result<HoloPolynomial> {
        let terms = (0..1 + self.rng.random::<u32>() % 3)
            .map(|_| {
                let (alpha, _) = self.monomial();
                (alpha, self.coef())
            })
            .collect();
        HoloPolynomial::new(self.spec.dim(), terms)
    }

    pub fn rotation(&mut self) -> Result<PolySequence> {
        let len = 1 + self.rng.random::<u32>() as usize % 4;
        let entries = (0..len).map(|_| self.polynomial()).collect::<Result<Vec<_>>>()?;
        PolySequence::new(entries)
    }

    pub fn translation(&mut self) -> Result<SpectralElement> {
        let (alpha, weight) = self.monomial();
        let homogeneity = 2.0 * weight + self.spec.inv_mu();
        let a = 0.5 * homogeneity + 1.0 + self.unit();
        let b = Complex64::new(1.0 + self.unit(), self.unit() - 0.5);
        let c = self.coef();
        let profile = Profile1D::one_sided(c, a, b)?;
        let q = HoloPolynomial::monomial(alpha, Complex64::new(1.0, 0.0));
        SpectralElement::new(&self.spec, SpaceKind::Hp, vec![(profile, q)])
    }

    pub fn scaling(&mut self) -> Result<SpectralElement> {
        let profile = if self.unit() < 0.5 {
            let k = self.rng.random::<u32>() % 3;
            Profile1D::gaussian(self.coef(), k, 1.0 + 3.0 * self.unit(), self.unit() - 0.5)?
        } else {
            let a = (1 + self.rng.random::<u32>() % 2) as f64;
            Profile1D::one_sided(self.coef(), a, Complex64::new(1.0 + self.unit(), 0.0))?
        };
        let q = self.polynomial()?;
        SpectralElement::new(&self.spec, SpaceKind::Xp, vec![(profile, q)])
    }
}
