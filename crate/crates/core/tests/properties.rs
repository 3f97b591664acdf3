use std::f64::consts::PI;

use bergman_core::domains::{DomainSpec, Point};
use bergman_core::kernels::{
    bergman_fourier, bergman_mellin, bergman_up_via_series, gram_min_eigen_ratio, MellinOptions,
};
use bergman_core::polynomials::{
    check_scaling_identity, eval_p, homogeneous_decompose, weight_of, BalancedPolynomial, HoloPolynomial, MultiIndex,
    Rational, Term, WeightTuple,
};
use bergman_core::quad::{integrate_bp, CubatureRule};
use bergman_core::transforms::{SpaceKind, SpectralElement};
use bergman_core::transforms1d::Profile1D;
use bergman_core::weights::{norm_hp, norm_xp};
use bergman_core::{Complex64, ExecMode};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mixed_form(k: f64) -> BalancedPolynomial {
    let m = WeightTuple::new(vec![1, 1]).unwrap();
    let t = |a: Vec<u32>, b: Vec<u32>, z: Complex64| Term { alpha: MultiIndex::new(a), beta: MultiIndex::new(b), c: z };
    let terms = vec![
        t(vec![1, 0], vec![1, 0], c(1.0, 0.0)),
        t(vec![0, 1], vec![0, 1], c(1.0, 0.0)),
        t(vec![1, 0], vec![0, 1], c(k, 0.3 * k)),
    ];
    BalancedPolynomial::with_hermitian_completion(m, terms).unwrap().0
}

fn specs() -> Vec<BalancedPolynomial> {
    vec![
        BalancedPolynomial::standard(vec![1]).unwrap(),
        BalancedPolynomial::standard(vec![1, 2]).unwrap(),
        BalancedPolynomial::standard(vec![3, 1, 2]).unwrap(),
        mixed_form(0.6),
    ]
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| c(a, b)), n)
}

fn point(m: u32) -> impl Strategy<Value = Point> {
    (-2.0f64..2.0, 0.1f64..2.0, 0.0f64..0.8, 0.0f64..6.3).prop_map(move |(x, dy, r, th)| {
        let w = c(r * th.cos(), r * th.sin());
        Point::new(c(x, r.powi(2 * m as i32) + dy), vec![w])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weight_is_additive(m in prop::collection::vec(1u32..5, 3), a in prop::collection::vec(0u32..6, 3), b in prop::collection::vec(0u32..6, 3)) {
        let m = WeightTuple::new(m).unwrap();
        let a = MultiIndex::new(a);
        let b = MultiIndex::new(b);
        let sum = a.checked_add(&b).unwrap();
        prop_assert_eq!(weight_of(&sum, &m).unwrap(), weight_of(&a, &m).unwrap() + weight_of(&b, &m).unwrap());
    }

    #[test]
    fn p_is_real_and_weighted_homogeneous(k in 0usize..4, w in cvec(3), theta in 0.01f64..20.0) {
        let p = &specs()[k];
        let w = &w[..p.dim()];
        let v = eval_p(p, w);
        prop_assert!(v.is_ok());
        prop_assert!(v.unwrap() >= -1e-12);
        prop_assert!(check_scaling_identity(p, theta, w, 1e-10));
    }

    #[test]
    fn homogeneous_components_sum_back(coefs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6), m2 in 1u32..4) {
        let alphas = [[0u32, 0], [1, 0], [0, 1], [2, 1], [1, 3], [4, 0]];
        let terms = alphas.iter().zip(&coefs).map(|(a, &(re, im))| (MultiIndex::new(a.to_vec()), c(re, im))).collect();
        let q = HoloPolynomial::new(2, terms).unwrap();
        let m = WeightTuple::new(vec![1, m2]).unwrap();
        let parts = homogeneous_decompose(&q, &m).unwrap();
        let big_m = Rational::from_integer(m.big_m() as i64);
        let mut sum = HoloPolynomial::zero(2);
        for (wt, part) in &parts {
            for (alpha, _) in part.terms() {
                prop_assert_eq!(&(weight_of(alpha, &m).unwrap() * big_m), wt);
            }
            sum = sum.add(part).unwrap();
        }
        for a in alphas {
            let alpha = MultiIndex::new(a.to_vec());
            prop_assert_eq!(sum.coefficient(&alpha), q.coefficient(&alpha));
        }
    }

    #[test]
    fn norms_are_absolutely_homogeneous(re in -3.0f64..3.0, im in -3.0f64..3.0, a in 1.5f64..3.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let spec = DomainSpec::standard(vec![1]).unwrap();
        let one = c(1.0, 0.0);
        let q = || HoloPolynomial::monomial(MultiIndex::new(vec![1]), one);
        let f = |z: Complex64| SpectralElement::new(&spec, SpaceKind::Hp, vec![(Profile1D::one_sided(z, a, c(1.0, 0.2)).unwrap(), q())]).unwrap();
        let base = norm_hp(&spec, &f(one)).unwrap().value;
        let scaled = norm_hp(&spec, &f(c(re, im))).unwrap().value;
        let s2 = re * re + im * im;
        prop_assert!((scaled - s2 * base).abs() <= 1e-12 * s2 * base);
        let g = |z: Complex64| SpectralElement::new(&spec, SpaceKind::Xp, vec![(Profile1D::gaussian(z, 1, a, 0.1).unwrap(), q())]).unwrap();
        let base = norm_xp(&spec, &g(one)).unwrap().value;
        let scaled = norm_xp(&spec, &g(c(re, im))).unwrap().value;
        prop_assert!((scaled - s2 * base).abs() <= 1e-12 * s2 * base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernels_are_hermitian_and_positive_on_the_diagonal(m in 1u32..3, x in point(2), y in point(2)) {
        let spec = DomainSpec::standard(vec![m]).unwrap();
        prop_assume!(spec.in_up(&x).unwrap() && spec.in_up(&y).unwrap());
        let opts = MellinOptions::default();
        let fourier = |a: &Point, b: &Point| bergman_fourier(&spec, a, b).unwrap().value;
        let mellin = |a: &Point, b: &Point| bergman_mellin(&spec, a, b, &opts).unwrap().value;
        let series = |a: &Point, b: &Point| bergman_up_via_series(&spec, a, b, 400).unwrap().value;
        for k in [&fourier as &dyn Fn(&Point, &Point) -> Complex64, &mellin, &series] {
            let xy = k(&x, &y);
            let yx = k(&y, &x);
            prop_assert!((xy - yx.conj()).norm() <= 1e-10 * xy.norm());
            let d = k(&x, &x);
            prop_assert!(d.re > 0.0 && d.im.abs() <= 1e-10 * d.re);
        }
    }

    #[test]
    fn fourier_kernel_is_positive_definite(m in 1u32..3, pts in prop::collection::vec(point(2), 6)) {
        let spec = DomainSpec::standard(vec![m]).unwrap();
        prop_assume!(pts.iter().all(|x| spec.in_up(x).unwrap()));
        let g = DMatrix::from_fn(6, 6, |i, j| bergman_fourier(&spec, &pts[i], &pts[j]).unwrap().value);
        prop_assert!(gram_min_eigen_ratio(&g) >= -1e-8);
    }
}

#[test]
fn ball_cubature_is_exact_for_radial_monomials() {
    for m in [1u32, 2, 3] {
        let p = BalancedPolynomial::standard(vec![m]).unwrap();
        for k in 0..6 {
            // The ball is |w| < 1 for every m, and 2π∫_0^1 r^{2k+1} dr = π/(k+1).
            let r = integrate_bp(&p, |w| c(w[0].norm_sqr().powi(k), 0.0), &CubatureRule::default()).unwrap();
            let exact = PI / (k as f64 + 1.0);
            assert!((r.value.re - exact).abs() <= 1e-13 * exact, "m={m} k={k}: {}", r.value.re);
        }
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let spec = DomainSpec::standard(vec![1, 2]).unwrap();
    let g = |w: &[Complex64]| (w[0] * w[1].conj() + w[1]).exp();
    let seq = integrate_bp(spec.poly(), g, &CubatureRule::default().with_exec(ExecMode::Sequential)).unwrap();
    let par = integrate_bp(spec.poly(), g, &CubatureRule::default().with_exec(ExecMode::Parallel)).unwrap();
    assert_eq!(seq.value, par.value);
    let mixed = mixed_form(0.4);
    let seq = integrate_bp(&mixed, g, &CubatureRule::default().with_exec(ExecMode::Sequential)).unwrap();
    let par = integrate_bp(&mixed, g, &CubatureRule::default().with_exec(ExecMode::Parallel)).unwrap();
    assert_eq!(seq.value, par.value);
    assert_eq!(seq.error_estimate, par.error_estimate);

    let spec = DomainSpec::standard(vec![2]).unwrap();
    let x = Point::new(c(0.5, 1.5), vec![c(0.6, 0.3)]);
    let y = Point::new(c(-0.7, 0.8), vec![c(-0.2, 0.5)]);
    let a = bergman_mellin(&spec, &x, &y, &MellinOptions { exec: ExecMode::Sequential, ..MellinOptions::default() })
        .unwrap();
    let b =
        bergman_mellin(&spec, &x, &y, &MellinOptions { exec: ExecMode::Parallel, ..MellinOptions::default() }).unwrap();
    assert_eq!(a.value, b.value);
}
