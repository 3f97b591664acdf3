use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::{GaussLaguerre, GaussLegendre};
use num_complex::Complex64;

type Table = Arc<Vec<(f64, f64)>>;

fn cached(
    cache: &'static OnceLock<Mutex<HashMap<usize, Table>>>,
    n: usize,
    build: impl FnOnce() -> Vec<(f64, f64)>,
) -> Table {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = map.lock().expect("rule cache").get(&n) {
        return t.clone();
    }
    let table = Arc::new(build());
    map.lock().expect("rule cache").entry(n).or_insert(table).clone()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Table {
    static CACHE: OnceLock<Mutex<HashMap<usize, Table>>> = OnceLock::new();
    cached(&CACHE, n, || GaussLegendre::new(NonZeroUsize::new(n).expect("n > 0")).as_node_weight_pairs().to_vec())
}

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    gauss_legendre(n).iter().map(|&(x, w)| (c + h * x, h * w)).collect()
}

/// Gauss-Laguerre nodes and weights for the weight `e^{-x}` on `[0, ∞)`.
pub fn gauss_laguerre(n: usize) -> Table {
    static CACHE: OnceLock<Mutex<HashMap<usize, Table>>> = OnceLock::new();
    cached(&CACHE, n, || {
        let alpha = 0.0f64.try_into().expect("alpha = 0 is admissible");
        GaussLaguerre::new(NonZeroUsize::new(n).expect("n > 0"), alpha).as_node_weight_pairs().to_vec()
    })
}

const DE_STEP: f64 = 1.0 / 16.0;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Tanh-sinh abscissae on `[0, 1]` as `(offset from the nearer endpoint, weight)`
/// for `k = 0, 1, 2, …`; the `k = 0` node sits at the midpoint.
fn tanh_sinh_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        for k in 0.. {
            let tau = k as f64 * DE_STEP;
            let u = HALF_PI * tau.sinh();
            let e = (-2.0 * u).exp();
            let small = e / (1.0 + e);
            let large = 1.0 / (1.0 + e);
            let w = 2.0 * small * large * HALF_PI * tau.cosh() * DE_STEP;
            if small < 1e-300 || w < 1e-300 {
                break;
            }
            out.push((small, w));
        }
        out
    })
}

/// `(node, weight)` pairs.
pub(crate) type Nodes = Vec<(f64, f64)>;

/// Tanh-sinh nodes on `[a, b]` at the fine level.
pub fn tanh_sinh_on(a: f64, b: f64) -> Vec<(f64, f64)> {
    let len = b - a;
    let t = tanh_sinh_table();
    let mut out = Vec::with_capacity(2 * t.len());
    for (k, &(off, w)) in t.iter().enumerate() {
        out.push((a + len * off, len * w));
        if k > 0 {
            out.push((b - len * off, len * w));
        }
    }
    out
}

/// Tanh-sinh nodes on `[a, b]` at the fine step and at twice the step.
pub(crate) fn tanh_sinh_nodes(a: f64, b: f64) -> (Nodes, Nodes) {
    let len = b - a;
    let t = tanh_sinh_table();
    let mut fine = Vec::with_capacity(2 * t.len());
    let mut coarse = Vec::with_capacity(t.len());
    for (k, &(off, w)) in t.iter().enumerate() {
        let mut pts = vec![a + len * off];
        if k > 0 {
            pts.push(b - len * off);
        }
        for x in pts {
            fine.push((x, len * w));
            if k % 2 == 0 {
                coarse.push((x, 2.0 * len * w));
            }
        }
    }
    (fine, coarse)
}

/// Fine and half-density sums of the tanh-sinh rule plus evaluation count.
pub(crate) fn tanh_sinh_sums<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> (Complex64, Complex64, usize) {
    let len = b - a;
    let t = tanh_sinh_table();
    let mut fine = Complex64::default();
    let mut coarse = Complex64::default();
    let mut n = 0;
    for (k, &(off, w)) in t.iter().enumerate() {
        let mut v = f(a + len * off);
        n += 1;
        if k > 0 {
            v += f(b - len * off);
            n += 1;
        }
        let v = v * (len * w);
        fine += v;
        if k % 2 == 0 {
            coarse += v * 2.0;
        }
    }
    (fine, coarse, n)
}

const EXP_SINH_RANGE: (i32, i32) = (-80, 58);

/// Fine and half-density sums of the exp-sinh rule on `[0, ∞)`.
pub(crate) fn exp_sinh_sums<F: Fn(f64) -> Complex64>(f: F) -> (Complex64, Complex64, usize) {
    let mut fine = Complex64::default();
    let mut coarse = Complex64::default();
    let mut n = 0;
    for k in EXP_SINH_RANGE.0..=EXP_SINH_RANGE.1 {
        let tau = k as f64 * DE_STEP;
        let x = (HALF_PI * tau.sinh()).exp();
        let w = x * HALF_PI * tau.cosh() * DE_STEP;
        let fx = f(x);
        n += 1;
        if !(fx.re.is_finite() && fx.im.is_finite()) {
            continue;
        }
        let v = fx * w;
        fine += v;
        if k.rem_euclid(2) == 0 {
            coarse += v * 2.0;
        }
    }
    (fine, coarse, n)
}

/// Exp-sinh nodes on `[0, x_max]` at the fine step and at twice the step.
pub(crate) fn exp_sinh_nodes(x_max: f64) -> (Nodes, Nodes) {
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    for k in EXP_SINH_RANGE.0..=EXP_SINH_RANGE.1 {
        let tau = k as f64 * DE_STEP;
        let x = (HALF_PI * tau.sinh()).exp();
        if x > x_max {
            break;
        }
        let w = x * HALF_PI * tau.cosh() * DE_STEP;
        fine.push((x, w));
        if k.rem_euclid(2) == 0 {
            coarse.push((x, 2.0 * w));
        }
    }
    (fine, coarse)
}
