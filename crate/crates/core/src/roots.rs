//! Bracketing root finders used by the model and chord searches.

/// Bisection on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
///
/// Stops when the bracket is narrower than `x_tol` or `|f(mid)| < f_tol`.
/// Endpoint values may be infinite; only their signs are used. The returned
/// abscissa always lies strictly inside the original bracket when the
/// bracket is wider than one ulp.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, x_tol: f64, f_tol: f64) -> f64 {
    let mut fa = f(a);
    debug_assert!(fa.signum() != f(b).signum() || fa == 0.0);
    for _ in 0..200 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 || fm.abs() < f_tol || b - a <= x_tol {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    a + 0.5 * (b - a)
}

/// Golden-section minimisation of `g` on `[a, b]`.
pub fn golden_min<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, x_tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > x_tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Uniform grid of `n` nodes covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
