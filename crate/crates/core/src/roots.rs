//! Bracketed scalar root finding.

/// Outcome of a bracketed solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's method on a bracket with f(a)·f(b) ≤ 0, stopping when the bracket is
/// narrower than `xtol` or f vanishes.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Root {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Root {
            x: a,
            fx: fa,
            iterations: 0,
            converged: true,
        };
    }
    if fb == 0.0 {
        return Root {
            x: b,
            fx: fb,
            iterations: 0,
            converged: true,
        };
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 1..=max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Root {
                x: b,
                fx: fb,
                iterations: it,
                converged: true,
            };
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Root {
        x: b,
        fx: fb,
        iterations: max_iter,
        converged: false,
    }
}

/// Plain bisection down to bracket width `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Root {
    let (mut a, mut b) = (a, b);
    let fa = f(a);
    let mut sa = fa > 0.0;
    let mut fm = fa;
    for it in 1..=max_iter {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= xtol || mid == a || mid == b {
            return Root {
                x: mid,
                fx: fm,
                iterations: it,
                converged: true,
            };
        }
        fm = f(mid);
        if fm == 0.0 {
            return Root {
                x: mid,
                fx: 0.0,
                iterations: it,
                converged: true,
            };
        }
        if (fm > 0.0) == sa {
            a = mid;
            sa = fm > 0.0;
        } else {
            b = mid;
        }
    }
    Root {
        x: 0.5 * (a + b),
        fx: fm,
        iterations: max_iter,
        converged: false,
    }
}
