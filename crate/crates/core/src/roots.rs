//! Scalar root-finding helpers shared by the equilibrium and analysis code.

/// Bisection on a sign-changing bracket, run until the bracket cannot be
/// split further in floating point (or `max_iter` halvings).
///
/// Returns `None` when `f(lo)` and `f(hi)` have the same strict sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, max_iter: usize) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Scalar Newton iteration with a finite-difference derivative. Used by
/// tests and oracles that need an implicit solve independent of any closed
/// form.
pub fn newton_fd<F: Fn(f64) -> f64>(f: F, mut x: f64, tol: f64, max_iter: usize) -> Option<f64> {
    for _ in 0..max_iter {
        let fx = f(x);
        let h = 1e-7 * x.abs().max(1.0);
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let step = fx / d;
        x -= step;
        if step.abs() <= tol * x.abs().max(1.0) {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 200).is_none());
    }

    #[test]
    fn newton_cubic() {
        let r = newton_fd(|x| x * x * x - 8.0, 3.0, 1e-14, 100).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }
}
