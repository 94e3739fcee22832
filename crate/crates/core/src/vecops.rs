//! Small dense-vector kernels on `f64` slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y ← y + a·x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a·x + b·y`
pub fn lincomb(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

pub fn normalized(x: &[f64]) -> Option<Vec<f64>> {
    let n = norm(x);
    (n > 0.0 && n.is_finite()).then(|| scale(1.0 / n, x))
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// `|a − b| ≤ atol + rtol·max(|a|, |b|)`
pub fn close(a: f64, b: f64, atol: f64, rtol: f64) -> bool {
    (a - b).abs() <= atol + rtol * a.abs().max(b.abs())
}

/// Angle in radians between two nonzero vectors, ignoring sign.
pub fn unsigned_angle(a: &[f64], b: &[f64]) -> f64 {
    // acos(cos θ) loses everything below ~1e-8; the chord between the unit
    // vectors keeps full precision for small angles.
    let ua = scale(1.0 / norm(a), a);
    let ub = scale(1.0 / norm(b), b);
    let chord = if dot(&ua, &ub) >= 0.0 { sub(&ua, &ub) } else { add(&ua, &ub) };
    2.0 * (norm(&chord) / 2.0).min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels() {
        let a = [1.0, 2.0, 2.0];
        assert_eq!(norm(&a), 3.0);
        let mut y = vec![1.0, 1.0, 1.0];
        axpy(2.0, &a, &mut y);
        assert_eq!(y, vec![3.0, 5.0, 5.0]);
        assert_eq!(lincomb(1.0, &a, -1.0, &a), vec![0.0; 3]);
        assert!(normalized(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn angle_is_sign_blind() {
        let a = [1.0, 0.0];
        let b = [-2.0, 0.0];
        assert!(unsigned_angle(&a, &b) < 1e-15);
        let c = [0.0, 3.0];
        assert!((unsigned_angle(&a, &c) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let d = [1.0, 1e-10];
        assert!((unsigned_angle(&a, &d) - 1e-10).abs() < 1e-20);
    }
}
