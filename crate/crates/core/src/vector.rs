//! Dense vector helpers. Vectors are plain `[f64]` slices.

use alloc::vec::Vec;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn two_norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for v in x {
        *v *= alpha;
    }
}

/// `x - y`
pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn is_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// `||x - y||_2 / ||y||_2`, or the absolute difference when `y` is zero.
pub fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    let num = two_norm(&sub(x, y));
    let den = two_norm(y);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
