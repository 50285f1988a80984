//! Complete elliptic integral of the second kind by the arithmetic-geometric
//! mean, and the ellipse perimeter built on it.

use std::f64::consts::{FRAC_PI_2, PI};

const AGM_MAX_STEPS: usize = 64;

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    for _ in 0..AGM_MAX_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    a
}

/// `E(m) = ∫₀^{π/2} sqrt(1 − m sin²t) dt` for parameter `0 ≤ m ≤ 1`.
///
/// With `a₀ = 1`, `b₀ = sqrt(1 − m)`, `c₀² = m` and the AGM recursion
/// `c_{n+1} = (a_n − b_n)/2`:
///
/// ```text
/// E(m) = K(m) · (1 − Σ_{n≥0} 2^{n−1} c_n²),   K(m) = π / (2 AGM(1, b₀))
/// ```
pub fn complete_elliptic_e(m: f64) -> f64 {
    assert!((0.0..=1.0).contains(&m), "parameter m = {m} outside [0, 1]");
    if m == 0.0 {
        return FRAC_PI_2;
    }
    if m == 1.0 {
        return 1.0;
    }
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..AGM_MAX_STEPS {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        sum += pow * c * c;
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    FRAC_PI_2 / a * (1.0 - sum)
}

/// Perimeter of the ellipse with semi-axes `a` and `b` (either order).
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let (major, minor) = if a.abs() >= b.abs() {
        (a.abs(), b.abs())
    } else {
        (b.abs(), a.abs())
    };
    if major == 0.0 {
        return 0.0;
    }
    if minor == major {
        return 2.0 * PI * major;
    }
    let m = 1.0 - (minor / major).powi(2);
    4.0 * major * complete_elliptic_e(m)
}
