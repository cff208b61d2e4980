//! Normal-distribution special functions and exactly rounded summation.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::OnceLock;

use statrs::function::erf::{erfc, erfc_inv};

use crate::quadrature::{gauss_legendre, Node};

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF, accurate in the lower tail.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function, accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Standard normal quantile of `p`, where `q = 1 - p` is supplied separately
/// so that both tails keep full relative precision.
pub fn normal_quantile(p: f64, q: f64) -> f64 {
    // lower-tail form, refined by two Newton steps on the accurate side
    let (tail, sign) = if p <= q { (p, 1.0) } else { (q, -1.0) };
    if tail <= 0.0 {
        return -sign * f64::INFINITY;
    }
    let mut z = -SQRT_2 * erfc_inv(2.0 * tail);
    for _ in 0..2 {
        let density = normal_pdf(z);
        if density == 0.0 {
            break;
        }
        z -= (normal_cdf(z) - tail) / density;
    }
    sign * z
}

fn plackett_nodes() -> &'static [Node] {
    static NODES: OnceLock<Vec<Node>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(64))
}

/// Bivariate standard normal CDF `P(Z1 <= h, Z2 <= k)` with correlation `r`.
///
/// Uses Plackett's identity in the angular form
/// `Φ(h)Φ(k) + (1/2π) ∫_0^{asin r} exp(-(h² - 2hk sinθ + k²) / (2cos²θ)) dθ`,
/// which has a smooth integrand for |r| < 1.
pub fn bivariate_normal_cdf(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        return 0.0;
    }
    if h == f64::INFINITY {
        return normal_cdf(k);
    }
    if k == f64::INFINITY {
        return normal_cdf(h);
    }
    if r >= 1.0 {
        return normal_cdf(h.min(k));
    }
    if r <= -1.0 {
        return (normal_cdf(h) - normal_sf(k)).max(0.0);
    }
    let base = normal_cdf(h) * normal_cdf(k);
    if r == 0.0 {
        return base;
    }
    let upper = r.asin();
    let mut acc = 0.0;
    for node in plackett_nodes() {
        let theta = upper * node.x;
        let (s, c) = theta.sin_cos();
        acc += node.w * (-(h * h - 2.0 * h * k * s + k * k) / (2.0 * c * c)).exp();
    }
    (base + acc * upper / (2.0 * PI)).clamp(0.0, 1.0)
}

/// Correctly rounded sum of `values` (Shewchuk's algorithm).
///
/// The result does not depend on the order of the summands.
pub fn fsum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    // Round-half-even correction over the partials, as in CPython's fsum.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

/// `a·b` as an unevaluated sum `hi + lo` with no rounding error.
pub fn two_product(a: f64, b: f64) -> [f64; 2] {
    let hi = a * b;
    [hi, a.mul_add(b, -hi)]
}

/// Product of `factors` in a canonical order (ascending magnitude), so that
/// the rounding does not depend on how the factors were ordered and flipping
/// every sign flips only the sign of the result.
pub fn canonical_product(factors: &mut [f64]) -> f64 {
    factors.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    let mut magnitude = 1.0;
    let mut negative = false;
    for &f in factors.iter() {
        magnitude *= f.abs();
        negative ^= f.is_sign_negative() && f != 0.0;
    }
    if magnitude == 0.0 {
        0.0
    } else if negative {
        -magnitude
    } else {
        magnitude
    }
}
