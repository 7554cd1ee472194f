//! Legendre functions and real spherical harmonics.

use std::f64::consts::PI;

/// Legendre polynomials P_0(x)..=P_kmax(x).
pub fn legendre_all(k_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(k_max + 1);
    p.push(1.0);
    if k_max >= 1 {
        p.push(x);
    }
    for k in 2..=k_max {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        p.push(next);
    }
    p
}

/// Associated Legendre functions normalised so that ∫₋₁¹ P̄_k^m(x)² dx = 1.
///
/// Returned as a flat table indexed by [`lm_index`] for 0 ≤ m ≤ k ≤ k_max.
pub fn normalized_associated_legendre(k_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lm_index(k_max, k_max) + 1];
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..=k_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[lm_index(m, m)] = pmm;
        if m == k_max {
            break;
        }
        let mut prev2 = pmm;
        let mut prev1 = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
        out[lm_index(m + 1, m)] = prev1;
        for l in (m + 2)..=k_max {
            let a = |l: usize| {
                let (lf, mf) = (l as f64, m as f64);
                ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt()
            };
            let cur = a(l) * (x * prev1 - prev2 / a(l - 1));
            out[lm_index(l, m)] = cur;
            prev2 = prev1;
            prev1 = cur;
        }
    }
    out
}

/// Position of (k, m ≥ 0) in triangular tables.
pub const fn lm_index(k: usize, m: usize) -> usize {
    k * (k + 1) / 2 + m
}

/// Position of (k, q) with −k ≤ q ≤ k in square tables.
pub const fn kq_index(k: usize, q: i32) -> usize {
    k * k + (k as i32 + q) as usize
}

/// All orthonormal real spherical harmonics Y_kq(θ, φ) for k ≤ k_max, indexed
/// by [`kq_index`]. Negative q carries sin(|q|φ), positive q carries cos(qφ).
pub fn real_spherical_harmonics(k_max: usize, cos_theta: f64, phi: f64) -> Vec<f64> {
    let plm = normalized_associated_legendre(k_max, cos_theta);
    let mut out = vec![0.0; (k_max + 1) * (k_max + 1)];
    let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    for k in 0..=k_max {
        out[kq_index(k, 0)] = plm[lm_index(k, 0)] * inv_sqrt_2pi;
        for m in 1..=k {
            let p = plm[lm_index(k, m)] * inv_sqrt_pi;
            let (s, c) = (m as f64 * phi).sin_cos();
            out[kq_index(k, m as i32)] = p * c;
            out[kq_index(k, -(m as i32))] = p * s;
        }
    }
    out
}
