//! Closed-form reference values used by `selftest`.
//!
//! Laurent expansions of Gamma quotients come from
//! `log Γ(1+x) = -γx + Σ_{k≥2} (-1)^k ζ(k) x^k / k`, with `ζ(k)` summed
//! directly plus an Euler–Maclaurin tail. Nothing here touches the
//! quadrature or recurrence code.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(k)` for `k ≥ 2`.
pub fn zeta(k: u32) -> f64 {
    assert!(k >= 2, "zeta needs k >= 2");
    let n = 100.0f64;
    let kf = k as f64;
    let head: f64 = (1..100).rev().map(|j| (j as f64).powf(-kf)).sum();
    let tail = n.powf(1.0 - kf) / (kf - 1.0) + 0.5 * n.powf(-kf) + kf * n.powf(-kf - 1.0) / 12.0
        - kf * (kf + 1.0) * (kf + 2.0) * n.powf(-kf - 3.0) / 720.0
        + kf * (kf + 1.0) * (kf + 2.0) * (kf + 3.0) * (kf + 4.0) * n.powf(-kf - 5.0) / 30240.0;
    head + tail
}

/// Taylor coefficients of `log Γ(1+x)` through `x^order`.
pub fn log_gamma_1p(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|k| match k {
            0 => 0.0,
            1 => -EULER_GAMMA,
            _ => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * zeta(k as u32) / k as f64
            }
        })
        .collect()
}

/// `exp` of a power series with the given coefficients.
pub fn series_exp(a: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; a.len()];
    if a.is_empty() {
        return b;
    }
    b[0] = a[0].exp();
    for n in 1..a.len() {
        b[n] = (1..=n).map(|k| k as f64 * a[k] * b[n - k]).sum::<f64>() / n as f64;
    }
    b
}

/// Taylor coefficients of `Π Γ(1 + α_i ε)^{p_i}`.
pub fn gamma_product(factors: &[(f64, i32)], order: usize) -> Vec<f64> {
    let l = log_gamma_1p(order);
    let log: Vec<f64> = (0..=order)
        .map(|k| factors.iter().map(|&(alpha, p)| p as f64 * alpha.powi(k as i32) * l[k]).sum())
        .collect();
    series_exp(&log)
}

/// A Laurent expansion `Σ coeffs[i] ε^{min_exp + i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSeries {
    pub min_exp: i64,
    pub coeffs: Vec<f64>,
}

impl OracleSeries {
    pub fn coeff(&self, e: i64) -> f64 {
        if e < self.min_exp {
            return 0.0;
        }
        self.coeffs.get((e - self.min_exp) as usize).copied().unwrap_or(f64::NAN)
    }
}

/// `∫ (x_1 ⋯ x_n)^s` over the standard simplex is `Γ(s+1)^n / Γ(ns+n+1)`;
/// at `s = -1 + ε` this is `ε^{-n} Γ(1+ε)^n / Γ(1+nε)`.
pub fn monomial_product_at_minus_one(n: usize, terms: usize) -> OracleSeries {
    OracleSeries {
        min_exp: -(n as i64),
        coeffs: gamma_product(&[(1.0, n as i32), (n as f64, -1)], terms - 1),
    }
}

/// `∫_0^1 (x(1-x))^s = Γ(s+1)² / Γ(2s+2)`; at `s = -1 + ε` this is
/// `(2/ε) Γ(1+ε)² / Γ(1+2ε)`.
pub fn beta_at_minus_one(terms: usize) -> OracleSeries {
    let g = gamma_product(&[(1.0, 2), (2.0, -1)], terms - 1);
    OracleSeries { min_exp: -1, coeffs: g.iter().map(|c| 2.0 * c).collect() }
}
