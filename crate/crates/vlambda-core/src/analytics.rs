//! Exponent constants, convergence checks, prime-reciprocal symmetric sums,
//! exponent fitting over count series, and the comparison statistics
//! (φ-image counting, multiplication table, ω distribution).

use serde::Serialize;

use crate::arith::{self, primes_up_to, PrimeTables};
use crate::count::{self, CountSeries};
use crate::error::{Error, Result};

/// Exponent of the asymptotic density of λ-values:
/// 1 − (1 + log log 2) / log 2 = 0.08607133…
pub fn eta() -> f64 {
    use std::f64::consts::LN_2;
    1.0 - (1.0 + LN_2.ln()) / LN_2
}

/// Exponent of the earlier upper bound: 1 − e·log 2 / 2 = 0.05791530…
pub fn alpha() -> f64 {
    use std::f64::consts::{E, LN_2};
    1.0 - E * LN_2 / 2.0
}

/// Exponent of the earlier constructive lower bound.
pub const LP_LOWER_EXPONENT: f64 = 0.359052;

/// Exponent achieved by the k-prime construction:
/// β_k = 1 − k/log(2ᵏ−1) · (1 + log log(2ᵏ−1) − log k). β_k → η.
pub fn beta_k(k: u32) -> f64 {
    let t = (2f64).powi(k as i32) - 1.0;
    1.0 - (k as f64 / t.ln()) * (1.0 + t.ln().ln() - (k as f64).ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub eta: f64,
    pub alpha: f64,
    pub lp_lower_exponent: f64,
    /// (k, β_k) for k = 2..=k_max.
    pub beta: Vec<(u32, f64)>,
}

pub fn constants(k_max: u32) -> Result<ExponentReport> {
    if !(2..=60).contains(&k_max) {
        return Err(Error::Domain(format!("k_max = {k_max} outside 2..=60")));
    }
    Ok(ExponentReport {
        eta: eta(),
        alpha: alpha(),
        lp_lower_exponent: LP_LOWER_EXPONENT,
        beta: (2..=k_max).map(|k| (k, beta_k(k))).collect(),
    })
}

/// Table of (k, β_k, β_k − η) for k = 2..=k_max.
pub fn beta_convergence(k_max: u32) -> Result<Vec<(u32, f64, f64)>> {
    if !(2..=60).contains(&k_max) {
        return Err(Error::Domain(format!("k_max = {k_max} outside 2..=60")));
    }
    let e = eta();
    Ok((2..=k_max).map(|k| (k, beta_k(k), beta_k(k) - e)).collect())
}

/// f(t) = k log(2^{2k−t} − 2^{k+1−t} + 1) − (2k−t) log(2ᵏ−1): zero at both
/// endpoints, strictly convex, hence negative between them.
pub fn f_exponent(k: u32, t: f64) -> f64 {
    let k = k as f64;
    k * ((2f64).powf(2.0 * k - t) - (2f64).powf(k + 1.0 - t) + 1.0).ln()
        - (2.0 * k - t) * ((2f64).powf(k) - 1.0).ln()
}

/// Exact second derivative of `f_exponent` in t.
pub fn f_exponent_second(k: u32, t: f64) -> f64 {
    let kf = k as f64;
    let ln2 = std::f64::consts::LN_2;
    let denom = (2f64).powf(2.0 * kf - t) - (2f64).powf(kf + 1.0 - t) + 1.0;
    kf * ln2 * ln2 * ((2f64).powf(2.0 * kf) - (2f64).powf(kf + 1.0)) * (2f64).powf(-t)
        / (denom * denom)
}

#[derive(Debug, Clone, Serialize)]
pub struct FProfile {
    pub k: u32,
    pub f_at_zero: f64,
    pub f_at_k: f64,
    pub max_interior: f64,
    pub min_interior: f64,
    pub min_second_derivative: f64,
}

/// Evaluate f on `grid_points` evenly spaced interior points (plus the
/// endpoints for the second derivative).
pub fn f_profile(k: u32, grid_points: usize) -> Result<FProfile> {
    if k < 2 || grid_points < 3 {
        return Err(Error::Domain("need k >= 2 and at least 3 grid points".into()));
    }
    let mut max_interior = f64::NEG_INFINITY;
    let mut min_interior = f64::INFINITY;
    let mut min_second = f64::INFINITY;
    for i in 0..=grid_points + 1 {
        let t = k as f64 * i as f64 / (grid_points + 1) as f64;
        let f2 = f_exponent_second(k, t);
        min_second = min_second.min(f2);
        if i > 0 && i <= grid_points {
            let f = f_exponent(k, t);
            max_interior = max_interior.max(f);
            min_interior = min_interior.min(f);
        }
    }
    Ok(FProfile {
        k,
        f_at_zero: f_exponent(k, 0.0),
        f_at_k: f_exponent(k, k as f64),
        max_interior,
        min_interior,
        min_second_derivative: min_second,
    })
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Power sums P_j = Σ_{p ≤ x} 1/pʲ for j = 1..=h, compensated and summed in
/// a fixed block order so the result is independent of the worker count.
pub fn prime_reciprocal_power_sums(primes: &[u64], h: u32) -> Vec<f64> {
    use rayon::prelude::*;
    const BLOCK: usize = 1 << 16;
    let partials: Vec<Vec<f64>> = primes
        .par_chunks(BLOCK)
        .map(|block| {
            let mut sums = vec![Kahan::default(); h as usize];
            for &p in block {
                let inv = 1.0 / p as f64;
                let mut powed = 1.0;
                for s in sums.iter_mut() {
                    powed *= inv;
                    s.add(powed);
                }
            }
            sums.iter().map(|s| s.sum).collect()
        })
        .collect();
    let mut totals = vec![Kahan::default(); h as usize];
    for block in &partials {
        for (t, &v) in totals.iter_mut().zip(block) {
            t.add(v);
        }
    }
    totals.iter().map(|t| t.sum).collect()
}

/// Newton's identities: elementary symmetric functions e_0..e_h from the
/// power sums P_1..P_h, via m·e_m = Σ_{i=1}^{m} (−1)^{i−1} e_{m−i} P_i.
pub fn elementary_symmetric_from_power_sums(power_sums: &[f64]) -> Vec<f64> {
    let h = power_sums.len();
    let mut e = vec![0.0; h + 1];
    e[0] = 1.0;
    for m in 1..=h {
        let mut acc = 0.0;
        for i in 1..=m {
            let term = e[m - i] * power_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[m] = acc / m as f64;
    }
    e
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub x: u64,
    pub h: u32,
    /// e_h over { 1/p : p ≤ x } — exactly Σ μ²(b)/b over b with ω(b) = h
    /// and P⁺(b) ≤ x.
    pub exact_sum: f64,
    /// (log log x)^h / h!.
    pub reference: f64,
    pub ratio: f64,
}

/// The symmetric-sum to reference ratio at (x, h). Valid for
/// 1 ≤ h ≤ 2 log log x and x ≤ 10⁸; tables must cover x.
pub fn lemma1_ratio(x: u64, h: u32, tables: &PrimeTables) -> Result<Lemma1Report> {
    if x > 100_000_000 {
        return Err(Error::Range(format!("x = {x} exceeds the 1e8 budget")));
    }
    if x > tables.limit() {
        return Err(Error::Range(format!(
            "x = {x} beyond the table limit {}",
            tables.limit()
        )));
    }
    let loglog = (x as f64).ln().ln();
    if h < 1 || (h as f64) > 2.0 * loglog {
        return Err(Error::Domain(format!(
            "h = {h} outside 1 <= h <= 2 log log x = {:.3}",
            2.0 * loglog
        )));
    }
    let n_primes = tables.prime_count_up_to(x)? as usize;
    let power_sums = prime_reciprocal_power_sums(&tables.primes()[..n_primes], h);
    let e = elementary_symmetric_from_power_sums(&power_sums);
    let mut reference = 1.0;
    for j in 1..=h {
        reference *= loglog / j as f64;
    }
    Ok(Lemma1Report {
        x,
        h,
        exact_sum: e[h as usize],
        reference,
        ratio: e[h as usize] / reference,
    })
}

/// (x, V(x), η̂(x)) per checkpoint; η̂ is recomputed from x and V(x) so a
/// round trip through a series file reproduces the same digits.
pub fn exponent_fit(series: &CountSeries) -> Vec<(u64, u64, Option<f64>)> {
    series
        .checkpoints
        .iter()
        .map(|cp| (cp.x, cp.v_lambda, count::eta_hat(cp.x, cp.v_lambda)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaDistribution {
    pub x: u64,
    pub image_count: u64,
    /// Mean ω over λ-values ≤ x.
    pub mean_image: f64,
    /// Mean ω over all n ≤ x.
    pub mean_all: f64,
    /// (1/log 2) log log x.
    pub reference: f64,
}

/// Mean number of distinct prime factors over the λ-values up to x versus
/// all integers up to x. Tables must cover x + 1 (for the membership sieve).
pub fn omega_distribution(x: u64, tables: &PrimeTables) -> Result<OmegaDistribution> {
    if x < 2 || x > 10_000_000 {
        return Err(Error::Range(format!("x = {x} outside 2..=1e7")));
    }
    if tables.limit() < x + 1 {
        return Err(Error::Range(format!(
            "omega distribution to {x} needs tables covering {}",
            x + 1
        )));
    }
    let mut sum_all: u64 = 0;
    let mut sum_image: u64 = 0;
    let mut image_count: u64 = 0;
    const SEG: u64 = 1 << 20;
    let mut lo = 1u64;
    while lo <= x {
        let hi = (lo + SEG).min(x + 1);
        let members = count::segment_members(lo, hi, tables.primes());
        for n in lo..hi {
            let omega = arith::factor(n, tables)?.omega() as u64;
            sum_all += omega;
            if members[(n - lo) as usize] {
                sum_image += omega;
                image_count += 1;
            }
        }
        lo = hi;
    }
    Ok(OmegaDistribution {
        x,
        image_count,
        mean_image: sum_image as f64 / image_count as f64,
        mean_all: sum_all as f64 / x as f64,
        reference: (x as f64).ln().ln() / std::f64::consts::LN_2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultTableReport {
    pub n: u64,
    /// Number of distinct products i·j with 1 ≤ i ≤ j ≤ n.
    pub count: u64,
    /// log(n²/count) / log log n, for n ≥ 16.
    pub exponent: Option<f64>,
}

/// Distinct entries of the n × n multiplication table, by product bitmap.
pub fn mult_table_count(n: u64) -> Result<MultTableReport> {
    if n < 1 || n > (1 << 14) {
        return Err(Error::Range(format!("n = {n} outside 1..=2^14")));
    }
    let size = (n * n) as usize + 1;
    let mut bits = vec![0u64; size / 64 + 1];
    for i in 1..=n {
        for j in i..=n {
            let p = (i * j) as usize;
            bits[p / 64] |= 1 << (p % 64);
        }
    }
    let count: u64 = bits.iter().map(|w| w.count_ones() as u64).sum();
    let exponent = if n >= 16 {
        Some(((n * n) as f64 / count as f64).ln() / (n as f64).ln().ln())
    } else {
        None
    };
    Ok(MultTableReport { n, count, exponent })
}

/// Set-based cross-check for small n.
pub fn mult_table_bruteforce(n: u64) -> Result<u64> {
    if n < 1 || n > 1024 {
        return Err(Error::Range(format!("brute force capped at 1024, got {n}")));
    }
    let mut set = std::collections::BTreeSet::new();
    for i in 1..=n {
        for j in i..=n {
            set.insert(i * j);
        }
    }
    Ok(set.len() as u64)
}

/// Least M such that φ(m) > x is guaranteed for every m > M by the classical
/// lower bound φ(m) > m / (e^γ log log m + 3 / log log m), valid for m ≥ 3.
/// The right side is increasing for m ≥ 17, so a binary search suffices and
/// the result is floored at 16.
pub fn phi_scan_bound(x: u64) -> u64 {
    let guard = |m: u64| -> f64 {
        let ll = (m as f64).ln().ln();
        let e_gamma = 0.577_215_664_901_532_9_f64.exp();
        m as f64 / (e_gamma * ll + 3.0 / ll)
    };
    let mut lo = 17u64; // first m where monotonicity is safe
    let mut hi = 64u64;
    while guard(hi) <= x as f64 {
        hi *= 2;
    }
    // least m in (lo, hi] with guard(m) > x
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if guard(mid) > x as f64 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi - 1).max(16)
}

/// Number of distinct φ-values ≤ x, by a segmented totient sieve over
/// m ≤ phi_scan_bound(x).
pub fn phi_image_count(x: u64, tables: &PrimeTables) -> Result<u64> {
    if x < 1 || x > 10_000_000 {
        return Err(Error::Range(format!("x = {x} outside 1..=1e7")));
    }
    let m_max = phi_scan_bound(x);
    let root = m_max.isqrt() + 1;
    let local;
    let primes: &[u64] = if tables.limit() >= root {
        let k = tables.prime_count_up_to(root)? as usize;
        &tables.primes()[..k]
    } else {
        local = primes_up_to(root);
        &local
    };

    let mut seen = vec![0u64; (x / 64 + 1) as usize];
    const SEG: u64 = 1 << 20;
    let mut rem = vec![0u64; SEG as usize];
    let mut phi = vec![0u64; SEG as usize];
    let mut lo = 1u64;
    while lo <= m_max {
        let hi = (lo + SEG).min(m_max + 1);
        let len = (hi - lo) as usize;
        for (i, m) in (lo..hi).enumerate() {
            rem[i] = m;
            phi[i] = 1;
        }
        for &p in primes {
            if p * p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0u32;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    e += 1;
                }
                let mut contrib = p - 1;
                for _ in 1..e {
                    contrib *= p;
                }
                phi[i] *= contrib;
                m += p;
            }
        }
        for i in 0..len {
            let mut v = phi[i];
            if rem[i] > 1 {
                v *= rem[i] - 1; // leftover factor is a prime > sqrt
            }
            if v <= x {
                seen[(v / 64) as usize] |= 1 << (v % 64);
            }
        }
        lo = hi;
    }
    seen[0] &= !1; // value 0 never occurs; keep the count honest
    Ok(seen.iter().map(|w| w.count_ones() as u64).sum())
}

/// Direct enumeration oracle: #distinct { φ(m) : m ≤ m_max } ∩ [1, x_max].
pub fn phi_image_bruteforce(x_max: u64, m_max: u64, tables: &PrimeTables) -> Result<u64> {
    let mut seen = vec![false; x_max as usize + 1];
    for m in 1..=m_max {
        let v = arith::euler_phi(m, tables)?;
        if v <= x_max {
            seen[v as usize] = true;
        }
    }
    Ok(seen.iter().skip(1).filter(|&&b| b).count() as u64)
}
