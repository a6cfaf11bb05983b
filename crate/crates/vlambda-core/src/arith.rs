//! Exact integer arithmetic primitives: prime tables, factorization, the
//! Carmichael function λ, Euler's φ, and the small multiplicative-function
//! toolbox (lcm, divisors, ω, μ, τ_k) everything else is built on.
//!
//! All arithmetic is 64-bit unsigned with overflow-checked products where an
//! intermediate could exceed the width; λ and φ of any in-range `n` fit by
//! construction since both divide or equal values bounded by `n`.

use crate::error::{Error, Result};

/// Hard ceiling for [`PrimeTables::build`]. Smallest-prime-factor entries are
/// stored as `u32`, so the sieve supports limits up to `u32::MAX`; memory is
/// roughly 4 bytes per integer plus the prime list.
pub const MAX_TABLE_LIMIT: u64 = u32::MAX as u64;

/// Sieve tables: smallest prime factor per integer, the ascending prime list,
/// and a primality bitset, all up to an inclusive `limit`.
///
/// Immutable after construction and safe to share across threads.
pub struct PrimeTables {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
    prime_bits: Vec<u64>,
}

impl PrimeTables {
    /// Sieve everything up to `limit` (inclusive). Cost is
    /// O(limit log log limit) time and ~4 bytes per integer.
    pub fn build(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Config(format!("table limit {limit} is below 2")));
        }
        if limit > MAX_TABLE_LIMIT {
            return Err(Error::Config(format!(
                "table limit {limit} exceeds the {MAX_TABLE_LIMIT} ceiling"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        let mut prime_bits = vec![0u64; n / 64 + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
                prime_bits[i / 64] |= 1u64 << (i % 64);
                let start = match i.checked_mul(i) {
                    Some(sq) if sq <= n => sq,
                    _ => continue,
                };
                for j in (start..=n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        Ok(Self { limit, spf, primes, prime_bits })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ascending list of all primes `<= limit`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// π(x): the number of primes `<= x`. Requires `x <= limit`.
    pub fn prime_count_up_to(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(Error::Range(format!(
                "pi({x}) requested but tables stop at {}",
                self.limit
            )));
        }
        Ok(self.primes.partition_point(|&p| p <= x) as u64)
    }

    /// Primality for `n <= limit` via the bitset.
    pub fn is_prime(&self, n: u64) -> bool {
        debug_assert!(n <= self.limit);
        if n > self.limit {
            return false;
        }
        self.prime_bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    /// Primality for `n <= limit²`: bitset lookup when in range, otherwise
    /// trial division by the stored primes up to √n.
    pub fn is_prime_checked(&self, n: u64) -> Result<bool> {
        if n <= self.limit {
            return Ok(n >= 2 && self.is_prime(n));
        }
        let limit_sq = (self.limit as u128) * (self.limit as u128);
        if n as u128 > limit_sq {
            return Err(Error::Range(format!(
                "primality of {n} needs tables past {}²",
                self.limit
            )));
        }
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest prime factor of `n` for `2 <= n <= limit`.
    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::Range(format!(
                "spf({n}) outside table range 2..={}",
                self.limit
            )));
        }
        Ok(self.spf[n as usize] as u64)
    }
}

/// A number as its sorted prime-power decomposition. The represented value is
/// the product of the prime powers; it is *not* stored, so factorizations
/// whose value exceeds 64 bits (maximal witnesses, for instance) stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// The empty factorization of 1.
    pub fn one() -> Self {
        Self { factors: Vec::new() }
    }

    /// Build from `(prime, exponent)` pairs. Primes must be strictly
    /// ascending and ≥ 2, exponents ≥ 1. Primality itself is the caller's
    /// contract; it is not re-verified here.
    pub fn from_prime_powers(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Domain("primes must be strictly ascending".into()));
            }
        }
        if factors.iter().any(|&(p, e)| p < 2 || e == 0) {
            return Err(Error::Domain("need prime >= 2 and exponent >= 1".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The represented integer, if it fits in 64 bits.
    pub fn value_checked(&self) -> Option<u64> {
        let mut v: u64 = 1;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                v = v.checked_mul(p)?;
            }
        }
        Some(v)
    }

    /// ω: number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Möbius μ: 0 unless squarefree, otherwise (−1)^ω.
    pub fn mobius(&self) -> i32 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// P⁺: largest prime factor, with P⁺(1) = 0.
    pub fn largest_prime_factor(&self) -> u64 {
        self.factors.last().map_or(0, |&(p, _)| p)
    }

    /// P⁻: smallest prime factor, with P⁻(1) = u64::MAX standing in for ∞.
    pub fn smallest_prime_factor(&self) -> u64 {
        self.factors.first().map_or(u64::MAX, |&(p, _)| p)
    }

    /// τ_k: the number of ordered factorizations into k parts,
    /// ∏ C(e + k − 1, k − 1) over the exponents e.
    pub fn tau_k(&self, k: u32) -> Result<u64> {
        if k == 0 {
            return Err(Error::Domain("tau_k needs k >= 1".into()));
        }
        let mut out: u64 = 1;
        for &(_, e) in &self.factors {
            let ways = binomial(e as u64 + k as u64 - 1, k as u64 - 1)
                .ok_or(Error::Overflow("tau_k"))?;
            out = out.checked_mul(ways).ok_or(Error::Overflow("tau_k"))?;
        }
        Ok(out)
    }

    /// All divisors in ascending order. Count is ∏(e + 1); the caller keeps
    /// that manageable.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs: Vec<u64> = vec![1];
        for &(p, e) in &self.factors {
            let prev = divs.len();
            let mut pe: u64 = 1;
            for _ in 0..e {
                pe *= p;
                for i in 0..prev {
                    divs.push(divs[i] * pe);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Binomial coefficient with overflow checking.
fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut num: u128 = 1;
    for i in 0..k {
        num = num.checked_mul((n - i) as u128)?;
        num /= (i + 1) as u128;
    }
    u64::try_from(num).ok()
}

/// Factor `n`. For `n <= limit` this is a smallest-prime-factor walk; for
/// `limit < n <= limit²` it is trial division by the stored primes up to √n
/// (at most one residual prime survives, which must then be prime).
pub fn factor(n: u64, tables: &PrimeTables) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Range("cannot factor 0".into()));
    }
    if n == 1 {
        return Ok(Factorization::one());
    }
    let mut factors = Vec::new();
    if n <= tables.limit {
        let mut m = n as usize;
        while m > 1 {
            let p = tables.spf[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
    } else {
        let limit_sq = (tables.limit as u128) * (tables.limit as u128);
        let mut m = n;
        let mut certified = false;
        for &p in &tables.primes {
            if p * p > m {
                certified = true; // whatever is left is prime
                break;
            }
            if m % p == 0 {
                let mut e = 0u32;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
        }
        if m > 1 {
            // with every factor <= limit removed, a residual <= limit² has
            // no room for two prime factors
            if !certified && m as u128 > limit_sq {
                return Err(Error::Range(format!(
                    "factor({n}) leaves residual {m} past {}²",
                    tables.limit
                )));
            }
            factors.push((m, 1));
        }
        factors.sort_unstable_by_key(|&(p, _)| p);
    }
    Ok(Factorization { factors })
}

/// λ(pᵃ): p^{a−1}(p−1) for odd p (and for p = 2 with a ≤ 2); 2^{a−2} for
/// p = 2, a ≥ 3. Rejects composite `p` by trial division.
pub fn lambda_prime_power(p: u64, a: u32) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    debug_assert!(a >= 1);
    lambda_prime_power_unchecked(p, a).ok_or(Error::Overflow("lambda_prime_power"))
}

fn is_prime_u64(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn lambda_prime_power_unchecked(p: u64, a: u32) -> Option<u64> {
    if p == 2 {
        return match a {
            1 => Some(1),
            2 => Some(2),
            _ => 1u64.checked_shl(a - 2),
        };
    }
    let mut v = p - 1;
    for _ in 1..a {
        v = v.checked_mul(p)?;
    }
    Some(v)
}

/// λ(n) = lcm of λ(pᵃ) over the prime powers pᵃ ∥ n. λ(1) = 1.
pub fn carmichael_lambda(n: u64, tables: &PrimeTables) -> Result<u64> {
    carmichael_lambda_of(&factor(n, tables)?)
}

/// λ evaluated directly on a factorization, without needing its value to fit
/// in 64 bits. The result must fit, or an overflow error is returned.
pub fn carmichael_lambda_of(f: &Factorization) -> Result<u64> {
    let mut l: u64 = 1;
    for &(p, e) in f.factors() {
        let lp = lambda_prime_power_unchecked(p, e)
            .ok_or(Error::Overflow("carmichael_lambda"))?;
        l = lcm_checked(l, lp)?;
    }
    Ok(l)
}

/// φ(n) = ∏ p^{e−1}(p−1). φ(1) = 1.
pub fn euler_phi(n: u64, tables: &PrimeTables) -> Result<u64> {
    euler_phi_of(&factor(n, tables)?)
}

pub fn euler_phi_of(f: &Factorization) -> Result<u64> {
    let mut v: u64 = 1;
    for &(p, e) in f.factors() {
        let mut pe = p - 1;
        for _ in 1..e {
            pe = pe.checked_mul(p).ok_or(Error::Overflow("euler_phi"))?;
        }
        v = v.checked_mul(pe).ok_or(Error::Overflow("euler_phi"))?;
    }
    Ok(v)
}

/// n is a Carmichael number iff it is composite and λ(n) | n − 1.
pub fn is_carmichael_number(n: u64, tables: &PrimeTables) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain(format!("{n} is below 2")));
    }
    let f = factor(n, tables)?;
    let composite = !(f.factors().len() == 1 && f.factors()[0].1 == 1);
    Ok(composite && (n - 1) % carmichael_lambda_of(&f)? == 0)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// lcm with a double-width intermediate; errors instead of wrapping.
pub fn lcm_checked(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::Domain("lcm of zero".into()));
    }
    let g = gcd(a, b);
    let wide = (a / g) as u128 * b as u128;
    u64::try_from(wide).map_err(|_| Error::Overflow("lcm"))
}

/// All primes up to `limit` (inclusive) via a segmented, odd-only
/// Eratosthenes sieve. Unlike [`PrimeTables`], memory is only the output
/// list plus an O(√limit) working set, so this is the prime source for
/// counting runs far beyond any sensible table limit.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = limit.isqrt();
    // base odd primes <= sqrt(limit)
    let mut base_sieve = vec![false; (root / 2 + 1) as usize];
    let mut base: Vec<u64> = Vec::new();
    let mut i = 3u64;
    while i <= root {
        if !base_sieve[(i / 2) as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                base_sieve[(j / 2) as usize] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }

    let mut primes = Vec::with_capacity(estimated_prime_count(limit));
    primes.push(2);
    const SEG_ODDS: u64 = 1 << 18;
    let mut flags = vec![false; SEG_ODDS as usize];
    // odd numbers 3, 5, ... <= limit, indexed by (n - 3) / 2
    let odd_count = if limit >= 3 { (limit - 3) / 2 + 1 } else { 0 };
    let mut lo = 0u64;
    while lo < odd_count {
        let hi = (lo + SEG_ODDS).min(odd_count);
        let len = (hi - lo) as usize;
        flags[..len].fill(false);
        let seg_first = 2 * lo + 3;
        let seg_last = 2 * (hi - 1) + 3;
        for &p in &base {
            if p * p > seg_last {
                break;
            }
            let mut start = p * p;
            if start < seg_first {
                let k = (seg_first - start).div_ceil(2 * p);
                start += 2 * p * k;
            }
            let mut j = start;
            while j <= seg_last {
                flags[((j - 3) / 2 - lo) as usize] = true;
                j += 2 * p;
            }
        }
        for (idx, &composite) in flags[..len].iter().enumerate() {
            if !composite {
                primes.push(2 * (lo + idx as u64) + 3);
            }
        }
        lo = hi;
    }
    primes
}

fn estimated_prime_count(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (x / x.ln() * 1.13) as usize
}
