//! The shifted-prime construction: write a squarefree even n as
//!
//! ```text
//! n = a₀ ⋯ a_{k−1} · b₁ ⋯ b_{2ᵏ−1},      qᵢ = aᵢ·Bᵢ + 1 prime,
//! Bᵢ = ∏_{⌊j/2ⁱ⌋ odd} bⱼ
//! ```
//!
//! so that n = λ(q₀ ⋯ q_{k−1}). Each index j ∈ [1, 2ᵏ−1] is read as a bit
//! vector selecting which of the k shifted primes the part bⱼ feeds; Bᵢ is
//! the product over indices with bit i set, which makes j ↦ bits(j) a
//! bijection onto the nonempty subsets of {0, …, k−1}. Since 2ᵏ−1 has every
//! bit set, b_{2ᵏ−1} divides every Bᵢ, and requiring 2 | b_{2ᵏ−1} keeps all
//! the qᵢ − 1 even.
//!
//! `find_representations` enumerates assignments of the prime factors of n
//! to the k + 2ᵏ−1 parts and counts the assignments whose k products
//! aᵢBᵢ + 1 are all prime — the representation count r(n). The theoretical
//! parameters (smoothness bound y, per-part prime count l) degenerate at any
//! feasible scale, so the strict side conditions are individually
//! relaxable; the count S₁ = Σ μ²(n) r(n) and S₂ = Σ μ²(n) r²(n) then feed
//! the Cauchy lower bound #{r > 0} ≥ S₁²/S₂, which holds for any
//! nonnegative weights and is checked here in exact integer arithmetic.
//!
//! The dual-factorization combinatorics (two factorizations of the same b
//! agreeing on B₀ … B_{m−1}) live at the end of the module: the class
//! products B_v over the 2^m low-bit patterns v, the closed-form count of
//! compatible dual factorizations, and an exhaustive checker that equal
//! B-prefixes force equal class products.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, PrimeTables};
use crate::error::{Error, Result};

/// Which structural side conditions `find_representations` enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relaxations {
    /// P⁺(bⱼ) ≤ y < P⁻(aᵢ): small primes to b-parts, large to a-parts.
    pub smooth_rough_split: bool,
    /// ω(bⱼ) = l for every j.
    pub omega_l: bool,
    /// 2 | b_{2ᵏ−1}.
    pub even_last: bool,
    /// n ∈ (2^{−2k} x, x].
    pub range: bool,
}

impl Relaxations {
    /// Everything on.
    pub fn strict() -> Self {
        Self { smooth_rough_split: true, omega_l: true, even_last: true, range: true }
    }

    /// Only the evenness of the last part, which is what keeps the
    /// construction correct (qᵢ − 1 must be even); the asymptotic side
    /// conditions are dropped.
    pub fn relaxed() -> Self {
        Self { smooth_rough_split: false, omega_l: false, even_last: true, range: false }
    }
}

/// Scale-derived parameters of the construction.
#[derive(Debug, Clone, Copy)]
pub struct RepresentationParams {
    pub x: f64,
    pub k: u32,
    /// Smoothness threshold y = exp(log x / (200 k log log x)).
    pub y: f64,
    /// Per-part prime count l = ⌊ k log log y / ((2ᵏ−1) log(2ᵏ−1)) ⌋;
    /// negative values mean the formula left the meaningful range.
    pub l: i64,
    /// y < 3 or l < 1: the strict side conditions are unsatisfiable.
    pub degenerate: bool,
    pub relaxations: Relaxations,
}

/// Evaluate the parameter formulas at scale `x`. Requires x ≥ 16 (so that
/// log log x > 0) and k ≥ 2.
pub fn params_for(x: f64, k: u32) -> Result<RepresentationParams> {
    if !(x >= 16.0) {
        return Err(Error::Domain(format!("x = {x} must be at least 16")));
    }
    if !(2..=57).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 2..=57")));
    }
    let y = (x.ln() / (200.0 * k as f64 * x.ln().ln())).exp();
    let parts = (2f64).powi(k as i32) - 1.0;
    let l = ((k as f64) * y.ln().ln() / (parts * parts.ln())).floor() as i64;
    Ok(RepresentationParams {
        x,
        k,
        y,
        l,
        degenerate: y < 3.0 || l < 1,
        relaxations: Relaxations::strict(),
    })
}

/// The index sets Sᵢ = { j ∈ [1, 2ᵏ−1] : ⌊j/2ⁱ⌋ odd } = { j : bit i of j set },
/// so Bᵢ = ∏_{j ∈ Sᵢ} bⱼ.
pub fn index_sets(k: u32) -> Result<Vec<Vec<u32>>> {
    if !(2..=16).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 2..=16")));
    }
    let top = (1u32 << k) - 1;
    Ok((0..k)
        .map(|i| (1..=top).filter(|j| (j >> i) & 1 == 1).collect())
        .collect())
}

/// One witness tuple: n = ∏aᵢ·∏bⱼ with every qᵢ = aᵢBᵢ + 1 prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub n: u64,
    pub k: u32,
    /// a₀ … a_{k−1}, each > 1.
    pub a: Vec<u64>,
    /// b₁ … b_{2ᵏ−1} (index j stored at j − 1).
    pub b: Vec<u64>,
    /// B₀ … B_{k−1} derived from `b`.
    pub big_b: Vec<u64>,
    /// qᵢ = aᵢBᵢ + 1.
    pub q: Vec<u64>,
}

impl Representation {
    /// Structural invariants: part counts, the product identity, the Bᵢ
    /// derivation, and qᵢ = aᵢBᵢ + 1.
    pub fn validate(&self) -> Result<()> {
        let k = self.k as usize;
        let parts = (1usize << self.k) - 1;
        if self.a.len() != k || self.b.len() != parts || self.big_b.len() != k || self.q.len() != k
        {
            return Err(Error::Domain("representation part counts are off".into()));
        }
        if self.a.iter().any(|&a| a <= 1) {
            return Err(Error::Domain("every a part must exceed 1".into()));
        }
        let mut prod: u128 = 1;
        for &v in self.a.iter().chain(&self.b) {
            prod *= v as u128;
        }
        if prod != self.n as u128 {
            return Err(Error::Domain("parts do not multiply to n".into()));
        }
        for i in 0..k {
            let expect: u128 = (1..=parts as u32)
                .filter(|j| (j >> i) & 1 == 1)
                .map(|j| self.b[(j - 1) as usize] as u128)
                .product();
            if expect != self.big_b[i] as u128 {
                return Err(Error::Domain(format!("B_{i} does not match its parts")));
            }
            if self.q[i] as u128 != self.a[i] as u128 * expect + 1 {
                return Err(Error::Domain(format!("q_{i} is not a_{i}·B_{i} + 1")));
            }
        }
        Ok(())
    }
}

struct Search<'a> {
    primes: &'a [u64],
    k: u32,
    params: &'a RepresentationParams,
    tables: &'a PrimeTables,
    max_results: usize,
    slots: Vec<u64>,      // k a-slots then 2^k - 1 b-slots
    b_omega: Vec<u32>,    // primes placed per b-slot
    count: u64,
    found: Vec<Representation>,
}

impl Search<'_> {
    fn b_last(&self) -> usize {
        self.k as usize + (1usize << self.k) - 2
    }

    fn recurse(&mut self, idx: usize, empty_a: usize) {
        let k = self.k as usize;
        if self.primes.len() - idx < empty_a {
            return; // not enough primes left to fill every a part
        }
        if idx == self.primes.len() {
            self.finish();
            return;
        }
        let p = self.primes[idx];
        let relax = self.params.relaxations;
        let forced_b_last = relax.even_last && p == 2;
        let smooth = p as f64 <= self.params.y;
        for slot in 0..self.slots.len() {
            if forced_b_last && slot != self.b_last() {
                continue;
            }
            if relax.smooth_rough_split {
                let is_a = slot < k;
                if is_a == smooth {
                    continue; // smooth primes feed b parts, rough primes a parts
                }
            }
            if slot >= k && relax.omega_l {
                if self.params.l < 1 || self.b_omega[slot - k] as i64 >= self.params.l {
                    continue;
                }
            }
            self.slots[slot] *= p;
            if slot >= k {
                self.b_omega[slot - k] += 1;
            }
            let next_empty = if slot < k && self.slots[slot] == p { empty_a - 1 } else { empty_a };
            self.recurse(idx + 1, next_empty);
            if slot >= k {
                self.b_omega[slot - k] -= 1;
            }
            self.slots[slot] /= p;
        }
    }

    fn finish(&mut self) {
        let k = self.k as usize;
        let relax = self.params.relaxations;
        if relax.omega_l && self.b_omega.iter().any(|&w| w as i64 != self.params.l) {
            return;
        }
        if relax.even_last && self.slots[self.b_last()] % 2 != 0 {
            return;
        }
        let parts = (1u32 << self.k) - 1;
        let mut q = Vec::with_capacity(k);
        let mut big_b = Vec::with_capacity(k);
        for i in 0..k {
            let bi: u64 = (1..=parts)
                .filter(|j| (j >> i) & 1 == 1)
                .map(|j| self.slots[k + (j - 1) as usize])
                .product();
            let qi = self.slots[i] * bi + 1;
            // tables cover n + 1 by precondition, so this cannot fail
            if !self.tables.is_prime_checked(qi).unwrap_or(false) {
                return;
            }
            big_b.push(bi);
            q.push(qi);
        }
        self.count += 1;
        if self.found.len() < self.max_results {
            let n: u64 = self.primes.iter().product();
            let rep = Representation {
                n,
                k: self.k,
                a: self.slots[..k].to_vec(),
                b: self.slots[k..].to_vec(),
                big_b,
                q,
            };
            debug_assert!(rep.validate().is_ok());
            self.found.push(rep);
        }
    }
}

fn count_assignments(
    primes: &[u64],
    params: &RepresentationParams,
    max_results: usize,
    tables: &PrimeTables,
) -> (u64, Vec<Representation>) {
    let k = params.k;
    let mut search = Search {
        primes,
        k,
        params,
        tables,
        max_results,
        slots: vec![1; k as usize + (1usize << k) - 1],
        b_omega: vec![0; (1usize << k) - 1],
        count: 0,
        found: Vec::new(),
    };
    search.recurse(0, k as usize);
    (search.count, search.found)
}

/// Count (exactly) and list (up to `max_results`) the representations of a
/// squarefree n under `params`. Not-enforced side conditions are skipped per
/// `params.relaxations`; aᵢ > 1 and the primality of every qᵢ always hold.
pub fn find_representations(
    n: u64,
    params: &RepresentationParams,
    max_results: usize,
    tables: &PrimeTables,
) -> Result<(u64, Vec<Representation>)> {
    if !(2..=6).contains(&params.k) {
        return Err(Error::Domain(format!("k = {} outside 2..=6", params.k)));
    }
    let f = arith::factor(n, tables)?;
    if !f.is_squarefree() {
        return Err(Error::Domain(format!("{n} is not squarefree")));
    }
    let omega = f.omega();
    if omega > 24 {
        return Err(Error::ComplexityGuard(format!("omega({n}) = {omega} > 24")));
    }
    let slots = params.k as u64 + (1u64 << params.k) - 1;
    if (slots as f64).powi(omega as i32) > 5e8 {
        return Err(Error::ComplexityGuard(format!(
            "{slots}^{omega} assignments is past the search budget"
        )));
    }
    // every q_i is at most n + 1; primality must be answerable there
    let limit_sq = tables.limit() as u128 * tables.limit() as u128;
    if (n as u128) + 1 > limit_sq {
        return Err(Error::Range(format!(
            "primality of q <= {} needs tables past {}²",
            n + 1,
            tables.limit()
        )));
    }
    if params.relaxations.range {
        let scale = params.x;
        let lo = scale / (4f64).powi(params.k as i32);
        if !(n as f64 > lo && n as f64 <= scale) {
            return Ok((0, Vec::new()));
        }
    }
    if params.relaxations.even_last && n % 2 != 0 {
        return Ok((0, Vec::new()));
    }
    let primes: Vec<u64> = f.factors().iter().map(|&(p, _)| p).collect();
    Ok(count_assignments(&primes, params, max_results, tables))
}

/// Semantic check of a (structurally valid) representation: all qᵢ prime and
/// pairwise distinct, and λ(∏qᵢ) = n — evaluated on the factorization
/// [(qᵢ, 1)] as lcm(qᵢ − 1) without forming the product.
pub fn verify_representation(rep: &Representation, tables: &PrimeTables) -> Result<bool> {
    debug_assert!(rep.validate().is_ok());
    let mut sorted = rep.q.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    let mut lambda: u64 = 1;
    for &q in &rep.q {
        if !tables.is_prime_checked(q)? {
            return Ok(false);
        }
        lambda = arith::lcm_checked(lambda, q - 1)?;
    }
    Ok(lambda == rep.n)
}

/// The empirical Cauchy bound over n ∈ (2^{−2k} x, x].
#[derive(Debug, Clone, PartialEq)]
pub struct S1S2Report {
    /// Σ μ²(n) r(n).
    pub s1: u128,
    /// Σ μ²(n) r²(n).
    pub s2: u128,
    /// #{ n squarefree in range : r(n) > 0 }.
    pub positive_count: u64,
    /// S₁²/S₂ as a float (0 when S₂ = 0).
    pub cauchy_bound: f64,
    /// positive_count · S₂ ≥ S₁², checked in exact integer arithmetic.
    pub cauchy_holds: bool,
}

/// Full scan of the representation count over (2^{−2k} x, x].
pub fn empirical_s1_s2(
    x: u64,
    k: u32,
    relaxations: Relaxations,
    tables: &PrimeTables,
) -> Result<S1S2Report> {
    if x > 100_000 {
        return Err(Error::ComplexityGuard(format!(
            "s1/s2 scan at x = {x} exceeds the 1e5 budget"
        )));
    }
    let mut params = params_for((x as f64).max(16.0), k)?;
    params.relaxations = relaxations;
    let lo = x >> (2 * k).min(63);
    use rayon::prelude::*;
    let (s1, s2, positive_count) = ((lo + 1)..=x)
        .into_par_iter()
        .map(|n| -> Result<(u128, u128, u64)> {
            if relaxations.even_last && n % 2 != 0 {
                return Ok((0, 0, 0));
            }
            let f = arith::factor(n, tables)?;
            if !f.is_squarefree() {
                return Ok((0, 0, 0));
            }
            let (r, _) = find_representations(n, &params, 0, tables)?;
            Ok((r as u128, (r as u128) * (r as u128), u64::from(r > 0)))
        })
        .try_reduce(
            || (0, 0, 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)),
        )?;
    let cauchy_bound = if s2 == 0 { 0.0 } else { (s1 as f64) * (s1 as f64) / s2 as f64 };
    let cauchy_holds = positive_count as u128 * s2 >= s1 * s1;
    Ok(S1S2Report { s1, s2, positive_count, cauchy_bound, cauchy_holds })
}

/// Group b₁ … b_{2ᵏ−1} by the low m bits of the index: entry v of the result
/// is B_v = ∏ { bⱼ : j mod 2^m = v }. Class v = 0 collects 2^{k−m} − 1
/// indices, every other class 2^{k−m}.
pub fn b_v_partition(k: u32, m: u32, b_list: &[u64]) -> Result<Vec<u64>> {
    if !(2..=16).contains(&k) || m > k {
        return Err(Error::Domain(format!("(k, m) = ({k}, {m}) outside 2..=16, m <= k")));
    }
    let parts = (1usize << k) - 1;
    if b_list.len() != parts {
        return Err(Error::Domain(format!(
            "expected {parts} parts for k = {k}, got {}",
            b_list.len()
        )));
    }
    let mask = (1u32 << m) - 1;
    let mut out = vec![1u64; 1 << m];
    for (j0, &b) in b_list.iter().enumerate() {
        let v = (j0 as u32 + 1) & mask;
        out[v as usize] = out[v as usize]
            .checked_mul(b)
            .ok_or(Error::Overflow("b_v_partition"))?;
    }
    Ok(out)
}

/// Closed form for the number of dual factorizations of a squarefree b
/// compatible with matching class products: per prime of b there are
/// (2^m − 1)·(2^{k−m})² + (2^{k−m} − 1)² choices of the pair (j, j′), which
/// simplifies to 2^{2k−m} − 2^{k+1−m} + 1; raise to ω(b).
pub fn dual_count_formula(k: u32, m: u32, omega_b: u32) -> Result<u128> {
    check_dual_box(k, m, omega_b)?;
    let per_prime = (((1u64 << m) - 1) * (1u64 << (2 * (k - m))))
        + ((1u64 << (k - m)) - 1).pow(2);
    debug_assert_eq!(
        per_prime,
        (1u64 << (2 * k - m)) - (1u64 << (k + 1 - m)) + 1
    );
    Ok((per_prime as u128).pow(omega_b))
}

/// The same count by direct enumeration: for one prime, try every pair
/// (j, j′) ∈ [1, 2ᵏ−1]² and keep those whose low m bits agree; independent
/// primes multiply.
pub fn dual_count_bruteforce(k: u32, m: u32, omega_b: u32) -> Result<u128> {
    check_dual_box(k, m, omega_b)?;
    let top = (1u32 << k) - 1;
    let mask = (1u32 << m) - 1;
    let mut per_prime: u64 = 0;
    for j in 1..=top {
        for j2 in 1..=top {
            if j & mask == j2 & mask {
                per_prime += 1;
            }
        }
    }
    Ok((per_prime as u128).pow(omega_b))
}

fn check_dual_box(k: u32, m: u32, omega_b: u32) -> Result<()> {
    if !(1..=5).contains(&k) || m > k || omega_b > 8 {
        return Err(Error::Range(format!(
            "(k, m, omega) = ({k}, {m}, {omega_b}) outside k <= 5, m <= k, omega <= 8"
        )));
    }
    Ok(())
}

const BV_DEFAULT_SEED: u64 = 0x5eed_0f_b5;

/// Exhaustively check, over `trials` random squarefree b with ω(b) ≤ 6, that
/// any two factorizations of b into 2ᵏ−1 parts with B₀ … B_{m−1} equal also
/// have every class product B_v equal. Returns true iff no counterexample.
pub fn b_v_identity_check(k: u32, m: u32, trials: u32) -> Result<bool> {
    b_v_identity_check_seeded(k, m, trials, BV_DEFAULT_SEED)
}

pub fn b_v_identity_check_seeded(k: u32, m: u32, trials: u32, seed: u64) -> Result<bool> {
    if !(2..=4).contains(&k) || m > k {
        return Err(Error::Domain(format!("(k, m) = ({k}, {m}) outside 2..=4, m <= k")));
    }
    let pool: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts = (1usize << k) - 1;
    for _ in 0..trials {
        let omega = rng.random_range(0..=6usize);
        if (parts as f64).powi(omega as i32) > 2.5e7 {
            return Err(Error::ComplexityGuard(format!(
                "{parts}^{omega} factorizations per trial"
            )));
        }
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        for i in 0..omega {
            let j = rng.random_range(i..pool.len());
            idx.swap(i, j);
        }
        let primes: Vec<u64> = idx[..omega].iter().map(|&i| pool[i]).collect();
        if !b_v_identity_holds(k, m, &primes)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerate all 2ᵏ−1-part factorizations of the squarefree product of
/// `primes`, keyed by (B₀ … B_{m−1}); within a key every factorization must
/// produce the same B_v vector.
pub fn b_v_identity_holds(k: u32, m: u32, primes: &[u64]) -> Result<bool> {
    let parts = (1usize << k) - 1;
    let mut groups: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    let mut assignment = vec![0usize; primes.len()];
    loop {
        let mut b = vec![1u64; parts];
        for (prime_idx, &slot) in assignment.iter().enumerate() {
            b[slot] *= primes[prime_idx];
        }
        let key: Vec<u64> = (0..m)
            .map(|i| {
                (1..=parts as u32)
                    .filter(|j| (j >> i) & 1 == 1)
                    .map(|j| b[(j - 1) as usize])
                    .product()
            })
            .collect();
        let value = b_v_partition(k, m, &b)?;
        if let Some(prev) = groups.get(&key) {
            if *prev != value {
                return Ok(false);
            }
        } else {
            groups.insert(key, value);
        }
        // odometer over slot assignments
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                return Ok(true);
            }
            assignment[pos] += 1;
            if assignment[pos] < parts {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables() -> PrimeTables {
        PrimeTables::build(2_000_000).unwrap()
    }

    #[test]
    fn params_examples() {
        let p = params_for(1e6, 2).unwrap();
        assert!((p.y - 1.013_240_550_837).abs() < 1e-9);
        assert!(p.degenerate);

        // x = exp(exp(10)): y = exp(e^10 / 4000), l = 1
        let x = (10f64).exp().exp();
        let p = params_for(x, 2).unwrap();
        let expected_y = ((10f64).exp() / 4000.0).exp();
        assert!((p.y - expected_y).abs() / expected_y < 1e-12);
        assert_eq!(p.l, 1);
        assert!(!p.degenerate);

        // the l coefficient at k = 2 is 2 / (3 log 3)
        let coeff = 2.0 / (3.0 * 3f64.ln());
        assert!((coeff - 0.606_826_151_084_558).abs() < 1e-12);

        assert!(params_for(10.0, 2).is_err());
        assert!(params_for(1e6, 1).is_err());
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(index_sets(2).unwrap(), vec![vec![1, 3], vec![2, 3]]);
        assert_eq!(
            index_sets(3).unwrap(),
            vec![vec![1, 3, 5, 7], vec![2, 3, 6, 7], vec![4, 5, 6, 7]]
        );
        assert!(index_sets(1).is_err());
        assert!(index_sets(17).is_err());
    }

    #[test]
    fn index_set_bijection_and_sizes() {
        for k in 2..=16u32 {
            let sets = index_sets(k).unwrap();
            let top = (1u32 << k) - 1;
            for (i, s) in sets.iter().enumerate() {
                assert_eq!(s.len(), 1 << (k - 1), "wrong size at k = {k}, i = {i}");
                assert!(s.contains(&top), "top index missing from S_{i}");
            }
            // j -> { i : j ∈ S_i } hits every nonempty subset exactly once
            let mut seen = vec![false; (top + 1) as usize];
            for j in 1..=top {
                let subset: u32 = (0..k)
                    .filter(|&i| sets[i as usize].contains(&j))
                    .fold(0, |acc, i| acc | (1 << i));
                assert_ne!(subset, 0, "empty subset at j = {j}");
                assert!(!seen[subset as usize], "subset repeated at j = {j}");
                seen[subset as usize] = true;
            }
            assert!(seen[1..].iter().all(|&s| s), "some nonempty subset missed");
            // intersection of all sets is exactly the top index
            let inter: Vec<u32> = sets[0]
                .iter()
                .copied()
                .filter(|j| sets.iter().all(|s| s.contains(j)))
                .collect();
            assert_eq!(inter, vec![top]);
            // every b_j divides B_0 .. B_{k-1}: every j has some bit set
            for j in 1..=top {
                assert!((0..k).any(|i| (j >> i) & 1 == 1));
            }
        }
    }

    fn relaxed_params(k: u32) -> RepresentationParams {
        let mut p = params_for(1e6, k).unwrap();
        p.relaxations = Relaxations::relaxed();
        p
    }

    #[test]
    fn representation_counts_match_independent_enumeration() {
        let t = tables();
        // counts cross-checked by a direct assignment enumeration
        for (n, expect) in [(174u64, 2u64), (210, 18), (570, 8), (930, 8), (2310, 82)] {
            let (r, reps) = find_representations(n, &relaxed_params(2), 16, &t).unwrap();
            assert_eq!(r, expect, "r({n})");
            for rep in &reps {
                rep.validate().unwrap();
                assert!(verify_representation(rep, &t).unwrap(), "bad rep for {n}");
            }
        }
    }

    #[test]
    fn representation_known_solution() {
        let t = tables();
        let (r, reps) = find_representations(174, &relaxed_params(2), 16, &t).unwrap();
        assert_eq!(r, 2);
        // 174 = 2·3·29; the only workable split is {3, 29} across the a parts
        // with b₃ = 2, giving the primes 7 and 59 in one order or the other.
        for rep in &reps {
            let mut q = rep.q.clone();
            q.sort_unstable();
            assert_eq!(q, vec![7, 59]);
            assert_eq!(rep.b, vec![1, 1, 2]);
        }
        // and 29·6 + 1 = 175 = 5²·7 is composite, so no assignment may put
        // both small primes into b parts
        assert!(!t.is_prime(175));
    }

    #[test]
    fn odd_n_has_no_even_last_representations() {
        let t = tables();
        let (r, reps) = find_representations(105, &relaxed_params(2), 4, &t).unwrap();
        assert_eq!((r, reps.len()), (0, 0));
    }

    #[test]
    fn non_squarefree_is_domain_error() {
        let t = tables();
        assert!(matches!(
            find_representations(12, &relaxed_params(2), 4, &t),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn count_is_invariant_under_prime_permutation() {
        let t = tables();
        let params = relaxed_params(2);
        let primes = [2u64, 3, 5, 7, 19];
        let (reference, _) = count_assignments(&primes, &params, 0, &t);
        let perms: [[u64; 5]; 3] =
            [[19, 7, 5, 3, 2], [3, 2, 19, 5, 7], [5, 19, 2, 7, 3]];
        for perm in perms {
            let (r, _) = count_assignments(&perm, &params, 0, &t);
            assert_eq!(r, reference);
        }
    }

    #[test]
    fn strict_mode_with_feasible_parameters() {
        let t = tables();
        // Hand-picked scale stand-in: y = 10, l = 1, k = 2. Then
        // n = 4290 = 2·3·5·11·13 admits exactly the two symmetric solutions
        // built from q ∈ {67, 131}: 67 = 11·(3·2) + 1, 131 = 13·(5·2) + 1.
        let params = RepresentationParams {
            x: 1e6,
            k: 2,
            y: 10.0,
            l: 1,
            degenerate: false,
            relaxations: Relaxations { range: false, ..Relaxations::strict() },
        };
        let (r, reps) = find_representations(4290, &params, 8, &t).unwrap();
        assert_eq!(r, 2);
        for rep in &reps {
            assert!(verify_representation(rep, &t).unwrap());
            // strict size bound: prod b_j <= y^{(2^k - 1) l}
            let prod_b: f64 = rep.b.iter().map(|&b| b as f64).product();
            let bound = params.y.powi(((1 << params.k) - 1) * params.l as i32);
            assert!(prod_b <= bound);
            // smooth/rough split and omega(b_j) = l = 1 held
            for &a in &rep.a {
                assert!(a as f64 > params.y);
            }
            for &b in &rep.b {
                assert!(b >= 2 && (b as f64) <= params.y);
            }
        }
    }

    #[test]
    fn degenerate_strict_params_yield_nothing() {
        let t = tables();
        let params = params_for(1e6, 2).unwrap(); // strict, degenerate
        assert!(params.degenerate);
        let (r, _) = find_representations(174, &params, 4, &t).unwrap();
        assert_eq!(r, 0);
    }

    #[test]
    fn verify_rejects_wrong_lambda_and_duplicates() {
        let t = tables();
        let (_, reps) = find_representations(570, &relaxed_params(2), 1, &t).unwrap();
        let good = reps.into_iter().next().unwrap();
        assert!(verify_representation(&good, &t).unwrap());

        // duplicate primes: q = (7, 7) via a manual tuple
        let dup = Representation {
            n: 36,
            k: 2,
            a: vec![3, 3],
            b: vec![1, 1, 2],
            big_b: vec![2, 2],
            q: vec![7, 7],
        };
        assert!(!verify_representation(&dup, &t).unwrap());

        // structurally fine but lambda(13·5) = lcm(12, 4) = 12 = n / 2
        let half = Representation {
            n: 24,
            k: 2,
            a: vec![6, 2],
            b: vec![1, 1, 2],
            big_b: vec![2, 2],
            q: vec![13, 5],
        };
        half.validate().unwrap();
        assert!(!verify_representation(&half, &t).unwrap());
    }

    #[test]
    fn s1s2_cauchy_bound_exact() {
        let t = tables();
        let report = empirical_s1_s2(20_000, 2, Relaxations::relaxed(), &t).unwrap();
        assert!(report.cauchy_holds);
        assert!(report.positive_count > 0);
        assert!(report.s1 >= report.positive_count as u128); // r >= 1 on its support
        assert!(report.cauchy_bound <= report.positive_count as f64);

        // strict at desk scale: degenerate, everything zero, bound 0
        let strict = empirical_s1_s2(20_000, 2, Relaxations::strict(), &t).unwrap();
        assert_eq!((strict.s1, strict.s2, strict.positive_count), (0, 0, 0));
        assert_eq!(strict.cauchy_bound, 0.0);
        assert!(strict.cauchy_holds);
    }

    #[test]
    fn b_v_partition_examples() {
        // k = 2, m = 1: v = 1 collects j ∈ {1, 3}
        let out = b_v_partition(2, 1, &[3, 5, 2]).unwrap();
        assert_eq!(out, vec![5, 6]);
        // m = 0: single class with every part
        assert_eq!(b_v_partition(2, 0, &[3, 5, 2]).unwrap(), vec![30]);
        // m = k: singleton classes, v = 0 empty
        assert_eq!(b_v_partition(2, 2, &[3, 5, 2]).unwrap(), vec![1, 3, 5, 2]);
        // class sizes at k = 3, m = 1
        let out = b_v_partition(3, 1, &[2, 3, 5, 7, 11, 13, 17]).unwrap();
        assert_eq!(out[0], 3 * 7 * 13); // j ∈ {2, 4, 6}: 2^{k-m} - 1 = 3 parts
        assert_eq!(out[1], 2 * 5 * 11 * 17); // j ∈ {1, 3, 5, 7}: 4 parts
        assert!(b_v_partition(3, 1, &[1, 2, 3]).is_err());
        // total product is preserved
        let parts = [2u64, 3, 5, 7, 11, 13, 17];
        for m in 0..=3 {
            let out = b_v_partition(3, m, &parts).unwrap();
            assert_eq!(out.iter().product::<u64>(), parts.iter().product::<u64>());
        }
    }

    #[test]
    fn dual_count_examples_and_box() {
        assert_eq!(dual_count_formula(2, 0, 1).unwrap(), 9);
        assert_eq!(dual_count_formula(2, 2, 1).unwrap(), 3);
        assert_eq!(dual_count_formula(3, 1, 2).unwrap(), 625);
        // formula equals brute force over the whole precondition box
        for k in 1..=5u32 {
            for m in 0..=k {
                for omega in 0..=8u32 {
                    assert_eq!(
                        dual_count_formula(k, m, omega).unwrap(),
                        dual_count_bruteforce(k, m, omega).unwrap(),
                        "mismatch at (k, m, omega) = ({k}, {m}, {omega})"
                    );
                }
            }
        }
        assert!(dual_count_formula(6, 0, 1).is_err());
    }

    #[test]
    fn b_v_identity_small() {
        assert!(b_v_identity_check(2, 1, 20).unwrap());
        assert!(b_v_identity_check(3, 2, 10).unwrap());
        assert!(b_v_identity_check(2, 0, 5).unwrap()); // vacuous: single class
        // the k = 2, m = 1 case reduces to b₂ = b / B₀ being determined
        assert!(b_v_identity_holds(2, 1, &[2, 3, 5, 7]).unwrap());
    }
}
