//! Carmichael-function toolkit: λ and φ evaluation, membership in the image
//! of λ with explicit witnesses, exact counting of λ-values at scale via a
//! segmented parallel sieve, the shifted-prime representation machinery, and
//! the exponent analytics that go with all of it.
//!
//! Modules:
//!
//! * [`arith`] — prime tables, factorization, λ, φ, and the usual
//!   multiplicative-function helpers;
//! * [`oracle`] — per-n image membership via the maximal-λ-divisor
//!   criterion, with witness construction and a brute-force cross-check;
//! * [`count`] — the segmented counting engine with checkpointed,
//!   resumable series files;
//! * [`construct`] — k-prime representations, the index sets behind them,
//!   Cauchy bound sums, and dual-factorization combinatorics;
//! * [`analytics`] — exponent constants, symmetric prime sums, exponent
//!   fitting, and comparison counts (φ image, multiplication table, ω).

pub mod analytics;
pub mod arith;
pub mod construct;
pub mod count;
pub mod error;
pub mod oracle;

pub use error::{Error, Result};
