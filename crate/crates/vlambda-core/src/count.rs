//! Exact counting of Carmichael-function values: V(x) = #{ n ≤ x : n = λ(m) }.
//!
//! The per-n membership criterion (see [`crate::oracle`]) is evaluated in
//! bulk by an lcm-accumulation sieve. Each accumulator cell starts at
//! 2^{v₂(n)} (the low bit of n), and for every odd prime p with d = p − 1
//! below the scan bound, every multiple n of d folds in
//! lcm(acc, d · p^{v_p(n)}). A cell is a member exactly when it finishes
//! equal to its own index. Since every folded value divides n, accumulators
//! never leave 64 bits; the engine asserts this invariant on every update.
//!
//! Layout of a counting run:
//!
//! * the range (start, x] is cut into fixed-size segments, grouped into
//!   contiguous *chunks*; chunks are the parallel work unit;
//! * inside a chunk, primes with d smaller than a segment step through every
//!   segment, while larger primes sit in a per-segment bucket list keyed by
//!   their next multiple, so a segment never scans the whole prime list;
//! * per-chunk totals are folded in chunk order. Counts are integers and the
//!   fold is a sum, so results are identical for any worker count or segment
//!   size.
//!
//! Checkpoints are emitted as JSON-lines records through a sink after each
//! wave of chunks completes, which keeps long runs streamable and resumable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, primes_up_to};
use crate::error::{Error, Result};

/// On-disk series format version.
pub const FORMAT_VERSION: u32 = 1;
/// Build identifier stamped into series headers.
pub const ENGINE_ID: &str = concat!("vlambda-core/", env!("CARGO_PKG_VERSION"));
/// Smallest accepted segment size.
pub const MIN_SEGMENT_SIZE: u64 = 1 << 10;
/// Default segment size.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;
/// Largest supported count bound.
pub const MAX_COUNT_LIMIT: u64 = 10_000_000_000;
/// Upper bound on chunk length; caps per-chunk bucket memory.
const CHUNK_CAP: u64 = 1 << 24;

/// One emitted record of a counting run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CountCheckpoint {
    pub version: u32,
    pub x: u64,
    pub v_lambda: u64,
    /// log(x / V(x)) / log log x; None when x < 3 leaves it undefined.
    pub eta_hat: Option<f64>,
    pub wall_seconds: f64,
    pub segment_size: u64,
    pub workers: usize,
}

/// Fitted exponent at a checkpoint: log(x / v) / log log x.
pub fn eta_hat(x: u64, v: u64) -> Option<f64> {
    if x < 3 || v == 0 {
        return None;
    }
    Some((x as f64 / v as f64).ln() / (x as f64).ln().ln())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesHeader {
    version: u32,
    engine: String,
}

/// A parsed checkpoint series.
#[derive(Debug, Clone)]
pub struct CountSeries {
    pub engine: String,
    pub checkpoints: Vec<CountCheckpoint>,
}

impl CountSeries {
    /// Checkpoint x must be strictly increasing and v nondecreasing.
    fn validate(&self) -> Result<()> {
        for w in self.checkpoints.windows(2) {
            if w[1].x <= w[0].x {
                return Err(Error::SeriesCorrupt(format!(
                    "checkpoint x not increasing: {} then {}",
                    w[0].x, w[1].x
                )));
            }
            if w[1].v_lambda < w[0].v_lambda {
                return Err(Error::SeriesCorrupt(format!(
                    "v_lambda decreases at x = {}",
                    w[1].x
                )));
            }
        }
        Ok(())
    }
}

/// Counting run parameters.
#[derive(Debug, Clone)]
pub struct CountConfig {
    /// Count members in (start, x] where start comes from `resume_from`.
    pub x: u64,
    /// Checkpoint positions; x itself is always included.
    pub checkpoints: Vec<u64>,
    pub workers: usize,
    pub segment_size: u64,
    /// (x₀, V(x₀)) of an earlier run to continue from.
    pub resume_from: Option<(u64, u64)>,
}

impl CountConfig {
    pub fn new(x: u64) -> Self {
        Self {
            x,
            checkpoints: Vec::new(),
            workers: 1,
            segment_size: DEFAULT_SEGMENT_SIZE,
            resume_from: None,
        }
    }
}

/// Receives checkpoint records as they are finalized.
pub trait CheckpointSink {
    fn emit(&mut self, checkpoint: &CountCheckpoint) -> std::io::Result<()>;
}

/// Sink that drops the records (the returned series still carries them).
pub struct NullSink;

impl CheckpointSink for NullSink {
    fn emit(&mut self, _checkpoint: &CountCheckpoint) -> std::io::Result<()> {
        Ok(())
    }
}

impl<F: FnMut(&CountCheckpoint) -> std::io::Result<()>> CheckpointSink for F {
    fn emit(&mut self, checkpoint: &CountCheckpoint) -> std::io::Result<()> {
        self(checkpoint)
    }
}

/// Fold one hit: n = `multiple` is divisible by d = p − 1; the maximal
/// λ(p^a) dividing n is d · p^{v_p(n)}.
#[inline]
fn fold_prime_hit(acc: &mut u64, multiple: u64, p: u64, d: u64) {
    let mut contribution = d;
    let mut t = multiple;
    while t % p == 0 {
        contribution *= p;
        t /= p;
    }
    let a = *acc;
    // cheap shortcuts dominate: most cells are still at a tiny value
    let v = if a <= contribution && contribution % a == 0 {
        contribution
    } else if a % contribution == 0 {
        a
    } else {
        (a / gcd(a, contribution)) * contribution
    };
    assert!(v <= multiple, "accumulator overflow: lcm does not divide n");
    *acc = v;
}

/// Membership flags for n in [lo, hi). `primes` must contain every prime
/// p ≤ hi − 1 ... in practice every prime < hi suffices since d = p − 1 must
/// divide some n < hi. This is the reference implementation the engine is
/// tested against; it scans the whole prime list once per call.
pub fn segment_members(lo: u64, hi: u64, primes: &[u64]) -> Vec<bool> {
    assert!(lo >= 1 && lo <= hi);
    let len = (hi - lo) as usize;
    let mut acc: Vec<u64> = (lo..hi).map(|n| n & n.wrapping_neg()).collect();
    for &p in primes {
        if p == 2 {
            continue;
        }
        let d = p - 1;
        if d >= hi {
            break;
        }
        let mut m = lo.div_ceil(d) * d;
        while m < hi {
            fold_prime_hit(&mut acc[(m - lo) as usize], m, p, d);
            m += d;
        }
    }
    (0..len).map(|i| acc[i] == lo + i as u64).collect()
}

/// Number of λ-values in [lo, hi).
pub fn count_segment(lo: u64, hi: u64, primes: &[u64]) -> u64 {
    segment_members(lo, hi, primes).iter().filter(|&&b| b).count() as u64
}

struct ChunkResult {
    total: u64,
    /// For each checkpoint x inside the chunk: members with n ≤ x, counted
    /// from the chunk start.
    checkpoint_prefixes: Vec<(u64, u64)>,
}

/// Process the chunk [lo, hi): stepping offsets for small primes, a
/// next-multiple bucket per segment for large ones.
fn process_chunk(
    lo: u64,
    hi: u64,
    segment_size: u64,
    primes: &[u64],
    checkpoints: &[u64],
) -> ChunkResult {
    let nsegs = (hi - lo).div_ceil(segment_size) as usize;
    let mut small: Vec<(u64, u64)> = Vec::new(); // (p, next multiple)
    let mut buckets: Vec<Vec<(u64, u64)>> = vec![Vec::new(); nsegs];
    for &p in primes {
        if p == 2 {
            continue;
        }
        let d = p - 1;
        if d >= hi {
            break;
        }
        let first = lo.div_ceil(d) * d;
        if d < segment_size {
            small.push((p, first));
        } else if first < hi {
            buckets[((first - lo) / segment_size) as usize].push((p, first));
        }
    }

    let mut acc: Vec<u64> = Vec::with_capacity(segment_size as usize);
    let mut total = 0u64;
    let mut checkpoint_prefixes = Vec::with_capacity(checkpoints.len());
    for si in 0..nsegs {
        let s_lo = lo + si as u64 * segment_size;
        let s_hi = (s_lo + segment_size).min(hi);
        acc.clear();
        acc.extend((s_lo..s_hi).map(|n| n & n.wrapping_neg()));

        for (p, next) in small.iter_mut() {
            let d = *p - 1;
            let mut m = *next;
            while m < s_hi {
                fold_prime_hit(&mut acc[(m - s_lo) as usize], m, *p, d);
                m += d;
            }
            *next = m;
        }
        for (p, mut m) in std::mem::take(&mut buckets[si]) {
            let d = p - 1;
            while m < s_hi {
                fold_prime_hit(&mut acc[(m - s_lo) as usize], m, p, d);
                m += d;
            }
            if m < hi {
                buckets[((m - lo) / segment_size) as usize].push((p, m));
            }
        }

        let seg_count = acc
            .iter()
            .enumerate()
            .filter(|&(i, &a)| a == s_lo + i as u64)
            .count() as u64;
        for &c in checkpoints.iter().filter(|&&c| s_lo <= c && c < s_hi) {
            let partial = acc[..=(c - s_lo) as usize]
                .iter()
                .enumerate()
                .filter(|&(i, &a)| a == s_lo + i as u64)
                .count() as u64;
            checkpoint_prefixes.push((c, total + partial));
        }
        total += seg_count;
    }
    checkpoint_prefixes.sort_unstable();
    ChunkResult { total, checkpoint_prefixes }
}

/// Count λ-values up to `cfg.x`, emitting a checkpoint at every requested
/// position (and at x itself). The result is independent of `workers` and
/// `segment_size`; only `wall_seconds` varies.
pub fn count_up_to(cfg: &CountConfig, sink: &mut dyn CheckpointSink) -> Result<CountSeries> {
    let (start, base_v) = cfg.resume_from.unwrap_or((0, 0));
    if cfg.x > MAX_COUNT_LIMIT {
        return Err(Error::Range(format!(
            "count limit {} exceeds the configured maximum {MAX_COUNT_LIMIT}",
            cfg.x
        )));
    }
    if cfg.x <= start {
        return Err(Error::Range(format!(
            "count limit {} does not extend past the resume point {start}",
            cfg.x
        )));
    }
    if cfg.segment_size < MIN_SEGMENT_SIZE {
        return Err(Error::Config(format!(
            "segment size {} is below the minimum {MIN_SEGMENT_SIZE}",
            cfg.segment_size
        )));
    }
    if cfg.workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let mut checkpoints: Vec<u64> = cfg
        .checkpoints
        .iter()
        .copied()
        .filter(|&c| c > start)
        .chain(std::iter::once(cfg.x))
        .collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    if checkpoints.iter().any(|&c| c > cfg.x) {
        return Err(Error::Range("checkpoint beyond the count limit".into()));
    }

    let clock = Instant::now();
    // d = p - 1 <= x forces p <= x + 1
    let primes = primes_up_to(cfg.x + 1);

    let lo0 = start + 1;
    let end = cfg.x + 1; // scan [lo0, end)
    let span = end - lo0;
    let target = (span / (cfg.workers as u64 * 8)).max(1);
    let chunk_len = target
        .clamp(cfg.segment_size, CHUNK_CAP)
        .div_ceil(cfg.segment_size)
        * cfg.segment_size;
    let chunk_bounds: Vec<(u64, u64)> = (0..span.div_ceil(chunk_len))
        .map(|i| {
            let lo = lo0 + i * chunk_len;
            (lo, (lo + chunk_len).min(end))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut series = CountSeries { engine: ENGINE_ID.to_string(), checkpoints: Vec::new() };
    let mut running = base_v;
    let wave = cfg.workers * 2;
    for wave_bounds in chunk_bounds.chunks(wave) {
        let results: Vec<ChunkResult> = pool.install(|| {
            use rayon::prelude::*;
            wave_bounds
                .par_iter()
                .map(|&(lo, hi)| {
                    let cps: Vec<u64> = checkpoints
                        .iter()
                        .copied()
                        .filter(|&c| lo <= c && c < hi)
                        .collect();
                    process_chunk(lo, hi, cfg.segment_size, &primes, &cps)
                })
                .collect()
        });
        for result in results {
            for &(x, prefix) in &result.checkpoint_prefixes {
                let v = running + prefix;
                let cp = CountCheckpoint {
                    version: FORMAT_VERSION,
                    x,
                    v_lambda: v,
                    eta_hat: eta_hat(x, v),
                    wall_seconds: clock.elapsed().as_secs_f64(),
                    segment_size: cfg.segment_size,
                    workers: cfg.workers,
                };
                sink.emit(&cp)?;
                series.checkpoints.push(cp);
            }
            running += result.total;
        }
    }
    series.validate()?;
    Ok(series)
}

/// Append-only JSON-lines writer for series files. A fresh (empty) file gets
/// a header line; an existing file is validated before records are appended.
pub struct SeriesWriter {
    out: BufWriter<File>,
}

impl SeriesWriter {
    pub fn open(path: &Path) -> Result<Self> {
        let fresh = match std::fs::metadata(path) {
            Ok(meta) => meta.len() == 0,
            Err(_) => true,
        };
        if !fresh {
            read_series(path)?; // refuse to append to a corrupt file
        }
        let file = File::options().create(true).append(true).open(path)?;
        let mut out = BufWriter::new(file);
        if fresh {
            let header = SeriesHeader {
                version: FORMAT_VERSION,
                engine: ENGINE_ID.to_string(),
            };
            serde_json::to_writer(&mut out, &header)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Ok(Self { out })
    }

    pub fn append(&mut self, checkpoint: &CountCheckpoint) -> std::io::Result<()> {
        serde_json::to_writer(&mut self.out, checkpoint).map_err(std::io::Error::other)?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}

impl CheckpointSink for SeriesWriter {
    fn emit(&mut self, checkpoint: &CountCheckpoint) -> std::io::Result<()> {
        self.append(checkpoint)
    }
}

/// Parse and validate a series file. An empty file is a valid empty series;
/// a bad header, version mismatch, truncated record, or invariant violation
/// is a corruption error.
pub fn read_series(path: &Path) -> Result<CountSeries> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header_line = match lines.next() {
        None => {
            return Ok(CountSeries { engine: ENGINE_ID.to_string(), checkpoints: Vec::new() })
        }
        Some(line) => line?,
    };
    let header: SeriesHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::SeriesCorrupt(format!("bad header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::SeriesCorrupt(format!(
            "format version {} but this build reads {FORMAT_VERSION}",
            header.version
        )));
    }
    let mut checkpoints = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            return Err(Error::SeriesCorrupt(format!("blank record at line {}", i + 2)));
        }
        let cp: CountCheckpoint = serde_json::from_str(&line)
            .map_err(|e| Error::SeriesCorrupt(format!("record at line {}: {e}", i + 2)))?;
        if cp.version != FORMAT_VERSION {
            return Err(Error::SeriesCorrupt(format!(
                "record version {} at line {}",
                cp.version,
                i + 2
            )));
        }
        checkpoints.push(cp);
    }
    let series = CountSeries { engine: header.engine, checkpoints };
    series.validate()?;
    Ok(series)
}

/// Where to restart a counting run: `Some((x, v))` of the last checkpoint,
/// or `None` for a fresh start.
pub fn resume_state(path: &Path) -> Result<Option<(u64, u64)>> {
    let series = read_series(path)?;
    Ok(series.checkpoints.last().map(|cp| (cp.x, cp.v_lambda)))
}
