//! Parallel census over the collapsed `(u, entry)` iteration space.
//!
//! The nested "for each node, for each neighbor" loop is flattened into the
//! single range `0..entry_count`; flat index `i` names the entry
//! `entries[i]` and its owner `u` (the node whose offset span contains `i`).
//! Index `i` is a live work item iff its neighbor `v` satisfies `u < v`, so
//! every adjacent pair is owned by exactly one index. Workers claim
//! `chunk_size` indices at a time from one shared atomic cursor. Chunk
//! boundaries may cut through a node's span since each live item is
//! self-contained.
//!
//! Results go to hash-selected shard vectors: the pair `(u, v)` always adds
//! to shard [`shard_index`]`(u, v)`, both for its dyadic count and for its
//! connected triads. Class 003 is never accumulated, it is closed after the
//! reduction.

use std::io;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::thread;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::census::{TriadCensus, TriadClass};
use crate::graph::{CompactDigraph, NeighborEntry, NodeId};
use crate::kernel::{census_pair, close_null_class, Selection, TriadCodeTable};

pub const DEFAULT_SHARDS: usize = 64;
pub const DEFAULT_CHUNK: usize = 1024;

#[derive(Debug, Error)]
pub enum ParallelError {
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("failed to start worker thread: {0}")]
    Spawn(#[source] io::Error),
    #[error("a census worker panicked")]
    WorkerPanic,
    #[error("census counter overflow")]
    Overflow,
}

/// How workers combine their counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accumulation {
    /// Shared shards selected by hashing `(u, v)`, updated with atomic fetch-add.
    #[default]
    SharedAtomic,
    /// One private shard per worker, plain adds; the shard count equals the worker count.
    WorkerPrivate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub workers: usize,
    pub shards: usize,
    pub chunk_size: usize,
    pub accumulation: Accumulation,
    pub selection: Selection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workers: thread::available_parallelism().map_or(1, |n| n.get()),
            shards: DEFAULT_SHARDS,
            chunk_size: DEFAULT_CHUNK,
            accumulation: Accumulation::SharedAtomic,
            selection: Selection::Canonical,
        }
    }
}

impl RunConfig {
    pub fn new(workers: usize, shards: usize, chunk_size: usize) -> RunConfig {
        RunConfig {
            workers,
            shards,
            chunk_size,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParallelError> {
        for (name, value) in [
            ("worker count", self.workers),
            ("shard count", self.shards),
            ("chunk size", self.chunk_size),
        ] {
            if value == 0 {
                return Err(ParallelError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Shards actually allocated for this configuration.
    pub fn effective_shards(&self) -> usize {
        match self.accumulation {
            Accumulation::SharedAtomic => self.shards,
            Accumulation::WorkerPrivate => self.workers,
        }
    }
}

/// Shard for the pair `(u, v)`.
///
/// The key `u << 32 | v` goes through the SplitMix64 finalizer
/// (`x ^= x >> 30; x *= 0xbf58476d1ce4e5b9; x ^= x >> 27; x *= 0x94d049bb133111eb; x ^= x >> 31`)
/// and the 64-bit hash is mapped onto `0..shard_count` by taking the high
/// word of `hash * shard_count`. Pure integer arithmetic, so the value is
/// the same on every platform.
#[inline]
pub fn shard_index(u: NodeId, v: NodeId, shard_count: usize) -> usize {
    let mut x = ((u as u64) << 32) | v as u64;
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    ((x as u128 * shard_count as u128) >> 64) as usize
}

/// Contiguous span `[start, end)` of the collapsed iteration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkUnit {
    pub start: usize,
    pub end: usize,
}

/// The flattened `(u, entry)` index range of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationSpace {
    /// Flat range length, equal to the entry count.
    pub total: usize,
    /// Positions whose neighbor id exceeds the owner id.
    pub live: u64,
}

pub fn collapse_iteration_space(g: &CompactDigraph) -> IterationSpace {
    let mut live = 0u64;
    for u in 0..g.node_count() as NodeId {
        live += g.neighbors_unchecked(u).iter().filter(|e| e.node() > u).count() as u64;
    }
    IterationSpace {
        total: g.entry_count(),
        live,
    }
}

impl IterationSpace {
    /// Splits the range into consecutive units of at most `chunk_size`.
    pub fn units(&self, chunk_size: usize) -> impl Iterator<Item = WorkUnit> + '_ {
        let chunk = chunk_size.max(1);
        (0..self.total)
            .step_by(chunk)
            .map(move |start| WorkUnit {
                start,
                end: (start + chunk).min(self.total),
            })
    }
}

/// Owner node and entry at flat position `index`.
pub fn locate(g: &CompactDigraph, index: usize) -> Option<(NodeId, NeighborEntry)> {
    let entry = *g.entries().get(index)?;
    Some((owner_of(g.offsets(), index), entry))
}

#[inline]
fn owner_of(offsets: &[u64], index: usize) -> NodeId {
    // last node whose span starts at or before `index`
    (offsets.partition_point(|&o| o <= index as u64) - 1) as NodeId
}

/// Runs `visit` on every live pair exactly once across `workers` threads.
/// Each worker gets its own state from `init`; returns the final states and
/// per-worker live-pair counts, in worker order.
fn run_collapsed<S, I, V>(
    g: &CompactDigraph,
    workers: usize,
    chunk_size: usize,
    init: I,
    visit: V,
) -> Result<Vec<(S, u64)>, ParallelError>
where
    S: Send,
    I: Fn(usize) -> S + Sync,
    V: Fn(&mut S, NodeId, NodeId, u8) + Sync,
{
    let cursor = AtomicUsize::new(0);
    let total = g.entry_count();
    let offsets = g.offsets();
    let entries = g.entries();

    let work = |worker: usize| -> (S, u64) {
        let mut state = init(worker);
        let mut pairs = 0u64;
        loop {
            let start = cursor.fetch_add(chunk_size, Ordering::Relaxed);
            if start >= total {
                break;
            }
            let end = start.saturating_add(chunk_size).min(total);
            let mut u = owner_of(offsets, start);
            let mut next = offsets[u as usize + 1];
            for (idx, e) in entries[start..end].iter().enumerate() {
                let idx = (start + idx) as u64;
                while idx >= next {
                    u += 1;
                    next = offsets[u as usize + 1];
                }
                let v = e.node();
                if u < v {
                    visit(&mut state, u, v, e.code_bits());
                    pairs += 1;
                }
            }
        }
        (state, pairs)
    };

    if workers == 1 {
        return Ok(vec![work(0)]);
    }
    thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let work = &work;
            let handle = thread::Builder::new()
                .name(format!("census-{w}"))
                .spawn_scoped(scope, move || work(w))
                .map_err(ParallelError::Spawn)?;
            handles.push(handle);
        }
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| ParallelError::WorkerPanic))
            .collect()
    })
}

/// Calls `f(worker, u, v)` once for every adjacent pair `u < v`, using the
/// same claiming scheme as the census. Returns per-worker pair counts.
pub fn for_each_live_pair<F>(
    g: &CompactDigraph,
    workers: usize,
    chunk_size: usize,
    f: F,
) -> Result<Vec<u64>, ParallelError>
where
    F: Fn(usize, NodeId, NodeId) + Sync,
{
    RunConfig::new(workers, 1, chunk_size).validate()?;
    let out = run_collapsed(g, workers, chunk_size, |w| w, |w, u, v, _| f(*w, u, v))?;
    Ok(out.into_iter().map(|(_, pairs)| pairs).collect())
}

/// One shard's 16 counters, padded to its own cache lines.
#[repr(align(128))]
#[derive(Default)]
pub struct AtomicShard {
    counts: [AtomicU64; 16],
}

impl AtomicShard {
    /// Atomic add. Reports overflow instead of hiding the wrapped value.
    #[inline]
    pub fn add(&self, slot: usize, amount: u64) -> Result<(), ParallelError> {
        let prev = self.counts[slot].fetch_add(amount, Ordering::Relaxed);
        if prev.checked_add(amount).is_none() {
            Err(ParallelError::Overflow)
        } else {
            Ok(())
        }
    }

    pub fn snapshot(&self) -> [u64; 16] {
        std::array::from_fn(|i| self.counts[i].load(Ordering::Relaxed))
    }
}

/// Per-shard census vectors before reduction. Slot 0 (class 003) stays zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardedCensus {
    pub shards: Vec<[u64; 16]>,
}

impl ShardedCensus {
    pub fn new(shard_count: usize) -> ShardedCensus {
        ShardedCensus {
            shards: vec![[0; 16]; shard_count],
        }
    }

    pub fn shard_count(&self) -> usize {
        self.shards.len()
    }

    /// Sum of each shard's counters.
    pub fn shard_totals(&self) -> Vec<u128> {
        self.shards
            .iter()
            .map(|s| s.iter().map(|&c| c as u128).sum())
            .collect()
    }
}

/// Sums the shards and closes class 003 from the triad total for `n` nodes.
pub fn reduce_shards(s: &ShardedCensus, n: u64) -> Result<TriadCensus, ParallelError> {
    let mut census = TriadCensus::empty(n);
    for shard in &s.shards {
        for (acc, &c) in census.counts.iter_mut().zip(shard).skip(1) {
            *acc = acc.checked_add(c as u128).ok_or(ParallelError::Overflow)?;
        }
    }
    if shard_has_null(s) {
        return Err(ParallelError::InvalidConfig(
            "class 003 must not be accumulated in shards".into(),
        ));
    }
    close_null_class(census).ok_or(ParallelError::Overflow)
}

fn shard_has_null(s: &ShardedCensus) -> bool {
    s.shards.iter().any(|sh| sh[TriadClass::T003.slot()] != 0)
}

/// Census plus the measurements of the run.
#[derive(Debug, Clone)]
pub struct ParallelRun {
    pub census: TriadCensus,
    pub stats: RunStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    /// Census time only, graph construction excluded.
    pub wall_seconds: f64,
    pub worker_pairs: Vec<u64>,
    pub shard_totals: Vec<u128>,
}

pub fn census_parallel(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
) -> Result<TriadCensus, ParallelError> {
    Ok(census_parallel_with_stats(g, table, cfg)?.census)
}

pub fn census_parallel_with_stats(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
) -> Result<ParallelRun, ParallelError> {
    cfg.validate()?;
    match cfg.selection {
        Selection::Canonical => run::<false>(g, table, cfg),
        Selection::OffByOne => run::<true>(g, table, cfg),
    }
}

fn run<const FAULTY: bool>(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
) -> Result<ParallelRun, ParallelError> {
    let n = g.node_count() as u64;
    let started = Instant::now();
    let (sharded, worker_pairs) = if n < 3 {
        (ShardedCensus::new(cfg.effective_shards()), vec![0; cfg.workers])
    } else {
        match cfg.accumulation {
            Accumulation::SharedAtomic => shared_atomic::<FAULTY>(g, table, cfg)?,
            Accumulation::WorkerPrivate => worker_private::<FAULTY>(g, table, cfg)?,
        }
    };
    let census = reduce_shards(&sharded, n)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    Ok(ParallelRun {
        census,
        stats: RunStats {
            wall_seconds,
            worker_pairs,
            shard_totals: sharded.shard_totals(),
        },
    })
}

fn shared_atomic<const FAULTY: bool>(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
) -> Result<(ShardedCensus, Vec<u64>), ParallelError> {
    let shards: Vec<AtomicShard> = (0..cfg.shards).map(|_| AtomicShard::default()).collect();
    let overflow = AtomicBool::new(false);
    let out = run_collapsed(
        g,
        cfg.workers,
        cfg.chunk_size,
        |_| [0u64; 16],
        |tally, u, v, uv_bits| {
            let (dyad, count) = census_pair::<FAULTY>(g, table, u, v, uv_bits, tally);
            tally[dyad.slot()] += count;
            let shard = &shards[shard_index(u, v, cfg.shards)];
            for (slot, t) in tally.iter_mut().enumerate().skip(1) {
                if *t != 0 {
                    if shard.add(slot, *t).is_err() {
                        overflow.store(true, Ordering::Relaxed);
                    }
                    *t = 0;
                }
            }
        },
    )?;
    if overflow.load(Ordering::Relaxed) {
        return Err(ParallelError::Overflow);
    }
    let worker_pairs = out.into_iter().map(|(_, p)| p).collect();
    let sharded = ShardedCensus {
        shards: shards.iter().map(AtomicShard::snapshot).collect(),
    };
    Ok((sharded, worker_pairs))
}

fn worker_private<const FAULTY: bool>(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
) -> Result<(ShardedCensus, Vec<u64>), ParallelError> {
    struct Private {
        shard: [u64; 16],
        tally: [u64; 16],
        overflow: bool,
    }
    let out = run_collapsed(
        g,
        cfg.workers,
        cfg.chunk_size,
        |_| Private {
            shard: [0; 16],
            tally: [0; 16],
            overflow: false,
        },
        |p, u, v, uv_bits| {
            let (dyad, count) = census_pair::<FAULTY>(g, table, u, v, uv_bits, &mut p.tally);
            p.tally[dyad.slot()] += count;
            for (acc, t) in p.shard.iter_mut().zip(p.tally.iter_mut()) {
                match acc.checked_add(*t) {
                    Some(s) => *acc = s,
                    None => p.overflow = true,
                }
                *t = 0;
            }
        },
    )?;
    if out.iter().any(|(p, _)| p.overflow) {
        return Err(ParallelError::Overflow);
    }
    let worker_pairs = out.iter().map(|(_, pairs)| *pairs).collect();
    let sharded = ShardedCensus {
        shards: out.into_iter().map(|(p, _)| p.shard).collect(),
    };
    Ok((sharded, worker_pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::census_sequential;
    use std::sync::Mutex;

    fn cycle4() -> CompactDigraph {
        CompactDigraph::with_nodes(4, [(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn shard_index_range() {
        for u in 0..200 {
            for v in 0..200 {
                assert_eq!(shard_index(u, v, 1), 0);
                assert!(shard_index(u, v, 64) < 64);
                assert!(shard_index(u, v, 7) < 7);
            }
        }
        // frozen values pin the hash across platforms
        let frozen = [
            (0, 1, 21, 5),
            (1, 2, 60, 15),
            (7, 1000, 42, 10),
            (12345, 67890, 59, 14),
            ((1 << 30) - 2, (1 << 30) - 1, 14, 3),
        ];
        for (u, v, s64, s16) in frozen {
            assert_eq!(shard_index(u, v, 64), s64, "({u}, {v}) over 64");
            assert_eq!(shard_index(u, v, 16), s16, "({u}, {v}) over 16");
        }
    }

    #[test]
    fn chi_square_uniformity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut bins = [0u64; 64];
        let draws = 1_000_000u64;
        for _ in 0..draws {
            let u: u32 = rng.random_range(0..1 << 30);
            let v: u32 = rng.random_range(0..1 << 30);
            bins[shard_index(u, v, 64)] += 1;
        }
        let expected = draws as f64 / 64.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        // 0.99 quantile of chi-square with 63 degrees of freedom
        assert!(chi2 < 92.010, "chi2 = {chi2}");
    }

    #[test]
    fn chi_square_on_dense_small_ids() {
        // graph-like keys: small consecutive ids
        let mut bins = [0u64; 64];
        let mut draws = 0u64;
        for u in 0..1000u32 {
            for v in u + 1..u + 1001 {
                bins[shard_index(u, v, 64)] += 1;
                draws += 1;
            }
        }
        let expected = draws as f64 / 64.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 92.010, "chi2 = {chi2}");
    }

    #[test]
    fn iteration_space_examples() {
        let g = CompactDigraph::from_arcs([(0, 1)]).unwrap();
        assert_eq!(collapse_iteration_space(&g), IterationSpace { total: 2, live: 1 });
        let g = CompactDigraph::from_arcs([(0, 1), (1, 0)]).unwrap();
        assert_eq!(collapse_iteration_space(&g), IterationSpace { total: 2, live: 1 });

        let k = 9u64;
        let star = CompactDigraph::from_arcs((1..=k).map(|v| (0, v))).unwrap();
        let space = collapse_iteration_space(&star);
        assert_eq!(space, IterationSpace { total: 18, live: 9 });
        for i in 0..space.total {
            let (u, e) = locate(&star, i).unwrap();
            assert_eq!(u < e.node(), u == 0);
        }
        assert_eq!(locate(&star, 18), None);
        let units: Vec<_> = space.units(4).collect();
        assert_eq!(units.len(), 5);
        assert_eq!(units[4], WorkUnit { start: 16, end: 18 });
    }

    #[test]
    fn locate_skips_empty_spans() {
        let g = CompactDigraph::with_nodes(6, [(0, 4), (4, 5)]).unwrap();
        let owners: Vec<_> = (0..g.entry_count()).map(|i| locate(&g, i).unwrap().0).collect();
        assert_eq!(owners, vec![0, 4, 4, 5]);
    }

    #[test]
    fn every_live_pair_once() {
        let arcs: Vec<(u64, u64)> = (0..300u64).map(|i| (i % 37, (i * 7 + 3) % 41)).collect();
        let g = CompactDigraph::from_arcs(arcs).unwrap();
        let space = collapse_iteration_space(&g);
        for (workers, chunk) in [(1, 1), (3, 1), (4, 7), (8, 1024)] {
            let seen = Mutex::new(Vec::new());
            let per_worker = for_each_live_pair(&g, workers, chunk, |_, u, v| {
                seen.lock().unwrap().push((u, v));
            })
            .unwrap();
            let mut seen = seen.into_inner().unwrap();
            assert_eq!(per_worker.iter().sum::<u64>(), space.live);
            seen.sort_unstable();
            let before = seen.len();
            seen.dedup();
            assert_eq!(before, seen.len(), "pair processed twice");
            assert_eq!(seen.len() as u64, space.live);
        }
    }

    #[test]
    fn degenerate_config_matches_sequential() {
        let t = TriadCodeTable::standard();
        let g = cycle4();
        let seq = census_sequential(&g, t);
        let par = census_parallel(&g, t, &RunConfig::new(1, 1, 1)).unwrap();
        assert_eq!(par, seq);
        let par = census_parallel(&g, t, &RunConfig::new(8, 64, 1024)).unwrap();
        assert_eq!(par.get(TriadClass::T030C), 1);
        assert_eq!(par.get(TriadClass::T012), 3);
        assert_eq!(par.total(), 4);
    }

    #[test]
    fn private_mode_matches_shared() {
        let t = TriadCodeTable::standard();
        let arcs: Vec<(u64, u64)> = (0..500u64).map(|i| (i % 53, (i * 13 + 1) % 59)).collect();
        let g = CompactDigraph::from_arcs(arcs).unwrap();
        let seq = census_sequential(&g, t);
        for workers in [1, 2, 5] {
            let cfg = RunConfig {
                accumulation: Accumulation::WorkerPrivate,
                ..RunConfig::new(workers, 64, 16)
            };
            let run = census_parallel_with_stats(&g, t, &cfg).unwrap();
            assert_eq!(run.census, seq);
            assert_eq!(run.stats.shard_totals.len(), workers);
            assert_eq!(run.stats.worker_pairs.len(), workers);
        }
    }

    #[test]
    fn stats_are_consistent() {
        let t = TriadCodeTable::standard();
        let g = CompactDigraph::from_arcs((0..100u64).map(|i| (i, (i * 3 + 1) % 100))).unwrap();
        let run = census_parallel_with_stats(&g, t, &RunConfig::new(3, 16, 8)).unwrap();
        assert_eq!(
            run.stats.worker_pairs.iter().sum::<u64>(),
            collapse_iteration_space(&g).live
        );
        assert_eq!(
            run.stats.shard_totals.iter().sum::<u128>(),
            run.census.connected_total()
        );
        assert!(run.stats.wall_seconds >= 0.0);
    }

    #[test]
    fn rejects_zero_config() {
        let t = TriadCodeTable::standard();
        let g = cycle4();
        for cfg in [
            RunConfig::new(0, 1, 1),
            RunConfig::new(1, 0, 1),
            RunConfig::new(1, 1, 0),
        ] {
            assert!(matches!(
                census_parallel(&g, t, &cfg),
                Err(ParallelError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn reduce_examples() {
        let s = ShardedCensus::new(4);
        let c = reduce_shards(&s, 3).unwrap();
        assert_eq!(c.get(TriadClass::T003), 1);

        let mut s = ShardedCensus::new(2);
        s.shards[1][TriadClass::T012.slot()] = 3;
        s.shards[1][TriadClass::T030C.slot()] = 1;
        let c = reduce_shards(&s, 4).unwrap();
        assert_eq!(c.get(TriadClass::T003), 0);
        assert_eq!(c.get(TriadClass::T012), 3);
        assert_eq!(c.get(TriadClass::T030C), 1);

        let mut s = ShardedCensus::new(2);
        s.shards[0][TriadClass::T012.slot()] = 4;
        s.shards[1][TriadClass::T012.slot()] = 4;
        let c = reduce_shards(&s, 10).unwrap();
        assert_eq!(c.get(TriadClass::T012), 8);
        assert_eq!(c.get(TriadClass::T003), 112);
    }

    #[test]
    fn overflow_is_reported() {
        let mut s = ShardedCensus::new(2);
        s.shards[0][TriadClass::T012.slot()] = u64::MAX;
        s.shards[1][TriadClass::T012.slot()] = u64::MAX;
        assert!(matches!(reduce_shards(&s, 10), Err(ParallelError::Overflow)));

        let shard = AtomicShard::default();
        shard.add(2, u64::MAX - 1).unwrap();
        shard.add(2, 1).unwrap();
        assert!(matches!(shard.add(2, 1), Err(ParallelError::Overflow)));
    }
}
