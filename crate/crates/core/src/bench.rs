//! Timing harness: runs the parallel census across worker counts and checks
//! that every configuration produced the same census.

use serde::Serialize;
use thiserror::Error;

use crate::graph::CompactDigraph;
use crate::kernel::TriadCodeTable;
use crate::parallel::{census_parallel_with_stats, Accumulation, ParallelError, RunConfig, RunStats};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("thread list is empty")]
    NoThreads,
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error(
        "census checksum mismatch at {workers} workers: expected {expected}, got {actual} \
         (first differing class {class})"
    )]
    ChecksumMismatch {
        workers: usize,
        expected: String,
        actual: String,
        class: String,
    },
    #[error(transparent)]
    Parallel(#[from] ParallelError),
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub threads: Vec<usize>,
    pub shards: usize,
    pub chunk_size: usize,
    pub accumulation: Accumulation,
    pub repeats: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphDescriptor {
    pub n: u64,
    pub m: u64,
    pub source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub workers: usize,
    pub shards: usize,
    pub chunk_size: usize,
    pub accumulation: Accumulation,
    pub median_seconds: f64,
    pub times: Vec<f64>,
    pub speedup: f64,
    pub checksum: String,
    /// Stats of the run whose time was the median.
    pub stats: RunStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub graph: GraphDescriptor,
    pub rows: Vec<BenchRow>,
    /// Worker counts at which the median time went up.
    pub non_monotone: Vec<usize>,
}

impl BenchResult {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("workers,shards,chunk_size,accumulation,median_seconds,speedup,checksum\n");
        for r in &self.rows {
            let mode = match r.accumulation {
                Accumulation::SharedAtomic => "shared-atomic",
                Accumulation::WorkerPrivate => "worker-private",
            };
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.4},{}\n",
                r.workers, r.shards, r.chunk_size, mode, r.median_seconds, r.speedup, r.checksum
            ));
        }
        out
    }
}

/// Median of a non-empty sample; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Times every worker count in `plan.threads`. A single-worker baseline is
/// added in front if the list lacks one, so speedups are always against one worker.
pub fn run_bench(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    plan: &BenchPlan,
    source: &str,
) -> Result<BenchResult, BenchError> {
    if plan.threads.is_empty() {
        return Err(BenchError::NoThreads);
    }
    if plan.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let mut threads = plan.threads.clone();
    if !threads.contains(&1) {
        threads.insert(0, 1);
    }

    let mut rows: Vec<BenchRow> = Vec::with_capacity(threads.len());
    let mut reference: Option<crate::census::TriadCensus> = None;
    for &workers in &threads {
        let cfg = RunConfig {
            accumulation: plan.accumulation,
            ..RunConfig::new(workers, plan.shards, plan.chunk_size)
        };
        let mut runs = Vec::with_capacity(plan.repeats);
        for _ in 0..plan.repeats {
            let run = census_parallel_with_stats(g, table, &cfg)?;
            match &reference {
                None => reference = Some(run.census.clone()),
                Some(expected) if *expected != run.census => {
                    let class = expected
                        .first_difference(&run.census)
                        .map_or_else(|| "n".to_string(), |c| c.label().to_string());
                    return Err(BenchError::ChecksumMismatch {
                        workers,
                        expected: expected.checksum(),
                        actual: run.census.checksum(),
                        class,
                    });
                }
                Some(_) => {}
            }
            log::info!("workers={workers} time={:.4}s", run.stats.wall_seconds);
            runs.push(run);
        }
        let times: Vec<f64> = runs.iter().map(|r| r.stats.wall_seconds).collect();
        let median_seconds = median(&times);
        let pick = runs
            .iter()
            .min_by(|a, b| {
                (a.stats.wall_seconds - median_seconds)
                    .abs()
                    .total_cmp(&(b.stats.wall_seconds - median_seconds).abs())
            })
            .expect("at least one repeat");
        rows.push(BenchRow {
            workers,
            shards: cfg.effective_shards(),
            chunk_size: plan.chunk_size,
            accumulation: plan.accumulation,
            median_seconds,
            times,
            speedup: 0.0,
            checksum: pick.census.checksum(),
            stats: pick.stats.clone(),
        });
    }

    let base = rows
        .iter()
        .find(|r| r.workers == 1)
        .map(|r| r.median_seconds)
        .expect("baseline row present");
    for r in &mut rows {
        r.speedup = if r.workers == 1 {
            1.0
        } else if r.median_seconds > 0.0 {
            base / r.median_seconds
        } else {
            f64::INFINITY
        };
    }

    let mut by_workers: Vec<&BenchRow> = rows.iter().collect();
    by_workers.sort_by_key(|r| r.workers);
    let non_monotone: Vec<usize> = by_workers
        .windows(2)
        .filter(|w| w[1].median_seconds > w[0].median_seconds)
        .map(|w| w[1].workers)
        .collect();
    for w in &non_monotone {
        log::warn!("median time increased at {w} workers");
    }

    Ok(BenchResult {
        graph: GraphDescriptor {
            n: g.node_count() as u64,
            m: g.arc_count(),
            source: source.to_string(),
        },
        rows,
        non_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(threads: Vec<usize>, repeats: usize) -> BenchPlan {
        BenchPlan {
            threads,
            shards: 64,
            chunk_size: 1024,
            accumulation: Accumulation::SharedAtomic,
            repeats,
        }
    }

    #[test]
    fn median_definition() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[5.0]), 5.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn single_thread_list() {
        let g = CompactDigraph::from_arcs((0..200u64).map(|i| (i % 30, (i * 7 + 1) % 31))).unwrap();
        let res = run_bench(&g, TriadCodeTable::standard(), &plan(vec![1], 3), "test").unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].times.len(), 3);
        assert_eq!(res.rows[0].median_seconds, median(&res.rows[0].times));
        assert!(res.rows.iter().all(|r| r.speedup == 1.0));
    }

    #[test]
    fn rows_share_checksum_and_baseline_is_added() {
        let g = CompactDigraph::from_arcs((0..400u64).map(|i| (i % 50, (i * 11 + 3) % 53))).unwrap();
        let res = run_bench(&g, TriadCodeTable::standard(), &plan(vec![2, 4], 1), "test").unwrap();
        assert_eq!(res.rows.iter().map(|r| r.workers).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(res.rows.windows(2).all(|w| w[0].checksum == w[1].checksum));
        assert_eq!(res.rows[0].speedup, 1.0);
        let csv = res.to_csv();
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn rejects_empty_plan() {
        let g = CompactDigraph::from_arcs([(0, 1)]).unwrap();
        assert!(matches!(
            run_bench(&g, TriadCodeTable::standard(), &plan(vec![], 1), "x"),
            Err(BenchError::NoThreads)
        ));
        assert!(matches!(
            run_bench(&g, TriadCodeTable::standard(), &plan(vec![1], 0), "x"),
            Err(BenchError::NoRepeats)
        ));
    }
}
