//! Three-way agreement checks: brute force, sequential and parallel census.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::census::{total_triads, TriadCensus};
use crate::gen::{GenSpec, Model};
use crate::graph::CompactDigraph;
use crate::kernel::{census_sequential_with, TriadCodeTable};
use crate::oracle::{brute_force_census, compare_censuses, verify_code_table, Mismatch, OracleError, OracleReport};
use crate::parallel::{census_parallel, ParallelError, RunConfig};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
}

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub brute_force: TriadCensus,
    pub sequential: TriadCensus,
    pub parallel: TriadCensus,
    pub mismatches: Vec<Mismatch>,
}

/// Runs all three censuses on `g` and lists every disagreement, plus any
/// census whose classes do not add up to `n(n-1)(n-2)/6`. The sequential and
/// parallel runs use `cfg.selection`; the brute force does not depend on it.
pub fn cross_check(
    label: &str,
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cfg: &RunConfig,
    cap: usize,
) -> Result<CrossCheck, VerifyError> {
    let brute_force = brute_force_census(g, table, cap)?;
    let sequential = census_sequential_with(g, table, cfg.selection);
    let parallel = census_parallel(g, table, cfg)?;
    let mut mismatches = compare_censuses("brute-force", &brute_force, "sequential", &sequential);
    mismatches.extend(compare_censuses("brute-force", &brute_force, "parallel", &parallel));
    let expected = total_triads(g.node_count() as u64);
    for (name, c) in [("brute-force", &brute_force), ("sequential", &sequential), ("parallel", &parallel)] {
        if c.total() != expected {
            mismatches.push(Mismatch {
                input: format!("{name}: total triads"),
                expected: expected.to_string(),
                actual: c.total().to_string(),
            });
        }
    }
    for m in &mut mismatches {
        m.input = format!("{label}: {}", m.input);
    }
    Ok(CrossCheck {
        brute_force,
        sequential,
        parallel,
        mismatches,
    })
}

/// Seeded corpus: the first half uniform, the second half power-law, with
/// node counts in `[3, max_nodes]` and densities on a ladder from sparse to
/// near-complete.
pub fn verification_corpus(count: usize, max_nodes: u64, seed: u64) -> Vec<(String, GenSpec)> {
    const DENSITIES: [f64; 10] = [0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 0.95];
    const EXPONENTS: [f64; 4] = [1.516, 2.127, 2.5, 3.126];
    let max_nodes = max_nodes.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let model = if i < count / 2 { Model::Uniform } else { Model::PowerLaw };
            let n = rng.random_range(3..=max_nodes);
            let density = DENSITIES[i % DENSITIES.len()];
            let max_arcs = n * (n - 1);
            let m = ((max_arcs as f64 * density).round() as u64).clamp(1, max_arcs);
            let spec = GenSpec {
                model,
                node_count: n,
                target_arcs: m,
                exponent: EXPONENTS[i % EXPONENTS.len()],
                seed: rng.random(),
            };
            let label = format!(
                "graph {i} ({}, n={n}, m={m})",
                match model {
                    Model::Uniform => "uniform",
                    Model::PowerLaw => "powerlaw",
                }
            );
            (label, spec)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub graphs_checked: usize,
    pub code_table: OracleReport,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn new(table: &TriadCodeTable) -> VerifyReport {
        let code_table = verify_code_table(table);
        VerifyReport {
            passed: code_table.passed,
            graphs_checked: 0,
            code_table,
            mismatches: Vec::new(),
        }
    }

    pub fn add(&mut self, check: CrossCheck) {
        self.graphs_checked += 1;
        self.passed &= check.mismatches.is_empty();
        self.mismatches.extend(check.mismatches);
    }
}
