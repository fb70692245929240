//! Brute-force reference census and exhaustive code-table checks.

use serde::Serialize;
use thiserror::Error;

use crate::census::{total_triads, TriadCensus, TriadClass};
use crate::graph::{CompactDigraph, NodeId};
use crate::kernel::{classify_triple, TriadCodeTable, TriadConfig, PERMUTATIONS};

pub const DEFAULT_CAP: usize = 2000;

/// Expected number of configs per class, in M-A-N order.
pub const CLASS_CARDINALITIES: [usize; 16] = [1, 6, 3, 3, 3, 6, 6, 6, 6, 2, 3, 3, 3, 6, 6, 1];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error(
        "graph has {n} nodes, above the brute-force cap of {cap}; \
         raise --cap if you can afford C(n,3) classifications"
    )]
    TooLarge { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn from_mismatches(mismatches: Vec<Mismatch>) -> OracleReport {
        OracleReport {
            passed: mismatches.is_empty(),
            mismatches,
        }
    }
}

/// Classifies all `C(n, 3)` triples one by one.
pub fn brute_force_census(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    cap: usize,
) -> Result<TriadCensus, OracleError> {
    let n = g.node_count();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let mut census = TriadCensus::empty(n as u64);
    let n = n as NodeId;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let class = classify_triple(g, table, a, b, c).expect("distinct in-range triple");
                census.counts[class.slot()] += 1;
            }
        }
    }
    assert_eq!(
        census.total(),
        total_triads(n as u64),
        "enumeration missed triples"
    );
    Ok(census)
}

/// Checks permutation invariance, class count, class sizes and fixed anchors.
pub fn verify_code_table(table: &TriadCodeTable) -> OracleReport {
    let mut mismatches = Vec::new();
    let mut push = |input: String, expected: String, actual: String| {
        mismatches.push(Mismatch {
            input,
            expected,
            actual,
        })
    };

    for c in TriadConfig::all() {
        let base = table.classify(c);
        for perm in PERMUTATIONS {
            let moved = c.permute(perm);
            let got = table.classify(moved);
            if got != base {
                push(
                    format!("config {} permuted by {:?} (config {})", c.bits(), perm, moved.bits()),
                    base.label().into(),
                    got.label().into(),
                );
            }
        }
    }

    let mut sizes = [0usize; 16];
    for c in TriadConfig::all() {
        sizes[table.classify(c).slot()] += 1;
    }
    let distinct = sizes.iter().filter(|&&s| s > 0).count();
    if distinct != 16 {
        push("distinct classes".into(), "16".into(), distinct.to_string());
    }
    if sizes != CLASS_CARDINALITIES {
        push(
            "class cardinalities".into(),
            format!("{CLASS_CARDINALITIES:?}"),
            format!("{sizes:?}"),
        );
    }

    let mut anchors = vec![
        (TriadConfig::EMPTY, TriadClass::T003),
        (TriadConfig::COMPLETE, TriadClass::T300),
    ];
    for (i, j) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)] {
        anchors.push((TriadConfig::from_arcs(&[(i, j)]), TriadClass::T012));
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        anchors.push((TriadConfig::from_arcs(&[(i, j), (j, i)]), TriadClass::T102));
    }
    for (config, want) in anchors {
        let got = table.classify(config);
        if got != want {
            push(
                format!("config {}", config.bits()),
                want.label().into(),
                got.label().into(),
            );
        }
    }
    OracleReport::from_mismatches(mismatches)
}

/// Compares censuses class by class; labels name the producers.
pub fn compare_censuses(
    reference_name: &str,
    reference: &TriadCensus,
    candidate_name: &str,
    candidate: &TriadCensus,
) -> Vec<Mismatch> {
    let mut out = Vec::new();
    if reference.n != candidate.n {
        out.push(Mismatch {
            input: format!("{candidate_name} vs {reference_name}: n"),
            expected: reference.n.to_string(),
            actual: candidate.n.to_string(),
        });
    }
    for class in TriadClass::ALL {
        if reference.get(class) != candidate.get(class) {
            out.push(Mismatch {
                input: format!("{candidate_name} vs {reference_name}: class {}", class.label()),
                expected: reference.get(class).to_string(),
                actual: candidate.get(class).to_string(),
            });
        }
    }
    out
}
