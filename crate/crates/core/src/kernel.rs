//! Triad classification and the sequential subquadratic census.
//!
//! The census walks every adjacent pair `(u, v)` with `u < v` once. The
//! pair contributes `n - |S| - 2` dyadic triads, where `S` is the union of
//! both neighborhoods without `u` and `v`, and one connected triad for each
//! `w` in `S` that passes the canonical-selection rule. The null class is
//! closed at the end from the total triad count.

use std::sync::OnceLock;

use thiserror::Error;

use crate::census::{total_triads, TriadCensus, TriadClass};
use crate::graph::{CompactDigraph, EdgeCode, GraphError, NeighborEntry, NodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("triad nodes must be distinct, got ({0}, {1}, {2})")]
    NotDistinct(NodeId, NodeId, NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Six arc-presence bits over an ordered triple `(a, b, c)`.
///
/// | bit | arc    |
/// |-----|--------|
/// | 0   | a -> b |
/// | 1   | b -> a |
/// | 2   | a -> c |
/// | 3   | c -> a |
/// | 4   | b -> c |
/// | 5   | c -> b |
///
/// With this layout the three 2-bit edge codes seen from `a` (for `b` and
/// `c`) and from `b` (for `c`) concatenate directly into the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriadConfig(u8);

/// `ARC_BITS[i][j]` is the bit for arc `i -> j` among positions 0, 1, 2.
const ARC_BITS: [[u8; 3]; 3] = [[0xff, 0, 2], [1, 0xff, 4], [3, 5, 0xff]];

/// The six relabelings of three positions.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

impl TriadConfig {
    pub const EMPTY: TriadConfig = TriadConfig(0);
    pub const COMPLETE: TriadConfig = TriadConfig(63);

    pub fn new(bits: u8) -> Option<TriadConfig> {
        (bits < 64).then_some(TriadConfig(bits))
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self.0
    }

    /// Assembles a config from raw 2-bit codes (`0` = not adjacent):
    /// `ab` from a's entry for b, `ac` from a's entry for c, `bc` from b's entry for c.
    #[inline]
    pub fn from_code_bits(ab: u8, ac: u8, bc: u8) -> TriadConfig {
        TriadConfig(ab | (ac << 2) | (bc << 4))
    }

    pub fn from_codes(ab: Option<EdgeCode>, ac: Option<EdgeCode>, bc: Option<EdgeCode>) -> TriadConfig {
        let b = |c: Option<EdgeCode>| c.map_or(0, EdgeCode::bits);
        TriadConfig::from_code_bits(b(ab), b(ac), b(bc))
    }

    pub fn from_arcs(arcs: &[(usize, usize)]) -> TriadConfig {
        TriadConfig(arcs.iter().fold(0, |acc, &(i, j)| acc | 1 << ARC_BITS[i][j]))
    }

    pub fn has_arc(self, from: usize, to: usize) -> bool {
        from != to && self.0 & (1 << ARC_BITS[from][to]) != 0
    }

    /// Moves the node at position `i` to position `perm[i]`.
    pub fn permute(self, perm: [usize; 3]) -> TriadConfig {
        let mut out = 0u8;
        for i in 0..3 {
            for j in 0..3 {
                if self.has_arc(i, j) {
                    out |= 1 << ARC_BITS[perm[i]][perm[j]];
                }
            }
        }
        TriadConfig(out)
    }

    pub fn all() -> impl Iterator<Item = TriadConfig> {
        (0u8..64).map(TriadConfig)
    }
}

/// One representative arc set per class on positions `a=0, b=1, c=2`.
const REPRESENTATIVES: [(TriadClass, &[(usize, usize)]); 16] = [
    (TriadClass::T003, &[]),
    (TriadClass::T012, &[(0, 1)]),
    (TriadClass::T102, &[(0, 1), (1, 0)]),
    (TriadClass::T021D, &[(1, 0), (1, 2)]),
    (TriadClass::T021U, &[(0, 1), (2, 1)]),
    (TriadClass::T021C, &[(0, 1), (1, 2)]),
    (TriadClass::T111D, &[(0, 1), (1, 0), (2, 1)]),
    (TriadClass::T111U, &[(0, 1), (1, 0), (1, 2)]),
    (TriadClass::T030T, &[(0, 1), (2, 1), (0, 2)]),
    (TriadClass::T030C, &[(0, 1), (1, 2), (2, 0)]),
    (TriadClass::T201, &[(0, 1), (1, 0), (1, 2), (2, 1)]),
    (TriadClass::T120D, &[(1, 0), (1, 2), (0, 2), (2, 0)]),
    (TriadClass::T120U, &[(0, 1), (2, 1), (0, 2), (2, 0)]),
    (TriadClass::T120C, &[(0, 1), (1, 2), (0, 2), (2, 0)]),
    (TriadClass::T210, &[(0, 1), (1, 2), (2, 1), (0, 2), (2, 0)]),
    (
        TriadClass::T300,
        &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
    ),
];

/// 64-entry map from arc configuration to isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadCodeTable {
    map: [TriadClass; 64],
}

impl TriadCodeTable {
    /// Enumerates the orbit of each class representative under the six
    /// relabelings. Panics if the orbits do not tile all 64 configs.
    pub fn build() -> TriadCodeTable {
        let mut map: [Option<TriadClass>; 64] = [None; 64];
        for (class, arcs) in REPRESENTATIVES {
            let rep = TriadConfig::from_arcs(arcs);
            for perm in PERMUTATIONS {
                let slot = &mut map[rep.permute(perm).bits() as usize];
                assert!(
                    slot.is_none() || *slot == Some(class),
                    "representatives of {:?} and {class:?} are isomorphic",
                    slot
                );
                *slot = Some(class);
            }
        }
        TriadCodeTable {
            map: map.map(|c| c.expect("config not reached by any representative")),
        }
    }

    /// Process-wide table, built on first use.
    pub fn standard() -> &'static TriadCodeTable {
        static TABLE: OnceLock<TriadCodeTable> = OnceLock::new();
        TABLE.get_or_init(TriadCodeTable::build)
    }

    /// Wraps an arbitrary map, e.g. for checking a table from elsewhere.
    pub fn from_map(map: [TriadClass; 64]) -> TriadCodeTable {
        TriadCodeTable { map }
    }

    pub fn with_entry(mut self, config: TriadConfig, class: TriadClass) -> TriadCodeTable {
        self.map[config.bits() as usize] = class;
        self
    }

    #[inline]
    pub fn classify(&self, config: TriadConfig) -> TriadClass {
        self.map[config.bits() as usize]
    }

    pub fn as_array(&self) -> &[TriadClass; 64] {
        &self.map
    }
}

impl Default for TriadCodeTable {
    fn default() -> Self {
        TriadCodeTable::standard().clone()
    }
}

/// Class of the triad on `u, v, w`, reading each pair's code by binary search.
pub fn iso_tricode(
    table: &TriadCodeTable,
    g: &CompactDigraph,
    u: NodeId,
    v: NodeId,
    w: NodeId,
) -> Result<TriadClass, KernelError> {
    if u == v || u == w || v == w {
        return Err(KernelError::NotDistinct(u, v, w));
    }
    let uv = g.edge_code_between(u, v)?;
    let uw = g.edge_code_between(u, w)?;
    let vw = g.edge_code_between(v, w)?;
    Ok(table.classify(TriadConfig::from_codes(uv, uw, vw)))
}

/// Order-insensitive classification of an unordered node triple.
pub fn classify_triple(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    a: NodeId,
    b: NodeId,
    c: NodeId,
) -> Result<TriadClass, KernelError> {
    iso_tricode(table, g, a, b, c)
}

/// Two-cursor walk over sorted subarrays, yielding every node of the union
/// except `skip_a` and `skip_b` once in increasing order with its raw code
/// from each side (`0` when absent). Returns the number of visits.
#[inline(always)]
pub(crate) fn merge_union<F: FnMut(NodeId, u8, u8)>(
    left: &[NeighborEntry],
    right: &[NeighborEntry],
    skip_a: NodeId,
    skip_b: NodeId,
    mut visit: F,
) -> u64 {
    let (mut i, mut j) = (0, 0);
    let mut visited = 0u64;
    loop {
        let l = left.get(i).map_or(u32::MAX, |e| e.node());
        let r = right.get(j).map_or(u32::MAX, |e| e.node());
        let (w, lc, rc) = if l < r {
            i += 1;
            (l, left[i - 1].code_bits(), 0)
        } else if r < l {
            j += 1;
            (r, 0, right[j - 1].code_bits())
        } else if l == u32::MAX {
            break;
        } else {
            i += 1;
            j += 1;
            (l, left[i - 1].code_bits(), right[j - 1].code_bits())
        };
        if w == skip_a || w == skip_b {
            continue;
        }
        visited += 1;
        visit(w, lc, rc);
    }
    visited
}

/// Visits each `w` in `N(u) ∪ N(v) \ {u, v}` in increasing order with the
/// `u`-`w` and `v`-`w` codes (from `u`'s and `v`'s side). Returns `|S|`.
pub fn union_traverse<F: FnMut(NodeId, Option<EdgeCode>, Option<EdgeCode>)>(
    g: &CompactDigraph,
    u: NodeId,
    v: NodeId,
    mut visit: F,
) -> Result<u64, GraphError> {
    let nu = g.neighbors(u)?;
    let nv = g.neighbors(v)?;
    Ok(merge_union(nu, nv, u, v, |w, cu, cv| {
        visit(w, EdgeCode::from_bits(cu), EdgeCode::from_bits(cv))
    }))
}

/// Which third nodes a pair `(u, v)` owns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// `v < w`, or `u < w < v` with `w` not adjacent to `u`.
    #[default]
    Canonical,
    /// Deliberately wrong rule (`v + 1 < w`) used to check that verification catches it.
    OffByOne,
}

#[inline(always)]
fn selects<const FAULTY: bool>(u: NodeId, v: NodeId, w: NodeId, uw_bits: u8) -> bool {
    let above = if FAULTY { v + 1 < w } else { v < w };
    above || (u < w && w < v && uw_bits == 0)
}

/// Walks the union for the adjacent pair `u < v` (with `uv_bits` the code from
/// `u`'s side) and reports each triad this pair owns. Returns `|S|`.
#[inline(always)]
pub(crate) fn scan_pair<const FAULTY: bool, F: FnMut(NodeId, TriadConfig)>(
    g: &CompactDigraph,
    u: NodeId,
    v: NodeId,
    uv_bits: u8,
    mut on_triad: F,
) -> u64 {
    merge_union(
        g.neighbors_unchecked(u),
        g.neighbors_unchecked(v),
        u,
        v,
        |w, uw, vw| {
            if selects::<FAULTY>(u, v, w, uw) {
                on_triad(w, TriadConfig::from_code_bits(uv_bits, uw, vw));
            }
        },
    )
}

/// Per-pair work: connected triads into `tally`, returns the dyadic class and count.
///
/// Same walk as [`merge_union`], but a maximal stretch where only one cursor
/// advances is skipped over by galloping search. Every `w` in such a stretch
/// is adjacent to just one of `u`, `v`, so its config depends only on that one
/// code and the stretch reduces to three per-code counts. This keeps pairs
/// with a hub endpoint from costing a full pass per element.
#[inline(always)]
pub(crate) fn census_pair<const FAULTY: bool>(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    u: NodeId,
    v: NodeId,
    uv_bits: u8,
    tally: &mut [u64; 16],
) -> (TriadClass, u64) {
    let union = if FAULTY {
        scan_pair::<true, _>(g, u, v, uv_bits, |_, config| {
            tally[table.classify(config).slot()] += 1;
        })
    } else {
        census_pair_runs(g, table, u, v, uv_bits, tally)
    };
    let dyad = if uv_bits == EdgeCode::Both.bits() {
        TriadClass::T102
    } else {
        TriadClass::T012
    };
    (dyad, g.node_count() as u64 - union - 2)
}

/// Per-code counters for one-sided stretches.
#[derive(Default)]
struct RunCounts {
    visited: u64,
    low: u64,
    high: u64,
    both: u64,
}

impl RunCounts {
    /// Counts of selected entries with code OUT, IN, BOTH.
    #[inline(always)]
    fn by_code(&self) -> [u64; 3] {
        [self.low - self.both, self.high - self.both, self.both]
    }
}

/// First index at or after `from` whose neighbor id is not below `stop`.
/// Exponential probe then binary search, so short stretches stay cheap.
#[inline(always)]
fn gallop(list: &[NeighborEntry], from: usize, stop: NodeId) -> usize {
    let mut lo = from;
    let mut step = 1;
    let mut hi = from;
    while hi < list.len() && list[hi].node() < stop {
        lo = hi + 1;
        hi = from + step;
        step <<= 1;
    }
    let hi = hi.min(list.len());
    lo + list[lo..hi].partition_point(|e| e.node() < stop)
}

/// Consumes `list[*at..]` while the neighbor id is below `stop`. `pivot` (the
/// other endpoint of the pair) is not counted; entries above it are selected.
#[inline(always)]
fn one_sided_run(list: &[NeighborEntry], at: &mut usize, stop: NodeId, pivot: NodeId, acc: &mut RunCounts) {
    let end = gallop(list, *at, stop);
    let run = &list[*at..end];
    *at = end;
    let split = run.partition_point(|e| e.node() <= pivot);
    let has_pivot = split > 0 && run[split - 1].node() == pivot;
    acc.visited += (run.len() - has_pivot as usize) as u64;
    // bounded by the run length; wrapping keeps the loop vectorizable under overflow checks
    let (mut low, mut high, mut both) = (0u32, 0u32, 0u32);
    for e in &run[split..] {
        let code = e.packed();
        low = low.wrapping_add(code & 1);
        high = high.wrapping_add((code >> 1) & 1);
        both = both.wrapping_add(code & (code >> 1) & 1);
    }
    acc.low += low as u64;
    acc.high += high as u64;
    acc.both += both as u64;
}

fn census_pair_runs(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    u: NodeId,
    v: NodeId,
    uv_bits: u8,
    tally: &mut [u64; 16],
) -> u64 {
    let left = g.neighbors_unchecked(u);
    let right = g.neighbors_unchecked(v);
    let (mut i, mut j) = (0usize, 0usize);
    // only in N(u): selected iff v < w
    let mut u_side = RunCounts::default();
    // only in N(v): selected iff u < w (w != v is guaranteed)
    let mut v_side = RunCounts::default();
    let mut common = 0u64;
    while i < left.len() && j < right.len() {
        let l = left[i].node();
        let r = right[j].node();
        if l < r {
            one_sided_run(left, &mut i, r, v, &mut u_side);
        } else if r < l {
            one_sided_run(right, &mut j, l, u, &mut v_side);
        } else {
            common += 1;
            if v < l {
                let config = TriadConfig::from_code_bits(uv_bits, left[i].code_bits(), right[j].code_bits());
                tally[table.classify(config).slot()] += 1;
            }
            i += 1;
            j += 1;
        }
    }
    one_sided_run(left, &mut i, NodeId::MAX, v, &mut u_side);
    one_sided_run(right, &mut j, NodeId::MAX, u, &mut v_side);

    for (k, (cu, cv)) in u_side.by_code().into_iter().zip(v_side.by_code()).enumerate() {
        let code = k as u8 + 1;
        tally[table.classify(TriadConfig::from_code_bits(uv_bits, code, 0)).slot()] += cu;
        tally[table.classify(TriadConfig::from_code_bits(uv_bits, 0, code)).slot()] += cv;
    }
    common + u_side.visited + v_side.visited
}

/// Closes the null class: `003 = n(n-1)(n-2)/6 - sum(others)`.
/// `None` if the other classes already exceed the total.
pub fn close_null_class(mut census: TriadCensus) -> Option<TriadCensus> {
    let rest = census.connected_total();
    census.counts[TriadClass::T003.slot()] = total_triads(census.n).checked_sub(rest)?;
    Some(census)
}

/// Sequential census of `g`.
pub fn census_sequential(g: &CompactDigraph, table: &TriadCodeTable) -> TriadCensus {
    census_sequential_with(g, table, Selection::Canonical)
}

pub fn census_sequential_with(
    g: &CompactDigraph,
    table: &TriadCodeTable,
    selection: Selection,
) -> TriadCensus {
    match selection {
        Selection::Canonical => run_sequential::<false>(g, table),
        Selection::OffByOne => run_sequential::<true>(g, table),
    }
}

fn run_sequential<const FAULTY: bool>(g: &CompactDigraph, table: &TriadCodeTable) -> TriadCensus {
    let n = g.node_count() as u64;
    let mut census = TriadCensus::empty(n);
    if n < 3 {
        return census;
    }
    let mut tally = [0u64; 16];
    for u in 0..n as NodeId {
        for e in g.neighbors_unchecked(u) {
            let v = e.node();
            if v <= u {
                continue;
            }
            let (dyad, count) = census_pair::<FAULTY>(g, table, u, v, e.code_bits(), &mut tally);
            census.counts[dyad.slot()] += count as u128;
        }
        // flush before a u64 tally could come near overflow
        if tally.iter().any(|&t| t > u64::MAX / 2) {
            flush(&mut census, &mut tally);
        }
    }
    flush(&mut census, &mut tally);
    close_null_class(census).expect("connected triads exceed the triad total")
}

fn flush(census: &mut TriadCensus, tally: &mut [u64; 16]) {
    for (c, t) in census.counts.iter_mut().zip(tally.iter_mut()) {
        *c += *t as u128;
        *t = 0;
    }
}
