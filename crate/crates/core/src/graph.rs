//! Compact direction-encoded CSR representation of a simple digraph.
//!
//! Every adjacency `{u, v}` is stored once in `u`'s subarray and once in
//! `v`'s subarray. Each stored entry packs the neighbor id into the high
//! bits of a `u32` and the direction of the adjacency, seen from the owning
//! node, into the two low bits:
//!
//! | bits | meaning                           |
//! |------|-----------------------------------|
//! | `01` | arc from the owner to the neighbor |
//! | `10` | arc from the neighbor to the owner |
//! | `11` | arcs in both directions            |
//!
//! Subarrays are sorted by packed value, which is the same as sorting by
//! neighbor id because a neighbor appears at most once per subarray.

use std::fmt;

use thiserror::Error;

/// Dense node index, `0..node_count`.
pub type NodeId = u32;

/// Largest node count the packed entry layout can address (`2^30`).
pub const MAX_NODES: u64 = 1 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop ({src}, {dst}) at input position {position} rejected by policy")]
    SelfLoop { src: u64, dst: u64, position: usize },
    #[error("node id {id} exceeds the packed layout capacity of {max} nodes")]
    Capacity { id: u64, max: u64 },
    #[error("node count override {requested} is smaller than the id range {required} seen in the input")]
    NodeCountTooSmall { requested: u64, required: u64 },
    #[error("node {node} out of bounds for a graph of {node_count} nodes")]
    NodeOutOfBounds { node: u64, node_count: u64 },
    #[error("edge code query needs two distinct nodes, got ({0}, {0})")]
    SameNode(u64),
    #[error("corrupt graph: {0}")]
    Corrupt(String),
}

/// Direction of an adjacency seen from the node whose subarray holds it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum EdgeCode {
    Out = 0b01,
    In = 0b10,
    Both = 0b11,
}

impl EdgeCode {
    #[inline]
    pub fn from_bits(bits: u8) -> Option<EdgeCode> {
        match bits & 0b11 {
            0b01 => Some(EdgeCode::Out),
            0b10 => Some(EdgeCode::In),
            0b11 => Some(EdgeCode::Both),
            _ => None,
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self as u8
    }

    /// The same adjacency seen from the other endpoint.
    #[inline]
    pub fn transpose(self) -> EdgeCode {
        match self {
            EdgeCode::Out => EdgeCode::In,
            EdgeCode::In => EdgeCode::Out,
            EdgeCode::Both => EdgeCode::Both,
        }
    }

    #[inline]
    pub fn has_out(self) -> bool {
        self.bits() & 0b01 != 0
    }

    #[inline]
    pub fn has_in(self) -> bool {
        self.bits() & 0b10 != 0
    }

    pub fn is_mutual(self) -> bool {
        self == EdgeCode::Both
    }
}

/// One packed CSR entry: `(neighbor << 2) | code`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct NeighborEntry(u32);

impl NeighborEntry {
    /// Packs a neighbor id and a direction. `node` must be below [`MAX_NODES`].
    #[inline]
    pub fn new(node: NodeId, code: EdgeCode) -> NeighborEntry {
        debug_assert!((node as u64) < MAX_NODES);
        NeighborEntry((node << 2) | code.bits() as u32)
    }

    #[inline]
    pub fn node(self) -> NodeId {
        self.0 >> 2
    }

    /// Raw two-bit direction code, never zero for an entry built by this crate.
    #[inline]
    pub fn code_bits(self) -> u8 {
        (self.0 & 0b11) as u8
    }

    #[inline]
    pub fn code(self) -> EdgeCode {
        EdgeCode::from_bits(self.code_bits()).expect("stored entry without direction")
    }

    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    /// Reinterprets a raw packed value. Returns `None` if the direction bits are zero.
    pub fn from_packed(packed: u32) -> Option<NeighborEntry> {
        if packed & 0b11 == 0 {
            None
        } else {
            Some(NeighborEntry(packed))
        }
    }
}

impl fmt::Debug for NeighborEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?})", self.node(), self.code())
    }
}

/// Raw `(src, dst)` arcs as ingested, before deduplication.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub pairs: Vec<(u64, u64)>,
}

impl EdgeList {
    pub fn new() -> EdgeList {
        EdgeList::default()
    }

    pub fn push(&mut self, src: u64, dst: u64) {
        self.pairs.push((src, dst));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// One past the largest id mentioned, or 0 for an empty list.
    pub fn id_span(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(s, d)| s.max(d) + 1)
            .max()
            .unwrap_or(0)
    }
}

impl From<Vec<(u64, u64)>> for EdgeList {
    fn from(pairs: Vec<(u64, u64)>) -> Self {
        EdgeList { pairs }
    }
}

impl FromIterator<(u64, u64)> for EdgeList {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        EdgeList {
            pairs: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoopPolicy {
    Reject,
    #[default]
    Drop,
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub self_loops: SelfLoopPolicy,
    /// Forces the node count above `1 + max id`, e.g. for isolated trailing nodes.
    pub node_count: Option<u64>,
    /// Remap sparse input ids to `0..n` in increasing id order.
    pub remap: bool,
}

/// Result of [`build_graph`] with the bookkeeping the caller may want to report.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub graph: CompactDigraph,
    pub dropped_self_loops: u64,
    /// Input arcs that were exact repeats of an earlier arc.
    pub duplicate_arcs: u64,
    /// `id_map[dense] = original`, present only when remapping was requested.
    pub id_map: Option<Vec<u64>>,
}

/// Immutable direction-encoded CSR digraph.
#[derive(Clone, PartialEq, Eq)]
pub struct CompactDigraph {
    offsets: Vec<u64>,
    entries: Vec<NeighborEntry>,
    arc_count: u64,
}

impl fmt::Debug for CompactDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompactDigraph")
            .field("node_count", &self.node_count())
            .field("entry_count", &self.entry_count())
            .field("arc_count", &self.arc_count)
            .finish()
    }
}

impl CompactDigraph {
    /// Builds with the default options (drop self-loops, no remap).
    pub fn from_arcs<I: IntoIterator<Item = (u64, u64)>>(arcs: I) -> Result<CompactDigraph, GraphError> {
        Ok(build_graph(&arcs.into_iter().collect(), &BuildOptions::default())?.graph)
    }

    /// Like [`from_arcs`](Self::from_arcs) with an explicit node count.
    pub fn with_nodes<I: IntoIterator<Item = (u64, u64)>>(
        node_count: u64,
        arcs: I,
    ) -> Result<CompactDigraph, GraphError> {
        let opts = BuildOptions {
            node_count: Some(node_count),
            ..BuildOptions::default()
        };
        Ok(build_graph(&arcs.into_iter().collect(), &opts)?.graph)
    }

    /// Assembles a graph from raw parts and checks every structural invariant.
    pub fn from_parts(
        offsets: Vec<u64>,
        entries: Vec<NeighborEntry>,
        arc_count: u64,
    ) -> Result<CompactDigraph, GraphError> {
        let g = CompactDigraph {
            offsets,
            entries,
            arc_count,
        };
        g.validate()?;
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored entries; every adjacency is counted from both endpoints.
    #[inline]
    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn arc_count(&self) -> u64 {
        self.arc_count
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn entries(&self) -> &[NeighborEntry] {
        &self.entries
    }

    /// Sorted adjacency subarray of `u`.
    pub fn neighbors(&self, u: NodeId) -> Result<&[NeighborEntry], GraphError> {
        self.check_node(u)?;
        Ok(self.neighbors_unchecked(u))
    }

    #[inline]
    pub(crate) fn neighbors_unchecked(&self, u: NodeId) -> &[NeighborEntry] {
        let u = u as usize;
        &self.entries[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    /// Number of distinct neighbors of `u`, ignoring direction.
    pub fn degree(&self, u: NodeId) -> Result<usize, GraphError> {
        Ok(self.neighbors(u)?.len())
    }

    /// Direction of the `u`-`v` adjacency from `u`'s side, by binary search.
    pub fn edge_code_between(&self, u: NodeId, v: NodeId) -> Result<Option<EdgeCode>, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SameNode(u as u64));
        }
        Ok(self.code_bits_between(u, v).and_then(EdgeCode::from_bits))
    }

    #[inline]
    pub(crate) fn code_bits_between(&self, u: NodeId, v: NodeId) -> Option<u8> {
        let nbrs = self.neighbors_unchecked(u);
        nbrs.binary_search_by_key(&v, |e| e.node())
            .ok()
            .map(|i| nbrs[i].code_bits())
    }

    /// `true` if there is an arc `u -> v`.
    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        if u == v || u as usize >= self.node_count() || v as usize >= self.node_count() {
            return false;
        }
        matches!(self.code_bits_between(u, v), Some(b) if b & 0b01 != 0)
    }

    /// Re-extracts the directed arc set in `(src, dst)` lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors_unchecked(u)
                .iter()
                .filter(|e| e.code().has_out())
                .map(move |e| (u, e.node()))
        })
    }

    fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if (u as usize) < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfBounds {
                node: u as u64,
                node_count: self.node_count() as u64,
            })
        }
    }

    /// Full structural check: offsets, ordering, no self-adjacency, symmetry, arc count.
    pub fn validate(&self) -> Result<(), GraphError> {
        let corrupt = |msg: String| Err(GraphError::Corrupt(msg));
        let n = match self.offsets.len().checked_sub(1) {
            Some(n) => n,
            None => return corrupt("offsets array is empty".into()),
        };
        if n as u64 > MAX_NODES {
            return Err(GraphError::Capacity {
                id: n as u64 - 1,
                max: MAX_NODES,
            });
        }
        if self.offsets[0] != 0 {
            return corrupt(format!("offsets[0] = {}", self.offsets[0]));
        }
        if self.offsets[n] != self.entries.len() as u64 {
            return corrupt(format!(
                "offsets[n] = {} but entry count is {}",
                self.offsets[n],
                self.entries.len()
            ));
        }
        if let Some(w) = self.offsets.windows(2).position(|w| w[0] > w[1]) {
            return corrupt(format!("offsets decrease at node {w}"));
        }
        let mut weight = 0u64;
        for u in 0..n as NodeId {
            let nbrs = self.neighbors_unchecked(u);
            for (i, e) in nbrs.iter().enumerate() {
                if e.code_bits() == 0 {
                    return corrupt(format!("node {u} holds an entry without direction"));
                }
                let v = e.node();
                if v as usize >= n {
                    return corrupt(format!("node {u} lists out-of-range neighbor {v}"));
                }
                if v == u {
                    return corrupt(format!("node {u} lists itself"));
                }
                if i > 0 && nbrs[i - 1].node() >= v {
                    return corrupt(format!("subarray of node {u} is not strictly increasing"));
                }
                let expected = e.code().transpose().bits();
                if self.code_bits_between(v, u) != Some(expected) {
                    return corrupt(format!("adjacency {u}-{v} is not mirrored at {v}"));
                }
                weight += if e.code() == EdgeCode::Both { 2 } else { 1 };
            }
        }
        if weight / 2 != self.arc_count {
            return corrupt(format!(
                "arc count {} disagrees with entries ({})",
                self.arc_count,
                weight / 2
            ));
        }
        Ok(())
    }
}

/// Builds the compact graph in one pass over a sorted half-entry array.
///
/// Each arc `(s, d)` contributes `d` with `OUT` to `s` and `s` with `IN` to
/// `d`. After sorting by `(owner, neighbor)` the repeats of an adjacency are
/// adjacent and their codes are OR-ed together, which collapses duplicates
/// and turns reciprocal pairs into `BOTH`. The output depends only on the
/// arc set, not on input order.
pub fn build_graph(edges: &EdgeList, opts: &BuildOptions) -> Result<BuildOutput, GraphError> {
    let mut dropped_self_loops = 0u64;
    let mut kept: Vec<(u64, u64)> = Vec::with_capacity(edges.len());
    for (position, &(src, dst)) in edges.pairs.iter().enumerate() {
        if src == dst {
            match opts.self_loops {
                SelfLoopPolicy::Reject => {
                    return Err(GraphError::SelfLoop { src, dst, position });
                }
                SelfLoopPolicy::Drop => {
                    dropped_self_loops += 1;
                    continue;
                }
            }
        }
        kept.push((src, dst));
    }

    let id_map = if opts.remap {
        let mut ids: Vec<u64> = edges.pairs.iter().flat_map(|&(s, d)| [s, d]).collect();
        ids.sort_unstable();
        ids.dedup();
        for pair in &mut kept {
            pair.0 = ids.binary_search(&pair.0).expect("id collected above") as u64;
            pair.1 = ids.binary_search(&pair.1).expect("id collected above") as u64;
        }
        Some(ids)
    } else {
        None
    };

    let span = match &id_map {
        Some(ids) => ids.len() as u64,
        None => edges.id_span(),
    };
    let node_count = match opts.node_count {
        Some(requested) if requested < span => {
            return Err(GraphError::NodeCountTooSmall {
                requested,
                required: span,
            });
        }
        Some(requested) => requested,
        None => span,
    };
    if node_count > MAX_NODES {
        return Err(GraphError::Capacity {
            id: node_count - 1,
            max: MAX_NODES,
        });
    }

    // key = owner << 32 | neighbor << 2 | code
    let mut halves: Vec<u64> = Vec::with_capacity(kept.len() * 2);
    for &(s, d) in &kept {
        halves.push((s << 32) | (d << 2) | EdgeCode::Out.bits() as u64);
        halves.push((d << 32) | (s << 2) | EdgeCode::In.bits() as u64);
    }
    drop(kept);
    halves.sort_unstable();

    let mut offsets = vec![0u64; node_count as usize + 1];
    let mut entries: Vec<NeighborEntry> = Vec::with_capacity(halves.len());
    let mut raw_arcs = 0u64;
    let mut i = 0;
    while i < halves.len() {
        let key = halves[i] >> 2;
        let mut code = 0u32;
        while i < halves.len() && halves[i] >> 2 == key {
            code |= (halves[i] & 0b11) as u32;
            if halves[i] & 0b11 == EdgeCode::Out.bits() as u64 {
                raw_arcs += 1;
            }
            i += 1;
        }
        let owner = (key >> 30) as usize;
        let neighbor = (key & ((1 << 30) - 1)) as u32;
        offsets[owner + 1] += 1;
        entries.push(NeighborEntry((neighbor << 2) | code));
    }
    for u in 0..node_count as usize {
        offsets[u + 1] += offsets[u];
    }

    let weight: u64 = entries
        .iter()
        .map(|e| if e.code() == EdgeCode::Both { 2 } else { 1 })
        .sum();
    let arc_count = weight / 2;

    Ok(BuildOutput {
        graph: CompactDigraph {
            offsets,
            entries,
            arc_count,
        },
        dropped_self_loops,
        duplicate_arcs: raw_arcs - arc_count,
        id_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn e(node: NodeId, code: EdgeCode) -> NeighborEntry {
        NeighborEntry::new(node, code)
    }

    #[test]
    fn single_arc_is_mirrored() {
        let g = CompactDigraph::from_arcs([(0, 1)]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.neighbors(0).unwrap(), &[e(1, EdgeCode::Out)]);
        assert_eq!(g.neighbors(1).unwrap(), &[e(0, EdgeCode::In)]);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.entry_count(), 2);
    }

    #[test]
    fn reciprocal_pair_collapses_to_both() {
        let g = CompactDigraph::from_arcs([(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), &[e(1, EdgeCode::Both)]);
        assert_eq!(g.neighbors(1).unwrap(), &[e(0, EdgeCode::Both)]);
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.entry_count(), 2);
    }

    #[test]
    fn duplicates_collapse_and_subarrays_sort() {
        let out = build_graph(
            &vec![(0, 1), (0, 1), (2, 0)].into(),
            &BuildOptions::default(),
        )
        .unwrap();
        let g = out.graph;
        assert_eq!(g.arc_count(), 2);
        assert_eq!(out.duplicate_arcs, 1);
        assert_eq!(
            g.neighbors(0).unwrap(),
            &[e(1, EdgeCode::Out), e(2, EdgeCode::In)]
        );
        g.validate().unwrap();
    }

    #[test]
    fn self_loop_policies() {
        let edges: EdgeList = vec![(0, 1), (1, 1)].into();
        let err = build_graph(
            &edges,
            &BuildOptions {
                self_loops: SelfLoopPolicy::Reject,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert_eq!(
            err,
            GraphError::SelfLoop {
                src: 1,
                dst: 1,
                position: 1
            }
        );
        let out = build_graph(&edges, &BuildOptions::default()).unwrap();
        assert_eq!(out.dropped_self_loops, 1);
        assert_eq!(out.graph.arc_count(), 1);
        assert_eq!(out.graph.node_count(), 2);
    }

    #[test]
    fn node_count_override() {
        let g = CompactDigraph::with_nodes(5, [(0, 1)]).unwrap();
        assert_eq!(g.node_count(), 5);
        assert!(g.neighbors(4).unwrap().is_empty());
        let err = CompactDigraph::with_nodes(1, [(0, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::NodeCountTooSmall { .. }));
        let empty = CompactDigraph::with_nodes(3, []).unwrap();
        assert_eq!(empty.node_count(), 3);
        assert_eq!(empty.entry_count(), 0);
    }

    #[test]
    fn capacity_error() {
        let err = CompactDigraph::from_arcs([(0, MAX_NODES)]).unwrap_err();
        assert!(matches!(err, GraphError::Capacity { .. }));
        let err = CompactDigraph::with_nodes(MAX_NODES + 1, []).unwrap_err();
        assert!(matches!(err, GraphError::Capacity { .. }));
    }

    #[test]
    fn remap_makes_ids_dense() {
        let out = build_graph(
            &vec![(1000, 7), (7, 5_000_000_000)].into(),
            &BuildOptions {
                remap: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.id_map.as_deref(), Some(&[7, 1000, 5_000_000_000][..]));
        assert_eq!(out.graph.node_count(), 3);
        let arcs: Vec<_> = out.graph.arcs().collect();
        assert_eq!(arcs, vec![(0, 2), (1, 0)]);
    }

    #[test]
    fn edge_code_queries() {
        let g = CompactDigraph::with_nodes(3, [(0, 1)]).unwrap();
        assert_eq!(g.edge_code_between(0, 1).unwrap(), Some(EdgeCode::Out));
        assert_eq!(g.edge_code_between(1, 0).unwrap(), Some(EdgeCode::In));
        assert_eq!(g.edge_code_between(0, 2).unwrap(), None);
        assert_eq!(g.edge_code_between(1, 1), Err(GraphError::SameNode(1)));
        assert!(matches!(
            g.edge_code_between(0, 3),
            Err(GraphError::NodeOutOfBounds { .. })
        ));
        assert!(matches!(
            g.neighbors(3),
            Err(GraphError::NodeOutOfBounds { .. })
        ));
    }

    #[test]
    fn star_subarray_is_strictly_increasing() {
        let k = 5000u64;
        // reversed insertion order on purpose
        let g = CompactDigraph::from_arcs((1..=k).rev().map(|v| (0, v))).unwrap();
        let hub = g.neighbors(0).unwrap();
        assert_eq!(hub.len(), k as usize);
        assert!(hub.windows(2).all(|w| w[0].node() < w[1].node()));
        assert!(hub.iter().all(|e| e.code() == EdgeCode::Out));
    }

    #[test]
    fn edge_code_transpose() {
        for c in [EdgeCode::Out, EdgeCode::In, EdgeCode::Both] {
            assert_eq!(c.transpose().transpose(), c);
            assert_eq!(EdgeCode::from_bits(c.bits()), Some(c));
        }
        assert_eq!(EdgeCode::Out.transpose(), EdgeCode::In);
        assert_eq!(EdgeCode::Both.transpose(), EdgeCode::Both);
        assert_eq!(EdgeCode::from_bits(0), None);
        assert_eq!(NeighborEntry::from_packed(8), None);
    }

    #[test]
    fn validate_catches_asymmetry() {
        let offsets = vec![0, 1, 1];
        let entries = vec![e(1, EdgeCode::Out)];
        let err = CompactDigraph::from_parts(offsets, entries, 1).unwrap_err();
        assert!(matches!(err, GraphError::Corrupt(_)));
    }

    fn arb_edges() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec((0u64..40, 0u64..40), 0..200)
    }

    proptest! {
        #[test]
        fn round_trip_reproduces_arc_set(pairs in arb_edges()) {
            let g = CompactDigraph::from_arcs(pairs.iter().copied()).unwrap();
            g.validate().unwrap();
            let expected: BTreeSet<(u64, u64)> =
                pairs.iter().copied().filter(|(s, d)| s != d).collect();
            let got: BTreeSet<(u64, u64)> =
                g.arcs().map(|(s, d)| (s as u64, d as u64)).collect();
            prop_assert_eq!(got.len() as u64, g.arc_count());
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn build_ignores_input_order(pairs in arb_edges(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let n = pairs.iter().map(|&(s, d)| s.max(d) + 1).max().unwrap_or(0);
            let a = CompactDigraph::with_nodes(n, pairs).unwrap();
            let b = CompactDigraph::with_nodes(n, shuffled).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn entry_packing_round_trips(node in 0u32..(1 << 30), bits in 1u8..4) {
            let code = EdgeCode::from_bits(bits).unwrap();
            let entry = NeighborEntry::new(node, code);
            prop_assert_eq!(entry.node(), node);
            prop_assert_eq!(entry.code(), code);
            prop_assert_eq!(NeighborEntry::from_packed(entry.packed()), Some(entry));
        }
    }
}
