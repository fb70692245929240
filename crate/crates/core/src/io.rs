//! Edge-list text ingestion and the binary graph cache.
//!
//! Text: one `src dst` pair per line, decimal, whitespace separated. Blank
//! lines and lines starting with `#` are skipped.
//!
//! Binary (all little-endian):
//!
//! ```text
//! "TCSR" | version: u32 | n: u64 | entry_count: u64 | arc_count: u64
//! offsets: (n + 1) x u64
//! entries: entry_count x u32   (neighbor << 2 | direction)
//! ```

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{build_graph, BuildOptions, BuildOutput, CompactDigraph, EdgeList, GraphError, NeighborEntry};

pub const BINARY_MAGIC: &[u8; 4] = b"TCSR";
pub const BINARY_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("not a binary graph cache (bad magic)")]
    BadMagic,
    #[error("unsupported binary graph version {0}")]
    BadVersion(u32),
    #[error("binary graph cache is truncated or has trailing bytes")]
    BadLength,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn with_path(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses edge-list text from any reader.
pub fn parse_edge_list<R: BufRead>(mut reader: R) -> Result<EdgeList, IoError> {
    let mut edges = EdgeList::new();
    let mut line = String::new();
    let mut line_no = 0usize;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| IoError::Parse {
            line: line_no + 1,
            message: e.to_string(),
        })?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u64, IoError> {
            let tok = fields.next().ok_or_else(|| IoError::Parse {
                line: line_no,
                message: format!("missing {what} id"),
            })?;
            tok.parse::<u64>().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("invalid {what} id {tok:?}"),
            })
        };
        let src = next_id("source")?;
        let dst = next_id("target")?;
        if let Some(extra) = fields.next() {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("unexpected extra field {extra:?}"),
            });
        }
        edges.push(src, dst);
    }
    Ok(edges)
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList, IoError> {
    let file = File::open(path).map_err(with_path(path))?;
    parse_edge_list(BufReader::with_capacity(1 << 20, file))
}

pub fn write_edge_list<W: Write>(edges: &EdgeList, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    for &(s, d) in &edges.pairs {
        writeln!(out, "{s} {d}")?;
    }
    out.flush()
}

pub fn save_edge_list(edges: &EdgeList, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(with_path(path))?;
    write_edge_list(edges, file).map_err(with_path(path))
}

/// Sidecar for remapped ids: line `i` holds the original id of dense node `i`.
pub fn save_id_map(id_map: &[u64], path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(with_path(path))?;
    let mut out = BufWriter::new(file);
    let res = id_map
        .iter()
        .try_for_each(|id| writeln!(out, "{id}"))
        .and_then(|_| out.flush());
    res.map_err(with_path(path))
}

pub fn encode_binary<W: Write>(g: &CompactDigraph, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&BINARY_VERSION.to_le_bytes())?;
    out.write_all(&(g.node_count() as u64).to_le_bytes())?;
    out.write_all(&(g.entry_count() as u64).to_le_bytes())?;
    out.write_all(&g.arc_count().to_le_bytes())?;
    for off in g.offsets() {
        out.write_all(&off.to_le_bytes())?;
    }
    for e in g.entries() {
        out.write_all(&e.packed().to_le_bytes())?;
    }
    out.flush()
}

pub fn decode_binary<R: Read>(mut input: R) -> Result<CompactDigraph, IoError> {
    let io_err = |e: io::Error| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            IoError::BadLength
        } else {
            IoError::Io {
                path: PathBuf::from("<binary input>"),
                source: e,
            }
        }
    };
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header).map_err(io_err)?;
    if &header[0..4] != BINARY_MAGIC {
        return Err(IoError::BadMagic);
    }
    let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let u64_at = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != BINARY_VERSION {
        return Err(IoError::BadVersion(version));
    }
    let n = u64_at(8);
    let entry_count = u64_at(16);
    let arc_count = u64_at(24);
    if n > crate::graph::MAX_NODES {
        return Err(GraphError::Capacity {
            id: n - 1,
            max: crate::graph::MAX_NODES,
        }
        .into());
    }

    let mut buf = vec![0u8; (n as usize + 1) * 8];
    input.read_exact(&mut buf).map_err(io_err)?;
    let offsets: Vec<u64> = buf
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if offsets.last() != Some(&entry_count) {
        return Err(GraphError::Corrupt("offsets do not end at entry_count".into()).into());
    }

    let mut buf = vec![0u8; entry_count as usize * 4];
    input.read_exact(&mut buf).map_err(io_err)?;
    let entries = buf
        .chunks_exact(4)
        .map(|c| {
            NeighborEntry::from_packed(u32::from_le_bytes(c.try_into().unwrap()))
                .ok_or_else(|| GraphError::Corrupt("entry without direction bits".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(io_err)? != 0 {
        return Err(IoError::BadLength);
    }
    Ok(CompactDigraph::from_parts(offsets, entries, arc_count)?)
}

pub fn save_binary(g: &CompactDigraph, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(with_path(path))?;
    encode_binary(g, file).map_err(with_path(path))
}

pub fn load_binary(path: &Path) -> Result<CompactDigraph, IoError> {
    let file = File::open(path).map_err(with_path(path))?;
    decode_binary(BufReader::with_capacity(1 << 20, file))
}

/// `true` if the file starts with the binary cache magic.
pub fn is_binary(path: &Path) -> Result<bool, IoError> {
    let mut file = File::open(path).map_err(with_path(path))?;
    let mut magic = [0u8; 4];
    let mut filled = 0;
    while filled < 4 {
        match file.read(&mut magic[filled..]).map_err(with_path(path))? {
            0 => return Ok(false),
            k => filled += k,
        }
    }
    Ok(&magic == BINARY_MAGIC)
}

/// Loads either format. Build options only apply to edge-list input.
pub fn load_graph(path: &Path, opts: &BuildOptions) -> Result<BuildOutput, IoError> {
    if is_binary(path)? {
        let mut graph = load_binary(path)?;
        if let Some(n) = opts.node_count {
            if n != graph.node_count() as u64 {
                graph = widen(graph, n)?;
            }
        }
        return Ok(BuildOutput {
            graph,
            dropped_self_loops: 0,
            duplicate_arcs: 0,
            id_map: None,
        });
    }
    let edges = read_edge_list(path)?;
    Ok(build_graph(&edges, opts)?)
}

fn widen(g: CompactDigraph, n: u64) -> Result<CompactDigraph, GraphError> {
    if n < g.node_count() as u64 {
        return Err(GraphError::NodeCountTooSmall {
            requested: n,
            required: g.node_count() as u64,
        });
    }
    let mut offsets = g.offsets().to_vec();
    let last = *offsets.last().unwrap();
    offsets.resize(n as usize + 1, last);
    CompactDigraph::from_parts(offsets, g.entries().to_vec(), g.arc_count())
}
