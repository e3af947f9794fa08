use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{Graph, NodeId, SignedGraph};
use crate::error::{Error, Result};
use crate::sign::Sign;

/// Result of parsing an edge list: the graph over dense ids plus the
/// bookkeeping needed to report in terms of the file's own ids.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SignedGraph,
    /// `original_ids[dense]` is the id used in the file.
    pub original_ids: Vec<u64>,
    /// Repeated undirected pairs with an agreeing sign, dropped.
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Splits one edge-list line into `(u, v, sign)`. `Ok(None)` for blank and
/// comment lines.
pub(crate) fn parse_line(line_no: usize, raw: &str) -> Result<Option<(u64, u64, Sign)>> {
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let malformed = |reason: String| Error::MalformedLine {
        line: line_no,
        reason,
    };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(malformed(format!(
            "expected 3 tokens `u v sign`, found {}",
            tokens.len()
        )));
    }
    let node = |tok: &str| {
        tok.parse::<u64>()
            .map_err(|_| malformed(format!("invalid node id `{tok}`")))
    };
    let u = node(tokens[0])?;
    let v = node(tokens[1])?;
    let sign = tokens[2]
        .parse::<Sign>()
        .map_err(|_| malformed(format!("invalid sign `{}`", tokens[2])))?;
    Ok(Some((u, v, sign)))
}

/// Dense id assignment in order of first appearance.
#[derive(Default)]
pub(crate) struct IdMap {
    dense: HashMap<u64, NodeId>,
    pub(crate) original: Vec<u64>,
}

impl IdMap {
    pub(crate) fn intern(&mut self, id: u64) -> NodeId {
        let next = self.original.len();
        *self.dense.entry(id).or_insert_with(|| {
            self.original.push(id);
            next
        })
    }
}

/// Parses whitespace-separated `u v sign` lines. `#` starts a comment line.
///
/// Self-loops are dropped and counted. A repeated undirected pair is counted
/// and dropped when its sign agrees with the first occurrence and is a hard
/// error otherwise.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids = IdMap::default();
    let mut seen: HashMap<(NodeId, NodeId), Sign> = HashMap::new();
    let mut edges = Vec::new();
    let mut signs = Vec::new();
    let mut duplicates = 0;
    let mut self_loops = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let Some((a, b, sign)) = parse_line(idx + 1, &line)? else {
            continue;
        };
        if a == b {
            self_loops += 1;
            continue;
        }
        let (u, v) = (ids.intern(a), ids.intern(b));
        let pair = (u.min(v), u.max(v));
        match seen.entry(pair) {
            Entry::Occupied(prev) => {
                if *prev.get() != sign {
                    return Err(Error::ConflictingDuplicate {
                        line: idx + 1,
                        u: a,
                        v: b,
                    });
                }
                duplicates += 1;
            }
            Entry::Vacant(slot) => {
                slot.insert(sign);
                edges.push(pair);
                signs.push(sign);
            }
        }
    }

    if ids.original.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let graph = Graph::from_canonical(ids.original.len(), edges);
    Ok(LoadedGraph {
        graph: SignedGraph::new(graph, signs)?,
        original_ids: ids.original,
        duplicates,
        self_loops,
    })
}

/// Writes `u v sign` lines in edge-id order, translating through
/// `original_ids` when given. Isolated nodes are not representable.
pub fn write_edge_list<W: Write>(
    mut out: W,
    graph: &SignedGraph,
    original_ids: Option<&[u64]>,
) -> Result<()> {
    let name = |v: NodeId| original_ids.map_or(v as u64, |ids| ids[v]);
    writeln!(
        out,
        "# {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    )?;
    for (e, &(u, v)) in graph.graph().edges().iter().enumerate() {
        writeln!(out, "{} {} {}", name(u), name(v), graph.sign(e))?;
    }
    out.flush()?;
    Ok(())
}
