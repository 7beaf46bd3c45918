//! AdjacencyGraph text format.
//!
//! ```text
//! AdjacencyGraph
//! <n>
//! <m>
//! <offset_0 .. offset_{n-1}>    one per line, offset_0 = 0, nondecreasing
//! <edge_0 .. edge_{m-1}>        one per line, each in [0, n)
//! ```
//!
//! Vertex `i` owns edges `[offset_i, offset_{i+1})` with `offset_n = m`
//! implied. Parse errors carry the 1-based line number.

use std::path::Path;

use streamgraph_core::graph::GraphVersion;

use crate::CliError;

pub fn parse_adjacency_text(text: &str, path: &str) -> Result<Vec<Vec<u64>>, CliError> {
    let mut lines = text.lines().enumerate();
    let mut next_line = |what: &str| -> Result<(usize, &str), CliError> {
        for (idx, raw) in lines.by_ref() {
            let t = raw.trim();
            if !t.is_empty() {
                return Ok((idx + 1, t));
            }
        }
        Err(CliError::parse(
            path,
            text.lines().count(),
            format!("missing {what}"),
        ))
    };

    let (line, header) = next_line("header")?;
    if header != "AdjacencyGraph" {
        return Err(CliError::parse(
            path,
            line,
            "expected literal 'AdjacencyGraph'",
        ));
    }
    let (line, n_str) = next_line("vertex count")?;
    let n: u64 = n_str
        .parse()
        .map_err(|_| CliError::parse(path, line, "vertex count is not a decimal integer"))?;
    let (line, m_str) = next_line("edge count")?;
    let m: u64 = m_str
        .parse()
        .map_err(|_| CliError::parse(path, line, "edge count is not a decimal integer"))?;

    let mut offsets: Vec<u64> = Vec::with_capacity(n as usize);
    for i in 0..n {
        let (line, s) = next_line("offset")?;
        let off: u64 = s
            .parse()
            .map_err(|_| CliError::parse(path, line, "offset is not a decimal integer"))?;
        if i == 0 && off != 0 {
            return Err(CliError::parse(path, line, "first offset must be 0"));
        }
        if let Some(&prev) = offsets.last() {
            if off < prev {
                return Err(CliError::parse(path, line, "offsets must be nondecreasing"));
            }
        }
        if off > m {
            return Err(CliError::parse(
                path,
                line,
                format!("offset {off} exceeds m={m}"),
            ));
        }
        offsets.push(off);
    }

    let mut edges: Vec<u64> = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (line, s) = next_line("edge")?;
        let e: u64 = s
            .parse()
            .map_err(|_| CliError::parse(path, line, "edge is not a decimal integer"))?;
        if e >= n {
            return Err(CliError::parse(
                path,
                line,
                format!("edge target {e} not in [0, {n})"),
            ));
        }
        edges.push(e);
    }
    if let Some((idx, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(CliError::parse(
            path,
            idx + 1,
            format!("unexpected trailing content '{extra}' (m mismatch?)"),
        ));
    }

    let mut adj: Vec<Vec<u64>> = Vec::with_capacity(n as usize);
    for i in 0..n as usize {
        let start = offsets[i] as usize;
        let end = if i + 1 < n as usize {
            offsets[i + 1] as usize
        } else {
            m as usize
        };
        adj.push(edges[start..end].to_vec());
    }
    Ok(adj)
}

/// Adds the reverse of every directed edge; duplicates collapse on build.
pub fn symmetrize(adj: &mut [Vec<u64>]) {
    let pairs: Vec<(u64, u64)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.iter().map(move |&v| (u as u64, v)))
        .collect();
    for (u, v) in pairs {
        adj[v as usize].push(u);
    }
}

pub fn emit_adjacency(adj: &[Vec<u64>]) -> String {
    let m: usize = adj.iter().map(Vec::len).sum();
    let mut out = String::new();
    out.push_str("AdjacencyGraph\n");
    out.push_str(&format!("{}\n{}\n", adj.len(), m));
    let mut off = 0usize;
    for ns in adj {
        out.push_str(&format!("{off}\n"));
        off += ns.len();
    }
    for ns in adj {
        for v in ns {
            out.push_str(&format!("{v}\n"));
        }
    }
    out
}

pub fn load_graph(path: &Path, do_symmetrize: bool, b: u64) -> Result<GraphVersion, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut adj = parse_adjacency_text(&text, &path.display().to_string())?;
    if do_symmetrize {
        symmetrize(&mut adj);
    }
    Ok(GraphVersion::build(&adj, b))
}
