//! Embedded circuits (simple directed cycles) of a turn graph and the
//! potential disks that are sums of at most `M = max(|m|, |l|)` of them.
//!
//! Circuits and disks are identified with their edge-multiplicity vectors;
//! every functional the linear program uses factors through that vector.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turn_graph::{TurnGraph, TurnKind};

/// A simple directed cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedCircuit {
    /// Multiplicity (0 or 1) per edge of the turn graph.
    pub edge_vector: Vec<u32>,
    /// Visit count (0 or 1) per turn.
    pub vertex_visits: Vec<u32>,
    /// Edges in traversal order, starting at the least visited vertex.
    pub cycle: Vec<usize>,
}

/// A potential disk, deduplicated by edge vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialDisk {
    pub edge_vector: Vec<u32>,
    pub vertex_visits: Vec<u32>,
    /// Fewest embedded circuits summing to this vector.
    pub circuit_count: u32,
    pub omega: i64,
    pub mu: i64,
    pub kind: TurnKind,
}

/// Visit count of each vertex: the out-degree in the edge vector.
pub fn vertex_visits(edge_vector: &[u32], g: &TurnGraph) -> Vec<u32> {
    let mut v = vec![0; g.n()];
    for (e, &c) in g.edges().iter().zip(edge_vector) {
        v[e.from] += c;
    }
    v
}

/// Total weight of the visited vertices, with multiplicity.
pub fn omega(edge_vector: &[u32], g: &TurnGraph) -> i64 {
    vertex_visits(edge_vector, g)
        .iter()
        .zip(g.turns())
        .map(|(&c, t)| c as i64 * t.weight)
        .sum()
}

/// Type of the support: all type-m, all type-l, or mixed.
pub fn support_kind(edge_vector: &[u32], g: &TurnGraph) -> TurnKind {
    let mut kinds = vertex_visits(edge_vector, g)
        .into_iter()
        .zip(g.turns())
        .filter(|(c, _)| *c > 0)
        .map(|(_, t)| t.kind);
    let Some(first) = kinds.next() else { return TurnKind::Mixed };
    if first != TurnKind::Mixed && kinds.all(|k| k == first) {
        first
    } else {
        TurnKind::Mixed
    }
}

/// `|m|` for type-m support, `|l|` for type-l support, `gcd(m, l)` otherwise.
pub fn mu(edge_vector: &[u32], g: &TurnGraph) -> i64 {
    let p = g.params();
    match support_kind(edge_vector, g) {
        TurnKind::TypeM => p.m().abs(),
        TurnKind::TypeL => p.ell().abs(),
        TurnKind::Mixed => p.m().gcd(&p.ell()),
    }
}

/// Simple directed cycles, each once, sorted by their edge index sets.
pub fn enumerate_embedded_circuits(g: &TurnGraph, cap: usize) -> Result<Vec<EmbeddedCircuit>> {
    let n = g.n();
    let adj: Vec<Vec<(usize, usize)>> =
        (0..n).map(|v| g.out_edges(v).map(|e| (g.edges()[e].to, e)).collect()).collect();
    let mut found: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        let mut on_path = vec![false; n];
        let mut path = Vec::new();
        on_path[root] = true;
        dfs(root, root, &adj, &mut on_path, &mut path, &mut found, cap)?;
    }
    let mut out: Vec<(Vec<usize>, EmbeddedCircuit)> = found
        .into_iter()
        .map(|cycle| {
            let mut edge_vector = vec![0; g.num_edges()];
            for &e in &cycle {
                edge_vector[e] = 1;
            }
            let vertex_visits = vertex_visits(&edge_vector, g);
            let mut key = cycle.clone();
            key.sort_unstable();
            (key, EmbeddedCircuit { edge_vector, vertex_visits, cycle })
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

fn dfs(
    root: usize,
    v: usize,
    adj: &[Vec<(usize, usize)>],
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    for &(u, e) in &adj[v] {
        if u == root {
            path.push(e);
            found.push(path.clone());
            path.pop();
            if found.len() > cap {
                return Err(Error::LimitExceeded { what: "embedded circuits", count: found.len(), cap });
            }
        } else if u > root && !on_path[u] {
            on_path[u] = true;
            path.push(e);
            dfs(root, u, adj, on_path, path, found, cap)?;
            path.pop();
            on_path[u] = false;
        }
    }
    Ok(())
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// True iff the support of the edge vector is connected (as an undirected
/// graph on the visited vertices) and nonempty.
pub fn support_connected(edge_vector: &[u32], g: &TurnGraph) -> bool {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut visited = vec![false; n];
    for (e, &c) in g.edges().iter().zip(edge_vector) {
        if c > 0 {
            visited[e.from] = true;
            visited[e.to] = true;
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
    }
    let mut roots = (0..n).filter(|&v| visited[v]).map(|v| find(&mut parent, v));
    match roots.next() {
        None => false,
        Some(r) => roots.all(|x| x == r),
    }
}

/// Potential disks that are sums of at most `M` embedded circuits with
/// connected union, deduplicated by edge vector and sorted by
/// `(circuit_count, edge_vector)`.
///
/// `cap` bounds the number of circuit multisets examined.
pub fn enumerate_potential_disks(
    g: &TurnGraph,
    circuits: &[EmbeddedCircuit],
    cap: usize,
) -> Result<Vec<PotentialDisk>> {
    let max_size = g.params().big_m() as usize;
    let mut best: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    let mut examined = 0usize;
    let mut chosen = Vec::with_capacity(max_size);
    let mut acc = vec![0u32; g.num_edges()];
    extend(g, circuits, 0, max_size, &mut chosen, &mut acc, &mut best, &mut examined, cap)?;
    let mut disks: Vec<PotentialDisk> = best
        .into_iter()
        .map(|(edge_vector, circuit_count)| PotentialDisk {
            vertex_visits: vertex_visits(&edge_vector, g),
            omega: omega(&edge_vector, g),
            mu: mu(&edge_vector, g),
            kind: support_kind(&edge_vector, g),
            circuit_count,
            edge_vector,
        })
        .collect();
    disks.sort_by(|a, b| (a.circuit_count, &a.edge_vector).cmp(&(b.circuit_count, &b.edge_vector)));
    Ok(disks)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &TurnGraph,
    circuits: &[EmbeddedCircuit],
    start: usize,
    max_size: usize,
    chosen: &mut Vec<usize>,
    acc: &mut Vec<u32>,
    best: &mut BTreeMap<Vec<u32>, u32>,
    examined: &mut usize,
    cap: usize,
) -> Result<()> {
    if !chosen.is_empty() {
        *examined += 1;
        if *examined > cap {
            return Err(Error::LimitExceeded { what: "circuit multisets", count: *examined, cap });
        }
        if support_connected(acc, g) && omega(acc, g) % mu(acc, g) == 0 {
            let count = chosen.len() as u32;
            best.entry(acc.clone()).and_modify(|c| *c = (*c).min(count)).or_insert(count);
        }
    }
    if chosen.len() == max_size {
        return Ok(());
    }
    for i in start..circuits.len() {
        chosen.push(i);
        for (a, c) in acc.iter_mut().zip(&circuits[i].edge_vector) {
            *a += c;
        }
        extend(g, circuits, i, max_size, chosen, acc, best, examined, cap)?;
        for (a, c) in acc.iter_mut().zip(&circuits[i].edge_vector) {
            *a -= c;
        }
        chosen.pop();
    }
    Ok(())
}
