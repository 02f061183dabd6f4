//! The weighted turn graph of a cyclically reduced word with zero t-exponent.
//!
//! Vertices are the turns `t^{eps_i} a^{k_i} t^{eps_{i+1}}`; there is an edge
//! `i -> j` exactly when `-eps_i = eps_{j+1}`, and the edge `i -> j` is paired
//! with its dual `j+1 -> i-1`. Indices are 0-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{CyclicWord, GroupParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnKind {
    /// `t a^k t^-1`
    TypeM,
    /// `t^-1 a^k t`
    TypeL,
    Mixed,
}

impl TurnKind {
    pub fn of(eps_in: i8, eps_out: i8) -> TurnKind {
        match (eps_in, eps_out) {
            (1, -1) => TurnKind::TypeM,
            (-1, 1) => TurnKind::TypeL,
            _ => TurnKind::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub weight: i64,
    pub kind: TurnKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub dual: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnGraph {
    params: GroupParams,
    source: CyclicWord,
    turns: Vec<Turn>,
    edges: Vec<Edge>,
}

pub fn build_turn_graph(w: &CyclicWord) -> Result<TurnGraph> {
    let n = w.n();
    if n == 0 || w.t_exponent() != 0 {
        return Err(Error::NotHyperbolicZeroExponent);
    }
    let turns = (0..n)
        .map(|i| Turn { index: i, weight: w.k(i), kind: TurnKind::of(w.eps(i), w.eps(i + 1)) })
        .collect();
    let mut slot = vec![vec![usize::MAX; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if -w.eps(i) == w.eps(j + 1) {
                slot[i][j] = pairs.len();
                pairs.push((i, j));
            }
        }
    }
    let edges = pairs
        .iter()
        .map(|&(i, j)| Edge { from: i, to: j, dual: slot[(j + 1) % n][(i + n - 1) % n] })
        .collect();
    Ok(TurnGraph { params: w.params(), source: w.clone(), turns, edges })
}

impl TurnGraph {
    /// Assembles a graph without checking it; see [`validate`].
    pub fn from_parts(params: GroupParams, source: CyclicWord, turns: Vec<Turn>, edges: Vec<Edge>) -> TurnGraph {
        TurnGraph { params, source, turns, edges }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn source(&self) -> &CyclicWord {
        &self.source
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.turns.len()
    }

    /// Number of edges, the `K` of the surface construction.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, from: usize, to: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.from == from && e.to == to)
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == v).map(|(i, _)| i)
    }

    /// Dual pairs `(e, dual e)` with `e < dual e`, in increasing order of `e`.
    pub fn dual_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().enumerate().filter(|&(i, e)| i < e.dual).map(|(i, e)| (i, e.dual)).collect()
    }

    pub fn self_dual_edges(&self) -> Vec<usize> {
        self.edges.iter().enumerate().filter(|&(i, e)| i == e.dual).map(|(i, _)| i).collect()
    }
}

/// Checks the edge rule, completeness of the edge set, and that `dual` is the
/// involution `(i -> j) <-> (j+1 -> i-1)`.
pub fn validate(g: &TurnGraph) -> bool {
    let n = g.n();
    let w = &g.source;
    if n == 0 || w.n() != n {
        return false;
    }
    let turns_ok = g.turns.iter().enumerate().all(|(i, t)| {
        t.index == i && t.weight == w.k(i) && t.kind == TurnKind::of(w.eps(i), w.eps(i + 1))
    });
    let mut seen = vec![vec![false; n]; n];
    for e in &g.edges {
        if e.from >= n || e.to >= n || seen[e.from][e.to] || -w.eps(e.from) != w.eps(e.to + 1) {
            return false;
        }
        seen[e.from][e.to] = true;
        let Some(d) = g.edges.get(e.dual) else { return false };
        if d.from != (e.to + 1) % n || d.to != (e.from + n - 1) % n {
            return false;
        }
    }
    let complete = (0..n).all(|i| (0..n).all(|j| seen[i][j] == (-w.eps(i) == w.eps(j + 1))));
    let involution = g.edges.iter().enumerate().all(|(i, e)| g.edges[e.dual].dual == i);
    turns_ok && complete && involution
}
