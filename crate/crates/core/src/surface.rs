//! Band-surface certificates for alternating words, their independent
//! verification, and the balance test for extremal surfaces.
//!
//! A certificate scales an optimal LP point by `N`, takes one polygon per
//! unit of each disk coordinate, and pairs polygon sides labelled `e` with
//! sides labelled by the dual edge. The dual graph of the pairing gets
//! integer edge weights; a polygon can be capped off by a disk exactly when
//! its fill equation vanishes, and the resulting surface bounds scl by
//! `n/4 - d/(2N)` where `d` counts capped polygons.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{omega, support_connected, support_kind, vertex_visits};
use crate::engine::LowerBoundReport;
use crate::error::{Error, Result};
use crate::ratlp::{int, rat, rational_json, Rational};
use crate::turn_graph::{TurnGraph, TurnKind};
use crate::words::{is_alternating, CyclicWord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    /// Index of the potential disk this polygon copies.
    pub disk: usize,
    /// Turn-graph edges on the polygon's sides, with multiplicity, sorted.
    pub circuit: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceCertificate {
    #[serde(rename = "N")]
    pub n_scale: u64,
    pub polygons: Vec<Polygon>,
    /// Pairs of slots; slots number the polygon sides consecutively,
    /// polygon by polygon. The second slot carries the dual label.
    pub pairing: Vec<[usize; 2]>,
    /// Weight of each pairing, i.e. of each edge of the dual graph.
    pub weights: Vec<i64>,
    pub filled: Vec<bool>,
    pub d: u64,
    pub s: u64,
    /// Number of edges of the turn graph.
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(with = "rational_json")]
    pub upper_bound: Rational,
}

impl SurfaceCertificate {
    fn slot_owners(&self) -> Vec<(usize, usize)> {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| poly.circuit.iter().map(move |&e| (p, e)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    /// `l * sum i_k`
    pub lhs: i64,
    /// `-m * sum j_k`
    pub rhs: i64,
    pub extremal_exists: bool,
}

/// Extremal surfaces exist for an alternating word exactly when
/// `l * sum i_k = -m * sum j_k`.
pub fn has_extremal_surface(w: &CyclicWord) -> Result<BalanceReport> {
    let pairs = w.alternating_exponents().ok_or(Error::NotAlternating)?;
    let p = w.params();
    let lhs = p.ell() * pairs.iter().map(|x| x.0).sum::<i64>();
    let rhs = -p.m() * pairs.iter().map(|x| x.1).sum::<i64>();
    Ok(BalanceReport { lhs, rhs, extremal_exists: lhs == rhs })
}

/// Value of the fill equation of a polygon: `omega - m * sum` for type-m
/// polygons and `omega + l * sum` for type-l polygons.
fn fill_value(kind: TurnKind, omega: i64, edge_sum: i128, g: &TurnGraph) -> Option<i128> {
    let omega = omega as i128;
    match kind {
        TurnKind::TypeM => Some(omega - g.params().m() as i128 * edge_sum),
        TurnKind::TypeL => Some(omega + g.params().ell() as i128 * edge_sum),
        TurnKind::Mixed => None,
    }
}

fn edge_vector_of(circuit: &[usize], g: &TurnGraph) -> Vec<u32> {
    let mut v = vec![0u32; g.num_edges()];
    for &e in circuit {
        v[e] += 1;
    }
    v
}

struct Dual {
    /// Per pairing: the two polygons it joins.
    ends: Vec<(usize, usize)>,
    /// Per polygon: incident pairing indices.
    incident: Vec<Vec<usize>>,
}

impl Dual {
    fn new(num_polygons: usize, owners: &[(usize, usize)], pairing: &[[usize; 2]]) -> Dual {
        let ends: Vec<(usize, usize)> = pairing.iter().map(|p| (owners[p[0]].0, owners[p[1]].0)).collect();
        let mut incident = vec![Vec::new(); num_polygons];
        for (i, &(a, b)) in ends.iter().enumerate() {
            incident[a].push(i);
            if b != a {
                incident[b].push(i);
            }
        }
        Dual { ends, incident }
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Component label per polygon, ignoring pairing `skip`.
    fn components(&self, skip: Option<usize>) -> (Vec<usize>, usize) {
        let n = self.incident.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for root in 0..n {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = count;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &e in &self.incident[v] {
                    if Some(e) == skip {
                        continue;
                    }
                    let u = self.other(e, v);
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    fn is_bridge(&self, e: usize) -> bool {
        let (comp, _) = self.components(Some(e));
        comp[self.ends[e].0] != comp[self.ends[e].1]
    }

    /// Edge path from `from` to `to` as pairing indices, by breadth-first search.
    fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.incident.len()];
        let mut seen = vec![false; self.incident.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = Vec::new();
                let mut x = to;
                while let Some((p, e)) = prev[x] {
                    path.push(e);
                    x = p;
                }
                path.reverse();
                return Some(path);
            }
            for &e in &self.incident[v] {
                let u = self.other(e, v);
                if !seen[u] {
                    seen[u] = true;
                    prev[u] = Some((v, e));
                    queue.push_back(u);
                }
            }
        }
        None
    }
}

/// Builds a band-surface certificate from the optimum of the polytope
/// program scaled by `N`.
pub fn build_band_surface(report: &LowerBoundReport, n_scale: u64) -> Result<SurfaceCertificate> {
    let w = &report.word;
    if !is_alternating(w) {
        return Err(Error::NotAlternating);
    }
    let g = &report.graph;
    let prog = &report.program;
    let point = &report.outcome.point;
    if n_scale == 0 {
        return Err(Error::PreconditionViolated("N must be positive".into()));
    }
    if prog.circuit_vars.iter().any(|&j| !point[j].is_zero()) {
        return Err(Error::PreconditionViolated("circuit coordinates must vanish".into()));
    }
    let scale = int(n_scale as i64);
    let mut polygons = Vec::new();
    for (i, &j) in prog.disk_vars.iter().enumerate() {
        let copies = &point[j] * &scale;
        if !copies.is_integer() {
            return Err(Error::NonIntegralScaling { n: n_scale });
        }
        let circuit: Vec<usize> = prog.disks[i]
            .edge_vector
            .iter()
            .enumerate()
            .flat_map(|(e, &c)| std::iter::repeat_n(e, c as usize))
            .collect();
        let count = copies.to_integer().to_string().parse::<usize>().map_err(|_| Error::Overflow("polygon count"))?;
        polygons.extend(std::iter::repeat_n(Polygon { disk: i, circuit }, count));
    }

    let owners: Vec<(usize, usize)> =
        polygons.iter().enumerate().flat_map(|(p, poly)| poly.circuit.iter().map(move |&e| (p, e))).collect();
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); g.num_edges()];
    for (slot, &(_, e)) in owners.iter().enumerate() {
        by_label[e].push(slot);
    }
    let mut pairing = Vec::new();
    for (e, f) in g.dual_pairs() {
        if by_label[e].len() != by_label[f].len() {
            return Err(Error::InternalInconsistency(format!("edges {e} and {f} appear unequally often")));
        }
        pairing.extend(by_label[e].iter().zip(&by_label[f]).map(|(&a, &b)| [a, b]));
    }
    for e in g.self_dual_edges() {
        let slots = &by_label[e];
        if slots.len() % 2 == 1 {
            return Err(Error::InternalInconsistency(format!("self-dual edge {e} has an odd number of sides")));
        }
        pairing.extend(slots.chunks(2).map(|c| [c[0], c[1]]));
    }

    merge_components(polygons.len(), &owners, &mut pairing, g)?;

    let dual = Dual::new(polygons.len(), &owners, &pairing);
    let (comp, num_comp) = dual.components(None);
    if num_comp > g.num_edges() {
        return Err(Error::InternalInconsistency(format!(
            "{num_comp} dual-graph components remain, more than the {} turn-graph edges",
            g.num_edges()
        )));
    }

    let kinds: Vec<TurnKind> = polygons.iter().map(|p| support_kind(&edge_vector_of(&p.circuit, g), g)).collect();
    let omegas: Vec<i64> = polygons.iter().map(|p| omega(&edge_vector_of(&p.circuit, g), g)).collect();
    let (m, l) = (g.params().m(), g.params().ell());
    let mut weights = vec![0i64; pairing.len()];
    for v in 0..polygons.len() {
        if kinds[v] == TurnKind::TypeM {
            let e_v = *dual.incident[v].iter().min().expect("polygons have sides");
            weights[e_v] += omegas[v] / m;
        }
    }
    for c in 0..num_comp {
        let members: Vec<usize> = (0..polygons.len()).filter(|&v| comp[v] == c).collect();
        let Some(&v0) = members.iter().find(|&&v| kinds[v] == TurnKind::TypeL) else { continue };
        for &v1 in members.iter().filter(|&&v| v != v0 && kinds[v] == TurnKind::TypeL) {
            let sum: i64 = dual.incident[v1].iter().map(|&e| weights[e]).sum();
            let big_omega = omegas[v1] / l + sum;
            let path = dual.path(v1, v0).expect("same component");
            for (idx, &e) in path.iter().enumerate() {
                if idx % 2 == 0 {
                    weights[e] -= big_omega;
                } else {
                    weights[e] += big_omega;
                }
            }
        }
    }

    let filled: Vec<bool> = (0..polygons.len())
        .map(|v| {
            let sum = dual.incident[v].iter().map(|&e| weights[e] as i128).sum();
            fill_value(kinds[v], omegas[v], sum, g) == Some(0)
        })
        .collect();
    let d = filled.iter().filter(|&&f| f).count() as u64;
    let s = polygons.len() as u64;
    let upper_bound = rat(w.n() as i64, 4) - rat(d as i64, 2 * n_scale as i64);
    Ok(SurfaceCertificate { n_scale, polygons, pairing, weights, filled, d, s, k: g.num_edges() as u64, upper_bound })
}

/// Swaps partners between two pairings of the same label class lying in
/// different components, as long as some swap reduces the component count.
fn merge_components(
    num_polygons: usize,
    owners: &[(usize, usize)],
    pairing: &mut [[usize; 2]],
    g: &TurnGraph,
) -> Result<()> {
    loop {
        let dual = Dual::new(num_polygons, owners, pairing);
        let (comp, count) = dual.components(None);
        if count <= 1 {
            return Ok(());
        }
        let mut swap = None;
        'search: for label in 0..g.num_edges() {
            let class: Vec<usize> = (0..pairing.len()).filter(|&i| owners[pairing[i][0]].1 == label).collect();
            for (x, &i) in class.iter().enumerate() {
                for &j in &class[x + 1..] {
                    let (ci, cj) = (comp[dual.ends[i].0], comp[dual.ends[j].0]);
                    if ci != cj && (!dual.is_bridge(i) || !dual.is_bridge(j)) {
                        swap = Some((i, j));
                        break 'search;
                    }
                }
            }
        }
        let Some((i, j)) = swap else { return Ok(()) };
        let (bi, bj) = (pairing[i][1], pairing[j][1]);
        pairing[i][1] = bj;
        pairing[j][1] = bi;
    }
}

/// Outcome of [`verify_certificate`]: every violated condition, in the
/// order checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub violations: Vec<String>,
}

impl VerificationReport {
    pub fn first_violation(&self) -> Option<&str> {
        self.violations.first().map(String::as_str)
    }
}

/// Recomputes every invariant of a certificate from the word and its turn
/// graph alone.
pub fn verify_certificate(c: &SurfaceCertificate, w: &CyclicWord, g: &TurnGraph) -> VerificationReport {
    let mut v = Vec::new();
    let k = g.num_edges();
    if c.n_scale == 0 {
        v.push("N must be positive".to_string());
    }
    if c.k != k as u64 {
        v.push(format!("K recorded as {}, turn graph has {k} edges", c.k));
    }
    let mut kinds = Vec::new();
    let mut omegas = Vec::new();
    let mut visits = vec![0u64; g.n()];
    for (p, poly) in c.polygons.iter().enumerate() {
        if poly.circuit.iter().any(|&e| e >= k) {
            v.push(format!("polygon {p} uses an edge outside the turn graph"));
            kinds.push(TurnKind::Mixed);
            omegas.push(0);
            continue;
        }
        let ev = edge_vector_of(&poly.circuit, g);
        let vis = vertex_visits(&ev, g);
        let balanced = g.edges().iter().zip(&ev).fold(vec![0i64; g.n()], |mut acc, (e, &m)| {
            acc[e.from] += m as i64;
            acc[e.to] -= m as i64;
            acc
        });
        if !support_connected(&ev, g) || balanced.iter().any(|&x| x != 0) {
            v.push(format!("polygon {p} is not a closed connected circuit"));
        }
        for (t, &x) in vis.iter().enumerate() {
            visits[t] += x as u64;
        }
        kinds.push(support_kind(&ev, g));
        omegas.push(omega(&ev, g));
    }
    if let Some(t) = visits.iter().position(|&x| x != c.n_scale) {
        v.push(format!("turn {t} is visited {} times, expected N = {}", visits[t], c.n_scale));
    }
    let owners = c.slot_owners();
    let mut used = vec![0u32; owners.len()];
    let mut pairing_ok = true;
    for (i, pair) in c.pairing.iter().enumerate() {
        if pair.iter().any(|&s| s >= owners.len()) || pair[0] == pair[1] {
            v.push(format!("pairing {i} names an invalid slot"));
            pairing_ok = false;
            continue;
        }
        used[pair[0]] += 1;
        used[pair[1]] += 1;
        let (e, f) = (owners[pair[0]].1, owners[pair[1]].1);
        if e >= k || f >= k {
            v.push(format!("pairing {i} joins an edge outside the turn graph"));
            pairing_ok = false;
        } else if g.edges()[e].dual != f {
            v.push(format!("pairing {i} joins edge {e} to edge {f}, which is not its dual"));
        }
    }
    if let Some(s) = used.iter().position(|&u| u != 1) {
        v.push(format!("slot {s} is paired {} times", used[s]));
        pairing_ok = false;
    }
    if c.weights.len() != c.pairing.len() {
        v.push(format!("{} weights for {} pairings", c.weights.len(), c.pairing.len()));
        pairing_ok = false;
    }
    if c.filled.len() != c.polygons.len() {
        v.push(format!("{} fill flags for {} polygons", c.filled.len(), c.polygons.len()));
        pairing_ok = false;
    }
    if pairing_ok {
        let mut sums = vec![0i128; c.polygons.len()];
        for (pair, &wgt) in c.pairing.iter().zip(&c.weights) {
            let (a, b) = (owners[pair[0]].0, owners[pair[1]].0);
            sums[a] += wgt as i128;
            if b != a {
                sums[b] += wgt as i128;
            }
        }
        let mut actual_d = 0u64;
        for p in 0..c.polygons.len() {
            match fill_value(kinds[p], omegas[p], sums[p], g) {
                None => v.push(format!("polygon {p} mixes turn types")),
                Some(val) => {
                    actual_d += u64::from(val == 0);
                    if (val == 0) != c.filled[p] {
                        v.push(format!("fill equation at polygon {p} evaluates to {val}, flag says {}", c.filled[p]));
                    }
                }
            }
        }
        if c.d != actual_d {
            v.push(format!("d recorded as {}, recount gives {actual_d}", c.d));
        }
    }
    if c.s != c.polygons.len() as u64 {
        v.push(format!("s recorded as {}, there are {} polygons", c.s, c.polygons.len()));
    }
    if c.d.saturating_add(c.k) < c.s {
        v.push(format!("d = {} is below s - K = {}", c.d, c.s as i128 - c.k as i128));
    }
    if c.n_scale > 0 {
        let expected = rat(w.n() as i64, 4)
            - Rational::new(BigInt::from(c.d), BigInt::from(c.n_scale) * BigInt::from(2));
        if c.upper_bound != expected {
            v.push(format!("upper bound recorded as {}, formula gives {expected}", c.upper_bound));
        }
    }
    VerificationReport { passed: v.is_empty(), violations: v }
}

/// Least `N` making the scaled optimum integral.
pub fn minimal_scale(report: &LowerBoundReport) -> u64 {
    report
        .program
        .disk_vars
        .iter()
        .map(|&j| report.outcome.point[j].denom().clone())
        .fold(num_bigint::BigInt::from(1), |acc, d| acc.lcm(&d))
        .to_string()
        .parse()
        .unwrap_or(0)
}

/// Upper bounds from certificates built for each `N`.
pub fn upper_bound_sequence(report: &LowerBoundReport, scales: &[u64]) -> Result<Vec<Rational>> {
    scales.par_iter().map(|&n| Ok(build_band_surface(report, n)?.upper_bound)).collect()
}

/// `upper_bound - L(g)` for a certificate.
pub fn gap_to_lower_bound(c: &SurfaceCertificate, report: &LowerBoundReport) -> Rational {
    let gap = &c.upper_bound - &report.value;
    debug_assert!(!gap.is_negative());
    gap
}
