//! The polytope program, the lower bound `L(g) = n/4 - max|u|_X / 2`, exact
//! values for alternating words, the closed formula at t-length 2, and the
//! classifier tying everything together.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{enumerate_embedded_circuits, enumerate_potential_disks, EmbeddedCircuit, PotentialDisk};
use crate::error::{Error, Result};
use crate::ratlp::{int, rat, rational_json, solve_max, LinearProgram, LpOutcome, LpStatus, Rational};
use crate::tree_qm::{gap_classify, GapCertificate, GapOutcome};
use crate::turn_graph::{build_turn_graph, TurnGraph};
use crate::words::{
    conjugacy_canonical, cyclically_reduce, is_alternating, CyclicWord, GroupParams, Syllable, Word,
};

/// Enumeration and search limits. Exceeding one is an error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    pub max_circuits: usize,
    /// Bound on circuit multisets examined while enumerating potential disks.
    pub max_disks: usize,
    /// Step cap for the window sweep; `None` means `10 n (|m| + |l|)`.
    pub canonicalization_iters: Option<usize>,
    /// Conjugator exponents tried by the optional reversal-witness search.
    pub witness_search_bound: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { max_circuits: 1_000_000, max_disks: 1_000_000, canonicalization_iters: None, witness_search_bound: 24 }
    }
}

/// The linear program over potential-disk and circuit coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeProgram {
    pub lp: LinearProgram,
    pub disk_vars: Vec<usize>,
    pub circuit_vars: Vec<usize>,
    pub normalization_vertex: usize,
    pub disks: Vec<PotentialDisk>,
    pub circuits: Vec<EmbeddedCircuit>,
}

impl PolytopeProgram {
    /// Edge-multiplicity vector of variable `j`.
    pub fn edge_vector(&self, j: usize) -> &[u32] {
        match self.disk_vars.iter().position(|&d| d == j) {
            Some(i) => &self.disks[i].edge_vector,
            None => &self.circuits[j - self.disks.len()].edge_vector,
        }
    }

    /// `F_v(u)` for every vertex.
    pub fn vertex_counts(&self, g: &TurnGraph, point: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); g.n()];
        for (j, x) in point.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (e, &c) in g.edges().iter().zip(self.edge_vector(j)) {
                if c > 0 {
                    out[e.from] += x * int(c as i64);
                }
            }
        }
        out
    }
}

/// Variables `x_i` (one per disk) then `y_j` (one per circuit); one balance
/// row per dual pair that is not self-dual, and `F_{v0} = 1` at turn 0.
pub fn build_polytope_program(
    g: &TurnGraph,
    disks: &[PotentialDisk],
    circuits: &[EmbeddedCircuit],
) -> PolytopeProgram {
    let p = disks.len();
    let vectors: Vec<&[u32]> =
        disks.iter().map(|d| d.edge_vector.as_slice()).chain(circuits.iter().map(|c| c.edge_vector.as_slice())).collect();
    let vars = (0..p).map(|i| format!("x{i}")).chain((0..circuits.len()).map(|j| format!("y{j}"))).collect();
    let objective = (0..vectors.len()).map(|j| if j < p { Rational::one() } else { Rational::zero() }).collect();
    let mut lp = LinearProgram::new(vars, objective);
    for (e, f) in g.dual_pairs() {
        lp.add_constraint(vectors.iter().map(|v| int(v[e] as i64 - v[f] as i64)).collect(), Rational::zero());
    }
    let v0 = 0;
    let visits = |v: &[u32]| g.edges().iter().zip(v).filter(|(e, _)| e.from == v0).map(|(_, &c)| c as i64).sum::<i64>();
    lp.add_constraint(vectors.iter().map(|v| int(visits(v))).collect(), Rational::one());
    PolytopeProgram {
        lp,
        disk_vars: (0..p).collect(),
        circuit_vars: (p..p + circuits.len()).collect(),
        normalization_vertex: v0,
        disks: disks.to_vec(),
        circuits: circuits.to_vec(),
    }
}

/// Everything computed on the way to `L(g)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub word: CyclicWord,
    pub graph: TurnGraph,
    pub program: PolytopeProgram,
    pub outcome: LpOutcome,
    /// `L(g)`.
    #[serde(with = "rational_json")]
    pub value: Rational,
}

/// Builds and solves the polytope program for a cyclically reduced word.
pub fn lower_bound_report(w: &CyclicWord, caps: &Caps) -> Result<LowerBoundReport> {
    if w.n() == 0 {
        return Err(Error::NotApplicable("L(g) is not defined for elliptic elements".into()));
    }
    if w.t_exponent() != 0 {
        return Err(Error::NotApplicable(format!("t-exponent is {}, scl is infinite", w.t_exponent())));
    }
    let graph = build_turn_graph(w)?;
    let circuits = enumerate_embedded_circuits(&graph, caps.max_circuits)?;
    let disks = enumerate_potential_disks(&graph, &circuits, caps.max_disks)?;
    let program = build_polytope_program(&graph, &disks, &circuits);
    let outcome = solve_max(&program.lp)?;
    if outcome.status != LpStatus::Optimal {
        return Err(Error::InternalInconsistency(format!("polytope program is {:?}", outcome.status)));
    }
    let counts = program.vertex_counts(&graph, &outcome.point);
    if counts.iter().any(|c| !c.is_one()) {
        return Err(Error::InternalInconsistency("vertex visit counts differ at the optimum".into()));
    }
    if program.circuit_vars.iter().any(|&j| !outcome.point[j].is_zero()) {
        return Err(Error::InternalInconsistency("circuit coordinate nonzero at the optimum".into()));
    }
    let value = rat(w.n() as i64, 4) - &outcome.value / int(2);
    Ok(LowerBoundReport { word: w.clone(), graph, program, outcome, value })
}

/// `L(g)` with default caps.
pub fn lp_lower_bound(w: &CyclicWord) -> Result<Rational> {
    Ok(lower_bound_report(w, &Caps::default())?.value)
}

/// Exact scl of an alternating word, which equals `L(g)`.
pub fn scl_exact_alternating(w: &CyclicWord) -> Result<Rational> {
    if !is_alternating(w) {
        return Err(Error::NotAlternating);
    }
    lp_lower_bound(w)
}

/// `1/2 (1 - gcd(i,m)/|m| - gcd(j,l)/|l|)`, the scl of `t a^i t^-1 a^j`.
pub fn scl_length2_formula(params: GroupParams, i: i64, j: i64) -> Result<Rational> {
    let (m, l) = (params.m(), params.ell());
    if i % m == 0 {
        return Err(Error::PreconditionViolated(format!("m = {m} divides i = {i}")));
    }
    if j % l == 0 {
        return Err(Error::PreconditionViolated(format!("l = {l} divides j = {j}")));
    }
    Ok(rat(1, 2) * (int(1) - rat(i.gcd(&m), m.abs()) - rat(j.gcd(&l), l.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Infinite,
    Zero,
    Exact,
    LowerBoundOnly,
    AtLeastGap,
}

/// Condensed LP data attached to a result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSummary {
    pub variables: usize,
    pub disks: usize,
    pub circuits: usize,
    pub constraints: usize,
    pub normalization_vertex: usize,
    #[serde(with = "rational_json")]
    pub max_disk_count: Rational,
    pub unique: bool,
    /// Nonzero coordinates of the optimal vertex, by variable name.
    #[serde(with = "support_json")]
    pub support: BTreeMap<String, Rational>,
}

mod support_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, v.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, Rational>, D::Error> {
        use serde::de::Error as _;
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| Ok((k, v.parse().map_err(D::Error::custom)?)))
            .collect()
    }
}

impl LpSummary {
    pub fn of(report: &LowerBoundReport) -> LpSummary {
        let p = &report.program;
        LpSummary {
            variables: p.lp.num_vars(),
            disks: p.disks.len(),
            circuits: p.circuits.len(),
            constraints: p.lp.constraints.len(),
            normalization_vertex: p.normalization_vertex,
            max_disk_count: report.outcome.value.clone(),
            unique: report.outcome.unique,
            support: report
                .outcome
                .point
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (p.lp.vars[j].clone(), x.clone()))
                .collect(),
        }
    }
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SclResult {
    pub classification: Classification,
    /// Exact scl when known.
    #[serde(with = "rational_json::opt")]
    pub value: Option<Rational>,
    /// `L(g)` when computed.
    #[serde(with = "rational_json::opt")]
    pub lower_bound: Option<Rational>,
    /// Best certified lower bound: `max(L(g), 1/12)` for `AtLeastGap`.
    #[serde(with = "rational_json::opt")]
    pub reported_bound: Option<Rational>,
    pub lp: Option<LpSummary>,
    pub gap: Option<GapCertificate>,
    /// The conjugacy representative everything was computed on.
    pub canonical: Option<CyclicWord>,
    pub note: Option<String>,
}

impl SclResult {
    fn bare(classification: Classification, value: Option<Rational>) -> SclResult {
        SclResult {
            classification,
            value,
            lower_bound: None,
            reported_bound: None,
            lp: None,
            gap: None,
            canonical: None,
            note: None,
        }
    }
}

fn gap_constant() -> Rational {
    rat(1, 12)
}

/// Classifies the scl of `w`.
///
/// * nonzero t-exponent: `Infinite`;
/// * elliptic: `Zero`;
/// * alternating: `Exact` with value `L(g)`, cross-checked against the gap
///   decision (reversal-symmetric iff `L(g) = 0`);
/// * otherwise the gap decision gives `Zero`, or a well-aligned witness
///   which certifies `scl >= 1/12`: `AtLeastGap` when that beats `L(g)`,
///   `LowerBoundOnly` when `L(g) >= 1/12` already.
///
/// Computation runs on the conjugacy-canonical representative, so
/// conjugate inputs give identical results.
pub fn classify(w: &Word, params: GroupParams, caps: &Caps) -> Result<SclResult> {
    let t_exp = w.t_exponent();
    if t_exp != 0 {
        let mut r = SclResult::bare(Classification::Infinite, None);
        r.note = Some(format!("t-exponent {t_exp} is nonzero"));
        return Ok(r);
    }
    let (c, _) = cyclically_reduce(w, params);
    let canon = conjugacy_canonical(&c)?;
    if canon.n() == 0 {
        let mut r = SclResult::bare(Classification::Zero, Some(Rational::zero()));
        r.canonical = Some(canon);
        r.note = Some("elliptic: conjugate to a power of a".into());
        return Ok(r);
    }
    classify_hyperbolic(&canon, caps)
}

fn classify_hyperbolic(canon: &CyclicWord, caps: &Caps) -> Result<SclResult> {
    let alternating = is_alternating(canon);
    let gap = gap_classify(canon, caps)?;
    let report = match lower_bound_report(canon, caps) {
        Ok(r) => Some(r),
        Err(Error::LimitExceeded { what, count, cap }) => {
            let note = format!("{what}: count {count} exceeds cap {cap}; L(g) not computed");
            let mut r = match gap.outcome {
                GapOutcome::ZeroByReversal => SclResult::bare(Classification::Zero, Some(Rational::zero())),
                GapOutcome::WellAlignedWitness(_) => {
                    let mut r = SclResult::bare(Classification::LowerBoundOnly, None);
                    r.reported_bound = Some(gap_constant());
                    r
                }
            };
            r.gap = Some(gap);
            r.canonical = Some(canon.clone());
            r.note = Some(note);
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let report = report.expect("handled above");
    let l = report.value.clone();
    let zero_by_gap = matches!(gap.outcome, GapOutcome::ZeroByReversal);
    let mut r = if alternating {
        if zero_by_gap != l.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "gap decision {} disagrees with L(g) = {l}",
                if zero_by_gap { "zero" } else { "well-aligned" }
            )));
        }
        let mut r = SclResult::bare(Classification::Exact, Some(l.clone()));
        r.reported_bound = Some(l.clone());
        r
    } else if zero_by_gap {
        if l.is_positive() {
            return Err(Error::InternalInconsistency(format!("reversal-symmetric element has L(g) = {l} > 0")));
        }
        SclResult::bare(Classification::Zero, Some(Rational::zero()))
    } else if l < gap_constant() {
        let mut r = SclResult::bare(Classification::AtLeastGap, None);
        r.reported_bound = Some(gap_constant());
        r
    } else {
        let mut r = SclResult::bare(Classification::LowerBoundOnly, None);
        r.reported_bound = Some(l.clone());
        r
    };
    r.lower_bound = Some(l);
    r.lp = Some(LpSummary::of(&report));
    r.gap = Some(gap);
    r.canonical = Some(canon.clone());
    Ok(r)
}

/// Alternating words `prod_k t a^{i_k} t^-1 a^{j_k}` for `1 <= r <= r_max`
/// and `|i_k|, |j_k| <= e_max`, cyclically reduced, kept only when still
/// alternating, deduplicated by conjugacy class and sorted.
pub fn alternating_words(params: GroupParams, r_max: usize, e_max: i64) -> Result<Vec<CyclicWord>> {
    let exps: Vec<i64> = (-e_max..=e_max).collect();
    let mut out = std::collections::BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    for r in 1..=r_max {
        let total = exps.len().pow(2 * r as u32);
        for code in 0..total {
            let mut c = code;
            let mut syl = Vec::with_capacity(2 * r);
            for k in 0..2 * r {
                let e = exps[c % exps.len()];
                c /= exps.len();
                syl.push(Syllable { eps: if k % 2 == 0 { 1 } else { -1 }, k: e });
            }
            let word = Word::new(syl.iter().flat_map(|s| [(crate::words::Gen::T, s.eps as i64), (crate::words::Gen::A, s.k)]));
            let (cw, _) = cyclically_reduce(&word, params);
            if !is_alternating(&cw) {
                continue;
            }
            let canon = conjugacy_canonical(&cw)?;
            if seen.insert(canon.clone()) {
                out.insert((canon.n(), canon.to_string()), canon);
            }
        }
    }
    Ok(out.into_values().collect())
}

/// One row of a spectrum scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub word: CyclicWord,
    #[serde(with = "rational_json")]
    pub scl: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub params: GroupParams,
    pub r_max: usize,
    pub e_max: i64,
    pub entries: Vec<ScanEntry>,
    /// Value (as `p/q`) to multiplicity.
    pub histogram: BTreeMap<String, usize>,
    #[serde(with = "rational_json::opt")]
    pub min_nonzero: Option<Rational>,
}

/// Exact scl of every alternating word in the shape range, in parallel.
pub fn scan_alternating(params: GroupParams, r_max: usize, e_max: i64, caps: &Caps) -> Result<ScanReport> {
    let words = alternating_words(params, r_max, e_max)?;
    let entries: Vec<ScanEntry> = words
        .into_par_iter()
        .map(|w| Ok(ScanEntry { scl: lower_bound_report(&w, caps)?.value, word: w }))
        .collect::<Result<_>>()?;
    let mut values: Vec<&Rational> = entries.iter().map(|e| &e.scl).collect();
    values.sort();
    let mut histogram = BTreeMap::new();
    for v in &values {
        *histogram.entry(v.to_string()).or_insert(0) += 1;
    }
    let min_nonzero = values.into_iter().find(|v| v.is_positive()).cloned();
    Ok(ScanReport { params, r_max, e_max, entries, histogram, min_nonzero })
}
