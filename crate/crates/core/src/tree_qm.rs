//! Bass–Serre tree computations: axis patterns, copy counting, the counting
//! quasimorphisms `f_gamma` and `h_gamma`, the two-stage gap decision, and
//! the acylindricity bound.
//!
//! The tree has vertices `g<a>` and an edge from `g<a>` to `g t<a>` for
//! every `g`. A cyclically reduced hyperbolic word `w` has `<a>` on its
//! axis, and the axis vertices are `x_i = p_i <a>` where `p_i` is the
//! prefix of `w^infinity` ending just after its `i`-th `t`-letter.
//!
//! Segments are compared through exact orbit codes. An oriented edge path
//! starting at `<a>` and spelled `t^{e_1} a^{c_1} t^{e_2} ...` has G-orbit
//! determined by the double coset `<a> p <a>`; [`path_code`] reduces the
//! exponents greedily in mixed radix so that two paths lie in the same
//! orbit iff their codes agree. The per-turn residues of [`AxisPattern`]
//! only capture this at turns of type m or l; at mixed turns they can
//! identify segments that lie in different orbits.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Caps;
use crate::error::{Error, Result};
use crate::ratlp::{rat, rational_json, Rational};
use crate::words::{as_a_power, cyclically_reduce, CyclicWord, Gen, GroupParams, Word};

/// Residue of a turn exponent modulo the turn's modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TurnInvariant {
    pub eps_in: i8,
    pub eps_out: i8,
    pub residue: i64,
    pub modulus: i64,
}

impl TurnInvariant {
    pub fn new(params: GroupParams, eps_in: i8, eps_out: i8, k: i64) -> TurnInvariant {
        let modulus = match (eps_in, eps_out) {
            (1, -1) => params.m().abs(),
            (-1, 1) => params.ell().abs(),
            _ => params.gcd(),
        };
        TurnInvariant { eps_in, eps_out, residue: k.rem_euclid(modulus), modulus }
    }

    pub fn reverse(&self) -> TurnInvariant {
        TurnInvariant {
            eps_in: -self.eps_out,
            eps_out: -self.eps_in,
            residue: (-self.residue).rem_euclid(self.modulus),
            modulus: self.modulus,
        }
    }
}

/// One period of the axis: edge directions, each followed by the turn at
/// the vertex it enters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisPattern {
    pub period: Vec<(i8, TurnInvariant)>,
}

impl AxisPattern {
    /// Translation length.
    pub fn length(&self) -> usize {
        self.period.len()
    }

    pub fn rotate(&self, r: usize) -> AxisPattern {
        let mut period = self.period.clone();
        let n = period.len();
        if n > 0 {
            period.rotate_left(r % n);
        }
        AxisPattern { period }
    }

    /// Equality up to cyclic rotation.
    pub fn is_rotation_of(&self, other: &AxisPattern) -> bool {
        self.length() == other.length() && (0..self.length().max(1)).any(|r| self.rotate(r) == *other)
    }

    /// The pattern read backwards: directions negated, turns reversed.
    pub fn reverse(&self) -> AxisPattern {
        let n = self.period.len();
        let period = (0..n)
            .map(|i| (-self.period[n - 1 - i].0, self.period[(2 * n - 2 - i) % n].1.reverse()))
            .collect();
        AxisPattern { period }
    }
}

pub fn axis_pattern(w: &CyclicWord) -> Result<AxisPattern> {
    if w.n() == 0 {
        return Err(Error::EllipticInput);
    }
    let p = w.params();
    let period = (0..w.n()).map(|i| (w.eps(i), TurnInvariant::new(p, w.eps(i), w.eps(i + 1), w.k(i)))).collect();
    Ok(AxisPattern { period })
}

/// One step of an orbit code: edge direction, residue, and the modulus the
/// residue is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeStep {
    pub dir: i8,
    pub residue: i64,
    pub modulus: i64,
}

/// Orbit code of the edge path from `<a>` spelled by `dirs` with the
/// `a`-exponents `exps` between consecutive edges (`exps.len() + 1 ==
/// dirs.len()`).
pub fn path_code(params: GroupParams, dirs: &[i8], exps: &[i64]) -> Result<Vec<CodeStep>> {
    debug_assert_eq!(exps.len() + 1, dirs.len().max(1));
    let (m, l) = (params.m() as i128, params.ell() as i128);
    let ovf = || Error::Overflow("path code");
    let mut out = Vec::with_capacity(dirs.len());
    let mut s: i128 = 1;
    let mut carry: i128 = 0;
    for (idx, &e) in dirs.iter().enumerate() {
        let c = if idx == 0 { 0 } else { (exps[idx - 1] as i128).checked_add(carry).ok_or_else(ovf)? };
        let d = if e > 0 { l.abs() } else { m.abs() };
        let g = s.gcd(&d);
        let res = c.rem_euclid(g);
        out.push(CodeStep { dir: e, residue: i64::try_from(res).map_err(|_| ovf())?, modulus: i64::try_from(g).map_err(|_| ovf())? });
        if idx + 1 == dirs.len() {
            break;
        }
        // Move c within c + sZ to the representative congruent to res mod d.
        let (sg, dg) = (s / g, d / g);
        let j = if dg == 1 {
            0
        } else {
            let target = ((res - c) / g).rem_euclid(dg);
            let inv = mod_inverse(sg.rem_euclid(dg), dg);
            (target * inv).rem_euclid(dg)
        };
        let c_star = c.checked_add(j.checked_mul(s).ok_or_else(ovf)?).ok_or_else(ovf)?;
        let diff = c_star - res;
        carry = if e > 0 { diff / l * m } else { diff / m * l };
        let lcm = s.checked_mul(d / g).ok_or_else(ovf)?;
        s = if e > 0 { lcm / l.abs() * m.abs() } else { lcm / m.abs() * l.abs() };
    }
    Ok(out)
}

fn mod_inverse(a: i128, n: i128) -> i128 {
    let (g, x, _) = ext_gcd(a, n);
    debug_assert_eq!(g, 1);
    x.rem_euclid(n)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn window_code(w: &CyclicWord, start: usize, edges: usize) -> Result<Vec<CodeStep>> {
    let dirs: Vec<i8> = (0..edges).map(|t| w.eps(start + t)).collect();
    let exps: Vec<i64> = (0..edges.saturating_sub(1)).map(|t| w.k(start + t)).collect();
    path_code(w.params(), &dirs, &exps)
}

/// An oriented axis segment, possibly starting and ending at edge midpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPattern {
    /// True if the endpoints are edge midpoints, false if vertices.
    pub midpoint: bool,
    /// Length in edges.
    pub length: usize,
    /// Directions of the edges the segment meets.
    pub dirs: Vec<i8>,
    /// `a`-exponents between consecutive edges of `dirs`.
    pub exps: Vec<i64>,
    pub code: Vec<CodeStep>,
    pub params: GroupParams,
}

impl SegmentPattern {
    pub fn new(params: GroupParams, midpoint: bool, dirs: Vec<i8>, exps: Vec<i64>) -> Result<SegmentPattern> {
        let covering = dirs.len();
        let length = if midpoint { covering.checked_sub(1) } else { Some(covering) }
            .filter(|&l| l > 0)
            .ok_or_else(|| Error::PreconditionViolated("segment must have positive length".into()))?;
        if exps.len() + 1 != covering {
            return Err(Error::DimensionMismatch("need one exponent between consecutive edges".into()));
        }
        let code = path_code(params, &dirs, &exps)?;
        Ok(SegmentPattern { midpoint, length, dirs, exps, code, params })
    }

    /// The axis segment of `w` starting at vertex `x_anchor` (or at the
    /// midpoint of the edge leaving it) with the given length.
    pub fn from_axis(w: &CyclicWord, anchor: usize, length: usize, midpoint: bool) -> Result<SegmentPattern> {
        if w.n() == 0 {
            return Err(Error::EllipticInput);
        }
        let covering = length + usize::from(midpoint);
        let dirs = (0..covering).map(|t| w.eps(anchor + t)).collect();
        let exps = (0..covering - 1).map(|t| w.k(anchor + t)).collect();
        SegmentPattern::new(w.params(), midpoint, dirs, exps)
    }

    /// A fundamental domain `[x, w x]`.
    pub fn fundamental_domain(w: &CyclicWord, anchor: usize, midpoint: bool) -> Result<SegmentPattern> {
        SegmentPattern::from_axis(w, anchor, w.n(), midpoint)
    }

    pub fn reverse(&self) -> SegmentPattern {
        let dirs = self.dirs.iter().rev().map(|d| -d).collect();
        let exps = self.exps.iter().rev().map(|k| -k).collect();
        SegmentPattern::new(self.params, self.midpoint, dirs, exps).expect("reversal preserves shape")
    }

    fn covering(&self) -> usize {
        self.dirs.len()
    }

    /// Start (in half-edges) of the copy anchored at vertex `x_i`.
    fn half_start(&self, i: usize) -> usize {
        2 * i + usize::from(self.midpoint)
    }
}

/// Residues `i mod n` at which a positively oriented copy of `gamma`
/// anchors on the axis of `w`.
fn anchor_residues(gamma: &SegmentPattern, w: &CyclicWord) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..w.n() {
        if w.eps(i) == gamma.dirs[0] && window_code(w, i, gamma.covering())? == gamma.code {
            out.push(i);
        }
    }
    Ok(out)
}

/// Maximal number of non-overlapping arcs of length `len` starting at the
/// sorted positions `starts` (which repeat with period `period`) on a
/// circle of circumference `circ`, a multiple of `period`.
fn circle_packing(starts: &[usize], period: usize, len: usize, circ: usize) -> usize {
    if starts.is_empty() || len > circ {
        return 0;
    }
    let reps = circ / period;
    let all: Vec<usize> = (0..2 * reps).flat_map(|r| starts.iter().map(move |&s| s + r * period)).collect();
    let mut best = 0;
    for (k, &s0) in starts.iter().enumerate() {
        let mut count = 1;
        let mut pos = s0 + len;
        let mut idx = k;
        loop {
            idx += all[idx..].partition_point(|&x| x < pos);
            match all.get(idx) {
                Some(&next) if next + len <= s0 + circ => {
                    count += 1;
                    pos = next + len;
                }
                _ => break,
            }
        }
        best = best.max(count);
    }
    best
}

fn half_starts(gamma: &SegmentPattern, w: &CyclicWord) -> Result<Vec<usize>> {
    Ok(anchor_residues(gamma, w)?.into_iter().map(|i| gamma.half_start(i)).collect())
}

/// `c_gamma(w^k)`: non-overlapping positively oriented copies of `gamma` in
/// the axis of `w^k` modulo `w^k`.
pub fn count_copies(gamma: &SegmentPattern, target: &CyclicWord, k: usize) -> Result<usize> {
    if target.n() == 0 || k == 0 {
        return Ok(0);
    }
    let period = 2 * target.n();
    let starts = half_starts(gamma, target)?;
    Ok(circle_packing(&starts, period, 2 * gamma.length, k * period))
}

fn hyperbolic_form(x: &Word, params: GroupParams) -> Option<CyclicWord> {
    let (c, _) = cyclically_reduce(x, params);
    (c.n() > 0).then_some(c)
}

/// `f_gamma(x) = c_gamma(x) - c_gamma-bar(x)`; zero for elliptic `x`.
pub fn f_gamma(gamma: &SegmentPattern, x: &Word) -> Result<i64> {
    match hyperbolic_form(x, gamma.params) {
        None => Ok(0),
        Some(c) => Ok(count_copies(gamma, &c, 1)? as i64 - count_copies(gamma, &c.inverse(), 1)? as i64),
    }
}

/// Asymptotic copy density `lim c_gamma(w^k) / k`.
///
/// Greedy packing of the periodic occurrence set is optimal on the line and
/// eventually periodic; its cycle gives the density `c / k*`, which is then
/// confirmed exactly on circles of `k*` and `2 k*` periods.
pub fn copy_density(gamma: &SegmentPattern, w: &CyclicWord) -> Result<Rational> {
    let starts = half_starts(gamma, w)?;
    if starts.is_empty() {
        return Ok(Rational::zero());
    }
    let period = 2 * w.n();
    let len = 2 * gamma.length;
    let mut seen: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut pos = 0usize;
    let mut copies = 0usize;
    let (c, k) = loop {
        if let Some(&(c0, p0)) = seen.get(&(pos % period)) {
            break (copies - c0, (pos - p0) / period);
        }
        seen.insert(pos % period, (copies, pos));
        let base = pos / period * period;
        let off = pos - base;
        let next = match starts.iter().find(|&&s| s >= off) {
            Some(&s) => base + s,
            None => base + period + starts[0],
        };
        pos = next + len;
        copies += 1;
    };
    if circle_packing(&starts, period, len, k * period) != c || circle_packing(&starts, period, len, 2 * k * period) != 2 * c {
        return Err(Error::NonStabilized(format!("density {c}/{k} not realized on circles of {k} and {} periods", 2 * k)));
    }
    Ok(rat(c as i64, k as i64))
}

/// `h_gamma(x) = lim f_gamma(x^k) / k`, exactly.
pub fn h_gamma(gamma: &SegmentPattern, x: &Word) -> Result<Rational> {
    match hyperbolic_form(x, gamma.params) {
        None => Ok(Rational::zero()),
        Some(c) => Ok(copy_density(gamma, &c)? - copy_density(gamma, &c.inverse())?),
    }
}

/// Heights `H_0 = 0, H_{j+1} = H_j + eps_j` of the axis vertices `x_0..x_n`.
pub fn heights(w: &CyclicWord) -> Vec<i64> {
    let mut h = vec![0i64];
    for i in 0..w.n() {
        h.push(h[i] + w.eps(i) as i64);
    }
    h
}

/// Stable segments `[s, e]` of the axis with `0 <= s < n`, as vertex index
/// pairs (`e` may exceed `n`). Requires t-exponent 0.
pub fn stable_segments(w: &CyclicWord) -> Vec<(usize, usize)> {
    let n = w.n();
    let h = heights(w);
    let (lo, hi) = (*h.iter().min().unwrap(), *h.iter().max().unwrap());
    let at = |i: usize| h[i % n];
    let extremal: Vec<usize> = (0..3 * n).filter(|&i| at(i) == lo || at(i) == hi).collect();
    let mut out = Vec::new();
    for pair in extremal.windows(2) {
        let (s, e) = (pair[0], pair[1]);
        if s < n && at(s) != at(e) {
            out.push((s, e));
        }
    }
    out
}

/// True iff the oriented axes of `u` and `w` lie in one G-orbit.
///
/// With t-exponent 0 a window of two periods contains a stable segment,
/// whose stabilizer is that of the whole axis; so matching a two-period
/// window somewhere is equivalent to matching the whole axis.
pub fn axes_equivalent(u: &CyclicWord, w: &CyclicWord) -> Result<bool> {
    for x in [u, w] {
        if x.n() == 0 {
            return Err(Error::EllipticInput);
        }
        if x.t_exponent() != 0 {
            return Err(Error::NonZeroTExponent(x.t_exponent()));
        }
    }
    if u.n() != w.n() || u.params() != w.params() {
        return Ok(false);
    }
    let n = u.n();
    let target = window_code(u, 0, 2 * n)?;
    for j in 0..n {
        if window_code(w, j, 2 * n)? == target {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The least `P > 0` such that `a^P` fixes the axis of `w` pointwise
/// (the axis passes through `<a>`). Requires t-exponent 0.
pub fn axis_stabilizer_exponent(w: &CyclicWord) -> Result<i64> {
    if w.t_exponent() != 0 || w.n() == 0 {
        return Err(Error::NotHyperbolicZeroExponent);
    }
    let (m, l) = (w.params().m().abs() as i128, w.params().ell().abs() as i128);
    let (mut num, mut den) = (1i128, 1i128);
    let mut p: i128 = 1;
    for i in 0..w.n() {
        let d = if w.eps(i) > 0 { l } else { m };
        let dd = d * den;
        p = p.lcm(&(dd / num.gcd(&dd)));
        if w.eps(i) > 0 {
            num *= m;
            den *= l;
        } else {
            num *= l;
            den *= m;
        }
        let g = num.gcd(&den);
        num /= g;
        den /= g;
    }
    i64::try_from(p).map_err(|_| Error::Overflow("axis stabilizer"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "gamma")]
pub enum GapOutcome {
    /// A fundamental domain with no reversed copy on the axis, so
    /// `h_gamma(g) = 1` and `scl(g) >= 1/12`.
    WellAlignedWitness(SegmentPattern),
    /// Some element maps the axis onto itself reversed, so `scl(g) = 0`.
    ZeroByReversal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub outcome: GapOutcome,
    /// 1 or 2: which check of the decision produced the outcome.
    pub stage: u8,
    /// Vertex anchors of the fundamental domains examined, with the
    /// residues of their reversed copies.
    pub checked_positions: Vec<(usize, Vec<usize>)>,
    /// An explicit `h` with `g h g h^-1` fixing the axis, when the bounded
    /// search finds one.
    pub witness: Option<Word>,
}

/// Decides between a well-aligned fundamental domain and an axis reversal.
///
/// Stage 1 looks, for each stable segment in turn, at the fundamental
/// domain starting with it; one without reversed copies is a witness.
/// Otherwise stage 2 takes the fundamental domain at the first stable
/// segment, pairs up the stable segments it contains and checks the one
/// starting the second half; reversed copies there mean some element
/// reverses the axis. Either answer is cross-checked against a direct
/// comparison of the axes of `g` and `g^-1`.
pub fn gap_classify(w: &CyclicWord, caps: &Caps) -> Result<GapCertificate> {
    if w.n() == 0 {
        return Err(Error::EllipticInput);
    }
    if w.t_exponent() != 0 {
        return Err(Error::NonZeroTExponent(w.t_exponent()));
    }
    let inv = w.inverse();
    let n = w.n();
    let stable = stable_segments(w);
    let reversed_at = |anchor: usize| -> Result<(SegmentPattern, Vec<usize>)> {
        let gamma = SegmentPattern::fundamental_domain(w, anchor, false)?;
        let occ = anchor_residues(&gamma, &inv)?;
        Ok((gamma, occ))
    };
    let mut checked = Vec::new();
    let mut witness = None;
    for &(s, _) in &stable {
        let (gamma, occ) = reversed_at(s)?;
        let free = occ.is_empty();
        checked.push((s, occ));
        if free {
            witness = Some(gamma);
            break;
        }
    }
    let stage = if witness.is_some() {
        1
    } else {
        let a = stable[0].0;
        let inside = stable
            .iter()
            .map(|&(s0, e0)| if s0 < a { (s0 + n, e0 + n) } else { (s0, e0) })
            .filter(|&(_, e1)| e1 <= a + n)
            .count();
        if inside % 2 == 1 {
            return Err(Error::InternalInconsistency(format!(
                "every stable anchor has reversed copies but the domain at {a} holds {inside} stable segments"
            )));
        }
        let mut starts: Vec<usize> = stable.iter().map(|s| if s.0 < a { s.0 + n } else { s.0 }).collect();
        starts.sort_unstable();
        let b = starts[inside / 2] % n;
        let (_, occ) = reversed_at(b)?;
        if occ.is_empty() {
            return Err(Error::InternalInconsistency(format!("stable anchor {b} changed its answer")));
        }
        2
    };
    let reversible = axes_equivalent(w, &inv)?;
    if reversible == witness.is_some() {
        return Err(Error::InternalInconsistency(format!(
            "gap decision ({}) disagrees with the axis comparison ({})",
            if witness.is_some() { "well-aligned" } else { "reversal" },
            if reversible { "reversible" } else { "not reversible" }
        )));
    }
    Ok(match witness {
        Some(gamma) => GapCertificate {
            outcome: GapOutcome::WellAlignedWitness(gamma),
            stage,
            checked_positions: checked,
            witness: None,
        },
        None => GapCertificate {
            outcome: GapOutcome::ZeroByReversal,
            stage,
            checked_positions: checked,
            witness: reversal_witness(w, caps.witness_search_bound as i64),
        },
    })
}

/// Prefix `p_j` of `w` with `p_j <a> = x_j`.
fn prefix(w: &CyclicWord, j: usize) -> Word {
    let n = w.n();
    let mut letters = Vec::new();
    for i in 0..j {
        if i > 0 {
            letters.push((Gen::A, w.k(i - 1)));
        }
        letters.push((Gen::T, w.eps(i % n) as i64));
    }
    Word::new(letters)
}

/// Searches `h = p_j a^x p_j^-1` with `|x| <= bound` such that `g h g h^-1`
/// fixes the axis vertices `x_0..x_n`, hence the whole axis.
pub fn reversal_witness(w: &CyclicWord, bound: i64) -> Option<Word> {
    let p = w.params();
    let g = w.to_word();
    let n = w.n();
    let prefixes: Vec<Word> = (0..=n).map(|i| prefix(w, i)).collect();
    for j in 0..n {
        for x in (0..=bound).flat_map(|x| [x, -x]).skip(1) {
            let h = prefixes[j].mul(&Word::a(x)).mul(&prefixes[j].inverse());
            let z = g.mul(&h).mul(&g).mul(&h.inverse());
            if prefixes.iter().all(|q| as_a_power(&q.inverse().mul(&z).mul(q), p).is_some()) {
                return Some(crate::words::britton_reduce(&h, p));
            }
        }
    }
    None
}

/// Largest observed defects of `f_gamma` and `h_gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub samples: usize,
    pub max_len: usize,
    pub seed: u64,
    /// Pairs where `f_gamma` is nonzero on `g`, `h` or `gh`.
    pub nonzero_pairs: usize,
    pub max_f_defect: i64,
    #[serde(with = "rational_json")]
    pub max_h_defect: Rational,
}

/// Random word of length `1..=max_len` in the letters `a^{±1}, t^{±1}`.
pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len.max(1));
    Word::new((0..len).map(|_| match rng.gen_range(0..4) {
        0 => (Gen::A, 1),
        1 => (Gen::A, -1),
        2 => (Gen::T, 1),
        _ => (Gen::T, -1),
    }))
}

/// Samples pairs `(g, h)` with a seeded generator and reports the largest
/// `|f(gh) - f(g) - f(h)|` and `|h(gh) - h(g) - h(h)|`.
pub fn defect_experiment(
    gamma: &SegmentPattern,
    params: GroupParams,
    sample_size: usize,
    max_len: usize,
    seed: u64,
) -> Result<DefectReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Word, Word)> =
        (0..sample_size).map(|_| (random_word(&mut rng, max_len), random_word(&mut rng, max_len))).collect();
    let gamma = SegmentPattern { params, ..gamma.clone() };
    let defects: Vec<(i64, Rational, bool)> = pairs
        .par_iter()
        .map(|(g, h)| {
            let gh = g.mul(h);
            let f = [f_gamma(&gamma, &gh)?, f_gamma(&gamma, g)?, f_gamma(&gamma, h)?];
            let fd = (f[0] - f[1] - f[2]).abs();
            let hd = (h_gamma(&gamma, &gh)? - h_gamma(&gamma, g)? - h_gamma(&gamma, h)?).abs();
            Ok((fd, hd, f.iter().any(|&x| x != 0)))
        })
        .collect::<Result<_>>()?;
    Ok(DefectReport {
        samples: sample_size,
        max_len,
        seed,
        nonzero_pairs: defects.iter().filter(|d| d.2).count(),
        max_f_defect: defects.iter().map(|d| d.0).max().unwrap_or(0),
        max_h_defect: defects.iter().map(|d| d.1.clone()).max().unwrap_or_else(Rational::zero),
    })
}

/// Lower bound for nonzero scl under a `K`-acylindrical action:
/// `1/(12N)` with `N = ceil(K/2 + 1)`, or `1/24` once `|g| >= K`.
pub fn acylindrical_bound(k: u64, translation_length: u64) -> Rational {
    if translation_length >= k {
        return rat(1, 24);
    }
    let n = k.div_ceil(2) + 1;
    rat(1, 12 * n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::is_conjugate;

    fn p(m: i64, l: i64) -> GroupParams {
        GroupParams::new(m, l).unwrap()
    }

    fn cw(m: i64, l: i64, w: &str) -> CyclicWord {
        CyclicWord::parse(w, p(m, l)).unwrap()
    }

    #[test]
    fn axis_pattern_of_length_two() {
        let a = axis_pattern(&cw(2, 3, "t a t^-1 a")).unwrap();
        assert_eq!(a.length(), 2);
        assert_eq!(a.period[0], (1, TurnInvariant { eps_in: 1, eps_out: -1, residue: 1, modulus: 2 }));
        assert_eq!(a.period[1], (-1, TurnInvariant { eps_in: -1, eps_out: 1, residue: 1, modulus: 3 }));
    }

    #[test]
    fn reverse_matches_inverse_word() {
        let w = cw(2, 3, "t a t^-1 a^2 t t a^-1 t^-1 a t^-1 a^5");
        let a = axis_pattern(&w).unwrap();
        assert_eq!(a.reverse(), axis_pattern(&w.inverse()).unwrap());
        assert_eq!(a.reverse().reverse(), a);
    }

    #[test]
    fn path_code_distinguishes_orbits() {
        let g = p(2, 3);
        // t a t^-1 and t a^3 t^-1: second edge differs by a^2 = stabilizer of t-edge
        // conjugated, so they are the same orbit.
        let c1 = path_code(g, &[1, -1], &[1]).unwrap();
        let c2 = path_code(g, &[1, -1], &[3]).unwrap();
        let c3 = path_code(g, &[1, -1], &[2]).unwrap();
        assert_eq!(c1, c2);
        assert_ne!(c1, c3);
    }

    #[test]
    fn fundamental_domain_copies() {
        let w = cw(2, 3, "t a t^-1 a");
        let gamma = SegmentPattern::fundamental_domain(&w, 0, true).unwrap();
        assert_eq!(count_copies(&gamma, &w, 1).unwrap(), 1);
        assert_eq!(count_copies(&gamma, &w, 5).unwrap(), 5);
        let long = SegmentPattern::from_axis(&w, 0, 3, false).unwrap();
        assert_eq!(count_copies(&long, &w, 1).unwrap(), 0);
        assert_eq!(h_gamma(&gamma, &w.to_word()).unwrap(), rat(1, 1));
        assert_eq!(h_gamma(&gamma, &w.power(3).to_word()).unwrap(), rat(3, 1));
        assert_eq!(h_gamma(&gamma, &Word::a(5)).unwrap(), Rational::zero());
        assert_eq!(f_gamma(&gamma, &w.to_word().inverse()).unwrap(), -f_gamma(&gamma, &w.to_word()).unwrap());
    }

    #[test]
    fn circle_packing_basics() {
        assert_eq!(circle_packing(&[0, 1], 4, 2, 4), 1);
        assert_eq!(circle_packing(&[0, 2], 4, 2, 4), 2);
        assert_eq!(circle_packing(&[0, 1], 4, 3, 4), 1);
        assert_eq!(circle_packing(&[1], 4, 5, 4), 0);
        assert_eq!(circle_packing(&[], 4, 1, 8), 0);
        assert_eq!(circle_packing(&[0, 3], 6, 4, 12), 2);
    }

    #[test]
    fn stable_segments_of_simple_words() {
        let w = cw(2, 3, "t a t^-1 a");
        assert_eq!(stable_segments(&w), vec![(0, 1), (1, 2)]);
        let v = cw(2, 3, "a^2 t^2 a t^-1 a t^-1");
        assert_eq!(heights(&v), vec![0, 1, 2, 1, 0]);
        assert_eq!(stable_segments(&v), vec![(0, 2), (2, 4)]);
    }

    #[test]
    fn gap_examples() {
        let caps = Caps::default();
        let c = gap_classify(&cw(2, 3, "t a t^-1 a"), &caps).unwrap();
        assert!(matches!(c.outcome, GapOutcome::WellAlignedWitness(_)));
        let z = cw(2, 3, "t a t^-1 a t a t^-1 a^2");
        let c = gap_classify(&z, &caps).unwrap();
        assert_eq!(c.outcome, GapOutcome::ZeroByReversal);
        assert!(c.witness.is_some());
        assert!(is_conjugate(&z, &z.inverse()).unwrap() || c.witness.is_some());
    }

    #[test]
    fn stabilizer_exponent() {
        assert_eq!(axis_stabilizer_exponent(&cw(2, 3, "t a t^-1 a")).unwrap(), 3);
    }

    #[test]
    fn acylindrical_values() {
        assert_eq!(acylindrical_bound(2, 1), rat(1, 24));
        assert_eq!(acylindrical_bound(3, 1), rat(1, 36));
        assert_eq!(acylindrical_bound(4, 4), rat(1, 24));
        assert_eq!(acylindrical_bound(4, 2), rat(1, 36));
        assert_eq!(acylindrical_bound(5, 2), rat(1, 48));
    }
}
