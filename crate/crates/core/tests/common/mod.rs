//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use bsscl_core::circuits::{enumerate_embedded_circuits, enumerate_potential_disks};
use bsscl_core::ratlp::{int, rat, solve_max};
use bsscl_core::tree_qm::{axes_equivalent, axis_pattern, axis_stabilizer_exponent};
use bsscl_core::turn_graph::{build_turn_graph, validate};
use bsscl_core::words::{britton_reduce, cyclically_reduce, is_conjugate, is_trivial, Gen, Syllable};
use bsscl_core::{CyclicWord, GroupParams, LinearProgram, LpStatus, Rational, TurnGraph, TurnKind, Word};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn params(m: i64, l: i64) -> GroupParams {
    GroupParams::new(m, l).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- words

/// Image under the affine representation `a: x -> x + 1`, `t: x -> (l/m) x`,
/// as `(slope, offset)`. It respects the relator, so equal group elements
/// have equal images.
pub fn affine(w: &Word, p: GroupParams) -> (Rational, Rational) {
    let ratio = rat(p.ell(), p.m());
    let mut acc = (Rational::one(), Rational::zero());
    for &(g, e) in w.letters() {
        let f = match g {
            Gen::A => (Rational::one(), int(e)),
            Gen::T => (num_traits::pow::Pow::pow(&ratio, e as i32), Rational::zero()),
        };
        acc = (&acc.0 * &f.0, &acc.0 * &f.1 + &acc.1);
    }
    acc
}

/// True iff some `t^e a^k t^-e` in the word is a pinch.
pub fn has_pinch(w: &Word, p: GroupParams) -> bool {
    let l = w.letters();
    (1..l.len().saturating_sub(1)).any(|i| {
        let (before, mid, after) = (l[i - 1], l[i], l[i + 1]);
        if before.0 != Gen::T || mid.0 != Gen::A || after.0 != Gen::T {
            return false;
        }
        let (e1, e2) = (before.1.signum(), after.1.signum());
        (e1 == 1 && e2 == -1 && mid.1 % p.m() == 0) || (e1 == -1 && e2 == 1 && mid.1 % p.ell() == 0)
    })
}

pub fn random_word(r: &mut ChaCha8Rng, max_letters: usize, max_exp: i64) -> Word {
    let len = r.gen_range(0..=max_letters);
    Word::new((0..len).map(|_| {
        if r.gen_bool(0.5) {
            (Gen::T, if r.gen_bool(0.5) { 1 } else { -1 })
        } else {
            (Gen::A, r.gen_range(-max_exp..=max_exp))
        }
    }))
}

/// Random cyclically reduced word with t-exponent 0 and t-length in
/// `2..=2*half_max`, exponents in `[-max_exp, max_exp]`.
pub fn random_zero_exponent(r: &mut ChaCha8Rng, p: GroupParams, half_max: usize, max_exp: i64) -> CyclicWord {
    loop {
        let half = r.gen_range(1..=half_max);
        let mut eps: Vec<i8> = (0..2 * half).map(|i| if i < half { 1 } else { -1 }).collect();
        for i in (1..eps.len()).rev() {
            eps.swap(i, r.gen_range(0..=i));
        }
        let syl: Vec<Syllable> = eps.iter().map(|&e| Syllable { eps: e, k: r.gen_range(-max_exp..=max_exp) }).collect();
        if let Ok(w) = CyclicWord::from_syllables(p, syl) {
            return w;
        }
    }
}

/// Bounded conjugacy search for hyperbolic cyclically reduced words:
/// `u = a^x w' a^-x` for a cyclic permutation `w'` of `w` and `|x| <= bound`.
/// Every conjugate pair has this form for some `x`, so a miss is only
/// conclusive up to the bound.
pub fn brute_conjugate(u: &CyclicWord, w: &CyclicWord, bound: i64) -> bool {
    if u.n() != w.n() || u.n() == 0 {
        return u.n() == 0 && w.n() == 0 && is_trivial(&Word::a(u.a_power() - w.a_power()), u.params());
    }
    let p = u.params();
    let uw = u.to_word().inverse();
    (0..w.n()).any(|r| {
        let wr = w.rotate(r).to_word();
        (-bound..=bound).any(|x| is_trivial(&Word::a(x).mul(&wr).mul(&Word::a(-x)).mul(&uw), p))
    })
}

pub fn suite_reduction(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for p in [params(2, 3), params(2, 4), params(3, 5), params(2, -3), params(-4, 6)] {
        for _ in 0..cases {
            let w = random_word(&mut r, 10, 6);
            let red = britton_reduce(&w, p);
            ensure(britton_reduce(&red, p) == red, || format!("{p}: Britton reduction of {w} not idempotent"))?;
            ensure(!has_pinch(&red, p), || format!("{p}: {red} still has a pinch"))?;
            ensure(affine(&red, p) == affine(&w, p), || format!("{p}: reducing {w} changed its image"))?;
            let (c, u) = cyclically_reduce(&w, p);
            ensure(cyclically_reduce(&c.to_word(), p).0 == c, || format!("{p}: cyclic reduction of {w} not idempotent"))?;
            let back = u.mul(&c.to_word()).mul(&u.inverse());
            ensure(affine(&back, p) == affine(&w, p), || format!("{p}: conjugator for {w} is wrong"))?;
            ensure(is_trivial(&back.mul(&w.inverse()), p), || format!("{p}: u c u^-1 != {w}"))?;
            if is_trivial(&w, p) {
                ensure(affine(&w, p) == (Rational::one(), Rational::zero()), || format!("{p}: {w} trivial but image is not"))?;
            }
        }
    }
    Ok(format!("{} random words in 5 groups", 5 * cases))
}

pub fn suite_conjugacy(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut positives = 0;
    for p in [params(2, 3), params(2, 4)] {
        for _ in 0..cases {
            let w = random_zero_exponent(&mut r, p, 2, 6);
            let u = if r.gen_bool(0.5) {
                let h = random_word(&mut r, 5, 4);
                cyclically_reduce(&h.mul(&w.to_word()).mul(&h.inverse()), p).0
            } else {
                random_zero_exponent(&mut r, p, 2, 6)
            };
            if u.n() == 0 {
                continue;
            }
            let fast = is_conjugate(&u, &w).map_err(|e| e.to_string())?;
            let slow = brute_conjugate(&u, &w, 40);
            positives += usize::from(slow);
            ensure(fast == slow, || format!("{p}: is_conjugate({u}, {w}) = {fast}, search says {slow}"))?;
        }
    }
    Ok(format!("{} pairs, {positives} conjugate", 2 * cases))
}

// ----------------------------------------------------------- turn graph

pub fn suite_turn_graph(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for p in [params(2, 3), params(3, 5), params(2, -4)] {
        for _ in 0..cases {
            let w = random_zero_exponent(&mut r, p, 4, 5);
            let g = build_turn_graph(&w).map_err(|e| e.to_string())?;
            ensure(validate(&g), || format!("{w}: graph fails validation"))?;
            let n = g.n();
            let expected: usize = (0..n).map(|i| (0..n).filter(|&j| w.eps(j + 1) == -w.eps(i)).count()).sum();
            ensure(g.num_edges() == expected, || format!("{w}: edge count"))?;
            for (i, e) in g.edges().iter().enumerate() {
                let d = g.edges()[e.dual];
                ensure(g.edges()[d.dual] == *e && d.dual == i, || format!("{w}: dual not an involution at {i}"))?;
                ensure(d.from == (e.to + 1) % n && d.to == (e.from + n - 1) % n, || format!("{w}: dual endpoints at {i}"))?;
            }
        }
    }
    Ok(format!("{} random graphs", 3 * cases))
}

// ------------------------------------------------------------- disks

fn simple_cycles_by_subsets(g: &TurnGraph) -> Vec<Vec<u32>> {
    let k = g.num_edges();
    let n = g.n();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) {
        let mut indeg = vec![0; n];
        let mut outdeg = vec![0; n];
        let mut next = vec![usize::MAX; n];
        for e in 0..k {
            if mask >> e & 1 == 1 {
                let ed = g.edges()[e];
                outdeg[ed.from] += 1;
                indeg[ed.to] += 1;
                next[ed.from] = ed.to;
            }
        }
        if (0..n).any(|v| indeg[v] != outdeg[v] || outdeg[v] > 1) {
            continue;
        }
        let start = (0..n).find(|&v| outdeg[v] == 1).unwrap();
        let (mut v, mut len) = (next[start], 1);
        while v != start {
            v = next[v];
            len += 1;
        }
        if len == mask.count_ones() {
            out.push((0..k).map(|e| mask >> e & 1).collect());
        }
    }
    out
}

fn min_decomposition(v: &[u32], cycles: &[Vec<u32>], memo: &mut HashMap<Vec<u32>, Option<u32>>) -> Option<u32> {
    if v.iter().all(|&x| x == 0) {
        return Some(0);
    }
    if let Some(&c) = memo.get(v) {
        return c;
    }
    let mut best: Option<u32> = None;
    for c in cycles {
        if c.iter().zip(v).all(|(a, b)| a <= b) {
            let rest: Vec<u32> = v.iter().zip(c).map(|(a, b)| a - b).collect();
            if let Some(k) = min_decomposition(&rest, cycles, memo) {
                best = Some(best.map_or(k + 1, |b| b.min(k + 1)));
            }
        }
    }
    memo.insert(v.to_vec(), best);
    best
}

fn connected(v: &[u32], g: &TurnGraph) -> bool {
    let n = g.n();
    let mut reach = vec![false; n];
    let used: Vec<usize> = (0..g.num_edges()).filter(|&e| v[e] > 0).collect();
    let Some(&first) = used.first() else { return false };
    reach[g.edges()[first].from] = true;
    loop {
        let mut grew = false;
        for &e in &used {
            let ed = g.edges()[e];
            if reach[ed.from] != reach[ed.to] {
                reach[ed.from] = true;
                reach[ed.to] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    used.iter().all(|&e| reach[g.edges()[e].from])
}

/// Connected edge vectors with entries at most `M` that are sums of at
/// most `M` simple cycles, with the least such number. Depends only on the
/// graph's shape, not on the turn weights.
fn decomposable_vectors(g: &TurnGraph) -> BTreeMap<Vec<u32>, u32> {
    let big_m = g.params().big_m() as u32;
    let k = g.num_edges();
    let cycles = simple_cycles_by_subsets(g);
    let mut memo = HashMap::new();
    let mut out = BTreeMap::new();
    let mut v = vec![0u32; k];
    let mut net = vec![0i64; g.n()];
    loop {
        let mut i = 0;
        while i < k && v[i] == big_m {
            v[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        v[i] += 1;
        net.iter_mut().for_each(|x| *x = 0);
        for (e, &c) in v.iter().enumerate() {
            let ed = g.edges()[e];
            net[ed.from] += c as i64;
            net[ed.to] -= c as i64;
        }
        if net.iter().any(|&x| x != 0) || !connected(&v, g) {
            continue;
        }
        if let Some(count) = min_decomposition(&v, &cycles, &mut memo).filter(|&c| c <= big_m) {
            out.insert(v.clone(), count);
        }
    }
    out
}

pub type ShapeCache = HashMap<(Vec<i8>, i64), BTreeMap<Vec<u32>, u32>>;

/// Potential disks by brute force over all edge vectors with entries at
/// most `M`: connected, a sum of at most `M` simple cycles (found by
/// testing every edge subset), and `mu | omega`.
pub fn disk_oracle(g: &TurnGraph, cache: &mut ShapeCache) -> BTreeMap<Vec<u32>, u32> {
    let p = g.params();
    let key = ((0..g.n()).map(|i| g.source().eps(i)).collect(), p.big_m());
    let shapes = cache.entry(key).or_insert_with(|| decomposable_vectors(g));
    let mut out = BTreeMap::new();
    for (v, &count) in shapes.iter() {
        let mut visits = vec![0i64; g.n()];
        for (e, &c) in v.iter().enumerate() {
            visits[g.edges()[e].from] += c as i64;
        }
        let omega: i64 = visits.iter().zip(g.turns()).map(|(c, t)| c * t.weight).sum();
        let kinds: Vec<TurnKind> =
            (0..g.n()).filter(|&t| visits[t] > 0).map(|t| TurnKind::of(g.source().eps(t), g.source().eps(t + 1))).collect();
        let mu = if kinds.iter().all(|&x| x == TurnKind::TypeM) {
            p.m().abs()
        } else if kinds.iter().all(|&x| x == TurnKind::TypeL) {
            p.ell().abs()
        } else {
            num_integer::gcd(p.m(), p.ell())
        };
        if omega % mu == 0 {
            out.insert(v.clone(), count);
        }
    }
    out
}

fn all_zero_exponent_words(p: GroupParams, n: usize, exps: &[i64]) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for signs in 0u32..(1 << n) {
        if signs.count_ones() as usize * 2 != n {
            continue;
        }
        let total = exps.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let syl = (0..n)
                .map(|i| {
                    let k = exps[c % exps.len()];
                    c /= exps.len();
                    Syllable { eps: if signs >> i & 1 == 1 { 1 } else { -1 }, k }
                })
                .collect();
            if let Ok(w) = CyclicWord::from_syllables(p, syl) {
                out.push(w);
            }
        }
    }
    out
}

pub fn suite_disks() -> Check {
    let mut graphs = 0;
    let mut cache = ShapeCache::new();
    for (p, exps2, exps4) in [
        (params(2, 3), vec![-3, -1, 1, 2, 3], vec![1, 2]),
        (params(2, 4), vec![-2, 1, 3], vec![1, 3]),
        (params(3, -2), vec![-1, 1, 2, 4], vec![1, 2]),
    ] {
        let mut words = all_zero_exponent_words(p, 2, &exps2);
        words.extend(all_zero_exponent_words(p, 4, &exps4));
        for w in words {
            let g = build_turn_graph(&w).map_err(|e| e.to_string())?;
            let circuits = enumerate_embedded_circuits(&g, 1 << 20).map_err(|e| e.to_string())?;
            ensure(circuits.len() == simple_cycles_by_subsets(&g).len(), || format!("{p} {w}: circuit count"))?;
            let disks = enumerate_potential_disks(&g, &circuits, 1 << 24).map_err(|e| e.to_string())?;
            let got: BTreeMap<Vec<u32>, u32> = disks.iter().map(|d| (d.edge_vector.clone(), d.circuit_count)).collect();
            ensure(got.len() == disks.len(), || format!("{p} {w}: duplicate disks"))?;
            let want = disk_oracle(&g, &mut cache);
            ensure(got == want, || format!("{p} {w}: {} disks enumerated, oracle finds {}", got.len(), want.len()))?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} turn graphs with at most 4 vertices"))
}

// ---------------------------------------------------------------- LP

/// Row-reduces `[A | b]`, returning independent rows or `None` if the
/// system is inconsistent.
fn independent_rows(a: &[Vec<Rational>], b: &[Rational]) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let mut rows: Vec<(Vec<Rational>, Rational)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r].0[c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let (pr, pb) = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r].0[c].is_zero() {
                let f = &rows[r].0[c] / &pr[c];
                for j in 0..cols {
                    rows[r].0[j] = &rows[r].0[j] - &f * &pr[j];
                }
                rows[r].1 = &rows[r].1 - &f * &pb;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r.1.is_zero()) {
        return None;
    }
    rows.truncate(rank);
    Some(rows.into_iter().unzip())
}

fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, piv);
        let pr = m[c].clone();
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = &m[r][c] / &pr[c];
                for j in 0..=n {
                    m[r][j] = &m[r][j] - &f * &pr[j];
                }
            }
        }
    }
    Some((0..n).map(|r| &m[r][n] / &m[r][r]).collect())
}

pub enum OracleLp {
    Infeasible,
    Optimal { value: Rational, optimal_vertices: Vec<Vec<Rational>> },
}

/// Vertex enumeration for a bounded program `max c x, A x = b, x >= 0`.
pub fn vertex_oracle(lp: &LinearProgram) -> OracleLp {
    let nv = lp.num_vars();
    let a: Vec<Vec<Rational>> = lp.constraints.iter().map(|c| c.coeffs.clone()).collect();
    let b: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
    let Some((a, b)) = independent_rows(&a, &b) else { return OracleLp::Infeasible };
    let r = b.len();
    let mut best: Option<Rational> = None;
    let mut opt: Vec<Vec<Rational>> = Vec::new();
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        let sub: Vec<Vec<Rational>> = a.iter().map(|row| subset.iter().map(|&j| row[j].clone()).collect()).collect();
        if let Some(xb) = solve_square(&sub, &b) {
            if xb.iter().all(|x| !x.is_negative()) {
                let mut x = vec![Rational::zero(); nv];
                for (&j, v) in subset.iter().zip(xb) {
                    x[j] = v;
                }
                let val: Rational = x.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
                match &best {
                    Some(bv) if &val < bv => {}
                    Some(bv) if &val == bv => {
                        if !opt.contains(&x) {
                            opt.push(x);
                        }
                    }
                    _ => {
                        best = Some(val);
                        opt = vec![x];
                    }
                }
            }
        }
        // next r-subset of 0..nv
        let mut i = r;
        loop {
            if i == 0 {
                return match best {
                    None => OracleLp::Infeasible,
                    Some(value) => OracleLp::Optimal { value, optimal_vertices: opt },
                };
            }
            i -= 1;
            if subset[i] < nv - r + i {
                subset[i] += 1;
                for j in i + 1..r {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
        if r == 0 {
            unreachable!();
        }
    }
}

fn random_bounded_lp(r: &mut ChaCha8Rng) -> LinearProgram {
    let nv = r.gen_range(2..=4);
    let rows = r.gen_range(1..=2);
    let vars: Vec<String> = (0..=nv).map(|j| format!("x{j}")).collect();
    let mut objective: Vec<Rational> = (0..nv).map(|_| int(r.gen_range(-3..=3))).collect();
    objective.push(Rational::zero());
    let mut lp = LinearProgram::new(vars, objective);
    for _ in 0..rows {
        let mut coeffs: Vec<Rational> = (0..nv).map(|_| int(r.gen_range(-3..=3))).collect();
        coeffs.push(Rational::zero());
        lp.add_constraint(coeffs, int(r.gen_range(-2..=4)));
    }
    let mut cap: Vec<Rational> = (0..nv).map(|_| int(r.gen_range(1..=2))).collect();
    cap.push(Rational::one());
    lp.add_constraint(cap, int(r.gen_range(1..=6)));
    lp
}

/// Transportation problem with supplies and demands of equal total; its
/// rows are dependent, which exercises redundancy handling.
fn random_transportation(r: &mut ChaCha8Rng) -> LinearProgram {
    let (s, d) = (r.gen_range(2..=3), r.gen_range(2..=3));
    let mut supply: Vec<i64> = (0..s).map(|_| r.gen_range(0..=4)).collect();
    let mut demand: Vec<i64> = (0..d).map(|_| r.gen_range(0..=4)).collect();
    let (ts, td): (i64, i64) = (supply.iter().sum(), demand.iter().sum());
    if ts > td {
        demand[0] += ts - td;
    } else {
        supply[0] += td - ts;
    }
    let vars = (0..s * d).map(|j| format!("f{j}")).collect();
    let objective = (0..s * d).map(|_| int(r.gen_range(-2..=2))).collect();
    let mut lp = LinearProgram::new(vars, objective);
    for i in 0..s {
        lp.add_constraint((0..s * d).map(|j| if j / d == i { int(1) } else { int(0) }).collect(), int(supply[i]));
    }
    for k in 0..d {
        lp.add_constraint((0..s * d).map(|j| if j % d == k { int(1) } else { int(0) }).collect(), int(demand[k]));
    }
    lp
}

pub fn suite_lp(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let (mut opt, mut infeasible, mut ties) = (0, 0, 0);
    for case in 0..cases {
        let lp = if case % 3 == 2 { random_transportation(&mut r) } else { random_bounded_lp(&mut r) };
        let out = solve_max(&lp).map_err(|e| format!("case {case}: {e}"))?;
        match vertex_oracle(&lp) {
            OracleLp::Infeasible => {
                infeasible += 1;
                ensure(out.status == LpStatus::Infeasible, || format!("case {case}: oracle infeasible, solver {:?}", out.status))?;
            }
            OracleLp::Optimal { value, optimal_vertices } => {
                opt += 1;
                ensure(out.status == LpStatus::Optimal, || format!("case {case}: solver says {:?}", out.status))?;
                ensure(out.value == value, || format!("case {case}: value {} vs oracle {value}", out.value))?;
                ensure(optimal_vertices.contains(&out.point), || format!("case {case}: returned point is not an optimal vertex"))?;
                let unique = optimal_vertices.len() == 1;
                ties += usize::from(!unique);
                ensure(out.unique == unique, || format!("case {case}: uniqueness {} vs oracle {unique}", out.unique))?;
            }
        }
    }
    Ok(format!("{cases} programs: {opt} optimal ({ties} with tied vertices), {infeasible} infeasible"))
}

// ------------------------------------------------------- axis patterns

/// Bounded oracle for G-equivalence of the oriented axes of `u` and `w`
/// (t-exponent 0): `u` is conjugate to `w a^{jP}` for some `|j| <= j_max`,
/// where `a^P` generates the pointwise stabilizer of the axis of `w`
/// inside `<a>`.
pub fn axes_oracle(u: &CyclicWord, w: &CyclicWord, j_max: i64, x_bound: i64) -> bool {
    let p = w.params();
    let period = axis_stabilizer_exponent(w).unwrap();
    (-j_max..=j_max).any(|j| {
        let shifted = cyclically_reduce(&w.to_word().mul(&Word::a(j * period)), p).0;
        brute_conjugate(u, &shifted, x_bound)
    })
}

pub fn suite_pattern_orbits(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let (mut pairs, mut equivalent) = (0, 0);
    let mut check = |u: &CyclicWord, w: &CyclicWord| -> Result<(), String> {
        let exact = axes_equivalent(u, w).map_err(|e| e.to_string())?;
        let oracle = axes_oracle(u, w, 12, 24);
        ensure(exact == oracle, || format!("{u} vs {w}: orbit codes say {exact}, oracle says {oracle}"))?;
        if exact {
            let (pu, pw) = (axis_pattern(u).unwrap(), axis_pattern(w).unwrap());
            ensure(pu.is_rotation_of(&pw), || format!("{u} vs {w}: equivalent axes with different turn patterns"))?;
            equivalent += 1;
        }
        pairs += 1;
        Ok(())
    };
    let p = params(2, 3);
    let short: Vec<CyclicWord> = all_zero_exponent_words(p, 2, &[-3, -2, -1, 1, 2, 3]);
    for u in &short {
        for w in &short {
            check(u, w)?;
        }
    }
    for p in [params(2, 3), params(2, 4)] {
        for _ in 0..cases {
            let w = random_zero_exponent(&mut r, p, 2, 4);
            let u = match r.gen_range(0..3) {
                0 => random_zero_exponent(&mut r, p, 2, 4),
                1 => {
                    let period = axis_stabilizer_exponent(&w).unwrap();
                    let h = random_word(&mut r, 4, 3);
                    let x = w.to_word().mul(&Word::a(period * r.gen_range(-2..=2)));
                    cyclically_reduce(&h.mul(&x).mul(&h.inverse()), p).0
                }
                _ => {
                    let mut syl = w.syllables().to_vec();
                    let i = r.gen_range(0..syl.len());
                    syl[i].k += if r.gen_bool(0.5) { p.m() } else { p.ell() } * r.gen_range(-1..=1);
                    match CyclicWord::from_syllables(p, syl) {
                        Ok(v) => v.rotate(r.gen_range(0..w.n())),
                        Err(_) => continue,
                    }
                }
            };
            if u.n() == 0 || u.t_exponent() != 0 {
                continue;
            }
            check(&u, &w)?;
        }
    }
    Ok(format!("{pairs} pairs, {equivalent} with equivalent axes"))
}
