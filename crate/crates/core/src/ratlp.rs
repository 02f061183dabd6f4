//! Exact rational linear programming over `{u >= 0 : A u = b}`.
//!
//! Dense two-phase simplex on a `BigRational` tableau with Bland's rule.
//! Every optimum carries a dual certificate that is re-checked against the
//! original data, and an exact uniqueness decision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serde adapter writing rationals as `{"num": "p", "den": "q"}`.
pub mod rational_json {
    use super::*;
    use serde::de::Error as _;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    pub fn to_repr(q: &Rational) -> (String, String) {
        (q.numer().to_string(), q.denom().to_string())
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (num, den) = to_repr(q);
        Repr { num, den }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let r = Repr::deserialize(d)?;
        let num: BigInt = r.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = r.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|q| {
                let (num, den) = to_repr(q);
                Repr { num, den }
            }))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(|r| {
                    let num: BigInt = r.num.parse().map_err(D::Error::custom)?;
                    let den: BigInt = r.den.parse().map_err(D::Error::custom)?;
                    if den.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    Ok(Rational::new(num, den))
                })
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match v {
                Some(q) => super::serialize(q, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            match Option::<Repr>::deserialize(d)? {
                None => Ok(None),
                Some(r) => {
                    let num: BigInt = r.num.parse().map_err(D::Error::custom)?;
                    let den: BigInt = r.den.parse().map_err(D::Error::custom)?;
                    if den.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    Ok(Some(Rational::new(num, den)))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "rational_json::vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "rational_json")]
    pub rhs: Rational,
}

/// Maximize `objective . u` subject to `A u = b`, `u >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
    #[serde(with = "rational_json::vec")]
    pub objective: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(vars: Vec<String>, objective: Vec<Rational>) -> LinearProgram {
        LinearProgram { vars, constraints: Vec::new(), objective }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rhs });
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(Error::DimensionMismatch(format!("objective has {} entries, expected {n}", self.objective.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {i} has {} entries, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal value; zero unless `status` is `Optimal`.
    #[serde(with = "rational_json")]
    pub value: Rational,
    /// Optimal vertex; empty unless `status` is `Optimal`.
    #[serde(with = "rational_json::vec")]
    pub point: Vec<Rational>,
    /// Basic variables of the final tableau, in increasing order.
    pub basis: Vec<usize>,
    pub unique: bool,
    /// Dual solution `y` with `c - y A <= 0` and `y b = value`.
    #[serde(with = "rational_json::vec")]
    pub dual: Vec<Rational>,
}

impl LpOutcome {
    fn without_optimum(status: LpStatus) -> LpOutcome {
        LpOutcome { status, value: Rational::zero(), point: Vec::new(), basis: Vec::new(), unique: false, dual: Vec::new() }
    }
}

/// Checks `A u = b`, `u >= 0` exactly and returns the objective value.
pub fn evaluate(lp: &LinearProgram, point: &[Rational]) -> Result<(bool, Rational)> {
    lp.check()?;
    if point.len() != lp.num_vars() {
        return Err(Error::DimensionMismatch(format!("point has {} entries, expected {}", point.len(), lp.num_vars())));
    }
    let feasible = point.iter().all(|x| !x.is_negative())
        && lp.constraints.iter().all(|c| dot(&c.coeffs, point) == c.rhs);
    Ok((feasible, dot(&lp.objective, point)))
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

/// Dense simplex tableau: `rows[i]` holds the row coefficients followed by
/// the right-hand side; `z` holds reduced costs followed by `-value`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    basis: Vec<usize>,
    /// Original constraint index of each row.
    origin: Vec<usize>,
}

enum Run {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.z.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=w).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for &j in &nz {
                self.z[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland ratio test: least ratio, ties broken by least basic index.
    fn leaving(&self, c: usize) -> Option<usize> {
        let w = self.width();
        let mut best: Option<(Rational, usize, usize)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[c].is_positive() {
                let ratio = &row[w] / &row[c];
                let better = match &best {
                    None => true,
                    Some((r, b, _)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                };
                if better {
                    best = Some((ratio, self.basis[i], i));
                }
            }
        }
        best.map(|(_, _, i)| i)
    }

    /// Runs Bland's rule over the columns `0..limit`.
    fn run(&mut self, limit: usize) -> Run {
        loop {
            let Some(c) = (0..limit).find(|&j| self.z[j].is_positive()) else { return Run::Optimal };
            let Some(r) = self.leaving(c) else { return Run::Unbounded };
            self.pivot(r, c);
        }
    }

    fn value(&self) -> Rational {
        -self.z[self.width()].clone()
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let w = self.width();
        let mut z: Vec<Rational> = (0..=w).map(|j| if j < c.len() { c[j].clone() } else { Rational::zero() }).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = if b < c.len() { c[b].clone() } else { Rational::zero() };
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    z[j] -= &cb * &row[j];
                }
            }
        }
        self.z = z;
    }
}

/// Phase one: returns a feasible tableau over the original columns, or
/// `None` if the program is infeasible.
fn feasible_tableau(lp: &LinearProgram) -> Option<Tableau> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let mut rows = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        let mut row: Vec<Rational> = c.coeffs.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        row.push(if flip { -&c.rhs } else { c.rhs.clone() });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        z: vec![Rational::zero(); n + m + 1],
        basis: (n..n + m).collect(),
        origin: (0..m).collect(),
    };
    let phase1: Vec<Rational> = (0..n + m).map(|j| if j < n { Rational::zero() } else { -Rational::one() }).collect();
    t.set_objective(&phase1);
    match t.run(n + m) {
        Run::Optimal => {}
        Run::Unbounded => unreachable!("phase one objective is bounded by zero"),
    }
    if t.value().is_negative() {
        return None;
    }
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are linear combinations of the others.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    t.origin.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for row in t.rows.iter_mut() {
        row.drain(n..n + m);
    }
    t.z = vec![Rational::zero(); n + 1];
    Some(t)
}

/// Solves `B^T y = c_B` on the kept rows and scatters `y` to all constraints.
fn dual_solution(lp: &LinearProgram, t: &Tableau) -> Vec<Rational> {
    let k = t.basis.len();
    // Augmented system: unknowns y_r for kept rows r.
    let mut a: Vec<Vec<Rational>> = t
        .basis
        .iter()
        .map(|&j| {
            let mut eq: Vec<Rational> = t.origin.iter().map(|&o| lp.constraints[o].coeffs[j].clone()).collect();
            eq.push(lp.objective[j].clone());
            eq
        })
        .collect();
    for col in 0..k {
        let p = (col..k).find(|&i| !a[i][col].is_zero()).expect("basis matrix is nonsingular");
        a.swap(col, p);
        let pv = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &pv;
        }
        for i in 0..k {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=k {
                    let d = &f * &a[col][j];
                    a[i][j] -= d;
                }
            }
        }
    }
    let mut y = vec![Rational::zero(); lp.constraints.len()];
    for (i, &o) in t.origin.iter().enumerate() {
        y[o] = a[i][k].clone();
    }
    y
}

fn solve_core(lp: &LinearProgram) -> (LpOutcome, Option<Tableau>) {
    let n = lp.num_vars();
    let Some(mut t) = feasible_tableau(lp) else {
        return (LpOutcome::without_optimum(LpStatus::Infeasible), None);
    };
    t.set_objective(&lp.objective);
    if let Run::Unbounded = t.run(n) {
        return (LpOutcome::without_optimum(LpStatus::Unbounded), None);
    }
    let mut point = vec![Rational::zero(); n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        point[b] = row[n].clone();
    }
    let mut basis = t.basis.clone();
    basis.sort_unstable();
    let dual = dual_solution(lp, &t);
    let outcome = LpOutcome { status: LpStatus::Optimal, value: t.value(), point, basis, unique: true, dual };
    (outcome, Some(t))
}

/// Exact optimum at a vertex, with dual certificate and uniqueness flag.
pub fn solve_max(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check()?;
    let (mut out, t) = solve_core(lp);
    let Some(t) = t else { return Ok(out) };
    verify_dual(lp, &out)?;
    out.unique = is_unique(lp, &t, &out)?;
    Ok(out)
}

/// Re-checks the dual certificate against the original program data.
pub fn verify_dual(lp: &LinearProgram, out: &LpOutcome) -> Result<()> {
    let n = lp.num_vars();
    let y = &out.dual;
    for j in 0..n {
        let ya: Rational = lp.constraints.iter().zip(y).map(|(c, yi)| yi * &c.coeffs[j]).sum();
        if (&lp.objective[j] - ya).is_positive() {
            return Err(Error::InternalInconsistency(format!("dual certificate fails at column {j}")));
        }
    }
    let yb: Rational = lp.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
    let (feasible, value) = evaluate(lp, &out.point)?;
    if yb != out.value || value != out.value || !feasible {
        return Err(Error::InternalInconsistency("dual objective does not match primal value".into()));
    }
    Ok(())
}

/// Decides whether the optimum is the only optimal point.
///
/// Nonbasic columns with zero reduced cost are probed with a single pivot;
/// a nondegenerate or unbounded probe proves non-uniqueness. If every probe
/// is degenerate, an auxiliary program maximizes the total of the optimum's
/// zero coordinates over the optimal face; the optimum is unique iff that
/// maximum is zero.
fn is_unique(lp: &LinearProgram, t: &Tableau, out: &LpOutcome) -> Result<bool> {
    let n = lp.num_vars();
    let mut basic = vec![false; n];
    for &b in &t.basis {
        basic[b] = true;
    }
    let ties: Vec<usize> = (0..n).filter(|&j| !basic[j] && t.z[j].is_zero()).collect();
    if ties.is_empty() {
        return Ok(true);
    }
    for &j in &ties {
        match t.leaving(j) {
            None => return Ok(false),
            Some(r) => {
                if !t.rows[r][n].is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    let dead: Vec<bool> = (0..n).map(|j| !basic[j] && t.z[j].is_negative()).collect();
    let mut aux = LinearProgram::new(
        lp.vars.clone(),
        (0..n).map(|j| if out.point[j].is_zero() && !dead[j] { Rational::one() } else { Rational::zero() }).collect(),
    );
    aux.constraints = lp.constraints.clone();
    for j in (0..n).filter(|&j| dead[j]) {
        let mut row = vec![Rational::zero(); n];
        row[j] = Rational::one();
        aux.add_constraint(row, Rational::zero());
    }
    let (a, _) = solve_core(&aux);
    match a.status {
        LpStatus::Optimal => Ok(a.value.is_zero()),
        LpStatus::Unbounded => Ok(false),
        LpStatus::Infeasible => Err(Error::InternalInconsistency("optimal face is empty".into())),
    }
}
