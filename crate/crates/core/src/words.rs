//! Words in `BS(m, l)`: parsing, Britton reduction, cyclic reduction,
//! conjugacy normal forms and the elementary invariants (t-length,
//! t-exponent, abelianization, ellipticity, alternating shape).
//!
//! A cyclically reduced hyperbolic word is stored as syllables
//! `(eps_i, k_i)` standing for `t^{eps_0} a^{k_0} t^{eps_1} a^{k_1} ...`,
//! read cyclically. Turn `i` is the subword `t^{eps_i} a^{k_i} t^{eps_{i+1}}`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Echelon;

/// The pair `(m, l)` of the presentation `t a^m t^-1 = a^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    m: i64,
    #[serde(rename = "l")]
    ell: i64,
}

impl GroupParams {
    pub fn new(m: i64, ell: i64) -> Result<GroupParams> {
        let reason = if m == 0 || ell == 0 {
            "m and l must be nonzero"
        } else if m == ell {
            "m and l must differ"
        } else if m.checked_abs().is_none() || ell.checked_abs().is_none() {
            "parameter out of range"
        } else {
            return Ok(GroupParams { m, ell });
        };
        Err(Error::InvalidParams { m, ell, reason })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    /// `max(|m|, |l|)`, the bound on circuits per potential disk.
    pub fn big_m(&self) -> i64 {
        self.m.abs().max(self.ell.abs())
    }

    pub fn gcd(&self) -> i64 {
        self.m.gcd(&self.ell)
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BS({},{})", self.m, self.ell)
    }
}

/// A generator of the free group on `{a, t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "t")]
    T,
}

/// A free-group word with maximally merged syllables and nonzero exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<(Gen, i64)>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    /// Builds a word, merging adjacent equal generators and dropping zeros.
    pub fn new(letters: impl IntoIterator<Item = (Gen, i64)>) -> Word {
        let mut w = Word::default();
        for (g, e) in letters {
            w.push(g, e);
        }
        w
    }

    pub fn a(k: i64) -> Word {
        Word::new([(Gen::A, k)])
    }

    pub fn t(k: i64) -> Word {
        Word::new([(Gen::T, k)])
    }

    pub fn letters(&self) -> &[(Gen, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    fn push(&mut self, g: Gen, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 = last.1.checked_add(e).expect("exponent overflow");
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn pow(&self, n: u32) -> Word {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.mul(self);
        }
        w
    }

    pub fn t_exponent(&self) -> i64 {
        self.letters.iter().filter(|l| l.0 == Gen::T).map(|l| l.1).sum()
    }

    pub fn a_exponent(&self) -> i64 {
        self.letters.iter().filter(|l| l.0 == Gen::A).map(|l| l.1).sum()
    }

    /// Number of `t^{±1}` letters.
    pub fn t_letters(&self) -> u64 {
        self.letters.iter().filter(|l| l.0 == Gen::T).map(|l| l.1.unsigned_abs()).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(g, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let c = if g == Gen::A { "a" } else { "t" };
            if e == 1 {
                f.write_str(c)?;
            } else {
                write!(f, "{c}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Parses the word grammar: tokens `a`, `t`, `a^<int>`, `t^<int>`,
/// optionally separated by whitespace or `*`.
pub fn parse(text: &str) -> Result<Word> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut w = Word::identity();
    let err = |position: usize, reason: &str| Error::Parse { position, reason: reason.to_string() };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() || c == b'*' {
            i += 1;
            continue;
        }
        let g = match c {
            b'a' => Gen::A,
            b't' => Gen::T,
            _ => return Err(err(i, &format!("unexpected character {:?}", text[i..].chars().next().unwrap()))),
        };
        i += 1;
        let mut e: i64 = 1;
        if i < bytes.len() && bytes[i] == b'^' {
            i += 1;
            let start = i;
            if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                i += 1;
            }
            let digits = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if digits == i {
                return Err(err(start, "expected an integer exponent after '^'"));
            }
            e = text[start..i].parse().map_err(|_| err(start, "exponent out of range"))?;
        }
        w.push(g, e);
    }
    Ok(w)
}

/// Stack machine applying free cancellation and the pinches
/// `t a^{km} t^-1 -> a^{kl}`, `t^-1 a^{kl} t -> a^{km}`.
struct Reducer {
    params: GroupParams,
    stack: Vec<(Gen, i64)>,
}

impl Reducer {
    fn push_a(&mut self, e: i64) {
        if e == 0 {
            return;
        }
        match self.stack.last_mut() {
            Some((Gen::A, k)) => {
                *k = k.checked_add(e).expect("exponent overflow in Britton reduction");
                if *k == 0 {
                    self.stack.pop();
                }
            }
            _ => self.stack.push((Gen::A, e)),
        }
    }

    fn push_t(&mut self, s: i64) {
        let (k, depth) = match self.stack.last() {
            Some(&(Gen::A, k)) => (k, 2),
            _ => (0, 1),
        };
        if self.stack.len() >= depth {
            if let (Gen::T, x) = self.stack[self.stack.len() - depth] {
                if x.signum() == -s {
                    if let Some(img) = pinch(self.params, -s, k) {
                        if depth == 2 {
                            self.stack.pop();
                        }
                        let top = self.stack.last_mut().unwrap();
                        top.1 -= x.signum();
                        if top.1 == 0 {
                            self.stack.pop();
                        }
                        self.push_a(img);
                        return;
                    }
                }
            }
        }
        match self.stack.last_mut() {
            Some((Gen::T, x)) if x.signum() == s => *x += s,
            _ => self.stack.push((Gen::T, s)),
        }
    }
}

/// Image of the pinch `t^{first} a^k t^{-first}` as a power of `a`, if any.
pub(crate) fn pinch(p: GroupParams, first: i64, k: i64) -> Option<i64> {
    let (div, mul) = if first > 0 { (p.m, p.ell) } else { (p.ell, p.m) };
    if k % div == 0 {
        Some((k / div).checked_mul(mul).expect("exponent overflow in Britton reduction"))
    } else {
        None
    }
}

/// Britton-reduces `w`: the result represents the same element and contains
/// no pinch.
///
/// # Panics
/// If an exponent overflows `i64`.
pub fn britton_reduce(w: &Word, params: GroupParams) -> Word {
    let mut r = Reducer { params, stack: Vec::with_capacity(w.letters.len()) };
    for &(g, e) in &w.letters {
        match g {
            Gen::A => r.push_a(e),
            Gen::T => {
                for _ in 0..e.unsigned_abs() {
                    r.push_t(e.signum());
                }
            }
        }
    }
    Word { letters: r.stack }
}

/// True iff `w` represents the identity.
pub fn is_trivial(w: &Word, params: GroupParams) -> bool {
    britton_reduce(w, params).is_empty()
}

/// True iff `w` represents a power of `a`; returns that power.
pub fn as_a_power(w: &Word, params: GroupParams) -> Option<i64> {
    let r = britton_reduce(w, params);
    match r.letters.as_slice() {
        [] => Some(0),
        [(Gen::A, k)] => Some(*k),
        _ => None,
    }
}

/// One syllable `t^{eps} a^{k}` of a cyclic word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub eps: i8,
    pub k: i64,
}

/// A cyclically reduced conjugacy representative.
///
/// With `n = 0` it is the elliptic element `a^{a_power}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicWord {
    params: GroupParams,
    syllables: Vec<Syllable>,
    a_power: i64,
}

impl CyclicWord {
    pub fn elliptic(params: GroupParams, a_power: i64) -> CyclicWord {
        CyclicWord { params, syllables: Vec::new(), a_power }
    }

    /// Builds a cyclic word from syllables, checking the cyclic-reduction
    /// conditions.
    pub fn from_syllables(params: GroupParams, syllables: Vec<Syllable>) -> Result<CyclicWord> {
        if syllables.iter().any(|s| s.eps != 1 && s.eps != -1) {
            return Err(Error::PreconditionViolated("syllable signs must be +1 or -1".into()));
        }
        let w = CyclicWord { params, syllables, a_power: 0 };
        if let Some(i) = w.first_cyclic_pinch() {
            return Err(Error::PreconditionViolated(format!("turn {} is a pinch", i + 1)));
        }
        Ok(w)
    }

    /// Parses a word and cyclically reduces it.
    pub fn parse(text: &str, params: GroupParams) -> Result<CyclicWord> {
        Ok(cyclically_reduce(&parse(text)?, params).0)
    }

    fn first_cyclic_pinch(&self) -> Option<usize> {
        let n = self.syllables.len();
        (0..n).find(|&i| {
            let s = self.syllables[i];
            let next = self.syllables[(i + 1) % n].eps;
            s.eps == -next && pinch(self.params, s.eps as i64, s.k).is_some()
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// The t-length `n`.
    pub fn n(&self) -> usize {
        self.syllables.len()
    }

    /// The residual power of `a` when `n = 0`.
    pub fn a_power(&self) -> i64 {
        self.a_power
    }

    pub fn eps(&self, i: usize) -> i8 {
        self.syllables[i % self.n()].eps
    }

    pub fn k(&self, i: usize) -> i64 {
        self.syllables[i % self.n()].k
    }

    pub fn t_exponent(&self) -> i64 {
        self.syllables.iter().map(|s| s.eps as i64).sum()
    }

    pub fn to_word(&self) -> Word {
        if self.syllables.is_empty() {
            return Word::a(self.a_power);
        }
        Word::new(self.syllables.iter().flat_map(|s| [(Gen::T, s.eps as i64), (Gen::A, s.k)]))
    }

    /// Cyclic rotation by `r` syllables to the left.
    pub fn rotate(&self, r: usize) -> CyclicWord {
        let mut w = self.clone();
        if !w.syllables.is_empty() {
            let r = r % w.syllables.len();
            w.syllables.rotate_left(r);
        }
        w
    }

    /// The cyclic word of the inverse element.
    pub fn inverse(&self) -> CyclicWord {
        let n = self.n();
        if n == 0 {
            return CyclicWord::elliptic(self.params, -self.a_power);
        }
        let syllables = (0..n)
            .map(|i| Syllable { eps: -self.syllables[n - 1 - i].eps, k: -self.syllables[(2 * n - 2 - i) % n].k })
            .collect();
        CyclicWord { params: self.params, syllables, a_power: 0 }
    }

    /// The cyclic word of `g^p` for `p >= 1`.
    pub fn power(&self, p: usize) -> CyclicWord {
        let mut w = self.clone();
        if self.n() == 0 {
            w.a_power = self.a_power.checked_mul(p as i64).expect("exponent overflow");
        } else {
            w.syllables = self.syllables.iter().copied().cycle().take(p * self.n()).collect();
        }
        w
    }

    /// For alternating words, the exponents `(i_k, j_k)` of
    /// `prod t a^{i_k} t^-1 a^{j_k}`, read from the first `t`.
    pub fn alternating_exponents(&self) -> Option<Vec<(i64, i64)>> {
        if !is_alternating(self) {
            return None;
        }
        let start = usize::from(self.syllables[0].eps != 1);
        let w = self.rotate(start);
        Some(w.syllables.chunks(2).map(|c| (c[0].k, c[1].k)).collect())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.to_word();
        if w.is_empty() {
            f.write_str("1")
        } else {
            w.fmt(f)
        }
    }
}

/// Expands a word whose first and last letters are `t`-powers into syllables,
/// appending `tail` as the final `a`-exponent.
fn syllables_of(core: &[(Gen, i64)], tail: i64) -> Vec<Syllable> {
    let mut out: Vec<Syllable> = Vec::new();
    for &(g, e) in core {
        match g {
            Gen::T => {
                for _ in 0..e.unsigned_abs() {
                    out.push(Syllable { eps: e.signum() as i8, k: 0 });
                }
            }
            Gen::A => out.last_mut().expect("core starts with t").k += e,
        }
    }
    out.last_mut().expect("core has a t letter").k += tail;
    out
}

/// Cyclically reduces `w`.
///
/// Returns the cyclic word `c` and a conjugator `u` with `u c u^-1 = w` in the
/// group (where `c` is read as the linear word [`CyclicWord::to_word`]).
pub fn cyclically_reduce(w: &Word, params: GroupParams) -> (CyclicWord, Word) {
    let mut cur = britton_reduce(w, params);
    let mut conj = Word::identity();
    loop {
        let letters = cur.letters();
        if !letters.iter().any(|l| l.0 == Gen::T) {
            return (CyclicWord::elliptic(params, cur.a_exponent()), conj);
        }
        let mut lo = 0;
        let mut hi = letters.len();
        let mut x = 0;
        let mut y = 0;
        if letters[0].0 == Gen::A {
            x = letters[0].1;
            lo = 1;
        }
        if letters[hi - 1].0 == Gen::A {
            y = letters[hi - 1].1;
            hi -= 1;
        }
        conj = conj.mul(&Word::a(x));
        let syl = syllables_of(&letters[lo..hi], x + y);
        let n = syl.len();
        let last = syl[n - 1];
        if last.eps == -syl[0].eps && pinch(params, last.eps as i64, last.k).is_some() {
            let u = Word::new(syl[..n - 1].iter().flat_map(|s| [(Gen::T, s.eps as i64), (Gen::A, s.k)]));
            let v = Word::new([(Gen::T, last.eps as i64), (Gen::A, last.k)]);
            conj = conj.mul(&u);
            cur = britton_reduce(&v.mul(&u), params);
            continue;
        }
        return (CyclicWord { params, syllables: syl, a_power: 0 }, conj);
    }
}

/// t-length of the conjugacy class.
pub fn t_length(w: &CyclicWord) -> usize {
    w.n()
}

pub fn t_exponent(w: &Word) -> i64 {
    w.t_exponent()
}

/// Image in the abelianization `Z x Z/|m - l|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianImage {
    pub t_exp: i64,
    pub a_class: i64,
    pub modulus: i64,
}

pub fn abelianize(w: &Word, params: GroupParams) -> AbelianImage {
    let modulus = (params.m as i128 - params.ell as i128).unsigned_abs() as i64;
    AbelianImage { t_exp: w.t_exponent(), a_class: w.a_exponent().rem_euclid(modulus), modulus }
}

pub fn is_elliptic(w: &Word, params: GroupParams) -> bool {
    cyclically_reduce(w, params).0.n() == 0
}

/// True iff `n >= 2` is even and the signs alternate cyclically.
pub fn is_alternating(w: &CyclicWord) -> bool {
    let n = w.n();
    n >= 2 && n % 2 == 0 && (0..n).all(|i| w.eps(i) == -w.eps(i + 1))
}

/// Default step cap for [`window_sweep`]: `10 n (|m| + |l|)`.
pub fn default_sweep_cap(w: &CyclicWord) -> usize {
    10 * w.n().max(1) * (w.params.m.unsigned_abs() + w.params.ell.unsigned_abs()) as usize
}

/// Pushes every exponent preceding `t` into `[0, |l|)` and every exponent
/// preceding `t^-1` into `[0, |m|)` with the moves
/// `a^i t a^j <-> a^{i-l} t a^{j+m}` and `a^i t^-1 a^j <-> a^{i+m} t^-1 a^{j-l}`.
///
/// Some classes have no representative inside the windows (for instance
/// `t a^3 t^-1 a` in `BS(2,3)`); the sweep then cycles and the cap reports
/// [`Error::NonTerminating`].
pub fn window_sweep(w: &CyclicWord, cap: Option<usize>) -> Result<CyclicWord> {
    let n = w.n();
    if n == 0 {
        return Ok(w.clone());
    }
    let bound = cap.unwrap_or_else(|| default_sweep_cap(w));
    let (m, ell) = (w.params.m, w.params.ell);
    let mut s = w.syllables.clone();
    let mut steps = 0;
    let mut clean = 0;
    let mut i = 0;
    while clean < n {
        let j = (i + 1) % n;
        let k = s[i].k;
        let changed = if s[j].eps == 1 {
            let r = k.rem_euclid(ell.abs());
            let q = (k - r) / ell;
            s[i].k = r;
            s[j].k += q * m;
            q != 0
        } else {
            let r = k.rem_euclid(m.abs());
            let q = (r - k) / m;
            s[i].k = r;
            s[j].k -= q * ell;
            q != 0
        };
        if changed {
            clean = 0;
            steps += 1;
            if steps > bound {
                return Err(Error::NonTerminating { bound });
            }
        } else {
            clean += 1;
        }
        i = j;
    }
    Ok(CyclicWord { params: w.params, syllables: s, a_power: 0 })
}

/// Lattice spanned by the exponent changes of the conjugacy moves for a
/// fixed sign pattern.
fn move_lattice(params: GroupParams, eps: &[i8]) -> Echelon {
    let n = eps.len();
    let (m, ell) = (params.m as i128, params.ell as i128);
    let gens = (0..n)
        .map(|i| {
            let mut v = vec![0i128; n];
            let prev = (i + n - 1) % n;
            if eps[i] == 1 {
                v[prev] -= ell;
                v[i] += m;
            } else {
                v[prev] += m;
                v[i] -= ell;
            }
            v
        })
        .collect();
    Echelon::new(gens, n)
}

/// Canonical representative of the conjugacy class of a cyclically reduced
/// word.
///
/// For hyperbolic words the exponent vector is reduced modulo the lattice of
/// the two conjugacy moves (a unique coset representative), and the least
/// rotation is chosen. For elliptic words the representative is the power of
/// `a` of least absolute value in the orbit of `a^x -> a^{x l / m}`.
pub fn conjugacy_canonical(w: &CyclicWord) -> Result<CyclicWord> {
    let n = w.n();
    if n == 0 {
        return Ok(CyclicWord::elliptic(w.params, elliptic_canonical(w.params, w.a_power)));
    }
    let mut best: Option<Vec<Syllable>> = None;
    for r in 0..n {
        let rot = w.rotate(r);
        let eps: Vec<i8> = rot.syllables.iter().map(|s| s.eps).collect();
        let lattice = move_lattice(w.params, &eps);
        let mut v: Vec<i128> = rot.syllables.iter().map(|s| s.k as i128).collect();
        lattice.reduce(&mut v);
        let cand: Vec<Syllable> = eps
            .iter()
            .zip(&v)
            .map(|(&e, &k)| Ok(Syllable { eps: e, k: i64::try_from(k).map_err(|_| Error::Overflow("canonical form"))? }))
            .collect::<Result<_>>()?;
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    Ok(CyclicWord { params: w.params, syllables: best.unwrap(), a_power: 0 })
}

fn elliptic_canonical(p: GroupParams, x: i64) -> i64 {
    // The two pinch maps are inverse to each other, so the orbit of `x` is a
    // path `x (l/m)^k`. With `|m| = |l|` it is `{x, -x}`; otherwise the
    // smallest representative sits at the end where `|x|` decreases.
    if p.m.abs() == p.ell.abs() {
        let y = pinch(p, 1, x).unwrap_or(x);
        return [x, y].into_iter().min_by_key(|&y| (y.unsigned_abs(), y < 0)).unwrap();
    }
    let down = if p.ell.abs() > p.m.abs() { -1 } else { 1 };
    let mut y = x;
    while y != 0 {
        match pinch(p, down, y) {
            Some(next) => y = next,
            None => break,
        }
    }
    y
}

/// True iff the two cyclic words are conjugate.
pub fn is_conjugate(w1: &CyclicWord, w2: &CyclicWord) -> Result<bool> {
    if w1.params != w2.params || w1.n() != w2.n() || w1.t_exponent() != w2.t_exponent() {
        return Ok(false);
    }
    Ok(conjugacy_canonical(w1)? == conjugacy_canonical(w2)?)
}
