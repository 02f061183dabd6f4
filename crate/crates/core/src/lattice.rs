//! Integer lattices in echelon form, used to pick unique coset
//! representatives of exponent vectors modulo the conjugacy moves.

/// Row-echelon basis of the lattice spanned by some integer rows.
///
/// Pivot entries are positive and pivot columns strictly increase, so
/// [`Echelon::reduce`] maps every coset of the lattice to one vector.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    pub(crate) fn new(mut gens: Vec<Vec<i128>>, ncols: usize) -> Echelon {
        let mut rows = Vec::new();
        for col in 0..ncols {
            gens.retain(|r| r.iter().any(|&x| x != 0));
            loop {
                let mut best: Option<usize> = None;
                for (i, r) in gens.iter().enumerate() {
                    if r[col] != 0 && best.is_none_or(|b| r[col].abs() < gens[b][col].abs()) {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                let pivot = gens[b].clone();
                let mut others_nonzero = false;
                for (i, r) in gens.iter_mut().enumerate() {
                    if i == b || r[col] == 0 {
                        continue;
                    }
                    let q = r[col] / pivot[col];
                    for (x, p) in r.iter_mut().zip(&pivot) {
                        *x = x
                            .checked_sub(q.checked_mul(*p).expect("lattice overflow"))
                            .expect("lattice overflow");
                    }
                    if r[col] != 0 {
                        others_nonzero = true;
                    }
                }
                if !others_nonzero {
                    let mut row = gens.swap_remove(b);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    rows.push((col, row));
                    break;
                }
            }
        }
        Echelon { rows }
    }

    /// Unique representative of `v` modulo the lattice: every pivot
    /// coordinate lands in `[0, pivot)`.
    pub(crate) fn reduce(&self, v: &mut [i128]) {
        for (col, row) in &self.rows {
            let h = row[*col];
            let q = v[*col].div_euclid(h);
            if q != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= q * r;
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_same_representative() {
        let e = Echelon::new(vec![vec![2, -3]], 2);
        let mut a = vec![1, 4];
        let mut b = vec![3, 1];
        e.reduce(&mut a);
        e.reduce(&mut b);
        assert_eq!(a, b);
        assert_eq!(a, vec![1, 4]);
    }

    #[test]
    fn full_rank_quotient() {
        let e = Echelon::new(vec![vec![4, 6], vec![2, 2]], 2);
        assert_eq!(e.rank(), 2);
        // Lattice has index |det| = 4; count distinct representatives of a box.
        let mut reps = std::collections::BTreeSet::new();
        for x in -6..6 {
            for y in -6..6 {
                let mut v = vec![x, y];
                e.reduce(&mut v);
                reps.insert(v);
            }
        }
        assert_eq!(reps.len(), 4);
    }
}
