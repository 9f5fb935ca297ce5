//! Sparse exact linear algebra.
//!
//! Vectors are sorted `(index, coefficient)` lists. The leading entry of a
//! vector is its entry with the largest index; echelon forms pivot on leading
//! entries. With monomials indexed in increasing degree-then-lex order this
//! makes pivots the leading monomials, and the non-pivot indices the standard
//! monomials of a quotient.

use std::collections::BTreeMap;

use crate::field::Field;

pub type SparseVec<F> = Vec<(u32, F)>;

pub fn leading<F>(v: &[(u32, F)]) -> Option<u32> {
    v.last().map(|(i, _)| *i)
}

pub fn scale<F: Field>(v: &[(u32, F)], c: &F) -> SparseVec<F> {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

/// `a + c * b` for sorted sparse vectors.
pub fn axpy<F: Field>(a: &[(u32, F)], c: &F, b: &[(u32, F)]) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = c.mul(&b[j].1);
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Accumulates `(index, coefficient)` contributions into a sorted sparse vector.
pub fn collect_sparse<F: Field>(entries: impl IntoIterator<Item = (u32, F)>) -> SparseVec<F> {
    let mut v: Vec<(u32, F)> = entries.into_iter().collect();
    v.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec<F> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, x)) if *j == i => *x = x.add(&c),
            _ => {
                if let Some((_, x)) = out.last() {
                    if x.is_zero() {
                        out.pop();
                    }
                }
                out.push((i, c));
            }
        }
    }
    if out.last().is_some_and(|(_, x)| x.is_zero()) {
        out.pop();
    }
    out
}

fn add_into<F: Field>(acc: &mut BTreeMap<u32, F>, i: u32, c: &F) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&i) {
        Some(x) => {
            let s = x.add(c);
            if s.is_zero() {
                acc.remove(&i);
            } else {
                *x = s;
            }
        }
        None => {
            acc.insert(i, c.clone());
        }
    }
}

/// A semi-echelon basis: every row has leading coefficient one and a distinct
/// leading index. Rows are not reduced against each other; see
/// [`Echelon::into_reduced_rows`] for the canonical form.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    rows: Vec<SparseVec<F>>,
    pivot_row: BTreeMap<u32, usize>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Echelon { rows: Vec::new(), pivot_row: BTreeMap::new() }
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors(vs: impl IntoIterator<Item = SparseVec<F>>) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<F>] {
        &self.rows
    }

    pub fn is_pivot(&self, i: u32) -> bool {
        self.pivot_row.contains_key(&i)
    }

    pub fn pivots(&self) -> impl Iterator<Item = u32> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Reduces `v` until its leading entry is not a pivot (or it is zero).
    /// Entries below the leading one may still hit pivots.
    pub fn reduce_head(&self, v: SparseVec<F>) -> SparseVec<F> {
        let mut v = v;
        while let Some(lead) = leading(&v) {
            match self.pivot_row.get(&lead) {
                Some(&r) => {
                    let c = v.last().unwrap().1.neg();
                    v = axpy(&v, &c, &self.rows[r]);
                }
                None => break,
            }
        }
        v
    }

    /// Fully reduces `v`: no entry of the result sits on a pivot.
    pub fn reduce(&self, v: &[(u32, F)]) -> SparseVec<F> {
        let mut acc: BTreeMap<u32, F> = v.iter().cloned().collect();
        let mut out = Vec::new();
        while let Some((i, c)) = acc.pop_last() {
            match self.pivot_row.get(&i) {
                Some(&r) => {
                    let c = c.neg();
                    let row = &self.rows[r];
                    for (j, x) in &row[..row.len() - 1] {
                        add_into(&mut acc, *j, &c.mul(x));
                    }
                }
                None => out.push((i, c)),
            }
        }
        out.reverse();
        out
    }

    pub fn contains(&self, v: &[(u32, F)]) -> bool {
        self.reduce_head(v.to_vec()).is_empty()
    }

    /// Inserts `v`; returns `true` if the rank grew.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        let v = self.reduce_head(v);
        self.push_reduced(v)
    }

    /// Inserts `v` and returns the new (normalized) row if the rank grew.
    pub fn insert_get(&mut self, v: SparseVec<F>) -> Option<&SparseVec<F>> {
        let v = self.reduce_head(v);
        if self.push_reduced(v) {
            self.rows.last()
        } else {
            None
        }
    }

    fn push_reduced(&mut self, v: SparseVec<F>) -> bool {
        match v.last() {
            None => false,
            Some((lead, c)) => {
                let lead = *lead;
                let v = if c.is_one() { v } else { scale(&v, &c.inv()) };
                self.pivot_row.insert(lead, self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }

    /// Reduced row echelon form, rows sorted by increasing pivot.
    pub fn into_reduced_rows(self) -> Vec<SparseVec<F>> {
        let mut by_pivot: Vec<(u32, SparseVec<F>)> = self
            .rows
            .into_iter()
            .map(|r| (leading(&r).unwrap(), r))
            .collect();
        by_pivot.sort_by_key(|(p, _)| *p);
        let mut done: Echelon<F> = Echelon::new();
        for (_, row) in by_pivot {
            // Every entry below the lead has a smaller index, and all smaller
            // pivots are already canonical, so one reduction pass suffices.
            let lead = row.last().unwrap().clone();
            let mut r = done.reduce(&row[..row.len() - 1]);
            r.push(lead);
            done.pivot_row.insert(r.last().unwrap().0, done.rows.len());
            done.rows.push(r);
        }
        done.rows
    }

    /// Basis of the linear functionals on `K^ncols` vanishing on the row
    /// space, one per non-pivot index `c < ncols`, each normalized to take the
    /// value one at `c` and zero on the other non-pivot indices.
    pub fn annihilator(&self, ncols: u32) -> Vec<SparseVec<F>> {
        let free: Vec<u32> = (0..ncols).filter(|i| !self.is_pivot(*i)).collect();
        // Process rows by increasing pivot: every other entry of a row has a
        // smaller index, so its value is known when the row is reached.
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| leading(&self.rows[r]).unwrap());
        free.iter()
            .map(|&c| {
                let mut val: BTreeMap<u32, F> = BTreeMap::new();
                val.insert(c, F::one());
                for &r in &order {
                    let row = &self.rows[r];
                    let (p, _) = row.last().unwrap();
                    let mut s = F::zero();
                    for (j, x) in &row[..row.len() - 1] {
                        if let Some(y) = val.get(j) {
                            s = s.add(&x.mul(y));
                        }
                    }
                    if !s.is_zero() {
                        val.insert(*p, s.neg());
                    }
                }
                val.into_iter().collect()
            })
            .collect()
    }
}

/// Incremental kernel computation for a linear map given column by column.
///
/// Each processed column either extends the echelon form of the image or
/// produces a kernel vector expressed in column ids.
#[derive(Debug)]
pub struct KernelBuilder<F> {
    image: Echelon<F>,
    combos: Vec<SparseVec<F>>,
    kernel: Vec<SparseVec<F>>,
}

impl<F: Field> Default for KernelBuilder<F> {
    fn default() -> Self {
        KernelBuilder { image: Echelon::new(), combos: Vec::new(), kernel: Vec::new() }
    }
}

impl<F: Field> KernelBuilder<F> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds column `id` with image `img`.
    pub fn push_column(&mut self, id: u32, img: SparseVec<F>) {
        let mut img = img;
        let mut combo: SparseVec<F> = vec![(id, F::one())];
        while let Some(lead) = leading(&img) {
            match self.image.pivot_row.get(&lead) {
                Some(&r) => {
                    let c = img.last().unwrap().1.neg();
                    img = axpy(&img, &c, &self.image.rows[r]);
                    combo = axpy(&combo, &c, &self.combos[r]);
                }
                None => break,
            }
        }
        match img.last() {
            None => self.kernel.push(combo),
            Some((lead, c)) => {
                let inv = c.inv();
                let lead = *lead;
                self.image.pivot_row.insert(lead, self.image.rows.len());
                self.image.rows.push(scale(&img, &inv));
                self.combos.push(scale(&combo, &inv));
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.image.rank()
    }

    pub fn into_kernel(self) -> Vec<SparseVec<F>> {
        self.kernel
    }
}

/// Kernel of the map sending column `j` to `columns[j]`.
pub fn kernel<F: Field>(columns: &[SparseVec<F>]) -> Vec<SparseVec<F>> {
    let mut kb = KernelBuilder::new();
    for (j, c) in columns.iter().enumerate() {
        kb.push_column(j as u32, c.clone());
    }
    kb.into_kernel()
}

/// Rank of the span of `vs`.
pub fn rank<F: Field>(vs: impl IntoIterator<Item = SparseVec<F>>) -> usize {
    Echelon::from_vectors(vs).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rat};

    fn v(entries: &[(u32, i64)]) -> SparseVec<Rat> {
        collect_sparse(entries.iter().map(|(i, c)| (*i, Rat::from_int(*c))))
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[(0, 1), (2, 1)])));
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(v(&[(0, 2), (1, -3), (2, -1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(0, 1), (1, -1)])));
        assert!(!e.contains(&v(&[(0, 1)])));
    }

    #[test]
    fn reduced_rows_are_canonical() {
        let a = Echelon::from_vectors([v(&[(0, 1), (2, 1)]), v(&[(1, 1), (2, 1)])]);
        let b = Echelon::from_vectors([v(&[(0, 1), (1, -1)]), v(&[(0, 3), (1, 2), (2, 5)])]);
        assert_eq!(a.into_reduced_rows(), b.into_reduced_rows());
    }

    #[test]
    fn annihilator_vanishes_on_rows() {
        let e = Echelon::from_vectors([v(&[(0, 1), (3, 2)]), v(&[(1, 1), (2, 1), (3, 1)])]);
        let ann = e.annihilator(4);
        assert_eq!(ann.len(), 2);
        for f in &ann {
            for r in e.rows() {
                let mut s = Rat::zero();
                for (i, x) in r {
                    if let Some((_, y)) = f.iter().find(|(j, _)| j == i) {
                        s = s.add(&x.mul(y));
                    }
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn collect_sparse_merges_and_drops_zeros() {
        let v = collect_sparse(vec![(3, rat(1, 2)), (1, Rat::one()), (3, rat(-1, 2)), (1, Rat::one()), (0, Rat::zero())]);
        assert_eq!(v, vec![(1, Rat::from_int(2))]);
    }

    #[test]
    fn kernel_of_small_map() {
        // columns: e0 -> (1,0), e1 -> (0,1), e2 -> (1,1)
        let cols = vec![v(&[(0, 1)]), v(&[(1, 1)]), v(&[(0, 1), (1, 1)])];
        let k = kernel(&cols);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![(0, rat(-1, 1)), (1, rat(-1, 1)), (2, Rat::one())]);
    }
}
