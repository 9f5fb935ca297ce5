//! Polynomials over the rationals and the contraction action of the ring
//! `R = K[x_1..x_h]` on the dual space `S = K[y_1..y_h]`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::linalg::{self, Echelon, SparseVec};

/// Which family of variables a polynomial lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// Ring elements, variables `x1..xh`.
    Ring,
    /// Dual generators, variables `y1..yh`.
    Dual,
}

impl Space {
    pub fn letter(self) -> char {
        match self {
            Space::Ring => 'x',
            Space::Dual => 'y',
        }
    }
}

/// Exponent vector.
///
/// Ordered by total degree first; within a degree, monomials with more weight
/// on earlier variables come first (`x1 < x2 < x3`, `x1^2 < x1*x2 < x2^2`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn new(exponents: Vec<u8>) -> Monomial {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Same exponents padded with zeros to `nvars` variables.
    pub fn extend(&self, nvars: usize) -> Monomial {
        let mut e = self.0.clone();
        e.resize(nvars, 0);
        Monomial(e)
    }

    /// All monomials of exactly degree `d` in `nvars` variables, ascending.
    pub fn of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
        fn rec(nvars: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Monomial>) {
            if cur.len() + 1 == nvars {
                cur.push(left as u8);
                out.push(Monomial(cur.clone()));
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e as u8);
                rec(nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse polynomial with exact rational coefficients. No stored coefficient
/// is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    space: Space,
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(space: Space, nvars: usize) -> Polynomial {
        Polynomial { space, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(space: Space, nvars: usize, c: Rat) -> Polynomial {
        Polynomial::term(space, c, Monomial::one(nvars))
    }

    pub fn term(space: Space, c: Rat, m: Monomial) -> Polynomial {
        let mut p = Polynomial::zero(space, m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable with 0-based index `i`.
    pub fn var(space: Space, nvars: usize, i: usize) -> Polynomial {
        Polynomial::term(space, Rat::one(), Monomial::var(nvars, i))
    }

    pub fn from_terms(space: Space, nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Polynomial {
        let mut p = Polynomial::zero(space, nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = x.add(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Degree of the polynomial; `-1` for zero.
    pub fn degree(&self) -> i32 {
        self.terms.keys().next_back().map_or(-1, |m| m.degree() as i32)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c);
        }
        Ok(p)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(&Rat::one().neg()))
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut p = Polynomial::zero(self.space, self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                p.add_term(m.mul(n), &c.mul(d));
            }
        }
        Ok(p)
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.space, self.nvars);
        }
        Polynomial {
            space: self.space,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            space: self.space,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(n, x)| (n.mul(m), x.clone())).collect(),
        }
    }

    /// The homogeneous component of top degree.
    pub fn leading_form(&self) -> Result<Polynomial> {
        let d = self.degree();
        if d < 0 {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.homogeneous_part(d as usize))
    }

    pub fn homogeneous_part(&self, d: usize) -> Polynomial {
        Polynomial {
            space: self.space,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms of degree `<= d`.
    pub fn truncate(&self, d: usize) -> Polynomial {
        Polynomial {
            space: self.space,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The same polynomial viewed in `nvars >= self.nvars()` variables.
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        Polynomial {
            space: self.space,
            nvars,
            terms: self.terms.iter().map(|(m, c)| (m.extend(nvars), c.clone())).collect(),
        }
    }

    /// Indices of variables that occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Same coefficients with the variable family relabelled.
    pub fn with_space(&self, space: Space) -> Polynomial {
        Polynomial { space, ..self.clone() }
    }

    /// Partial derivative with respect to the 0-based variable `i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.space, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut n = m.clone();
                n.0[i] -= 1;
                p.add_term(n, &c.mul(&Rat::from_int(e as i64)));
            }
        }
        p
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_poly(self))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

fn falling(b: u8, a: u8) -> i64 {
    // b! / (b-a)!
    ((b - a + 1)..=b).map(|k| k as i64).product()
}

/// `x^a` applied to `y^b` by differentiation: `b!/(b-a)! y^(b-a)` when `a <= b`.
pub fn contract_monomial(a: &Monomial, b: &Monomial) -> Option<(Monomial, i64)> {
    if !a.divides(b) {
        return None;
    }
    let mut c = 1i64;
    let mut e = Vec::with_capacity(b.nvars());
    for (&ai, &bi) in a.0.iter().zip(&b.0) {
        c *= falling(bi, ai);
        e.push(bi - ai);
    }
    Some((Monomial(e), c))
}

/// The contraction `f ∘ F = f(∂/∂y_1, …, ∂/∂y_h)(F)`.
pub fn derivative_action(f: &Polynomial, big_f: &Polynomial) -> Result<Polynomial> {
    if f.space != Space::Ring || big_f.space != Space::Dual {
        return Err(Error::SpaceMismatch);
    }
    if f.nvars != big_f.nvars {
        return Err(Error::ArityMismatch { left: f.nvars, right: big_f.nvars });
    }
    let mut out = Polynomial::zero(Space::Dual, f.nvars);
    for (a, c) in &f.terms {
        for (b, d) in &big_f.terms {
            if let Some((m, k)) = contract_monomial(a, b) {
                out.add_term(m, &c.mul(d).mul(&Rat::from_int(k)));
            }
        }
    }
    Ok(out)
}

/// Bijection between monomials of degree `<= max_degree` and column indices,
/// in increasing monomial order (index 0 is the constant monomial).
#[derive(Debug)]
pub struct MonomialIndex {
    nvars: usize,
    max_degree: usize,
    list: Vec<Monomial>,
    map: HashMap<Monomial, u32>,
    degree_start: Vec<usize>,
}

impl MonomialIndex {
    pub fn new(nvars: usize, max_degree: usize) -> MonomialIndex {
        let mut list = Vec::new();
        let mut degree_start = Vec::new();
        for d in 0..=max_degree {
            degree_start.push(list.len());
            list.extend(Monomial::of_degree(nvars, d));
        }
        degree_start.push(list.len());
        let map = list.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        MonomialIndex { nvars, max_degree, list, map, degree_start }
    }

    /// Shared index, cached per `(nvars, max_degree)`.
    pub fn shared(nvars: usize, max_degree: usize) -> Arc<MonomialIndex> {
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonomialIndex>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("monomial index cache poisoned");
        guard
            .entry((nvars, max_degree))
            .or_insert_with(|| Arc::new(MonomialIndex::new(nvars, max_degree)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn monomial(&self, i: u32) -> &Monomial {
        &self.list[i as usize]
    }

    pub fn index(&self, m: &Monomial) -> Option<u32> {
        self.map.get(m).copied()
    }

    /// Index range of the monomials of exactly degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<u32> {
        self.degree_start[d] as u32..self.degree_start[d + 1] as u32
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.list
    }

    /// Coefficient vector of `p`; `None` if `p` has degree above the bound.
    pub fn to_vec(&self, p: &Polynomial) -> Option<SparseVec<Rat>> {
        let mut v = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            v.push((self.index(m)?, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Some(v)
    }

    pub fn to_poly(&self, space: Space, v: &[(u32, Rat)]) -> Polynomial {
        Polynomial::from_terms(space, self.nvars, v.iter().map(|(i, c)| (self.monomial(*i).clone(), c.clone())))
    }
}

/// A subspace of the polynomials of degree `<= max_degree` in reduced row
/// echelon form over the increasing monomial order. Two subspaces are equal
/// exactly when their representations are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    nvars: usize,
    max_degree: usize,
    rows: Vec<SparseVec<Rat>>,
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubspaceBasis")
            .field("nvars", &self.nvars)
            .field("max_degree", &self.max_degree)
            .field("dim", &self.rows.len())
            .finish()
    }
}

impl SubspaceBasis {
    pub fn zero(nvars: usize, max_degree: usize) -> SubspaceBasis {
        SubspaceBasis { nvars, max_degree, rows: Vec::new() }
    }

    pub fn from_echelon(nvars: usize, max_degree: usize, e: Echelon<Rat>) -> SubspaceBasis {
        SubspaceBasis { nvars, max_degree, rows: e.into_reduced_rows() }
    }

    /// Span of the given polynomials (all of degree `<= max_degree`).
    pub fn span(nvars: usize, max_degree: usize, polys: &[Polynomial]) -> Result<SubspaceBasis> {
        let idx = MonomialIndex::shared(nvars, max_degree);
        let mut e = Echelon::new();
        for p in polys {
            if p.nvars() != nvars {
                return Err(Error::ArityMismatch { left: nvars, right: p.nvars() });
            }
            let v = idx.to_vec(p).ok_or(Error::DegreeBound { degree: p.degree(), bound: max_degree })?;
            e.insert(v);
        }
        Ok(SubspaceBasis::from_echelon(nvars, max_degree, e))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Dimension of the ambient space of polynomials of degree `<= max_degree`.
    pub fn ambient_dim(&self) -> usize {
        MonomialIndex::shared(self.nvars, self.max_degree).len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn rows(&self) -> &[SparseVec<Rat>] {
        &self.rows
    }

    pub fn index(&self) -> Arc<MonomialIndex> {
        MonomialIndex::shared(self.nvars, self.max_degree)
    }

    /// Basis elements as ring polynomials.
    pub fn basis_polys(&self, space: Space) -> Vec<Polynomial> {
        let idx = self.index();
        self.rows.iter().map(|r| idx.to_poly(space, r)).collect()
    }

    pub fn echelon(&self) -> Echelon<Rat> {
        Echelon::from_vectors(self.rows.iter().cloned())
    }

    /// Leading monomial indices of the basis (the pivots).
    pub fn pivots(&self) -> Vec<u32> {
        self.rows.iter().map(|r| linalg::leading(r).unwrap()).collect()
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        match self.index().to_vec(p) {
            Some(v) => self.echelon().contains(&v),
            None => false,
        }
    }

    fn check_comparable(&self, other: &SubspaceBasis) -> Result<()> {
        if self.nvars != other.nvars || self.max_degree != other.max_degree {
            return Err(Error::Incomparable {
                left: (self.nvars, self.max_degree),
                right: (other.nvars, other.max_degree),
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_comparable(other)?;
        let e = Echelon::from_vectors(self.rows.iter().chain(&other.rows).cloned());
        Ok(SubspaceBasis::from_echelon(self.nvars, self.max_degree, e))
    }

    /// Canonical basis of the annihilating functionals.
    pub fn annihilator(&self) -> Vec<SparseVec<Rat>> {
        let n = self.ambient_dim() as u32;
        let ann = self.echelon().annihilator(n);
        Echelon::from_vectors(ann).into_reduced_rows()
    }

    /// Subspace cut out by the given functionals.
    pub fn from_annihilator(nvars: usize, max_degree: usize, functionals: &[SparseVec<Rat>]) -> SubspaceBasis {
        let n = MonomialIndex::shared(nvars, max_degree).len() as u32;
        let e = Echelon::from_vectors(functionals.iter().cloned());
        let rows = e.annihilator(n);
        SubspaceBasis::from_echelon(nvars, max_degree, Echelon::from_vectors(rows))
    }

    pub fn intersection(&self, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check_comparable(other)?;
        let mut f = self.annihilator();
        f.extend(other.annihilator());
        Ok(SubspaceBasis::from_annihilator(self.nvars, self.max_degree, &f))
    }

    /// Elements of exact degree `d` (valid for subspaces spanned by
    /// homogeneous elements, whose reduced rows are homogeneous).
    pub fn homogeneous_rows(&self, d: usize) -> Vec<SparseVec<Rat>> {
        let r = self.index().degree_range(d);
        self.rows
            .iter()
            .filter(|row| r.contains(&linalg::leading(row).unwrap()))
            .cloned()
            .collect()
    }

    pub fn is_homogeneous_subspace(&self) -> bool {
        let idx = self.index();
        self.rows.iter().all(|row| {
            let d = idx.monomial(row[0].0).degree();
            row.iter().all(|(i, _)| idx.monomial(*i).degree() == d)
        })
    }

    /// Same subspace inside a larger truncation.
    pub fn raise_degree(&self, max_degree: usize) -> SubspaceBasis {
        assert!(max_degree >= self.max_degree);
        let from = self.index();
        let to = MonomialIndex::shared(self.nvars, max_degree);
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|(i, c)| (to.index(from.monomial(*i)).unwrap(), c.clone())).collect())
            .collect();
        // Indices of lower-degree monomials coincide, so the form stays reduced.
        SubspaceBasis { nvars: self.nvars, max_degree, rows }
    }
}

pub fn subspace_equal(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<bool> {
    a.check_comparable(b)?;
    Ok(a.rows == b.rows)
}

/// Echelon form of the span of all `m * g` with `m` a monomial and
/// `deg(m * g) <= max_degree`.
pub fn ideal_echelon(nvars: usize, max_degree: usize, generators: &[Polynomial]) -> Result<Echelon<Rat>> {
    let idx = MonomialIndex::shared(nvars, max_degree);
    let mut e = Echelon::new();
    // Monomial generators first: their multiples clear whole columns cheaply.
    let mut order: Vec<&Polynomial> = generators.iter().collect();
    order.sort_by_key(|g| g.num_terms() > 1);
    for g in order {
        if g.nvars() != nvars {
            return Err(Error::ArityMismatch { left: nvars, right: g.nvars() });
        }
        if g.is_zero() {
            continue;
        }
        let gd = g.degree() as usize;
        if gd > max_degree {
            return Err(Error::DegreeBound { degree: g.degree(), bound: max_degree });
        }
        let gv: Vec<(u32, Rat)> = idx.to_vec(g).unwrap();
        for m in &idx.monomials()[..idx.degree_range(max_degree - gd).end as usize] {
            let v: SparseVec<Rat> = gv
                .iter()
                .map(|(i, c)| (idx.index(&idx.monomial(*i).mul(m)).unwrap(), c.clone()))
                .collect();
            let v = linalg::collect_sparse(v);
            e.insert(v);
        }
    }
    Ok(e)
}

/// The ideal generated by `generators`, truncated at degree `max_degree`.
pub fn span_to_degree(nvars: usize, max_degree: usize, generators: &[Polynomial]) -> Result<SubspaceBasis> {
    let e = ideal_echelon(nvars, max_degree, generators)?;
    Ok(SubspaceBasis::from_echelon(nvars, max_degree, e))
}

/// Image of the ideal generated by `generators` in `R / 𝔫^{D+1}`, as the
/// span of the products `m * g` with all terms of degree above `D` dropped.
///
/// For an ideal containing `𝔫^{D+1}` this is exactly its part of degree
/// `<= D`; it only sees the local structure at the origin.
pub fn ideal_truncation(nvars: usize, max_degree: usize, generators: &[Polynomial]) -> Result<SubspaceBasis> {
    let idx = MonomialIndex::shared(nvars, max_degree);
    let mut e = Echelon::new();
    for g in generators {
        if g.nvars() != nvars {
            return Err(Error::ArityMismatch { left: nvars, right: g.nvars() });
        }
        let low = g.truncate(max_degree);
        if low.is_zero() {
            continue;
        }
        let ord = low.terms().next().unwrap().0.degree();
        for m in &idx.monomials()[..idx.degree_range(max_degree - ord).end as usize] {
            let p = g.mul_monomial(m).truncate(max_degree);
            e.insert(idx.to_vec(&p).unwrap());
        }
    }
    Ok(SubspaceBasis::from_echelon(nvars, max_degree, e))
}

/// Elements of degree `<= d` of the ideal generated by `generators`, as far
/// as they are visible among the combinations of products of degree
/// `<= top` (`top >= d`). As `top` grows this increases to the exact affine
/// section `I ∩ P_{<=d}`.
pub fn affine_section(nvars: usize, d: usize, top: usize, generators: &[Polynomial]) -> Result<SubspaceBasis> {
    let e = ideal_echelon(nvars, top, generators)?;
    Ok(section_of_echelon(nvars, d, top, &e))
}

/// Rows of `e` (built over degree `<= top`) whose leading monomial has
/// degree `<= d`; with a degree-compatible order these span the part of the
/// row space of degree `<= d`.
pub fn section_of_echelon(nvars: usize, d: usize, top: usize, e: &Echelon<Rat>) -> SubspaceBasis {
    let from = MonomialIndex::shared(nvars, top);
    let to = MonomialIndex::shared(nvars, d);
    let bound = from.degree_range(d).end;
    let rows = e
        .rows()
        .iter()
        .filter(|r| linalg::leading(r).unwrap() < bound)
        .map(|r| r.iter().map(|(i, c)| (to.index(from.monomial(*i)).unwrap(), c.clone())).collect::<SparseVec<Rat>>());
    SubspaceBasis::from_echelon(nvars, d, Echelon::from_vectors(rows))
}

/// Minimal homogeneous generators of an ideal given by a homogeneous
/// truncated subspace (degree by degree, complement of `𝔫 · I_{d-1}` in `I_d`).
pub fn homogeneous_generators(ideal: &SubspaceBasis) -> Vec<Polynomial> {
    let idx = ideal.index();
    let mut gens = Vec::new();
    let mut prev: Vec<SparseVec<Rat>> = Vec::new();
    for d in 0..=ideal.max_degree() {
        let mut e = Echelon::new();
        for row in &prev {
            for i in 0..ideal.nvars() {
                let x = Monomial::var(ideal.nvars(), i);
                let v: Vec<(u32, Rat)> = row
                    .iter()
                    .map(|(j, c)| (idx.index(&idx.monomial(*j).mul(&x)).unwrap(), c.clone()))
                    .collect();
                e.insert(linalg::collect_sparse::<Rat>(v));
            }
        }
        let cur = ideal.homogeneous_rows(d);
        for row in &cur {
            if e.insert(row.clone()) {
                gens.push(idx.to_poly(Space::Ring, row));
            }
        }
        prev = cur;
    }
    gens
}
