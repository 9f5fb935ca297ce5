//! Annihilator ideals of dual generators and the finite-dimensional local
//! algebras they define.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::linalg::{self, Echelon, KernelBuilder, SparseVec};
use crate::ring::{contract_monomial, Monomial, MonomialIndex, Polynomial, Space, SubspaceBasis};

/// An element of a [`LocalAlgebra`] in its monomial basis.
pub type Element = SparseVec<Rat>;

/// Multidegree of a basis element: a weight and a mask of independent
/// parities. The ungraded case maps everything to `(0, 0)`.
pub type Degree = (u32, u32);

pub fn add_degrees(a: Degree, b: Degree) -> Degree {
    (a.0 + b.0, a.1 ^ b.1)
}

/// The truncation at degree `D` of `Ann(F) = { g : g ∘ F = 0 }`.
#[derive(Clone, Debug)]
pub struct AnnihilatorIdeal {
    pub basis: SubspaceBasis,
    pub source: Option<Polynomial>,
}

impl AnnihilatorIdeal {
    pub fn nvars(&self) -> usize {
        self.basis.nvars()
    }

    pub fn truncation(&self) -> usize {
        self.basis.max_degree()
    }

    pub fn contains(&self, g: &Polynomial) -> bool {
        self.basis.contains(g)
    }

    /// Colength of the ideal inside the truncated ring.
    pub fn quotient_dim(&self) -> usize {
        self.basis.codim()
    }
}

fn contraction_image(m: &Monomial, f: &Polynomial, dual: &MonomialIndex) -> SparseVec<Rat> {
    linalg::collect_sparse(f.terms().filter_map(|(b, c)| {
        contract_monomial(m, b).map(|(r, k)| (dual.index(&r).unwrap(), c.mul(&Rat::from_int(k))))
    }))
}

fn check_dual(f: &Polynomial) -> Result<()> {
    if f.space() != Space::Dual {
        return Err(Error::SpaceMismatch);
    }
    if f.is_zero() {
        return Err(Error::precondition("zero dual generator"));
    }
    Ok(())
}

/// `Ann(F)` truncated at `D = deg F + 1`, where it contains every monomial
/// of degree `D`.
pub fn annihilator(f: &Polynomial) -> Result<AnnihilatorIdeal> {
    check_dual(f)?;
    let s = f.degree() as usize;
    let h = f.nvars();
    let idx = MonomialIndex::shared(h, s + 1);
    let dual = MonomialIndex::shared(h, s);
    let mut kb = KernelBuilder::new();
    for (i, m) in idx.monomials().iter().enumerate() {
        kb.push_column(i as u32, contraction_image(m, f, &dual));
    }
    let e = Echelon::from_vectors(kb.into_kernel());
    Ok(AnnihilatorIdeal {
        basis: SubspaceBasis::from_echelon(h, s + 1, e),
        source: Some(f.clone()),
    })
}

/// A grading of the polynomial ring by a weight per variable and a parity
/// bit per variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub weights: Vec<u32>,
    pub parities: Vec<u32>,
}

impl Grading {
    pub fn trivial(nvars: usize) -> Grading {
        Grading { weights: vec![0; nvars], parities: vec![0; nvars] }
    }

    /// The standard grading by total degree.
    pub fn standard(nvars: usize) -> Grading {
        Grading { weights: vec![1; nvars], parities: vec![0; nvars] }
    }

    pub fn is_trivial(&self) -> bool {
        self.weights.iter().chain(&self.parities).all(|&w| w == 0)
    }

    pub fn degree(&self, m: &Monomial) -> Degree {
        let mut d = (0, 0);
        for (i, &e) in m.exponents().iter().enumerate() {
            d.0 += self.weights[i] * e as u32;
            if e % 2 == 1 {
                d.1 ^= self.parities[i];
            }
        }
        d
    }

    fn is_homogeneous_for(&self, f: &Polynomial) -> bool {
        let mut ds = f.terms().map(|(m, _)| self.degree(m));
        match ds.next() {
            None => true,
            Some(d) => ds.all(|e| e == d),
        }
    }

    /// A grading for which `f` is homogeneous, so that `Ann(f)` and the
    /// algebra it defines are graded.
    ///
    /// Weights: total degree if `f` is a form; `2` on the variables of the
    /// leading form and `s` on a disjoint quadratic tail if `f` has that
    /// shape; trivial otherwise. Parities: one bit for each variable that only
    /// occurs with even exponents (at most 32 of them).
    pub fn for_dual(f: &Polynomial) -> Grading {
        let h = f.nvars();
        let mut weights = vec![0; h];
        if f.is_homogeneous() {
            weights = vec![1; h];
        } else if let Ok(lead) = f.leading_form() {
            let tail = f.sub(&lead).unwrap();
            let lv = lead.support_vars();
            let tv = tail.support_vars();
            if tail.degree() == 2 && tail.is_homogeneous() && lv.iter().all(|i| !tv.contains(i)) {
                let s = lead.degree() as u32;
                weights = vec![1; h];
                for &i in &lv {
                    weights[i] = 2;
                }
                for &i in &tv {
                    weights[i] = s;
                }
            }
        }
        let mut parities = vec![0; h];
        let mut bit = 0;
        for i in 0..h {
            let even = f.terms().all(|(m, _)| m.exponents()[i] % 2 == 0);
            if even && bit < 32 {
                parities[i] = 1 << bit;
                bit += 1;
            }
        }
        let g = Grading { weights, parities };
        if g.is_homogeneous_for(f) {
            g
        } else {
            Grading { weights: vec![0; h], ..g }
        }
    }
}

/// A finite-dimensional local algebra with a monomial basis (the constant
/// first) and an exact multiplication table.
#[derive(Clone, Debug)]
pub struct LocalAlgebra {
    nvars: usize,
    labels: Vec<Monomial>,
    table: Vec<Element>,
    grading: Option<Grading>,
    degrees: Vec<Degree>,
    mgens: Vec<usize>,
    hf: Vec<usize>,
}

impl LocalAlgebra {
    fn from_parts(nvars: usize, labels: Vec<Monomial>, table: Vec<Element>) -> LocalAlgebra {
        let d = labels.len();
        let mut a = LocalAlgebra {
            nvars,
            labels,
            table,
            grading: None,
            degrees: vec![(0, 0); d],
            mgens: Vec::new(),
            hf: Vec::new(),
        };
        a.mgens = a.compute_mgens();
        a.hf = a.compute_hf();
        a
    }

    /// The quotient of the polynomial ring by an ideal given through its
    /// truncation at degree `D`, which must contain every monomial of degree
    /// `D` (so the quotient is the same for every larger truncation).
    pub fn from_ideal(ideal: &SubspaceBasis) -> Result<LocalAlgebra> {
        let h = ideal.nvars();
        let dmax = ideal.max_degree();
        let idx = ideal.index();
        let e = ideal.echelon();
        for i in idx.degree_range(dmax) {
            if !e.contains(&[(i, Rat::one())]) {
                return Err(Error::precondition(format!(
                    "ideal truncated at degree {dmax} does not contain all monomials of that degree"
                )));
            }
        }
        if e.is_pivot(0) {
            return Err(Error::precondition("the ideal is the whole ring"));
        }
        let std: Vec<u32> = (0..idx.len() as u32).filter(|i| !e.is_pivot(*i)).collect();
        let mut pos = vec![u32::MAX; idx.len()];
        for (k, &i) in std.iter().enumerate() {
            pos[i as usize] = k as u32;
        }
        let labels: Vec<Monomial> = std.iter().map(|&i| idx.monomial(i).clone()).collect();
        let d = labels.len();
        let mut table = Vec::with_capacity(d * d);
        for a in &labels {
            for b in &labels {
                let p = a.mul(b);
                if p.degree() >= dmax {
                    table.push(Vec::new());
                    continue;
                }
                let r = e.reduce(&[(idx.index(&p).unwrap(), Rat::one())]);
                table.push(r.into_iter().map(|(i, c)| (pos[i as usize], c)).collect());
            }
        }
        Ok(LocalAlgebra::from_parts(h, labels, table))
    }

    /// Same algebra graded by `g`, provided every product in the table is
    /// homogeneous of the expected degree; otherwise the algebra is returned
    /// ungraded.
    pub fn with_grading(mut self, g: Grading) -> LocalAlgebra {
        let degrees: Vec<Degree> = self.labels.iter().map(|m| g.degree(m)).collect();
        let d = self.dim();
        let ok = (0..d).all(|i| {
            (0..d).all(|j| {
                let want = add_degrees(degrees[i], degrees[j]);
                self.table[i * d + j].iter().all(|(k, _)| degrees[*k as usize] == want)
            })
        });
        if ok && !g.is_trivial() {
            self.degrees = degrees;
            self.grading = Some(g);
        } else {
            self.degrees = vec![(0, 0); d];
            self.grading = None;
        }
        self
    }

    pub fn ungraded(mut self) -> LocalAlgebra {
        self.degrees = vec![(0, 0); self.dim()];
        self.grading = None;
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Monomial] {
        &self.labels
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    /// Product of basis elements `i` and `j`.
    pub fn product(&self, i: usize, j: usize) -> &Element {
        &self.table[i * self.dim() + j]
    }

    /// Basis indices whose classes form a basis of `𝔪/𝔪²`.
    pub fn max_ideal_generators(&self) -> &[usize] {
        &self.mgens
    }

    pub fn embedding_dim(&self) -> usize {
        self.mgens.len()
    }

    /// Basis indices of the maximal ideal (every basis element but `1`).
    pub fn max_ideal_basis(&self) -> std::ops::Range<usize> {
        1..self.dim()
    }

    pub fn socle_degree(&self) -> usize {
        self.hf.len() - 1
    }

    pub fn one(&self) -> Element {
        vec![(0, Rat::one())]
    }

    pub fn basis_element(&self, i: usize) -> Element {
        vec![(i as u32, Rat::one())]
    }

    /// `e_i * v`.
    pub fn mul_basis(&self, i: usize, v: &[(u32, Rat)]) -> Element {
        let d = self.dim();
        let mut acc = Vec::new();
        for (j, c) in v {
            for (k, x) in &self.table[i * d + *j as usize] {
                acc.push((*k, c.mul(x)));
            }
        }
        linalg::collect_sparse(acc)
    }

    pub fn mul(&self, u: &[(u32, Rat)], v: &[(u32, Rat)]) -> Element {
        let mut acc = Vec::new();
        for (i, c) in u {
            for (k, x) in self.mul_basis(*i as usize, v) {
                acc.push((k, c.mul(&x)));
            }
        }
        linalg::collect_sparse(acc)
    }

    /// Element written as a polynomial in its basis monomials.
    pub fn to_poly(&self, v: &[(u32, Rat)]) -> Polynomial {
        Polynomial::from_terms(Space::Ring, self.nvars, v.iter().map(|(i, c)| (self.labels[*i as usize].clone(), c.clone())))
    }

    fn compute_mgens(&self) -> Vec<usize> {
        let d = self.dim();
        let mut m2 = Echelon::new();
        for i in 1..d {
            for j in i..d {
                m2.insert(self.product(i, j).clone());
            }
        }
        (1..d).filter(|&i| m2.insert(self.basis_element(i))).collect()
    }

    /// Dimensions of `𝔪^k / 𝔪^{k+1}` for `k = 0..=s`.
    fn compute_hf(&self) -> Vec<usize> {
        let d = self.dim();
        let mut dims = vec![d];
        let mut power: Vec<Element> = (1..d).map(|i| self.basis_element(i)).collect();
        while !power.is_empty() {
            dims.push(power.len());
            let mut next = Echelon::new();
            for v in &power {
                for &x in &self.mgens {
                    next.insert(self.mul_basis(x, v));
                }
            }
            power = next.rows().to_vec();
        }
        dims.push(0);
        dims.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// Basis (reduced echelon rows) of the socle `(0 : 𝔪)`.
    pub fn socle(&self) -> Vec<Element> {
        let d = self.dim() as u32;
        let mut kb = KernelBuilder::new();
        for j in 0..self.dim() {
            let mut img = Vec::new();
            for (t, &x) in self.mgens.iter().enumerate() {
                for (k, c) in self.product(x, j) {
                    img.push((t as u32 * d + k, c.clone()));
                }
            }
            kb.push_column(j as u32, linalg::collect_sparse(img));
        }
        Echelon::from_vectors(kb.into_kernel()).into_reduced_rows()
    }

    pub fn is_gorenstein(&self) -> bool {
        self.socle().len() == 1
    }

    /// `A / (elements)`. Every element must lie in the maximal ideal.
    pub fn quotient_by(&self, elements: &[Element]) -> Result<LocalAlgebra> {
        let d = self.dim();
        for g in elements {
            if g.iter().any(|(i, c)| *i == 0 && !c.is_zero()) {
                return Err(Error::OutsideMaximalIdeal);
            }
        }
        let mut ideal = Echelon::new();
        for g in elements {
            for a in 0..d {
                ideal.insert(self.mul_basis(a, g));
            }
        }
        let keep: Vec<usize> = (0..d).filter(|&i| !ideal.is_pivot(i as u32)).collect();
        let mut pos = vec![u32::MAX; d];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k as u32;
        }
        let mut table = Vec::with_capacity(keep.len() * keep.len());
        for &i in &keep {
            for &j in &keep {
                let r = ideal.reduce(self.product(i, j));
                table.push(r.into_iter().map(|(k, c)| (pos[k as usize], c)).collect());
            }
        }
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let q = LocalAlgebra::from_parts(self.nvars, labels, table);
        let homogeneous = elements.iter().all(|g| g.windows(2).all(|w| self.degrees[w[0].0 as usize] == self.degrees[w[1].0 as usize]));
        Ok(match (&self.grading, homogeneous) {
            (Some(g), true) => q.with_grading(g.clone()),
            _ => q,
        })
    }
}

/// The Hilbert function `HF(i) = dim 𝔪^i / 𝔪^{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertFunction {
    pub values: Vec<usize>,
}

pub fn hilbert_function(a: &LocalAlgebra) -> HilbertFunction {
    HilbertFunction { values: a.hf.clone() }
}

/// `A_F = R / Ann(F)`, graded whenever `F` is weighted homogeneous.
pub fn algebra_from_dual(f: &Polynomial) -> Result<LocalAlgebra> {
    let ann = annihilator(f)?;
    Ok(LocalAlgebra::from_ideal(&ann.basis)?.with_grading(Grading::for_dual(f)))
}

/// The top subquotient of the associated graded algebra: the algebra of the
/// leading form of `F`.
pub fn q0(f: &Polynomial) -> Result<LocalAlgebra> {
    check_dual(f)?;
    algebra_from_dual(&f.leading_form()?)
}

/// Dimension of the span of the order-`k` partial derivatives of `f`.
pub fn derivative_rank(f: &Polynomial, k: usize) -> usize {
    let dual = MonomialIndex::shared(f.nvars(), f.degree().max(0) as usize);
    linalg::rank(Monomial::of_degree(f.nvars(), k).iter().map(|m| contraction_image(m, f, &dual)))
}

/// Whether the order-`(d-1)` derivatives of the form `f3` of degree `d`
/// span all `n` linear forms.
pub fn is_nondegenerate(f3: &Polynomial, n: usize) -> Result<bool> {
    check_dual(f3)?;
    if !f3.is_homogeneous() {
        return Err(Error::precondition("non-degeneracy is defined for forms"));
    }
    if f3.nvars() != n {
        return Err(Error::ArityMismatch { left: n, right: f3.nvars() });
    }
    let d = f3.degree() as usize;
    if d == 0 {
        return Err(Error::precondition("non-degeneracy needs degree at least 1"));
    }
    Ok(derivative_rank(f3, d - 1) == n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_poly;
    use crate::ring::{derivative_action, span_to_degree, subspace_equal};

    fn y(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Dual, n).unwrap()
    }

    fn x(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Ring, n).unwrap()
    }

    /// Independent oracle: dimension of the span of all iterated partial
    /// derivatives of `f`, computed by repeated differentiation.
    fn derivative_span_dim(f: &Polynomial) -> usize {
        let mut all = vec![f.clone()];
        let mut frontier = vec![f.clone()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for i in 0..f.nvars() {
                    let p = g.partial(i);
                    if !p.is_zero() {
                        next.push(p);
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        let deg = f.degree() as usize;
        SubspaceBasis::span(f.nvars(), deg, &all.iter().map(|p| p.with_space(Space::Ring)).collect::<Vec<_>>())
            .unwrap()
            .dim()
    }

    #[test]
    fn annihilator_examples() {
        let a = annihilator(&y("y1^3", 1)).unwrap();
        assert_eq!(a.basis, span_to_degree(1, 4, &[x("x1^4", 1)]).unwrap());
        assert_eq!(a.quotient_dim(), 4);

        let b = annihilator(&y("y1^2+y2^2", 2)).unwrap();
        let want = span_to_degree(2, 3, &[x("x1*x2", 2), x("x1^2-x2^2", 2)]).unwrap();
        assert!(subspace_equal(&b.basis, &want).unwrap());

        let f = y("y1^3+y2^3+y3^2", 3);
        let c = annihilator(&f).unwrap();
        assert_eq!(c.quotient_dim(), 7);
        assert_eq!(derivative_span_dim(&f), 7);
        for g in c.basis.basis_polys(Space::Ring) {
            assert!(derivative_action(&g, &f).unwrap().is_zero());
        }
        assert!(annihilator(&y("0", 2)).is_err());
    }

    #[test]
    fn annihilator_is_an_ideal_at_truncation() {
        let f = y("y1*y2*y3 + y1^2 - 2*y2^2*y3", 3);
        let a = annihilator(&f).unwrap();
        let polys = a.basis.basis_polys(Space::Ring);
        for g in &polys {
            for i in 0..3 {
                let p = g.mul_monomial(&Monomial::var(3, i));
                if p.degree() <= 4 {
                    assert!(a.contains(&p));
                }
            }
        }
    }

    #[test]
    fn algebra_examples() {
        let a = algebra_from_dual(&y("y1^3", 1)).unwrap();
        assert_eq!(a.labels(), &Monomial::of_degree(1, 0).into_iter().chain((1..4).flat_map(|d| Monomial::of_degree(1, d))).collect::<Vec<_>>()[..]);
        assert_eq!(hilbert_function(&a).values, vec![1, 1, 1, 1]);

        let b = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        assert_eq!(b.dim(), 7);
        assert_eq!(b.socle_degree(), 3);
        assert_eq!(hilbert_function(&b).values, vec![1, 3, 2, 1]);
        assert!(b.grading().is_some());

        let c = algebra_from_dual(&y("y1*y2*y3", 3)).unwrap();
        assert_eq!(c.dim(), 8);
        let printed: Vec<String> = c.labels().iter().map(|m| crate::parser::print_poly(&Polynomial::term(Space::Ring, Rat::one(), m.clone()))).collect();
        assert_eq!(printed, ["1", "x1", "x2", "x3", "x1*x2", "x1*x3", "x2*x3", "x1*x2*x3"]);
        assert_eq!(hilbert_function(&c).values, vec![1, 3, 3, 1]);
    }

    #[test]
    fn multiplication_is_commutative_associative_unital() {
        for f in ["y1^3+y2^3+y3^2", "y1*y2*y3 + y1^2", "y1^2*y2 - y2^3 + y3^2 + y4^2"] {
            let n = if f.contains("y4") { 4 } else { 3 };
            let a = algebra_from_dual(&y(f, n)).unwrap();
            let d = a.dim();
            for i in 0..d {
                assert_eq!(a.product(0, i), &a.basis_element(i));
                for j in 0..d {
                    assert_eq!(a.product(i, j), a.product(j, i));
                    for k in 0..d {
                        let l = a.mul(a.product(i, j), &a.basis_element(k));
                        let r = a.mul(&a.basis_element(i), a.product(j, k));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn q0_examples() {
        let q = q0(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        assert_eq!(q.dim(), 6);
        assert_eq!(hilbert_function(&q).values, vec![1, 2, 2, 1]);
        let f = y("y1^2*y2 + y3^3", 3);
        assert_eq!(q0(&f).unwrap().labels(), algebra_from_dual(&f).unwrap().labels());
        let g = y("y1^2+y2^2", 2);
        assert_eq!(hilbert_function(&q0(&g).unwrap()).values, vec![1, 2, 1]);
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(!is_nondegenerate(&y("y1^3", 2), 2).unwrap());
        assert!(is_nondegenerate(&y("y1^3+y2^3", 2), 2).unwrap());
        assert!(is_nondegenerate(&y("y1^2*y2", 2), 2).unwrap());
        assert!(is_nondegenerate(&y("y1^3+y2", 2), 2).is_err());
    }

    #[test]
    fn socle_examples() {
        let a = algebra_from_dual(&y("y1^3", 1)).unwrap();
        assert_eq!(a.socle(), vec![vec![(3, Rat::one())]]);
        assert!(algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap().is_gorenstein());
        let m2 = LocalAlgebra::from_ideal(&span_to_degree(2, 2, &[x("x1^2", 2), x("x1*x2", 2), x("x2^2", 2)]).unwrap()).unwrap();
        assert_eq!(m2.socle().len(), 2);
        assert!(!m2.is_gorenstein());
    }

    #[test]
    fn quotient_examples() {
        let a = algebra_from_dual(&y("y1^3", 1)).unwrap();
        let q = a.quotient_by(&[a.basis_element(3)]).unwrap();
        assert_eq!(q.dim(), 3);
        assert_eq!(hilbert_function(&q).values, vec![1, 1, 1]);

        let b = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        let soc = b.socle();
        assert_eq!(b.quotient_by(&soc).unwrap().dim(), 6);

        let m2 = LocalAlgebra::from_ideal(&span_to_degree(2, 2, &[x("x1^2", 2), x("x1*x2", 2), x("x2^2", 2)]).unwrap()).unwrap();
        let r = m2.quotient_by(&[m2.basis_element(1)]).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.labels()[1], Monomial::var(2, 1));
        assert_eq!(r.product(1, 1), &Vec::new());
        assert_eq!(a.quotient_by(&[a.one()]).unwrap_err(), Error::OutsideMaximalIdeal);
    }

    #[test]
    fn gradings_are_detected_and_validated() {
        let g = Grading::for_dual(&y("y1^3+y2^3+y3^2", 3));
        assert_eq!(g.weights, vec![2, 2, 3]);
        assert_eq!(g.parities, vec![0, 0, 1]);
        let h = Grading::for_dual(&y("y1^3+y1*y2+y3", 3));
        assert_eq!(h.weights, vec![0, 0, 0]);
        let a = algebra_from_dual(&y("y1^3+y1*y2", 2)).unwrap();
        assert!(a.grading().is_none() || a.grading().unwrap().weights == vec![0, 0]);
    }
}
