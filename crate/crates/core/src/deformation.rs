//! The one-parameter family `J_b` degenerating `K ⊕ A′` to `A`, and the
//! checks that it is flat and splits away from `b = 0`.
//!
//! Away from `b = 0` the fibres are not local, so their ideals do not
//! contain a power of the maximal ideal and no fixed truncation is exact.
//! Quotient dimensions are instead read off the degree-`<= d` part of the
//! ideal computed with a few degrees of slack, and trusted only once they
//! stop changing with `d`.

use std::sync::Arc;

use serde::Serialize;

use crate::apolarity::annihilator;
use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::linalg::{self, Echelon};
use crate::par::Exec;
use crate::ring::{ideal_truncation, subspace_equal, Monomial, MonomialIndex, Polynomial, Space, SubspaceBasis};
use crate::structure::{check_structure_inputs, cubic_annihilator_generators, normal_form, tail_generators};

/// First truncation tried for a fibre.
pub const START_DEGREE: usize = 6;
/// Last truncation tried for a fibre.
pub const MAX_DEGREE: usize = 10;
/// Extra degrees of products used beyond the largest degree inspected.
pub const SLACK: usize = 2;

/// The base points sampled when none are given.
pub fn default_samples() -> Vec<Rat> {
    vec![Rat::zero(), Rat::one(), Rat::from_int(-1), Rat::from_int(2), Rat::new(1, 2)]
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub n: usize,
    pub h: usize,
    pub f3: Polynomial,
    pub sigma: Polynomial,
    pub samples: Vec<Rat>,
}

impl FamilySpec {
    pub fn new(f3: Polynomial, n: usize, h: usize, sigma: Polynomial, samples: Vec<Rat>) -> Result<FamilySpec> {
        let spec = FamilySpec { n, h, f3, sigma, samples };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_structure_inputs(&self.f3, self.n, self.h, &self.sigma)?;
        if self.n >= self.h {
            return Err(Error::precondition("family requires n < h"));
        }
        Ok(())
    }

    /// Length of the fibres: `1 + h + n + 1`.
    pub fn expected_dimension(&self) -> usize {
        2 + self.h + self.n
    }
}

/// Generators of `Ann(F3)` in `h` variables, followed by the quartic
/// monomials in `x_1..x_n`. Those lie in the ideal already; listing them
/// lets the quotient computations treat them as monomial generators.
fn core_generators(f3: &Polynomial, n: usize, h: usize) -> Result<Vec<Polynomial>> {
    let mut gens: Vec<Polynomial> = cubic_annihilator_generators(f3)?.iter().map(|g| g.extend_vars(h)).collect();
    gens.extend(Monomial::of_degree(n, 4).into_iter().map(|m| Polynomial::term(Space::Ring, Rat::one(), m.extend(h))));
    Ok(gens)
}

/// Generators of `J_b`: `Ann(F3)` extended to `h` variables, `x_i x_j` for
/// a tail index `j`, `x_k^2 - 2σ` for the tail indices `k < h`, and
/// `x_h^2 - b x_h - 2σ`.
pub fn family_generators(spec: &FamilySpec, b: &Rat) -> Result<Vec<Polynomial>> {
    spec.validate()?;
    let h = spec.h;
    let mut gens = core_generators(&spec.f3, spec.n, h)?;
    gens.extend(tail_generators(spec.n, h - 1, h, &spec.sigma));
    for i in 0..h - 1 {
        let mut e = vec![0; h];
        e[i] = 1;
        e[h - 1] = 1;
        gens.push(Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e)));
    }
    let xh = Polynomial::var(Space::Ring, h, h - 1);
    let last = xh
        .mul(&xh)?
        .sub(&xh.scale(b))?
        .sub(&spec.sigma.extend_vars(h).scale(&Rat::from_int(2)))?;
    gens.push(last);
    Ok(gens)
}

/// `J_b` modulo `𝔫^{D+1}`: its germ at the origin. At `b = 0` this is the
/// degree-`<= D` part of `Ann(F)`.
pub fn family_ideal(spec: &FamilySpec, b: &Rat, d: usize) -> Result<SubspaceBasis> {
    if d < 4 {
        return Err(Error::DegreeBound { degree: d as i32, bound: 4 });
    }
    ideal_truncation(spec.h, d, &family_generators(spec, b)?)
}

/// The degree-`<= D` part of `Ann(F)` for `F` of degree at most 3.
pub fn annihilator_to_degree(f: &Polynomial, d: usize) -> Result<SubspaceBasis> {
    let ann = annihilator(f)?;
    ideal_truncation(f.nvars(), d, &ann.basis.basis_polys(Space::Ring))
}

/// The ideal generated by some polynomials, computed from all products of
/// degree `<= top`, modulo its monomial generators.
///
/// Monomials outside the monomial generators' ideal ("standard") index the
/// columns; a product with a non-standard multiplier lies in that ideal, so
/// only standard multipliers are used.
pub struct TruncatedQuotient {
    nvars: usize,
    top: usize,
    index: Arc<MonomialIndex>,
    monomial_gens: Vec<Monomial>,
    standard: Vec<u32>,
    echelon: Echelon<Rat>,
}

impl TruncatedQuotient {
    pub fn new(nvars: usize, top: usize, generators: &[Polynomial]) -> Result<TruncatedQuotient> {
        let index = MonomialIndex::shared(nvars, top);
        let mut monomial_gens = Vec::new();
        let mut others = Vec::new();
        for g in generators {
            if g.nvars() != nvars {
                return Err(Error::ArityMismatch { left: nvars, right: g.nvars() });
            }
            match g.num_terms() {
                0 => {}
                1 => monomial_gens.push(g.terms().next().unwrap().0.clone()),
                _ => others.push(g),
            }
        }
        let is_standard = |m: &Monomial| !monomial_gens.iter().any(|g| g.divides(m));
        let standard: Vec<u32> = (0..index.len() as u32).filter(|&i| is_standard(index.monomial(i))).collect();
        let mut echelon = Echelon::new();
        for g in others {
            let dg = g.degree() as usize;
            if dg > top {
                continue;
            }
            for &s in &standard {
                let m = index.monomial(s);
                if m.degree() + dg > top {
                    break;
                }
                let v = linalg::collect_sparse(
                    g.terms()
                        .map(|(t, c)| (t.mul(m), c))
                        .filter(|(t, _)| is_standard(t))
                        .map(|(t, c)| (index.index(&t).unwrap(), c.clone()))
                        .collect::<Vec<_>>(),
                );
                echelon.insert(v);
            }
        }
        Ok(TruncatedQuotient { nvars, top, index, monomial_gens, standard, echelon })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    fn degree_bound(&self, d: usize) -> u32 {
        self.index.degree_range(d.min(self.top)).end
    }

    /// Dimension of the polynomials of degree `<= d` modulo the ideal.
    pub fn dim_upto(&self, d: usize) -> usize {
        let bound = self.degree_bound(d);
        let standard = self.standard.iter().take_while(|&&s| s < bound).count();
        let pivots = self.echelon.pivots().filter(|&p| p < bound).count();
        standard - pivots
    }

    /// The degree-`<= d` part of the ideal.
    pub fn section(&self, d: usize) -> SubspaceBasis {
        let to = MonomialIndex::shared(self.nvars, d);
        let bound = self.degree_bound(d);
        let mut e = Echelon::new();
        for (i, m) in to.monomials().iter().enumerate() {
            if self.monomial_gens.iter().any(|g| g.divides(m)) {
                e.insert(vec![(i as u32, Rat::one())]);
            }
        }
        for r in self.echelon.rows() {
            if linalg::leading(r).unwrap() < bound {
                e.insert(r.iter().map(|(i, c)| (to.index(self.index.monomial(*i)).unwrap(), c.clone())).collect());
            }
        }
        SubspaceBasis::from_echelon(self.nvars, d, e)
    }
}

/// A quotient dimension and whether it has settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberDimension {
    pub dimension: usize,
    pub stabilized: bool,
    pub truncation: usize,
}

/// `dim R_{<=D} / (J ∩ R_{<=D})`, stabilized when the same value is found
/// at `D + 1` and `D + 2` and with one more degree of products.
pub fn fiber_dimension(generators: &[Polynomial], h: usize, d: usize) -> Result<FiberDimension> {
    if d < 4 {
        return Err(Error::DegreeBound { degree: d as i32, bound: 4 });
    }
    let top = d + 2 + SLACK;
    let q = TruncatedQuotient::new(h, top, generators)?;
    let dimension = q.dim_upto(d);
    let mut stabilized = (d..=d + 2).all(|e| q.dim_upto(e) == dimension);
    if stabilized {
        let q1 = TruncatedQuotient::new(h, top + 1, generators)?;
        stabilized = (d..=d + 2).all(|e| q1.dim_upto(e) == dimension);
    }
    Ok(FiberDimension { dimension, stabilized, truncation: d })
}

/// First stabilized value over `D = START_DEGREE..=MAX_DEGREE`.
pub fn stable_fiber_dimension(generators: &[Polynomial], h: usize) -> Result<FiberDimension> {
    let mut last = None;
    for d in START_DEGREE..=MAX_DEGREE {
        let f = fiber_dimension(generators, h, d)?;
        if f.stabilized {
            return Ok(f);
        }
        last = Some(f);
    }
    let f = last.unwrap();
    Err(Error::Resource { what: format!("fibre dimension did not stabilize (last value {})", f.dimension), needed: MAX_DEGREE + 1, limit: MAX_DEGREE })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub b: String,
    pub fiber_dimension: usize,
    pub truncation_used: usize,
    pub stabilized: bool,
    pub coprime: Option<bool>,
    pub intersection_verified: Option<bool>,
    pub split_dimension_check: Option<bool>,
    /// Length of `A′`, the algebra split off at `b ≠ 0`.
    pub split_dimension: Option<usize>,
}

/// Coprimality, `J_b = (x_1..x_{h-1}, x_h - b) ∩ (J_b + (x_h^2))` in degrees
/// `<= D`, and `dim R/J_b = 1 + dim R/J′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub coprime: bool,
    pub intersection_verified: bool,
    pub split_dimension_check: bool,
    pub split_dimension: usize,
    pub fiber_dimension: usize,
}

pub fn check_decomposition(spec: &FamilySpec, b: &Rat, d: usize) -> Result<Decomposition> {
    if b.is_zero() {
        return Err(Error::precondition("the decomposition needs b != 0"));
    }
    if d < 4 {
        return Err(Error::DegreeBound { degree: d as i32, bound: 4 });
    }
    let h = spec.h;
    let j = family_generators(spec, b)?;
    let mut point: Vec<Polynomial> = (0..h - 1).map(|i| Polynomial::var(Space::Ring, h, i)).collect();
    let xh = Polynomial::var(Space::Ring, h, h - 1);
    point.push(xh.sub(&Polynomial::constant(Space::Ring, h, b.clone()))?);
    let mut local = j.clone();
    local.push(xh.mul(&xh)?);

    let top = d + SLACK;
    let both: Vec<Polynomial> = point.iter().chain(&local).cloned().collect();
    let coprime = TruncatedQuotient::new(h, top, &both)?.dim_upto(0) == 0;

    let sp = TruncatedQuotient::new(h, top, &point)?.section(d);
    let sl = TruncatedQuotient::new(h, top, &local)?.section(d);
    let sj = TruncatedQuotient::new(h, top, &j)?.section(d);
    let intersection_verified = subspace_equal(&sp.intersection(&sl)?, &sj)?;

    let full = stable_fiber_dimension(&j, h)?;
    let mut prime = core_generators(&spec.f3, spec.n, h - 1)?;
    prime.extend(tail_generators(spec.n, h - 1, h - 1, &spec.sigma));
    let split = stable_fiber_dimension(&prime, h - 1)?;
    Ok(Decomposition {
        coprime,
        intersection_verified,
        split_dimension_check: full.stabilized && split.stabilized && full.dimension == 1 + split.dimension,
        split_dimension: split.dimension,
        fiber_dimension: full.dimension,
    })
}

fn fiber_report(spec: &FamilySpec, b: &Rat) -> Result<FiberReport> {
    let gens = family_generators(spec, b)?;
    let f = stable_fiber_dimension(&gens, spec.h)?;
    let mut r = FiberReport {
        b: b.to_string(),
        fiber_dimension: f.dimension,
        truncation_used: f.truncation,
        stabilized: f.stabilized,
        coprime: None,
        intersection_verified: None,
        split_dimension_check: None,
        split_dimension: None,
    };
    if !b.is_zero() {
        let dec = check_decomposition(spec, b, f.truncation)?;
        r.coprime = Some(dec.coprime);
        r.intersection_verified = Some(dec.intersection_verified);
        r.split_dimension_check = Some(dec.split_dimension_check);
        r.split_dimension = Some(dec.split_dimension);
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub expected_dimension: usize,
    pub fibers: Vec<FiberReport>,
    /// Every sampled fibre has the same stabilized length.
    pub constant_length: bool,
    /// `J_0` agrees with `Ann(F)` in degrees `<= 4`.
    pub special_fiber_is_annihilator: bool,
    /// Every check of every fibre passed and the length is `2 + h + n`.
    pub verified: bool,
}

/// Per-fibre reports over the sample points, evaluated with `exec`.
pub fn check_flat_family(spec: &FamilySpec, exec: Exec) -> Result<FamilyReport> {
    spec.validate()?;
    let fibers: Vec<FiberReport> = exec.map(&spec.samples, |b| fiber_report(spec, b)).into_iter().collect::<Result<_>>()?;
    let d = 4;
    let j0 = family_ideal(spec, &Rat::zero(), d)?;
    let special = subspace_equal(&j0, &annihilator_to_degree(&normal_form(&spec.f3, spec.h)?, d)?)?;
    let constant_length = fibers.windows(2).all(|w| w[0].fiber_dimension == w[1].fiber_dimension);
    let expected = spec.expected_dimension();
    let verified = special
        && constant_length
        && fibers.iter().all(|f| {
            f.stabilized
                && f.fiber_dimension == expected
                && f.coprime != Some(false)
                && f.intersection_verified != Some(false)
                && f.split_dimension_check != Some(false)
        });
    Ok(FamilyReport { expected_dimension: expected, fibers, constant_length, special_fiber_is_annihilator: special, verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_poly;
    use crate::structure::solve_sigma;

    fn spec(f3: &str, n: usize, h: usize) -> FamilySpec {
        let f3 = parse_poly(f3, Space::Dual, n).unwrap();
        let sigma = solve_sigma(&f3, n).unwrap();
        FamilySpec::new(f3, n, h, sigma, default_samples()).unwrap()
    }

    fn x(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Ring, n).unwrap()
    }

    #[test]
    fn special_fiber_is_the_annihilator() {
        let s = spec("y1^3+y2^3", 2, 3);
        let f = parse_poly("y1^3+y2^3+y3^2", Space::Dual, 3).unwrap();
        for d in [4, 5] {
            let j0 = family_ideal(&s, &Rat::zero(), d).unwrap();
            assert!(subspace_equal(&j0, &annihilator_to_degree(&f, d).unwrap()).unwrap());
        }
    }

    #[test]
    fn family_generators_at_b() {
        let s = spec("y1^3+y2^3", 2, 3);
        let g = family_generators(&s, &Rat::one()).unwrap();
        assert!(g.contains(&x("x3^2 - x3 - 1/3*x1^3", 3)), "{g:?}");
        let g = family_generators(&s, &Rat::new(1, 2)).unwrap();
        assert!(g.contains(&x("x3^2 - 1/2*x3 - 1/3*x1^3", 3)));
        assert!(g.contains(&x("x1*x3", 3)) && g.contains(&x("x2*x3", 3)));
    }

    #[test]
    fn fiber_dimension_examples() {
        let r = fiber_dimension(&[x("x1^4", 1)], 1, 6).unwrap();
        assert_eq!((r.dimension, r.stabilized), (4, true));
        let s = spec("y1^3+y2^3", 2, 3);
        let r = fiber_dimension(&family_generators(&s, &Rat::zero()).unwrap(), 3, 5).unwrap();
        assert_eq!((r.dimension, r.stabilized), (7, true));
        let r = fiber_dimension(&family_generators(&s, &Rat::one()).unwrap(), 3, 7).unwrap();
        assert_eq!((r.dimension, r.stabilized), (7, true));
    }

    #[test]
    fn truncated_quotient_matches_a_dense_computation() {
        // (x1*x2, x2^2 - x1^3): length 5 at the origin and nowhere else.
        let g = [x("x1*x2", 2), x("x2^2-x1^3", 2)];
        let q = TruncatedQuotient::new(2, 8, &g).unwrap();
        assert_eq!(q.dim_upto(5), 5);
        let dense = crate::ring::affine_section(2, 5, 8, &g).unwrap();
        assert!(subspace_equal(&q.section(5), &dense).unwrap());
        // Length 4 at the origin (x2 is x1^3 times a unit there) plus the
        // reduced point (0, 1).
        let g = [x("x1*x2", 2), x("x2^2-x2-x1^3", 2)];
        assert_eq!(TruncatedQuotient::new(2, 9, &g).unwrap().dim_upto(6), 5);
    }

    #[test]
    fn flat_family_examples() {
        let s = spec("y1^3+y2^3", 2, 3);
        let r = check_flat_family(&s, Exec::Sequential).unwrap();
        assert!(r.verified, "{r:?}");
        assert_eq!(r.fibers.iter().map(|f| f.fiber_dimension).collect::<Vec<_>>(), vec![7; 5]);
        assert!(r.fibers[1..].iter().all(|f| f.split_dimension == Some(6)));

        let s = spec("y1^3", 1, 2);
        let dec = check_decomposition(&s, &Rat::one(), 6).unwrap();
        assert_eq!((dec.fiber_dimension, dec.split_dimension), (5, 4));
        assert!(dec.coprime && dec.intersection_verified && dec.split_dimension_check);

        let s = spec("y1^3+y2^3", 2, 3);
        let dec = check_decomposition(&s, &Rat::from_int(-2), 6).unwrap();
        assert!(dec.coprime && dec.intersection_verified && dec.split_dimension_check);
        assert!(check_decomposition(&s, &Rat::zero(), 6).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let f3 = parse_poly("y1^3+y2^3", Space::Dual, 2).unwrap();
        let sigma = solve_sigma(&f3, 2).unwrap();
        assert!(FamilySpec::new(f3.clone(), 2, 2, sigma.clone(), default_samples()).unwrap_err().is_precondition());
        let deg = parse_poly("y1^3", Space::Dual, 2).unwrap();
        assert!(FamilySpec::new(deg, 2, 3, sigma, default_samples()).is_err());
    }
}
