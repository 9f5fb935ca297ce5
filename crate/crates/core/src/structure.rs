//! Explicit ideals for Gorenstein algebras of socle degree two and three.
//!
//! For `F = F3 + y_{n+1}^2 + … + y_h^2` with `F3` a non-degenerate cubic in
//! the first `n` variables and `σ` a cubic form with `σ ∘ F3 = 1`,
//! `Ann(F)` is generated by `Ann(F3)` (extended to all variables), the
//! products `x_i x_j` with `i < j` and `j > n`, and `x_j^2 - 2σ` for `j > n`.

use serde::Serialize;

use crate::apolarity::{annihilator, is_nondegenerate, AnnihilatorIdeal};
use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::ring::{derivative_action, homogeneous_generators, ideal_truncation, span_to_degree, subspace_equal, Monomial, Polynomial, Space};

/// Truncation degree for socle-degree-three ideals: both sides of every
/// comparison contain all monomials of degree four.
pub const STRUCTURE_DEGREE: usize = 4;

/// The inputs of the structure theorem together with its ideal.
#[derive(Clone, Debug)]
pub struct StructureData {
    pub n: usize,
    pub h: usize,
    pub f3: Polynomial,
    pub sigma: Polynomial,
    pub generators: Vec<Polynomial>,
    pub ideal: AnnihilatorIdeal,
}

/// Summary of a structure check, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub sigma: String,
    pub generators: Vec<String>,
    pub lemma_verified: bool,
    pub hilbert_function: Vec<usize>,
}

fn check_cubic(f3: &Polynomial) -> Result<()> {
    if f3.space() != Space::Dual {
        return Err(Error::SpaceMismatch);
    }
    if f3.is_zero() {
        return Err(Error::precondition("zero cubic"));
    }
    if !f3.is_homogeneous() || f3.degree() != 3 {
        return Err(Error::precondition("expected a homogeneous cubic"));
    }
    Ok(())
}

/// A cubic form `σ` with `σ ∘ F3 = 1`: the first monomial (in increasing
/// order) pairing nontrivially with `F3`, suitably scaled.
pub fn solve_sigma(f3: &Polynomial, n: usize) -> Result<Polynomial> {
    check_cubic(f3)?;
    if f3.nvars() != n {
        return Err(Error::ArityMismatch { left: n, right: f3.nvars() });
    }
    for m in Monomial::of_degree(n, 3) {
        let x = Polynomial::term(Space::Ring, Rat::one(), m);
        let v = derivative_action(&x, f3)?.coeff(&Monomial::one(n));
        if !v.is_zero() {
            return Ok(x.scale(&v.inv()));
        }
    }
    unreachable!("a nonzero cubic pairs nontrivially with some cubic monomial")
}

/// `F3 + y_{n+1}^2 + … + y_h^2` in `h` variables.
pub fn normal_form(f3: &Polynomial, h: usize) -> Result<Polynomial> {
    let n = f3.nvars();
    if h < n {
        return Err(Error::precondition(format!("need n <= h, got n = {n}, h = {h}")));
    }
    let mut f = f3.extend_vars(h);
    for j in n..h {
        let mut e = vec![0; h];
        e[j] = 2;
        f = f.add(&Polynomial::term(Space::Dual, Rat::one(), Monomial::new(e)))?;
    }
    Ok(f)
}

pub(crate) fn check_structure_inputs(f3: &Polynomial, n: usize, h: usize, sigma: &Polynomial) -> Result<()> {
    check_cubic(f3)?;
    if n > h {
        return Err(Error::precondition(format!("need n <= h, got n = {n}, h = {h}")));
    }
    if !is_nondegenerate(f3, n)? {
        let r = crate::apolarity::derivative_rank(f3, 2);
        return Err(Error::precondition(format!(
            "degenerate cubic: second derivatives span {r} < {n} linear forms"
        )));
    }
    if sigma.space() != Space::Ring || sigma.nvars() != n {
        return Err(Error::precondition("sigma must be a form in x1..xn"));
    }
    if derivative_action(sigma, f3)? != Polynomial::constant(Space::Dual, n, Rat::one()) {
        return Err(Error::precondition("sigma does not pair to 1 with the cubic"));
    }
    Ok(())
}

/// Minimal homogeneous generators of `Ann(F3)` in `n` variables.
pub fn cubic_annihilator_generators(f3: &Polynomial) -> Result<Vec<Polynomial>> {
    Ok(homogeneous_generators(&annihilator(f3)?.basis))
}

/// Generators listed by the structure theorem, in `h` variables.
pub fn structure_generators(f3: &Polynomial, n: usize, h: usize, sigma: &Polynomial) -> Result<Vec<Polynomial>> {
    check_structure_inputs(f3, n, h, sigma)?;
    let mut gens: Vec<Polynomial> = cubic_annihilator_generators(f3)?.iter().map(|g| g.extend_vars(h)).collect();
    gens.extend(tail_generators(n, h, h, sigma));
    Ok(gens)
}

/// `x_i x_j` (`i < j`, `n < j <= last`) and `x_j^2 - 2σ` (`n < j <= last`),
/// all in `h` variables (1-based bounds).
pub(crate) fn tail_generators(n: usize, last: usize, h: usize, sigma: &Polynomial) -> Vec<Polynomial> {
    let two_sigma = sigma.extend_vars(h).scale(&Rat::from_int(2));
    let mut gens = Vec::new();
    for j in n..last {
        for i in 0..j {
            let mut e = vec![0; h];
            e[i] += 1;
            e[j] += 1;
            gens.push(Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e)));
        }
    }
    for j in n..last {
        let mut e = vec![0; h];
        e[j] = 2;
        gens.push(Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e)).sub(&two_sigma).unwrap());
    }
    gens
}

/// The ideal of the structure theorem modulo `𝔫^5`. It contains `𝔫^4`, so
/// this is its part of degree at most four.
pub fn structure_ideal(f3: &Polynomial, n: usize, h: usize, sigma: &Polynomial) -> Result<StructureData> {
    let generators = structure_generators(f3, n, h, sigma)?;
    let basis = ideal_truncation(h, STRUCTURE_DEGREE, &generators)?;
    Ok(StructureData {
        n,
        h,
        f3: f3.clone(),
        sigma: sigma.clone(),
        generators,
        ideal: AnnihilatorIdeal { basis, source: None },
    })
}

/// Whether the structure ideal equals `Ann(F3 + tail)` at truncation four.
pub fn verify_structure_lemma(f3: &Polynomial, n: usize, h: usize, sigma: &Polynomial) -> Result<bool> {
    let s = structure_ideal(f3, n, h, sigma)?;
    let ann = annihilator(&normal_form(f3, h)?)?;
    subspace_equal(&s.ideal.basis, &ann.basis)
}

/// `(x_i x_j, x_u^2 - x_1^2)` for `1 <= i < j <= h`, `2 <= u <= h`,
/// truncated at degree three.
pub fn socle2_generators(h: usize) -> Result<Vec<Polynomial>> {
    if h < 2 {
        return Err(Error::precondition("embedding dimension must be at least 2"));
    }
    let mut gens = Vec::new();
    for j in 1..h {
        for i in 0..j {
            let mut e = vec![0; h];
            e[i] = 1;
            e[j] = 1;
            gens.push(Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e)));
        }
    }
    let mut e1 = vec![0; h];
    e1[0] = 2;
    let x1sq = Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e1));
    for u in 1..h {
        let mut e = vec![0; h];
        e[u] = 2;
        gens.push(Polynomial::term(Space::Ring, Rat::one(), Monomial::new(e)).sub(&x1sq).unwrap());
    }
    Ok(gens)
}

pub fn socle2_ideal(h: usize) -> Result<AnnihilatorIdeal> {
    let gens = socle2_generators(h)?;
    Ok(AnnihilatorIdeal { basis: span_to_degree(h, 3, &gens)?, source: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::{hilbert_function, LocalAlgebra};
    use crate::parser::{parse_poly, print_poly};

    fn y(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Dual, n).unwrap()
    }

    fn x(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Ring, n).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(print_poly(&solve_sigma(&y("y1^3", 1), 1).unwrap()), "1/6*x1^3");
        let f = y("y1^3+y2^3", 2);
        let s = solve_sigma(&f, 2).unwrap();
        assert_eq!(print_poly(&s), "1/6*x1^3");
        assert_eq!(derivative_action(&s, &f).unwrap(), y("1", 2));
        assert_eq!(print_poly(&solve_sigma(&y("y1^2*y2", 2), 2).unwrap()), "1/2*x1^2*x2");
        assert!(solve_sigma(&y("y1^2", 1), 1).is_err());
        assert!(solve_sigma(&y("0", 1), 1).is_err());
    }

    #[test]
    fn structure_ideal_examples() {
        let f = y("y1^3+y2^3", 2);
        let s = solve_sigma(&f, 2).unwrap();
        let st = structure_ideal(&f, 2, 3, &s).unwrap();
        let want = ideal_truncation(
            3,
            4,
            &[x("x1*x2", 3), x("x1^3-x2^3", 3), x("x1*x3", 3), x("x2*x3", 3), x("x3^2-1/3*x1^3", 3)],
        )
        .unwrap();
        assert_eq!(st.ideal.basis, want);

        let same = structure_ideal(&f, 2, 2, &s).unwrap();
        assert_eq!(same.ideal.basis, annihilator(&f).unwrap().basis);

        let g = y("y1^3", 1);
        let sg = solve_sigma(&g, 1).unwrap();
        let st = structure_ideal(&g, 1, 2, &sg).unwrap();
        let want = ideal_truncation(2, 4, &[x("x1^4", 2), x("x1*x2", 2), x("x2^2-1/3*x1^3", 2)]).unwrap();
        assert_eq!(st.ideal.basis, want);
        let a = LocalAlgebra::from_ideal(&st.ideal.basis).unwrap();
        assert_eq!(hilbert_function(&a).values, vec![1, 2, 1, 1]);
    }

    #[test]
    fn structure_rejects_bad_inputs() {
        let f = y("y1^3", 2);
        let s = x("1/6*x1^3", 2);
        assert!(matches!(structure_ideal(&f, 2, 3, &s), Err(Error::Precondition(m)) if m.contains("degenerate")));
        let g = y("y1^3+y2^3", 2);
        assert!(structure_ideal(&g, 2, 3, &x("x1^3", 2)).is_err());
        assert!(structure_ideal(&g, 2, 1, &x("1/6*x1^3", 2)).is_err());
    }

    #[test]
    fn lemma_examples() {
        let f = y("y1^3+y2^3", 2);
        let s = solve_sigma(&f, 2).unwrap();
        assert!(verify_structure_lemma(&f, 2, 3, &s).unwrap());
        assert!(verify_structure_lemma(&f, 2, 2, &s).unwrap());
        // Shifts of sigma by cubics of Ann(F3) are also valid.
        for shift in ["x1^2*x2", "x1*x2^2", "x1^2*x2 - 5*x1*x2^2", "x1^3 - x2^3"] {
            let s2 = s.add(&x(shift, 2)).unwrap();
            assert_eq!(derivative_action(&s2, &f).unwrap(), y("1", 2));
            assert!(verify_structure_lemma(&f, 2, 3, &s2).unwrap());
            assert!(verify_structure_lemma(&f, 2, 5, &s2).unwrap());
        }
    }

    #[test]
    fn socle2_examples() {
        let two = socle2_ideal(2).unwrap();
        assert_eq!(two.basis, span_to_degree(2, 3, &[x("x1*x2", 2), x("x2^2-x1^2", 2)]).unwrap());
        let three = socle2_ideal(3).unwrap();
        assert_eq!(three.quotient_dim(), 5);
        assert_eq!(two.basis, annihilator(&y("y1^2+y2^2", 2)).unwrap().basis);
        assert!(socle2_ideal(1).is_err());
        let a = LocalAlgebra::from_ideal(&three.basis).unwrap();
        assert_eq!(hilbert_function(&a).values, vec![1, 3, 1]);
        assert!(a.is_gorenstein());
    }
}
