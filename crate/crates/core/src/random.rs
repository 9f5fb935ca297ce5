//! Seeded random cubics and the test corpus built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::apolarity::is_nondegenerate;
use crate::error::Result;
use crate::field::Rat;
use crate::ring::{Monomial, Polynomial, Space};

/// Coefficients are drawn uniformly from `-COEFF_BOUND..=COEFF_BOUND`.
pub const COEFF_BOUND: i64 = 9;
/// Draws per cubic before giving up on non-degeneracy.
pub const MAX_DRAWS: usize = 1000;

/// The generator for trial `trial` of a run seeded with `seed`; trials use
/// separate streams so they can be drawn in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A dense cubic form in `n` dual variables with integer coefficients,
/// redrawn until it is non-degenerate.
pub fn random_cubic<R: Rng>(n: usize, rng: &mut R) -> Result<Polynomial> {
    let monomials = Monomial::of_degree(n, 3);
    for _ in 0..MAX_DRAWS {
        let f = Polynomial::from_terms(
            Space::Dual,
            n,
            monomials.iter().map(|m| (m.clone(), Rat::from_int(rng.gen_range(-COEFF_BOUND..=COEFF_BOUND)))),
        );
        if !f.is_zero() && is_nondegenerate(&f, n)? {
            return Ok(f);
        }
    }
    Err(crate::error::Error::precondition(format!("no non-degenerate cubic in {MAX_DRAWS} draws")))
}

/// One corpus entry: a non-degenerate cubic `f3` in `n` variables, to be
/// completed with `h - n` squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusCase {
    pub trial: usize,
    pub n: usize,
    pub h: usize,
    #[serde(serialize_with = "crate::random::ser_poly")]
    pub f3: Polynomial,
}

pub(crate) fn ser_poly<S: serde::Serializer>(p: &Polynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::parser::print_poly(p))
}

/// Trial `i` of the shape sweep uses `n = 1 + i mod 4` and
/// `h = n + (i / 4) mod 4`, covering every `n <= 4`, `n <= h <= n + 3`.
pub fn sweep_shape(i: usize) -> (usize, usize) {
    let n = 1 + i % 4;
    (n, n + (i / 4) % 4)
}

/// `trials` cases with the shapes of [`sweep_shape`].
pub fn sweep_corpus(seed: u64, trials: usize) -> Result<Vec<CorpusCase>> {
    (0..trials)
        .map(|i| {
            let (n, h) = sweep_shape(i);
            Ok(CorpusCase { trial: i, n, h, f3: random_cubic(n, &mut trial_rng(seed, i as u64))? })
        })
        .collect()
}

/// `trials` cases with a fixed shape.
pub fn fixed_corpus(seed: u64, trials: usize, n: usize, h: usize) -> Result<Vec<CorpusCase>> {
    (0..trials)
        .map(|i| Ok(CorpusCase { trial: i, n, h, f3: random_cubic(n, &mut trial_rng(seed, i as u64))? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_nondegenerate() {
        let a = sweep_corpus(7, 16).unwrap();
        let b = sweep_corpus(7, 16).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sweep_corpus(8, 16).unwrap());
        for c in &a {
            assert!(is_nondegenerate(&c.f3, c.n).unwrap());
            assert!(c.n <= c.h && c.h <= c.n + 3);
            assert!(c.f3.terms().all(|(_, x)| x.abs().to_i64().unwrap() <= COEFF_BOUND));
        }
        let shapes: std::collections::BTreeSet<_> = (0..16).map(sweep_shape).collect();
        assert_eq!(shapes.len(), 16);
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let mut r = trial_rng(3, 5);
        let x = random_cubic(2, &mut r).unwrap();
        let all = fixed_corpus(3, 6, 2, 3).unwrap();
        assert_eq!(all[5].f3, x);
    }
}
