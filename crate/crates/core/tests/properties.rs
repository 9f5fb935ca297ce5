//! Property tests of the algebraic invariants behind the pipelines.

use num_rational::BigRational;
use proptest::prelude::*;
use socle3::apolarity::{algebra_from_dual, hilbert_function};
use socle3::random::{random_cubic, trial_rng};
use socle3::resolution::{
    betti_numbers_with, fit_rational, series_expand, Arithmetic, RationalFunction, ResolutionOptions,
};
use socle3::structure::{solve_sigma, verify_structure_lemma};
use socle3::{Field, Monomial, Polynomial, Rat, Space};

fn arb_rat() -> impl Strategy<Value = Rat> {
    prop_oneof![
        (-1000i64..=1000, 1i64..=1000).prop_map(|(n, d)| Rat::new(n, d)),
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rat::new(n, d)),
    ]
}

/// A nonzero dual polynomial of degree at most 3 in 1 to 3 variables.
fn arb_dual() -> impl Strategy<Value = Polynomial> {
    (1usize..=3).prop_flat_map(|nvars| {
        let term = (-5i64..=5, proptest::collection::vec(0u8..=3, nvars))
            .prop_filter("degree at most 3", |(_, e)| e.iter().map(|&x| x as usize).sum::<usize>() <= 3);
        proptest::collection::vec(term, 1..5)
            .prop_map(move |ts| {
                Polynomial::from_terms(Space::Dual, nvars, ts.into_iter().map(|(c, e)| (Monomial::new(e), Rat::from_int(c))))
            })
            .prop_filter("nonzero", |p| !p.is_zero())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_arithmetic_matches_bigrational(a in arb_rat(), b in arb_rat()) {
        let (x, y): (BigRational, BigRational) = (a.to_big(), b.to_big());
        prop_assert_eq!(a.add(&b).to_big(), &x + &y);
        prop_assert_eq!(a.sub(&b).to_big(), &x - &y);
        prop_assert_eq!(a.mul(&b).to_big(), &x * &y);
        if !b.is_zero() {
            prop_assert_eq!(a.mul(&b.inv()).to_big(), &x / &y);
        }
        // Small values always use the compact representation.
        let back = Rat::from_bigints(a.numer(), a.denom()).unwrap();
        prop_assert!(back == a);
    }

    #[test]
    fn principal_inverse_systems_are_gorenstein(f in arb_dual()) {
        let a = algebra_from_dual(&f).unwrap();
        prop_assert!(a.is_gorenstein());
        let hf = hilbert_function(&a).values;
        prop_assert_eq!(hf.iter().sum::<usize>(), a.dim());
        prop_assert_eq!(hf[0], 1);
        // Local duality: the Hilbert function of a homogeneous generator is symmetric.
        if f.is_homogeneous() {
            let mut rev = hf.clone();
            rev.reverse();
            prop_assert_eq!(rev, hf);
        }
    }

    #[test]
    fn exact_and_prime_betti_numbers_agree(f in arb_dual()) {
        let a = algebra_from_dual(&f).unwrap();
        let exact = betti_numbers_with(&a, 4, &ResolutionOptions::default()).unwrap().values;
        let prime = betti_numbers_with(&a, 4, &ResolutionOptions { arithmetic: Arithmetic::Prime, ..Default::default() }).unwrap().values;
        prop_assert_eq!(&exact, &prime);
        prop_assert_eq!(exact[0], 1);
        prop_assert_eq!(exact[1] as usize, a.embedding_dim());
    }

    #[test]
    fn structure_lemma_holds_for_random_cubics(seed in any::<u64>(), n in 1usize..=3, extra in 0usize..=2) {
        let f3 = random_cubic(n, &mut trial_rng(seed, 0)).unwrap();
        let sigma = solve_sigma(&f3, n).unwrap();
        prop_assert!(verify_structure_lemma(&f3, n, n + extra, &sigma).unwrap());
    }

    #[test]
    fn fits_reproduce_every_coefficient(num in proptest::collection::vec(-3i64..=3, 1..3), den in proptest::collection::vec(-3i64..=3, 1..3)) {
        let mut den = den;
        den.insert(0, 1);
        let f = RationalFunction::new(num, den).unwrap();
        let series = series_expand(&f, 9).unwrap();
        if let Some(g) = fit_rational(&series, 4) {
            prop_assert_eq!(series_expand(&g, 9).unwrap(), series);
        }
    }
}
