//! End-to-end pipelines with serializable reports, shared by the command
//! line front end and the acceptance tests.

use serde::Serialize;

use crate::apolarity::{algebra_from_dual, hilbert_function, q0, LocalAlgebra};
use crate::deformation::{check_flat_family, FamilyReport, FamilySpec};
use crate::error::Result;
use crate::field::Rat;
use crate::par::Exec;
use crate::parser::{parse_poly, print_poly};
use crate::random::{fixed_corpus, sweep_corpus, CorpusCase};
use crate::resolution::{
    betti_numbers_with, fit_rational, is_koszul_numerically, koszul_formula, main_theorem_prediction_variant,
    series_expand, verify_socle_formulas, FormulaVariant, RationalFunction, ResolutionOptions, SocleFormulaReport,
};
use crate::ring::{Polynomial, Space};
use crate::structure::{normal_form, solve_sigma, structure_ideal, verify_structure_lemma, StructureReport};

pub fn parse_dual(text: &str, h: usize) -> Result<Polynomial> {
    parse_poly(text, Space::Dual, h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnnReport {
    pub f: String,
    pub dim: usize,
    pub hf: Vec<usize>,
    pub socle_dim: usize,
    pub gorenstein: bool,
}

pub fn ann_report(f: &Polynomial) -> Result<AnnReport> {
    let a = algebra_from_dual(f)?;
    let socle_dim = a.socle().len();
    Ok(AnnReport { f: print_poly(f), dim: a.dim(), hf: hilbert_function(&a).values, socle_dim, gorenstein: socle_dim == 1 })
}

/// `σ`, the generators of the structure ideal, and the lemma verdict for
/// `F = F3 + y_{n+1}^2 + ... + y_h^2`.
pub fn structure_report(f3: &Polynomial, n: usize, h: usize) -> Result<StructureReport> {
    let sigma = solve_sigma(f3, n)?;
    let data = structure_ideal(f3, n, h, &sigma)?;
    let lemma_verified = verify_structure_lemma(f3, n, h, &sigma)?;
    let a = algebra_from_dual(&normal_form(f3, h)?)?;
    Ok(StructureReport {
        sigma: print_poly(&sigma),
        generators: data.generators.iter().map(print_poly).collect(),
        lemma_verified,
        hilbert_function: hilbert_function(&a).values,
    })
}

/// Options of the Poincaré-series pipeline.
#[derive(Clone, Debug)]
pub struct PoincareOptions {
    pub order: usize,
    pub variant: FormulaVariant,
    pub max_fit_degree: usize,
    pub socle_formulas: bool,
    pub resolution: ResolutionOptions,
}

impl Default for PoincareOptions {
    fn default() -> Self {
        PoincareOptions {
            order: crate::resolution::DEFAULT_N,
            variant: FormulaVariant::ProofConsistent,
            max_fit_degree: 4,
            socle_formulas: false,
            resolution: ResolutionOptions::default(),
        }
    }
}

/// A formula's coefficients next to the direct Betti numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesPrediction {
    pub coefficients: Option<Vec<i64>>,
    pub error: Option<String>,
    pub matches: bool,
    /// Index of the first coefficient that differs from the direct value.
    pub first_mismatch: Option<usize>,
}

impl SeriesPrediction {
    fn new(direct: &[i64], predicted: Result<Vec<i64>>) -> SeriesPrediction {
        match predicted {
            Ok(p) => {
                let first_mismatch = (0..direct.len()).find(|&i| p.get(i) != Some(&direct[i]));
                SeriesPrediction { matches: first_mismatch.is_none(), first_mismatch, coefficients: Some(p), error: None }
            }
            Err(e) => SeriesPrediction { coefficients: None, error: Some(e.to_string()), matches: false, first_mismatch: None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalReport {
    #[serde(flatten)]
    pub function: RationalFunction,
    pub text: String,
}

impl From<RationalFunction> for RationalReport {
    fn from(f: RationalFunction) -> RationalReport {
        RationalReport { text: f.to_string(), function: f }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub q0_is_koszul: Option<bool>,
    pub formula: Option<RationalReport>,
    pub prediction: Option<SeriesPrediction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareReport {
    pub f: String,
    pub h: usize,
    pub n: usize,
    pub order: usize,
    pub algebra_dim: usize,
    pub direct: Vec<i64>,
    pub q0_betti: Vec<i64>,
    pub selected_variant: FormulaVariant,
    pub proof_consistent: SeriesPrediction,
    pub as_displayed: SeriesPrediction,
    pub koszul: KoszulReport,
    pub fit_max_degree: usize,
    pub fit: Option<RationalReport>,
    pub socle_formulas: Option<SocleFormulaReport>,
}

impl PoincareReport {
    pub fn selected(&self) -> &SeriesPrediction {
        match self.selected_variant {
            FormulaVariant::ProofConsistent => &self.proof_consistent,
            FormulaVariant::AsDisplayed => &self.as_displayed,
        }
    }
}

/// Direct Betti numbers of `A_F` against both readings of the main formula,
/// the Koszul closed form, and a rational fit. `n` defaults to the
/// embedding dimension of `Q(0)`.
pub fn poincare_report(f: &Polynomial, n: Option<usize>, opts: &PoincareOptions) -> Result<PoincareReport> {
    let h = f.nvars();
    let big_n = opts.order;
    let a = algebra_from_dual(f)?;
    let b = q0(f)?;
    let n = n.unwrap_or_else(|| b.embedding_dim());
    let direct = betti_numbers_with(&a, big_n, &opts.resolution)?.values;
    let q0_betti = betti_numbers_with(&b, big_n, &opts.resolution)?.values;
    let prediction = |v| SeriesPrediction::new(&direct, main_theorem_prediction_variant(&q0_betti, h, n, big_n, v));
    let proof_consistent = prediction(FormulaVariant::ProofConsistent);
    let as_displayed = prediction(FormulaVariant::AsDisplayed);
    let koszul = koszul_report(&b, h, n, &direct, opts)?;
    let fit = fit_rational(&direct, opts.max_fit_degree).map(RationalReport::from);
    let socle_formulas = if opts.socle_formulas { Some(verify_socle_formulas(&a, big_n, &opts.resolution)?) } else { None };
    Ok(PoincareReport {
        f: print_poly(f),
        h,
        n,
        order: big_n,
        algebra_dim: a.dim(),
        direct,
        q0_betti,
        selected_variant: opts.variant,
        proof_consistent,
        as_displayed,
        koszul,
        fit_max_degree: opts.max_fit_degree,
        fit,
        socle_formulas,
    })
}

fn koszul_report(b: &LocalAlgebra, h: usize, n: usize, direct: &[i64], opts: &PoincareOptions) -> Result<KoszulReport> {
    let skipped = |reason: &str| KoszulReport {
        applicable: false,
        reason: Some(reason.into()),
        q0_is_koszul: None,
        formula: None,
        prediction: None,
    };
    if hilbert_function(b).values != [1, n, n, 1] {
        return Ok(skipped("Q(0) does not have Hilbert function (1, n, n, 1)"));
    }
    if opts.order < 3 {
        return Ok(skipped("the numerical Koszul test needs N >= 3"));
    }
    let koszul = is_koszul_numerically(b, opts.order, &opts.resolution)?;
    let formula = koszul_formula(h, n)?;
    let prediction = SeriesPrediction::new(direct, series_expand(&formula, opts.order));
    Ok(KoszulReport {
        applicable: true,
        reason: None,
        q0_is_koszul: Some(koszul),
        formula: Some(formula.into()),
        prediction: Some(prediction),
    })
}

/// The flat-family checks over the given base points.
pub fn deform_report(f3: &Polynomial, n: usize, h: usize, samples: Vec<Rat>, exec: Exec) -> Result<FamilyReport> {
    let sigma = solve_sigma(f3, n)?;
    let spec = FamilySpec::new(f3.clone(), n, h, sigma, samples)?;
    check_flat_family(&spec, exec)
}

/// Options of the randomized suite.
#[derive(Clone, Debug)]
pub struct RandomOptions {
    pub seed: u64,
    pub trials: usize,
    /// A fixed `(n, h)`; otherwise trials sweep all `n <= 4`, `n <= h <= n + 3`.
    pub shape: Option<(usize, usize)>,
    pub order: usize,
    pub samples: Vec<Rat>,
    pub resolution: ResolutionOptions,
    pub exec: Exec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    #[serde(flatten)]
    pub case: CorpusCase,
    pub lemma_verified: bool,
    pub hilbert_function: Vec<usize>,
    pub q0_hilbert_function: Vec<usize>,
    pub hilbert_shape_ok: bool,
    pub direct: Vec<i64>,
    pub q0_betti: Vec<i64>,
    pub predicted: Option<Vec<i64>>,
    pub theorem_identity: bool,
    /// `None` when `n = h` (no family).
    pub flat_family: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomCounts {
    pub trials: usize,
    pub lemma_verified: usize,
    pub hilbert_shape: usize,
    pub theorem_identity: usize,
    pub flat_family: usize,
    pub flat_family_applicable: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomReport {
    pub seed: u64,
    pub counts: RandomCounts,
    pub results: Vec<TrialReport>,
}

/// Structure lemma, Hilbert functions, main-formula identity and flat family
/// for one corpus cubic.
pub fn run_trial(case: &CorpusCase, order: usize, samples: &[Rat], resolution: &ResolutionOptions, exec: Exec) -> TrialReport {
    let mut r = TrialReport {
        case: case.clone(),
        lemma_verified: false,
        hilbert_function: Vec::new(),
        q0_hilbert_function: Vec::new(),
        hilbert_shape_ok: false,
        direct: Vec::new(),
        q0_betti: Vec::new(),
        predicted: None,
        theorem_identity: false,
        flat_family: None,
        error: None,
    };
    if let Err(e) = fill_trial(&mut r, order, samples, resolution, exec) {
        r.error = Some(e.to_string());
    }
    r
}

fn fill_trial(r: &mut TrialReport, order: usize, samples: &[Rat], resolution: &ResolutionOptions, exec: Exec) -> Result<()> {
    let (n, h, f3) = (r.case.n, r.case.h, &r.case.f3);
    let sigma = solve_sigma(f3, n)?;
    r.lemma_verified = verify_structure_lemma(f3, n, h, &sigma)?;
    let f = normal_form(f3, h)?;
    let a = algebra_from_dual(&f)?;
    let b = q0(&f)?;
    r.hilbert_function = hilbert_function(&a).values;
    r.q0_hilbert_function = hilbert_function(&b).values;
    r.hilbert_shape_ok = r.hilbert_function == [1, h, n, 1] && r.q0_hilbert_function == [1, n, n, 1];
    r.direct = betti_numbers_with(&a, order, resolution)?.values;
    r.q0_betti = betti_numbers_with(&b, order, resolution)?.values;
    let predicted = main_theorem_prediction_variant(&r.q0_betti, h, n, order, FormulaVariant::ProofConsistent)?;
    r.theorem_identity = predicted == r.direct;
    r.predicted = Some(predicted);
    if n < h {
        let spec = FamilySpec::new(f3.clone(), n, h, sigma, samples.to_vec())?;
        r.flat_family = Some(check_flat_family(&spec, exec)?.verified);
    }
    Ok(())
}

pub fn random_report(opts: &RandomOptions) -> Result<RandomReport> {
    let corpus = match opts.shape {
        Some((n, h)) => fixed_corpus(opts.seed, opts.trials, n, h)?,
        None => sweep_corpus(opts.seed, opts.trials)?,
    };
    let results = opts.exec.map(&corpus, |c| run_trial(c, opts.order, &opts.samples, &opts.resolution, Exec::Sequential));
    let count = |p: &dyn Fn(&TrialReport) -> bool| results.iter().filter(|r| p(r)).count();
    let counts = RandomCounts {
        trials: results.len(),
        lemma_verified: count(&|r| r.lemma_verified),
        hilbert_shape: count(&|r| r.hilbert_shape_ok),
        theorem_identity: count(&|r| r.theorem_identity),
        flat_family: count(&|r| r.flat_family == Some(true)),
        flat_family_applicable: count(&|r| r.case.n < r.case.h),
        errors: count(&|r| r.error.is_some()),
    };
    Ok(RandomReport { seed: opts.seed, counts, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ann_examples() {
        let r = ann_report(&parse_dual("y1^3+y2^3+y3^2", 3).unwrap()).unwrap();
        assert_eq!((r.dim, r.hf.clone(), r.gorenstein), (7, vec![1, 3, 2, 1], true));
        assert_eq!(ann_report(&parse_dual("y1^3", 1).unwrap()).unwrap().hf, vec![1, 1, 1, 1]);
        let e = ann_report(&parse_dual("0", 2).unwrap()).unwrap_err();
        assert!(e.is_precondition() && e.to_string().contains("zero dual generator"));
    }

    #[test]
    fn structure_examples() {
        let f3 = parse_dual("y1^3+y2^3", 2).unwrap();
        let r = structure_report(&f3, 2, 3).unwrap();
        assert_eq!(r.sigma, "1/6*x1^3");
        assert!(r.lemma_verified);
        assert!(structure_report(&f3, 2, 2).unwrap().lemma_verified);
        let e = structure_report(&parse_dual("y1^3", 2).unwrap(), 2, 3).unwrap_err();
        assert!(e.to_string().contains("degenerate cubic"));
    }

    #[test]
    fn poincare_examples() {
        let opts = PoincareOptions { order: 5, ..Default::default() };
        let r = poincare_report(&parse_dual("y1^3+y2^3+y3^2", 3).unwrap(), None, &opts).unwrap();
        assert_eq!(r.direct, vec![1, 3, 8, 21, 55, 144]);
        assert!(r.proof_consistent.matches);
        assert!(!r.as_displayed.matches);
        assert_eq!(r.fit.unwrap().text, "1/(1-3z+z^2)");

        let opts = PoincareOptions { order: 4, ..Default::default() };
        let r = poincare_report(&parse_dual("y1^3", 1).unwrap(), None, &opts).unwrap();
        assert!(r.proof_consistent.matches && r.as_displayed.matches);
        assert_eq!(r.proof_consistent.coefficients, r.as_displayed.coefficients);

        let r = poincare_report(&parse_dual("y1^2+y2^2", 2).unwrap(), None, &opts).unwrap();
        assert_eq!(r.direct, vec![1, 2, 3, 4, 5]);
        assert_eq!(r.fit.unwrap().text, "1/(1-z)^2");
    }

    #[test]
    fn random_suite_is_deterministic() {
        let opts = RandomOptions {
            seed: 42,
            trials: 3,
            shape: Some((3, 4)),
            order: 4,
            samples: crate::deformation::default_samples(),
            resolution: ResolutionOptions::default(),
            exec: Exec::default(),
        };
        let a = random_report(&opts).unwrap();
        assert_eq!(a, random_report(&opts).unwrap());
        assert_eq!(a.counts.lemma_verified, 3);
        assert_eq!(a.counts.theorem_identity, 3);
        assert_eq!(a.counts.flat_family, 3);
        let empty = random_report(&RandomOptions { trials: 0, shape: None, ..opts }).unwrap();
        assert_eq!(empty.counts.trials, 0);
    }
}
