//! Command-line front end for the socle3 library.
//!
//! Exit codes: 0 success, 2 parse error, 3 mathematical precondition
//! violated, 4 resource guard.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use socle3::deformation::{default_samples, MAX_DEGREE, START_DEGREE};
use socle3::report::{
    ann_report, deform_report, parse_dual, poincare_report, random_report, structure_report, PoincareOptions,
    PoincareReport, RandomOptions, RandomReport, SeriesPrediction,
};
use socle3::resolution::{max_dim_from_env, Arithmetic, FormulaVariant, ResolutionOptions, DEFAULT_N};
use socle3::{parse_poly, Error, Exec, Rat, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "socle3", version, about = "Inverse systems, Poincaré series and flat families of socle-degree-3 Gorenstein algebras")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Run without worker threads.
    #[arg(long, global = true)]
    sequential: bool,
    /// Resolve modulo the prime 2^61-1 instead of over the rationals
    /// (faster, not certified).
    #[arg(long, global = true)]
    prime: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Annihilator of a dual generator: length, Hilbert function, socle.
    Ann {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        f: String,
    },
    /// The structure ideal of F3 + y_{n+1}^2 + ... + y_h^2 and the lemma check.
    Structure {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        f3: String,
    },
    /// Direct Betti numbers against the Poincaré-series formulas.
    Poincare {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        f: String,
        /// Embedding dimension of Q(0); computed when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Number of Betti numbers past b_0.
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        order: usize,
        /// Select the formula without the factor z.
        #[arg(long)]
        as_displayed: bool,
        /// Degree bound for the rational fit.
        #[arg(long, default_value_t = 4)]
        max_deg: usize,
        /// Also check the socle-element and Gorenstein reduction formulas.
        #[arg(long)]
        socle_formulas: bool,
    },
    /// Flat-family checks for J_b over a list of base points.
    Deform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        f3: String,
        /// Comma-separated rationals.
        #[arg(long, default_value = "0,1,-1,2,1/2")]
        b: String,
    },
    /// Seeded random cubics through the structure, Poincaré and family checks.
    Random {
        #[arg(long, requires = "h")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        h: Option<usize>,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        order: usize,
        #[arg(long, default_value = "0,1,-1,2,1/2")]
        b: String,
    },
}

/// Everything that determines a run, echoed in the JSON output.
#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    h: Option<usize>,
    n: Option<usize>,
    dual_generator: Option<String>,
    betti_order: Option<usize>,
    truncation_start: usize,
    truncation_cap: usize,
    b_samples: Option<Vec<String>>,
    seed: Option<u64>,
    trials: Option<usize>,
    format: Format,
    formula_variant: FormulaVariant,
    arithmetic: Arithmetic,
    max_dim: usize,
}

#[derive(Serialize)]
struct Versions {
    socle3: &'static str,
    schema: u32,
}

#[derive(Serialize)]
struct Output<R: Serialize> {
    command: &'static str,
    config: RunConfig,
    result: R,
    versions: Versions,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_parse() {
        2
    } else if e.is_resource() {
        4
    } else {
        3
    }
}

fn parse_samples(text: &str) -> Result<Vec<Rat>, Error> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let p = parse_poly(part, Space::Ring, 1).map_err(|e| match e {
            Error::Parse { offset: o, message } => Error::Parse { offset: offset + o, message },
            other => other,
        })?;
        if p.degree() > 0 {
            return Err(Error::Parse { offset, message: "expected a rational number".into() });
        }
        out.push(p.coeff(&socle3::Monomial::one(1)));
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit<R: Serialize>(cli: &Cli, config: RunConfig, result: &R, text: impl FnOnce(&R) -> String) {
    match cli.format {
        Format::Json => {
            let out = Output {
                command: config.command,
                config,
                result,
                versions: Versions { socle3: env!("CARGO_PKG_VERSION"), schema: 1 },
            };
            write_stdout(&(serde_json::to_string_pretty(&out).expect("reports serialize") + "\n"));
        }
        Format::Text => write_stdout(&text(result)),
    }
}

fn seq<T: ToString>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn prediction_line(name: &str, p: &SeriesPrediction) -> String {
    match (&p.coefficients, &p.error) {
        (Some(c), _) => format!(
            "{name}: {} {}\n",
            seq(c),
            match p.first_mismatch {
                None => "matches".to_string(),
                Some(i) => format!("differs at z^{i}"),
            }
        ),
        (None, Some(e)) => format!("{name}: not expandable ({e})\n"),
        _ => format!("{name}: -\n"),
    }
}

fn poincare_text(r: &PoincareReport) -> String {
    let mut s = format!("F = {}\nh = {}, n = {}, dim A = {}\n", r.f, r.h, r.n, r.algebra_dim);
    s += &format!("direct betti: {}\n", seq(&r.direct));
    s += &format!("Q(0) betti: {}\n", seq(&r.q0_betti));
    s += &prediction_line("proof-consistent prediction", &r.proof_consistent);
    s += &prediction_line("as-displayed prediction", &r.as_displayed);
    s += &format!("selected variant ({:?}) matches: {}\n", r.selected_variant, r.selected().matches);
    match (&r.koszul.formula, &r.koszul.prediction) {
        (Some(f), Some(p)) => {
            s += &format!("Q(0) numerically Koszul: {}\n", r.koszul.q0_is_koszul.unwrap_or(false));
            s += &prediction_line(&format!("Koszul formula {}", f.text), p);
        }
        _ => s += &format!("Koszul formula: not applicable ({})\n", r.koszul.reason.clone().unwrap_or_default()),
    }
    match &r.fit {
        Some(f) => s += &format!("fit (max degree {}): {}\n", r.fit_max_degree, f.text),
        None => s += &format!("fit (max degree {}): none\n", r.fit_max_degree),
    }
    if let Some(sf) = &r.socle_formulas {
        for (name, c) in [("socle-element formula", &sf.socle_element), ("Gorenstein formula", &sf.gorenstein)] {
            if c.applicable {
                s += &format!("{name}: predicted {} holds {}\n", c.predicted.as_deref().map(seq).unwrap_or("-".into()), c.holds);
            } else {
                s += &format!("{name}: not applicable ({})\n", c.reason.clone().unwrap_or_default());
            }
        }
    }
    s
}

fn random_text(r: &RandomReport) -> String {
    let c = &r.counts;
    let mut s = format!("seed {} trials {}\n", r.seed, c.trials);
    for t in &r.results {
        s += &format!(
            "#{} n={} h={} F3 = {}: lemma {} hf {} theorem {} family {}{}\n",
            t.case.trial,
            t.case.n,
            t.case.h,
            socle3::print_poly(&t.case.f3),
            t.lemma_verified,
            t.hilbert_shape_ok,
            t.theorem_identity,
            t.flat_family.map_or("n/a".to_string(), |b| b.to_string()),
            t.error.as_ref().map_or(String::new(), |e| format!(" error: {e}")),
        );
    }
    s += &format!(
        "lemma verified {}/{}\nhilbert shape {}/{}\ntheorem identity {}/{}\nflat family {}/{}\n",
        c.lemma_verified, c.trials, c.hilbert_shape, c.trials, c.theorem_identity, c.trials, c.flat_family, c.flat_family_applicable
    );
    s
}

fn run(cli: &Cli) -> Result<(), Error> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let arithmetic = if cli.prime { Arithmetic::Prime } else { Arithmetic::Exact };
    let resolution = ResolutionOptions { exec, arithmetic, ..Default::default() };
    let config = |command: &'static str| RunConfig {
        command,
        h: None,
        n: None,
        dual_generator: None,
        betti_order: None,
        truncation_start: START_DEGREE,
        truncation_cap: MAX_DEGREE,
        b_samples: None,
        seed: None,
        trials: None,
        format: cli.format,
        formula_variant: FormulaVariant::ProofConsistent,
        arithmetic,
        max_dim: max_dim_from_env(),
    };
    match &cli.command {
        Command::Ann { h, f } => {
            let poly = parse_dual(f, *h)?;
            let r = ann_report(&poly)?;
            let cfg = RunConfig { h: Some(*h), dual_generator: Some(f.clone()), ..config("ann") };
            emit(cli, cfg, &r, |r| {
                format!("F = {}\ndim = {}\nhf = {}\nsocle_dim = {}\ngorenstein = {}\n", r.f, r.dim, seq(&r.hf), r.socle_dim, r.gorenstein)
            });
        }
        Command::Structure { n, h, f3 } => {
            let poly = parse_dual(f3, *n)?;
            let r = structure_report(&poly, *n, *h)?;
            let cfg = RunConfig { h: Some(*h), n: Some(*n), dual_generator: Some(f3.clone()), ..config("structure") };
            emit(cli, cfg, &r, |r| {
                let mut s = format!("sigma = {}\nhf = {}\ngenerators:\n", r.sigma, seq(&r.hilbert_function));
                for g in &r.generators {
                    s += &format!("  {g}\n");
                }
                s + &format!("lemma_verified = {}\n", r.lemma_verified)
            });
        }
        Command::Poincare { h, f, n, order, as_displayed, max_deg, socle_formulas } => {
            let poly = parse_dual(f, *h)?;
            let variant = if *as_displayed { FormulaVariant::AsDisplayed } else { FormulaVariant::ProofConsistent };
            let opts = PoincareOptions {
                order: *order,
                variant,
                max_fit_degree: *max_deg,
                socle_formulas: *socle_formulas,
                resolution,
            };
            let r = poincare_report(&poly, *n, &opts)?;
            let cfg = RunConfig {
                h: Some(*h),
                n: *n,
                dual_generator: Some(f.clone()),
                betti_order: Some(*order),
                formula_variant: variant,
                ..config("poincare")
            };
            emit(cli, cfg, &r, poincare_text);
        }
        Command::Deform { n, h, f3, b } => {
            let poly = parse_dual(f3, *n)?;
            let samples = parse_samples(b)?;
            let r = deform_report(&poly, *n, *h, samples.clone(), exec)?;
            let cfg = RunConfig {
                h: Some(*h),
                n: Some(*n),
                dual_generator: Some(f3.clone()),
                b_samples: Some(samples.iter().map(|x| x.to_string()).collect()),
                ..config("deform")
            };
            emit(cli, cfg, &r, |r| {
                let mut s = String::from("b\tdim\tD\tstabilized\tcoprime\tintersection\tsplit\n");
                let opt = |x: Option<bool>| x.map_or("-".to_string(), |b| b.to_string());
                for f in &r.fibers {
                    let split = match f.split_dimension {
                        Some(d) => format!("{} ({} = 1 + {})", opt(f.split_dimension_check), f.fiber_dimension, d),
                        None => "-".into(),
                    };
                    s += &format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                        f.b,
                        f.fiber_dimension,
                        f.truncation_used,
                        f.stabilized,
                        opt(f.coprime),
                        opt(f.intersection_verified),
                        split
                    );
                }
                s + &format!(
                    "expected length {}; J_0 = Ann(F): {}; verified: {}\n",
                    r.expected_dimension, r.special_fiber_is_annihilator, r.verified
                )
            });
        }
        Command::Random { n, h, trials, seed, order, b } => {
            let samples = if b.is_empty() { default_samples() } else { parse_samples(b)? };
            let opts = RandomOptions {
                seed: *seed,
                trials: *trials,
                shape: n.zip(*h),
                order: *order,
                samples: samples.clone(),
                resolution,
                exec,
            };
            let r = random_report(&opts)?;
            let cfg = RunConfig {
                h: *h,
                n: *n,
                betti_order: Some(*order),
                b_samples: Some(samples.iter().map(|x| x.to_string()).collect()),
                seed: Some(*seed),
                trials: Some(*trials),
                ..config("random")
            };
            emit(cli, cfg, &r, random_text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
