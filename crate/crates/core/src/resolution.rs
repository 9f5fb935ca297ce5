//! Minimal free resolutions of the residue field over a local algebra, and
//! the Poincaré-series identities they are checked against.
//!
//! The resolution is built one syzygy module at a time. For a free module
//! `F_i = A^{b_i}` with generator images `g_k ∈ F_{i-1}`, the syzygies
//! `Z_i = ker(F_i → F_{i-1})` are computed as the kernel of the `K`-linear
//! map `(k, a) ↦ a g_k` on the `d b_i` basis vectors of `F_i`, and the next
//! generators are a basis of `Z_i` modulo `𝔪 Z_i`.
//!
//! When the algebra carries a grading every module is graded, so both
//! computations split into independent blocks, one per degree; these blocks
//! are processed in parallel. An ungraded algebra is the one-block case.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::apolarity::{add_degrees, hilbert_function, Degree, Element, LocalAlgebra};
use crate::error::{Error, Result};
use crate::field::{Field, Fp, Rat};
use crate::linalg::{self, Echelon, KernelBuilder, SparseVec};
use crate::par::Exec;

/// Default number of Betti numbers past `b_0`.
pub const DEFAULT_N: usize = 6;
/// Largest supported resolution length.
pub const MAX_N: usize = 10;
/// Default bound on the ambient dimension `d * b_i` of a syzygy computation.
pub const DEFAULT_MAX_DIM: usize = 250_000;
/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "SOCLE3_MAX_DIM";

/// The resource guard in effect: `SOCLE3_MAX_DIM` if set to a number,
/// otherwise [`DEFAULT_MAX_DIM`].
pub fn max_dim_from_env() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BettiSource {
    DirectResolution,
    FormulaExpansion,
}

/// Betti numbers `b_0..b_N` of the residue field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiSequence {
    pub values: Vec<i64>,
    pub algebra_dim: usize,
    pub source: BettiSource,
}

/// Coefficient arithmetic of the syzygy computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Exact rationals (certified).
    Exact,
    /// Reduction modulo the prime `2^61 - 1`. Agrees with the exact answer
    /// unless the prime divides some determinant; not certified.
    Prime,
}

#[derive(Clone, Debug)]
pub struct ResolutionOptions {
    pub max_dim: usize,
    pub exec: Exec,
    pub arithmetic: Arithmetic,
    /// Use the grading of the algebra, if it has one, to split the linear
    /// algebra into blocks.
    pub graded: bool,
    /// Keep the presentation matrices (exact arithmetic only).
    pub keep_matrices: bool,
    /// Check composition to zero and minimality of every computed step.
    pub verify: bool,
}

impl Default for ResolutionOptions {
    fn default() -> Self {
        ResolutionOptions {
            max_dim: max_dim_from_env(),
            exec: Exec::default(),
            arithmetic: Arithmetic::Exact,
            graded: true,
            keep_matrices: false,
            verify: true,
        }
    }
}

/// The differential `F_i → F_{i-1}`: entry `[k][l]` is the coefficient of the
/// `l`-th generator of `F_{i-1}` in the image of the `k`-th generator of
/// `F_i`. For `i = 1` the target is `F_0 = A`.
#[derive(Clone, Debug)]
pub struct ResolutionStep {
    pub index: usize,
    pub rank: usize,
    pub presentation: Vec<Vec<Element>>,
}

/// Outcome of the per-step checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionChecks {
    pub composition_zero: bool,
    pub minimal: bool,
    pub b1_is_embedding_dim: bool,
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub betti: BettiSequence,
    pub steps: Vec<ResolutionStep>,
    pub checks: ResolutionChecks,
}

/// Scalars the resolution can run over.
pub trait Scalar: Field {
    /// Whether rank questions may first be tried modulo a prime: a rank
    /// found there is a lower bound for the rank over these scalars.
    const RANK_MOD_P: bool = false;

    fn from_rat(r: &Rat) -> Option<Self>;
    fn to_rat(&self) -> Rat;

    fn mod_p(&self) -> Option<Fp> {
        None
    }

    /// Rescales a nonzero vector to a convenient representative of its line.
    fn normalize(v: SparseVec<Self>) -> SparseVec<Self> {
        v
    }
}

impl Scalar for Rat {
    const RANK_MOD_P: bool = true;

    fn from_rat(r: &Rat) -> Option<Rat> {
        Some(r.clone())
    }

    fn mod_p(&self) -> Option<Fp> {
        Fp::from_rat(self)
    }

    fn to_rat(&self) -> Rat {
        self.clone()
    }

    /// Coprime integer entries: keeps the syzygies of later steps small.
    fn normalize(v: SparseVec<Rat>) -> SparseVec<Rat> {
        use num_integer::Integer;
        use num_traits::{One, Zero};
        let mut l = num_bigint::BigInt::one();
        let mut g = num_bigint::BigInt::zero();
        for (_, c) in &v {
            l = l.lcm(&c.denom());
            g = g.gcd(&c.numer());
        }
        if l.is_one() && g.is_one() {
            return v;
        }
        let f = Rat::from_bigints(l, g).expect("nonzero vector");
        v.into_iter().map(|(i, c)| (i, c.mul(&f))).collect()
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn from_rat(r: &Rat) -> Option<Self> {
        Fp::<P>::from_rat(r)
    }

    fn to_rat(&self) -> Rat {
        Rat::from_int(self.value() as i64)
    }
}

/// Multiplication table of the algebra over the working scalars.
struct Table<F> {
    d: usize,
    prod: Vec<SparseVec<F>>,
    deg: Vec<Degree>,
    mgens: Vec<usize>,
    /// Basis indices grouped by degree, in increasing degree order.
    by_degree: Vec<(Degree, Vec<u32>)>,
    /// The same table modulo a prime, when it can be used for rank bounds.
    modp: Option<Box<Table<Fp>>>,
}

impl<F: Scalar> Table<F> {
    fn new(a: &LocalAlgebra, graded: bool) -> Result<Table<F>> {
        let d = a.dim();
        let mut prod = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut row = Vec::with_capacity(a.product(i, j).len());
                for (k, c) in a.product(i, j) {
                    let x = F::from_rat(c).ok_or_else(|| {
                        Error::precondition("the prime divides a denominator of the multiplication table")
                    })?;
                    if !x.is_zero() {
                        row.push((*k, x));
                    }
                }
                prod.push(row);
            }
        }
        let deg: Vec<Degree> = if graded { a.degrees().to_vec() } else { vec![(0, 0); d] };
        let mut groups: BTreeMap<Degree, Vec<u32>> = BTreeMap::new();
        for (i, t) in deg.iter().enumerate() {
            groups.entry(*t).or_default().push(i as u32);
        }
        let modp = if F::RANK_MOD_P { Table::<Fp>::new(a, graded).ok().map(Box::new) } else { None };
        Ok(Table { d, prod, deg, mgens: a.max_ideal_generators().to_vec(), by_degree: groups.into_iter().collect(), modp })
    }

    /// `e_a * v` for `v` in a free module `A^b` (index `k * d + j`).
    fn mul(&self, a: usize, v: &[(u32, F)]) -> SparseVec<F> {
        let d = self.d as u32;
        let mut out = Vec::with_capacity(v.len() * 2);
        for (idx, c) in v {
            let (k, j) = (idx / d, idx % d);
            for (l, x) in &self.prod[a * self.d + j as usize] {
                out.push((k * d + l, c.mul(x)));
            }
        }
        linalg::collect_sparse(out)
    }

    /// The differential applied to a vector of `F_i`, given the generator
    /// images of `F_i`.
    fn apply(&self, gens: &[Gen<F>], v: &[(u32, F)]) -> SparseVec<F> {
        let d = self.d as u32;
        let mut out = Vec::new();
        for (idx, c) in v {
            let (k, a) = (idx / d, idx % d);
            for (l, x) in self.mul(a as usize, &gens[k as usize].image) {
                out.push((l, c.mul(&x)));
            }
        }
        linalg::collect_sparse(out)
    }
}

/// A generator of a free module in the resolution with its image.
#[derive(Clone, Debug)]
struct Gen<F> {
    deg: Degree,
    image: SparseVec<F>,
}

fn sub_degree(t: Degree, x: Degree) -> Option<Degree> {
    (t.0 >= x.0).then(|| (t.0 - x.0, t.1 ^ x.1))
}

type Blocks<F> = BTreeMap<Degree, Vec<SparseVec<F>>>;

/// Syzygies of the generators `gens`, block by block.
fn syzygies<F: Scalar>(tab: &Table<F>, gens: &[Gen<F>], exec: Exec) -> Blocks<F> {
    let d = tab.d as u32;
    let mut columns: BTreeMap<Degree, Vec<u32>> = BTreeMap::new();
    for (k, g) in gens.iter().enumerate() {
        for (delta, members) in &tab.by_degree {
            let t = add_degrees(g.deg, *delta);
            let col = columns.entry(t).or_default();
            col.extend(members.iter().map(|a| k as u32 * d + a));
        }
    }
    let blocks: Vec<(Degree, Vec<u32>)> = columns.into_iter().collect();
    let kernels = exec.map(&blocks, |(_, cols)| {
        let mut kb = KernelBuilder::new();
        for &c in cols {
            let (k, a) = (c / d, c % d);
            kb.push_column(c, tab.mul(a as usize, &gens[k as usize].image));
        }
        kb.into_kernel().into_iter().map(F::normalize).collect::<Vec<_>>()
    });
    blocks
        .into_iter()
        .zip(kernels)
        .filter(|(_, k)| !k.is_empty())
        .map(|((t, _), k)| (t, k))
        .collect()
}

/// A basis of `Z / 𝔪 Z`, lifted to `Z`, as the next generators.
fn minimal_generators<F: Scalar>(tab: &Table<F>, z: &Blocks<F>, exec: Exec) -> Vec<Gen<F>> {
    let keys: Vec<Degree> = z.keys().copied().collect();
    let per_block = exec.map(&keys, |t| {
        let target = z[t].len();
        if tab.modp.as_deref().is_some_and(|tp| spans_mod_p(tab, tp, z, *t)) {
            return Vec::new();
        }
        let mut e = Echelon::new();
        'fill: for &x in &tab.mgens {
            let Some(src) = sub_degree(*t, tab.deg[x]) else { continue };
            let Some(vs) = z.get(&src) else { continue };
            for v in vs {
                e.insert(tab.mul(x, v));
                if e.rank() == target {
                    break 'fill;
                }
            }
        }
        let mut fresh = Vec::new();
        for v in &z[t] {
            if e.rank() == target {
                break;
            }
            if e.insert(v.clone()) {
                fresh.push(Gen { deg: *t, image: v.clone() });
            }
        }
        fresh
    });
    per_block.into_iter().flatten().collect()
}

fn reduce_mod_p<F: Scalar>(v: &[(u32, F)]) -> Option<SparseVec<Fp>> {
    let mut out = Vec::with_capacity(v.len());
    for (i, c) in v {
        let x = c.mod_p()?;
        if !x.is_zero() {
            out.push((*i, x));
        }
    }
    Some(out)
}

/// Whether `𝔪 Z_t` has full rank `dim Z_t` modulo the prime. Reduction mod
/// `p` cannot raise a rank, so a `true` answer holds over `F` as well.
fn spans_mod_p<F: Scalar>(tab: &Table<F>, tp: &Table<Fp>, z: &Blocks<F>, t: Degree) -> bool {
    let target = z[&t].len();
    let mut e: Echelon<Fp> = Echelon::new();
    for &x in &tab.mgens {
        let Some(src) = sub_degree(t, tab.deg[x]) else { continue };
        let Some(vs) = z.get(&src) else { continue };
        for v in vs {
            let Some(vp) = reduce_mod_p(v) else { return false };
            e.insert(tp.mul(x, &vp));
            if e.rank() == target {
                return true;
            }
        }
    }
    false
}

fn guard(what: String, needed: usize, limit: usize) -> Result<()> {
    if needed > limit {
        return Err(Error::Resource { what, needed, limit });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Resource { what: "resolution length".into(), needed: n, limit: MAX_N });
    }
    Ok(())
}

struct Raw<F> {
    betti: Vec<i64>,
    steps: Vec<Vec<Gen<F>>>,
    checks: ResolutionChecks,
}

fn resolve_raw<F: Scalar>(a: &LocalAlgebra, n: usize, opts: &ResolutionOptions) -> Result<Raw<F>> {
    check_n(n)?;
    let tab: Table<F> = Table::new(a, opts.graded)?;
    let d = tab.d;
    let mut betti = vec![1i64];
    let mut checks = ResolutionChecks { composition_zero: true, minimal: true, b1_is_embedding_dim: true };
    let mut steps: Vec<Vec<Gen<F>>> = Vec::new();
    // F_0 = A; its syzygies (the kernel of A → K) are the maximal ideal.
    let mut current: Vec<Gen<F>> = vec![Gen { deg: (0, 0), image: Vec::new() }];
    for i in 0..n {
        let z: Blocks<F> = if i == 0 {
            let mut z: Blocks<F> = BTreeMap::new();
            for j in 1..d {
                z.entry(tab.deg[j]).or_default().push(vec![(j as u32, F::one())]);
            }
            z
        } else {
            guard(format!("syzygies of step {i}"), d * current.len(), opts.max_dim)?;
            syzygies(&tab, &current, opts.exec)
        };
        let next = minimal_generators(&tab, &z, opts.exec);
        if opts.verify {
            let dd = d as u32;
            checks.minimal &= next.iter().all(|g| g.image.iter().all(|(idx, _)| idx % dd != 0));
            if i > 0 {
                let ok = opts.exec.map(&next, |g| tab.apply(&current, &g.image).is_empty());
                checks.composition_zero &= ok.into_iter().all(|b| b);
            }
        }
        betti.push(next.len() as i64);
        if i == 0 {
            checks.b1_is_embedding_dim = next.len() == a.embedding_dim();
        }
        if opts.keep_matrices {
            steps.push(next.clone());
        }
        current = next;
    }
    Ok(Raw { betti, steps, checks })
}

fn to_presentation<F: Scalar>(gens: &[Gen<F>], d: usize, prev_rank: usize) -> Vec<Vec<Element>> {
    gens.iter()
        .map(|g| {
            let mut row: Vec<Element> = vec![Vec::new(); prev_rank];
            for (idx, c) in &g.image {
                let (k, a) = (*idx as usize / d, *idx % d as u32);
                row[k].push((a, c.to_rat()));
            }
            row
        })
        .collect()
}

/// Minimal free resolution of the residue field through `F_N`.
pub fn resolve(a: &LocalAlgebra, n: usize, opts: &ResolutionOptions) -> Result<Resolution> {
    let (betti, steps, checks) = match opts.arithmetic {
        Arithmetic::Exact => {
            let raw = resolve_raw::<Rat>(a, n, opts)?;
            let mut prev = 1usize;
            let steps = raw
                .steps
                .iter()
                .enumerate()
                .map(|(i, gens)| {
                    let s = ResolutionStep { index: i + 1, rank: gens.len(), presentation: to_presentation(gens, a.dim(), prev) };
                    prev = gens.len();
                    s
                })
                .collect();
            (raw.betti, steps, raw.checks)
        }
        Arithmetic::Prime => {
            let raw = resolve_raw::<Fp>(a, n, opts)?;
            (raw.betti, Vec::new(), raw.checks)
        }
    };
    Ok(Resolution {
        betti: BettiSequence { values: betti, algebra_dim: a.dim(), source: BettiSource::DirectResolution },
        steps,
        checks,
    })
}

/// `b_0..b_N` by direct resolution with default options.
pub fn betti_numbers(a: &LocalAlgebra, n: usize) -> Result<BettiSequence> {
    betti_numbers_with(a, n, &ResolutionOptions::default())
}

pub fn betti_numbers_with(a: &LocalAlgebra, n: usize, opts: &ResolutionOptions) -> Result<BettiSequence> {
    let r = resolve(a, n, opts)?;
    if !(r.checks.composition_zero && r.checks.minimal && r.checks.b1_is_embedding_dim) {
        return Err(Error::precondition(format!("resolution self-check failed: {:?}", r.checks)));
    }
    Ok(r.betti)
}

// ---------------------------------------------------------------------------
// Power series and rational functions in z.

fn rats(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_int(x)).collect()
}

fn coeff(v: &[Rat], i: usize) -> Rat {
    v.get(i).cloned().unwrap_or_else(Rat::zero)
}

/// Product of power series through `z^n`.
pub fn series_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    (0..=n)
        .map(|k| (0..=k).fold(Rat::zero(), |s, i| s.add(&coeff(a, i).mul(&coeff(b, k - i)))))
        .collect()
}

/// Quotient of power series through `z^n`; the divisor needs a nonzero
/// constant term.
pub fn series_div(a: &[Rat], b: &[Rat], n: usize) -> Result<Vec<Rat>> {
    let b0 = coeff(b, 0);
    if b0.is_zero() {
        return Err(Error::precondition("divisor has zero constant term; the quotient is not a power series"));
    }
    let inv = b0.inv();
    let mut q: Vec<Rat> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut s = coeff(a, k);
        for i in 1..=k {
            s = s.sub(&coeff(b, i).mul(&q[k - i]));
        }
        q.push(s.mul(&inv));
    }
    Ok(q)
}

fn integral(v: Vec<Rat>) -> Result<Vec<i64>> {
    v.into_iter()
        .enumerate()
        .map(|(i, c)| {
            if !c.is_integer() {
                return Err(Error::precondition(format!("coefficient of z^{i} is {c}, not an integer")));
            }
            c.to_i64().ok_or_else(|| Error::Overflow(format!("coefficient of z^{i}")))
        })
        .collect()
}

/// A rational function `num / den` in `z` with integer coefficients
/// (ascending powers), in lowest terms with `den(0) > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFunction {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = trim(a.to_vec());
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let c = r.last().unwrap().mul(&lb.inv());
        let shift = r.len() - b.len();
        for (i, x) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&c.mul(x));
        }
        r = trim(r);
    }
    r
}

fn poly_div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    if r.is_empty() {
        return r;
    }
    let mut q = vec![Rat::zero(); r.len() + 1 - b.len()];
    let lb = b.last().unwrap().inv();
    while r.len() >= b.len() && !r.is_empty() {
        let c = r.last().unwrap().mul(&lb);
        let shift = r.len() - b.len();
        q[shift] = c.clone();
        for (i, x) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&c.mul(x));
        }
        r = trim(r);
    }
    q
}

fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x
}

impl RationalFunction {
    pub fn new(num: Vec<i64>, den: Vec<i64>) -> Result<RationalFunction> {
        RationalFunction::from_rats(&rats(&num), &rats(&den))
    }

    /// Normalizes: cancels the polynomial gcd, clears denominators and
    /// content, and makes the constant term of the denominator positive.
    pub fn from_rats(num: &[Rat], den: &[Rat]) -> Result<RationalFunction> {
        if coeff(den, 0).is_zero() {
            return Err(Error::precondition("denominator with zero constant term"));
        }
        let (num, den) = (trim(num.to_vec()), trim(den.to_vec()));
        if num.is_empty() {
            return Ok(RationalFunction { num: Vec::new(), den: vec![1] });
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = (poly_div_exact(&num, &g), poly_div_exact(&den, &g));
        use num_integer::Integer;
        use num_traits::{ToPrimitive, Zero};
        let mut l = num_bigint::BigInt::from(1);
        for c in num.iter().chain(&den) {
            l = l.lcm(&c.denom());
        }
        let ints: Vec<num_bigint::BigInt> = num.iter().chain(&den).map(|c| c.numer() * (&l / c.denom())).collect();
        let mut g = num_bigint::BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if den[0].is_negative() {
            g = -g;
        }
        let conv = |c: &num_bigint::BigInt| -> Result<i64> {
            (c / &g).to_i64().ok_or_else(|| Error::Overflow("rational function coefficient".into()))
        };
        let (a, b) = ints.split_at(num.len());
        let out = RationalFunction { num: a.iter().map(conv).collect::<Result<_>>()?, den: b.iter().map(conv).collect::<Result<_>>()? };
        debug_assert!(out.den[0].is_positive());
        Ok(out)
    }

    /// `1 / den`.
    pub fn reciprocal(den: Vec<i64>) -> Result<RationalFunction> {
        RationalFunction::new(vec![1], den)
    }

    pub fn num_rats(&self) -> Vec<Rat> {
        rats(&self.num)
    }

    pub fn den_rats(&self) -> Vec<Rat> {
        rats(&self.den)
    }

    /// `Some((a, k))` if the denominator is `(1 - a z)^k` with `k >= 1`.
    fn as_power(&self) -> Option<(i64, u32)> {
        let k = self.den.len().checked_sub(1)? as u32;
        if k == 0 || self.den[0] != 1 || self.den[1] % k as i64 != 0 {
            return None;
        }
        let a = -self.den[1] / k as i64;
        let mut p = vec![1i64];
        for _ in 0..k {
            let mut q = vec![0i64; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] = q[i].checked_add(*c)?;
                q[i + 1] = q[i + 1].checked_sub(a.checked_mul(*c)?)?;
            }
            p = q;
        }
        (p == self.den).then_some((a, k))
    }
}

fn poly_text(p: &[i64]) -> String {
    let mut s = String::new();
    for (e, &c) in p.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let a = c.unsigned_abs();
        let body = match (e, a) {
            (0, _) => a.to_string(),
            (1, 1) => "z".to_string(),
            (1, _) => format!("{a}z"),
            (_, 1) => format!("z^{e}"),
            _ => format!("{a}z^{e}"),
        };
        s.push_str(sign);
        s.push_str(&body);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz = self.num.iter().filter(|&&c| c != 0).count();
        let num = if nz > 1 { format!("({})", poly_text(&self.num)) } else { poly_text(&self.num) };
        if self.den == [1] {
            return write!(f, "{num}");
        }
        match self.as_power() {
            Some((a, k)) => {
                let base = poly_text(&[1, -a]);
                if k == 1 {
                    write!(f, "{num}/({base})")
                } else {
                    write!(f, "{num}/({base})^{k}")
                }
            }
            None => write!(f, "{num}/({})", poly_text(&self.den)),
        }
    }
}

/// The first `n + 1` Taylor coefficients at `z = 0`, which must be integers.
pub fn series_expand(f: &RationalFunction, n: usize) -> Result<Vec<i64>> {
    integral(series_div(&f.num_rats(), &f.den_rats(), n)?)
}

/// Solves `m x = rhs` exactly; free unknowns are set to zero. `None` if the
/// system is inconsistent.
fn solve(mut m: Vec<Vec<Rat>>, mut rhs: Vec<Rat>, unknowns: usize) -> Option<Vec<Rat>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].inv();
        for j in 0..unknowns {
            m[r][j] = m[r][j].mul(&inv);
        }
        rhs[r] = rhs[r].mul(&inv);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..unknowns {
                    let v = m[r][j].mul(&f);
                    m[i][j] = m[i][j].sub(&v);
                }
                rhs[i] = rhs[i].sub(&rhs[r].mul(&f));
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// The rational function of least total degree (numerator and denominator
/// degrees at most `max_deg`) reproducing `series`, fitted on all but the
/// last two coefficients and required to predict those two. Candidates
/// whose fitting system has fewer equations than unknowns are skipped, so
/// with fewer than `2 max_deg + 2` coefficients only the low-degree
/// candidates are tried. Returns `None` if nothing fits.
pub fn fit_rational(series: &[i64], max_deg: usize) -> Option<RationalFunction> {
    let len = series.len();
    if len < 3 {
        return None;
    }
    let train = len - 2;
    let s = rats(series);
    for total in 0..=2 * max_deg {
        for q in 0..=total.min(max_deg) {
            let p = total - q;
            if p > max_deg || p + q + 1 > train {
                continue;
            }
            // den = 1 + q_1 z + ... ; (den * s)_k = 0 for p < k < train.
            let eqs: Vec<usize> = (p + 1..train).collect();
            if eqs.len() < q {
                continue;
            }
            let m: Vec<Vec<Rat>> = eqs
                .iter()
                .map(|&k| (1..=q).map(|j| if k >= j { s[k - j].clone() } else { Rat::zero() }).collect())
                .collect();
            let rhs: Vec<Rat> = eqs.iter().map(|&k| s[k].neg()).collect();
            let Some(x) = solve(m, rhs, q) else { continue };
            let mut den = vec![Rat::one()];
            den.extend(x);
            let num: Vec<Rat> = series_mul(&den, &s, p);
            let Ok(f) = RationalFunction::from_rats(&num, &den) else { continue };
            if series_expand(&f, len - 1).ok().as_deref() == Some(series) {
                return Some(f);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Formulas.

/// How the main formula combines `P_B`, the Poincaré series of the top
/// subquotient, with the number `h - n` of quadratic tail variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaVariant {
    /// `P_B / (1 - (h-n) z P_B)`.
    ProofConsistent,
    /// `P_B / (1 - (h-n) P_B)`.
    AsDisplayed,
}

fn check_series_len(betti: &[i64], n: usize) -> Result<()> {
    if betti.len() < n + 1 {
        return Err(Error::precondition(format!("need {} coefficients, got {}", n + 1, betti.len())));
    }
    Ok(())
}

/// Coefficients through `z^N` of `P_B / (1 - (h-n) z P_B)`.
pub fn main_theorem_prediction(betti_q0: &[i64], h: usize, n: usize, big_n: usize) -> Result<Vec<i64>> {
    main_theorem_prediction_variant(betti_q0, h, n, big_n, FormulaVariant::ProofConsistent)
}

pub fn main_theorem_prediction_variant(
    betti_q0: &[i64],
    h: usize,
    n: usize,
    big_n: usize,
    variant: FormulaVariant,
) -> Result<Vec<i64>> {
    if h < n {
        return Err(Error::precondition(format!("need n <= h, got n = {n}, h = {h}")));
    }
    check_series_len(betti_q0, big_n)?;
    let pb = rats(&betti_q0[..=big_n]);
    let c = Rat::from_int((h - n) as i64);
    let mut den = vec![Rat::zero(); big_n + 1];
    den[0] = Rat::one();
    match variant {
        FormulaVariant::ProofConsistent => {
            for k in 1..=big_n {
                den[k] = den[k].sub(&c.mul(&pb[k - 1]));
            }
        }
        FormulaVariant::AsDisplayed => {
            for k in 0..=big_n {
                den[k] = den[k].sub(&c.mul(&pb[k]));
            }
        }
    }
    integral(series_div(&pb, &den, big_n)?)
}

/// `1 / (1 - h z + n z^2 - z^3)`.
pub fn koszul_formula(h: usize, n: usize) -> Result<RationalFunction> {
    if n < 1 || n > h {
        return Err(Error::precondition(format!("need 1 <= n <= h, got n = {n}, h = {h}")));
    }
    RationalFunction::reciprocal(vec![1, -(h as i64), n as i64, -1])
}

/// `1 / (n - h + 1 - n z + n z^2 - z^3)`; fails when `h = n + 1`.
pub fn koszul_formula_as_displayed(h: usize, n: usize) -> Result<RationalFunction> {
    if n < 1 || n > h {
        return Err(Error::precondition(format!("need 1 <= n <= h, got n = {n}, h = {h}")));
    }
    RationalFunction::reciprocal(vec![n as i64 - h as i64 + 1, -(n as i64), n as i64, -1])
}

/// Whether `P_B(z) H_B(-z) = 1` through `z^N`.
pub fn is_koszul_numerically(b: &LocalAlgebra, big_n: usize, opts: &ResolutionOptions) -> Result<bool> {
    if big_n < 3 {
        return Err(Error::precondition("the numerical Koszul test needs N >= 3"));
    }
    let p = betti_numbers_with(b, big_n, opts)?;
    let hf = hilbert_function(b).values;
    let hm: Vec<Rat> = hf.iter().enumerate().map(|(i, &v)| Rat::from_int(if i % 2 == 0 { v as i64 } else { -(v as i64) })).collect();
    let prod = series_mul(&rats(&p.values), &hm, big_n);
    Ok(prod.iter().enumerate().all(|(i, c)| if i == 0 { c.is_one() } else { c.is_zero() }))
}

/// One side-by-side comparison of a formula with direct Betti numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaCheck {
    pub applicable: bool,
    pub reason: Option<String>,
    pub quotient_betti: Option<Vec<i64>>,
    pub predicted: Option<Vec<i64>>,
    pub direct: Vec<i64>,
    pub holds: bool,
}

impl FormulaCheck {
    fn skipped(direct: &[i64], reason: &str) -> FormulaCheck {
        FormulaCheck { applicable: false, reason: Some(reason.into()), quotient_betti: None, predicted: None, direct: direct.to_vec(), holds: false }
    }

    fn compare(direct: &[i64], quotient: Vec<i64>, predicted: Result<Vec<i64>>) -> FormulaCheck {
        match predicted {
            Ok(p) => FormulaCheck {
                applicable: true,
                reason: None,
                holds: p == direct,
                quotient_betti: Some(quotient),
                predicted: Some(p),
                direct: direct.to_vec(),
            },
            Err(e) => FormulaCheck {
                applicable: true,
                reason: Some(e.to_string()),
                quotient_betti: Some(quotient),
                predicted: None,
                direct: direct.to_vec(),
                holds: false,
            },
        }
    }
}

/// Comparisons of the socle-element formula `P_{A/xA} / (1 - z P_{A/xA})`
/// and the Gorenstein formula `P_{A/(0:𝔪)} / (1 + z^2 P_{A/(0:𝔪)})`
/// with direct Betti numbers of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SocleFormulaReport {
    pub socle_element: FormulaCheck,
    pub gorenstein: FormulaCheck,
}

pub fn verify_socle_formulas(a: &LocalAlgebra, big_n: usize, opts: &ResolutionOptions) -> Result<SocleFormulaReport> {
    let direct = betti_numbers_with(a, big_n, opts)?.values;
    let socle = a.socle();

    // A socle element outside 𝔪².
    let d = a.dim();
    let mut m2 = Echelon::new();
    for i in 1..d {
        for j in i..d {
            m2.insert(a.product(i, j).clone());
        }
    }
    let witness = socle.iter().find(|v| !m2.contains(v) && v.iter().all(|(i, _)| *i != 0));
    let eq1 = match witness {
        None => FormulaCheck::skipped(&direct, "no socle element outside the square of the maximal ideal"),
        Some(x) => {
            let q = a.quotient_by(std::slice::from_ref(x))?;
            let pq = betti_numbers_with(&q, big_n, opts)?.values;
            let z_pq: Vec<Rat> = std::iter::once(Rat::zero()).chain(rats(&pq)).collect();
            let den: Vec<Rat> = (0..=big_n).map(|k| if k == 0 { Rat::one() } else { z_pq[k].neg() }).collect();
            let pred = series_div(&rats(&pq), &den, big_n).and_then(integral);
            FormulaCheck::compare(&direct, pq, pred)
        }
    };

    let eq2 = if socle.len() != 1 {
        FormulaCheck::skipped(&direct, "the algebra is not Gorenstein")
    } else if d == 1 {
        FormulaCheck::skipped(&direct, "the algebra is the field itself")
    } else {
        let q = a.quotient_by(&socle)?;
        let pq = betti_numbers_with(&q, big_n, opts)?.values;
        let pqr = rats(&pq);
        let den: Vec<Rat> = (0..=big_n).map(|k| match k {
            0 => Rat::one(),
            1 => Rat::zero(),
            _ => pqr[k - 2].clone(),
        }).collect();
        let pred = series_div(&pqr, &den, big_n).and_then(integral);
        FormulaCheck::compare(&direct, pq, pred)
    };
    Ok(SocleFormulaReport { socle_element: eq1, gorenstein: eq2 })
}

/// Expands a rational function into a Betti-style sequence.
pub fn formula_betti(f: &RationalFunction, n: usize, algebra_dim: usize) -> Result<BettiSequence> {
    Ok(BettiSequence { values: series_expand(f, n)?, algebra_dim, source: BettiSource::FormulaExpansion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolarity::{algebra_from_dual, q0};
    use crate::parser::parse_poly;
    use crate::ring::{span_to_degree, Polynomial, Space};

    fn y(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Dual, n).unwrap()
    }

    fn x(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Ring, n).unwrap()
    }

    fn quotient(gens: &[&str], h: usize, d: usize) -> LocalAlgebra {
        let g: Vec<Polynomial> = gens.iter().map(|s| x(s, h)).collect();
        LocalAlgebra::from_ideal(&span_to_degree(h, d, &g).unwrap()).unwrap()
    }

    fn seq(f: &RationalFunction, n: usize) -> Vec<i64> {
        series_expand(f, n).unwrap()
    }

    #[test]
    fn betti_examples() {
        let a = algebra_from_dual(&y("y1^3", 1)).unwrap();
        assert_eq!(betti_numbers(&a, 5).unwrap().values, vec![1; 6]);
        let b = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        assert_eq!(betti_numbers(&b, 4).unwrap().values, vec![1, 3, 8, 21, 55]);
        let c = algebra_from_dual(&y("y1^2+y2^2", 2)).unwrap();
        assert_eq!(betti_numbers(&c, 4).unwrap().values, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn graded_and_ungraded_agree() {
        for (f, h) in [("y1^3+y2^3+y3^2", 3), ("y1*y2*y3+y4^2", 4), ("y1^2*y2+y2^3", 2)] {
            let a = algebra_from_dual(&y(f, h)).unwrap();
            let g = betti_numbers_with(&a, 5, &ResolutionOptions::default()).unwrap();
            let u = betti_numbers_with(&a, 5, &ResolutionOptions { graded: false, ..Default::default() }).unwrap();
            let s = betti_numbers_with(&a, 5, &ResolutionOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
            let p = betti_numbers_with(&a, 5, &ResolutionOptions { arithmetic: Arithmetic::Prime, ..Default::default() }).unwrap();
            assert_eq!(g, u);
            assert_eq!(g, s);
            assert_eq!(g, p);
        }
    }

    #[test]
    fn steps_compose_to_zero_and_are_minimal() {
        let a = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        let r = resolve(&a, 4, &ResolutionOptions { keep_matrices: true, ..Default::default() }).unwrap();
        assert_eq!(r.checks, ResolutionChecks { composition_zero: true, minimal: true, b1_is_embedding_dim: true });
        assert_eq!(r.steps.len(), 4);
        // Independent check of d1 ∘ d2 = 0 using the algebra's own multiplication.
        let (d1, d2) = (&r.steps[0].presentation, &r.steps[1].presentation);
        for row in d2 {
            let mut total: Element = Vec::new();
            for (l, entry) in row.iter().enumerate() {
                let prod = a.mul(entry, &d1[l][0]);
                total = linalg::axpy(&total, &Rat::one(), &prod);
            }
            assert!(total.is_empty());
            assert!(row.iter().all(|e| e.iter().all(|(i, _)| *i != 0)));
        }
    }

    #[test]
    fn resource_guard_trips() {
        let a = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        let e = betti_numbers_with(&a, 4, &ResolutionOptions { max_dim: 30, ..Default::default() }).unwrap_err();
        assert!(e.is_resource());
        assert!(betti_numbers(&a, MAX_N + 1).unwrap_err().is_resource());
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(seq(&RationalFunction::reciprocal(vec![1, -1]).unwrap(), 3), vec![1, 1, 1, 1]);
        assert_eq!(seq(&RationalFunction::reciprocal(vec![1, -3, 1]).unwrap(), 4), vec![1, 3, 8, 21, 55]);
        assert_eq!(seq(&RationalFunction::reciprocal(vec![1, -2, 1]).unwrap(), 4), vec![1, 2, 3, 4, 5]);
        assert!(series_expand(&RationalFunction::reciprocal(vec![2, -1]).unwrap(), 2).is_err());
    }

    #[test]
    fn rational_functions_normalize_and_print() {
        let f = RationalFunction::new(vec![1, -1], vec![1, -2, 1]).unwrap();
        assert_eq!(f, RationalFunction::reciprocal(vec![1, -1]).unwrap());
        assert_eq!(f.to_string(), "1/(1-z)");
        assert_eq!(RationalFunction::reciprocal(vec![1, -2, 1]).unwrap().to_string(), "1/(1-z)^2");
        assert_eq!(RationalFunction::reciprocal(vec![1, -3, 1]).unwrap().to_string(), "1/(1-3z+z^2)");
        assert_eq!(RationalFunction::new(vec![-2], vec![-2, 4]).unwrap().to_string(), "1/(1-2z)");
        assert_eq!(RationalFunction::new(vec![1, 1], vec![1, 0, -1]).unwrap().to_string(), "1/(1-z)");
        assert_eq!(RationalFunction::new(vec![1, 2], vec![1, -3, 3, -1]).unwrap().to_string(), "(1+2z)/(1-z)^3");
        assert!(RationalFunction::new(vec![1], vec![0, 1]).is_err());
    }

    #[test]
    fn fit_examples() {
        assert_eq!(fit_rational(&[1, 1, 1, 1, 1, 1], 2).unwrap().to_string(), "1/(1-z)");
        assert_eq!(fit_rational(&[1, 3, 8, 21, 55, 144], 2).unwrap().to_string(), "1/(1-3z+z^2)");
        assert_eq!(fit_rational(&[1, 2, 3, 4, 5, 6], 2).unwrap().to_string(), "1/(1-z)^2");
        // Held-out coefficients must be predicted.
        assert!(fit_rational(&[1, 3, 8, 21, 55, 145], 2).is_none());
        assert!(fit_rational(&[1, 1, 2], 2).is_none());
        assert_eq!(fit_rational(&[1, 2, 3, 4, 5], 4).unwrap().to_string(), "1/(1-z)^2");
    }

    #[test]
    fn main_theorem_examples() {
        assert_eq!(main_theorem_prediction(&[1, 2, 3, 4, 5], 2, 2, 4).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(main_theorem_prediction(&[1, 2, 3, 4, 5], 3, 2, 4).unwrap(), vec![1, 3, 8, 21, 55]);
        assert_eq!(main_theorem_prediction(&[1, 1, 1, 1, 1], 2, 1, 4).unwrap(), vec![1, 2, 4, 8, 16]);
        assert!(main_theorem_prediction(&[1, 1, 1], 1, 2, 2).is_err());
        // Without the factor z the h - n = 1 denominator has no constant term.
        assert!(main_theorem_prediction_variant(&[1, 2, 3, 4, 5], 3, 2, 4, FormulaVariant::AsDisplayed).is_err());
        let shown = main_theorem_prediction_variant(&[1, 2, 3, 4, 5], 4, 2, 4, FormulaVariant::AsDisplayed).unwrap();
        assert_eq!(&shown[..2], &[-1, 2]);
    }

    #[test]
    fn koszul_examples() {
        let f = koszul_formula(3, 3).unwrap();
        assert_eq!(f.to_string(), "1/(1-z)^3");
        assert_eq!(seq(&f, 3), vec![1, 3, 6, 10]);
        assert_eq!(koszul_formula(4, 4).unwrap().den, vec![1, -4, 4, -1]);
        assert_eq!(koszul_formula(3, 2).unwrap().den, vec![1, -3, 2, -1]);
        assert_eq!(koszul_formula_as_displayed(4, 4).unwrap(), koszul_formula(4, 4).unwrap());
        assert!(koszul_formula_as_displayed(3, 2).is_err());
        assert!(koszul_formula(2, 3).is_err());

        let opts = ResolutionOptions::default();
        assert!(is_koszul_numerically(&quotient(&["x1^2"], 1, 2), 6, &opts).unwrap());
        assert!(!is_koszul_numerically(&quotient(&["x1*x2", "x1^3-x2^3"], 2, 4), 6, &opts).unwrap());
        assert!(is_koszul_numerically(&q0(&y("y1^3+y2^3+y3^3+y1*y2*y3", 3)).unwrap(), 6, &opts).unwrap());
    }

    #[test]
    fn socle_formula_examples() {
        let opts = ResolutionOptions::default();
        let m2 = quotient(&["x1^2", "x1*x2", "x2^2"], 2, 2);
        let r = verify_socle_formulas(&m2, 6, &opts).unwrap();
        assert!(r.socle_element.holds);
        assert_eq!(r.socle_element.direct, vec![1, 2, 4, 8, 16, 32, 64]);
        assert!(!r.gorenstein.applicable);

        let b = algebra_from_dual(&y("y1^3+y2^3+y3^2", 3)).unwrap();
        let r = verify_socle_formulas(&b, 6, &opts).unwrap();
        assert!(!r.socle_element.applicable);
        assert!(r.gorenstein.holds, "{r:?}");

        // Embedding dimension one: the Gorenstein formula predicts
        // 1/(1 - z + z^2), which is not the chain algebra's series.
        let c = algebra_from_dual(&y("y1^3", 1)).unwrap();
        let r = verify_socle_formulas(&c, 6, &opts).unwrap();
        assert_eq!(r.gorenstein.direct, vec![1; 7]);
        assert_eq!(r.gorenstein.predicted.as_deref(), Some(&[1, 1, 0, -1, -1, 0, 1][..]));
        assert!(!r.gorenstein.holds);
    }
}
