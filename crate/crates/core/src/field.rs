//! Coefficient fields.
//!
//! [`Rat`] is the exact rational type used everywhere by default. It keeps
//! small values in a pair of machine words and promotes to [`BigRational`]
//! only when a result no longer fits. [`Fp`] is a word-sized prime field used
//! by the optional heuristic mode of the resolution engine.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arithmetic needed by the linear algebra kernels.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Exact rational number in lowest terms with positive denominator.
///
/// Values that fit in `i64 / i64` are always stored in the `Small` variant,
/// so structural equality is numeric equality.
#[derive(Clone)]
pub enum Rat {
    Small(i64, i64),
    Big(Box<BigRational>),
}

/// Binary gcd; avoids the slow 128-bit division of Euclid's algorithm.
fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if let (Ok(x), Ok(y)) = (u64::try_from(a), u64::try_from(b)) {
        return gcd_u64(x, y) as u128;
    }
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rat {
    pub fn from_int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    /// `num / den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        if num == 0 {
            return Rat::Small(0, 1);
        }
        if den == 1 {
            if let Ok(n) = i64::try_from(num) {
                return Rat::Small(n, 1);
            }
        }
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        // BigRational arithmetic keeps values reduced with positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rat::Small(n, d);
        }
        Rat::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => BigInt::from(*n),
            Rat::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => BigInt::from(*d),
            Rat::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    /// The value as an `i64`, if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            Field::neg(self)
        } else {
            self.clone()
        }
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat::from_big(BigRational::from_integer(n))
    }

    /// `num / den` for arbitrary integers; `None` if `den` is zero.
    pub fn from_bigints(num: BigInt, den: BigInt) -> Option<Rat> {
        if den.is_zero() {
            return None;
        }
        Some(Rat::from_big(BigRational::new(num, den)))
    }
}

impl Field for Rat {
    fn zero() -> Rat {
        Rat::Small(0, 1)
    }

    fn one() -> Rat {
        Rat::Small(1, 1)
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn add(&self, other: &Rat) -> Rat {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Rat::from_i128(*a as i128 + *c as i128, 1);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rat::from_i128(a * d + c * b, b * d)
            }
            _ => Rat::from_big(self.to_big() + other.to_big()),
        }
    }

    fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Rat) -> Rat {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * other.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) if *n != i64::MIN => Rat::Small(-n, *d),
            _ => Rat::from_big(-self.to_big()),
        }
    }

    fn inv(&self) -> Rat {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Rat::Small(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Rat::Big(b) => Rat::from_big(b.recip()),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Rat::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The Mersenne prime 2^61 - 1.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

/// Element of the prime field `Z/P`. `P` must be prime and below 2^63.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64 = DEFAULT_PRIME>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn from_bigint(n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("residue fits in u64"))
    }

    /// Reduction of a rational; `None` if the denominator vanishes mod `P`.
    pub fn from_rat(r: &Rat) -> Option<Self> {
        let (num, den) = match r {
            Rat::Small(n, d) => (Fp((*n as i128).rem_euclid(P as i128) as u64), Fp((*d as u64) % P)),
            Rat::Big(b) => (Self::from_bigint(b.numer()), Self::from_bigint(b.denom())),
        };
        if den.0 == 0 {
            None
        } else {
            Some(Field::mul(&num, &den.inv()))
        }
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }

    fn one() -> Self {
        Fp(1 % P)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, other: &Self) -> Self {
        let s = self.0 + other.0;
        Fp(if s >= P { s - P } else { s })
    }

    fn sub(&self, other: &Self) -> Self {
        Fp(if self.0 >= other.0 { self.0 - other.0 } else { self.0 + P - other.0 })
    }

    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 * other.0 as u128) % P as u128) as u64)
    }

    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }

    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(P - 2)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Helper for building rationals in tests and literals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic_is_exact() {
        let half = rat(1, 2);
        assert_eq!(half.add(&half), Rat::one());
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert_eq!(rat(1, 3).mul(&rat(3, 7)), rat(1, 7));
        assert_eq!(rat(-5, 7).inv(), rat(-7, 5));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Rat::Big(_)));
        let back = sq.mul(&big.inv());
        assert_eq!(back, big);
        assert!(matches!(back, Rat::Small(..)));
        let m = Rat::from_int(i64::MIN);
        assert_eq!(m.neg().neg(), m);
    }

    #[test]
    fn ordering_matches_values() {
        assert!(rat(1, 3) < rat(1, 2));
        assert!(rat(-1, 2) < Rat::zero());
        let huge = Rat::from_int(i64::MAX).mul(&Rat::from_int(4));
        assert!(huge > Rat::from_int(i64::MAX));
    }

    #[test]
    fn prime_field_inverse() {
        type F = Fp<101>;
        for v in 1..101u64 {
            let x = F::new(v);
            assert!(x.mul(&x.inv()).is_one());
        }
        assert_eq!(F::from_rat(&rat(1, 2)).unwrap().mul(&F::new(2)), F::one());
        assert!(F::from_rat(&rat(1, 101)).is_none());
    }
}
