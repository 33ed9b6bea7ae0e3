//! Exact rationals, p-adic valuations and norms, and Serre's weight space.
//!
//! Every coefficient in the library is a reduced rational. Norms are kept as
//! exponents `e` with `|x| = p^(-e)` so that comparisons never round.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational prime, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as an integer.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.0), k as usize)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact reduced rational number.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigRational);

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Scalar(BigRational::new(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn pow(&self, k: i32) -> Self {
        Scalar(num_traits::Pow::pow(&self.0, k))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn valuation(&self, p: Prime) -> Valuation {
        padic_valuation(self, p)
    }

    pub fn norm(&self, p: Prime) -> NormValue {
        padic_norm(self, p)
    }

    /// Reduce a p-integral rational modulo `p^k` to a residue in `[0, p^k)`.
    pub fn residue_mod_prime_power(&self, p: Prime, k: u32) -> Option<BigInt> {
        let modulus = p.pow(k);
        let den = self.denom().mod_floor(&modulus);
        let inv = mod_inverse(&den, &modulus)?;
        Some((self.numer() * inv).mod_floor(&modulus))
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Malformed(format!("rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::new(n, d))
            }
            None => Ok(Scalar::from_integer(
                BigInt::from_str(s).map_err(|_| bad())?,
            )),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(&self.0 $op rhs.0)
            }
        }
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar(&self.0 $op &rhs.0)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// p-adic valuation of a rational; `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Multiplicity of `p` in a nonzero integer.
pub fn integer_valuation(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let p = p.to_bigint();
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn padic_valuation(x: &Scalar, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(integer_valuation(x.numer(), p) - integer_valuation(x.denom(), p))
}

pub fn padic_norm(x: &Scalar, p: Prime) -> NormValue {
    match padic_valuation(x, p) {
        Valuation::Finite(v) => NormValue::from_exponent(p, BigRational::from_integer(v.into())),
        Valuation::Infinite => NormValue::zero(p),
    }
}

/// Exponent `e` of a norm `p^(-e)`; `Infinite` is the norm of zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Exponent::Finite(e) => Some(e),
            Exponent::Infinite => None,
        }
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        match (self, rhs) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
            _ => Exponent::Infinite,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{}/{}", e.numer(), e.denom()),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// An ultrametric norm value `p^(-e)` held exactly through its exponent.
///
/// Ordering compares norms, so a larger exponent is a smaller value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormValue {
    prime: Prime,
    exponent: Exponent,
}

impl NormValue {
    pub fn from_exponent(p: Prime, e: BigRational) -> Self {
        NormValue {
            prime: p,
            exponent: Exponent::Finite(e),
        }
    }

    /// `p^(-k)`.
    pub fn p_pow_neg(p: Prime, k: i64) -> Self {
        Self::from_exponent(p, BigRational::from_integer(k.into()))
    }

    pub fn zero(p: Prime) -> Self {
        NormValue {
            prime: p,
            exponent: Exponent::Infinite,
        }
    }

    pub fn one(p: Prime) -> Self {
        Self::p_pow_neg(p, 0)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.exponent == Exponent::Infinite
    }

    /// Norm of a product.
    pub fn mul(&self, other: &NormValue) -> NormValue {
        debug_assert_eq!(self.prime, other.prime);
        NormValue {
            prime: self.prime,
            exponent: &self.exponent + &other.exponent,
        }
    }

    /// `self / other` for a nonzero `other`.
    pub fn div(&self, other: &NormValue) -> NormValue {
        match &other.exponent {
            Exponent::Finite(b) => match &self.exponent {
                Exponent::Finite(a) => NormValue::from_exponent(self.prime, a - b),
                Exponent::Infinite => self.clone(),
            },
            Exponent::Infinite => panic!("division by the zero norm"),
        }
    }

    /// Floating approximation for display only.
    pub fn approx(&self) -> f64 {
        match &self.exponent {
            Exponent::Finite(e) => {
                let e =
                    e.numer().to_f64().unwrap_or(f64::NAN) / e.denom().to_f64().unwrap_or(f64::NAN);
                (self.prime.get() as f64).powf(-e)
            }
            Exponent::Infinite => 0.0,
        }
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prime
            .cmp(&other.prime)
            .then_with(|| other.exponent.cmp(&self.exponent))
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exponent {
            Exponent::Infinite => write!(f, "0"),
            Exponent::Finite(e) if e.is_integer() => write!(f, "{}^({})", self.prime, -e.numer()),
            Exponent::Finite(e) => write!(f, "{}^({}/{})", self.prime, -e.numer(), e.denom()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NormValueRepr {
    base: u64,
    neg_exponent: String,
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NormValueRepr {
            base: self.prime.get(),
            neg_exponent: self.exponent.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = NormValueRepr::deserialize(deserializer)?;
        let prime = Prime::new(repr.base).map_err(serde::de::Error::custom)?;
        if repr.neg_exponent == "inf" {
            return Ok(NormValue::zero(prime));
        }
        let e: Scalar = repr
            .neg_exponent
            .parse()
            .map_err(serde::de::Error::custom)?;
        Ok(NormValue::from_exponent(prime, e.into_rational()))
    }
}

/// Norms of the partial sums of `terms`.
pub fn partial_sum_norms(terms: &[Scalar], p: Prime) -> Vec<NormValue> {
    let mut acc = Scalar::zero();
    terms
        .iter()
        .map(|t| {
            acc += t;
            acc.norm(p)
        })
        .collect()
}

/// Ultrametric convergence test on a finite window: the term norms must be
/// strictly decreasing over the tail of the list (zero terms allowed).
pub fn terms_tend_to_zero(terms: &[Scalar], p: Prime) -> bool {
    let norms: Vec<NormValue> = terms.iter().map(|t| t.norm(p)).collect();
    norms.windows(2).all(|w| w[1].is_zero() || w[1] < w[0])
}

pub const DEFAULT_WEIGHT_PRECISION: u32 = 32;

/// A point of Serre's weight space `X ≅ Z/(p-1)Z × Z_p` (just `Z_2` when
/// `p = 2`), known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightX {
    prime: Prime,
    residue: Option<u64>,
    #[serde(serialize_with = "ser_biguint")]
    body: BigUint,
    precision: u32,
    #[serde(serialize_with = "ser_opt_bigint")]
    integer: Option<BigInt>,
}

fn ser_biguint<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl WeightX {
    /// Embed an integer weight, remembering the exact integer.
    pub fn from_integer(k: impl Into<BigInt>, p: Prime, precision: u32) -> Self {
        let k = k.into();
        let mut w = Self::from_parts(p, &k, precision);
        w.integer = Some(k);
        w
    }

    /// The weight with the residue of `k` mod `p-1` and body `k mod p^precision`.
    pub fn from_parts(p: Prime, k: &BigInt, precision: u32) -> Self {
        let residue = (p.get() != 2).then(|| {
            k.mod_floor(&BigInt::from(p.get() - 1))
                .to_u64()
                .expect("residue fits")
        });
        let body = k
            .mod_floor(&p.pow(precision))
            .to_biguint()
            .expect("nonnegative");
        WeightX {
            prime: p,
            residue,
            body,
            precision,
            integer: None,
        }
    }

    /// Build from an explicit residue and `Z_p` digits (least significant first).
    pub fn from_digits(p: Prime, residue: Option<u64>, digits: &[u64]) -> Result<Self> {
        if p.get() == 2 && residue.is_some() {
            return Err(Error::InvalidArgument(
                "p = 2 has no residue component".into(),
            ));
        }
        if p.get() != 2 && residue.is_none_or(|r| r >= p.get() - 1) {
            return Err(Error::InvalidArgument(
                "residue must lie in [0, p-1)".into(),
            ));
        }
        let mut body = BigUint::zero();
        for &d in digits.iter().rev() {
            if d >= p.get() {
                return Err(Error::InvalidArgument(format!("digit {d} out of range")));
            }
            body = body * p.get() + d;
        }
        Ok(WeightX {
            prime: p,
            residue,
            body,
            precision: digits.len() as u32,
            integer: None,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn residue(&self) -> Option<u64> {
        self.residue
    }

    pub fn body(&self) -> &BigUint {
        &self.body
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn integer(&self) -> Option<&BigInt> {
        self.integer.as_ref()
    }

    /// Base-p digits of the `Z_p` component, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.precision as usize);
        let mut b = self.body.clone();
        let p = BigUint::from(self.prime.get());
        for _ in 0..self.precision {
            let (q, r) = b.div_rem(&p);
            out.push(r.to_u64().unwrap_or(0));
            b = q;
        }
        out
    }

    /// Membership in the even weight space `2X`.
    pub fn is_even(&self) -> bool {
        match self.residue {
            Some(r) => r % 2 == 0,
            None => self.precision >= 1 && self.body.is_even(),
        }
    }
}

/// Result of comparing two weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightDistance {
    pub norm: NormValue,
    /// Set when the bodies agree to the shared precision; the true distance is
    /// then only known to be at most `p^-precision`.
    pub precision_limited: bool,
    pub precision: u32,
}

pub fn weight_distance(k: &WeightX, k2: &WeightX) -> Result<WeightDistance> {
    if k.prime != k2.prime {
        return Err(Error::PrimeMismatch(k.prime.get(), k2.prime.get()));
    }
    let p = k.prime;
    let precision = k.precision.min(k2.precision);
    if k.residue != k2.residue {
        return Ok(WeightDistance {
            norm: NormValue::one(p),
            precision_limited: false,
            precision,
        });
    }
    if let (Some(a), Some(b)) = (&k.integer, &k2.integer) {
        let d = Scalar::from_integer(a - b);
        return Ok(WeightDistance {
            norm: d.norm(p),
            precision_limited: false,
            precision,
        });
    }
    let modulus = p.pow(precision);
    let a = BigInt::from_biguint(Sign::Plus, k.body.clone());
    let b = BigInt::from_biguint(Sign::Plus, k2.body.clone());
    let diff = (a - b).mod_floor(&modulus);
    if diff.is_zero() {
        return Ok(WeightDistance {
            norm: NormValue::zero(p),
            precision_limited: true,
            precision,
        });
    }
    Ok(WeightDistance {
        norm: NormValue::p_pow_neg(p, integer_valuation(&diff, p)),
        precision_limited: false,
        precision,
    })
}

/// Limit in weight space of an integer sequence whose consecutive distances
/// satisfy `d(k_i, k_{i+1}) <= p^-i` with matching residues mod `p-1`.
///
/// The limit is returned modulo `p^(n-1)` for a sequence of length `n`; a
/// constant sequence returns the exact integer weight.
pub fn weight_limit(ks: &[i64], p: Prime) -> Result<WeightX> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty weight sequence".into()));
    }
    let embed = |k: i64| WeightX::from_integer(k, p, DEFAULT_WEIGHT_PRECISION);
    let mut all_zero = true;
    for (i, w) in ks.windows(2).enumerate() {
        let (a, b) = (embed(w[0]), embed(w[1]));
        if a.residue != b.residue {
            return Err(Error::NotCauchy {
                index: i,
                reason: format!(
                    "residues of {} and {} differ mod {}",
                    w[0],
                    w[1],
                    p.get() - 1
                ),
            });
        }
        let d = weight_distance(&a, &b)?;
        if d.norm > NormValue::p_pow_neg(p, i as i64) {
            return Err(Error::NotCauchy {
                index: i,
                reason: format!("d({}, {}) = {} exceeds {}^-{}", w[0], w[1], d.norm, p, i),
            });
        }
        all_zero &= d.norm.is_zero();
    }
    let last = *ks.last().expect("nonempty");
    if all_zero {
        return Ok(embed(last));
    }
    Ok(WeightX::from_parts(
        p,
        &BigInt::from(last),
        (ks.len() - 1) as u32,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(12), Err(Error::NotPrime(12)));
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&q(12, 1), p(2)), Valuation::Finite(2));
        assert_eq!(padic_valuation(&q(5, 3), p(5)), Valuation::Finite(1));
        assert_eq!(padic_valuation(&Scalar::zero(), p(7)), Valuation::Infinite);
        assert_eq!(padic_valuation(&q(3, 50), p(5)), Valuation::Finite(-2));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(padic_norm(&q(12, 1), p(2)), NormValue::p_pow_neg(p(2), 2));
        assert_eq!(padic_norm(&Scalar::one(), p(11)), NormValue::one(p(11)));
        assert_eq!(padic_norm(&q(1, 5), p(5)), NormValue::p_pow_neg(p(5), -1));
        assert!(padic_norm(&q(1, 5), p(5)) > NormValue::one(p(5)));
        assert!(NormValue::zero(p(5)) < NormValue::p_pow_neg(p(5), 1000));
    }

    #[test]
    fn scalar_text_roundtrip() {
        let x = q(-6, 4);
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!("-3/2".parse::<Scalar>().unwrap(), x);
        assert_eq!("7".parse::<Scalar>().unwrap(), Scalar::from(7));
        assert!("1/0".parse::<Scalar>().is_err());
        assert_eq!(serde_json::to_string(&Scalar::from(4)).unwrap(), "\"4/1\"");
    }

    #[test]
    fn norm_json_shape() {
        let n = NormValue::from_exponent(p(5), BigRational::new(3.into(), 4.into()));
        let text = serde_json::to_string(&n).unwrap();
        assert_eq!(text, r#"{"base":5,"neg_exponent":"3/4"}"#);
        assert_eq!(serde_json::from_str::<NormValue>(&text).unwrap(), n);
        let z = serde_json::to_string(&NormValue::zero(p(2))).unwrap();
        assert_eq!(z, r#"{"base":2,"neg_exponent":"inf"}"#);
    }

    #[test]
    fn residue_reduction() {
        assert_eq!(
            q(1, 3).residue_mod_prime_power(p(5), 2),
            Some(BigInt::from(17))
        );
        assert_eq!(q(1, 5).residue_mod_prime_power(p(5), 2), None);
    }

    #[test]
    fn geometric_series_criterion() {
        let prime = p(3);
        let terms: Vec<Scalar> = (0..12).map(|n| Scalar::from(3i64.pow(n))).collect();
        assert!(terms_tend_to_zero(&terms, prime));
        let limit = q(1, 1 - 3);
        let sums = partial_sum_norms(&terms, prime);
        // |S_N - 1/(1-p)| = p^-(N+1)
        let mut acc = Scalar::zero();
        for (n, t) in terms.iter().enumerate() {
            acc += t;
            assert_eq!(
                (&acc - &limit).norm(prime),
                NormValue::p_pow_neg(prime, n as i64 + 1)
            );
        }
        assert!(sums.iter().all(|s| *s == NormValue::one(prime)));
        let divergent: Vec<Scalar> = (0..5).map(|_| Scalar::one()).collect();
        assert!(!terms_tend_to_zero(&divergent, prime));
    }

    #[test]
    fn weight_distance_examples() {
        let w = |k: i64, pr: u64| WeightX::from_integer(k, p(pr), 16);
        assert_eq!(
            weight_distance(&w(4, 5), &w(104, 5)).unwrap().norm,
            NormValue::p_pow_neg(p(5), 2)
        );
        assert_eq!(
            weight_distance(&w(4, 5), &w(5, 5)).unwrap().norm,
            NormValue::one(p(5))
        );
        assert!(weight_distance(&w(6, 2), &w(6, 2)).unwrap().norm.is_zero());
        assert!(matches!(
            weight_distance(&w(6, 2), &w(6, 3)),
            Err(Error::PrimeMismatch(2, 3))
        ));
    }

    #[test]
    fn digit_weights_are_precision_limited() {
        let a = WeightX::from_digits(p(5), Some(2), &[1, 0, 0]).unwrap();
        let b = WeightX::from_parts(p(5), &BigInt::from(126), 6);
        let d = weight_distance(&a, &b).unwrap();
        assert!(d.norm.is_zero() && d.precision_limited && d.precision == 3);
        assert!(WeightX::from_digits(p(2), Some(0), &[1]).is_err());
    }

    #[test]
    fn weight_limit_examples() {
        let w = weight_limit(&[6, 26, 126, 626], p(5)).unwrap();
        assert_eq!(w.residue(), Some(2));
        assert_eq!(w.precision(), 3);
        // 6 + 20 + 100 + 500 + ... converges 5-adically to 1
        assert_eq!(w.body(), &BigUint::from(1u32));
        assert!(w.is_even());

        match weight_limit(&[6, 7], p(5)) {
            Err(Error::NotCauchy { index, .. }) => assert_eq!(index, 0),
            other => panic!("expected NOT_CAUCHY, got {other:?}"),
        }

        let w = weight_limit(&[4, 4, 4], p(2)).unwrap();
        assert_eq!(w.integer(), Some(&BigInt::from(4)));
        assert_eq!(w.residue(), None);
    }

    #[test]
    fn weight_limit_rejects_slow_sequences() {
        // consecutive distances are all 1/2, which exceeds 2^-2 at index 2
        match weight_limit(&[2, 4, 6, 8], p(2)) {
            Err(Error::NotCauchy { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected NOT_CAUCHY, got {other:?}"),
        }
    }
}
