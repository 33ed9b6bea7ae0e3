//! The rank-one Heisenberg Fock space over Q.
//!
//! Basis vectors `h(-n_1)...h(-n_k)1` are indexed by partitions. States are
//! finite maps from partitions to nonzero rationals. The completions `S_1`
//! and `S_R` are modelled by finite truncations carrying a certified bound on
//! the discarded tail.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Exponent, NormValue, Prime, Scalar, Valuation};

/// A non-increasing list of positive parts; the empty partition is the vacuum.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
    weight: u32,
}

impl Partition {
    pub fn vacuum() -> Self {
        Partition::default()
    }

    /// Sorts the parts; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(
                "partition parts must be positive".into(),
            ));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let weight = parts.iter().sum();
        Ok(Partition { parts, weight })
    }

    fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        let weight = parts.iter().sum();
        Partition { parts, weight }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, n: u32) -> u32 {
        self.parts.iter().filter(|&&m| m == n).count() as u32
    }

    /// The partition with one more part `n`.
    pub fn with_part(&self, n: u32) -> Self {
        debug_assert!(n > 0);
        let pos = self.parts.partition_point(|&m| m >= n);
        let mut parts = Vec::with_capacity(self.parts.len() + 1);
        parts.extend_from_slice(&self.parts[..pos]);
        parts.push(n);
        parts.extend_from_slice(&self.parts[pos..]);
        Partition {
            parts,
            weight: self.weight + n,
        }
    }

    /// The partition with one part `n` removed, if present.
    pub fn without_part(&self, n: u32) -> Option<Self> {
        let pos = self.parts.iter().position(|&m| m == n)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(Partition {
            parts,
            weight: self.weight - n,
        })
    }

    /// Distinct parts with their multiplicities, largest first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &n in &self.parts {
            match out.last_mut() {
                Some((m, c)) if *m == n => *c += 1,
                _ => out.push((n, 1)),
            }
        }
        out
    }
}

/// Canonical order: by weight, then reverse-lexicographic on the parts.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(deserializer)?;
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(serde::de::Error::custom(
                "partition parts must be non-increasing",
            ));
        }
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

/// All partitions of `d` in canonical order.
pub fn basis(d: u32) -> Vec<Partition> {
    fn go(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_sorted(prefix.clone()));
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

/// Checked variant of [`basis`] for signed input.
pub fn basis_checked(d: i64) -> Result<Vec<Partition>> {
    if d < 0 {
        return Err(Error::InvalidArgument(format!("negative degree {d}")));
    }
    Ok(basis(d as u32))
}

/// Partition numbers `p(0..=n)` by Euler's pentagonal recurrence.
pub fn partition_numbers(n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc: i128 = 0;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1] as i128;
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                acc += sign * p[m - g2] as i128;
            }
        }
        p[m] = acc as u64;
    }
    p
}

/// A finite linear combination of basis monomials with nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FockState {
    terms: BTreeMap<Partition, Scalar>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(Partition::vacuum())
    }

    pub fn monomial(p: Partition) -> Self {
        Self::term(p, Scalar::one())
    }

    pub fn term(p: Partition, c: Scalar) -> Self {
        let mut s = FockState::zero();
        s.add_term(p, c);
        s
    }

    /// `h(-n_1)...h(-n_k)1` for the given parts in any order.
    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        Ok(Self::monomial(Partition::new(parts.to_vec())?))
    }

    pub fn add_term(&mut self, p: Partition, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, p: &Partition) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal weight among occurring partitions; `None` for the zero state.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Partition::weight).max()
    }

    /// The common weight if every term has the same weight (zero is homogeneous
    /// of every weight and reports `None`).
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut weights = self.terms.keys().map(Partition::weight);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_weight().is_some()
    }

    /// The weight-`d` component.
    pub fn component(&self, d: u32) -> FockState {
        FockState {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| p.weight() == d)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous components keyed by weight.
    pub fn components(&self) -> BTreeMap<u32, FockState> {
        let mut out: BTreeMap<u32, FockState> = BTreeMap::new();
        for (p, c) in &self.terms {
            out.entry(p.weight())
                .or_default()
                .terms
                .insert(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FockState {
        if c.is_zero() {
            return FockState::zero();
        }
        FockState {
            terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect(),
        }
    }

    /// Apply a weight-dependent scalar to every term.
    pub fn map_by_weight(&self, f: impl Fn(u32) -> Scalar) -> FockState {
        let mut out = FockState::zero();
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c * f(p.weight()));
        }
        out
    }

    pub fn add_scaled(&mut self, other: &FockState, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (p, x) in &other.terms {
            self.add_term(p.clone(), x * c);
        }
    }

    pub fn add_assign(&mut self, other: &FockState) {
        for (p, x) in &other.terms {
            self.add_term(p.clone(), x.clone());
        }
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?}){p:?}")?;
        }
        Ok(())
    }
}

impl Add<&FockState> for &FockState {
    type Output = FockState;
    fn add(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub<&FockState> for &FockState {
    type Output = FockState;
    fn sub(self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::from(-1));
        out
    }
}

impl Neg for &FockState {
    type Output = FockState;
    fn neg(self) -> FockState {
        self.scale(&Scalar::from(-1))
    }
}

impl Mul<&FockState> for &Scalar {
    type Output = FockState;
    fn mul(self, rhs: &FockState) -> FockState {
        rhs.scale(self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    partition: Partition,
    coeff: Scalar,
}

impl Serialize for FockState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (p, c) in &self.terms {
            seq.serialize_element(&TermRepr {
                partition: p.clone(),
                coeff: c.clone(),
            })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        let mut s = FockState::zero();
        for t in terms {
            s.add_term(t.partition, t.coeff);
        }
        Ok(s)
    }
}

/// `rho = log_p R`, the exponent of the weight `R` in the norm `|.|_R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RExponent {
    rho: BigRational,
}

impl RExponent {
    pub fn new(rho: BigRational) -> Result<Self> {
        if rho.is_negative() {
            return Err(Error::InvalidArgument("rho must be nonnegative".into()));
        }
        Ok(RExponent { rho })
    }

    pub fn from_scalar(rho: &Scalar) -> Result<Self> {
        Self::new(rho.as_rational().clone())
    }

    /// rho = 0: the sup-norm of `S_1`.
    pub fn sup() -> Self {
        RExponent {
            rho: BigRational::zero(),
        }
    }

    /// An exponent inside the open window `1/p < rho < 1/(p-1)`.
    pub fn spectral(rho: BigRational, p: Prime) -> Result<Self> {
        let r = Self::new(rho)?;
        if !r.is_spectral_grade(p) {
            return Err(Error::InvalidArgument(format!(
                "rho = {} lies outside (1/{p}, 1/{})",
                Scalar::from(r.rho.clone()),
                p.get() - 1
            )));
        }
        Ok(r)
    }

    pub fn is_spectral_grade(&self, p: Prime) -> bool {
        let p = p.get() as i64;
        let lo = BigRational::new(1.into(), p.into());
        let hi = BigRational::new(1.into(), (p - 1).into());
        self.rho > lo && self.rho < hi
    }

    pub fn rho(&self) -> &BigRational {
        &self.rho
    }
}

/// `|a|_R = sup_I |a_I| R^{|I|}` as the exponent `min_I (v(a_I) - |I| rho)`.
pub fn r_norm(a: &FockState, p: Prime, rho: &RExponent) -> NormValue {
    let mut best: Option<BigRational> = None;
    for (part, c) in a.terms() {
        let v = match c.valuation(p) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => continue,
        };
        let e = BigRational::from_integer(v.into())
            - &rho.rho * BigRational::from_integer(part.weight().into());
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
    }
    match best {
        Some(e) => NormValue::from_exponent(p, e),
        None => NormValue::zero(p),
    }
}

pub fn sup_norm(a: &FockState, p: Prime) -> NormValue {
    r_norm(a, p, &RExponent::sup())
}

/// A finite-degree window of a state in a completion, with a certified bound
/// on the norm of the discarded part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedState {
    pub body: FockState,
    pub degree_cap: u32,
    pub tail_bound: NormValue,
}

pub fn truncate(a: &FockState, degree_cap: u32, p: Prime, rho: &RExponent) -> TruncatedState {
    let mut body = FockState::zero();
    let mut tail = FockState::zero();
    for (part, c) in a.terms() {
        if part.weight() <= degree_cap {
            body.add_term(part.clone(), c.clone());
        } else {
            tail.add_term(part.clone(), c.clone());
        }
    }
    TruncatedState {
        body,
        degree_cap,
        tail_bound: r_norm(&tail, p, rho),
    }
}

/// A random state with at most `max_terms` terms of weight at most `max_degree`,
/// coefficients `±p^e · n/d` with small `n`, `d` prime to `p` and `|e| <= 2`.
pub fn random_state<R: Rng>(rng: &mut R, max_degree: u32, max_terms: usize, p: Prime) -> FockState {
    let mut s = FockState::zero();
    let n_terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n_terms {
        let d = rng.gen_range(0..=max_degree);
        let slice = basis(d);
        let part = slice[rng.gen_range(0..slice.len())].clone();
        s.add_term(part, random_scalar(rng, p));
    }
    s
}

/// A random homogeneous state of weight `d`.
pub fn random_homogeneous<R: Rng>(rng: &mut R, d: u32, max_terms: usize, p: Prime) -> FockState {
    let slice = basis(d);
    let mut s = FockState::zero();
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let part = slice[rng.gen_range(0..slice.len())].clone();
        s.add_term(part, random_scalar(rng, p));
    }
    s
}

pub fn random_scalar<R: Rng>(rng: &mut R, p: Prime) -> Scalar {
    let unit = |rng: &mut R| loop {
        let n: i64 = rng.gen_range(1..=9);
        if n % p.get() as i64 != 0 {
            return n;
        }
    };
    let num = unit(rng) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den = unit(rng);
    let e: i32 = rng.gen_range(-2..=2);
    Scalar::new(num, den) * Scalar::from(p.get() as i64).pow(e)
}

/// Exponent of the norm, or `None` for the zero norm; convenience for tests.
pub fn exponent_of(n: &NormValue) -> Option<BigRational> {
    match n.exponent() {
        Exponent::Finite(e) => Some(e.clone()),
        Exponent::Infinite => None,
    }
}
