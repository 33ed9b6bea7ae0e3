//! Spectral measurements for `L(0)` and `L[0]` on finite windows.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::brackets::{apply_L0_bracket, apply_h_bracket};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{r_norm, FockState, Partition, RExponent};
use crate::modes::apply_l;
use crate::onepoint::z_function_with;
use crate::onepoint::TraceRoute;
use crate::scalar::{integer_valuation, Exponent, NormValue, Prime, Scalar};

/// A rational `λ`, or a p-adic integer known modulo `p^m` through its digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Rational(Scalar),
    /// Base-p digits, least significant first; the length is the precision.
    Digits(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicTarget {
    prime: Prime,
    lambda: Lambda,
}

impl PadicTarget {
    pub fn rational(prime: Prime, lambda: Scalar) -> Self {
        PadicTarget {
            prime,
            lambda: Lambda::Rational(lambda),
        }
    }

    pub fn digits(prime: Prime, digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidArgument("empty digit vector".into()));
        }
        if let Some(d) = digits.iter().find(|d| **d >= prime.get()) {
            return Err(Error::InvalidArgument(format!(
                "digit {d} out of range for p = {prime}"
            )));
        }
        Ok(PadicTarget {
            prime,
            lambda: Lambda::Digits(digits),
        })
    }

    /// Parses `n/d`, `n`, or `...d_k...d_1d_0` (most significant digit first).
    pub fn parse(prime: Prime, text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("...") {
            let digits: Option<Vec<u64>> = rest
                .chars()
                .rev()
                .map(|c| c.to_digit(36).map(u64::from))
                .collect();
            let digits =
                digits.ok_or_else(|| Error::Malformed(format!("bad digit string '{text}'")))?;
            return Self::digits(prime, digits);
        }
        let q =
            Scalar::from_str(text).map_err(|_| Error::Malformed(format!("bad lambda '{text}'")))?;
        Ok(Self::rational(prime, q))
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    /// Digit precision `m`, or `None` for an exact rational.
    pub fn precision(&self) -> Option<u32> {
        match &self.lambda {
            Lambda::Rational(_) => None,
            Lambda::Digits(d) => Some(d.len() as u32),
        }
    }

    /// The representative in `[0, p^m)` of a digit target.
    fn approximant(&self) -> Scalar {
        match &self.lambda {
            Lambda::Rational(q) => q.clone(),
            Lambda::Digits(d) => {
                let p = BigInt::from(self.prime.get());
                Scalar::from_integer(d.iter().rev().fold(BigInt::zero(), |acc, x| acc * &p + x))
            }
        }
    }

    pub fn as_rational(&self) -> Option<&Scalar> {
        match &self.lambda {
            Lambda::Rational(q) => Some(q),
            Lambda::Digits(_) => None,
        }
    }

    /// `|x - λ|`, exact or bounded by `p^-m` when the digits run out.
    pub fn distance(&self, x: &Scalar) -> Measured {
        let diff = x - self.approximant();
        match self.precision() {
            None => Measured::exact(diff.norm(self.prime)),
            Some(m) => {
                let v = diff.valuation(self.prime).finite();
                match v {
                    Some(v) if v < m as i64 => Measured::exact(diff.norm(self.prime)),
                    _ => Measured::bound(NormValue::p_pow_neg(self.prime, m as i64)),
                }
            }
        }
    }
}

impl fmt::Display for PadicTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lambda {
            Lambda::Rational(q) => write!(f, "{q}"),
            Lambda::Digits(d) => {
                write!(f, "...")?;
                for x in d.iter().rev() {
                    write!(f, "{}", char::from_digit(*x as u32, 36).unwrap_or('?'))?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for PadicTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A norm that is either exact or only an upper bound set by digit precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measured {
    pub norm: NormValue,
    pub exact: bool,
}

impl Measured {
    fn exact(norm: NormValue) -> Self {
        Measured { norm, exact: true }
    }

    fn bound(norm: NormValue) -> Self {
        Measured { norm, exact: false }
    }
}

fn in_point_spectrum(q: &Scalar) -> bool {
    q.is_integer() && !q.is_negative()
}

/// `(L(0) - λ)^{-1} a`, scaling the degree-`m` component by `1/(m - λ)`.
pub fn resolvent_apply(lambda: &PadicTarget, a: &FockState) -> Result<FockState> {
    let q = lambda
        .as_rational()
        .ok_or_else(|| Error::InvalidArgument("the resolvent needs a rational lambda".into()))?;
    if in_point_spectrum(q) {
        return Err(Error::InPointSpectrum(q.to_string()));
    }
    Ok(a.map_by_weight(|m| (Scalar::from(m as i64) - q).recip()))
}

/// `(L(0) - λ) a`.
pub fn l0_shift(lambda: &Scalar, a: &FockState) -> FockState {
    &apply_l(0, a) - &a.scale(lambda)
}

/// Dimension of `ker(L(0) - λ)` on degrees `0..=dmax`.
pub fn l0_kernel_dimension(lambda: &Scalar, dmax: u32) -> usize {
    if !in_point_spectrum(lambda) {
        return 0;
    }
    match lambda.to_i64() {
        Some(m) if m <= dmax as i64 => crate::fock::basis(m as u32).len(),
        _ => 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileEntry {
    pub m: u64,
    /// `|1/(m - λ)|`; absent when the digits cannot separate `m` from `λ`.
    pub norm: Option<NormValue>,
    pub status: ProfileStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileStatus {
    Exact,
    PrecisionShort,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormProfile {
    pub lambda: PadicTarget,
    pub mmax: u64,
    pub entries: Vec<ProfileEntry>,
    /// Largest mode-wise norm among the certified entries.
    pub max: Option<NormValue>,
    pub constant: bool,
    pub precision_short: usize,
}

/// `1/|m - λ|` for `m = 0..=mmax`.
pub fn resolvent_norm_profile(lambda: &PadicTarget, mmax: u64, exec: Exec) -> Result<NormProfile> {
    if let Some(q) = lambda.as_rational() {
        if in_point_spectrum(q) {
            return Err(Error::InPointSpectrum(q.to_string()));
        }
    }
    let p = lambda.prime();
    let ms: Vec<u64> = (0..=mmax).collect();
    let entries = exec.map(&ms, |&m| {
        let d = lambda.distance(&Scalar::from(m as i64));
        if d.exact {
            ProfileEntry {
                m,
                norm: Some(NormValue::one(p).div(&d.norm)),
                status: ProfileStatus::Exact,
            }
        } else {
            ProfileEntry {
                m,
                norm: None,
                status: ProfileStatus::PrecisionShort,
            }
        }
    });
    let certified: Vec<&NormValue> = entries.iter().filter_map(|e| e.norm.as_ref()).collect();
    let max = certified.iter().max().map(|n| (*n).clone());
    let constant = certified.windows(2).all(|w| w[0] == w[1]);
    let precision_short = entries.len() - certified.len();
    Ok(NormProfile {
        lambda: lambda.clone(),
        mmax,
        entries,
        max,
        constant,
        precision_short,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CauchyVerdict {
    /// Gap `j` (1-based) is at most `p^(-j·rate)`; `rate` is absent when all gaps vanish.
    CauchyAtRate {
        rate: Option<Scalar>,
    },
    NotCauchy {
        index: usize,
        reason: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub prime: Prime,
    pub rho: Scalar,
    pub gaps: Vec<NormValue>,
    #[serde(flatten)]
    pub verdict: CauchyVerdict,
}

impl CauchyReport {
    pub fn is_cauchy(&self) -> bool {
        matches!(self.verdict, CauchyVerdict::CauchyAtRate { .. })
    }
}

/// Consecutive gaps `|a_{i+1} - a_i|_R` and a fitted geometric rate.
///
/// The verdict is `CAUCHY_AT_RATE(r)` when the gap norms never increase,
/// end strictly below where they start (or all vanish), and
/// `r = min_j e_j / j > 0` for gap exponents `e_j`.
pub fn cauchy_verify(states: &[FockState], p: Prime, rho: &RExponent) -> Result<CauchyReport> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("empty state sequence".into()));
    }
    let gaps: Vec<NormValue> = states
        .windows(2)
        .map(|w| r_norm(&(&w[1] - &w[0]), p, rho))
        .collect();
    let verdict = fit_rate(&gaps);
    Ok(CauchyReport {
        prime: p,
        rho: Scalar::from(rho.rho().clone()),
        gaps,
        verdict,
    })
}

fn fit_rate(gaps: &[NormValue]) -> CauchyVerdict {
    for (i, w) in gaps.windows(2).enumerate() {
        if w[1] > w[0] {
            return CauchyVerdict::NotCauchy {
                index: i + 1,
                reason: format!("gap {} exceeds the previous gap {}", w[1], w[0]),
            };
        }
    }
    let mut rate: Option<BigRational> = None;
    for (i, g) in gaps.iter().enumerate() {
        if let Exponent::Finite(e) = g.exponent() {
            let r = e / BigRational::from_integer(BigInt::from(i + 1));
            if rate.as_ref().is_none_or(|x| r < *x) {
                rate = Some(r);
            }
        }
    }
    if let Some(r) = &rate {
        let stalled = gaps.len() >= 2 && gaps.first() == gaps.last();
        if *r <= BigRational::zero() || stalled {
            let index = gaps
                .iter()
                .position(
                    |g| matches!(g.exponent(), Exponent::Finite(e) if *e <= BigRational::zero()),
                )
                .unwrap_or(gaps.len() - 1);
            return CauchyVerdict::NotCauchy {
                index,
                reason: "gaps do not decrease to zero".into(),
            };
        }
    }
    CauchyVerdict::CauchyAtRate {
        rate: rate.map(Scalar::from),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenResidual {
    pub residual: Measured,
    pub rho: Scalar,
    /// Whether `rho` lies in the open window `(1/p, 1/(p-1))`.
    pub spectral_grade: bool,
}

/// `|L[0] a - λ a|_R`.
pub fn eigen_residual(a: &FockState, lambda: &PadicTarget, rho: &RExponent) -> EigenResidual {
    let p = lambda.prime();
    let l0 = apply_L0_bracket(a);
    let approx = lambda.approximant();
    let r0 = r_norm(&(&l0 - &a.scale(&approx)), p, rho);
    let residual = match lambda.precision() {
        None => Measured::exact(r0),
        Some(m) => {
            // λ = approx + ε with |ε| <= p^-m
            let err = NormValue::p_pow_neg(p, m as i64).mul(&r_norm(a, p, rho));
            if r0 > err {
                Measured::exact(r0)
            } else {
                Measured::bound(err)
            }
        }
    };
    EigenResidual {
        residual,
        rho: Scalar::from(rho.rho().clone()),
        spectral_grade: rho.is_spectral_grade(p),
    }
}

/// `p^e a` with `|p^e a|_R` in `[1, p)`.
pub fn normalize_r(a: &FockState, p: Prime, rho: &RExponent) -> FockState {
    match r_norm(a, p, rho).exponent() {
        Exponent::Infinite => a.clone(),
        Exponent::Finite(e) => {
            // |p^k a| = p^{-e-k}; want -e - k in [0, 1), i.e. k = floor(-e)
            let k = (-e).floor().to_integer();
            let k = k.to_i32().expect("moderate exponent");
            a.scale(&Scalar::from(p.get() as i64).pow(k))
        }
    }
}

/// `h[-1] h[-(k-1)] 1`, an exact `L[0]`-eigenstate of weight `k`.
pub fn eisenstein_seed(k: u32) -> Result<FockState> {
    if k < 2 {
        return Err(Error::InvalidArgument("weight must be at least 2".into()));
    }
    let inner = apply_h_bracket(-(k as i64 - 1), &FockState::vacuum());
    Ok(apply_h_bracket(-1, &inner))
}

/// A weight with its state and the scale relating `Z` of the state to `E_k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyMember {
    pub weight: u32,
    pub state: FockState,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenFamily {
    pub prime: u64,
    pub rho: Scalar,
    pub members: Vec<FamilyMember>,
}

/// States `a_k = h[-1]h[-(k-1)]1 / c_k` with `Z(a_k) = E_k`, where `c_k` is the
/// constant term of `Z(h[-1]h[-(k-1)]1)`.
pub fn eisenstein_matched_state(k: u32) -> Result<FockState> {
    let seed = eisenstein_seed(k)?;
    let c = z_function_with(&seed, 0, TraceRoute::Wick, Exec::Sequential)
        .coeff(0)
        .clone();
    if c.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "Z(h[-1]h[-{}]1) has no constant term",
            k - 1
        )));
    }
    Ok(seed.scale(&c.recip()))
}

/// Eisenstein-matched states at the given weights, rescaled to R-norm in `[1, p)`
/// when `normalize` is set.
pub fn build_family(
    weights: &[u32],
    p: Prime,
    rho: &RExponent,
    normalize: bool,
) -> Result<EigenFamily> {
    let members = weights
        .iter()
        .map(|&k| {
            let a = eisenstein_matched_state(k)?;
            let state = if normalize {
                normalize_r(&a, p, rho)
            } else {
                a
            };
            Ok(FamilyMember { weight: k, state })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenFamily {
        prime: p.get(),
        rho: Scalar::from(rho.rho().clone()),
        members,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyStep {
    pub weight: u32,
    /// `|k_i - λ|`.
    pub weight_distance: Measured,
    pub state_norm: NormValue,
    pub residual: Measured,
    /// Whether the residual equals `|k_i - λ| |a_i|_R`, as it must for an exact eigenstate.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub lambda: PadicTarget,
    pub rho: Scalar,
    pub spectral_grade: bool,
    pub steps: Vec<FamilyStep>,
    /// Residuals strictly decrease along the family.
    pub decreasing: bool,
    /// Weight distances strictly decrease along the family.
    pub weights_converge: bool,
    pub certified: bool,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.decreasing
            && self.weights_converge
            && self.certified
            && self.steps.iter().all(|s| s.consistent)
    }
}

/// Eigen-residuals of a family against `λ`, one step per member.
pub fn verify_family(
    family: &[FamilyMember],
    lambda: &PadicTarget,
    rho: &RExponent,
    exec: Exec,
) -> FamilyReport {
    let p = lambda.prime();
    let steps = exec.map(family, |m| {
        let weight_distance = lambda.distance(&Scalar::from(m.weight as i64));
        let state_norm = r_norm(&m.state, p, rho);
        let residual = eigen_residual(&m.state, lambda, rho).residual;
        let consistent =
            !weight_distance.exact || residual.norm == weight_distance.norm.mul(&state_norm);
        FamilyStep {
            weight: m.weight,
            weight_distance,
            state_norm,
            residual,
            consistent,
        }
    });
    let decreasing = steps
        .windows(2)
        .all(|w| w[1].residual.norm < w[0].residual.norm);
    let weights_converge = steps
        .windows(2)
        .all(|w| w[1].weight_distance.norm < w[0].weight_distance.norm);
    let certified = steps
        .iter()
        .all(|s| s.residual.exact && s.weight_distance.exact);
    FamilyReport {
        lambda: lambda.clone(),
        rho: Scalar::from(rho.rho().clone()),
        spectral_grade: rho.is_spectral_grade(p),
        steps,
        decreasing,
        weights_converge,
        certified,
    }
}

/// `n` in base `p`, least significant digit first, padded to `len` digits.
pub fn to_digits(n: &BigInt, p: Prime, len: usize) -> Vec<u64> {
    let modulus = p.pow(len as u32);
    let mut x = n.mod_floor(&modulus);
    let pb = BigInt::from(p.get());
    (0..len)
        .map(|_| {
            let (q, r) = x.div_mod_floor(&pb);
            x = q;
            r.to_u64().expect("digit")
        })
        .collect()
}

/// `v_p(k - λ)` helper for reports on integer weights.
pub fn weight_valuation(k: i64, lambda: i64, p: Prime) -> Option<i64> {
    let d = BigInt::from(k - lambda);
    (!d.is_zero()).then(|| integer_valuation(&d, p))
}

/// Two-mode bracket states `h[-a]h[-b]1` with `a + b = k`.
pub fn two_mode_states(k: u32) -> Vec<(u32, u32, FockState)> {
    (1..=k / 2)
        .map(|a| {
            let b = k - a;
            let inner = apply_h_bracket(-(b as i64), &FockState::vacuum());
            (a, b, apply_h_bracket(-(a as i64), &inner))
        })
        .collect()
}

/// Vacuum component of a state.
pub fn vacuum_coeff(a: &FockState) -> Scalar {
    a.coeff(&Partition::vacuum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::{apply_Lm1_bracket, bracket_lift};
    use crate::fock::basis;
    use crate::modforms::eisenstein;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn st(parts: &[u32]) -> FockState {
        FockState::from_parts(parts).unwrap()
    }

    fn rho(n: i64, d: i64) -> RExponent {
        RExponent::new(BigRational::new(n.into(), d.into())).unwrap()
    }

    #[test]
    fn resolvent_examples() {
        let t = PadicTarget::rational(p(5), Scalar::from(-1));
        assert_eq!(
            resolvent_apply(&t, &st(&[2])).unwrap(),
            st(&[2]).scale(&Scalar::new(1, 3))
        );
        let t = PadicTarget::rational(p(5), Scalar::new(1, 2));
        assert_eq!(
            resolvent_apply(&t, &FockState::vacuum()).unwrap(),
            FockState::vacuum().scale(&Scalar::from(-2))
        );
        let t = PadicTarget::rational(p(5), Scalar::from(3));
        assert!(matches!(
            resolvent_apply(&t, &st(&[1])),
            Err(Error::InPointSpectrum(_))
        ));
    }

    #[test]
    fn resolvent_is_two_sided_inverse() {
        for lam in [Scalar::from(-1), Scalar::new(1, 2), Scalar::new(1, 5)] {
            let t = PadicTarget::rational(p(5), lam.clone());
            for d in 0..=7 {
                for b in basis(d) {
                    let b = FockState::monomial(b);
                    assert_eq!(l0_shift(&lam, &resolvent_apply(&t, &b).unwrap()), b);
                    assert_eq!(resolvent_apply(&t, &l0_shift(&lam, &b)).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn profile_examples() {
        let t = PadicTarget::rational(p(3), Scalar::new(1, 3));
        let prof = resolvent_norm_profile(&t, 20, Exec::Sequential).unwrap();
        assert!(prof.constant);
        assert_eq!(prof.max, Some(NormValue::p_pow_neg(p(3), 1)));

        let t = PadicTarget::rational(p(2), Scalar::new(1, 2));
        let prof = resolvent_norm_profile(&t, 20, Exec::Sequential).unwrap();
        assert!(prof.constant);
        assert_eq!(prof.max, Some(NormValue::p_pow_neg(p(2), 1)));

        let t = PadicTarget::rational(p(5), Scalar::from(-1));
        let prof = resolvent_norm_profile(&t, 630, Exec::Sequential).unwrap();
        for e in &prof.entries {
            let v = integer_valuation(&BigInt::from(e.m + 1), p(5));
            assert_eq!(e.norm.clone().unwrap(), NormValue::p_pow_neg(p(5), -v));
        }
        assert_eq!(
            prof.entries[624].norm.clone().unwrap(),
            NormValue::p_pow_neg(p(5), -4)
        );
    }

    #[test]
    fn digit_profiles_flag_shortfall() {
        let t = PadicTarget::parse(p(2), "...11111110").unwrap();
        assert_eq!(t.precision(), Some(8));
        let prof = resolvent_norm_profile(&t, 300, Exec::Sequential).unwrap();
        assert_eq!(prof.precision_short, 1);
        assert_eq!(prof.entries[254].status, ProfileStatus::PrecisionShort);
        assert_eq!(
            prof.entries[6].norm.clone().unwrap(),
            NormValue::p_pow_neg(p(2), -3)
        );
    }

    #[test]
    fn point_spectrum_model() {
        for m in 0..=10 {
            assert_eq!(
                l0_kernel_dimension(&Scalar::from(m), 10),
                basis(m as u32).len()
            );
        }
        for lam in [Scalar::new(1, 2), Scalar::new(-1, 3), Scalar::new(2, 3)] {
            assert_eq!(l0_kernel_dimension(&lam, 10), 0);
        }
    }

    #[test]
    fn cauchy_examples() {
        let pr = p(3);
        let seq: Vec<FockState> = (0..6)
            .map(|i| {
                let mut s = FockState::zero();
                for d in 1..=i {
                    s.add_term(Partition::new(vec![d]).unwrap(), Scalar::from(3i64.pow(d)));
                }
                s
            })
            .collect();
        let r = cauchy_verify(&seq, pr, &RExponent::sup()).unwrap();
        for (j, g) in r.gaps.iter().enumerate() {
            assert_eq!(*g, NormValue::p_pow_neg(pr, j as i64 + 1));
        }
        assert_eq!(
            r.verdict,
            CauchyVerdict::CauchyAtRate {
                rate: Some(Scalar::one())
            }
        );

        let r = cauchy_verify(&seq, pr, &rho(1, 2)).unwrap();
        assert_eq!(
            r.verdict,
            CauchyVerdict::CauchyAtRate {
                rate: Some(Scalar::new(1, 2))
            }
        );

        let constant = vec![st(&[1]); 4];
        let r = cauchy_verify(&constant, pr, &RExponent::sup()).unwrap();
        assert!(r.gaps.iter().all(NormValue::is_zero));
        assert_eq!(r.verdict, CauchyVerdict::CauchyAtRate { rate: None });

        let bad = vec![st(&[1]), st(&[2]), st(&[3])];
        assert!(!cauchy_verify(&bad, pr, &RExponent::sup())
            .unwrap()
            .is_cauchy());
    }

    #[test]
    fn residual_examples() {
        let pr = p(2);
        let r = rho(5, 8);
        for d in 0..=5 {
            for v in basis(d) {
                let a = bracket_lift(&FockState::monomial(v)).unwrap();
                let t = PadicTarget::rational(pr, Scalar::from(d as i64));
                assert!(eigen_residual(&a, &t, &r).residual.norm.is_zero());
                let shifted = apply_Lm1_bracket(&a);
                let t1 = PadicTarget::rational(pr, Scalar::from(d as i64 + 1));
                assert!(eigen_residual(&shifted, &t1, &r).residual.norm.is_zero());
            }
        }
        let a = bracket_lift(&st(&[2])).unwrap();
        let t = PadicTarget::rational(pr, Scalar::from(3));
        assert_eq!(eigen_residual(&a, &t, &r).residual.norm, r_norm(&a, pr, &r));
        assert!(eigen_residual(&a, &t, &r).spectral_grade);
    }

    #[test]
    fn matched_states_give_eisenstein_series() {
        for k in [2u32, 4, 6, 8, 10] {
            let a = eisenstein_matched_state(k).unwrap();
            let z = z_function_with(&a, 10, TraceRoute::Wick, Exec::Sequential);
            assert_eq!(z, eisenstein(k, 10).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn normalization_window() {
        let pr = p(2);
        let r = rho(5, 8);
        let a = normalize_r(&eisenstein_matched_state(6).unwrap(), pr, &r);
        let n = r_norm(&a, pr, &r);
        assert!(n >= NormValue::one(pr) && n < NormValue::p_pow_neg(pr, -1));
    }

    #[test]
    fn family_demonstration_small() {
        let pr = p(2);
        let r = RExponent::spectral(BigRational::new(5.into(), 8.into()), pr).unwrap();
        let fam = build_family(&[2, 6, 14], pr, &r, true).unwrap();
        let t = PadicTarget::parse(pr, "...11111110").unwrap();
        let rep = verify_family(&fam.members, &t, &r, Exec::Sequential);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn digit_helpers() {
        assert_eq!(
            to_digits(&BigInt::from(-2), p(2), 8),
            vec![0, 1, 1, 1, 1, 1, 1, 1]
        );
        assert_eq!(weight_valuation(6, -2, p(2)), Some(3));
        assert_eq!(two_mode_states(6).len(), 3);
        assert_eq!(
            vacuum_coeff(&eisenstein_seed(2).unwrap()),
            Scalar::new(-1, 12)
        );
    }
}
