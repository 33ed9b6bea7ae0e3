//! One-point functions `F(a) = Tr o(a) q^{L(0)-1/24}` and `Z(a) = η F(a)`.
//!
//! The `q^{∓1/24}` prefactors cancel, so `Z(a) = Π(1-q^n) Σ_d Tr_d o(a) q^d`
//! lives in integral q-powers throughout.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::brackets::bracket_lift;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{partition_numbers, sup_norm, FockState, Partition};
use crate::modes::{binomial, monomial_zero_mode_traces};
use crate::modforms::{quasimodular_fit, QSeries, QuasimodularFit};
use crate::scalar::{NormValue, Prime, Scalar};

/// `Π_{n>=1} (1 - q^n)` via Euler's pentagonal number theorem.
pub fn eta(d: usize) -> QSeries {
    let mut coeffs = vec![Scalar::zero(); d + 1];
    for k in 0i64.. {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        if g1 > d {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        coeffs[g1] = Scalar::from(sign);
        if k > 0 {
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= d {
                coeffs[g2] = Scalar::from(sign);
            }
        }
    }
    QSeries::from_coeffs(coeffs, d)
}

/// `Σ p(n) q^n`, the graded character of the Fock space.
pub fn eta_inverse(d: usize) -> QSeries {
    let coeffs = partition_numbers(d)
        .into_iter()
        .map(|n| Scalar::from(n as i64))
        .collect();
    QSeries::from_coeffs(coeffs, d)
}

/// How slice traces of `o(h^I)` are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceRoute {
    /// Diagonal entries of the zero-mode matrices on each slice.
    #[default]
    Matrix,
    /// Wick contractions of the normal-ordered zero mode.
    Wick,
}

/// `Tr_d o(h^I)` for `d = 0..=D`: the coefficients of `q^{1/24} F(h^I)`.
pub fn monomial_traces(mono: &Partition, d: usize) -> QSeries {
    let traces = monomial_zero_mode_traces(mono, d as u32);
    QSeries::from_coeffs(traces.into_iter().map(Scalar::from_integer).collect(), d)
}

/// Pair series `Σ_v C(v-1, n_c - 1) C(-v-1, n_a - 1) v q^v/(1-q^v)` for a
/// creator slot `n_c` contracted with an annihilator slot `n_a`.
fn contraction(n_c: u32, n_a: u32, d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); d + 1];
    for v in 1..=d {
        let c = binomial(v as i64 - 1, n_c as u64 - 1)
            * binomial(-(v as i64) - 1, n_a as u64 - 1)
            * BigInt::from(v);
        if c == BigInt::from(0) {
            continue;
        }
        let mut k = v;
        while k <= d {
            out[k] += &c;
            k += v;
        }
    }
    out
}

fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = a.len().min(b.len());
    let mut out = vec![BigInt::from(0); d];
    for (i, x) in a.iter().enumerate().take(d) {
        if *x == BigInt::from(0) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(d - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Z(h^I)` as a hafnian over pair contractions.
fn wick_z(mono: &Partition, d: usize) -> QSeries {
    let parts = mono.parts();
    let k = parts.len();
    if k % 2 == 1 {
        return QSeries::zero(d);
    }
    let mut pair = vec![vec![Vec::new(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let a = contraction(parts[i], parts[j], d);
            let b = contraction(parts[j], parts[i], d);
            pair[i][j] = a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
        }
    }
    fn hafnian(free: &mut Vec<usize>, pair: &[Vec<Vec<BigInt>>], d: usize) -> Vec<BigInt> {
        if free.is_empty() {
            let mut one = vec![BigInt::from(0); d + 1];
            one[0] = BigInt::from(1);
            return one;
        }
        let first = free.remove(0);
        let mut acc = vec![BigInt::from(0); d + 1];
        for idx in 0..free.len() {
            let partner = free.remove(idx);
            let rest = hafnian(free, pair, d);
            let term = mul_int(&pair[first][partner], &rest);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
            free.insert(idx, partner);
        }
        free.insert(0, first);
        acc
    }
    let coeffs = hafnian(&mut (0..k).collect(), &pair, d);
    QSeries::from_coeffs(coeffs.into_iter().map(Scalar::from_integer).collect(), d)
}

type ZCache = Mutex<HashMap<(Partition, TraceRoute), QSeries>>;

fn z_cache() -> &'static ZCache {
    static CACHE: OnceLock<ZCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Z(h^I)` to `q^D`, cached per monomial and route.
pub fn monomial_z(mono: &Partition, d: usize, route: TraceRoute) -> QSeries {
    let key = (mono.clone(), route);
    if let Some(s) = z_cache().lock().unwrap().get(&key) {
        if s.truncation() >= d {
            return s.truncate(d);
        }
    }
    let z = match route {
        TraceRoute::Matrix => eta(d).mul(&monomial_traces(mono, d)),
        TraceRoute::Wick => wick_z(mono, d),
    };
    z_cache().lock().unwrap().insert(key, z.clone());
    z
}

/// `F(a)` without the `q^{-1/24}` prefactor.
pub fn f_function(a: &FockState, d: usize) -> QSeries {
    z_function(a, d).mul(&eta_inverse(d))
}

/// `Z(a)` to `q^D`, extended linearly over homogeneous components.
pub fn z_function(a: &FockState, d: usize) -> QSeries {
    z_function_with(a, d, TraceRoute::Matrix, Exec::default())
}

pub fn z_function_with(a: &FockState, d: usize, route: TraceRoute, exec: Exec) -> QSeries {
    let terms: Vec<(&Partition, &Scalar)> = a.terms().collect();
    let parts = exec.map(&terms, |(p, c)| monomial_z(p, d, route).scale(c));
    parts.iter().fold(QSeries::zero(d), |acc, s| acc.add(s))
}

/// `Z` of a state together with its quasimodular fit.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub state: String,
    pub weight: Option<u32>,
    pub truncation: usize,
    pub series: QSeries,
    pub fit: Option<QuasimodularFit>,
    pub residual_zero: Option<bool>,
}

impl TraceReport {
    pub fn new(
        state: String,
        series: QSeries,
        weight: Option<u32>,
        fit: Option<QuasimodularFit>,
    ) -> Self {
        let residual_zero = fit.as_ref().map(|f| f.exact);
        TraceReport {
            state,
            weight,
            truncation: series.truncation(),
            series,
            fit,
            residual_zero,
        }
    }
}

/// Lift `v` to an `L[0]`-eigenstate, take `Z`, and fit at weight `deg v`.
pub fn graded_check(v: &FockState, d: usize) -> Result<TraceReport> {
    graded_check_with(v, d, TraceRoute::Matrix, Exec::default())
}

pub fn graded_check_with(
    v: &FockState,
    d: usize,
    route: TraceRoute,
    exec: Exec,
) -> Result<TraceReport> {
    let weight = if v.is_zero() {
        0
    } else {
        v.homogeneous_weight().ok_or(Error::NotHomogeneous)?
    };
    let a = bracket_lift(v)?;
    let series = z_function_with(&a, d, route, exec);
    let fit = quasimodular_fit(&series, weight, d)?;
    Ok(TraceReport::new(
        crate::expr::print_state(v),
        series,
        Some(weight),
        Some(fit),
    ))
}

/// Coefficientwise limit of `Z(a_i)`.
#[derive(Clone, Debug, Serialize)]
pub struct ZLimit {
    pub series: QSeries,
    /// `|Z(a_n)_k - Z(a_{n-1})_k|` per coefficient for the last step.
    pub coefficient_errors: Vec<NormValue>,
    /// Sup-norm of the last state gap; bounds every coefficient error since `Z` has integral coefficients on monomials.
    pub state_gap: NormValue,
    pub state_gaps: Vec<NormValue>,
}

/// Sup-norm gaps `|a_{i+1} - a_i|`, checked to decrease to zero.
pub fn sup_gaps(states: &[FockState], p: Prime) -> Result<Vec<NormValue>> {
    let gaps: Vec<NormValue> = states
        .windows(2)
        .map(|w| sup_norm(&(&w[1] - &w[0]), p))
        .collect();
    for (i, g) in gaps.iter().enumerate() {
        let prev = if i == 0 {
            NormValue::one(p)
        } else {
            gaps[i - 1].clone()
        };
        if !g.is_zero() && *g >= prev {
            return Err(Error::NotCauchy {
                index: i,
                reason: format!("gap {g} does not decrease below {prev}"),
            });
        }
    }
    Ok(gaps)
}

/// `Ẑ(lim a_i)` modeled on a finite Cauchy sequence.
pub fn z_limit(states: &[FockState], d: usize, p: Prime) -> Result<ZLimit> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("empty state sequence".into()));
    }
    let gaps = sup_gaps(states, p)?;
    let images: Vec<QSeries> = states.iter().map(|a| z_function(a, d)).collect();
    let last = images.last().expect("nonempty").clone();
    let coefficient_errors = match images.len() {
        1 => vec![NormValue::zero(p); d + 1],
        n => {
            let prev = &images[n - 2];
            (0..=d)
                .map(|k| (last.coeff(k) - prev.coeff(k)).norm(p))
                .collect()
        }
    };
    Ok(ZLimit {
        series: last,
        coefficient_errors,
        state_gap: gaps.last().cloned().unwrap_or_else(|| NormValue::zero(p)),
        state_gaps: gaps,
    })
}

/// Coefficientwise p-adic limit of a sequence of q-series, modulo `p^m`.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesLimit {
    pub modulus_exponent: u32,
    /// Residues of the last series in `[0, p^m)`.
    pub residues: Vec<String>,
    /// First index from which each residue no longer changes.
    pub stable_from: Vec<usize>,
    /// Sup-norm gaps `|f_{i+1} - f_i|` over the shared window.
    pub gaps: Vec<NormValue>,
}

pub fn series_limit(series: &[QSeries], p: Prime, m: u32) -> Result<SeriesLimit> {
    let Some(last) = series.last() else {
        return Err(Error::InvalidArgument("empty series sequence".into()));
    };
    let d = series.iter().map(QSeries::truncation).min().unwrap_or(0);
    let residue = |f: &QSeries, n: usize, i: usize| {
        f.coeff(n)
            .residue_mod_prime_power(p, m)
            .ok_or_else(|| Error::NotCauchy {
                index: i,
                reason: format!("coefficient of q^{n} is not {p}-integral"),
            })
    };
    let mut residues = Vec::with_capacity(d + 1);
    let mut stable_from = Vec::with_capacity(d + 1);
    for n in 0..=d {
        let r = residue(last, n, series.len() - 1)?;
        let mut from = series.len() - 1;
        while from > 0 && residue(&series[from - 1], n, from - 1)? == r {
            from -= 1;
        }
        residues.push(r.to_string());
        stable_from.push(from);
    }
    let gaps = series
        .windows(2)
        .map(|w| crate::modforms::sup_norm(&w[1].truncate(d).sub(&w[0].truncate(d)), p))
        .collect();
    Ok(SeriesLimit {
        modulus_exponent: m,
        residues,
        stable_from,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis;
    use crate::modforms::eisenstein;

    fn st(parts: &[u32]) -> FockState {
        FockState::from_parts(parts).unwrap()
    }

    #[test]
    fn eta_inverse_examples() {
        let e = eta_inverse(10);
        assert_eq!(e.coeff(0), &Scalar::one());
        assert_eq!(e.coeff(4), &Scalar::from(5));
        assert_eq!(e.coeff(6), &Scalar::from(11));
        assert_eq!(eta(10).mul(&e), QSeries::one(10));
    }

    #[test]
    fn slice_dimensions_match_character() {
        let e = eta_inverse(30);
        for d in 0..=30 {
            assert_eq!(e.coeff(d), &Scalar::from(basis(d as u32).len() as i64));
        }
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_function(&FockState::vacuum(), 12), QSeries::one(12));
        let d = 12;
        let expect = QSeries::one(d)
            .sub(&eisenstein(2, d).unwrap())
            .scale(&Scalar::new(1, 12));
        assert_eq!(z_function(&st(&[1, 1]), d), expect);
        let lifted = bracket_lift(&st(&[1, 1])).unwrap();
        assert_eq!(
            z_function(&lifted, d),
            eisenstein(2, d).unwrap().scale(&Scalar::new(-1, 12))
        );
    }

    #[test]
    fn routes_agree() {
        for w in 0..=6 {
            for p in basis(w) {
                assert_eq!(
                    monomial_z(&p, 10, TraceRoute::Matrix),
                    monomial_z(&p, 10, TraceRoute::Wick),
                    "{p:?}"
                );
            }
        }
    }

    #[test]
    fn odd_bracket_states_vanish() {
        for w in [1, 3, 5] {
            for p in basis(w) {
                let a = bracket_lift(&FockState::monomial(p)).unwrap();
                assert!(z_function(&a, 8).is_zero());
            }
        }
    }

    #[test]
    fn graded_examples() {
        let r = graded_check(&FockState::vacuum(), 10).unwrap();
        assert!(r.residual_zero.unwrap());
        assert_eq!(r.fit.unwrap().coefficients, vec![Scalar::one()]);
        let r = graded_check(&st(&[1]), 10).unwrap();
        assert!(r.series.is_zero());
        for v in basis(4) {
            assert!(graded_check(&FockState::monomial(v), 14)
                .unwrap()
                .residual_zero
                .unwrap());
        }
    }

    #[test]
    fn z_limit_examples() {
        let p = Prime::new(3).unwrap();
        let a = st(&[1, 1]);
        let lim = z_limit(&[a.clone(), a.clone(), a.clone()], 8, p).unwrap();
        assert_eq!(lim.series, z_function(&a, 8));
        assert!(lim.coefficient_errors.iter().all(NormValue::is_zero));

        let seq: Vec<FockState> = (1..5)
            .map(|i| {
                let mut s = a.clone();
                s.add_scaled(&st(&[2, 2]), &Scalar::from(3i64.pow(i)));
                s
            })
            .collect();
        let lim = z_limit(&seq, 8, p).unwrap();
        assert_eq!(lim.state_gap, NormValue::p_pow_neg(p, 3));
        assert!(lim.coefficient_errors.iter().all(|e| *e <= lim.state_gap));

        let images: Vec<QSeries> = seq.iter().map(|a| z_function(a, 8)).collect();
        let sl = series_limit(&images, p, 2).unwrap();
        assert!(sl.stable_from.iter().all(|&i| i <= 1));

        let bad = [st(&[2]), st(&[4])];
        assert!(matches!(
            z_limit(&bad, 4, p),
            Err(Error::NotCauchy { index: 0, .. })
        ));
    }
}
