//! Square-bracket modes from `Y[a, z] = e^{ℓz} Y(a, e^z - 1)`.
//!
//! For `h` (weight 1) the bracket mode is `h[n] = Σ_m θ(n, m) h(m)` with
//! `θ(n, m) = [z^{-n-1}] e^z (e^z - 1)^{-m-1}`. Writing `e^z - 1 = z u(z)` with
//! `u(0) = 1` gives `θ(n, m) = [z^{m-n}] e^z u^{-m-1}`, which vanishes for
//! `m < n` and is computed from power series only.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{basis, FockState};
use crate::modes::{apply_h, apply_l};
use crate::scalar::Scalar;

/// A truncated Laurent series `Σ_{k >= low} c_k z^k`, exact for `k < precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    low: i64,
    coeffs: Vec<Scalar>,
    precision: i64,
}

impl LaurentSeries {
    pub fn new(low: i64, coeffs: Vec<Scalar>, precision: i64) -> Self {
        let mut s = LaurentSeries {
            low,
            coeffs,
            precision,
        };
        s.trim();
        s
    }

    /// `z^k`, known to `precision`.
    pub fn monomial(k: i64, precision: i64) -> Self {
        Self::new(k, vec![Scalar::one()], precision)
    }

    /// `e^z` to `precision`.
    pub fn exp(precision: i64) -> Self {
        let mut coeffs = Vec::new();
        let mut c = Scalar::one();
        for k in 0..precision.max(0) {
            coeffs.push(c.clone());
            c = c * Scalar::new(1, k + 1);
        }
        Self::new(0, coeffs, precision)
    }

    /// `(e^z - 1)/z = Σ z^k/(k+1)!` to `precision`.
    pub fn expm1_over_z(precision: i64) -> Self {
        let e = Self::exp(precision + 1);
        Self::new(0, e.coeffs.into_iter().skip(1).collect(), precision)
    }

    fn trim(&mut self) {
        let keep = (self.precision - self.low).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.low = self.precision;
        } else {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Lowest exponent with a nonzero coefficient (`precision` for zero).
    pub fn order(&self) -> i64 {
        self.low
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^k`, or `None` past the precision.
    pub fn coeff(&self, k: i64) -> Option<Scalar> {
        if k >= self.precision {
            return None;
        }
        let i = k - self.low;
        if i < 0 || i as usize >= self.coeffs.len() {
            return Some(Scalar::zero());
        }
        Some(self.coeffs[i as usize].clone())
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let low = self.low + other.low;
        // Each factor is known up to its own precision, shifted by the other's order.
        let precision = (self.precision + other.low).min(other.precision + self.low);
        if self.is_zero() || other.is_zero() {
            return Self::new(low, Vec::new(), precision);
        }
        let len = (precision - low).max(0) as usize;
        let mut out = vec![Scalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += &(a * b);
            }
        }
        Self::new(low, out, precision)
    }

    /// Multiplicative inverse; requires a nonzero leading coefficient.
    pub fn inverse(&self) -> Result<LaurentSeries> {
        let Some(lead) = self.coeffs.first() else {
            return Err(Error::InvalidArgument("inverse of a zero series".into()));
        };
        let rel = self.precision - self.low;
        let inv_lead = lead.recip();
        let mut out: Vec<Scalar> = Vec::with_capacity(rel as usize);
        for k in 0..rel as usize {
            let mut acc = if k == 0 {
                Scalar::one()
            } else {
                Scalar::zero()
            };
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc -= &(&self.coeffs[j] * &out[k - j]);
            }
            out.push(&acc * &inv_lead);
        }
        Ok(Self::new(-self.low, out, rel - self.low))
    }

    pub fn pow(&self, k: i64) -> Result<LaurentSeries> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = LaurentSeries::monomial(0, base.precision - base.low);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

/// `θ(n, m)` for all `m` in `[-dmax, dmax]` (zero below `n`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BracketCoeffTable {
    pub n: i64,
    pub dmax: u32,
    pub theta: BTreeMap<i64, Scalar>,
}

impl BracketCoeffTable {
    pub fn get(&self, m: i64) -> Option<&Scalar> {
        self.theta.get(&m)
    }
}

/// Computes the table with series truncated at relative order `extra + dmax - n + 1`.
fn compute_table(n: i64, dmax: u32, extra: i64) -> BracketCoeffTable {
    let d = dmax as i64;
    let mut theta = BTreeMap::new();
    for m in -d..n.min(d + 1) {
        theta.insert(m, Scalar::zero());
    }
    let start = n.max(-d);
    if start > d {
        return BracketCoeffTable { n, dmax, theta };
    }
    // Substituting w = e^z - 1 turns [z^{m-n}] e^z u^{-m-1} into [w^{m-n}] (log(1+w)/w)^n.
    let len = (d - n + 1 + extra) as usize;
    let log_ratio: Vec<Scalar> = (0..len)
        .map(|i| Scalar::new(if i % 2 == 0 { 1 } else { -1 }, i as i64 + 1))
        .collect();
    let g = unit_series_pow(&log_ratio, n);
    for m in start..=d {
        theta.insert(m, g[(m - n) as usize].clone());
    }
    BracketCoeffTable { n, dmax, theta }
}

/// `f^e` for a power series with `f[0] = 1`, by the recurrence
/// `k g_k = Σ_{j=1..k} ((e+1) j - k) f_j g_{k-j}`.
fn unit_series_pow(f: &[Scalar], e: i64) -> Vec<Scalar> {
    let mut g: Vec<Scalar> = Vec::with_capacity(f.len());
    if f.is_empty() {
        return g;
    }
    g.push(Scalar::one());
    for k in 1..f.len() {
        let mut acc = Scalar::zero();
        for j in 1..=k {
            let w = (e + 1) * j as i64 - k as i64;
            if w != 0 && !f[j].is_zero() {
                acc += &(&(&f[j] * &g[k - j]) * &Scalar::from(w));
            }
        }
        g.push(acc / Scalar::from(k as i64));
    }
    g
}

fn table_cache() -> &'static Mutex<HashMap<i64, Arc<BracketCoeffTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Arc<BracketCoeffTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `θ(n, m)` for `-dmax <= m <= dmax`.
pub fn bracket_coeffs(n: i64, dmax: u32) -> BracketCoeffTable {
    let cached = table_cache().lock().unwrap().get(&n).cloned();
    let table = match cached {
        Some(t) if t.dmax >= dmax => t,
        _ => {
            let t = Arc::new(compute_table(n, dmax, 0));
            table_cache().lock().unwrap().insert(n, t.clone());
            t
        }
    };
    let d = dmax as i64;
    BracketCoeffTable {
        n,
        dmax,
        theta: table
            .theta
            .range(-d..=d)
            .map(|(k, v)| (*k, v.clone()))
            .collect(),
    }
}

/// The same table recomputed with doubled series order, for certification.
pub fn bracket_coeffs_doubled(n: i64, dmax: u32) -> BracketCoeffTable {
    let order = dmax as i64 - n + 1;
    compute_table(n, dmax, order.max(1))
}

/// `h[n] b`.
pub fn apply_h_bracket(n: i64, b: &FockState) -> FockState {
    let Some(deg) = b.degree() else {
        return FockState::zero();
    };
    let mut out = FockState::zero();
    if n > deg as i64 {
        return out;
    }
    let table = bracket_coeffs(n, deg.max(n.unsigned_abs() as u32));
    for (&m, c) in table.theta.range(n..=deg as i64) {
        if m == 0 || c.is_zero() {
            continue;
        }
        out.add_scaled(&apply_h(m, b), c);
    }
    out
}

fn l0_bracket_coeff(n: i64) -> Scalar {
    let sign = if n % 2 == 1 { 1 } else { -1 };
    Scalar::new(sign, n * (n + 1))
}

/// `L[0] = L(0) + Σ_{n>=1} (-1)^{n+1}/(n(n+1)) L(n)`.
#[allow(non_snake_case)]
pub fn apply_L0_bracket(b: &FockState) -> FockState {
    let mut out = apply_l(0, b);
    let deg = b.degree().unwrap_or(0) as i64;
    for n in 1..=deg {
        out.add_scaled(&apply_l(n, b), &l0_bracket_coeff(n));
    }
    out
}

/// `L[-1] = L(0) + L(-1)`.
#[allow(non_snake_case)]
pub fn apply_Lm1_bracket(b: &FockState) -> FockState {
    &apply_l(0, b) + &apply_l(-1, b)
}

/// The `L[0]`-eigenstate `v + (lower-degree terms)` with eigenvalue `deg v`.
pub fn bracket_lift(v: &FockState) -> Result<FockState> {
    if v.is_zero() {
        return Ok(FockState::zero());
    }
    let l = v.homogeneous_weight().ok_or(Error::NotHomogeneous)? as i64;
    let mut comps: Vec<FockState> = vec![FockState::zero(); l as usize + 1];
    comps[l as usize] = v.clone();
    for j in (0..l).rev() {
        let mut acc = FockState::zero();
        for n in 1..=l - j {
            let above = &comps[(j + n) as usize];
            if !above.is_zero() {
                acc.add_scaled(&apply_l(n, above), &l0_bracket_coeff(n));
            }
        }
        comps[j as usize] = acc.scale(&Scalar::new(1, l - j));
    }
    let mut out = FockState::zero();
    for c in &comps {
        out.add_assign(c);
    }
    Ok(out)
}

/// Lifts of every basis vector of degree `d`, in basis order.
pub fn bracket_lift_basis(d: u32, exec: Exec) -> Vec<FockState> {
    exec.map(&basis(d), |p| {
        bracket_lift(&FockState::monomial(p.clone())).expect("basis vectors are homogeneous")
    })
}

/// `ω̃ = ω - (c/24) 1` with `c = 1`.
pub fn omega_tilde() -> FockState {
    let mut w = FockState::from_parts(&[1, 1])
        .expect("valid")
        .scale(&Scalar::new(1, 2));
    w.add_term(crate::fock::Partition::vacuum(), Scalar::new(-1, 24));
    w
}

/// `θ(-k, -j) = (j-1)! S(k, j) / (k-1)!` for `1 <= j <= k`, via Stirling numbers
/// of the second kind; an independent route to the creation part of `h[-k]`.
pub fn creation_coeff_closed_form(k: u32, j: u32) -> Scalar {
    if j == 0 || j > k {
        return Scalar::zero();
    }
    creation_row(k)[j as usize - 1].clone()
}

/// `θ(-k, -j)` for `j = 1..=k`.
fn creation_row(k: u32) -> Arc<Vec<Scalar>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Scalar>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(row) = cache.lock().unwrap().get(&k) {
        return row.clone();
    }
    let k = k as usize;
    // Row k of the Stirling triangle S(k, j), built one row at a time.
    let mut s = vec![BigInt::from(0); k + 1];
    s[0] = BigInt::from(1);
    for n in 1..=k {
        for i in (1..=n).rev() {
            s[i] = &s[i - 1] + &s[i] * BigInt::from(i);
        }
        s[0] = BigInt::from(0);
    }
    let fact_k1: BigInt = (1..k).fold(BigInt::from(1), |a, i| a * BigInt::from(i));
    let mut fact_j1 = BigInt::from(1);
    let mut row = Vec::with_capacity(k);
    for (j, s_kj) in s.iter().enumerate().skip(1) {
        if j > 1 {
            fact_j1 *= BigInt::from(j - 1);
        }
        row.push(Scalar::from_integer(&fact_j1 * s_kj) / Scalar::from_integer(fact_k1.clone()));
    }
    let row = Arc::new(row);
    cache.lock().unwrap().insert(k as u32, row.clone());
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Partition;

    fn st(parts: &[u32]) -> FockState {
        FockState::from_parts(parts).unwrap()
    }

    #[test]
    fn series_inverse_and_pow() {
        let u = LaurentSeries::expm1_over_z(8);
        let one = u.mul(&u.inverse().unwrap());
        for k in 0..8 {
            assert_eq!(
                one.coeff(k).unwrap(),
                if k == 0 {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            );
        }
        assert_eq!(one.coeff(8), None);
        let z = LaurentSeries::monomial(1, 5);
        let zi = z.inverse().unwrap();
        assert_eq!(zi.order(), -1);
        assert_eq!(u.pow(-1).unwrap(), u.inverse().unwrap());
        // (e^z)^2 = e^{2z}
        let e2 = LaurentSeries::exp(6).pow(2).unwrap();
        assert_eq!(e2.coeff(3).unwrap(), Scalar::new(8, 6));
    }

    #[test]
    fn theta_examples() {
        let t = bracket_coeffs(-1, 4);
        assert_eq!(t.get(-1).unwrap(), &Scalar::one());
        let t = bracket_coeffs(-2, 4);
        assert_eq!(t.get(-2).unwrap(), &Scalar::one());
        assert_eq!(t.get(-1).unwrap(), &Scalar::one());
        for n in -4..3 {
            let t = bracket_coeffs(n, 5);
            for m in -5..n {
                assert!(t.get(m).unwrap().is_zero());
            }
        }
        // h[-1] = h(-1) + h(0)/2 - h(1)/12 + ...
        let t = bracket_coeffs(-1, 3);
        assert_eq!(t.get(0).unwrap(), &Scalar::new(1, 2));
        assert_eq!(t.get(1).unwrap(), &Scalar::new(-1, 12));
    }

    /// `θ(n, m) = [z^{m-n}] e^z u^{-m-1}` expanded directly.
    fn theta_by_exp(n: i64, m: i64) -> Scalar {
        let order = m - n + 1;
        let u = LaurentSeries::expm1_over_z(order);
        let g = LaurentSeries::exp(order).mul(&u.pow(-m - 1).unwrap());
        g.coeff(m - n).unwrap()
    }

    #[test]
    fn theta_matches_direct_expansion() {
        for n in -7..4 {
            let t = bracket_coeffs(n, 7);
            for m in n.max(-7)..=7 {
                assert_eq!(t.get(m).unwrap(), &theta_by_exp(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn theta_survives_doubled_order() {
        for n in -6..4 {
            for dmax in [0, 3, 6] {
                assert_eq!(bracket_coeffs(n, dmax), bracket_coeffs_doubled(n, dmax));
            }
        }
    }

    #[test]
    fn creation_coefficients_match_stirling_form() {
        for k in 1..9u32 {
            let t = bracket_coeffs(-(k as i64), k);
            for j in 1..=k {
                assert_eq!(
                    t.get(-(j as i64)).unwrap(),
                    &creation_coeff_closed_form(k, j)
                );
            }
        }
    }

    #[test]
    fn bracket_mode_examples() {
        let vac = FockState::vacuum();
        assert_eq!(apply_h_bracket(-1, &vac), st(&[1]));
        for n in 0..4 {
            assert!(apply_h_bracket(n, &vac).is_zero());
        }
        assert_eq!(apply_h_bracket(-2, &vac), &st(&[2]) + &st(&[1]));
        assert_eq!(apply_h_bracket(-2, &vac), bracket_lift(&st(&[2])).unwrap());
    }

    #[test]
    fn l0_bracket_examples() {
        assert_eq!(apply_L0_bracket(&st(&[1])), st(&[1]));
        assert!(apply_L0_bracket(&FockState::vacuum()).is_zero());
        assert_eq!(
            apply_L0_bracket(&st(&[2])),
            &st(&[2]).scale(&Scalar::from(2)) + &st(&[1])
        );
    }

    #[test]
    fn lm1_bracket_examples() {
        assert!(apply_Lm1_bracket(&FockState::vacuum()).is_zero());
        assert_eq!(apply_Lm1_bracket(&st(&[1])), &st(&[1]) + &st(&[2]));
    }

    #[test]
    fn lift_examples() {
        assert_eq!(bracket_lift(&st(&[1])).unwrap(), st(&[1]));
        assert_eq!(bracket_lift(&st(&[2])).unwrap(), &st(&[2]) + &st(&[1]));
        assert_eq!(
            bracket_lift(&FockState::vacuum()).unwrap(),
            FockState::vacuum()
        );
        let mut expect = st(&[1, 1]);
        expect.add_term(Partition::vacuum(), Scalar::new(-1, 12));
        assert_eq!(bracket_lift(&st(&[1, 1])).unwrap(), expect);
        assert!(bracket_lift(&(&st(&[1]) + &st(&[2]))).is_err());
    }

    #[test]
    fn lifts_are_eigenstates() {
        for d in 0..7 {
            for a in bracket_lift_basis(d, Exec::Sequential) {
                let r = &apply_L0_bracket(&a) - &a.scale(&Scalar::from(d as i64));
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn bracket_monomials_match_lifts() {
        for d in 1..6 {
            for p in basis(d) {
                let mut s = FockState::vacuum();
                for &n in p.parts().iter().rev() {
                    s = apply_h_bracket(-(n as i64), &s);
                }
                assert_eq!(s.component(d), FockState::monomial(p.clone()));
                assert_eq!(
                    s,
                    bracket_lift(&FockState::monomial(p.clone())).unwrap(),
                    "{p:?}"
                );
            }
        }
    }

    #[test]
    fn omega_tilde_value() {
        let w = omega_tilde();
        assert_eq!(w.coeff(&Partition::vacuum()), Scalar::new(-1, 24));
        assert_eq!(
            bracket_lift(&st(&[1, 1]))
                .unwrap()
                .scale(&Scalar::new(1, 2))
                .coeff(&Partition::vacuum()),
            Scalar::new(-1, 24)
        );
    }
}
