//! Truncated q-expansions of (quasi)modular and p-adic modular forms.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{integer_valuation, NormValue, Prime, Scalar};

/// `Σ_{n<=D} a_n q^n` with exact coefficients; `D` is the truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeries {
    truncation: usize,
    coeffs: Vec<Scalar>,
}

impl QSeries {
    pub fn zero(d: usize) -> Self {
        QSeries {
            truncation: d,
            coeffs: vec![Scalar::zero(); d + 1],
        }
    }

    pub fn constant(c: Scalar, d: usize) -> Self {
        let mut s = Self::zero(d);
        s.coeffs[0] = c;
        s
    }

    pub fn one(d: usize) -> Self {
        Self::constant(Scalar::one(), d)
    }

    /// Pads with zeros (or truncates) to `d`.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>, d: usize) -> Self {
        coeffs.resize(d + 1, Scalar::zero());
        QSeries {
            truncation: d,
            coeffs,
        }
    }

    pub fn from_fn(d: usize, f: impl Fn(usize) -> Scalar) -> Self {
        QSeries {
            truncation: d,
            coeffs: (0..=d).map(f).collect(),
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Scalar {
        &self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, d: usize) -> QSeries {
        let d = d.min(self.truncation);
        QSeries {
            truncation: d,
            coeffs: self.coeffs[..=d].to_vec(),
        }
    }

    fn zip(&self, other: &QSeries, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> QSeries {
        let d = self.truncation.min(other.truncation);
        QSeries::from_fn(d, |n| f(&self.coeffs[n], &other.coeffs[n]))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> QSeries {
        QSeries::from_fn(self.truncation, |n| &self.coeffs[n] * c)
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        self.mul_with(other, Exec::Sequential)
    }

    /// Product, computing output coefficients independently.
    pub fn mul_with(&self, other: &QSeries, exec: Exec) -> QSeries {
        let d = self.truncation.min(other.truncation);
        let coeffs = exec.map_range(0..d + 1, |n| {
            let mut acc = Scalar::zero();
            for i in 0..=n {
                let (a, b) = (&self.coeffs[i], &other.coeffs[n - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        });
        QSeries {
            truncation: d,
            coeffs,
        }
    }

    pub fn pow(&self, k: u32) -> QSeries {
        let mut acc = QSeries::one(self.truncation);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `q d/dq`.
    pub fn q_derivative(&self) -> QSeries {
        QSeries::from_fn(self.truncation, |n| {
            &self.coeffs[n] * Scalar::from(n as i64)
        })
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inverse(&self) -> Result<QSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("constant term is zero".into()));
        }
        let inv0 = self.coeffs[0].recip();
        let mut out: Vec<Scalar> = Vec::with_capacity(self.truncation + 1);
        for n in 0..=self.truncation {
            let mut acc = if n == 0 {
                Scalar::one()
            } else {
                Scalar::zero()
            };
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc -= &(&self.coeffs[i] * &out[n - i]);
                }
            }
            out.push(&acc * &inv0);
        }
        Ok(QSeries {
            truncation: self.truncation,
            coeffs: out,
        })
    }
}

fn bernoulli_cache() -> &'static Mutex<Vec<Scalar>> {
    static CACHE: OnceLock<Mutex<Vec<Scalar>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Scalar::one(), Scalar::new(-1, 2)]))
}

pub const BERNOULLI_CAP: u32 = 2000;

/// `B_k` for even `2 <= k <= 2000`, from `Σ_{j<=k} C(k+1, j) B_j = 0`.
pub fn bernoulli(k: u32) -> Result<Scalar> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "B_{k}: k must be even and at least 2"
        )));
    }
    if k > BERNOULLI_CAP {
        return Err(Error::InvalidArgument(format!(
            "B_{k}: k exceeds the cap {BERNOULLI_CAP}"
        )));
    }
    let mut table = bernoulli_cache().lock().unwrap();
    while table.len() <= k as usize {
        let m = table.len();
        if m % 2 == 1 {
            table.push(Scalar::zero());
            continue;
        }
        // Σ_{j<m} C(m+1, j) B_j over a common denominator
        let lcm = table.iter().fold(BigInt::one(), |l, b| l.lcm(b.denom()));
        let mut binom = BigInt::one();
        let mut num = BigInt::zero();
        for (j, b) in table.iter().enumerate() {
            if !b.is_zero() {
                num += &binom * b.numer() * (&lcm / b.denom());
            }
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let acc = Scalar::new(num, lcm);
        table.push(-acc / Scalar::from(m as i64 + 1));
    }
    Ok(table[k as usize].clone())
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `σ_e(n) = Σ_{d | n} d^e`.
pub fn sigma(e: u32, n: u64) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(e))
        .sum()
}

/// `σ*_e(n) = Σ_{d | n, p ∤ d} d^e`.
pub fn sigma_star(e: u32, n: u64, p: Prime) -> BigInt {
    divisors(n)
        .into_iter()
        .filter(|d| d % p.get() != 0)
        .map(|d| BigInt::from(d).pow(e))
        .sum()
}

/// `-2k/B_k`, the common factor of the nonconstant coefficients of `E_k`.
pub fn eisenstein_factor(k: u32) -> Result<Scalar> {
    Ok(-(Scalar::from(2 * k as i64) / bernoulli(k)?))
}

/// The `q^n` coefficient of `E_k`.
pub fn eisenstein_coeff(k: u32, n: u64) -> Result<Scalar> {
    if n == 0 {
        bernoulli(k)?;
        return Ok(Scalar::one());
    }
    Ok(eisenstein_factor(k)? * Scalar::from_integer(sigma(k - 1, n)))
}

/// `E_k = 1 - (2k/B_k) Σ σ_{k-1}(n) q^n` to `q^D`.
pub fn eisenstein(k: u32, d: usize) -> Result<QSeries> {
    let factor = eisenstein_factor(k)?;
    Ok(QSeries::from_fn(d, |n| {
        if n == 0 {
            Scalar::one()
        } else {
            &factor * Scalar::from_integer(sigma(k - 1, n as u64))
        }
    }))
}

/// `max_n |a_n|_p` over the stored window `q^0..q^D`; a lower bound for the
/// sup over all `n`.
pub fn sup_norm(f: &QSeries, p: Prime) -> NormValue {
    f.coeffs
        .iter()
        .map(|c| c.norm(p))
        .max()
        .unwrap_or_else(|| NormValue::zero(p))
}

/// Weights `k_0 < k_1 < ...`, even, with `k_{i+1} ≡ k_i mod (p-1)p^i`
/// and (for `p >= 5`) `k_i ≢ 0 mod (p-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerChain {
    prime: Prime,
    weights: Vec<u32>,
}

impl KummerChain {
    pub fn new(prime: Prime, weights: Vec<u32>) -> Result<Self> {
        let p = prime.get();
        if weights.is_empty() {
            return Err(Error::InvalidArgument("empty chain".into()));
        }
        for (i, &k) in weights.iter().enumerate() {
            if k < 2 || k % 2 == 1 {
                return Err(Error::InvalidArgument(format!(
                    "weight {k} must be even and at least 2"
                )));
            }
            if p >= 5 && (k as u64).is_multiple_of(p - 1) {
                return Err(Error::InvalidArgument(format!(
                    "weight {k} is divisible by p-1 = {}",
                    p - 1
                )));
            }
            if let Some(&next) = weights.get(i + 1) {
                let modulus = (p - 1) * p.pow(i as u32);
                if next <= k || !((next - k) as u64).is_multiple_of(modulus) {
                    return Err(Error::InvalidArgument(format!(
                        "weights {k} -> {next} violate k_(i+1) ≡ k_i mod {modulus}"
                    )));
                }
            }
        }
        Ok(KummerChain { prime, weights })
    }

    /// `k_{i+1} = k_i + (p-1) p^{i+1}` from `start`, with `steps` steps.
    pub fn generate(prime: Prime, start: u32, steps: usize) -> Result<Self> {
        let p = prime.get();
        let mut weights = vec![start];
        for i in 0..steps {
            let step = (p - 1)
                .checked_mul(p.checked_pow(i as u32 + 1).unwrap_or(u64::MAX))
                .filter(|s| *s <= BERNOULLI_CAP as u64)
                .ok_or_else(|| {
                    Error::InvalidArgument("chain weight exceeds the Bernoulli cap".into())
                })?;
            weights.push(weights[i] + step as u32);
        }
        Self::new(prime, weights)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `sup_{1<=n<=D} |a_n(E_{k_{i+1}}) - a_n(E_{k_i})|`; Kummer predicts `<= p^-(i+1)`.
pub fn kummer_diff(chain: &KummerChain, i: usize, d: usize) -> Result<NormValue> {
    let p = chain.prime;
    let (Some(&k), Some(&k2)) = (chain.weights.get(i), chain.weights.get(i + 1)) else {
        if chain.weights.get(i).is_some() {
            return Ok(NormValue::zero(p));
        }
        return Err(Error::InvalidArgument(format!("chain has no index {i}")));
    };
    let (f, f2) = (eisenstein_factor(k)?, eisenstein_factor(k2)?);
    let mut best = NormValue::zero(p);
    for n in 1..=d as u64 {
        let diff = &f2 * Scalar::from_integer(sigma(k2 - 1, n))
            - &f * Scalar::from_integer(sigma(k - 1, n));
        best = best.max(diff.norm(p));
    }
    Ok(best)
}

/// `q^n` coefficient of `E_k^*` known modulo `p^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarCoeff {
    pub n: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub residue: BigInt,
    pub modulus_exponent: u32,
    /// First chain index from which the residue no longer changes.
    pub stable_from: usize,
    /// The chain's last exact rational coefficient.
    pub last_value: Scalar,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// The chain-limit coefficient of `q^n` in `E_k^*` modulo `p^m`.
///
/// A chain of length `L` pins the limit to within `p^-L` (the next Kummer gap),
/// so `L >= m` is required.
pub fn eisenstein_star(chain: &KummerChain, n: u64, m: u32) -> Result<StarCoeff> {
    let p = chain.prime;
    let certified = chain.len() as u32;
    if certified < m {
        return Err(Error::InsufficientChain {
            target: m,
            certified,
        });
    }
    if n == 0 {
        return Ok(StarCoeff {
            n,
            residue: BigInt::one(),
            modulus_exponent: m,
            stable_from: 0,
            last_value: Scalar::one(),
        });
    }
    let mut residues = Vec::with_capacity(chain.len());
    let mut last = Scalar::zero();
    for &k in &chain.weights {
        last = eisenstein_factor(k)? * Scalar::from_integer(sigma(k - 1, n));
        let r = last
            .residue_mod_prime_power(p, m)
            .ok_or_else(|| Error::NotCauchy {
                index: residues.len(),
                reason: format!("coefficient of q^{n} at weight {k} is not {p}-integral"),
            })?;
        residues.push(r);
    }
    let final_residue = residues.last().expect("nonempty").clone();
    let stable_from = residues
        .iter()
        .rposition(|r| *r != final_residue)
        .map_or(0, |i| i + 1);
    Ok(StarCoeff {
        n,
        residue: final_residue,
        modulus_exponent: m,
        stable_from,
        last_value: last,
    })
}

/// `E_k^*` modulo `p^m` on `q^0..q^D`, as residues in `[0, p^m)`.
pub fn eisenstein_star_series(
    chain: &KummerChain,
    d: usize,
    m: u32,
    exec: Exec,
) -> Result<Vec<StarCoeff>> {
    exec.map_range(0..d + 1, |n| eisenstein_star(chain, n as u64, m))
        .into_iter()
        .collect()
}

/// Monomials `E2^a E4^b E6^c` of weight `2a + 4b + 6c = ℓ`, sorted by `(a, b, c)`.
pub fn quasimodular_monomials(weight: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    if weight % 2 == 1 {
        return out;
    }
    for a in 0..=weight / 2 {
        for b in 0..=weight / 4 {
            let rest = weight as i64 - 2 * a as i64 - 4 * b as i64;
            if rest >= 0 && rest % 6 == 0 {
                out.push((a, b, (rest / 6) as u32));
            }
        }
    }
    out.sort();
    out
}

/// Minimum margin of the q-window over the dimension of the monomial space.
pub const FIT_MARGIN: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasimodularFit {
    pub weight: u32,
    pub window: usize,
    pub monomials: Vec<(u32, u32, u32)>,
    pub coefficients: Vec<Scalar>,
    pub residual: QSeries,
    pub exact: bool,
}

pub fn quasimodular_basis(weight: u32, d: usize) -> Vec<QSeries> {
    let e2 = eisenstein(2, d).expect("E2");
    let e4 = eisenstein(4, d).expect("E4");
    let e6 = eisenstein(6, d).expect("E6");
    quasimodular_monomials(weight)
        .into_iter()
        .map(|(a, b, c)| e2.pow(a).mul(&e4.pow(b)).mul(&e6.pow(c)))
        .collect()
}

/// Exact fit of `f` on `q^0..q^D` by the weight-`ℓ` monomials in `E2, E4, E6`.
pub fn quasimodular_fit(f: &QSeries, weight: u32, d: usize) -> Result<QuasimodularFit> {
    let monomials = quasimodular_monomials(weight);
    let dim = monomials.len();
    let have = d.min(f.truncation);
    if have < dim + FIT_MARGIN {
        return Err(Error::UnderDetermined {
            needed: dim + FIT_MARGIN,
            have,
        });
    }
    let cols = quasimodular_basis(weight, have);
    let f = f.truncate(have);
    // Augmented rows [M_0(n) .. M_{dim-1}(n) | f(n)].
    let mut rows: Vec<Vec<Scalar>> = (0..=have)
        .map(|n| {
            let mut r: Vec<Scalar> = cols.iter().map(|c| c.coeff(n).clone()).collect();
            r.push(f.coeff(n).clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..dim {
        let Some(pr) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, pr);
        let inv = rows[next][col].recip();
        for x in rows[next].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &(&factor * y);
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    if pivots.len() < dim {
        return Err(Error::UnderDetermined {
            needed: dim + FIT_MARGIN + 1,
            have,
        });
    }
    let coefficients: Vec<Scalar> = (0..dim).map(|i| rows[i][dim].clone()).collect();
    let mut model = QSeries::zero(have);
    for (c, m) in coefficients.iter().zip(&cols) {
        model = model.add(&m.scale(c));
    }
    let residual = f.sub(&model);
    Ok(QuasimodularFit {
        weight,
        window: have,
        monomials,
        coefficients,
        exact: residual.is_zero(),
        residual,
    })
}

/// `v_p` of a nonzero integer, re-exported for reports.
pub fn valuation_of(n: &BigInt, p: Prime) -> Option<i64> {
    (!n.is_zero()).then(|| integer_valuation(&n.abs(), p))
}

/// `n mod p^m` in `[0, p^m)`.
pub fn reduce(n: &BigInt, p: Prime, m: u32) -> BigInt {
    n.mod_floor(&p.pow(m))
}
