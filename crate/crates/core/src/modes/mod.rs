//! Mode actions on the Fock space.
//!
//! `h(n)` acts by the abelian Heisenberg relations `[h(m), h(n)] = m δ_{m,-n}`,
//! `L(n)` by the normal-ordered bilinears `½ Σ :h(a)h(n-a):`, and the modes of
//! an arbitrary state are built by peeling one `h(-n)` at a time with the
//! `r = 0` instance of the Jacobi identity:
//!
//! ```text
//! (h(-n)a)(s)c = Σ_i C(n-1+i, n-1) { h(-n-i) a(s+i) c - (-1)^n a(s-n-i) h(i) c }
//! ```

pub mod axioms;

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{basis, FockState, Partition};
use crate::scalar::Scalar;

/// `h(n) b`.
pub fn apply_h(n: i64, b: &FockState) -> FockState {
    let mut out = FockState::zero();
    if n == 0 {
        return out;
    }
    for (p, c) in b.terms() {
        if n < 0 {
            out.add_term(p.with_part((-n) as u32), c.clone());
        } else {
            let n = n as u32;
            let mu = p.multiplicity(n);
            if mu > 0 {
                let q = p.without_part(n).expect("part present");
                out.add_term(q, c * Scalar::from((n * mu) as i64));
            }
        }
    }
    out
}

/// `L(n) b` for the Virasoro modes of `ω = ½ h(-1)^2 1` (central charge 1).
pub fn apply_l(n: i64, b: &FockState) -> FockState {
    let mut out = FockState::zero();
    let Some(deg) = b.degree() else {
        return out;
    };
    let half = Scalar::new(1, 2);
    // :h(a)h(c): with a <= c, a + c = n; the larger index acts first.
    let lo = n.div_euclid(2) + n.rem_euclid(2);
    for c in lo..=deg as i64 {
        let a = n - c;
        if a == 0 || c == 0 {
            continue;
        }
        let inner = apply_h(c, b);
        if inner.is_zero() {
            continue;
        }
        let term = apply_h(a, &inner);
        if a == c {
            out.add_scaled(&term, &half);
        } else {
            out.add_assign(&term);
        }
    }
    out
}

/// Integer-coefficient states produced by modes of basis monomials.
pub type IntTerms = HashMap<Partition, i128>;

fn binom_u(n: u64, k: u64) -> i128 {
    let k = k.min(n - k.min(n));
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

fn checked(x: Option<i128>) -> i128 {
    x.expect("mode coefficient overflowed i128; lower the degree cap")
}

/// Modes of a fixed basis monomial `h^I`, memoized over `(suffix, mode, partition)`.
pub struct MonomialModes {
    parts: Vec<u32>,
    suffix_weight: Vec<i64>,
    cache: HashMap<(usize, i64, Partition), Rc<IntTerms>>,
}

impl MonomialModes {
    pub fn new(monomial: &Partition) -> Self {
        let parts = monomial.parts().to_vec();
        let mut suffix_weight = vec![0i64; parts.len() + 1];
        for k in (0..parts.len()).rev() {
            suffix_weight[k] = suffix_weight[k + 1] + parts[k] as i64;
        }
        MonomialModes {
            parts,
            suffix_weight,
            cache: HashMap::new(),
        }
    }

    pub fn weight(&self) -> i64 {
        self.suffix_weight[0]
    }

    /// `h^I(s) c` for a basis vector `c`.
    pub fn apply(&mut self, s: i64, c: &Partition) -> Rc<IntTerms> {
        self.eval(0, s, c)
    }

    fn eval(&mut self, k: usize, s: i64, c: &Partition) -> Rc<IntTerms> {
        let cw = c.weight() as i64;
        if self.suffix_weight[k] + cw - s - 1 < 0 {
            return Rc::new(IntTerms::new());
        }
        if k == self.parts.len() {
            let mut out = IntTerms::new();
            if s == -1 {
                out.insert(c.clone(), 1);
            }
            return Rc::new(out);
        }
        let key = (k, s, c.clone());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let n = self.parts[k];
        let rest_weight = self.suffix_weight[k + 1];
        let mut out = IntTerms::new();

        let imax = rest_weight + cw - 1 - s;
        for i in 0..=imax.max(-1) {
            let sub = self.eval(k + 1, s + i, c);
            if sub.is_empty() {
                continue;
            }
            let coef = binom_u(n as u64 - 1 + i as u64, n as u64 - 1);
            let new_part = n + i as u32;
            for (p, x) in sub.iter() {
                let e = out.entry(p.with_part(new_part)).or_insert(0);
                *e = checked(e.checked_add(checked(coef.checked_mul(*x))));
            }
        }

        let sign: i128 = if n.is_multiple_of(2) { -1 } else { 1 };
        for (i, mu) in c.multiplicities() {
            let reduced = c.without_part(i).expect("part present");
            let sub = self.eval(k + 1, s - n as i64 - i as i64, &reduced);
            if sub.is_empty() {
                continue;
            }
            let coef = binom_u((n - 1 + i) as u64, (n - 1) as u64) * (i * mu) as i128 * sign;
            for (p, x) in sub.iter() {
                let e = out.entry(p.clone()).or_insert(0);
                *e = checked(e.checked_add(checked(coef.checked_mul(*x))));
            }
        }
        out.retain(|_, v| *v != 0);
        let out = Rc::new(out);
        self.cache.insert(key, out.clone());
        out
    }
}

/// The state `a(t)b`.
pub fn mode_product(a: &FockState, t: i64, b: &FockState) -> FockState {
    let mut out = FockState::zero();
    for (ia, xa) in a.terms() {
        let mut engine = MonomialModes::new(ia);
        for (ib, xb) in b.terms() {
            let coef = xa * xb;
            for (p, z) in engine.apply(t, ib).iter() {
                out.add_term(p.clone(), &coef * Scalar::from_integer(BigInt::from(*z)));
            }
        }
    }
    out
}

/// Square matrix over the canonical basis of a degree slice, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(dim: usize) -> Self {
        ScalarMatrix {
            dim,
            entries: vec![Scalar::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Scalar::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ScalarMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }
}

impl Serialize for ScalarMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .rows()
            .map(|r| r.iter().map(Scalar::to_string).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// Matrix of the zero mode `o(a) = a(ℓ-1)` on the weight-`d` slice.
pub fn zero_mode_matrix(a: &FockState, d: u32) -> Result<ScalarMatrix> {
    zero_mode_matrix_with(a, d, Exec::default())
}

pub fn zero_mode_matrix_with(a: &FockState, d: u32, exec: Exec) -> Result<ScalarMatrix> {
    let slice = basis(d);
    let dim = slice.len();
    let Some(weight) = a.homogeneous_weight() else {
        if a.is_zero() {
            return Ok(ScalarMatrix::zeros(dim));
        }
        return Err(Error::NotHomogeneous);
    };
    let index: HashMap<&Partition, usize> = slice.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let columns = exec.map(&slice, |c| {
        mode_product(a, weight as i64 - 1, &FockState::monomial(c.clone()))
    });
    let mut m = ScalarMatrix::zeros(dim);
    for (j, col) in columns.into_iter().enumerate() {
        for (p, x) in col.terms() {
            let i = index[p];
            m.entries[i * dim + j] = x.clone();
        }
    }
    Ok(m)
}

/// Traces of `o(h^I)` on the slices `0..=dmax`, from the diagonal of the
/// zero-mode matrices.
pub fn monomial_zero_mode_traces(monomial: &Partition, dmax: u32) -> Vec<BigInt> {
    let mut engine = MonomialModes::new(monomial);
    let s = engine.weight() - 1;
    (0..=dmax)
        .map(|d| {
            let mut acc: i128 = 0;
            for c in basis(d) {
                if let Some(x) = engine.apply(s, &c).get(&c) {
                    acc = checked(acc.checked_add(*x));
                }
            }
            BigInt::from(acc)
        })
        .collect()
}

/// Generalized binomial coefficient `C(t, i)` for any integer `t`.
pub fn binomial(t: i64, i: u64) -> BigInt {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for j in 0..i as i64 {
        num *= t - j;
        den *= j + 1;
    }
    num / den
}

fn degree_bound(x: &FockState) -> i64 {
    x.degree().map_or(0, i64::from)
}

/// `LHS - RHS` of the Jacobi identity at `(r, s, t)`:
///
/// ```text
/// Σ_i C(r,i) (a(t+i)b)(r+s-i)c
///   = Σ_i (-1)^i C(t,i) { a(r+t-i) b(s+i) c - (-1)^t b(s+t-i) a(r+i) c }
/// ```
pub fn jacobi_check(
    a: &FockState,
    b: &FockState,
    c: &FockState,
    r: i64,
    s: i64,
    t: i64,
) -> FockState {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return FockState::zero();
    }
    let (da, db, dc) = (degree_bound(a), degree_bound(b), degree_bound(c));
    let cap = |i_max: i64, upper: i64| -> i64 {
        if upper >= 0 {
            i_max.min(upper)
        } else {
            i_max
        }
    };

    let mut lhs = FockState::zero();
    for i in 0..=cap(da + db - 1 - t, r).max(-1) {
        let coef = Scalar::from_integer(binomial(r, i as u64));
        if coef.is_zero() {
            continue;
        }
        let ab = mode_product(a, t + i, b);
        lhs.add_scaled(&mode_product(&ab, r + s - i, c), &coef);
    }

    let mut rhs = FockState::zero();
    let t_sign = if t.rem_euclid(2) == 0 { 1 } else { -1 };
    for i in 0..=cap(db + dc - 1 - s, t).max(-1) {
        let coef = Scalar::from_integer(binomial(t, i as u64) * if i % 2 == 0 { 1 } else { -1 });
        let bc = mode_product(b, s + i, c);
        rhs.add_scaled(&mode_product(a, r + t - i, &bc), &coef);
    }
    for i in 0..=cap(da + dc - 1 - r, t).max(-1) {
        let coef =
            Scalar::from_integer(binomial(t, i as u64) * if i % 2 == 0 { 1 } else { -1 } * -t_sign);
        let ac = mode_product(a, r + i, c);
        rhs.add_scaled(&mode_product(b, s + t - i, &ac), &coef);
    }
    &lhs - &rhs
}
