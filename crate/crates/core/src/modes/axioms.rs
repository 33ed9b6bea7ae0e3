//! Exact checkers for the vertex-algebra axioms on finite windows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{apply_h, apply_l, jacobi_check, mode_product};
use crate::exec::Exec;
use crate::fock::{basis, random_homogeneous, random_state, sup_norm, FockState, Partition};
use crate::scalar::{Prime, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ccr,
    Virasoro,
    Translation,
    Grading,
    Normcompat,
    Jacobi,
}

/// A failing instance and its nonzero residual.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub case: String,
    pub residual: FockState,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub suite: Suite,
    pub checks: usize,
    pub witnesses: Vec<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }

    fn collect(suite: Suite, results: Vec<Vec<Option<Witness>>>) -> Self {
        let mut checks = 0;
        let mut witnesses = Vec::new();
        for batch in results {
            checks += batch.len();
            witnesses.extend(batch.into_iter().flatten());
        }
        AxiomReport {
            suite,
            checks,
            witnesses,
        }
    }
}

fn slices_up_to(max_degree: u32) -> Vec<Partition> {
    (0..=max_degree).flat_map(basis).collect()
}

fn witness(case: String, residual: FockState) -> Option<Witness> {
    if residual.is_zero() {
        None
    } else {
        Some(Witness { case, residual })
    }
}

/// `[h(m), h(n)] = m δ_{m,-n}` on every basis state of degree `<= max_degree`,
/// for `|m|, |n| <= bound`.
pub fn ccr(max_degree: u32, bound: i64, exec: Exec) -> AxiomReport {
    let states = slices_up_to(max_degree);
    let results = exec.map(&states, |p| {
        let c = FockState::monomial(p.clone());
        let mut out = Vec::new();
        for m in -bound..=bound {
            let hm = apply_h(m, &c);
            for n in -bound..=bound {
                let mut r = &apply_h(m, &apply_h(n, &c)) - &apply_h(n, &hm);
                if m == -n {
                    r.add_scaled(&c, &Scalar::from(-m));
                }
                out.push(witness(format!("m={m} n={n} on {p:?}"), r));
            }
        }
        out
    });
    AxiomReport::collect(Suite::Ccr, results)
}

/// `[L(m), L(n)] = (m-n) L(m+n) + δ_{m,-n} (m^3-m)/12` with `c = 1`.
pub fn virasoro(max_degree: u32, bound: i64, exec: Exec) -> AxiomReport {
    let states = slices_up_to(max_degree);
    let results = exec.map(&states, |p| {
        let c = FockState::monomial(p.clone());
        let lc: Vec<FockState> = (-bound..=bound).map(|n| apply_l(n, &c)).collect();
        let mut out = Vec::new();
        for m in -bound..=bound {
            for n in -bound..=bound {
                let lm_ln = apply_l(m, &lc[(n + bound) as usize]);
                let ln_lm = apply_l(n, &lc[(m + bound) as usize]);
                let mut r = &lm_ln - &ln_lm;
                r.add_scaled(&apply_l(m + n, &c), &Scalar::from(n - m));
                if m == -n {
                    r.add_scaled(&c, &-Scalar::new(m * m * m - m, 12));
                }
                out.push(witness(format!("m={m} n={n} on {p:?}"), r));
            }
        }
        out
    });
    AxiomReport::collect(Suite::Virasoro, results)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SAMPLE_PRIME: u64 = 5;

/// `[L(-1), a(t)] c = -t a(t-1) c` on sampled `a`, `t`, `c`.
pub fn translation(samples: usize, max_degree: u32, seed: u64, exec: Exec) -> AxiomReport {
    let p = Prime::new(SAMPLE_PRIME).unwrap();
    let mut g = rng(seed);
    let cases: Vec<(FockState, i64, FockState)> = (0..samples)
        .map(|_| {
            let a = random_state(&mut g, max_degree, 2, p);
            let t = g.gen_range(-3..=3);
            let c = random_state(&mut g, max_degree, 2, p);
            (a, t, c)
        })
        .collect();
    let results = exec.map(&cases, |(a, t, c)| {
        let mut r = &apply_l(-1, &mode_product(a, *t, c)) - &mode_product(a, *t, &apply_l(-1, c));
        r.add_scaled(&mode_product(a, t - 1, c), &Scalar::from(*t));
        vec![witness(format!("a={a:?} t={t} c={c:?}"), r)]
    });
    AxiomReport::collect(Suite::Translation, results)
}

/// `a(n) b` is homogeneous of weight `ℓ + m - n - 1` for homogeneous `a`, `b`.
pub fn grading(samples: usize, max_degree: u32, seed: u64, exec: Exec) -> AxiomReport {
    let p = Prime::new(SAMPLE_PRIME).unwrap();
    let mut g = rng(seed);
    let cases: Vec<(FockState, u32, FockState, u32, i64)> = (0..samples)
        .map(|_| {
            let l = g.gen_range(0..=max_degree);
            let m = g.gen_range(0..=max_degree);
            let a = random_homogeneous(&mut g, l, 3, p);
            let b = random_homogeneous(&mut g, m, 3, p);
            let n = g.gen_range(-3..=(l + m) as i64);
            (a, l, b, m, n)
        })
        .collect();
    let results = exec.map(&cases, |(a, l, b, m, n)| {
        let out = mode_product(a, *n, b);
        let expected = *l as i64 + *m as i64 - n - 1;
        let ok = out.is_zero() || (out.homogeneous_weight().map(i64::from) == Some(expected));
        let residual = if ok { FockState::zero() } else { out };
        vec![witness(format!("a={a:?} n={n} b={b:?}"), residual)]
    });
    AxiomReport::collect(Suite::Grading, results)
}

/// `|a(n) b| <= |a| |b|` in the sup-norm at `p`.
pub fn norm_compat(
    samples: usize,
    max_degree: u32,
    p: Prime,
    seed: u64,
    exec: Exec,
) -> AxiomReport {
    let mut g = rng(seed);
    let cases: Vec<(FockState, i64, FockState)> = (0..samples)
        .map(|_| {
            let a = random_state(&mut g, max_degree, 3, p);
            let b = random_state(&mut g, max_degree, 3, p);
            let n = g.gen_range(-4..=(2 * max_degree as i64));
            (a, n, b)
        })
        .collect();
    let results = exec.map(&cases, |(a, n, b)| {
        let out = mode_product(a, *n, b);
        let bound = sup_norm(a, p).mul(&sup_norm(b, p));
        let residual = if sup_norm(&out, p) <= bound {
            FockState::zero()
        } else {
            out
        };
        vec![witness(format!("p={p} a={a:?} n={n} b={b:?}"), residual)]
    });
    AxiomReport::collect(Suite::Normcompat, results)
}

/// Jacobi identity on seeded random triples with `r, s, t` in `[-window, window]`.
pub fn jacobi(trials: usize, max_degree: u32, window: i64, seed: u64, exec: Exec) -> AxiomReport {
    let p = Prime::new(SAMPLE_PRIME).unwrap();
    let mut g = rng(seed);
    let cases: Vec<_> = (0..trials)
        .map(|_| {
            let a = random_state(&mut g, max_degree, 2, p);
            let b = random_state(&mut g, max_degree, 2, p);
            let c = random_state(&mut g, max_degree, 2, p);
            let r = g.gen_range(-window..=window);
            let s = g.gen_range(-window..=window);
            let t = g.gen_range(-window..=window);
            (a, b, c, r, s, t)
        })
        .collect();
    let results = exec.map(&cases, |(a, b, c, r, s, t)| {
        let res = jacobi_check(a, b, c, *r, *s, *t);
        vec![witness(
            format!("a={a:?} b={b:?} c={c:?} r={r} s={s} t={t}"),
            res,
        )]
    });
    AxiomReport::collect(Suite::Jacobi, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(ccr(4, 3, Exec::Sequential).passed());
        assert!(virasoro(4, 3, Exec::Sequential).passed());
        assert!(translation(10, 3, 1, Exec::Sequential).passed());
        assert!(grading(20, 4, 2, Exec::Sequential).passed());
        assert!(norm_compat(20, 4, Prime::new(2).unwrap(), 3, Exec::Sequential).passed());
        assert!(jacobi(10, 3, 2, 4, Exec::Sequential).passed());
    }

    #[test]
    fn check_counts() {
        let r = ccr(2, 1, Exec::Sequential);
        assert_eq!(r.checks, (1 + 1 + 2) * 9);
    }
}
