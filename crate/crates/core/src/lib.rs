//! Exact computations in the p-adic Heisenberg vertex operator algebra.
//!
//! The crate covers the algebraic Fock space `S_alg` of the rank-one
//! Heisenberg VOA at central charge 1, its ultrametric norms and truncated
//! completions, the square-bracket Virasoro operators `L[0]` and `L[-1]`,
//! normalized one-point functions `Z(a) = η·Tr o(a) q^{L(0)-1/24}`, and the
//! p-adic modular forms (Eisenstein series, Kummer chains, `E_k^*`) those
//! traces land in. All arithmetic is exact over Q.

pub mod brackets;
pub mod error;
pub mod exec;
pub mod expr;
pub mod fock;
pub mod modes;
pub mod modforms;
pub mod onepoint;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fock::{basis, FockState, Partition, RExponent};
pub use scalar::{NormValue, Prime, Scalar, WeightX};

/// Version tag embedded in every JSON document under the `schema` key.
pub const SCHEMA_VERSION: &str = "v1";
