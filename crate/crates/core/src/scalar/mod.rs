//! Coefficient domains: exact cyclotomic rationals, fixed-point
//! high-precision complex numbers, and truncated Laurent series.
//!
//! Precision policy: a numeric value carries its own `precision_bits`; binary
//! operations promote to the larger precision and never lower it. The global
//! tolerance attached to a value of precision `B` is `tau = 2^-(B/2)`, and all
//! negligibility decisions in the numeric domain are made against the value's
//! own tolerance.

mod complex;
mod cyclo;
mod dyadic;
mod series;

pub use complex::{pi, primitive_root, root_of_unity, PrecComplex};
pub use cyclo::CycloRational;
pub use dyadic::Dyadic;
pub use series::TruncSeries;

use std::fmt::Debug;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    /// Inversion or division demanded of an element whose leading/constant
    /// coefficient cannot be certified nonzero.
    #[error("element is not a unit (constant term within tolerance of zero)")]
    NotAUnit,
    /// The requested square-root branch does not square to the constant term.
    #[error("square-root branch does not match the constant term")]
    BranchMismatch,
    /// Specialization at x = 0 of a series with uncancelled negative powers.
    #[error("series has a non-negligible coefficient at a negative power of x")]
    NegativeValuation,
    /// An operation needed a coefficient beyond the known truncation window.
    #[error("truncation window exhausted; rerun with a larger order")]
    TruncationExhausted,
}

/// Field operations shared by every coefficient domain the engine runs over.
///
/// `zero`/`one`/`from_i64` are context free: they produce minimum-precision
/// (respectively conductor-1) values that promote when combined with real
/// data, so generic code never has to thread a context handle around.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` when the element cannot be certified
    /// invertible (exact zero, or within tolerance of zero).
    fn inv(&self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }
    /// Exact zero test on the representation.
    fn is_zero_strict(&self) -> bool;
    /// `true` when the element cannot be distinguished from zero at its own
    /// precision. Exact domains: identical to `is_zero_strict`.
    fn is_negligible(&self) -> bool;
}

/// Fields with a distinguished square root per element (principal branch).
pub trait FieldSqrt: Field {
    fn sqrt_principal(&self) -> Self;
}

/// Exact accumulated computations sometimes need a plain integer scale.
pub(crate) fn pow_i64<F: Field>(base: &F, mut e: u64) -> F {
    let mut acc = F::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        b = b.mul(&b);
        e >>= 1;
    }
    acc
}
