//! Computational engine for cyclotomic Hecke-Clifford superalgebras.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`] - the three coefficient domains everything else computes in:
//!   exact cyclotomic rationals, fixed-point high-precision complex numbers,
//!   and truncated (Laurent) power series with valuation tracking.
//! * [`combinatorics`] - multipartitions of types `0`/`s`/`ss`, standard
//!   tableaux, diagonal sets, Tri triples, and reduced words between tableaux.
//! * [`cartan`] - residues, the Cartan superdatum attached to a parameter set,
//!   Dynkin classification, tableau degrees, defects, the separate condition,
//!   and the unremovability test.
//! * [`seminormal`] - explicit matrix models of the semisimple blocks in the
//!   seminormal basis, primitive idempotents, the supersymmetrizing form.
//! * [`deformation`] - the power-series deformation of the parameters, lifted
//!   idempotents, dimension bookkeeping, the y/psi elements, Gram matrices,
//!   and the specialized graded cellular structure.
//! * [`cellular`] - the abstract generalized graded cellular layer: Clifford
//!   coefficient algebras, cell modules, radicals, simples, decomposition data.
//! * [`linalg`] - dense matrix helpers over any of the scalar domains.

pub mod cartan;
pub mod cellular;
pub mod combinatorics;
pub mod deformation;
pub mod linalg;
pub mod scalar;
pub mod seminormal;
