//! Flat tori `R^n / Lambda`: dual lattices, exact eigenvalue multiplicities
//! and the algebraic degeneracy criteria on the dual lattice.

mod degeneracy;
mod lattice;
mod spectrum;

pub use degeneracy::{
    relation_to_eigenbasis_matrix, torus_degeneracy, Classification, DegeneracyReport, Witness,
};
pub use lattice::{dual_lattice, DualLattice, Lattice, LatticeSpec};
pub use spectrum::{enumerate_spectrum, TorusEigenvalue, NEAR_TIE_REL_TOL, NORM_GROUP_REL_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid lattice of dimension {dim}: {detail}")]
    Shape { dim: usize, detail: String },
    #[error("lattice basis is singular (det = {det:e})")]
    Singular { det: f64 },
    #[error("change of basis is not unimodular")]
    NotUnimodular,
    #[error("norm bound must be positive and finite, got {0}")]
    InvalidBound(f64),
    #[error("the zero eigenvalue has no degeneracy classification")]
    ZeroEigenvalue,
    #[error("expected {expected} pair coefficients, got {found}")]
    WitnessLength { expected: usize, found: usize },
}
