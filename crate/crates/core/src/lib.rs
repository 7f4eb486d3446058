//! Classification of Laplace-Beltrami eigenvalues on model geometries as
//! nondegenerate, conformally degenerate or degenerate, plus the numerical
//! machinery that checks first-order eigenvalue splitting against
//! independently computed spectra.

pub mod galerkin;
pub mod linalg;
pub mod perturb;
pub mod sphere;
pub mod torus;
