use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{binomial, HomogPoly, MonomialIndex};
use super::SphereError;
use crate::linalg::{exact_nullspace, exact_rank, pair_count, pairs, ExactMatrix};

/// Default cap on matrix cells for exact certificate assembly.
pub const DEFAULT_CELL_BUDGET: u128 = 500_000_000;
/// Largest monomial space a harmonic basis is built over.
pub const MAX_MONOMIALS: usize = 20_000;

/// Harmonic homogeneous polynomials of one degree; their restrictions to the
/// unit sphere span the eigenspace of `-ell (ell + n - 1)`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub num_vars: usize,
    pub degree: usize,
    pub polys: Vec<HomogPoly>,
}

impl HarmonicBasis {
    /// `C(n + ell, n) - C(n + ell - 2, n)` with `n = num_vars - 1`.
    pub fn expected_dimension(num_vars: usize, degree: usize) -> u128 {
        let n = (num_vars - 1) as u64;
        let l = degree as u64;
        binomial(n + l, n) - if l >= 2 { binomial(n + l - 2, n) } else { 0 }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Sphere dimension `n`.
    pub fn sphere_dim(&self) -> usize {
        self.num_vars - 1
    }

    /// Eigenvalue `-ell (ell + n - 1)` on the unit sphere.
    pub fn eigenvalue(&self) -> f64 {
        let l = self.degree as f64;
        -l * (l + self.sphere_dim() as f64 - 1.0)
    }
}

/// Exact basis of the harmonic polynomials of degree `degree` in `num_vars`
/// variables, as the integer null space of the Laplacian coefficient matrix.
pub fn harmonic_basis(num_vars: usize, degree: usize) -> Result<HarmonicBasis, SphereError> {
    if num_vars < 3 {
        return Err(SphereError::InvalidVariables(num_vars));
    }
    let top = MonomialIndex::new(num_vars, degree);
    if top.len() > MAX_MONOMIALS {
        return Err(SphereError::TooLarge {
            cells: top.len() as u128,
            budget: MAX_MONOMIALS as u128,
        });
    }
    let polys = if degree < 2 {
        top.monomials()
            .iter()
            .map(|e| HomogPoly::monomial(e.clone(), BigRational::one()))
            .collect()
    } else {
        let low = MonomialIndex::new(num_vars, degree - 2);
        let mut lap = ExactMatrix::zeros(low.len(), top.len());
        for (c, e) in top.monomials().iter().enumerate() {
            let image = HomogPoly::monomial(e.clone(), BigRational::one()).laplacian();
            for (r, v) in image.coefficient_vector(&low).into_iter().enumerate() {
                if !v.is_zero() {
                    lap.set(r, c, v);
                }
            }
        }
        exact_nullspace(&lap)
            .iter()
            .map(|v| HomogPoly::from_coefficients(&top, v))
            .collect()
    };
    Ok(HarmonicBasis {
        num_vars,
        degree,
        polys,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Symmetric pairs `u v` of harmonics.
    Product,
    /// Symmetrized gradient products `du (x) dv + dv (x) du`.
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub map: MapKind,
    pub n: usize,
    pub ell: usize,
    pub domain: usize,
    pub codomain: usize,
    pub rank: usize,
    pub nullity: usize,
    pub exact: bool,
}

fn check_budget(domain: usize, codomain: usize, budget: u128) -> Result<(), SphereError> {
    let cells = domain as u128 * codomain as u128;
    if cells > budget {
        return Err(SphereError::TooLarge { cells, budget });
    }
    Ok(())
}

/// Matrix of `u_a u_b` over pairs `a <= b` (columns) in the monomials of
/// degree `2 ell` (rows).
fn product_matrix(basis: &HarmonicBasis, budget: u128) -> Result<ExactMatrix, SphereError> {
    if basis.degree == 0 {
        return Err(SphereError::InvalidDegree(0));
    }
    let m = basis.len();
    let index = MonomialIndex::new(basis.num_vars, 2 * basis.degree);
    check_budget(pair_count(m), index.len(), budget)?;
    let mut mat = ExactMatrix::zeros(index.len(), pair_count(m));
    for (col, (a, b)) in pairs(m).enumerate() {
        let p = basis.polys[a].mul(&basis.polys[b]);
        for (exps, c) in p.terms() {
            mat.set(index.position(exps), col, c.clone());
        }
    }
    Ok(mat)
}

/// Matrix of the symmetrized gradient products over pairs `a <= b` (columns);
/// rows run over components `j <= k` and, within each, monomials of degree
/// `2 ell - 2`.
fn gradient_matrix(basis: &HarmonicBasis, budget: u128) -> Result<ExactMatrix, SphereError> {
    if basis.degree == 0 {
        return Err(SphereError::InvalidDegree(0));
    }
    let m = basis.len();
    let v = basis.num_vars;
    let index = MonomialIndex::new(v, 2 * basis.degree - 2);
    let comps = pair_count(v);
    check_budget(pair_count(m), comps * index.len(), budget)?;
    let grads: Vec<Vec<HomogPoly>> = basis
        .polys
        .iter()
        .map(|p| (0..v).map(|j| p.derivative(j)).collect())
        .collect();
    let mut mat = ExactMatrix::zeros(comps * index.len(), pair_count(m));
    for (col, (a, b)) in pairs(m).enumerate() {
        for (comp, (j, k)) in pairs(v).enumerate() {
            let sym = grads[a][j]
                .mul(&grads[b][k])
                .add(&grads[b][j].mul(&grads[a][k]));
            for (exps, c) in sym.terms() {
                mat.set(comp * index.len() + index.position(exps), col, c.clone());
            }
        }
    }
    Ok(mat)
}

fn certificate(basis: &HarmonicBasis, map: MapKind, mat: &ExactMatrix) -> RankCertificate {
    let rank = exact_rank(mat);
    RankCertificate {
        map,
        n: basis.sphere_dim(),
        ell: basis.degree,
        domain: mat.cols(),
        codomain: mat.rows(),
        rank,
        nullity: mat.cols() - rank,
        exact: true,
    }
}

pub fn product_map_certificate(basis: &HarmonicBasis) -> Result<RankCertificate, SphereError> {
    product_map_certificate_with_budget(basis, DEFAULT_CELL_BUDGET)
}

pub fn product_map_certificate_with_budget(
    basis: &HarmonicBasis,
    budget: u128,
) -> Result<RankCertificate, SphereError> {
    let mat = product_matrix(basis, budget)?;
    Ok(certificate(basis, MapKind::Product, &mat))
}

/// Kernel of the product map: integer vectors `c` over pairs `a <= b` with
/// `sum c_ab u_a u_b = 0` identically.
pub fn product_map_kernel(basis: &HarmonicBasis) -> Result<Vec<Vec<BigInt>>, SphereError> {
    Ok(exact_nullspace(&product_matrix(basis, DEFAULT_CELL_BUDGET)?))
}

/// Kernel of the gradient-product map, in the same pair coordinates.
pub fn gradient_map_kernel(basis: &HarmonicBasis) -> Result<Vec<Vec<BigInt>>, SphereError> {
    Ok(exact_nullspace(&gradient_matrix(basis, DEFAULT_CELL_BUDGET)?))
}

/// The assembly guard counts `domain * codomain` cells, where the codomain
/// already includes every gradient component.
pub fn gradient_map_certificate(basis: &HarmonicBasis) -> Result<RankCertificate, SphereError> {
    gradient_map_certificate_with_budget(basis, DEFAULT_CELL_BUDGET)
}

pub fn gradient_map_certificate_with_budget(
    basis: &HarmonicBasis,
    budget: u128,
) -> Result<RankCertificate, SphereError> {
    let mat = gradient_matrix(basis, budget)?;
    Ok(certificate(basis, MapKind::Gradient, &mat))
}

/// `sum_{a<=b} c_ab u_a u_b` for a pair-coordinate vector `c`.
pub fn pair_combination(basis: &HarmonicBasis, c: &[BigInt]) -> HomogPoly {
    let mut out = HomogPoly::zero(basis.num_vars, 2 * basis.degree);
    for ((a, b), coeff) in pairs(basis.len()).zip(c) {
        if coeff.is_zero() {
            continue;
        }
        let term = basis.polys[a]
            .mul(&basis.polys[b])
            .scale(&BigRational::from_integer(coeff.clone()));
        out = out.add(&term);
    }
    out
}

/// Dimension count for the gradient map on the 3-sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCount {
    pub ell: usize,
    /// `dim Sym^2 H_ell = H (H + 1) / 2` with `H = (ell + 1)^2`.
    pub domain_dim: u128,
    /// Ten gradient components times `dim E_{2 ell - 2}` in four variables.
    pub ten_codomain_dim: u128,
    /// A strictly larger domain forces a nonzero kernel.
    pub kernel_guaranteed: bool,
}

pub fn s3_dimension_count(ell: usize) -> Result<DimensionCount, SphereError> {
    if ell == 0 {
        return Err(SphereError::InvalidDegree(0));
    }
    let l = ell as u128;
    let h = (l + 1) * (l + 1);
    let domain_dim = h * (h + 1) / 2;
    let ten_codomain_dim = 10 * binomial(2 * ell as u64 + 1, 3);
    Ok(DimensionCount {
        ell,
        domain_dim,
        ten_codomain_dim,
        kernel_guaranteed: domain_dim > ten_codomain_dim,
    })
}

/// Smallest `ell <= max_ell` whose dimension count forces a kernel.
pub fn first_guaranteed_kernel(max_ell: usize) -> Option<usize> {
    (1..=max_ell).find(|&l| s3_dimension_count(l).is_ok_and(|c| c.kernel_guaranteed))
}

/// `d^{ell+m}/dz^{ell+m} (z^2 - 1)^ell`, coefficients by ascending power.
fn legendre_core(ell: usize, m: usize) -> Vec<BigInt> {
    // (z^2 - 1)^ell = sum_i C(ell, i) (-1)^(ell-i) z^(2i)
    let mut coeffs = vec![BigInt::zero(); 2 * ell + 1];
    for i in 0..=ell {
        let c = BigInt::from(binomial(ell as u64, i as u64));
        coeffs[2 * i] = if (ell - i) % 2 == 0 { c } else { -c };
    }
    for _ in 0..ell + m {
        coeffs = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, c)| c * BigInt::from(p))
            .collect();
    }
    coeffs
}

/// Linear independence of the zonal products `(x^2 + y^2)^m Q_m(z)^2`,
/// `m = 0..=ell`, with `Q_m` the homogenized associated-Legendre factor.
pub fn zonal_surjectivity_check(ell: usize) -> bool {
    let r2 = HomogPoly::radius_sq(3);
    let rho2 = HomogPoly::var(3, 0)
        .pow(2)
        .add(&HomogPoly::var(3, 1).pow(2));
    let index = MonomialIndex::new(3, 2 * ell);
    let rows: Vec<Vec<BigRational>> = (0..=ell)
        .map(|m| {
            let deg = ell - m;
            let mut q = HomogPoly::zero(3, deg);
            for (p, c) in legendre_core(ell, m).into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = HomogPoly::var(3, 2)
                    .pow(p)
                    .mul(&r2.pow((deg - p) / 2))
                    .scale(&BigRational::from_integer(c));
                q = q.add(&term);
            }
            rho2.pow(m).mul(&q).mul(&q).coefficient_vector(&index)
        })
        .collect();
    exact_rank(&ExactMatrix::from_rows(rows)) == ell + 1
}
