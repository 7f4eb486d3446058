use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::{dual_lattice, Lattice, LatticeError};

/// Relative tolerance for treating two floating-point norms as equal.
pub const NORM_GROUP_REL_TOL: f64 = 1e-9;
/// Distinct norms closer than this (relative) are flagged as near ties.
pub const NEAR_TIE_REL_TOL: f64 = 1e-6;

/// One eigenvalue `-4 pi^2 |kappa|^2` of a flat torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusEigenvalue {
    pub norm_sq: f64,
    pub lambda: f64,
    pub multiplicity: usize,
    /// One `kappa` per antipodal pair, Cartesian coordinates.
    pub representatives: Vec<Vec<f64>>,
    /// The same representatives in dual-basis integer coordinates.
    pub coefficients: Vec<Vec<i64>>,
    /// True when norms were compared as exact rationals.
    pub exact: bool,
    /// Set when another attained norm lies within a relative 1e-6 but was not
    /// merged; only possible for irrational Gram matrices.
    pub near_tie: bool,
}

impl TorusEigenvalue {
    pub fn lambda_of(norm_sq: f64) -> f64 {
        -4.0 * PI * PI * norm_sq
    }
}

/// Best rational approximation `p/q` with `q <= max_den` whose error is
/// within `tol * max(1, |x|)`, by continued fractions.
fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let target = tol * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= target {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The dual Gram matrix scaled to integers, when every entry is rational with
/// a modest denominator.
fn integer_gram(gram: &nalgebra::DMatrix<f64>) -> Option<(Vec<Vec<i128>>, i128)> {
    let n = gram.nrows();
    let mut fracs = Vec::with_capacity(n * n);
    let mut den: i128 = 1;
    for r in 0..n {
        for c in 0..n {
            let (p, q) = rational_approx(gram[(r, c)], 10_000, 1e-13)?;
            den = den / gcd(den, q as i128) * q as i128;
            if den > 1_000_000_000 {
                return None;
            }
            fracs.push((p as i128, q as i128));
        }
    }
    let mat = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let (p, q) = fracs[r * n + c];
                    p * (den / q)
                })
                .collect()
        })
        .collect();
    Some((mat, den))
}

/// Calls `visit` for every nonzero `k` in `[-bound, bound]^n` whose first
/// nonzero entry is positive.
fn for_each_half_box(n: usize, bound: i64, mut visit: impl FnMut(&[i64])) {
    let mut k = vec![-bound; n];
    loop {
        if let Some(first) = k.iter().find(|&&x| x != 0) {
            if *first > 0 {
                visit(&k);
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if k[i] < bound {
                k[i] += 1;
                break;
            }
            k[i] = -bound;
        }
    }
}

/// All distinct positive `|kappa|^2 <= norm_sq_max` on the dual lattice,
/// ascending, with full multiplicity.
///
/// Representatives are ordered by their dual coordinates, lexicographically
/// descending, so witness vectors are reproducible.
pub fn enumerate_spectrum(
    lattice: &Lattice,
    norm_sq_max: f64,
) -> Result<Vec<TorusEigenvalue>, LatticeError> {
    if !(norm_sq_max > 0.0) || !norm_sq_max.is_finite() {
        return Err(LatticeError::InvalidBound(norm_sq_max));
    }
    let dual = dual_lattice(lattice)?;
    let n = dual.dim();
    let gram = dual.gram();
    let lambda_min = SymmetricEigen::new(gram.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let bound = ((norm_sq_max / lambda_min).sqrt() * (1.0 + 1e-9) + 1e-9).floor() as i64;

    let float_norm = |k: &[i64]| -> f64 {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += gram[(a, b)] * (k[a] * k[b]) as f64;
            }
        }
        s
    };

    let mut groups: Vec<TorusEigenvalue> = Vec::new();
    let build = |norm_sq: f64, mut ks: Vec<Vec<i64>>, exact: bool| {
        ks.sort_by(|a, b| b.cmp(a));
        TorusEigenvalue {
            norm_sq,
            lambda: TorusEigenvalue::lambda_of(norm_sq),
            multiplicity: 2 * ks.len(),
            representatives: ks.iter().map(|k| dual.vector(k)).collect(),
            coefficients: ks,
            exact,
            near_tie: false,
        }
    };

    if let Some((p, den)) = integer_gram(&gram) {
        let limit = (norm_sq_max * den as f64 * (1.0 + 1e-12)).floor() as i128;
        let mut found: Vec<(i128, Vec<i64>)> = Vec::new();
        for_each_half_box(n, bound, |k| {
            let mut s: i128 = 0;
            for a in 0..n {
                for b in 0..n {
                    s += p[a][b] * (k[a] as i128) * (k[b] as i128);
                }
            }
            if s <= limit {
                found.push((s, k.to_vec()));
            }
        });
        found.sort_by(|a, b| a.0.cmp(&b.0));
        let mut i = 0;
        while i < found.len() {
            let key = found[i].0;
            let mut ks = Vec::new();
            while i < found.len() && found[i].0 == key {
                ks.push(found[i].1.clone());
                i += 1;
            }
            groups.push(build(key as f64 / den as f64, ks, true));
        }
        return Ok(groups);
    }

    let slack = 1.0 + NORM_GROUP_REL_TOL;
    let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
    for_each_half_box(n, bound, |k| {
        let s = float_norm(k);
        if s <= norm_sq_max * slack {
            found.push((s, k.to_vec()));
        }
    });
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    let mut i = 0;
    while i < found.len() {
        let start = found[i].0;
        let mut ks = Vec::new();
        while i < found.len() && found[i].0 - start <= NORM_GROUP_REL_TOL * (1.0 + start) {
            ks.push(found[i].1.clone());
            i += 1;
        }
        groups.push(build(start, ks, false));
    }
    for j in 1..groups.len() {
        let (a, b) = (groups[j - 1].norm_sq, groups[j].norm_sq);
        if b - a <= NEAR_TIE_REL_TOL * (1.0 + b) {
            groups[j - 1].near_tie = true;
            groups[j].near_tie = true;
        }
    }
    Ok(groups)
}
