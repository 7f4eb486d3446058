use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigRational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Appends the rows of `other` (same column count).
    pub fn stack(&self, other: &ExactMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "column mismatch in stack");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = &self.entries[r * self.cols..(r + 1) * self.cols];
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Rank of an integer matrix reduced modulo the prime 2^61 - 1. Never exceeds
/// the rank over the rationals.
fn rank_mod_prime(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let p = BigInt::from(MODULUS);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let r = x.mod_floor(&p);
                    r.iter_u64_digits().next().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(piv) = (r..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = pow_mod(a[r][col], MODULUS - 2);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let factor = mul_mod(row[col], inv);
            for j in col..cols {
                let sub = mul_mod(factor, pivot_row[j]);
                row[j] = (row[j] + MODULUS - sub) % MODULUS;
            }
        }
        r += 1;
    }
    r
}

/// Rank over the rationals.
///
/// A modular rank equal to `min(rows, cols)` already certifies full rank, since
/// reduction mod a prime can only lower the rank; otherwise the rank comes from
/// fraction-free (Bareiss) elimination. Rows are first cleared of
/// denominators, after which every intermediate Bareiss entry is a minor of
/// the integer matrix, so each division below is exact.
pub fn exact_rank(matrix: &ExactMatrix) -> usize {
    if matrix.rows == 0 || matrix.cols == 0 {
        return 0;
    }
    // eliminate along the shorter side
    let source = if matrix.rows > matrix.cols {
        matrix.transpose()
    } else {
        matrix.clone()
    };
    let mut a = source.integer_rows();
    if rank_mod_prime(&a, source.cols) == source.rows {
        return source.rows;
    }
    bareiss_rank(&mut a, source.rows, source.cols)
}

fn bareiss_rank(a: &mut [Vec<BigInt>], rows: usize, cols: usize) -> usize {
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows)
            .filter(|&i| !a[i][col].is_zero())
            .min_by_key(|&i| a[i][col].bits())
        else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let v = pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
            row[col] = BigInt::zero();
        }
        // the sign of the divisor only flips signs downstream, never exactness
        prev = a[r][col].abs();
        r += 1;
    }
    r
}

/// Basis of the right null space over the rationals, each vector scaled to
/// coprime integers with a positive pivot-free leading entry.
pub fn exact_nullspace(matrix: &ExactMatrix) -> Vec<Vec<BigInt>> {
    let (rows, cols) = (matrix.rows, matrix.cols);
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| matrix.entries[r * cols..(r + 1) * cols].to_vec())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..cols {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }

    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            ints.into_iter().map(|x| x / &g).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn identity_rank() {
        assert_eq!(exact_rank(&ExactMatrix::identity(5)), 5);
    }

    #[test]
    fn rank_of_rational_rows() {
        // second row = 2/3 * first; third independent
        let m = ExactMatrix::from_rows(vec![
            vec![rat(3, 2), rat(1, 3), rat(-1, 1)],
            vec![rat(1, 1), rat(2, 9), rat(-2, 3)],
            vec![rat(0, 1), rat(1, 7), rat(5, 1)],
        ]);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank(&m.transpose()), 2);
    }

    #[test]
    fn rank_with_skipped_columns() {
        let m = ExactMatrix::from_integer_rows(&[
            vec![0, 2, 4, 1],
            vec![0, 1, 2, 7],
            vec![0, 3, 6, 8],
        ]);
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = ExactMatrix::from_integer_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 9]]);
        let ns = exact_nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in 0..m.rows() {
                let s: BigRational = (0..m.cols())
                    .map(|c| m.get(r, c) * BigRational::from_integer(v[c].clone()))
                    .sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn bareiss_agrees_with_modular_shortcut() {
        let m = ExactMatrix::from_integer_rows(&[
            vec![2, -3, 5, 7],
            vec![1, 4, -6, 2],
            vec![3, 1, -1, 9],
        ]);
        // third row = first + second
        let mut a = m.integer_rows();
        assert_eq!(bareiss_rank(&mut a, 3, 4), 2);
        assert_eq!(rank_mod_prime(&m.integer_rows(), 4), 2);
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn modulus_multiple_does_not_fool_rank() {
        // the 2x2 determinant is 2^61 - 1, zero modulo the prime but not over Q
        let p = MODULUS as i64;
        let m = ExactMatrix::from_integer_rows(&[vec![p, 0], vec![0, 1]]);
        assert_eq!(rank_mod_prime(&m.integer_rows(), 2), 1);
        assert_eq!(exact_rank(&m), 2);
    }

    #[test]
    fn large_entries_stay_exact() {
        // Hilbert-like matrix: full rank over Q, badly conditioned in floats
        let n = 12;
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| rat(1, (i + j + 1) as i64)).collect())
            .collect();
        assert_eq!(exact_rank(&ExactMatrix::from_rows(rows)), n);
    }
}
