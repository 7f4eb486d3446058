use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Uniform periodic grid on the unit cube of lattice coordinates `y`, nodes at
/// `y_i = idx_i / shape_i`, flattened row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    shape: Vec<usize>,
}

impl Grid {
    pub fn new(shape: Vec<usize>) -> Self {
        assert!(shape.iter().all(|&s| s > 0), "grid sides must be positive");
        Self { shape }
    }

    pub fn uniform(dim: usize, side: usize) -> Self {
        Self::new(vec![side; dim])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat node number.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    /// Lattice coordinates of a node.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.shape)
            .map(|(&i, &s)| i as f64 / s as f64)
            .collect()
    }

    /// Flat position of the frequency `m` in an FFT array (indices wrap).
    pub fn frequency_slot(&self, m: &[i64]) -> usize {
        let mut flat = 0;
        for (axis, &mi) in m.iter().enumerate() {
            let s = self.shape[axis] as i64;
            flat = flat * self.shape[axis] + mi.rem_euclid(s) as usize;
        }
        flat
    }

    /// Trapezoidal average `(1/N) sum f(y_i)`, the exact mean of any
    /// trigonometric polynomial with `|m_i| < shape_i`.
    pub fn mean(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / self.len() as f64
    }

    /// In-place unnormalized n-dimensional DFT, `X_m = sum_j x_j e^{-2 pi i m.y_j}`
    /// forward and with `e^{+2 pi i m.y_j}` when `inverse`.
    pub fn fft(&self, data: &mut [Complex<f64>], inverse: bool) {
        assert_eq!(data.len(), self.len());
        let mut planner = FftPlanner::new();
        let mut stride = 1;
        for axis in (0..self.dim()).rev() {
            let len = self.shape[axis];
            if len > 1 {
                let plan: Arc<dyn Fft<f64>> = if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                };
                let mut line = vec![Complex::new(0.0, 0.0); len];
                let block = stride * len;
                for start in 0..data.len() / block {
                    for offset in 0..stride {
                        let base = start * block + offset;
                        for (i, slot) in line.iter_mut().enumerate() {
                            *slot = data[base + i * stride];
                        }
                        plan.process(&mut line);
                        for (i, v) in line.iter().enumerate() {
                            data[base + i * stride] = *v;
                        }
                    }
                }
            }
            stride *= len;
        }
    }

    /// Normalized Fourier coefficients `(1/N) sum_j f_j e^{-2 pi i m.y_j}` of
    /// real samples, indexed through [`Grid::frequency_slot`].
    pub fn coefficients(&self, values: &[f64]) -> Vec<Complex<f64>> {
        let mut data: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fft(&mut data, false);
        let scale = 1.0 / self.len() as f64;
        for v in &mut data {
            *v *= scale;
        }
        data
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coefficients_of_a_cosine() {
        let grid = Grid::new(vec![8, 6]);
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let y = grid.point(i);
                3.0 * (2.0 * PI * (y[0] - 2.0 * y[1])).cos() + 0.5
            })
            .collect();
        let c = grid.coefficients(&values);
        assert!((c[grid.frequency_slot(&[0, 0])].re - 0.5).abs() < 1e-14);
        assert!((c[grid.frequency_slot(&[1, -2])].re - 1.5).abs() < 1e-14);
        assert!((c[grid.frequency_slot(&[-1, 2])].re - 1.5).abs() < 1e-14);
        assert!(c[grid.frequency_slot(&[1, 2])].norm() < 1e-14);
    }

    #[test]
    fn inverse_undoes_forward() {
        let grid = Grid::new(vec![5, 4, 3]);
        let values: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut data = grid.coefficients(&values);
        grid.fft(&mut data, true);
        for (a, b) in data.iter().zip(&values) {
            assert!((a.re - b).abs() < 1e-13 && a.im.abs() < 1e-13);
        }
    }

    #[test]
    fn indexing_round_trip() {
        let grid = Grid::new(vec![3, 4]);
        assert_eq!(grid.multi_index(7), vec![1, 3]);
        assert_eq!(grid.point(7), vec![1.0 / 3.0, 0.75]);
        assert_eq!(grid.frequency_slot(&[-1, -1]), 2 * 4 + 3);
    }
}
