//! Discrete convolutions `(K v)_i = sum_j dx_j k_ij v_j` for interaction
//! kernels and communication functions.
//!
//! Uniform grids make `k_ij` depend on `i - j` only, so large grids go through
//! a circulant embedding and FFT; small or nonuniform grids use a dense matrix.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Grids up to this many cells use the dense product.
pub const DENSE_LIMIT: usize = 2048;

/// Row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Clone)]
enum Repr {
    Dense(DenseMatrix),
    Fft {
        len: usize,
        spectrum: Vec<Complex64>,
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
}

/// Applies `v -> sum_j dx_j k(i, j) v_j`.
#[derive(Clone)]
pub struct Convolver {
    n: usize,
    repr: Repr,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.repr {
            Repr::Dense(_) => "dense",
            Repr::Fft { .. } => "fft",
        };
        f.debug_struct("Convolver")
            .field("n", &self.n)
            .field("kind", &kind)
            .finish()
    }
}

impl Convolver {
    /// Builds the operator from a pair-entry function `entry(i, j) = k_ij`.
    ///
    /// On uniform grids `toeplitz(d)` must return the entry for `i - j = d`;
    /// it is used instead of `entry` so the kernel is evaluated O(n) times.
    pub fn new(grid: &Grid, entry: impl Fn(usize, usize) -> f64, toeplitz: Option<&dyn Fn(isize) -> f64>) -> Self {
        let n = grid.len();
        match (grid.uniform_width(), toeplitz) {
            (Some(h), Some(t)) => {
                let diag: Vec<f64> = (-(n as isize - 1)..n as isize).map(|d| h * t(d)).collect();
                let at = |d: isize| diag[(d + n as isize - 1) as usize];
                if n <= DENSE_LIMIT {
                    let m = DenseMatrix::from_fn(n, |i, j| at(i as isize - j as isize));
                    Convolver {
                        n,
                        repr: Repr::Dense(m),
                    }
                } else {
                    Self::fft(n, at)
                }
            }
            _ => {
                let w = grid.widths();
                let m = DenseMatrix::from_fn(n, |i, j| w[j] * entry(i, j));
                Convolver {
                    n,
                    repr: Repr::Dense(m),
                }
            }
        }
    }

    fn fft(n: usize, at: impl Fn(isize) -> f64) -> Self {
        let len = (2 * n - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
        spectrum[0] = Complex64::new(at(0), 0.0);
        for d in 1..n {
            spectrum[d] = Complex64::new(at(d as isize), 0.0);
            spectrum[len - d] = Complex64::new(at(-(d as isize)), 0.0);
        }
        forward.process(&mut spectrum);
        let scale = 1.0 / len as f64;
        for c in spectrum.iter_mut() {
            *c *= scale;
        }
        Convolver {
            n,
            repr: Repr::Fft {
                len,
                spectrum,
                forward,
                inverse,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "convolution input length");
        match &self.repr {
            Repr::Dense(m) => (0..self.n)
                .map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
            Repr::Fft {
                len,
                spectrum,
                forward,
                inverse,
            } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); *len];
                for (b, x) in buf.iter_mut().zip(v) {
                    b.re = *x;
                }
                forward.process(&mut buf);
                for (b, s) in buf.iter_mut().zip(spectrum) {
                    *b *= s;
                }
                inverse.process(&mut buf);
                buf[..self.n].iter().map(|c| c.re).collect()
            }
        }
    }

    /// Dense weights `dx_j k_ij`, when held.
    pub fn dense(&self) -> Option<&DenseMatrix> {
        match &self.repr {
            Repr::Dense(m) => Some(m),
            Repr::Fft { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(d: f64) -> f64 {
        (-0.5 * d * d).exp()
    }

    #[test]
    fn fft_matches_direct_sum() {
        let n = DENSE_LIMIT + 37;
        let g = Grid::uniform(-4.0, 6.0, n).unwrap();
        let h = g.widths()[0];
        let x = g.centers().to_vec();
        let entry = |i: usize, j: usize| gauss(x[i] - x[j]);
        let toe = move |d: isize| gauss(d as f64 * h);
        let conv = Convolver::new(&g, entry, Some(&toe));
        assert!(!conv.is_dense());
        let v: Vec<f64> = x.iter().map(|y| 1.0 + (0.7 * y).sin()).collect();
        let out = conv.apply(&v);
        for i in (0..n).step_by(97) {
            let direct: f64 = (0..n).map(|j| h * gauss(x[i] - x[j]) * v[j]).sum();
            assert!((out[i] - direct).abs() < 1e-12, "{i}: {} vs {direct}", out[i]);
        }
    }

    #[test]
    fn nonuniform_grid_uses_widths_of_source_cell() {
        let g = Grid::from_faces(vec![0.0, 1.0, 3.0, 3.5]).unwrap();
        let conv = Convolver::new(&g, |i, j| (i + j) as f64, None);
        let out = conv.apply(&[1.0, 1.0, 1.0]);
        // row 0: 1*0 + 2*1 + 0.5*2
        assert_eq!(out[0], 3.0);
    }
}
