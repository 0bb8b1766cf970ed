//! Multi-dimensional complex FFT over row-major grids, one axis at a time.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct FftNd {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dims", &self.dims).finish()
    }
}

impl FftNd {
    pub fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = dims.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            dims: dims.to_vec(),
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Unnormalized forward transform, Σ_j f_j e^{−2πi⟨m,j⟩/G}.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT grid");
        let nd = self.dims.len();
        let mut scratch = Vec::new();
        let mut line = Vec::new();
        for axis in 0..nd {
            let n = self.dims[axis];
            let stride: usize = self.dims[axis + 1..].iter().product();
            let plan = &plans[axis];
            let need = plan.get_inplace_scratch_len();
            if scratch.len() < need {
                scratch.resize(need, Complex64::default());
            }
            if stride == 1 {
                // contiguous lines: one batched call
                plan.process_with_scratch(data, &mut scratch[..need]);
                continue;
            }
            line.resize(n * stride, Complex64::default());
            let block = n * stride;
            for chunk in data.chunks_mut(block) {
                // gather the `stride` lines of this block into contiguous rows
                for j in 0..n {
                    for s in 0..stride {
                        line[s * n + j] = chunk[j * stride + s];
                    }
                }
                plan.process_with_scratch(&mut line, &mut scratch[..need]);
                for j in 0..n {
                    for s in 0..stride {
                        chunk[j * stride + s] = line[s * n + j];
                    }
                }
            }
        }
    }
}

/// Signed frequency index of FFT bin `i` on a grid of `n` points.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
