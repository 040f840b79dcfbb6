//! Cubic 3-D complex FFTs built on rustfft.
//!
//! The two inner axes are transformed plane by plane (rows, transpose, rows,
//! transpose back) so each plane stays in cache; the outer axis is handled by
//! gathering blocks of columns into contiguous lines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Fft3>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Fft3 {
    /// Returns the (shared, cached) plan for an `n × n × n` grid.
    pub fn get(n: usize) -> Arc<Fft3> {
        let mut map = cache().lock().expect("fft cache poisoned");
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, `F[q] = Σ_j f[j] e^{-2πi q·j/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.process(data, &self.forward);
    }

    /// Unnormalized inverse transform (no 1/n³ factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.process(data, &self.inverse);
    }

    fn process(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let plane_len = n * n;
        assert_eq!(data.len(), n * plane_len, "buffer is not n^3");
        let zero = Complex64::new(0.0, 0.0);
        let scratch_len = plan.get_inplace_scratch_len();

        // The two inner axes stay inside one (cache-resident) plane.
        par::for_each_chunk_mut(data, plane_len, |plane| {
            if plane.iter().all(|z| *z == zero) {
                return;
            }
            let mut scratch = vec![zero; scratch_len];
            let mut tmp = vec![zero; plane_len];
            transform_lines(plane, n, plan, &mut scratch);
            transpose(plane, &mut tmp, n);
            transform_lines(&mut tmp, n, plan, &mut scratch);
            transpose(&tmp, plane, n);
        });

        // Outer axis: gather blocks of columns of the n × n² matrix.
        const BLOCK: usize = 16;
        let src: &[Complex64] = data;
        let blocks = par::map_range(plane_len.div_ceil(BLOCK), |blk| {
            let c0 = blk * BLOCK;
            let w = BLOCK.min(plane_len - c0);
            let mut buf = vec![zero; w * n];
            for a in 0..n {
                let row = &src[a * plane_len + c0..a * plane_len + c0 + w];
                for (j, v) in row.iter().enumerate() {
                    buf[j * n + a] = *v;
                }
            }
            let mut scratch = vec![zero; scratch_len];
            transform_lines(&mut buf, n, plan, &mut scratch);
            buf
        });
        for (blk, buf) in blocks.iter().enumerate() {
            let c0 = blk * BLOCK;
            let w = buf.len() / n;
            for a in 0..n {
                let row = &mut data[a * plane_len + c0..a * plane_len + c0 + w];
                for (j, v) in row.iter_mut().enumerate() {
                    *v = buf[j * n + a];
                }
            }
        }
    }
}

/// In-place FFT of every nonzero length-`n` line of `buf`. Zero-padded
/// spectra leave many lines empty.
fn transform_lines(buf: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>, scratch: &mut [Complex64]) {
    for line in buf.chunks_exact_mut(n) {
        if line.iter().any(|z| z.re != 0.0 || z.im != 0.0) {
            plan.process_with_scratch(line, scratch);
        }
    }
}

/// `dst = srcᵀ` for row-major `n × n` matrices, in 8 × 8 tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const TILE: usize = 8;
    for r0 in (0..n).step_by(TILE) {
        for c0 in (0..n).step_by(TILE) {
            for r in r0..(r0 + TILE).min(n) {
                for c in c0..(c0 + TILE).min(n) {
                    dst[c * n + r] = src[r * n + c];
                }
            }
        }
    }
}

/// Smallest integer `>= m` whose only prime factors are 2, 3 and 5.
pub fn smooth_size_at_least(m: usize) -> usize {
    let mut k = m.max(1);
    loop {
        let mut r = k;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}
