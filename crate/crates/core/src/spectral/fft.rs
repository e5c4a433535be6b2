use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::wavenumber;
use crate::par;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized 3D complex FFT on an `n^3` row-major cube `(i1, i2, i3)`.
///
/// Each axis is transformed plane by plane: a plane is copied into a
/// transposed tile, transformed row-wise and copied back, so no pass strides
/// across the whole cube.
///
/// `band = Some(m)` restricts the work to modes with every `|k_j| <= m`. For
/// the inverse the input must vanish outside that cube (zero rows are
/// skipped); for the forward transform outputs outside it are set to zero.
/// Either way the retained values are bitwise identical to the full transform.
#[derive(Clone)]
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

/// Raw pointer for disjoint writes from parallel workers.
#[derive(Clone, Copy)]
struct SharedMut(*mut Complex64);
unsafe impl Send for SharedMut {}
unsafe impl Sync for SharedMut {}

struct Work {
    scratch: Vec<Complex64>,
    tile: Vec<Complex64>,
}

impl Fft3 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn process(&self, data: &mut [Complex64], dir: Direction, band: Option<usize>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n * n);
        let live: Vec<bool> = (0..n)
            .map(|j| band.map_or(true, |m| wavenumber(j, n).unsigned_abs() as usize <= m))
            .collect();
        match dir {
            Direction::Inverse => {
                self.last_axis(data, &self.inverse, &live, true);
                self.middle_axis(data, &self.inverse, &live);
                self.first_axis(data, &self.inverse);
            }
            Direction::Forward => {
                self.first_axis(data, &self.forward);
                self.middle_axis(data, &self.forward, &live);
                self.last_axis(data, &self.forward, &live, false);
                if band.is_some() {
                    let n2 = n * n;
                    par::chunks_with_scratch(data, n2, || (), |_, i1, plane| {
                        for (r, row) in plane.chunks_mut(n).enumerate() {
                            let keep = live[i1] && live[r];
                            for (i3, x) in row.iter_mut().enumerate() {
                                if !(keep && live[i3]) {
                                    *x = ZERO;
                                }
                            }
                        }
                    });
                }
            }
        }
    }

    fn work(&self, fft: &Arc<dyn Fft<f64>>) -> impl Fn() -> Work + Send + Sync {
        let scratch_len = fft.get_inplace_scratch_len();
        let n2 = self.n * self.n;
        move || Work {
            scratch: vec![ZERO; scratch_len],
            tile: vec![ZERO; n2],
        }
    }

    /// Contiguous rows; with `skip_dead` rows whose `(i1, i2)` lie outside the band are left alone.
    fn last_axis(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, live: &[bool], skip_dead: bool) {
        let n = self.n;
        let all = live.iter().all(|&l| l);
        par::chunks_with_scratch(data, n * n, self.work(fft), |w, i1, plane| {
            if all {
                fft.process_with_scratch(plane, &mut w.scratch);
                return;
            }
            if skip_dead && !live[i1] {
                return;
            }
            for (i2, row) in plane.chunks_mut(n).enumerate() {
                if live[i2] || !skip_dead {
                    fft.process_with_scratch(row, &mut w.scratch);
                }
            }
        });
    }

    /// Along `i2`, one `i1` plane at a time; planes outside the band are skipped
    /// (their content is zero on the inverse and discarded on the forward path).
    fn middle_axis(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, live: &[bool]) {
        let n = self.n;
        par::chunks_with_scratch(data, n * n, self.work(fft), |w, i1, plane| {
            if !live[i1] {
                return;
            }
            for i2 in 0..n {
                for i3 in 0..n {
                    w.tile[i3 * n + i2] = plane[i2 * n + i3];
                }
            }
            fft.process_with_scratch(&mut w.tile, &mut w.scratch);
            for i3 in 0..n {
                for i2 in 0..n {
                    plane[i2 * n + i3] = w.tile[i3 * n + i2];
                }
            }
        });
    }

    /// Along `i1`, one `i2` slab at a time.
    fn first_axis(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let n2 = n * n;
        let ptr = SharedMut(data.as_mut_ptr());
        par::for_each_index(n, self.work(fft), move |w, i2| {
            let base = ptr;
            for i1 in 0..n {
                let off = i1 * n2 + i2 * n;
                for i3 in 0..n {
                    // SAFETY: slab i2 touches only offsets i1*n2 + i2*n + i3, disjoint across i2.
                    w.tile[i3 * n + i1] = unsafe { *base.0.add(off + i3) };
                }
            }
            fft.process_with_scratch(&mut w.tile, &mut w.scratch);
            for i1 in 0..n {
                let off = i1 * n2 + i2 * n;
                for i3 in 0..n {
                    unsafe { *base.0.add(off + i3) = w.tile[i3 * n + i1] };
                }
            }
        });
    }
}
