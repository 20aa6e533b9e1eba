//! Unnormalized 3D complex FFT on an `n × n × n` cube stored x-major
//! (index `(ix * n + iy) * n + iz`).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let forward = direction == FftDirection::Forward;
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

/// In-place transform of one cube. `work` must have the cube's length.
pub(crate) fn fft3(n: usize, data: &mut [Complex64], work: &mut Vec<Complex64>, direction: FftDirection) {
    let len = n * n * n;
    debug_assert_eq!(data.len(), len);
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    work.resize(len, Complex64::default());

    // z lines are contiguous.
    fft.process_with_scratch(data, &mut scratch);

    // y lines: transpose each x-slab so y becomes the fastest index.
    let slab = n * n;
    for ix in 0..n {
        let src = &data[ix * slab..(ix + 1) * slab];
        let dst = &mut work[ix * slab..(ix + 1) * slab];
        for iy in 0..n {
            for iz in 0..n {
                dst[iz * n + iy] = src[iy * n + iz];
            }
        }
    }
    fft.process_with_scratch(work, &mut scratch);
    for ix in 0..n {
        let src = &work[ix * slab..(ix + 1) * slab];
        let dst = &mut data[ix * slab..(ix + 1) * slab];
        for iz in 0..n {
            for iy in 0..n {
                dst[iy * n + iz] = src[iz * n + iy];
            }
        }
    }

    // x lines: full transpose (ix, r) -> (r, ix).
    for ix in 0..n {
        for r in 0..slab {
            work[r * n + ix] = data[ix * slab + r];
        }
    }
    fft.process_with_scratch(work, &mut scratch);
    for r in 0..slab {
        for ix in 0..n {
            data[ix * slab + r] = work[r * n + ix];
        }
    }
}
