//! 2D complex FFT on square arrays, backed by rustfft with a global plan cache.

use ndarray::Array2;
use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanKey = (usize, bool);

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let key = (n, direction == FftDirection::Forward);
    let mut cache = plan_cache().lock().unwrap();
    cache
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

fn transform_rows(data: &mut Array2<Complex<f64>>, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
    for mut row in data.rows_mut() {
        let slice = row.as_slice_mut().expect("row must be contiguous");
        fft.process_with_scratch(slice, &mut scratch);
    }
}

fn transpose(src: &Array2<Complex<f64>>, dst: &mut Array2<Complex<f64>>) {
    let n = src.nrows();
    for i in 0..n {
        for j in 0..n {
            dst[[j, i]] = src[[i, j]];
        }
    }
}

fn transform_2d(data: &mut Array2<Complex<f64>>, direction: FftDirection) {
    let n = data.nrows();
    assert_eq!(n, data.ncols(), "square arrays only");
    let fft = plan(n, direction);
    transform_rows(data, &fft);
    let mut t = Array2::default((n, n));
    transpose(data, &mut t);
    transform_rows(&mut t, &fft);
    transpose(&t, data);
}

/// Unnormalized forward 2D DFT (sign convention e^{-i k.x}).
pub fn fft2_forward(data: &mut Array2<Complex<f64>>) {
    transform_2d(data, FftDirection::Forward);
}

/// Unnormalized inverse 2D DFT (sign convention e^{+i k.x}).
pub fn fft2_inverse(data: &mut Array2<Complex<f64>>) {
    transform_2d(data, FftDirection::Inverse);
}
