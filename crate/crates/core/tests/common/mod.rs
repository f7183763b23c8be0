#![allow(dead_code)]

use num_complex::Complex64;
use qibound::dynamical::SpectralModel;
use rand::Rng;

pub fn random_model(rng: &mut impl Rng, n: usize) -> SpectralModel {
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        h[i * n + i] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[i * n + j] = z;
            h[j * n + i] = z.conj();
        }
    }
    SpectralModel::from_hermitian(&h, n, 1.0).unwrap()
}

/// Random normalized coefficients supported on levels `lo..=hi`.
pub fn random_state(rng: &mut impl Rng, n: usize, lo: usize, hi: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for z in &mut c[lo..=hi] {
        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|z| *z /= norm);
    c
}
