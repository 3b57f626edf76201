#![allow(dead_code)]

use num_complex::Complex64;
use qsl_core::mixed::{CMatrix, DensityMatrix};
use qsl_core::spectral::{make_paired_state, SpectralState};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// `count` distinct integers from `0..=max`, ascending.
pub fn distinct_integers(rng: &mut ChaCha8Rng, max: usize, count: usize) -> Vec<f64> {
    let mut picks: Vec<usize> = sample(rng, max + 1, count).into_iter().collect();
    picks.sort_unstable();
    picks.into_iter().map(|k| k as f64).collect()
}

/// Generic state with random complex amplitudes on distinct integer levels.
pub fn random_integer_state(rng: &mut ChaCha8Rng, max_levels: usize, max_energy: usize) -> SpectralState {
    let count = rng.random_range(1..=max_levels);
    let energies = distinct_integers(rng, max_energy, count);
    let amps = normalized((0..count).map(|_| random_complex(rng)).collect());
    SpectralState::new(energies.into_iter().zip(amps)).unwrap()
}

/// Paired state with integer doublet energies `E_n` at least `epsilon + 1`
/// apart so that no doublets overlap.
pub fn random_paired_state(rng: &mut ChaCha8Rng, max_pairs: usize, epsilon: usize, max_energy: usize) -> SpectralState {
    let pairs = rng.random_range(1..=max_pairs);
    let stride = epsilon + 1;
    let slots = distinct_integers(rng, max_energy / stride, pairs);
    let amps = normalized((0..pairs).map(|_| random_complex(rng)).collect());
    let list: Vec<(f64, Complex64)> = slots.into_iter().map(|s| s * stride as f64).zip(amps).collect();
    make_paired_state(&list, epsilon as f64, 1.0).unwrap()
}

/// Ginibre-distributed density matrix `G G† / Tr`.
pub fn random_density(rng: &mut ChaCha8Rng, energies: &[f64]) -> DensityMatrix {
    let n = energies.len();
    let g = CMatrix::from_fn(n, |_, _| random_complex(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = CMatrix::from_fn(n, |i, j| m[(i, j)] / tr).hermitian_part();
    DensityMatrix::new(m, energies.to_vec(), 1.0, None).unwrap()
}

pub fn random_pure_density(rng: &mut ChaCha8Rng, energies: &[f64]) -> (Vec<Complex64>, DensityMatrix) {
    let v = normalized((0..energies.len()).map(|_| random_complex(rng)).collect());
    let rho = DensityMatrix::new(CMatrix::outer(&v).hermitian_part(), energies.to_vec(), 1.0, None).unwrap();
    (v, rho)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
