use num_complex::Complex64;

use super::linalg::{hermitian_eigendecomposition, sqrt_from_eigen, CMatrix, PSD_TOL};
use super::MixedError;
use crate::dynamics::{self, OrthogonalizationResult};
use crate::spectral::{BoundError, EnergyDistribution, SpectralState};

pub const MAX_DIM: usize = 64;
/// Hermiticity and trace tolerance for a valid density matrix.
const DENSITY_TOL: f64 = 1e-12;
/// Purification drops eigenvalues below this weight.
const PURIFY_CUTOFF: f64 = 1e-12;
const UHLMANN_SLACK: f64 = 1e-9;

/// A state `ρ` written in the eigenbasis of a diagonal Hamiltonian
/// `H = diag(energies)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    energies: Vec<f64>,
    distribution: EnergyDistribution,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to `1e-12` and positivity to
    /// `-1e-10`. The ground energy defaults to the lowest energy.
    pub fn new(
        entries: CMatrix,
        energies: Vec<f64>,
        hbar: f64,
        ground_energy: Option<f64>,
    ) -> Result<Self, MixedError> {
        let dim = entries.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(MixedError::UnsupportedDimension(dim));
        }
        if energies.len() != dim {
            return Err(MixedError::DimensionMismatch {
                expected: dim,
                found: energies.len(),
            });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(MixedError::InvalidHbar(hbar));
        }
        if energies.iter().any(|e| !e.is_finite()) || entries.as_slice().iter().any(|z| !z.is_finite()) {
            return Err(MixedError::NonFinite);
        }
        let lowest = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let ground = ground_energy.unwrap_or(lowest);
        if !ground.is_finite() {
            return Err(MixedError::NonFinite);
        }
        if lowest < ground {
            return Err(MixedError::BelowGround { energy: lowest, ground });
        }
        let deviation = entries.hermiticity_error();
        if deviation > DENSITY_TOL {
            return Err(MixedError::NotHermitian { deviation });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(MixedError::TraceNotUnit(trace.re));
        }
        let eig = hermitian_eigendecomposition(&entries)?;
        if eig.values[0] < -PSD_TOL {
            return Err(MixedError::NotPsd {
                min_eigenvalue: eig.values[0],
            });
        }
        Ok(Self::assemble(entries, energies, hbar, ground))
    }

    fn assemble(entries: CMatrix, energies: Vec<f64>, hbar: f64, ground: f64) -> Self {
        let distribution = EnergyDistribution::from_weights(
            energies.iter().enumerate().map(|(j, &e)| (e, entries[(j, j)].re)),
            hbar,
            ground,
        );
        Self {
            entries,
            energies,
            distribution,
        }
    }

    /// `|ψ⟩⟨ψ|` over the levels of a pure state.
    pub fn from_pure(state: &SpectralState) -> Self {
        let amps: Vec<Complex64> = state.levels().iter().map(|l| l.amplitude).collect();
        let energies = state.levels().iter().map(|l| l.energy).collect();
        Self::assemble(CMatrix::outer(&amps), energies, state.hbar(), state.ground_energy())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn hbar(&self) -> f64 {
        self.distribution.hbar()
    }

    pub fn ground_energy(&self) -> f64 {
        self.distribution.ground_energy()
    }

    /// Diagonal of `ρ` as an energy distribution.
    pub fn distribution(&self) -> &EnergyDistribution {
        &self.distribution
    }

    /// `ρ(t) = e^{−itH/ħ} ρ e^{itH/ħ}`: entry `(j, k)` picks up
    /// `e^{−it(E_j−E_k)/ħ}`.
    pub fn evolve(&self, t: f64) -> DensityMatrix {
        let ground = self.ground_energy();
        let scale = t / self.hbar();
        let phases: Vec<Complex64> = self
            .energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -(e - ground) * scale))
            .collect();
        let entries = CMatrix::from_fn(self.dim(), |j, k| {
            if j == k {
                self.entries[(j, j)]
            } else {
                self.entries[(j, k)] * (phases[j] * phases[k].conj())
            }
        });
        Self {
            entries,
            energies: self.energies.clone(),
            distribution: self.distribution.clone(),
        }
    }
}

impl AsRef<EnergyDistribution> for DensityMatrix {
    fn as_ref(&self) -> &EnergyDistribution {
        &self.distribution
    }
}

/// `F(ρ, σ) = (Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, MixedError> {
    if rho.dim() != sigma.dim() {
        return Err(MixedError::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    if rho.energies != sigma.energies {
        return Err(MixedError::SpectrumMismatch);
    }
    let sqrt_rho = sqrt_from_eigen(&hermitian_eigendecomposition(&rho.entries)?)?;
    let inner = (&(&sqrt_rho * &sigma.entries) * &sqrt_rho).hermitian_part();
    let eig = hermitian_eigendecomposition(&inner)?;
    // both inputs have unit trace, so round-off in `inner` is of order ε·dim
    let floor = eig.noise_floor(1.0);
    let root_trace: f64 = eig.values.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Spectral purification data `|χ⟩ = Σ_n √p_n |φ_n⟩|ξ_n⟩`; the ancilla
/// basis `ξ_n` is the canonical one and is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    /// `(p_n, φ_n)` pairs with orthonormal `φ_n`.
    pub components: Vec<(f64, Vec<Complex64>)>,
}

impl Purification {
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.0).sum()
    }

    /// `max |⟨φ_m|φ_n⟩ − δ_mn|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, (_, a)) in self.components.iter().enumerate() {
            for (n, (_, b)) in self.components.iter().enumerate() {
                let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `Σ_n p_n |φ_n⟩⟨φ_n|`.
    pub fn reduced_state(&self) -> CMatrix {
        let dim = self.components.first().map_or(0, |c| c.1.len());
        let mut out = CMatrix::zeros(dim);
        for (p, v) in &self.components {
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] += v[i] * v[j].conj() * *p;
                }
            }
        }
        out
    }

    /// `⟨χ|χ(t)⟩` under `H ⊗ I`, evaluated component by component as
    /// `Σ_n p_n ⟨φ_n|e^{−itH/ħ}|φ_n⟩`.
    pub fn overlap(&self, energies: &[f64], hbar: f64, t: f64) -> Complex64 {
        let phases: Vec<Complex64> = energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -t * e / hbar))
            .collect();
        self.components
            .iter()
            .map(|(p, v)| {
                let expect: Complex64 = v.iter().zip(&phases).map(|(a, ph)| ph * a.norm_sqr()).sum();
                expect * *p
            })
            .sum()
    }
}

/// Eigen-decomposes `ρ`, keeping eigenvalues of at least `1e-12` as weights.
pub fn purify(rho: &DensityMatrix) -> Result<Purification, MixedError> {
    let eig = hermitian_eigendecomposition(&rho.entries)?;
    if eig.values[0] < -PSD_TOL {
        return Err(MixedError::NotPsd {
            min_eigenvalue: eig.values[0],
        });
    }
    let components = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= PURIFY_CUTOFF)
        .map(|(k, &p)| (p, eig.vectors.column(k)))
        .collect();
    Ok(Purification { components })
}

/// `⟨χ|χ(t)⟩ = Tr(ρ e^{−itH/ħ}) = Σ_j ρ_jj e^{−itE_j/ħ}`.
pub fn purified_survival_amplitude(rho: &DensityMatrix, t: f64) -> Complex64 {
    dynamics::survival_amplitude(rho, t)
}

/// `Σ_j ρ_jj (E_j − E₀)^α`, equal to the moment of any purification.
pub fn mixed_moment(rho: &DensityMatrix, alpha: f64) -> Result<f64, BoundError> {
    crate::spectral::moment(rho, alpha)
}

/// Both sides of `F(ρ, ρ(t)) ≥ |⟨χ|χ(t)⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UhlmannCheck {
    pub t: f64,
    pub fidelity: f64,
    pub overlap_sq: f64,
    /// `fidelity − overlap_sq`.
    pub margin: f64,
    pub holds: bool,
}

pub fn uhlmann_check(rho: &DensityMatrix, t: f64) -> Result<UhlmannCheck, MixedError> {
    let f = fidelity(rho, &rho.evolve(t))?;
    let overlap_sq = purified_survival_amplitude(rho, t).norm_sqr();
    let margin = f - overlap_sq;
    Ok(UhlmannCheck {
        t,
        fidelity: f,
        overlap_sq,
        margin,
        holds: margin >= -UHLMANN_SLACK,
    })
}

/// First passage of the purified overlap to the tolerance, with the
/// fidelity at that time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedPassage {
    pub passage: OrthogonalizationResult,
    pub fidelity_at_passage: f64,
}

pub fn mixed_orthogonalization(rho: &DensityMatrix, tolerance: f64) -> Result<MixedPassage, MixedError> {
    let passage = dynamics::find_orthogonalization(rho, tolerance)?;
    let fidelity_at_passage = fidelity(rho, &rho.evolve(passage.t_first))?;
    Ok(MixedPassage {
        passage,
        fidelity_at_passage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_intelligent_state, moment};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_rho(rng: &mut ChaCha8Rng, energies: &[f64]) -> DensityMatrix {
        let n = energies.len();
        let g = CMatrix::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        let m = CMatrix::from_fn(n, |i, j| m[(i, j)] / tr).hermitian_part();
        DensityMatrix::new(m, energies.to_vec(), 1.0, None).unwrap()
    }

    fn diag(p: &[f64], energies: &[f64]) -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_diagonal(p), energies.to_vec(), 1.0, None).unwrap()
    }

    #[test]
    fn validation() {
        let e = vec![0.0, 1.0];
        assert!(matches!(
            DensityMatrix::new(CMatrix::from_diagonal(&[0.5, 0.4]), e.clone(), 1.0, None),
            Err(MixedError::TraceNotUnit(_))
        ));
        assert!(matches!(
            DensityMatrix::new(CMatrix::from_diagonal(&[1.5, -0.5]), e.clone(), 1.0, None),
            Err(MixedError::NotPsd { .. })
        ));
        let skew = CMatrix::from_row_major(2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(
            DensityMatrix::new(skew, e.clone(), 1.0, None),
            Err(MixedError::NotHermitian { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(CMatrix::from_diagonal(&[1.0]), e.clone(), 1.0, None),
            Err(MixedError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(CMatrix::identity(65), vec![0.0; 65], 1.0, None),
            Err(MixedError::UnsupportedDimension(65))
        ));
        assert!(matches!(
            DensityMatrix::new(CMatrix::from_diagonal(&[0.5, 0.5]), e, 1.0, Some(0.5)),
            Err(MixedError::BelowGround { .. })
        ));
    }

    #[test]
    fn fidelity_basics() {
        let e = [0.0, 1.0];
        assert_eq!(fidelity(&diag(&[1.0, 0.0], &e), &diag(&[0.0, 1.0], &e)).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_rho(&mut rng, &[0.0, 1.0, 2.5]);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let other = random_rho(&mut rng, &[0.0, 1.0, 2.5]);
        let f1 = fidelity(&rho, &other).unwrap();
        let f2 = fidelity(&other, &rho).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&f1));
        assert!(matches!(
            fidelity(&rho, &random_rho(&mut rng, &[0.0, 1.0, 3.0])),
            Err(MixedError::SpectrumMismatch)
        ));
    }

    #[test]
    fn commuting_states_give_classical_fidelity() {
        let e = [0.0, 1.0, 2.0];
        let p = [0.2, 0.3, 0.5];
        let q = [0.6, 0.1, 0.3];
        let expected: f64 = p
            .iter()
            .zip(&q)
            .map(|(a, b)| (a * b as &f64).sqrt())
            .sum::<f64>()
            .powi(2);
        let f = fidelity(&diag(&p, &e), &diag(&q, &e)).unwrap();
        assert!((f - expected).abs() < 1e-12);
    }

    #[test]
    fn pure_state_fidelity_is_squared_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = vec![0.0, 1.0, 2.0, 4.0];
        for _ in 0..20 {
            let mut a: Vec<Complex64> = (0..4)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut b: Vec<Complex64> = (0..4)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            for v in [&mut a, &mut b] {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.iter_mut().for_each(|z| *z /= n);
            }
            let overlap: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            let ra = DensityMatrix::new(CMatrix::outer(&a).hermitian_part(), e.clone(), 1.0, None).unwrap();
            let rb = DensityMatrix::new(CMatrix::outer(&b).hermitian_part(), e.clone(), 1.0, None).unwrap();
            let f = fidelity(&ra, &rb).unwrap();
            assert!((f - overlap.norm_sqr()).abs() < 1e-9, "{f} vs {}", overlap.norm_sqr());
        }
    }

    #[test]
    fn evolve_is_trivial_at_zero_and_for_diagonal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_rho(&mut rng, &[0.0, 0.7, 1.9]);
        assert!(rho.evolve(0.0).entries().max_abs_diff(rho.entries()) < 1e-15);
        let d = diag(&[0.25, 0.75], &[0.0, 3.0]);
        assert_eq!(d.evolve(1.234).entries(), d.entries());
    }

    #[test]
    fn evolve_preserves_spectrum_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_rho(&mut rng, &[0.0, 0.7, 1.9, 4.2]);
        let later = rho.evolve(3.3);
        assert_eq!(later.entries().hermiticity_error(), 0.0);
        let a = hermitian_eigendecomposition(rho.entries()).unwrap().values;
        let b = hermitian_eigendecomposition(later.entries()).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((later.entries().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_two_level_reaches_zero_fidelity() {
        let s = make_intelligent_state(0.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        let check = uhlmann_check(&rho, PI / 2.0).unwrap();
        assert!(check.fidelity < 1e-9, "{check:?}");
        assert!(check.overlap_sq < 1e-20);
        assert!(check.holds);
    }

    #[test]
    fn purification_properties() {
        let s = make_intelligent_state(0.0, 1.0, 0.0, 0.5, 1.0).unwrap();
        let pure = purify(&DensityMatrix::from_pure(&s)).unwrap();
        assert_eq!(pure.components.len(), 1);
        assert!((pure.components[0].0 - 1.0).abs() < 1e-12);

        let mixed = purify(&diag(&[0.5, 0.5], &[0.0, 1.0])).unwrap();
        assert_eq!(mixed.components.len(), 2);
        assert!(mixed.components.iter().all(|c| (c.0 - 0.5).abs() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_rho(&mut rng, &[0.0, 1.0, 2.0, 3.0, 5.0]);
        let p = purify(&rho).unwrap();
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
        assert!(p.orthonormality_error() < 1e-10);
        assert!(p.reduced_state().max_abs_diff(rho.entries()) < 1e-12);
    }

    #[test]
    fn purified_amplitude_matches_trace_and_component_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let energies = [0.0, 1.0, 2.5, 4.0];
        let rho = random_rho(&mut rng, &energies);
        let p = purify(&rho).unwrap();
        for t in [0.0, 0.3, 1.7, 9.1] {
            let a = purified_survival_amplitude(&rho, t);
            let b = p.overlap(&energies, 1.0, t);
            assert!((a - b).norm() < 1e-12, "t={t}");
        }
        assert!((purified_survival_amplitude(&rho, 0.0) - c(1.0, 0.0)).norm() < 1e-12);

        let half = diag(&[0.5, 0.5], &[0.0, 3.0]);
        let t = 0.8;
        let expected = (c(1.0, 0.0) + Complex64::from_polar(1.0, -3.0 * t)) / 2.0;
        assert!((purified_survival_amplitude(&half, t) - expected).norm() < 1e-15);
    }

    #[test]
    fn mixed_moments() {
        let s = make_intelligent_state(0.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        for alpha in [0.5, 1.0, 2.0] {
            assert!((mixed_moment(&rho, alpha).unwrap() - moment(&s, alpha).unwrap()).abs() < 1e-15);
        }
        let eps = 1.5;
        assert!((mixed_moment(&diag(&[0.5, 0.5], &[0.0, eps]), 1.0).unwrap() - eps / 2.0).abs() < 1e-15);
    }

    #[test]
    fn uhlmann_inequality_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let rho = random_rho(&mut rng, &[0.0, 1.0, 1.5, 3.0]);
            let zero = uhlmann_check(&rho, 0.0).unwrap();
            assert!((zero.fidelity - 1.0).abs() < 1e-9 && (zero.overlap_sq - 1.0).abs() < 1e-12);
            for _ in 0..10 {
                let check = uhlmann_check(&rho, rng.random_range(0.0..20.0)).unwrap();
                assert!(check.holds, "{check:?}");
            }
        }
    }

    #[test]
    fn mixed_passage_of_maximally_mixed_qubit() {
        let rho = diag(&[0.5, 0.5], &[0.0, 2.0]);
        let passage = mixed_orthogonalization(&rho, 1e-9).unwrap();
        assert!(passage.passage.reached);
        assert!((passage.passage.t_first - PI / 2.0).abs() < 1e-9);
        // the state is stationary, so its fidelity with itself stays 1
        assert!((passage.fidelity_at_passage - 1.0).abs() < 1e-9);
    }
}
