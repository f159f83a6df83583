// SPDX-License-Identifier: Apache-2.0

//! System builders: the two-reservoir setup and seeded random systems.
//!
//! Tensor products put the left factor on the slow index (`A ⊗ B` is the
//! row-major Kronecker product).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::classical::ClassicalSystem;
use crate::error::{Error, Result};
use crate::linalg::{c, diag, frobenius, kron, pauli_x, CMatrix, HermitianOperator};
use crate::quadrature;
use crate::quantum::{heisenberg_evolve, heisenberg_evolve_matrix, DensityMatrix, QuantumSystem};

/// Coupling strength of the shipped two-qubit model.
pub const CANONICAL_COUPLING: f64 = 0.25;
pub const CANONICAL_BETAS: (f64, f64) = (1.0, 2.0);
/// Minimal `‖[H, ω₀]‖_F` accepted by [`random_system`].
pub const MIN_COMMUTATOR: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 100;

/// Two systems in Gibbs states at inverse temperatures `β_l`, `β_r`,
/// coupled through `V`.
#[derive(Debug, Clone)]
pub struct ReservoirModel {
    pub h_left: HermitianOperator,
    pub h_right: HermitianOperator,
    pub beta_left: f64,
    pub beta_right: f64,
    pub coupling: HermitianOperator,
    pub z_left: f64,
    pub z_right: f64,
    pub system: QuantumSystem,
}

impl ReservoirModel {
    pub fn dims(&self) -> (usize, usize) {
        (self.h_left.dim(), self.h_right.dim())
    }

    /// `H_l ⊗ 𝟙`.
    pub fn left_full(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(kron(self.h_left.matrix(), &CMatrix::identity(self.h_right.dim(), self.h_right.dim())))
    }

    /// `𝟙 ⊗ H_r`.
    pub fn right_full(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(kron(&CMatrix::identity(self.h_left.dim(), self.h_left.dim()), self.h_right.matrix()))
    }
}

fn partition_function(h: &HermitianOperator, beta: f64) -> f64 {
    crate::linalg::eig(h).eigenvalues.iter().map(|e| (-beta * e).exp()).sum()
}

pub fn build_two_reservoir(
    h_left: HermitianOperator,
    h_right: HermitianOperator,
    beta_left: f64,
    beta_right: f64,
    coupling: HermitianOperator,
) -> Result<ReservoirModel> {
    for (name, beta) in [("beta_left", beta_left), ("beta_right", beta_right)] {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::param(name, format!("inverse temperature must be positive, got {beta}")));
        }
    }
    let (nl, nr) = (h_left.dim(), h_right.dim());
    if coupling.dim() != nl * nr {
        return Err(Error::DimensionMismatch {
            expected: nl * nr,
            found: coupling.dim(),
        });
    }
    // e^{−β_l H_l}/Z_l ⊗ e^{−β_r H_r}/Z_r, built from its exponent so that
    // its spectrum keeps full relative accuracy
    let exponent = kron(h_left.matrix(), &CMatrix::identity(nr, nr)) * c(beta_left)
        + kron(&CMatrix::identity(nl, nl), h_right.matrix()) * c(beta_right);
    let omega0 = DensityMatrix::from_exponent(&HermitianOperator::symmetrized(exponent))?;
    let h = kron(h_left.matrix(), &CMatrix::identity(nr, nr))
        + kron(&CMatrix::identity(nl, nl), h_right.matrix())
        + coupling.matrix();
    let h = HermitianOperator::symmetrized(h);
    let tri = h_left.is_real(crate::quantum::REAL_TOL)
        && h_right.is_real(crate::quantum::REAL_TOL)
        && coupling.is_real(crate::quantum::REAL_TOL);
    let system = QuantumSystem::new(h, omega0, tri)?;
    Ok(ReservoirModel {
        z_left: partition_function(&h_left, beta_left),
        z_right: partition_function(&h_right, beta_right),
        h_left,
        h_right,
        beta_left,
        beta_right,
        coupling,
        system,
    })
}

/// Two qubits, `H_{l/r} = diag(0, 1)`, `V = ε σ_x ⊗ σ_x`, `β_l = 1`, `β_r = 2`.
pub fn canonical_model() -> ReservoirModel {
    canonical_model_with(CANONICAL_COUPLING, CANONICAL_BETAS.0, CANONICAL_BETAS.1)
        .expect("canonical parameters are valid")
}

pub fn canonical_model_with(coupling: f64, beta_left: f64, beta_right: f64) -> Result<ReservoirModel> {
    let h = HermitianOperator::symmetrized(diag(&[0.0, 1.0]));
    let v = HermitianOperator::symmetrized(kron(&pauli_x(), &pauli_x()) * c(coupling));
    build_two_reservoir(h.clone(), h, beta_left, beta_right, v)
}

/// Energy fluxes `Φ_{l/r} = i[H_{l/r}, V]`.
pub fn flux_observables(model: &ReservoirModel) -> (HermitianOperator, HermitianOperator) {
    (
        model.left_full().i_commutator(&model.coupling),
        model.right_full().i_commutator(&model.coupling),
    )
}

/// `‖H_{x,t} − H_x + ∫₀^t Φ_{x,s} ds‖_F` for the left and right reservoir,
/// with the integral done by adaptive quadrature.
pub fn flux_balance_residual(model: &ReservoirModel, t: f64) -> (f64, f64) {
    let (phi_l, phi_r) = flux_observables(model);
    let sys = &model.system;
    let residual = |h: HermitianOperator, phi: &HermitianOperator| {
        let integral = quadrature::integrate(
            &|s| heisenberg_evolve_matrix(sys, phi.matrix(), s),
            0.0,
            t,
            crate::quantum::QUADRATURE_TOL,
        );
        let ht = heisenberg_evolve(sys, &h, t);
        frobenius(&(ht.matrix() - h.matrix() + integral))
    };
    (residual(model.left_full(), &phi_l), residual(model.right_full(), &phi_r))
}

/// `σ = −β_l Φ_l − β_r Φ_r`.
pub fn entropy_production_decomposition(model: &ReservoirModel) -> HermitianOperator {
    let (phi_l, phi_r) = flux_observables(model);
    phi_l.scale(-model.beta_left).add(&phi_r.scale(-model.beta_right))
}

fn gaussian_hermitian(n: usize, real: bool, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        if real {
            c(re)
        } else {
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) / 2f64.sqrt()
        }
    });
    HermitianOperator::symmetrized(g)
}

/// Seeded random system. `H` is a Gaussian Hermitian matrix (real symmetric
/// when `tri`), `ω₀ = e^{−R}/tr e^{−R}` with `R` drawn the same way and
/// scaled by `spread/√dim`. Draws are repeated until `‖[H, ω₀]‖_F ≥ 1e-6`.
pub fn random_system(dim: usize, tri: bool, seed: u64, spread: f64) -> Result<QuantumSystem> {
    if dim < 2 {
        return Err(Error::param("dim", format!("must be at least 2, got {dim}")));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::param("spread", format!("must be positive, got {spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let h = gaussian_hermitian(dim, tri, &mut rng);
        let r = gaussian_hermitian(dim, tri, &mut rng).scale(spread / (dim as f64).sqrt());
        let omega0 = DensityMatrix::from_exponent(&r)?;
        let sys = QuantumSystem::new(h, omega0, tri)?;
        if sys.commutator_norm() >= MIN_COMMUTATOR {
            return Ok(sys);
        }
    }
    Err(Error::Domain(format!(
        "seed {seed} produced no non-commuting system in {MAX_ATTEMPTS} attempts"
    )))
}

/// Seeded random classical system of the given size. With `tri` the
/// reference vector is mirror symmetric. Log-weights are uniform on
/// `[−spread, spread]`.
pub fn random_classical_system(size: usize, tri: bool, seed: u64, spread: f64) -> Result<ClassicalSystem> {
    if size < 2 {
        return Err(Error::param("size", format!("must be at least 2, got {size}")));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::param("spread", format!("must be positive, got {spread}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-spread, spread).expect("spread is positive");
    let mut logs: Vec<f64> = (0..size).map(|_| dist.sample(&mut rng)).collect();
    if tri {
        for j in 0..size / 2 {
            logs[size - 1 - j] = logs[j];
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    if tri {
        // keep the mirror symmetry exact after normalization
        for j in 0..size / 2 {
            probs[size - 1 - j] = probs[j];
        }
    }
    ClassicalSystem::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::quantum::{entropy_production_observable, mean_entropy_production};

    #[test]
    fn canonical_model_invariants() {
        let model = canonical_model();
        let sys = &model.system;
        assert_eq!(sys.dim(), 4);
        assert!(sys.is_tri());
        let h_expected = model.left_full().add(&model.right_full()).add(&model.coupling);
        assert!(max_abs(&(sys.hamiltonian().matrix() - h_expected.matrix())) < 1e-12);
        let wl = diag(&[1.0, (-1.0f64).exp()]) / c(model.z_left);
        let wr = diag(&[1.0, (-2.0f64).exp()]) / c(model.z_right);
        assert!(max_abs(&(sys.reference_state().matrix() - kron(&wl, &wr))) < 1e-12);
        assert!(mean_entropy_production(sys, 1.0).unwrap() > 1e-10);
    }

    #[test]
    fn uncoupled_model_is_stationary() {
        let model = canonical_model_with(0.0, 1.0, 2.0).unwrap();
        assert!(model.system.commutator_norm() < 1e-14);
        let (l, r) = flux_observables(&model);
        assert!(max_abs(l.matrix()) < 1e-15 && max_abs(r.matrix()) < 1e-15);
        assert!(max_abs(entropy_production_decomposition(&model).matrix()) < 1e-15);
    }

    #[test]
    fn flux_vanishes_when_coupling_commutes_with_left() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let v = HermitianOperator::symmetrized(kron(&diag(&[1.0, -1.0]), &pauli_x()) * c(0.3));
        let model = build_two_reservoir(h.clone(), h, 1.0, 0.5, v).unwrap();
        let (l, r) = flux_observables(&model);
        assert!(max_abs(l.matrix()) < 1e-15);
        assert!(max_abs(r.matrix()) > 1e-3);
    }

    #[test]
    fn equilibrium_has_zero_mean_production() {
        // V commutes with H_l + H_r (excitation-conserving hopping), equal temperatures
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let mut v = CMatrix::zeros(4, 4);
        v[(1, 2)] = c(0.4);
        v[(2, 1)] = c(0.4);
        let v = HermitianOperator::new(v).unwrap();
        let model = build_two_reservoir(h.clone(), h, 0.8, 0.8, v).unwrap();
        assert!(mean_entropy_production(&model.system, 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn flux_balance_and_decomposition() {
        let model = canonical_model();
        for &t in &[0.5, 1.0, 2.0] {
            let (l, r) = flux_balance_residual(&model, t);
            assert!(l < 1e-8 && r < 1e-8, "t={t}: {l:e} {r:e}");
        }
        let sigma = entropy_production_observable(&model.system);
        let decomposed = entropy_production_decomposition(&model);
        assert!(max_abs(&(sigma.matrix() - decomposed.matrix())) < 1e-10);
    }

    #[test]
    fn equal_betas_give_commutator_form() {
        let model = canonical_model_with(0.25, 0.7, 0.7).unwrap();
        let hsum = model.left_full().add(&model.right_full());
        let expected = hsum.i_commutator(&model.coupling).scale(-0.7);
        let got = entropy_production_decomposition(&model);
        assert!(max_abs(&(got.matrix() - expected.matrix())) < 1e-14);
    }

    #[test]
    fn builder_rejects_bad_input() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let v = HermitianOperator::zeros(4);
        assert!(build_two_reservoir(h.clone(), h.clone(), 0.0, 1.0, v.clone()).is_err());
        assert!(build_two_reservoir(h.clone(), h.clone(), 1.0, -2.0, v).is_err());
        assert!(matches!(
            build_two_reservoir(h.clone(), h, 1.0, 1.0, HermitianOperator::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_systems_are_deterministic() {
        let a = random_system(4, true, 1, 1.0).unwrap();
        let b = random_system(4, true, 1, 1.0).unwrap();
        assert_eq!(a.hamiltonian(), b.hamiltonian());
        assert_eq!(a.reference_state().matrix(), b.reference_state().matrix());
        assert!(a.is_tri());
        assert!(a.commutator_norm() > 1e-6);
        let c = random_system(5, false, 9, 1.0).unwrap();
        assert!(!c.is_tri());
        assert!(!c.hamiltonian().is_real(1e-12));
        assert!(random_system(1, true, 0, 1.0).is_err());
    }

    #[test]
    fn random_classical_systems() {
        let s = random_classical_system(11, true, 4, 1.5).unwrap();
        assert!(s.is_tri());
        let s = random_classical_system(10, false, 4, 1.5).unwrap();
        assert!(!s.is_tri());
        assert_eq!(
            random_classical_system(7, true, 2, 1.0).unwrap(),
            random_classical_system(7, true, 2, 1.0).unwrap()
        );
    }
}
