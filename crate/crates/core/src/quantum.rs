// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional quantum dynamical systems `(K, H, ω₀)`.
//!
//! Time evolution is always exact: `e^{−itH} = U e^{−itΛ} U*` from the
//! eigendecomposition of `H`, computed once per system.

use crate::error::{Error, Result};
use crate::linalg::{
    c, eig, frobenius, max_abs, trace_product, CMatrix, HermitianOperator, SpectralDecomposition, I,
};
use crate::quadrature;

/// Smallest admissible ratio between the least and largest eigenvalue of a state.
pub const FAITHFUL_RATIO: f64 = 1e-12;
/// Tolerance on `tr ρ = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Entry-wise tolerance for the realness check that encodes time reversal.
pub const REAL_TOL: f64 = 1e-12;
/// Per-entry absolute error target for the `∫₀^t σ_s ds` cross-check.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// A faithful (strictly positive, unit trace) density matrix together with
/// its spectral decomposition.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    operator: HermitianOperator,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(operator: HermitianOperator) -> Result<Self> {
        let trace = operator.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotFaithful(format!("trace is {trace}, expected 1")));
        }
        let spectrum = eig(&operator);
        let lo = spectrum.eigenvalues[0];
        let hi = *spectrum.eigenvalues.last().unwrap();
        if !(lo > FAITHFUL_RATIO * hi) {
            return Err(Error::NotFaithful(format!(
                "smallest eigenvalue {lo:e} is not above {FAITHFUL_RATIO:e} x largest ({hi:e})"
            )));
        }
        Ok(DensityMatrix { operator, spectrum })
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// `e^{−R} / tr e^{−R}`.
    ///
    /// The spectrum is taken from that of `R` rather than recomputed, so
    /// small eigenvalues keep full relative accuracy.
    pub fn from_exponent(r: &HermitianOperator) -> Result<Self> {
        let dec = eig(r);
        let n = dec.dim();
        let shift = dec.eigenvalues[0];
        let weights: Vec<f64> = dec.eigenvalues.iter().map(|x| (shift - x).exp()).collect();
        let z: f64 = weights.iter().sum();
        // R ascending means e^{−R} descending; reverse to keep ascending order
        let spectrum = SpectralDecomposition {
            eigenvalues: weights.iter().rev().map(|w| w / z).collect(),
            eigenvectors: CMatrix::from_fn(n, n, |i, k| dec.eigenvectors[(i, n - 1 - k)]),
        };
        let (lo, hi) = (spectrum.eigenvalues[0], spectrum.eigenvalues[n - 1]);
        if !(lo > FAITHFUL_RATIO * hi) {
            return Err(Error::NotFaithful(format!(
                "smallest eigenvalue {lo:e} is not above {FAITHFUL_RATIO:e} x largest ({hi:e})"
            )));
        }
        Ok(DensityMatrix {
            operator: spectrum.reconstruct(),
            spectrum,
        })
    }

    /// Gibbs state `e^{−βH}/Z`.
    pub fn gibbs(h: &HermitianOperator, beta: f64) -> Result<Self> {
        Self::from_exponent(&h.scale(beta))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(HermitianOperator::identity(n).scale(1.0 / n as f64)).expect("1/n is faithful")
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &CMatrix {
        self.operator.matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `ρ^s`, finite for every real `s`.
    pub fn power(&self, s: f64) -> HermitianOperator {
        self.spectrum.apply(|x| x.powf(s))
    }

    pub fn log(&self) -> HermitianOperator {
        self.spectrum.apply(f64::ln)
    }

    /// `ρ(A) = tr(Aρ)`.
    pub fn expectation(&self, a: &HermitianOperator) -> f64 {
        trace_product(self.matrix(), a.matrix()).re
    }

    /// `U ρ U*` for a unitary `U`; the spectrum is carried along exactly.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> DensityMatrix {
        DensityMatrix {
            operator: self.operator.conjugate_by(unitary),
            spectrum: SpectralDecomposition {
                eigenvalues: self.spectrum.eigenvalues.clone(),
                eigenvectors: unitary * &self.spectrum.eigenvectors,
            },
        }
    }
}

/// `(K, H, ω₀)` with an optional time-reversal flag. When the flag is set,
/// complex conjugation in the standard basis is the time reversal, so `H`
/// and `ω₀` must be real.
#[derive(Debug, Clone)]
pub struct QuantumSystem {
    hamiltonian: HermitianOperator,
    h_spectrum: SpectralDecomposition,
    reference: DensityMatrix,
    tri: bool,
}

impl QuantumSystem {
    pub fn new(hamiltonian: HermitianOperator, reference: DensityMatrix, tri: bool) -> Result<Self> {
        if hamiltonian.dim() != reference.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: reference.dim(),
            });
        }
        if tri && !(hamiltonian.is_real(REAL_TOL) && reference.operator().is_real(REAL_TOL)) {
            return Err(Error::param(
                "tri",
                "time reversal requires real H and reference state in the standard basis",
            ));
        }
        let h_spectrum = eig(&hamiltonian);
        Ok(QuantumSystem {
            hamiltonian,
            h_spectrum,
            reference,
            tri,
        })
    }

    /// Sets the TRI flag iff both matrices are real.
    pub fn with_detected_tri(hamiltonian: HermitianOperator, reference: DensityMatrix) -> Result<Self> {
        let tri = hamiltonian.is_real(REAL_TOL) && reference.operator().is_real(REAL_TOL);
        Self::new(hamiltonian, reference, tri)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn hamiltonian_spectrum(&self) -> &SpectralDecomposition {
        &self.h_spectrum
    }

    pub fn reference_state(&self) -> &DensityMatrix {
        &self.reference
    }

    pub fn is_tri(&self) -> bool {
        self.tri
    }

    /// `‖[H, ω₀]‖_F`.
    pub fn commutator_norm(&self) -> f64 {
        let h = self.hamiltonian.matrix();
        let w = self.reference.matrix();
        frobenius(&(h * w - w * h))
    }

    /// `e^{−itH}`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.h_spectrum.apply_complex(|e| (-I * e * t).exp())
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `A_t = e^{itH} A e^{−itH}`.
pub fn heisenberg_evolve(sys: &QuantumSystem, a: &HermitianOperator, t: f64) -> HermitianOperator {
    a.conjugate_by(&sys.propagator(t).adjoint())
}

/// Heisenberg evolution of an arbitrary (not necessarily Hermitian) matrix.
pub fn heisenberg_evolve_matrix(sys: &QuantumSystem, a: &CMatrix, t: f64) -> CMatrix {
    let u = sys.propagator(t);
    u.adjoint() * a * u
}

/// `ρ_t = e^{−itH} ρ e^{itH}`.
pub fn schrodinger_evolve(sys: &QuantumSystem, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    rho.conjugate_by(&sys.propagator(t))
}

/// `S(ρ, ν) = tr ρ(log ν − log ρ) ≤ 0`.
pub fn q_relative_entropy(rho: &DensityMatrix, nu: &DensityMatrix) -> Result<f64> {
    same_dim(rho.dim(), nu.dim())?;
    let diff = nu.log().sub(&rho.log());
    Ok(rho.expectation(&diff))
}

/// `S_α(ρ, ν) = log tr(ρ^α ν^{1−α})`.
pub fn q_renyi_entropy(rho: &DensityMatrix, nu: &DensityMatrix, alpha: f64) -> Result<f64> {
    same_dim(rho.dim(), nu.dim())?;
    let tr = trace_product(rho.power(alpha).matrix(), nu.power(1.0 - alpha).matrix());
    if !(tr.re > 0.0) {
        return Err(Error::Domain(format!("tr(rho^a nu^(1-a)) = {tr} is not positive")));
    }
    Ok(tr.re.ln())
}

/// `S₀ = −log ω₀`.
pub fn entropy_observable(sys: &QuantumSystem) -> HermitianOperator {
    sys.reference.log().scale(-1.0)
}

/// `S_t`, the Heisenberg-evolved entropy observable.
pub fn entropy_observable_at(sys: &QuantumSystem, t: f64) -> HermitianOperator {
    heisenberg_evolve(sys, &entropy_observable(sys), t)
}

/// `σ = −i[H, log ω₀]`.
pub fn entropy_production_observable(sys: &QuantumSystem) -> HermitianOperator {
    let log_w = sys.reference.log();
    HermitianOperator::symmetrized(
        (sys.hamiltonian.matrix() * log_w.matrix() - log_w.matrix() * sys.hamiltonian.matrix()) * (-I),
    )
}

fn positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    Ok(())
}

/// `Σ^t = (S_t − S₀)/t`.
pub fn mean_ep_observable(sys: &QuantumSystem, t: f64) -> Result<HermitianOperator> {
    positive_time(t)?;
    let s0 = entropy_observable(sys);
    let st = heisenberg_evolve(sys, &s0, t);
    Ok(st.sub(&s0).scale(1.0 / t))
}

/// `t^{−1} ∫₀^t σ_s ds` by adaptive Simpson quadrature.
pub fn mean_ep_quadrature(sys: &QuantumSystem, t: f64) -> Result<HermitianOperator> {
    positive_time(t)?;
    let sigma = entropy_production_observable(sys);
    let integrand = |s: f64| heisenberg_evolve_matrix(sys, sigma.matrix(), s);
    let integral = quadrature::integrate(&integrand, 0.0, t, QUADRATURE_TOL);
    Ok(HermitianOperator::symmetrized(integral * c(1.0 / t)))
}

/// Frobenius gap between the closed form of `Σ^t` and its quadrature.
pub fn mean_ep_consistency(sys: &QuantumSystem, t: f64) -> Result<f64> {
    let direct = mean_ep_observable(sys, t)?;
    let quad = mean_ep_quadrature(sys, t)?;
    Ok(frobenius(&(direct.matrix() - quad.matrix())))
}

/// `ω₀(Σ^t)`.
pub fn mean_entropy_production(sys: &QuantumSystem, t: f64) -> Result<f64> {
    Ok(sys.reference.expectation(&mean_ep_observable(sys, t)?))
}

/// Largest entry of `[A, B]`.
pub fn commutator_size(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    max_abs(&(a.matrix() * b.matrix() - b.matrix() * a.matrix()))
}
