// SPDX-License-Identifier: Apache-2.0

//! The quantum entropic functionals `e_{p,t}(α)`, `p ∈ [1, ∞]`, and the
//! objects that represent them: Rényi relative entropy (`p = 2`), the Gibbs
//! variational principle (`p = ∞`), Araki–Masuda norms and the quantum
//! transfer operators.
//!
//! For finite `p`,
//!
//! ```text
//! e_{p,t}(α) = log tr([ω₀^{(1−α)/p} e^{−(2α/p) S_t} ω₀^{(1−α)/p}]^{p/2})
//! ```
//!
//! and `e_{∞,t}(α) = log tr e^{−(1−α)S₀ − αS_t}`. Since
//! `e^{−c S_t} = (ω_{−t})^c`, every evaluation only needs the spectra of
//! `ω₀` and `H`.
//!
//! The bracket equals `M M*` with `M = ω₀^{(1−α)/p} ω_{−t}^{α/p}`, so the
//! finite-`p` functional is `log Σ σ_i(M)^p`. In the eigenbasis `ω₀ = V D V*`
//! the singular values of `M` are those of `D^{(1−α)/p} (V* e^{itH} V) D^{α/p}`,
//! a diagonally scaled unitary. Taking singular values of that matrix instead
//! of eigenvalues of the bracket avoids squaring its condition number, which
//! matters at small `p` when `ω₀` is badly conditioned.

use std::cmp::Ordering;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{eig, trace_product, CMatrix, HermitianOperator};
use crate::measure::log_sum_exp;
use crate::quantum::{
    entropy_observable, heisenberg_evolve_matrix, mean_ep_observable, q_relative_entropy,
    q_renyi_entropy, schrodinger_evolve, DensityMatrix, QuantumSystem,
};

/// Floor applied to singular values before taking logarithms.
pub const EIGEN_FLOOR: f64 = 1e-300;

/// General (not necessarily Hermitian) element of the operator space
/// `O = B(K)` with inner product `⟨A, B⟩ = tr(A* B)`.
pub type OperatorSpaceElement = CMatrix;

/// The index `p ∈ [1, ∞]`. Infinity is a distinct variant, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PIndex {
    Finite(f64),
    Infinite,
}

impl PIndex {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::param("p", format!("must be >= 1, got {p}")));
        }
        Ok(PIndex::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PIndex::Infinite)
    }
}

impl Eq for PIndex {}

impl PartialOrd for PIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PIndex::Finite(a), PIndex::Finite(b)) => a.total_cmp(b),
            (PIndex::Finite(_), PIndex::Infinite) => Ordering::Less,
            (PIndex::Infinite, PIndex::Finite(_)) => Ordering::Greater,
            (PIndex::Infinite, PIndex::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for PIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PIndex::Finite(p) => write!(f, "{p}"),
            PIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for PIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PIndex::Finite(p) => s.serialize_f64(*p),
            PIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `α ∈ [−1, 2]` in steps of `0.05` (61 points).
pub fn default_alpha_grid() -> Vec<f64> {
    (-20..=40).map(|k| k as f64 / 20.0).collect()
}

pub fn default_p_grid() -> Vec<PIndex> {
    [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 64.0]
        .iter()
        .map(|&p| PIndex::Finite(p))
        .chain(std::iter::once(PIndex::Infinite))
        .collect()
}

/// Values of `α ↦ e_{p,t}(α)` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalCurve {
    pub system_id: String,
    pub p: PIndex,
    pub t: f64,
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
}

impl FunctionalCurve {
    /// Smallest discrete second difference (uniform grids only).
    pub fn min_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Precomputed spectra for evaluating `e_{p,t}` at many `(p, α)` with fixed
/// system and time.
#[derive(Debug, Clone)]
pub struct FunctionalEvaluator<'a> {
    sys: &'a QuantumSystem,
    t: f64,
    /// `ω_{−t} = e^{itH} ω₀ e^{−itH}`, so that `e^{−cS_t} = ω_{−t}^c`.
    omega_back: DensityMatrix,
    s0: HermitianOperator,
    st: HermitianOperator,
    /// `V* e^{itH} V` with `ω₀ = V D V*`.
    overlap: CMatrix,
}

impl<'a> FunctionalEvaluator<'a> {
    pub fn new(sys: &'a QuantumSystem, t: f64) -> Self {
        let omega_back = schrodinger_evolve(sys, sys.reference_state(), -t);
        let s0 = entropy_observable(sys);
        let st = omega_back.log().scale(-1.0);
        let v = &sys.reference_state().spectrum().eigenvectors;
        let overlap = v.adjoint() * sys.propagator(-t) * v;
        FunctionalEvaluator {
            sys,
            t,
            omega_back,
            s0,
            st,
            overlap,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The positive bracket `ω₀^{(1−α)/p} ω_{−t}^{2α/p} ω₀^{(1−α)/p}`,
    /// formed explicitly. [`FunctionalEvaluator::value`] does not use it.
    pub fn bracket(&self, p: f64, alpha: f64) -> HermitianOperator {
        let outer = self.sys.reference_state().power((1.0 - alpha) / p);
        let inner = self.omega_back.power(2.0 * alpha / p);
        HermitianOperator::symmetrized(outer.matrix() * inner.matrix() * outer.matrix())
    }

    /// The exponent `−(1−α)S₀ − αS_t`.
    pub fn gibbs_exponent(&self, alpha: f64) -> HermitianOperator {
        self.s0.scale(-(1.0 - alpha)).add(&self.st.scale(-alpha))
    }

    pub fn value(&self, p: PIndex, alpha: f64) -> Result<f64> {
        match p {
            PIndex::Finite(p) => {
                if !(p >= 1.0) {
                    return Err(Error::param("p", format!("must be >= 1, got {p}")));
                }
                let d = &self.sys.reference_state().spectrum().eigenvalues;
                let (a, c) = ((1.0 - alpha) / p, alpha / p);
                let n = d.len();
                let scaled = CMatrix::from_fn(n, n, |i, j| {
                    self.overlap[(i, j)] * (a * d[i].ln() + c * d[j].ln()).exp()
                });
                let logs: Vec<f64> = scaled
                    .singular_values()
                    .iter()
                    .map(|&s| p * s.max(EIGEN_FLOOR).ln())
                    .collect();
                if logs.iter().any(|l| !l.is_finite()) {
                    return Err(Error::Domain(format!("non-finite singular value at p={p}, alpha={alpha}")));
                }
                Ok(log_sum_exp(&logs))
            }
            PIndex::Infinite => Ok(log_sum_exp(&eig(&self.gibbs_exponent(alpha)).eigenvalues)),
        }
    }

    /// Closed-form maximizer of the `p = ∞` variational problem.
    pub fn gibbs_maximizer(&self, alpha: f64) -> Result<DensityMatrix> {
        DensityMatrix::from_exponent(&self.gibbs_exponent(alpha).scale(-1.0))
    }

    pub fn curve(&self, system_id: &str, p: PIndex, alphas: &[f64]) -> Result<FunctionalCurve> {
        let values = alphas
            .iter()
            .map(|&a| self.value(p, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionalCurve {
            system_id: system_id.to_string(),
            p,
            t: self.t,
            alphas: alphas.to_vec(),
            values,
        })
    }
}

/// `e_{p,t}(α)`.
pub fn functional(sys: &QuantumSystem, p: PIndex, alpha: f64, t: f64) -> Result<f64> {
    FunctionalEvaluator::new(sys, t).value(p, alpha)
}

/// `S_α(ω_t, ω₀)`; coincides with `e_{2,t}(α)` for time-reversal invariant
/// systems (and with `e_{2,t}(1−α)` in general).
pub fn renyi_bridge_check(sys: &QuantumSystem, alpha: f64, t: f64) -> Result<f64> {
    let omega_t = schrodinger_evolve(sys, sys.reference_state(), t);
    q_renyi_entropy(&omega_t, sys.reference_state(), alpha)
}

/// The direct quantization `log ω₀(e^{−α t Σ^t})`. Its value at `α = 1`
/// vanishes for all `t` only when `[H, ω₀] = 0`.
pub fn naive_functional(sys: &QuantumSystem, alpha: f64, t: f64) -> Result<f64> {
    let sigma = mean_ep_observable(sys, t)?;
    let tilted = eig(&sigma).apply(|x| (-alpha * t * x).exp());
    let tr = sys.reference_state().expectation(&tilted);
    Ok(tr.ln())
}

/// Objective `S(ρ, ω₀) − α t ρ(Σ^t)`.
pub fn variational_objective(sys: &QuantumSystem, rho: &DensityMatrix, alpha: f64, t: f64) -> Result<f64> {
    let sigma = mean_ep_observable(sys, t)?;
    Ok(q_relative_entropy(rho, sys.reference_state())? - alpha * t * rho.expectation(&sigma))
}

#[derive(Debug, Clone)]
pub struct VariationalOutcome {
    /// Objective at `ρ* = e^{−(1−α)S₀ − αS_t} / tr(·)`.
    pub value: f64,
    pub maximizer: DensityMatrix,
    /// Best objective over the random trial states.
    pub best_perturbed: f64,
}

fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        num_complex::Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(HermitianOperator::symmetrized(m / num_complex::Complex64::new(tr, 0.0)))
        .unwrap_or_else(|_| DensityMatrix::maximally_mixed(n))
}

/// `max_ρ S(ρ, ω₀) − α t ρ(Σ^t)`: the objective at the Gibbs maximizer, plus
/// `trials` seeded mixtures of it with random states for comparison.
pub fn variational_max(
    sys: &QuantumSystem,
    alpha: f64,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<VariationalOutcome> {
    let eval = FunctionalEvaluator::new(sys, t);
    let maximizer = eval.gibbs_maximizer(alpha)?;
    let value = variational_objective(sys, &maximizer, alpha, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_perturbed = f64::NEG_INFINITY;
    for k in 0..trials {
        let mix = [0.5, 0.1, 1e-2, 1e-3][k % 4];
        let noise = random_density(sys.dim(), &mut rng);
        let mixed = HermitianOperator::symmetrized(
            maximizer.matrix() * num_complex::Complex64::new(1.0 - mix, 0.0)
                + noise.matrix() * num_complex::Complex64::new(mix, 0.0),
        );
        let candidate = DensityMatrix::new(mixed)?;
        best_perturbed = best_perturbed.max(variational_objective(sys, &candidate, alpha, t)?);
    }
    Ok(VariationalOutcome {
        value,
        maximizer,
        best_perturbed,
    })
}

/// Araki–Masuda norm `‖A‖_p = (tr |A ω₀^{1/p}|^p)^{1/p}`.
pub fn araki_masuda_norm(a: &OperatorSpaceElement, sys: &QuantumSystem, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must be a finite real >= 1, got {p}")));
    }
    if a.nrows() != sys.dim() || a.ncols() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: a.nrows(),
        });
    }
    let x = a * sys.reference_state().power(1.0 / p).matrix();
    let s = x.singular_values();
    Ok(s.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// `U_q(t)A = A_{−t} e^{−S_{−t}/q} e^{S₀/q} = A_{−t} ω_t^{1/q} ω₀^{−1/q}` for
/// any nonzero real index `q`.
fn transfer_apply_index(sys: &QuantumSystem, q: f64, a: &OperatorSpaceElement, t: f64) -> OperatorSpaceElement {
    let omega_t = schrodinger_evolve(sys, sys.reference_state(), t);
    heisenberg_evolve_matrix(sys, a, -t)
        * omega_t.power(1.0 / q).matrix()
        * sys.reference_state().power(-1.0 / q).matrix()
}

/// Quantum transfer operator `U_p(t)A = A_{−t} e^{−S_{−t}/p} e^{S₀/p}`.
pub fn transfer_apply(
    sys: &QuantumSystem,
    p: f64,
    a: &OperatorSpaceElement,
    t: f64,
) -> Result<OperatorSpaceElement> {
    if !(p >= 1.0) {
        return Err(Error::param("p", format!("must be >= 1, got {p}")));
    }
    if a.nrows() != sys.dim() || a.ncols() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: a.nrows(),
        });
    }
    Ok(transfer_apply_index(sys, p, a, t))
}

/// `log ‖U_{p/α}(t) 𝟙‖_p^p`.
///
/// The transfer index `p/α` may be any nonzero real here (negative for
/// `α < 0`); the operator is still well defined. The result equals
/// `e_{p,t}(1−α)` for every system, which is `e_{p,t}(α)` under time
/// reversal invariance.
///
/// With `q = p/α`, `U_q(t)𝟙 ω₀^{1/p} = ω_t^{α/p} ω₀^{(1−α)/p}`; its singular
/// values are taken in the eigenbasis of `ω₀`, where the two powers become
/// diagonal scalings of `V* e^{itH} V`. This is the same quantity as
/// [`araki_masuda_norm`] of [`transfer_apply`], without the cancellation
/// between `ω₀^{−α/p}` and `ω₀^{1/p}`.
pub fn transfer_functional(sys: &QuantumSystem, p: f64, alpha: f64, t: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must be a finite real >= 1, got {p}")));
    }
    if alpha == 0.0 {
        return Err(Error::param("alpha", "transfer index p/alpha undefined at alpha = 0"));
    }
    let spectrum = sys.reference_state().spectrum();
    let (v, d) = (&spectrum.eigenvectors, &spectrum.eigenvalues);
    let y = v.adjoint() * sys.propagator(-t) * v;
    let (left, right) = (alpha / p, (1.0 - alpha) / p);
    let n = d.len();
    let x = CMatrix::from_fn(n, n, |i, j| y[(i, j)] * (left * d[i].ln() + right * d[j].ln()).exp());
    let logs: Vec<f64> = x.singular_values().iter().map(|s| p * s.max(EIGEN_FLOOR).ln()).collect();
    Ok(log_sum_exp(&logs))
}

/// `⟨A, B⟩ = tr(A* B)`.
pub fn inner_product(a: &OperatorSpaceElement, b: &OperatorSpaceElement) -> num_complex::Complex64 {
    trace_product(&a.adjoint(), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, max_abs, pauli_x};
    use std::f64::consts::FRAC_PI_2;

    fn qubit() -> QuantumSystem {
        let h = HermitianOperator::new(pauli_x()).unwrap();
        let w = DensityMatrix::from_matrix(diag(&[0.75, 0.25])).unwrap();
        QuantumSystem::new(h, w, true).unwrap()
    }

    #[test]
    fn p_index_ordering_and_display() {
        let mut ps = vec![PIndex::Infinite, PIndex::Finite(3.0), PIndex::Finite(1.0)];
        ps.sort();
        assert_eq!(ps, vec![PIndex::Finite(1.0), PIndex::Finite(3.0), PIndex::Infinite]);
        assert_eq!(PIndex::Infinite.to_string(), "inf");
        assert!(PIndex::finite(0.5).is_err());
        assert_eq!(default_alpha_grid().len(), 61);
        assert_eq!(default_alpha_grid()[30], 0.5);
    }

    #[test]
    fn endpoints_vanish() {
        let sys = qubit();
        for p in default_p_grid() {
            for &t in &[0.5, 1.0, FRAC_PI_2] {
                assert!(functional(&sys, p, 0.0, t).unwrap().abs() < 1e-13);
                assert!(functional(&sys, p, 1.0, t).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn qubit_closed_form() {
        let sys = qubit();
        let v = functional(&sys, PIndex::Finite(2.0), 0.5, FRAC_PI_2).unwrap();
        let expected = (3f64.sqrt() / 2.0).ln();
        assert!((v - expected).abs() < 1e-14);
        assert!((expected + 0.143841).abs() < 1e-6);
        assert!((renyi_bridge_check(&sys, 0.5, FRAC_PI_2).unwrap() - expected).abs() < 1e-14);
        assert!((transfer_functional(&sys, 2.0, 0.5, FRAC_PI_2).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn commuting_system_is_flat() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 3.0]);
        let w = DensityMatrix::gibbs(&HermitianOperator::from_real_diagonal(&[0.3, -0.2, 1.0]), 1.0).unwrap();
        let sys = QuantumSystem::new(h, w, true).unwrap();
        for p in default_p_grid() {
            for &a in &[-1.0, 0.3, 2.0] {
                assert!(functional(&sys, p, a, 1.7).unwrap().abs() < 1e-12);
            }
        }
        assert!(naive_functional(&sys, 1.0, 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn variational_at_zero_is_reference_state() {
        let sys = qubit();
        let out = variational_max(&sys, 0.0, 1.0, 8, 3).unwrap();
        assert!(out.value.abs() < 1e-14);
        assert!(max_abs(&(out.maximizer.matrix() - sys.reference_state().matrix())) < 1e-14);
        assert!(out.best_perturbed <= out.value + 1e-9);
        let out = variational_max(&sys, 0.5, 1.0, 8, 3).unwrap();
        let direct = functional(&sys, PIndex::Infinite, 0.5, 1.0).unwrap();
        assert!((out.value - direct).abs() < 1e-12);
        assert!(out.best_perturbed <= out.value + 1e-9);
    }

    #[test]
    fn araki_masuda_examples() {
        let sys = qubit();
        let one = CMatrix::identity(2, 2);
        for &p in &[1.0, 2.0, 3.3] {
            assert!((araki_masuda_norm(&one, &sys, p).unwrap() - 1.0).abs() < 1e-14);
        }
        let u = sys.propagator(0.77);
        assert!((araki_masuda_norm(&u, &sys, 2.0).unwrap() - 1.0).abs() < 1e-14);
        let a = diag(&[2.0, 0.0]);
        assert!((araki_masuda_norm(&a, &sys, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!(araki_masuda_norm(&a, &sys, 0.9).is_err());
    }

    #[test]
    fn transfer_identity_at_zero_time() {
        let sys = qubit();
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(-0.5), c(0.25)]);
        let u = transfer_apply(&sys, 2.0, &a, 0.0).unwrap();
        assert!(max_abs(&(u - &a)) < 1e-14);
        assert!(transfer_apply(&sys, 0.5, &a, 1.0).is_err());
        assert!(transfer_functional(&sys, 2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn value_matches_explicit_bracket() {
        let sys = crate::models::random_system(4, false, 9, 1.0).unwrap();
        let eval = FunctionalEvaluator::new(&sys, 0.8);
        for &p in &[1.0, 2.0, 5.0] {
            for &alpha in &[-0.5, 0.3, 1.7] {
                let lambdas = eig(&eval.bracket(p, alpha)).eigenvalues;
                let direct = lambdas.iter().map(|l| l.powf(p / 2.0)).sum::<f64>().ln();
                let v = eval.value(PIndex::Finite(p), alpha).unwrap();
                assert!((v - direct).abs() < 1e-11, "p={p} alpha={alpha}: {v} vs {direct}");
            }
        }
    }

    #[test]
    fn transfer_functional_matches_operator_path() {
        let sys = crate::models::random_system(3, false, 4, 1.0).unwrap();
        let one = CMatrix::identity(3, 3);
        for &(p, alpha) in &[(1.0, 0.4), (2.0, -0.7), (3.0, 1.6)] {
            let u = transfer_apply_index(&sys, p / alpha, &one, 0.9);
            let generic = p * araki_masuda_norm(&u, &sys, p).unwrap().ln();
            let v = transfer_functional(&sys, p, alpha, 0.9).unwrap();
            assert!((v - generic).abs() < 1e-11, "{v} vs {generic}");
        }
    }
}
