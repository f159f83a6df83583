// SPDX-License-Identifier: Apache-2.0

//! Finite classical dynamical systems under the cyclic shift
//! `φ(ζ_j) = ζ_{j+1 mod n}`, with a faithful reference state `ω₀`.
//!
//! Entropies are in nats. Time is an integer number of shifts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::measure::{log_sum_exp, SpectralMeasure, ATOM_TOL};

/// Tolerance on normalization of probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Smallest admissible probability.
pub const MIN_PROBABILITY: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalObservable(Vec<f64>);

impl ClassicalObservable {
    pub fn new(values: Vec<f64>) -> Self {
        ClassicalObservable(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ClassicalObservable(vec![value; n])
    }

    pub fn indicator(n: usize, j: usize) -> Self {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        ClassicalObservable(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        ClassicalObservable(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }
}

/// A strictly positive probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState(Vec<f64>);

impl ClassicalState {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::param("probabilities", "empty vector"));
        }
        if let Some(p) = probabilities.iter().find(|p| !(**p > MIN_PROBABILITY) || !p.is_finite()) {
            return Err(Error::NotFaithful(format!("probability {p:e} is not strictly positive")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::param("probabilities", format!("sum is {total}, expected 1")));
        }
        Ok(ClassicalState(probabilities))
    }

    /// Rescales a positive vector to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        ClassicalState(vec![1.0 / n as f64; n])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ρ(f) = Σ_ζ f(ζ) ρ(ζ)`.
    pub fn expectation(&self, f: &ClassicalObservable) -> f64 {
        self.0.iter().zip(f.values()).map(|(p, v)| p * v).sum()
    }
}

/// Phase space `ζ_0..ζ_N` with cyclic dynamics and reference state `ω₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSystem {
    reference: ClassicalState,
}

impl ClassicalSystem {
    pub fn new(reference: Vec<f64>) -> Result<Self> {
        let reference = ClassicalState::new(reference)?;
        if reference.len() < 2 {
            return Err(Error::param("reference_state", "need at least two phase points"));
        }
        Ok(ClassicalSystem { reference })
    }

    pub fn size(&self) -> usize {
        self.reference.len()
    }

    pub fn reference_state(&self) -> &ClassicalState {
        &self.reference
    }

    /// Time-reversal invariance under `θ(ζ_j) = ζ_{N−j}`.
    pub fn is_tri(&self) -> bool {
        let w = self.reference.probabilities();
        let n = w.len();
        (0..n).all(|j| (w[j] - w[n - 1 - j]).abs() <= NORMALIZATION_TOL)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                found,
            });
        }
        Ok(())
    }
}

fn shift_index(j: usize, t: i64, n: usize) -> usize {
    (j as i64 + t).rem_euclid(n as i64) as usize
}

fn positive_time(t: i64) -> Result<()> {
    if t <= 0 {
        return Err(Error::param("t", format!("must be a positive integer, got {t}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must be a finite real >= 1, got {p}")));
    }
    Ok(())
}

/// `f_t = f ∘ φ^t`.
pub fn evolve_observable(f: &ClassicalObservable, t: i64) -> ClassicalObservable {
    let n = f.len();
    ClassicalObservable((0..n).map(|j| f.0[shift_index(j, t, n)]).collect())
}

/// `ρ_t(ζ) = ρ(φ^{−t} ζ)`, so that `ρ_t(f) = ρ(f_t)`.
pub fn evolve_state(rho: &ClassicalState, t: i64) -> ClassicalState {
    let n = rho.len();
    ClassicalState((0..n).map(|j| rho.0[shift_index(j, -t, n)]).collect())
}

fn same_size(rho: &ClassicalState, nu: &ClassicalState) -> Result<()> {
    if rho.len() != nu.len() {
        return Err(Error::DimensionMismatch {
            expected: rho.len(),
            found: nu.len(),
        });
    }
    Ok(())
}

/// `S(ρ, ν) = Σ ρ log(ν/ρ) ≤ 0`.
pub fn relative_entropy(rho: &ClassicalState, nu: &ClassicalState) -> Result<f64> {
    same_size(rho, nu)?;
    Ok(rho.0.iter().zip(&nu.0).map(|(r, v)| r * (v / r).ln()).sum())
}

/// `S_α(ρ, ν) = log Σ ρ^{1−α} ν^α`.
pub fn renyi_entropy(rho: &ClassicalState, nu: &ClassicalState, alpha: f64) -> Result<f64> {
    same_size(rho, nu)?;
    let terms: Vec<f64> = rho
        .0
        .iter()
        .zip(&nu.0)
        .map(|(r, v)| (1.0 - alpha) * r.ln() + alpha * v.ln())
        .collect();
    Ok(log_sum_exp(&terms))
}

/// `S₀ = −log ω₀`.
pub fn entropy_observable(sys: &ClassicalSystem) -> ClassicalObservable {
    ClassicalObservable(sys.reference.0.iter().map(|w| -w.ln()).collect())
}

/// One-step entropy production `σ = S₀ − S_{−1} = log(ω₁/ω₀)`, the backward
/// difference of the entropy observable, so that
/// `Σ^t = t^{−1} Σ_{s=1}^{t} σ_s` holds exactly.
pub fn entropy_production_observable(sys: &ClassicalSystem) -> ClassicalObservable {
    let s0 = entropy_observable(sys);
    let s_prev = evolve_observable(&s0, -1);
    s0.zip_with(&s_prev, |a, b| a - b)
}

/// Mean entropy production rate `Σ^t = (S_t − S₀)/t`.
pub fn mean_ep_observable(sys: &ClassicalSystem, t: i64) -> Result<ClassicalObservable> {
    positive_time(t)?;
    let s0 = entropy_observable(sys);
    let st = evolve_observable(&s0, t);
    Ok(st.zip_with(&s0, |a, b| (a - b) / t as f64))
}

/// Max pointwise gap between `(S_t − S₀)/t` and the time average of `σ_s`.
pub fn mean_ep_consistency(sys: &ClassicalSystem, t: i64) -> Result<f64> {
    let direct = mean_ep_observable(sys, t)?;
    let sigma = entropy_production_observable(sys);
    let mut acc = vec![0.0; sys.size()];
    for s in 1..=t {
        for (a, v) in acc.iter_mut().zip(evolve_observable(&sigma, s).values()) {
            *a += v;
        }
    }
    let averaged = ClassicalObservable(acc.into_iter().map(|a| a / t as f64).collect());
    Ok(direct.max_abs_diff(&averaged))
}

/// `e_t(α) = log ω₀(e^{−α t Σ^t})`.
pub fn classical_functional(sys: &ClassicalSystem, alpha: f64, t: i64) -> Result<f64> {
    let sigma = mean_ep_observable(sys, t)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let tf = t as f64;
    let terms: Vec<f64> = sys
        .reference
        .0
        .iter()
        .zip(sigma.values())
        .map(|(w, s)| w.ln() - alpha * tf * s)
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Distribution `p^t(λ) = ω₀{ζ : Σ^t(ζ) = λ}`.
pub fn es_distribution(sys: &ClassicalSystem, t: i64) -> Result<SpectralMeasure> {
    let sigma = mean_ep_observable(sys, t)?;
    SpectralMeasure::from_points(
        sigma.values().iter().copied().zip(sys.reference.0.iter().copied()),
        ATOM_TOL,
    )
}

/// Result of the variational evaluation.
#[derive(Debug, Clone)]
pub struct VariationalOutcome {
    /// Objective at the Gibbs-type maximizer.
    pub value: f64,
    pub maximizer: ClassicalState,
    /// Largest objective over the random perturbations.
    pub best_perturbed: f64,
}

/// Objective `S(ρ, ω₀) − α t ρ(Σ^t)`.
pub fn variational_objective(
    sys: &ClassicalSystem,
    rho: &ClassicalState,
    alpha: f64,
    t: i64,
) -> Result<f64> {
    let sigma = mean_ep_observable(sys, t)?;
    Ok(relative_entropy(rho, &sys.reference)? - alpha * t as f64 * rho.expectation(&sigma))
}

/// `max_ρ S(ρ, ω₀) − α t ρ(Σ^t)`, attained at `ρ* ∝ ω₀ e^{−α t Σ^t}`.
///
/// The objective is also evaluated at `trials` seeded perturbations of `ρ*`
/// (convex mixtures with flat-Dirichlet samples) and the best one reported.
pub fn variational_functional(
    sys: &ClassicalSystem,
    alpha: f64,
    t: i64,
    trials: usize,
    seed: u64,
) -> Result<VariationalOutcome> {
    let sigma = mean_ep_observable(sys, t)?;
    let tf = t as f64;
    let log_weights: Vec<f64> = sys
        .reference
        .0
        .iter()
        .zip(sigma.values())
        .map(|(w, s)| w.ln() - alpha * tf * s)
        .collect();
    let log_z = log_sum_exp(&log_weights);
    let maximizer = ClassicalState::normalized(log_weights.iter().map(|l| (l - log_z).exp()).collect())?;
    let value = variational_objective(sys, &maximizer, alpha, t)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_perturbed = f64::NEG_INFINITY;
    for k in 0..trials {
        let mix = [0.5, 0.1, 1e-2, 1e-3][k % 4];
        let draws: Vec<f64> = (0..sys.size()).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = draws.iter().sum();
        let candidate: Vec<f64> = maximizer
            .0
            .iter()
            .zip(&draws)
            .map(|(m, d)| (1.0 - mix) * m + mix * d / total)
            .collect();
        let candidate = ClassicalState::normalized(candidate)?;
        best_perturbed = best_perturbed.max(variational_objective(sys, &candidate, alpha, t)?);
    }
    Ok(VariationalOutcome {
        value,
        maximizer,
        best_perturbed,
    })
}

/// `S_α(ω_t, ω₀)`.
pub fn renyi_identity_check(sys: &ClassicalSystem, alpha: f64, t: i64) -> Result<f64> {
    positive_time(t)?;
    let omega_t = evolve_state(&sys.reference, t);
    renyi_entropy(&omega_t, &sys.reference, alpha)
}

/// `‖f‖_p = (Σ |f|^p ω₀)^{1/p}`.
pub fn lp_norm(sys: &ClassicalSystem, f: &ClassicalObservable, p: f64) -> Result<f64> {
    check_p(p)?;
    sys.check_len(f.len())?;
    Ok(f.values()
        .iter()
        .zip(&sys.reference.0)
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p))
}

/// Transfer operator `U_p(t) f = f_{−t} e^{−S_{−t}/p} e^{S₀/p}`.
pub fn classical_transfer_apply(
    sys: &ClassicalSystem,
    p: f64,
    f: &ClassicalObservable,
    t: i64,
) -> Result<ClassicalObservable> {
    check_p(p)?;
    sys.check_len(f.len())?;
    Ok(transfer_apply_index(sys, p, f, t))
}

/// `U_q(t)` for any nonzero real index `q`.
fn transfer_apply_index(sys: &ClassicalSystem, q: f64, f: &ClassicalObservable, t: i64) -> ClassicalObservable {
    let s0 = entropy_observable(sys);
    let s_back = evolve_observable(&s0, -t);
    let weight = s_back.zip_with(&s0, |sb, s| ((s - sb) / q).exp());
    evolve_observable(f, -t).mul(&weight)
}

/// `log ‖U_{p/α}(t) 𝟏‖_p^p`. The index `p/α` may be any nonzero real.
///
/// Equals `e_t(1−α)` for every system, hence `e_t(α)` when the system is
/// time-reversal invariant.
pub fn classical_transfer_functional(sys: &ClassicalSystem, p: f64, alpha: f64, t: i64) -> Result<f64> {
    check_p(p)?;
    positive_time(t)?;
    if alpha == 0.0 {
        return Err(Error::param("alpha", "transfer index p/alpha undefined at alpha = 0"));
    }
    let one = ClassicalObservable::constant(sys.size(), 1.0);
    let u = transfer_apply_index(sys, p / alpha, &one, t);
    Ok(p * lp_norm(sys, &u, p)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_point() -> ClassicalSystem {
        ClassicalSystem::new(vec![0.25, 0.5, 0.25]).unwrap()
    }

    #[test]
    fn observable_shift() {
        let f = ClassicalObservable::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(evolve_observable(&f, 0), f);
        assert_eq!(evolve_observable(&f, 1).values(), &[2.0, 3.0, 1.0]);
        assert_eq!(evolve_observable(&f, 3), f);
        assert_eq!(evolve_observable(&f, -1).values(), &[3.0, 1.0, 2.0]);
    }

    #[test]
    fn state_shift_is_dual_to_observable_shift() {
        let rho = ClassicalState::new(vec![0.25, 0.5, 0.25]).unwrap();
        let rho1 = evolve_state(&rho, 1);
        for j in 0..3 {
            let f = ClassicalObservable::indicator(3, j);
            assert_eq!(rho1.expectation(&f), rho.expectation(&evolve_observable(&f, 1)));
        }
        assert_eq!(rho1.probabilities(), &[0.25, 0.25, 0.5]);
        let u = ClassicalState::uniform(5);
        assert_eq!(evolve_state(&u, 3), u);
    }

    #[test]
    fn relative_entropy_values() {
        let rho = ClassicalState::new(vec![0.5, 0.5]).unwrap();
        let nu = ClassicalState::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0);
        let expected = 0.5 * 0.5f64.ln() + 0.5 * 1.5f64.ln();
        assert!((relative_entropy(&rho, &nu).unwrap() - expected).abs() < 1e-15);
        assert!((expected + 0.143841).abs() < 1e-6);
        let three = ClassicalState::uniform(3);
        assert!(matches!(relative_entropy(&rho, &three), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn renyi_values() {
        let rho = ClassicalState::new(vec![0.5, 0.5]).unwrap();
        let nu = ClassicalState::new(vec![0.25, 0.75]).unwrap();
        assert!(renyi_entropy(&rho, &nu, 0.0).unwrap().abs() < 1e-15);
        assert!(renyi_entropy(&rho, &nu, 1.0).unwrap().abs() < 1e-15);
        let expected = ((1.0f64 / 8.0).sqrt() + (3.0f64 / 8.0).sqrt()).ln();
        assert!((renyi_entropy(&rho, &nu, 0.5).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn entropy_observables() {
        let sys = three_point();
        let s0 = entropy_observable(&sys);
        let expected = [4f64.ln(), 2f64.ln(), 4f64.ln()];
        assert!(s0.max_abs_diff(&ClassicalObservable::new(expected.to_vec())) < 1e-15);
        let shannon = -sys.reference_state().probabilities().iter().map(|p| p * p.ln()).sum::<f64>();
        assert!((sys.reference_state().expectation(&s0) - shannon).abs() < 1e-15);
    }

    #[test]
    fn mean_ep_three_point() {
        let sys = three_point();
        let sigma = mean_ep_observable(&sys, 1).unwrap();
        let l2 = 2f64.ln();
        assert!(sigma.max_abs_diff(&ClassicalObservable::new(vec![-l2, l2, 0.0])) < 1e-15);
        assert!(mean_ep_consistency(&sys, 1).unwrap() < 1e-12);
        assert!(mean_ep_consistency(&sys, 7).unwrap() < 1e-12);
        // second law identity
        for t in 1..5 {
            let mean = sys.reference_state().expectation(&mean_ep_observable(&sys, t).unwrap());
            let rel = relative_entropy(&evolve_state(sys.reference_state(), t), sys.reference_state()).unwrap();
            assert!((mean + rel / t as f64).abs() < 1e-12);
            assert!(mean >= 0.0);
        }
        assert!(mean_ep_observable(&sys, 0).is_err());
    }

    #[test]
    fn uniform_has_no_entropy_production() {
        let sys = ClassicalSystem::new(vec![0.25; 4]).unwrap();
        let sigma = mean_ep_observable(&sys, 3).unwrap();
        assert!(sigma.values().iter().all(|v| v.abs() < 1e-15));
        let es = es_distribution(&sys, 3).unwrap();
        assert_eq!(es.len(), 1);
        assert!(es.atoms()[0].0.abs() < 1e-15);
        assert!((es.atoms()[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn functional_three_point() {
        let sys = three_point();
        assert_eq!(classical_functional(&sys, 0.0, 1).unwrap(), 0.0);
        assert!(classical_functional(&sys, 1.0, 1).unwrap().abs() < 1e-15);
        // 3-term oracle: log((1/4)2^α + (1/2)2^{−α} + 1/4)
        let oracle = |a: f64| (0.25 * 2f64.powf(a) + 0.5 * 2f64.powf(-a) + 0.25).ln();
        for &a in &[-1.0, -0.3, 0.5, 0.8, 2.0] {
            assert!((classical_functional(&sys, a, 1).unwrap() - oracle(a)).abs() < 1e-15);
        }
        let half = (0.25 + 2f64.sqrt() / 2.0).ln();
        assert!((classical_functional(&sys, 0.5, 1).unwrap() - half).abs() < 1e-15);
    }

    #[test]
    fn es_distribution_three_point() {
        let sys = three_point();
        let es = es_distribution(&sys, 1).unwrap();
        let l2 = 2f64.ln();
        assert_eq!(es.len(), 3);
        assert!((es.weight_at(-l2, 1e-12) - 0.25).abs() < 1e-15);
        assert!((es.weight_at(0.0, 1e-12) - 0.25).abs() < 1e-15);
        assert!((es.weight_at(l2, 1e-12) - 0.5).abs() < 1e-15);
        assert!(es.fluctuation_residual(1.0, ATOM_TOL) < 1e-15);
    }

    #[test]
    fn variational_three_point() {
        let sys = three_point();
        let zero = variational_functional(&sys, 0.0, 1, 10, 7).unwrap();
        assert!(zero.value.abs() < 1e-15);
        assert_eq!(zero.maximizer.probabilities(), sys.reference_state().probabilities());
        let out = variational_functional(&sys, 0.5, 1, 12, 7).unwrap();
        assert!((out.value - classical_functional(&sys, 0.5, 1).unwrap()).abs() < 1e-12);
        assert!(out.best_perturbed <= out.value + 1e-10);
    }

    #[test]
    fn renyi_identity_three_point() {
        let sys = three_point();
        assert!(renyi_identity_check(&sys, 0.0, 1).unwrap().abs() < 1e-15);
        assert!(renyi_identity_check(&sys, 1.0, 1).unwrap().abs() < 1e-15);
        let e = classical_functional(&sys, 0.5, 1).unwrap();
        assert!((renyi_identity_check(&sys, 0.5, 1).unwrap() - e).abs() < 1e-12);
    }

    #[test]
    fn transfer_operator_basics() {
        let sys = three_point();
        let f = ClassicalObservable::new(vec![0.3, -1.2, 2.0]);
        assert!(classical_transfer_apply(&sys, 2.0, &f, 0).unwrap().max_abs_diff(&f) < 1e-15);
        let one = ClassicalObservable::constant(3, 1.0);
        for t in -4..5 {
            let u = classical_transfer_apply(&sys, 2.0, &one, t).unwrap();
            assert!((lp_norm(&sys, &u, 2.0).unwrap() - 1.0).abs() < 1e-15);
        }
        let e = classical_functional(&sys, 0.5, 1).unwrap();
        assert!((classical_transfer_functional(&sys, 2.0, 0.5, 1).unwrap() - e).abs() < 1e-12);
        assert!(classical_transfer_apply(&sys, 0.5, &f, 1).is_err());
        assert!(classical_transfer_functional(&sys, 2.0, 0.0, 1).is_err());
    }

    #[test]
    fn transfer_group_law_and_intertwining() {
        let sys = ClassicalSystem::new(vec![0.1, 0.3, 0.15, 0.25, 0.2]).unwrap();
        let f = ClassicalObservable::new(vec![1.0, -2.0, 0.5, 3.0, 0.1]);
        let g = ClassicalObservable::new(vec![0.7, 0.2, -1.5, 1.0, 2.2]);
        for &p in &[1.0, 2.0, 3.5] {
            let lhs = classical_transfer_apply(&sys, p, &f, 5).unwrap();
            let rhs = classical_transfer_apply(
                &sys,
                p,
                &classical_transfer_apply(&sys, p, &f, 3).unwrap(),
                2,
            )
            .unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);

            let inner = f.mul(&classical_transfer_apply(&sys, p, &g, 2).unwrap());
            let conj = classical_transfer_apply(&sys, p, &inner, -2).unwrap();
            assert!(conj.max_abs_diff(&evolve_observable(&f, 2).mul(&g)) < 1e-12);

            let norm = lp_norm(&sys, &classical_transfer_apply(&sys, p, &f, 3).unwrap(), p).unwrap();
            assert!((norm - lp_norm(&sys, &f, p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn tri_detection() {
        assert!(three_point().is_tri());
        assert!(!ClassicalSystem::new(vec![0.1, 0.3, 0.6]).unwrap().is_tri());
        assert!(ClassicalSystem::new(vec![0.5, 0.6]).is_err());
        assert!(ClassicalSystem::new(vec![1.0, 0.0]).is_err());
    }
}
