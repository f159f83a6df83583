// SPDX-License-Identifier: Apache-2.0

//! Full counting statistics of the entropy observable under the two-time
//! measurement protocol, and the relative modular operator whose spectral
//! measure reproduces it.

use crate::error::{Error, Result};
use crate::linalg::{eig, max_abs, trace_product, CMatrix, HermitianOperator};
use crate::measure::{SpectralMeasure, ATOM_TOL};
use crate::quantum::{entropy_observable, schrodinger_evolve, QuantumSystem};

/// Default relative tolerance for grouping eigenvalues.
pub const RESOLUTION_TOL: f64 = 1e-10;

/// Spectral projections `A = Σ_λ λ P_λ`.
#[derive(Debug, Clone)]
pub struct ProjectionFamily {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<HermitianOperator>,
}

impl ProjectionFamily {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| p.trace().round() as usize).collect()
    }

    /// Worst violation of idempotence, self-adjointness, completeness and
    /// mutual orthogonality.
    pub fn invariant_residual(&self) -> f64 {
        let n = self.projectors.first().map_or(0, |p| p.dim());
        let mut worst: f64 = 0.0;
        let mut sum = CMatrix::zeros(n, n);
        for (k, p) in self.projectors.iter().enumerate() {
            let m = p.matrix();
            worst = worst.max(max_abs(&(m * m - m)));
            worst = worst.max(max_abs(&(m - m.adjoint())));
            for q in &self.projectors[k + 1..] {
                worst = worst.max(max_abs(&(m * q.matrix())));
            }
            sum += m;
        }
        worst.max(max_abs(&(sum - CMatrix::identity(n, n))))
    }
}

/// Groups eigenvalues whose distance to the first member of their cluster is
/// at most `tol · max(1, |λ|)` and builds one projector per cluster.
pub fn spectral_resolution(a: &HermitianOperator, tol: f64) -> Result<ProjectionFamily> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let dec = eig(a);
    let n = dec.dim();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut k = 0;
    while k < n {
        let anchor = dec.eigenvalues[k];
        let mut j = k;
        let mut proj = CMatrix::zeros(n, n);
        let mut sum = 0.0;
        while j < n && dec.eigenvalues[j] - anchor <= tol * anchor.abs().max(1.0) {
            let v = dec.column(j);
            proj += &v * v.adjoint();
            sum += dec.eigenvalues[j];
            j += 1;
        }
        eigenvalues.push(sum / (j - k) as f64);
        projectors.push(HermitianOperator::symmetrized(proj));
        k = j;
    }
    Ok(ProjectionFamily {
        eigenvalues,
        projectors,
    })
}

fn positive_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    Ok(())
}

/// `ℙ_t(φ) = Σ_{λ′−λ = tφ} tr(e^{−itH} ω₀ P_λ e^{itH} P_{λ′})`, where `P_λ`
/// resolves the entropy observable `S₀`.
pub fn fcs_distribution(sys: &QuantumSystem, t: f64) -> Result<SpectralMeasure> {
    positive_time(t)?;
    let family = spectral_resolution(&entropy_observable(sys), RESOLUTION_TOL)?;
    let u = sys.propagator(t);
    let mut points = Vec::with_capacity(family.len() * family.len());
    for (lambda, p) in family.eigenvalues.iter().zip(&family.projectors) {
        // ω₀ P_λ = e^{−λ} P_λ; the scalar keeps tiny weights accurate
        let evolved = &u * p.matrix() * u.adjoint();
        for (lambda_next, q) in family.eigenvalues.iter().zip(&family.projectors) {
            let weight = (-lambda).exp() * trace_product(&evolved, q.matrix()).re;
            points.push(((lambda_next - lambda) / t, weight));
        }
    }
    SpectralMeasure::from_points(points, ATOM_TOL)
}

/// `log Σ_φ e^{−tαφ} ℙ_t(φ)`.
pub fn fcs_cgf(measure: &SpectralMeasure, alpha: f64, t: f64) -> Result<f64> {
    measure.cgf(alpha, t)
}

/// `Δ_{ω_t|ω₀}(A) = ω_t A ω₀^{−1}`.
pub fn relative_modular_apply(sys: &QuantumSystem, t: f64, a: &CMatrix) -> CMatrix {
    let omega_t = schrodinger_evolve(sys, sys.reference_state(), t);
    omega_t.matrix() * a * sys.reference_state().power(-1.0).matrix()
}

/// Spectral measure `Q_t` of `−t^{−1} log Δ_{ω_t|ω₀}` in the vector `ω₀^{1/2}`.
///
/// `Δ` has eigen-operators `|e_i⟩⟨f_j|` with eigenvalues `μ_i/ν_j`, where
/// `(μ_i, e_i)` diagonalize `ω_t` and `(ν_j, f_j)` diagonalize `ω₀`. The
/// weight of `s_ij = −t^{−1} log(μ_i/ν_j)` is `ν_j |⟨e_i, f_j⟩|²`.
pub fn modular_spectral_measure(sys: &QuantumSystem, t: f64) -> Result<SpectralMeasure> {
    positive_time(t)?;
    let omega0 = sys.reference_state();
    let omega_t = schrodinger_evolve(sys, omega0, t);
    let nu = &omega0.spectrum().eigenvalues;
    let mu = &omega_t.spectrum().eigenvalues;
    let overlaps = omega_t.spectrum().eigenvectors.adjoint() * &omega0.spectrum().eigenvectors;
    let mut points = Vec::with_capacity(nu.len() * mu.len());
    for (i, &m) in mu.iter().enumerate() {
        for (j, &v) in nu.iter().enumerate() {
            points.push((-(m / v).ln() / t, v * overlaps[(i, j)].norm_sqr()));
        }
    }
    SpectralMeasure::from_points(points, ATOM_TOL)
}

/// Total-variation distance between `ℙ_t` and `Q_t`.
pub fn fcs_modular_distance(sys: &QuantumSystem, t: f64) -> Result<f64> {
    let p = fcs_distribution(sys, t)?;
    let q = modular_spectral_measure(sys, t)?;
    Ok(p.total_variation(&q, ATOM_TOL))
}
