// SPDX-License-Identifier: Apache-2.0

//! Finite atomic measures on the real line.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance used to merge nearby atoms.
pub const ATOM_TOL: f64 = 1e-10;
/// Aggregated weights below this are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Raw weights down to `-NEGATIVE_SLACK` are rounding noise and clamp to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// A finite list of `(value, weight)` atoms with strictly increasing values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    total: f64,
}

impl SpectralMeasure {
    /// Bins raw points: values closer than `tol` to the first value of a
    /// cluster are merged, their weights summed.
    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>, tol: f64) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = points.into_iter().collect();
        for &(v, w) in &raw {
            if !v.is_finite() || !w.is_finite() {
                return Err(Error::Domain(format!("non-finite atom ({v}, {w})")));
            }
            if w < -NEGATIVE_SLACK {
                return Err(Error::Domain(format!("negative weight {w:e} at atom {v}")));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut atoms = Vec::new();
        let mut i = 0;
        while i < raw.len() {
            let anchor = raw[i].0;
            let mut j = i;
            let mut weight = 0.0;
            let mut value_sum = 0.0;
            while j < raw.len() && raw[j].0 - anchor <= tol {
                weight += raw[j].1.max(0.0);
                value_sum += raw[j].0;
                j += 1;
            }
            if weight >= WEIGHT_FLOOR {
                atoms.push((value_sum / (j - i) as f64, weight));
            }
            i = j;
        }
        let total = atoms.iter().map(|a| a.1).sum();
        Ok(SpectralMeasure { atoms, total })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_at(&self, value: f64, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.0 - value).abs() <= tol)
            .map(|a| a.1)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, w)| v * w).sum::<f64>() / self.total
    }

    /// `log Σ_s e^{−α t s} w(s)`, evaluated with a shifted log-sum-exp.
    pub fn cgf(&self, alpha: f64, t: f64) -> Result<f64> {
        if self.atoms.is_empty() {
            return Err(Error::Domain("cumulant generating function of an empty measure".into()));
        }
        let exponents: Vec<f64> = self
            .atoms
            .iter()
            .map(|&(s, w)| -alpha * t * s + w.ln())
            .collect();
        Ok(log_sum_exp(&exponents))
    }

    /// Total-variation distance; atoms are matched within `tol`, unmatched
    /// atoms contribute their full weight.
    pub fn total_variation(&self, other: &SpectralMeasure, tol: f64) -> f64 {
        let (a, b) = (&self.atoms, &other.atoms);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if (x.0 - y.0).abs() <= tol => {
                    acc += (x.1 - y.1).abs();
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    acc += x.1;
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    acc += y.1;
                    j += 1;
                }
                (Some(x), None) => {
                    acc += x.1;
                    i += 1;
                }
                (None, Some(y)) => {
                    acc += y.1;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        0.5 * acc
    }

    /// Largest deviation from `P(−s) = e^{−ts} P(s)` over the positive atoms.
    pub fn fluctuation_residual(&self, t: f64, tol: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &(s, w) in &self.atoms {
            if s > tol {
                let mirrored = self.weight_at(-s, tol);
                worst = worst.max((mirrored - (-t * s).exp() * w).abs());
            } else if s < -tol && self.weight_at(-s, tol) == 0.0 {
                // a negative atom with no positive partner
                worst = worst.max(w);
            }
        }
        worst
    }

    /// The measure `s ↦ e^{ts} P(−s)`.
    pub fn reflected_tilt(&self, t: f64) -> SpectralMeasure {
        let mut atoms: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|&(s, w)| (-s, w * (-t * s).exp()))
            .collect();
        atoms.reverse();
        let total = atoms.iter().map(|a| a.1).sum();
        SpectralMeasure { atoms, total }
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
