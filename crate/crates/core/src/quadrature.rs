// SPDX-License-Identifier: Apache-2.0

//! Adaptive Simpson quadrature for matrix-valued integrands.

use crate::linalg::{c, max_abs, CMatrix};

const MAX_DEPTH: u32 = 40;

/// `∫_a^b f(s) ds` with an absolute error target `tol` per matrix entry.
pub fn integrate(f: &impl Fn(f64) -> CMatrix, a: f64, b: f64, tol: f64) -> CMatrix {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, &fa, &fm, &fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: &CMatrix, fm: &CMatrix, fb: &CMatrix) -> CMatrix {
    (fa + fm * c(4.0) + fb) * c((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> CMatrix,
    a: f64,
    b: f64,
    fa: CMatrix,
    fm: CMatrix,
    fb: CMatrix,
    whole: CMatrix,
    tol: f64,
    depth: u32,
) -> CMatrix {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, &fa, &flm, &fm);
    let right = simpson(m, b, &fm, &frm, &fb);
    let delta = &left + &right - &whole;
    if depth == 0 || max_abs(&delta) <= 15.0 * tol {
        // Richardson correction
        return left + right + delta * c(1.0 / 15.0);
    }
    let l = refine(f, a, m, fa, flm, fm.clone(), left, 0.5 * tol, depth - 1);
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    l + r
}
