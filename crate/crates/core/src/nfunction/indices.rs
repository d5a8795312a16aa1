//! Matuszewska–Orlicz indices from the dilation function `h(t) = sup_s φ(ts)/φ(s)`.
//!
//! The sup is taken in log coordinates, `ln h(t) = sup_u [L(u + ln t) - L(u)]`
//! with `L(u) = ln φ(e^u)`, and the exponents at `t → 0` and `t → ∞` are
//! extrapolated linearly in `1 / ln t` from two evaluation points.

use super::{Family, NFunction};

/// `u = ln s` range for the indices at infinity.
const FAR_U: f64 = 1e6;
const FAR_POINTS: usize = 400;
const MID_LO: f64 = 1e-8;
const MID_HI: f64 = 1e8;
const MID_POINTS: usize = 400;
const SMALL_T: [f64; 2] = [1e-5, 1e-6];
const LARGE_T: [f64; 2] = [1e5, 1e6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexScope {
    /// Sup over large `s` only: the indices that govern `L^φ` on a finite
    /// measure space such as the torus.
    Infinity,
    /// Sup over all `s > 0` (a wide two-sided grid).
    Global,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub scope: IndexScope,
    /// `t` values used for the lower index.
    pub t_small: [f64; 2],
    /// `t` values used for the upper index.
    pub t_large: [f64; 2],
    /// Range of `ln s` the sup ran over.
    pub u_range: (f64, f64),
    /// Disagreement of the two raw slopes behind each estimate.
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

impl IndexEstimate {
    /// `1 ≤ α ≤ β` up to `tol`.
    pub fn is_ordered(&self, tol: f64) -> bool {
        self.alpha >= 1.0 - tol && self.alpha <= self.beta + tol
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn u_grid(nf: &NFunction, scope: IndexScope) -> Vec<f64> {
    let mid = linspace(MID_LO.ln(), MID_HI.ln(), MID_POINTS);
    if nf.family() == Family::Custom {
        // closures are only trusted where φ itself is finite
        return mid;
    }
    let far = linspace(FAR_U, 10.0 * FAR_U, FAR_POINTS);
    match scope {
        IndexScope::Infinity => far,
        IndexScope::Global => {
            let mut g: Vec<f64> = far.iter().map(|u| -u).rev().collect();
            g.extend(mid);
            g.extend(far);
            g
        }
    }
}

fn ln_h(nf: &NFunction, grid: &[f64], t: f64) -> f64 {
    let lt = t.ln();
    grid.iter()
        .map(|&u| nf.ln_eval_exp(u + lt) - nf.ln_eval_exp(u))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Two-point extrapolation of `ln h(t) / ln t` in the variable `1/ln t`.
fn extrapolate(nf: &NFunction, grid: &[f64], ts: [f64; 2]) -> (f64, f64) {
    let (l1, l2) = (ts[0].ln(), ts[1].ln());
    let (h1, h2) = (ln_h(nf, grid, ts[0]), ln_h(nf, grid, ts[1]));
    let (g1, g2) = (h1 / l1, h2 / l2);
    let value = (l1 * g1 - l2 * g2) / (l1 - l2);
    (value, (g1 - g2).abs())
}

/// Indices at infinity (see [`IndexScope::Infinity`]).
pub fn matuszewska_indices(nf: &NFunction) -> IndexEstimate {
    matuszewska_indices_in(nf, IndexScope::Infinity)
}

pub fn matuszewska_indices_in(nf: &NFunction, scope: IndexScope) -> IndexEstimate {
    let grid = u_grid(nf, scope);
    let (alpha, alpha_residual) = extrapolate(nf, &grid, SMALL_T);
    let (beta, beta_residual) = extrapolate(nf, &grid, LARGE_T);
    IndexEstimate {
        alpha,
        beta,
        scope,
        t_small: SMALL_T,
        t_large: LARGE_T,
        u_range: (grid[0], grid[grid.len() - 1]),
        alpha_residual,
        beta_residual,
    }
}
