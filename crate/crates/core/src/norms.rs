//! Luxemburg norms on the torus (`dx/2π`), on the node set with unit weights
//! (`ℓ_n^φ`) and with the uniform probability weights (`L^φ(ω_n)`).
//!
//! The continuous modular is computed by a [`TorusRule`]. Where `|f|` has no
//! deep local minimum the periodic trapezoid rule is used. Otherwise the torus
//! is cut at those minima (where `φ(|f|)` can have an algebraic kink) and
//! each piece is integrated with tanh-sinh panels, which are insensitive to
//! endpoint singularities. Either way the step is halved level by level until
//! two successive levels agree.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nfunction::NFunction;
use crate::quad;
use crate::root::{bisect, bracket_near, find_bracket, solve_monotone, Monotone};
use crate::trigpoly::TrigPoly;

/// Successive levels must agree to `MODULAR_TOL · max(1, value)`.
pub const MODULAR_TOL: f64 = 1e-11;
/// Largest number of quadrature nodes a single level may use.
pub const MAX_POINTS: usize = 1 << 22;
/// A norm is flagged unconverged when `|M(λ*) - 1|` exceeds this.
pub const RESIDUAL_TOL: f64 = 1e-8;
const NORM_REL_WIDTH: f64 = 1e-13;
const CUT_DEPTH: f64 = 0.1;
const WARM_DELTA: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormResult {
    pub value: f64,
    /// `|M(value) - 1|`; zero for the zero function.
    pub residual: f64,
    pub bracket_width: f64,
    /// Quadrature nodes (continuous) or samples (discrete) behind the value.
    pub points: usize,
    pub converged: bool,
}

impl NormResult {
    fn zero(points: usize) -> Self {
        NormResult {
            value: 0.0,
            residual: 0.0,
            bracket_width: 0.0,
            points,
            converged: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    Continuous,
    Ell,
    Omega,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::Continuous => "L_phi",
            NormKind::Ell => "ell_phi",
            NormKind::Omega => "L_phi_omega",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularResult {
    pub value: f64,
    /// Difference from the previous level.
    pub error: f64,
    pub points: usize,
}

#[derive(Clone, Debug)]
struct Level {
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl Level {
    fn modular(&self, nf: &NFunction, lambda: f64) -> f64 {
        let inv = 1.0 / lambda;
        self.weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * nf.eval(v * inv))
            .sum()
    }

    fn len(&self) -> usize {
        self.values.len()
    }
}

/// Quadrature for `(1/2π) ∫ g(|f(x)|) dx` tied to one polynomial `f`.
#[derive(Clone, Debug)]
pub struct TorusRule {
    poly: TrigPoly,
    cuts: Vec<f64>,
    base: usize,
    max_abs: f64,
    levels: Vec<Level>,
}

impl TorusRule {
    pub fn new(f: &TrigPoly) -> Self {
        let n = f.degree();
        let m = (16 * (2 * n + 1)).max(256);
        let values = f.eval_uniform(m);
        let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let cuts = if max_abs > 0.0 {
            deep_minima(f, &values, m, max_abs)
        } else {
            Vec::new()
        };
        TorusRule {
            poly: f.clone(),
            cuts,
            base: (8 * (2 * n + 1)).max(256),
            max_abs,
            levels: Vec::new(),
        }
    }

    /// Cut points in `[0, 2π)`.
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Largest `|f|` on the detection grid.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs == 0.0
    }

    fn build(&self, level: usize) -> Result<Level> {
        if self.cuts.is_empty() {
            let count = self.base << level;
            if count > MAX_POINTS {
                return Err(Error::convergence(
                    "torus quadrature",
                    format!("level {level} needs {count} points"),
                ));
            }
            let values = self.poly.eval_uniform(count).iter().map(|v| v.norm()).collect();
            return Ok(Level {
                weights: vec![1.0 / count as f64; count],
                values,
            });
        }
        let n = self.poly.degree();
        let max_len = TAU * 4.0 / (2 * n + 1) as f64;
        let mut nodes = Vec::new();
        for (i, &a) in self.cuts.iter().enumerate() {
            let b = if i + 1 < self.cuts.len() {
                self.cuts[i + 1]
            } else {
                self.cuts[0] + TAU
            };
            let pieces = ((b - a) / max_len).ceil().max(1.0) as usize;
            let step = (b - a) / pieces as f64;
            for p in 0..pieces {
                let lo = a + step * p as f64;
                let hi = if p + 1 == pieces { b } else { lo + step };
                nodes.extend(quad::rule(lo, hi, level + 1));
            }
            if nodes.len() > MAX_POINTS {
                return Err(Error::convergence(
                    "torus quadrature",
                    format!("level {level} needs more than {MAX_POINTS} points"),
                ));
            }
        }
        let (values, weights) = nodes
            .iter()
            .map(|&(x, w)| (self.poly.evaluate(x).norm(), w / TAU))
            .unzip();
        Ok(Level { weights, values })
    }

    fn ensure(&mut self, level: usize) -> Result<&Level> {
        while self.levels.len() <= level {
            let next = self.build(self.levels.len())?;
            self.levels.push(next);
        }
        Ok(&self.levels[level])
    }

    /// `(1/2π) ∫ φ(|f|/λ) dx` refined until two levels agree.
    pub fn modular(&mut self, nf: &NFunction, lambda: f64) -> Result<ModularResult> {
        if !(lambda > 0.0) {
            return Err(Error::parameter(format!("lambda must be positive, got {lambda}")));
        }
        if self.is_zero() {
            return Ok(ModularResult {
                value: 0.0,
                error: 0.0,
                points: 0,
            });
        }
        let mut prev = self.ensure(0)?.modular(nf, lambda);
        let mut level = 1;
        loop {
            let lev = self.ensure(level)?;
            let value = lev.modular(nf, lambda);
            let error = (value - prev).abs();
            if error <= MODULAR_TOL * value.max(1.0) {
                return Ok(ModularResult {
                    value,
                    error,
                    points: lev.len(),
                });
            }
            prev = value;
            level += 1;
        }
    }

    /// `‖f‖_{L^φ}`: the root of `M(λ) = 1`, re-solved on finer levels until
    /// the modular at the root no longer moves.
    pub fn norm(&mut self, nf: &NFunction) -> Result<NormResult> {
        if self.is_zero() {
            return Ok(NormResult::zero(0));
        }
        let mut guess = self.max_abs;
        let mut level = 1;
        self.ensure(0)?;
        loop {
            self.ensure(level)?;
            let lev = &self.levels[level];
            let mut m = |lam: f64| lev.modular(nf, lam);
            let (lo, hi) = if level == 1 {
                find_bracket(&mut m, 1.0, guess, Monotone::Decreasing, "luxemburg norm")?
            } else {
                bracket_near(&mut m, 1.0, guess, WARM_DELTA, Monotone::Decreasing, "luxemburg norm")?
            };
            let root = bisect(&mut m, 1.0, lo, hi, Monotone::Decreasing, NORM_REL_WIDTH, "luxemburg norm")?;
            let lambda = root.hi;
            let here = lev.modular(nf, lambda);
            let coarse = self.levels[level - 1].modular(nf, lambda);
            if (here - coarse).abs() <= MODULAR_TOL * here.max(1.0) {
                let residual = (here - 1.0).abs();
                return Ok(NormResult {
                    value: lambda,
                    residual,
                    bracket_width: root.width(),
                    points: lev.len(),
                    converged: residual <= RESIDUAL_TOL,
                });
            }
            guess = lambda;
            level += 1;
        }
    }
}

/// Local minima of `|f|` below `CUT_DEPTH · max|f|`, located by a sign
/// change of `Re(f' conj f)` on the grid and refined by bisection.
fn deep_minima(f: &TrigPoly, values: &[Complex64], m: usize, max_abs: f64) -> Vec<f64> {
    let fp = f.derivative();
    let dvals = fp.eval_uniform(m);
    let g: Vec<f64> = dvals
        .iter()
        .zip(values)
        .map(|(d, v)| (d * v.conj()).re)
        .collect();
    let slope = |x: f64| (fp.evaluate(x) * f.evaluate(x).conj()).re;
    let h = TAU / m as f64;
    let mut cuts = Vec::new();
    for j in 0..m {
        let j1 = (j + 1) % m;
        if !(g[j] < 0.0 && g[j1] >= 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (j as f64 * h, (j + 1) as f64 * h);
        if g[j1] == 0.0 {
            lo = hi;
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let z = 0.5 * (lo + hi);
        if f.evaluate(z).norm() <= CUT_DEPTH * max_abs {
            cuts.push(z.rem_euclid(TAU));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    cuts
}

/// `(1/2π) ∫ φ(|f|/λ) dx`.
pub fn continuous_modular(nf: &NFunction, f: &TrigPoly, lambda: f64) -> Result<ModularResult> {
    TorusRule::new(f).modular(nf, lambda)
}

/// `‖f‖_{L^φ}` with normalized Lebesgue measure.
pub fn luxemburg_norm_continuous(nf: &NFunction, f: &TrigPoly) -> Result<NormResult> {
    TorusRule::new(f).norm(nf)
}

/// `Σ w φ(|v|/λ)`.
pub fn discrete_modular(nf: &NFunction, samples: &[Complex64], weight: f64, lambda: f64) -> f64 {
    samples.iter().map(|v| weight * nf.eval(v.norm() / lambda)).sum()
}

fn discrete_norm(nf: &NFunction, samples: &[Complex64], weight: f64) -> Result<NormResult> {
    let abs: Vec<f64> = samples.iter().map(|v| v.norm()).collect();
    let top = abs.iter().copied().fold(0.0, f64::max);
    if !top.is_finite() {
        return Err(Error::parameter("samples must be finite"));
    }
    if top == 0.0 {
        return Ok(NormResult::zero(samples.len()));
    }
    let m = |lam: f64| abs.iter().map(|&v| weight * nf.eval(v / lam)).sum::<f64>();
    let root = solve_monotone(m, 1.0, top, Monotone::Decreasing, "discrete norm")?;
    let residual = (m(root.hi) - 1.0).abs();
    Ok(NormResult {
        value: root.hi,
        residual,
        bracket_width: root.width(),
        points: samples.len(),
        converged: residual <= RESIDUAL_TOL,
    })
}

/// `‖v‖_{ℓ_n^φ}`: root of `Σ φ(|v_k|/λ) = 1`.
pub fn discrete_norm_ln(nf: &NFunction, samples: &[Complex64]) -> Result<NormResult> {
    discrete_norm(nf, samples, 1.0)
}

/// `‖v‖_{L^φ(ω_n)}`: root of `(1/(2n+1)) Σ φ(|v_k|/λ) = 1`.
pub fn discrete_norm_omega(nf: &NFunction, samples: &[Complex64], n: usize) -> Result<NormResult> {
    if samples.len() != 2 * n + 1 {
        return Err(Error::parameter(format!(
            "omega norm of degree {n} needs {} samples, got {}",
            2 * n + 1,
            samples.len()
        )));
    }
    discrete_norm(nf, samples, 1.0 / (2 * n + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::{dirichlet, node_samples, random_poly, spike_poly, CoefficientLaw};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn modular_examples() {
        let sq = NFunction::power(2.0).unwrap();
        let f = TrigPoly::monomial(1).scale(c(2.0, 0.0));
        assert!((continuous_modular(&sq, &f, 2.0).unwrap().value - 1.0).abs() < 1e-14);
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let k = TrigPoly::constant(c(0.0, 3.0));
        let m = continuous_modular(&pl, &k, 2.0).unwrap().value;
        assert!(rel(m, pl.eval(1.5)) < 1e-14);
        for seed in 0..5 {
            let g = random_poly(12, seed, CoefficientLaw::Gaussian);
            let lam = 1.7;
            let m = continuous_modular(&sq, &g, lam).unwrap().value;
            assert!(rel(m, g.energy() / (lam * lam)) < 1e-11);
        }
    }

    #[test]
    fn dirichlet_gets_cut_at_its_zeros() {
        let d = dirichlet(5);
        let rule = TorusRule::new(&d);
        assert_eq!(rule.cuts().len(), 10);
        for &z in rule.cuts() {
            assert!(d.evaluate(z).norm() < 1e-10);
        }
    }

    #[test]
    fn norm_examples() {
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let k = TrigPoly::constant(c(2.5, 0.0));
        assert!(rel(luxemburg_norm_continuous(&pl, &k).unwrap().value, 2.5) < 1e-12);
        let sq = NFunction::power(2.0).unwrap();
        let z = TrigPoly::zero(4);
        let r = luxemburg_norm_continuous(&sq, &z).unwrap();
        assert_eq!(r.value, 0.0);
        for n in [1usize, 8, 64, 128] {
            let r = luxemburg_norm_continuous(&sq, &dirichlet(n)).unwrap();
            assert!(rel(r.value, ((2 * n + 1) as f64).sqrt()) < 1e-10, "n={n}");
            assert!(r.converged && r.residual < 1e-8);
        }
    }

    #[test]
    fn lebesgue_norm_of_dirichlet() {
        // ‖D_n‖_{L¹} = (1/2π)∫|D_n| against a midpoint oracle on the closed form
        let lin = NFunction::power(1.0).unwrap();
        for n in [4usize, 16] {
            let got = luxemburg_norm_continuous(&lin, &dirichlet(n)).unwrap().value;
            let m = 2_000_000;
            let oracle: f64 = (0..m)
                .map(|j| {
                    let x = TAU * (j as f64 + 0.5) / m as f64;
                    crate::trigpoly::dirichlet_closed_form(n, x).abs()
                })
                .sum::<f64>()
                / m as f64;
            assert!(rel(got, oracle) < 1e-8, "n={n} {got} {oracle}");
        }
    }

    #[test]
    fn power_norms_match_closed_forms() {
        for p in [1.5, 4.0] {
            let nf = NFunction::power(p).unwrap();
            let f = random_poly(6, 3, CoefficientLaw::Gaussian);
            let got = luxemburg_norm_continuous(&nf, &f).unwrap().value;
            // oracle: p-th moment by a fine periodic trapezoid sum
            let m = 1 << 16;
            let moment = f.eval_uniform(m).iter().map(|v| v.norm().powf(p)).sum::<f64>() / m as f64;
            assert!(rel(got, moment.powf(1.0 / p)) < 1e-9);
            let v = node_samples(&f, 6);
            let ell = v.iter().map(|x| x.norm().powf(p)).sum::<f64>().powf(1.0 / p);
            assert!(rel(discrete_norm_ln(&nf, &v).unwrap().value, ell) < 1e-12);
            let om = (v.iter().map(|x| x.norm().powf(p)).sum::<f64>() / 13.0).powf(1.0 / p);
            assert!(rel(discrete_norm_omega(&nf, &v, 6).unwrap().value, om) < 1e-12);
        }
    }

    #[test]
    fn discrete_examples() {
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let n = 8;
        for k in [1usize, 3, 17] {
            let set: Vec<i64> = (-(n as i64)..).take(k).collect();
            let v = node_samples(&spike_poly(n, &set).unwrap(), n);
            let ell = discrete_norm_ln(&pl, &v).unwrap().value;
            let om = discrete_norm_omega(&pl, &v, n).unwrap().value;
            let ell_closed = 1.0 / pl.eval_inverse(1.0 / k as f64).unwrap();
            let om_closed = 1.0 / pl.eval_inverse(17.0 / k as f64).unwrap();
            assert!(rel(ell, ell_closed) < 1e-9 && rel(om, om_closed) < 1e-9);
        }
        let one = [c(1.0, 0.0)];
        assert!((discrete_norm_ln(&pl, &one).unwrap().value - 1.0).abs() < 1e-14);
        let cst = vec![c(0.0, 2.0); 9];
        assert!(rel(discrete_norm_omega(&pl, &cst, 4).unwrap().value, 2.0) < 1e-14);
        assert!(discrete_norm_omega(&pl, &cst, 5).is_err());
        assert_eq!(discrete_norm_ln(&pl, &[c(0.0, 0.0); 3]).unwrap().value, 0.0);
    }

    fn poly_strategy() -> impl Strategy<Value = TrigPoly> {
        (0usize..12, any::<u64>(), 0usize..3).prop_map(|(n, seed, law)| {
            let law = [CoefficientLaw::Gaussian, CoefficientLaw::Sparse, CoefficientLaw::Lacunary][law];
            random_poly(n, seed, law)
        })
    }

    fn nf_strategy() -> impl Strategy<Value = NFunction> {
        (0usize..4).prop_map(|i| crate::nfunction::catalogue()[i].clone())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn homogeneity(nf in nf_strategy(), f in poly_strategy(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let s = c(re, im);
            prop_assume!(s.norm() > 1e-3 && !f.is_zero());
            let n = f.degree();
            let g = f.scale(s);
            let a = luxemburg_norm_continuous(&nf, &f).unwrap().value;
            let b = luxemburg_norm_continuous(&nf, &g).unwrap().value;
            prop_assert!(rel(b, s.norm() * a) < 1e-9);
            let (vf, vg) = (node_samples(&f, n), node_samples(&g, n));
            let a = discrete_norm_ln(&nf, &vf).unwrap().value;
            let b = discrete_norm_ln(&nf, &vg).unwrap().value;
            prop_assert!(rel(b, s.norm() * a) < 1e-9);
            let a = discrete_norm_omega(&nf, &vf, n).unwrap().value;
            let b = discrete_norm_omega(&nf, &vg, n).unwrap().value;
            prop_assert!(rel(b, s.norm() * a) < 1e-9);
        }

        #[test]
        fn triangle_inequality(nf in nf_strategy(), f in poly_strategy(), g in poly_strategy()) {
            let h = f.add(&g);
            let n = h.degree();
            let norm = |p: &TrigPoly| luxemburg_norm_continuous(&nf, p).unwrap().value;
            prop_assert!(norm(&h) <= (norm(&f) + norm(&g)) * (1.0 + 1e-10) + 1e-300);
            let (vf, vg, vh) = (node_samples(&f, n), node_samples(&g, n), node_samples(&h, n));
            let ell = |v: &[Complex64]| discrete_norm_ln(&nf, v).unwrap().value;
            prop_assert!(ell(&vh) <= (ell(&vf) + ell(&vg)) * (1.0 + 1e-12) + 1e-300);
            let om = |v: &[Complex64]| discrete_norm_omega(&nf, v, n).unwrap().value;
            prop_assert!(om(&vh) <= (om(&vf) + om(&vg)) * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn modular_at_norm_and_ordering(nf in nf_strategy(), f in poly_strategy()) {
            prop_assume!(!f.is_zero());
            let n = f.degree();
            let r = luxemburg_norm_continuous(&nf, &f).unwrap();
            prop_assert!(r.converged && r.residual <= 1e-8);
            let v = node_samples(&f, n);
            let ell = discrete_norm_ln(&nf, &v).unwrap();
            let om = discrete_norm_omega(&nf, &v, n).unwrap();
            prop_assert!(ell.residual <= 1e-8 && om.residual <= 1e-8);
            prop_assert!(ell.value >= om.value * (1.0 - 1e-12));
        }

        #[test]
        fn node_average_is_the_mean(f in poly_strategy()) {
            let n = f.degree();
            let avg: Complex64 = node_samples(&f, n).iter().sum::<Complex64>() / (2 * n + 1) as f64;
            prop_assert!((avg - f.mean()).norm() < 1e-12 * f.energy().sqrt().max(1.0));
        }

        #[test]
        fn parseval_by_quadrature(f in poly_strategy()) {
            prop_assume!(!f.is_zero());
            let sq = NFunction::power(2.0).unwrap();
            let m = continuous_modular(&sq, &f, 1.0).unwrap().value;
            prop_assert!((m - f.energy()).abs() <= 1e-10 * f.energy().max(1.0));
        }
    }
}
