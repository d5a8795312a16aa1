//! N-functions: convex Orlicz generators with their density, inverse and
//! conjugate, plus the scalar quantities (doubling constant, multiplicativity
//! constants, indices, integral conditions) the sampling inequalities use.

mod conditions;
mod indices;
mod multiplicativity;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::root::{solve_monotone, Monotone};

pub use conditions::{
    check_big_condition, check_small_condition, integral_from_zero, integral_to_infinity,
    prescan_condition_params, ConditionParams, ConditionReport, TruncatedIntegral,
};
pub use indices::{matuszewska_indices, matuszewska_indices_in, IndexEstimate, IndexScope};
pub use multiplicativity::{
    in_region, multiplicativity_constant, multiplicativity_constant_on,
    MultiplicativityCertificate, MultiplicativityMode, PairGrid,
};

/// Validation grid: `[1e-8, 1e8]`, 200 points per decade.
const VALIDATION_LO: f64 = 1e-8;
const VALIDATION_DECADES: usize = 16;
const VALIDATION_PER_DECADE: usize = 200;
const VALIDATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `t^α`
    Power,
    /// `t^α log^β(1 + t)`
    PowerLog,
    /// `t^α log^β(1 + t) log^γ(1 + log(1 + t))`
    PowerLogLog,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::PowerLog => "power_log",
            Family::PowerLogLog => "power_log_log",
            Family::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Family::Power),
            "power_log" => Ok(Family::PowerLog),
            "power_log_log" => Ok(Family::PowerLogLog),
            other => Err(Error::parameter(format!("unknown N-function family '{other}'"))),
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomParts {
    name: String,
    eval: ScalarFn,
    density: ScalarFn,
}

/// An N-function, immutable after construction.
#[derive(Clone)]
pub struct NFunction {
    family: Family,
    alpha: f64,
    beta: f64,
    gamma: f64,
    scale: f64,
    normalized: bool,
    custom: Option<CustomParts>,
}

impl fmt::Debug for NFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NFunction")
            .field("descriptor", &self.descriptor())
            .field("scale", &self.scale)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl fmt::Display for NFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// `ln(1 + e^u)` without overflow for large `u`.
fn ln1p_exp(u: f64) -> f64 {
    if u > 36.0 {
        u + (-u).exp()
    } else {
        u.exp().ln_1p()
    }
}

/// `ln ln(1 + e^u)`, exact to rounding for every finite `u`.
pub(crate) fn ln_ln1p_exp(u: f64) -> f64 {
    if u < -36.0 {
        // ln(1 + e^u) = e^u (1 - e^u/2 + ...)
        u + (-0.5 * u.exp()).ln_1p()
    } else {
        ln1p_exp(u).ln()
    }
}

impl NFunction {
    /// Builds a catalogue N-function and validates it on `[1e-8, 1e8]`.
    ///
    /// With `normalize` the values are divided by the raw `φ(1)`.
    pub fn new(family: Family, alpha: f64, beta: f64, gamma: f64, normalize: bool) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::parameter("exponents must be finite"));
        }
        match family {
            Family::Power if alpha < 1.0 => {
                return Err(Error::parameter(format!("power needs alpha >= 1, got {alpha}")))
            }
            Family::PowerLog | Family::PowerLogLog if alpha <= 1.0 => {
                return Err(Error::parameter(format!(
                    "{} needs alpha > 1, got {alpha}",
                    family.name()
                )))
            }
            Family::Custom => {
                return Err(Error::parameter("use NFunction::custom for custom N-functions"))
            }
            _ => {}
        }
        let (beta, gamma) = match family {
            Family::Power => (0.0, 0.0),
            Family::PowerLog => (beta, 0.0),
            _ => (beta, gamma),
        };
        let mut nf = NFunction {
            family,
            alpha,
            beta,
            gamma,
            scale: 1.0,
            normalized: normalize,
            custom: None,
        };
        if normalize {
            nf.scale = 1.0 / nf.raw_eval(1.0);
        }
        nf.validate()?;
        Ok(nf)
    }

    /// Normalized `t^α`.
    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(Family::Power, alpha, 0.0, 0.0, true)
    }

    /// Normalized `t^α log^β(1 + t)`.
    pub fn power_log(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Family::PowerLog, alpha, beta, 0.0, true)
    }

    /// Normalized `t^α log^β(1 + t) log^γ(1 + log(1 + t))`.
    pub fn power_log_log(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::PowerLogLog, alpha, beta, gamma, true)
    }

    /// An N-function given by closures for `φ` and its right density.
    pub fn custom<E, D>(name: &str, eval: E, density: D, normalize: bool) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut nf = NFunction {
            family: Family::Custom,
            alpha: f64::NAN,
            beta: f64::NAN,
            gamma: f64::NAN,
            scale: 1.0,
            normalized: normalize,
            custom: Some(CustomParts {
                name: name.to_string(),
                eval: Arc::new(eval),
                density: Arc::new(density),
            }),
        };
        if normalize {
            let one = nf.raw_eval(1.0);
            if !(one.is_finite() && one > 0.0) {
                return Err(Error::parameter(format!("custom phi(1) = {one} cannot be normalized")));
            }
            nf.scale = 1.0 / one;
        }
        nf.validate()?;
        Ok(nf)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `(α, β, γ)`; NaN for custom functions.
    pub fn exponents(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Compact label used in reports, e.g. `power(1.5)` or `power_log(2;1)`.
    pub fn descriptor(&self) -> String {
        match self.family {
            Family::Power => format!("power({})", self.alpha),
            Family::PowerLog => format!("power_log({};{})", self.alpha, self.beta),
            Family::PowerLogLog => {
                format!("power_log_log({};{};{})", self.alpha, self.beta, self.gamma)
            }
            Family::Custom => format!(
                "custom({})",
                self.custom.as_ref().map_or("", |c| c.name.as_str())
            ),
        }
    }

    fn raw_eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Power => t.powf(self.alpha),
            Family::PowerLog => t.powf(self.alpha) * t.ln_1p().powf(self.beta),
            Family::PowerLogLog => {
                let l = t.ln_1p();
                t.powf(self.alpha) * l.powf(self.beta) * l.ln_1p().powf(self.gamma)
            }
            Family::Custom => (self.custom.as_ref().expect("custom parts").eval)(t),
        }
    }

    fn raw_density(&self, t: f64) -> f64 {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        match self.family {
            Family::Power => {
                if t <= 0.0 {
                    if a == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    a * t.powf(a - 1.0)
                }
            }
            _ if t <= 0.0 && self.family != Family::Custom => 0.0,
            Family::PowerLog => {
                let l = t.ln_1p();
                t.powf(a - 1.0) * l.powf(b - 1.0) * (a * l + b * t / (1.0 + t))
            }
            Family::PowerLogLog => {
                let l = t.ln_1p();
                let m = l.ln_1p();
                let q = t / (1.0 + t);
                t.powf(a - 1.0)
                    * l.powf(b - 1.0)
                    * m.powf(g - 1.0)
                    * (a * l * m + b * q * m + g * q * l / (1.0 + l))
            }
            Family::Custom => (self.custom.as_ref().expect("custom parts").density)(t.max(0.0)),
        }
    }

    /// `φ(t)`; zero for `t ≤ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        self.scale * self.raw_eval(t)
    }

    /// Right density `φ'(t)`.
    pub fn eval_density(&self, t: f64) -> f64 {
        self.scale * self.raw_density(t)
    }

    /// `ln φ(e^u)`. Closed form for the catalogue families, so it stays finite
    /// for `|u|` far beyond the `f64` range of `e^u`.
    pub fn ln_eval_exp(&self, u: f64) -> f64 {
        match self.family {
            Family::Custom => self.eval(u.exp()).ln(),
            _ => {
                let mut v = self.scale.ln() + self.alpha * u;
                if self.family != Family::Power {
                    let ln_l = ln_ln1p_exp(u);
                    v += self.beta * ln_l;
                    if self.family == Family::PowerLogLog {
                        v += self.gamma * ln_ln1p_exp(ln_l);
                    }
                }
                v
            }
        }
    }

    /// `φ⁻¹(y)` by bisection, bracket found by doubling from 1.
    pub fn eval_inverse(&self, y: f64) -> Result<f64> {
        self.eval_inverse_from(y, 1.0)
    }

    /// `φ⁻¹(y)` with the bracket search starting at `x0`.
    pub fn eval_inverse_from(&self, y: f64, x0: f64) -> Result<f64> {
        if !(y >= 0.0) || y.is_infinite() {
            return Err(Error::parameter(format!("inverse needs finite y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let x0 = if x0 > 0.0 && x0.is_finite() { x0 } else { 1.0 };
        let root = solve_monotone(|t| self.eval(t), y, x0, Monotone::Increasing, "phi inverse")?;
        Ok(root.hi)
    }

    /// Convex conjugate `φ*(s) = sup_t (st - φ(t))`, attained where `φ'(t) = s`.
    pub fn conjugate(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || s.is_infinite() {
            return Err(Error::parameter(format!("conjugate needs finite s >= 0, got {s}")));
        }
        if self.eval_density(0.0) >= s {
            return Ok(0.0);
        }
        let root = solve_monotone(
            |t| self.eval_density(t),
            s,
            1.0,
            Monotone::Increasing,
            "conjugate maximiser",
        )?;
        // the density may jump; take the better of the two bracket ends
        let value = |t: f64| s * t - self.eval(t);
        Ok(value(root.lo).max(value(root.hi)).max(0.0))
    }

    /// Doubling constant `sup φ(2t)/φ(t)` on the log grid `[1e-8, 1e8]`.
    pub fn delta2_constant(&self) -> Delta2 {
        let grid = validation_grid();
        let ratios: Vec<f64> = grid.iter().map(|&t| self.eval(2.0 * t) / self.eval(t)).collect();
        let sup = ratios.iter().copied().fold(0.0, f64::max);
        let inner = &ratios[VALIDATION_PER_DECADE..ratios.len() - VALIDATION_PER_DECADE];
        let inner_sup = inner.iter().copied().fold(0.0, f64::max);
        let growing = !sup.is_finite() || sup > inner_sup * (1.0 + 1e-3);
        Delta2 {
            value: sup,
            non_delta2: growing,
        }
    }

    fn validate(&self) -> Result<()> {
        let grid = validation_grid();
        let mut prev_val = 0.0;
        let mut prev_den = self.eval_density(0.0);
        if !(prev_den >= 0.0) {
            return Err(Error::parameter(format!(
                "{}: density at 0 is {prev_den}",
                self.descriptor()
            )));
        }
        for &t in &grid {
            let v = self.eval(t);
            let d = self.eval_density(t);
            if !(v.is_finite() && d.is_finite()) {
                return Err(Error::parameter(format!(
                    "{}: not finite at t = {t:e}",
                    self.descriptor()
                )));
            }
            if v <= prev_val {
                return Err(Error::parameter(format!(
                    "{}: not strictly increasing at t = {t:e}",
                    self.descriptor()
                )));
            }
            if d < prev_den * (1.0 - VALIDATION_TOL) || d <= 0.0 {
                return Err(Error::parameter(format!(
                    "{}: density not non-decreasing and positive at t = {t:e}",
                    self.descriptor()
                )));
            }
            prev_val = v;
            prev_den = d;
        }
        if self.normalized && (self.eval(1.0) - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::parameter(format!(
                "{}: normalization failed, phi(1) = {}",
                self.descriptor(),
                self.eval(1.0)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delta2 {
    pub value: f64,
    /// Set when the running sup still grows at the grid boundary.
    pub non_delta2: bool,
}

/// `n` log-spaced points per decade over `[lo, lo·10^decades]`, endpoints included.
pub(crate) fn log_grid(lo: f64, decades: f64, per_decade: usize) -> Vec<f64> {
    let count = (decades * per_decade as f64).round() as usize;
    let (a, b) = (lo.log10(), lo.log10() + decades);
    (0..=count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / count as f64))
        .collect()
}

fn validation_grid() -> Vec<f64> {
    log_grid(VALIDATION_LO, VALIDATION_DECADES as f64, VALIDATION_PER_DECADE)
}

/// The four functions the default scan runs over: `t^1.5`, `t²`, `t⁴`, and
/// `t² log(1 + t)`, all normalized.
pub fn catalogue() -> Vec<NFunction> {
    vec![
        NFunction::power(1.5).expect("valid"),
        NFunction::power(2.0).expect("valid"),
        NFunction::power(4.0).expect("valid"),
        NFunction::power_log(2.0, 1.0).expect("valid"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn construction_examples() {
        let sq = NFunction::power(2.0).unwrap();
        assert_eq!(sq.eval(1.0), 1.0);
        assert_eq!(sq.eval(3.0), 9.0);
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        assert!((pl.eval(1.0) - 1.0).abs() <= 1e-15);
        assert!((pl.scale() - 1.0 / LN_2).abs() < 1e-15);
        assert!(NFunction::power_log(1.0, 1.0).is_err());
        assert!(NFunction::power_log_log(1.0, 1.0, 1.0).is_err());
        assert!(NFunction::power(0.5).is_err());
        // negative log exponent breaks monotone density near 0
        assert!(NFunction::power_log(1.2, -1.0).is_err());
        assert_eq!(pl.descriptor(), "power_log(2;1)");
        assert_eq!(NFunction::power(1.5).unwrap().descriptor(), "power(1.5)");
    }

    #[test]
    fn custom_validation() {
        let ok = NFunction::custom("cosh", |t| t.cosh() - 1.0, |t| t.sinh(), true);
        // cosh overflows on the validation grid
        assert!(ok.is_err());
        let quad = NFunction::custom("sq", |t| 3.0 * t * t, |t| 6.0 * t, true).unwrap();
        assert!((quad.eval(2.0) - 4.0).abs() < 1e-15);
        let concave = NFunction::custom("sqrt", |t: f64| t.sqrt(), |t: f64| 0.5 / t.sqrt(), false);
        assert!(concave.is_err());
    }

    #[test]
    fn densities_match_finite_differences() {
        for nf in catalogue()
            .into_iter()
            .chain([NFunction::power_log_log(2.5, 1.0, 2.0).unwrap()])
        {
            for t in [1e-3, 0.3, 1.0, 7.0, 1e4] {
                let h = t * 1e-6;
                let fd = (nf.eval(t + h) - nf.eval(t - h)) / (2.0 * h);
                assert!(rel(nf.eval_density(t), fd) < 1e-7, "{nf} at {t}");
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let sq = NFunction::power(2.0).unwrap();
        assert_eq!(sq.eval_inverse(4.0).unwrap(), 2.0);
        for nf in catalogue() {
            assert!((nf.eval_inverse(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(nf.eval_inverse(0.0).unwrap(), 0.0);
        }
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        for y in [0.5, 5.0, 500.0] {
            let x = pl.eval_inverse(y).unwrap();
            assert!(rel(pl.eval(x), y) < 1e-9);
            // scan oracle: the dense grid crossing brackets x
            let grid = log_grid(1e-3, 6.0, 20_000);
            let idx = grid.iter().position(|&t| pl.eval(t) >= y).unwrap();
            assert!(grid[idx - 1] <= x && x <= grid[idx]);
        }
        assert!(pl.eval_inverse(-1.0).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let sq = NFunction::power(2.0).unwrap();
        assert!((sq.conjugate(2.0).unwrap() - 1.0).abs() < 1e-12);
        let p = 4.0;
        let quart = NFunction::power(p).unwrap();
        let s: f64 = 4.0;
        let closed = (p - 1.0) * (s / p).powf(p / (p - 1.0));
        let got = quart.conjugate(s).unwrap();
        assert!(rel(got, closed) < 1e-10);
        let brute = log_grid(1e-4, 8.0, 5000)
            .into_iter()
            .map(|t| s * t - quart.eval(t))
            .fold(f64::MIN, f64::max);
        assert!(got >= brute - 1e-12 && got - brute < 1e-6);
        assert_eq!(sq.conjugate(0.0).unwrap(), 0.0);
        let linear = NFunction::power(1.0).unwrap();
        assert_eq!(linear.conjugate(0.5).unwrap(), 0.0);
        assert!(linear.conjugate(2.0).unwrap_err().is_convergence());
    }

    #[test]
    fn young_inequality_grid() {
        for nf in catalogue() {
            let ts = log_grid(1e-3, 5.0, 10);
            let ss = log_grid(1e-3, 5.0, 10);
            for &s in &ss {
                let cs = nf.conjugate(s).unwrap();
                for &t in &ts {
                    assert!(s * t <= nf.eval(t) + cs + 1e-9 * (s * t).max(1.0), "{nf} s={s} t={t}");
                }
            }
        }
    }

    #[test]
    fn delta2_examples() {
        for p in [1.5, 2.0, 4.0] {
            let d = NFunction::power(p).unwrap().delta2_constant();
            assert!(rel(d.value, 2f64.powf(p)) < 1e-13);
            assert!(!d.non_delta2);
        }
        let d = NFunction::power_log(2.0, 1.0).unwrap().delta2_constant();
        assert!((4.0..=8.0).contains(&d.value) && !d.non_delta2);
        let expish = NFunction::custom(
            "t^2 e^t^0.25",
            |t: f64| t * t * t.powf(0.25).exp(),
            |t: f64| (2.0 * t + 0.25 * t.powf(1.25)) * t.powf(0.25).exp(),
            true,
        )
        .unwrap();
        assert!(expish.delta2_constant().non_delta2);
    }

    #[test]
    fn ln_eval_exp_matches_direct() {
        for nf in catalogue()
            .into_iter()
            .chain([NFunction::power_log_log(2.0, 1.0, 1.0).unwrap()])
        {
            for u in [-30.0, -2.0, 0.0, 3.0, 40.0] {
                let direct = nf.eval(f64::exp(u)).ln();
                assert!((nf.ln_eval_exp(u) - direct).abs() < 1e-12 * direct.abs().max(1.0));
            }
            assert!(nf.ln_eval_exp(1e7).is_finite());
            assert!(nf.ln_eval_exp(-1e7).is_finite());
        }
    }

    fn catalogue_strategy() -> impl Strategy<Value = NFunction> {
        (0usize..5).prop_map(|i| {
            if i == 4 {
                NFunction::power_log_log(2.0, 1.0, 1.0).unwrap()
            } else {
                catalogue()[i].clone()
            }
        })
    }

    proptest! {
        #[test]
        fn density_chain(nf in catalogue_strategy(), lt in -8.0f64..8.0) {
            let t = 10f64.powf(lt);
            let v = nf.eval(t);
            let td = t * nf.eval_density(t);
            prop_assert!(v <= td * (1.0 + 1e-10));
            prop_assert!(td <= nf.eval(2.0 * t) * (1.0 + 1e-10));
        }

        #[test]
        fn inverse_round_trip(nf in catalogue_strategy(), lt in -8.0f64..8.0) {
            let t = 10f64.powf(lt);
            let back = nf.eval_inverse(nf.eval(t)).unwrap();
            prop_assert!(rel(back, t) < 1e-9);
        }

        #[test]
        fn superhomogeneity(nf in catalogue_strategy(), lt in -6.0f64..6.0, a in 1.0f64..50.0) {
            let t = 10f64.powf(lt);
            prop_assert!(nf.eval(a * t) >= a * nf.eval(t) * (1.0 - 1e-12));
        }

        #[test]
        fn ratio_phi_t_over_t_nondecreasing(nf in catalogue_strategy(), lt in -7.0f64..7.0, k in 1.0f64..10.0) {
            let t = 10f64.powf(lt);
            prop_assert!(nf.eval(k * t) / (k * t) >= nf.eval(t) / t * (1.0 - 1e-12));
        }
    }
}
