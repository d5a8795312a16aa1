//! The two integral growth conditions
//!
//! ```text
//! small:  (σs / φ(σs)) ∫_0^s φ(r)/r² dr            ≤ σ
//! big:    ((γs)^p / φ(γs)) ∫_s^∞ φ(r)/r^{p+1} dr   ≤ γ^p
//! ```
//!
//! checked for `s` on a log grid over `[1e-6, 1e6]`. Both improper integrals
//! are truncated after twelve decades; the neglected pieces are replaced by
//! the power-law tail with the local slope measured at the cut.

use super::{log_grid, NFunction};
use crate::error::{Error, Result};
use crate::quad::{integrate_log, tanh_sinh};

const S_LO: f64 = 1e-6;
const S_DECADES: f64 = 12.0;
const S_PER_DECADE: usize = 60;
const CUT_DECADES: f64 = 1e12;
const QUAD_TOL: f64 = 1e-13;
/// A condition holds when its sup ratio is at most `1 + CONDITION_TOL`.
pub const CONDITION_TOL: f64 = 1e-6;
const PRESCAN_STEPS: i32 = 40;
// Slopes closer than this to the critical exponent count as divergent.
const SLOPE_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedIntegral {
    /// Quadrature part plus the tail estimate.
    pub value: f64,
    /// Tail estimate that was added to the quadrature.
    pub remainder: f64,
    /// Local power slope measured at the cut.
    pub slope: f64,
    pub points: usize,
}

fn local_slope(nf: &NFunction, r: f64, factor: f64) -> f64 {
    (nf.eval(r * factor).ln() - nf.eval(r).ln()) / factor.ln()
}

/// `∫_0^upper φ(c r) / r^q dr`.
///
/// The piece below `upper·1e-12` is estimated as `φ(c r_min) r_min^{1-q} / (â + 1 - q)`
/// with `â` the local slope of `φ` just below the cut; `â ≤ q - 1` means the
/// integral diverges at 0 and is an error.
pub fn integral_from_zero(nf: &NFunction, c: f64, q: f64, upper: f64) -> Result<TruncatedIntegral> {
    if !(upper > 0.0 && c > 0.0) {
        return Err(Error::parameter("integral_from_zero needs c > 0 and upper > 0"));
    }
    let r_min = upper / CUT_DECADES;
    let slope = local_slope(nf, c * r_min, 0.1);
    if !(slope + 1.0 - q > SLOPE_MARGIN) {
        return Err(Error::convergence(
            "integral near zero",
            format!("local slope {slope} does not exceed {}", q - 1.0),
        ));
    }
    let remainder = nf.eval(c * r_min) * r_min.powf(1.0 - q) / (slope + 1.0 - q);
    let body = integrate_log(|r| nf.eval(c * r) / r.powf(q), r_min, upper, QUAD_TOL);
    if !body.converged {
        return Err(Error::convergence("integral near zero", format!("quadrature error {:e}", body.error)));
    }
    Ok(TruncatedIntegral {
        value: body.value + remainder,
        remainder,
        slope,
        points: body.points,
    })
}

/// `∫_lower^∞ φ(r) / r^q dr`, tail past `lower·1e12` from the local slope `β̂`;
/// `β̂ ≥ q - 1` is an error.
pub fn integral_to_infinity(nf: &NFunction, q: f64, lower: f64) -> Result<TruncatedIntegral> {
    if !(lower > 0.0) {
        return Err(Error::parameter("integral_to_infinity needs lower > 0"));
    }
    let r_max = lower * CUT_DECADES;
    let slope = local_slope(nf, r_max, 10.0);
    if !(q - 1.0 - slope > SLOPE_MARGIN) {
        return Err(Error::convergence(
            "integral tail",
            format!("local slope {slope} at {r_max:e} is not below {}", q - 1.0),
        ));
    }
    let remainder = nf.eval(r_max) * r_max.powf(1.0 - q) / (q - 1.0 - slope);
    let body = integrate_log(|r| nf.eval(r) / r.powf(q), lower, r_max, QUAD_TOL);
    if !body.converged {
        return Err(Error::convergence("integral tail", format!("quadrature error {:e}", body.error)));
    }
    Ok(TruncatedIntegral {
        value: body.value + remainder,
        remainder,
        slope,
        points: body.points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionParams {
    pub sigma: f64,
    pub gamma: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// `"small"` or `"big"`.
    pub condition: &'static str,
    /// σ or γ.
    pub param: f64,
    /// Exponent of the big condition; `None` for the small one.
    pub p: Option<f64>,
    /// `sup_s R(s)/σ` or `sup_s R(s)/γ^p`.
    pub sup_ratio: f64,
    pub argmax_s: f64,
    pub holds: bool,
    pub truncation_remainder: f64,
    pub grid_points: usize,
    pub quad_points: usize,
}

/// Cumulative integrals on the `s` grid; shared by all σ (or γ) values.
struct Profile {
    s: Vec<f64>,
    integral: Vec<f64>,
    remainder: f64,
    points: usize,
}

fn s_grid() -> Vec<f64> {
    log_grid(S_LO, S_DECADES, S_PER_DECADE)
}

fn segment(nf: &NFunction, q: f64, lo: f64, hi: f64) -> Result<(f64, usize)> {
    let part = tanh_sinh(
        |u| {
            let r = u.exp();
            nf.eval(r) / r.powf(q) * r
        },
        lo.ln(),
        hi.ln(),
        QUAD_TOL,
    );
    if !part.converged {
        return Err(Error::convergence("condition profile", format!("segment [{lo:e}, {hi:e}]")));
    }
    Ok((part.value, part.points))
}

/// `F(s) = ∫_0^s φ(r)/r² dr` on the grid.
fn small_profile(nf: &NFunction) -> Result<Profile> {
    let s = s_grid();
    let head = integral_from_zero(nf, 1.0, 2.0, s[0])?;
    let mut integral = vec![head.value];
    let mut points = head.points;
    for w in s.windows(2) {
        let (v, pts) = segment(nf, 2.0, w[0], w[1])?;
        integral.push(integral.last().unwrap() + v);
        points += pts;
    }
    Ok(Profile {
        s,
        integral,
        remainder: head.remainder,
        points,
    })
}

/// `G(s) = ∫_s^∞ φ(r)/r^{p+1} dr` on the grid.
fn big_profile(nf: &NFunction, p: f64) -> Result<Profile> {
    let s = s_grid();
    let last = *s.last().unwrap();
    let tail = integral_to_infinity(nf, p + 1.0, last)?;
    let mut integral = vec![0.0; s.len()];
    integral[s.len() - 1] = tail.value;
    let mut points = tail.points;
    for i in (0..s.len() - 1).rev() {
        let (v, pts) = segment(nf, p + 1.0, s[i], s[i + 1])?;
        integral[i] = integral[i + 1] + v;
        points += pts;
    }
    Ok(Profile {
        s,
        integral,
        remainder: tail.remainder,
        points,
    })
}

fn sup_of<F: Fn(f64, f64) -> f64>(profile: &Profile, ratio: F) -> (f64, f64) {
    profile
        .s
        .iter()
        .zip(&profile.integral)
        .map(|(&s, &i)| (ratio(s, i), s))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

fn small_report(nf: &NFunction, profile: &Profile, sigma: f64) -> ConditionReport {
    let (sup, arg) = sup_of(profile, |s, f| {
        let x = sigma * s;
        x / nf.eval(x) * f / sigma
    });
    ConditionReport {
        condition: "small",
        param: sigma,
        p: None,
        sup_ratio: sup,
        argmax_s: arg,
        holds: sup <= 1.0 + CONDITION_TOL,
        truncation_remainder: profile.remainder,
        grid_points: profile.s.len(),
        quad_points: profile.points,
    }
}

fn big_report(nf: &NFunction, profile: &Profile, gamma: f64, p: f64) -> ConditionReport {
    let (sup, arg) = sup_of(profile, |s, g| {
        let x = gamma * s;
        // (γs)^p / γ^p = s^p
        s.powf(p) / nf.eval(x) * g
    });
    ConditionReport {
        condition: "big",
        param: gamma,
        p: Some(p),
        sup_ratio: sup,
        argmax_s: arg,
        holds: sup <= 1.0 + CONDITION_TOL,
        truncation_remainder: profile.remainder,
        grid_points: profile.s.len(),
        quad_points: profile.points,
    }
}

pub fn check_small_condition(nf: &NFunction, sigma: f64) -> Result<ConditionReport> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::parameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(small_report(nf, &small_profile(nf)?, sigma))
}

pub fn check_big_condition(nf: &NFunction, gamma: f64, p: f64) -> Result<ConditionReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::parameter(format!("gamma must be positive, got {gamma}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::parameter(format!("p must exceed 1, got {p}")));
    }
    Ok(big_report(nf, &big_profile(nf, p)?, gamma, p))
}

/// Smallest powers of two `σ`, `γ` for which the conditions hold with the
/// given `p`, then raised to their common maximum when that still passes.
pub fn prescan_condition_params(nf: &NFunction, p: f64) -> Result<ConditionParams> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::parameter(format!("p must exceed 1, got {p}")));
    }
    let small = small_profile(nf)?;
    let big = big_profile(nf, p)?;
    let first = |pass: &dyn Fn(f64) -> bool, what: &str| -> Result<f64> {
        (0..=PRESCAN_STEPS)
            .map(|k| 2f64.powi(k))
            .find(|&v| pass(v))
            .ok_or_else(|| {
                Error::convergence("condition prescan", format!("no {what} up to 2^{PRESCAN_STEPS}"))
            })
    };
    let sigma = first(&|v| small_report(nf, &small, v).holds, "sigma")?;
    let gamma = first(&|v| big_report(nf, &big, v, p).holds, "gamma")?;
    let common = sigma.max(gamma);
    if small_report(nf, &small, common).holds && big_report(nf, &big, common, p).holds {
        Ok(ConditionParams {
            sigma: common,
            gamma: common,
            p,
        })
    } else {
        Ok(ConditionParams { sigma, gamma, p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_small_condition_is_tight_at_one() {
        let nf = NFunction::power(2.0).unwrap();
        let r = check_small_condition(&nf, 1.0).unwrap();
        assert!((r.sup_ratio - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.holds);
        let r2 = check_small_condition(&nf, 2.0).unwrap();
        assert!((r2.sup_ratio - 0.25).abs() < 1e-9);
        let r_half = check_small_condition(&nf, 0.5).unwrap();
        assert!(!r_half.holds);
    }

    #[test]
    fn square_big_condition_is_tight_at_one() {
        let nf = NFunction::power(2.0).unwrap();
        let r = check_big_condition(&nf, 1.0, 3.0).unwrap();
        assert!((r.sup_ratio - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.holds);
        // φ = t² with p = 2 makes the tail integral diverge
        assert!(check_big_condition(&nf, 1.0, 2.0).unwrap_err().is_convergence());
    }

    #[test]
    fn linear_small_condition_diverges() {
        let nf = NFunction::power(1.0).unwrap();
        assert!(check_small_condition(&nf, 1.0).unwrap_err().is_convergence());
    }

    #[test]
    fn truncated_integrals_match_closed_forms() {
        let nf = NFunction::power(1.5).unwrap();
        // ∫_0^x (2r)^{1.5} / r² dr = 2^{1.5} · 2 x^{1/2}
        let x: f64 = 3.0;
        let got = integral_from_zero(&nf, 2.0, 2.0, x).unwrap();
        let want = 2f64.powf(1.5) * 2.0 * x.sqrt();
        assert!((got.value - want).abs() < 1e-11 * want);
        assert!(got.remainder > 0.0 && got.remainder < 1e-5 * want);
        // ∫_x^∞ r^{1.5} / r^4 dr = x^{-1.5} / 1.5
        let got = integral_to_infinity(&nf, 4.0, x).unwrap();
        let want = x.powf(-1.5) / 1.5;
        assert!((got.value - want).abs() < 1e-11 * want);
    }

    /// Brute-force oracle: plain composite Simpson on a fine log grid plus
    /// an analytic bound for the part below 1e-30.
    fn brute_small_integral(nf: &NFunction, s: f64) -> f64 {
        let (a, b) = ((1e-30f64).ln(), s.ln());
        let n = 200_000;
        let h = (b - a) / n as f64;
        let g = |u: f64| {
            let r = u.exp();
            nf.eval(r) / r
        };
        let mut acc = g(a) + g(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn power_log_prescan_passes_and_matches_brute_force() {
        let nf = NFunction::power_log(2.0, 1.0).unwrap();
        let params = prescan_condition_params(&nf, 4.0).unwrap();
        assert!(params.sigma >= params.gamma);
        let small = check_small_condition(&nf, params.sigma).unwrap();
        let big = check_big_condition(&nf, params.gamma, params.p).unwrap();
        assert!(small.holds && big.holds, "{small:?} {big:?}");

        let profile = small_profile(&nf).unwrap();
        for idx in (0..profile.s.len()).step_by(profile.s.len() / 10).take(10) {
            let s = profile.s[idx];
            let brute = brute_small_integral(&nf, s);
            assert!((profile.integral[idx] - brute).abs() < 1e-8 * brute, "s={s}");
        }
    }

    #[test]
    fn power_log_needs_p_above_three() {
        // φ ~ t³ near zero, so p = 3 makes the ratio grow like log(1/s)
        let nf = NFunction::power_log(2.0, 1.0).unwrap();
        let r = check_big_condition(&nf, 1.0, 3.0).unwrap();
        let r4 = check_big_condition(&nf, 1.0, 4.0).unwrap();
        assert!(r.sup_ratio > r4.sup_ratio);
        assert!(r.argmax_s <= 1e-5);
    }
}
