//! Conjugate-function analytics: Orlicz norms of Dirichlet kernels and their
//! integral bracket, empirical norms of `H`, a weak-type (1,1) estimate and
//! the projection-norm bound `‖S_n‖ ≤ ((1 + ‖H‖)/2)²`.
//!
//! Torus integrals are reported in the normalized measure `dx/2π`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nfunction::{integral_from_zero, NFunction};
use crate::norms::TorusRule;
use crate::sampling::{family, CaseLabel, FamilySpec, VerificationReport, RATIO_TOL};
use crate::trigpoly::{dirichlet, hilbert_transform, project, TrigPoly};

/// `λ_n = ‖D_n‖_{L^φ}`.
pub fn dirichlet_norm(nf: &NFunction, n: usize) -> Result<f64> {
    Ok(TorusRule::new(&dirichlet(n)).norm(nf)?.value)
}

/// The three quantities of the Dirichlet bracket at one `(n, λ)`, each divided by `2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletBracket {
    pub n: usize,
    pub lambda: f64,
    /// `(1/2πλ) ∫_0^{3(2n+1)/(2πλ)} φ(t)/t² dt`.
    pub lower: f64,
    /// `(1/2π) ∫ φ(|D_n|/λ) dx`.
    pub middle: f64,
    /// `(2/λ) ∫_0^{(2n+1)/λ} φ(2t)/t² dt`.
    pub upper_4pi: f64,
    /// Half of `upper_4pi`.
    pub upper_2pi: f64,
    pub upper_2pi_holds: bool,
    /// `lower ≤ middle` and `middle ≤ upper_4pi`.
    pub rows: [VerificationReport; 2],
}

fn lemma_label(nf: &NFunction, n: usize, lambda: f64) -> CaseLabel {
    CaseLabel {
        phi: nf.descriptor(),
        n,
        case_id: "dirichlet".into(),
        witness: format!("lambda={lambda:e}"),
    }
}

/// Evaluates the bracket with a rule already built for `D_n`.
fn bracket_with(nf: &NFunction, n: usize, lambda: f64, rule: &mut TorusRule) -> Result<DirichletBracket> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::parameter(format!("lambda must be positive, got {lambda}")));
    }
    let m = (2 * n + 1) as f64;
    let lower = integral_from_zero(nf, 1.0, 2.0, 3.0 * m / (TAU * lambda))?.value / (TAU * lambda);
    let middle = rule.modular(nf, lambda)?.value;
    let upper_4pi = 2.0 * integral_from_zero(nf, 2.0, 2.0, m / lambda)?.value / lambda;
    let upper_2pi = 0.5 * upper_4pi;
    let label = lemma_label(nf, n, lambda);
    Ok(DirichletBracket {
        n,
        lambda,
        lower,
        middle,
        upper_4pi,
        upper_2pi,
        upper_2pi_holds: middle <= upper_2pi * (1.0 + RATIO_TOL),
        rows: [
            VerificationReport::compare(&label, "dirichlet_lower", lower, middle, true),
            VerificationReport::compare(&label, "dirichlet_upper", middle, upper_4pi, true),
        ],
    })
}

/// Both sides of the Dirichlet-kernel integral bracket at `λ`; the `4π`
/// upper constant is the pass criterion, the `2π` one is only recorded.
pub fn verify_dirichlet_lemma(nf: &NFunction, n: usize, lambda: f64) -> Result<DirichletBracket> {
    bracket_with(nf, n, lambda, &mut TorusRule::new(&dirichlet(n)))
}

/// Worst case of `λ_n ≤ 4π λ_{n+1}` over `n < n_max`.
pub fn verify_lambda_monotonicity(nf: &NFunction, n_max: usize) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::parameter("n_max must be at least 1"));
    }
    let lambdas: Vec<f64> = (0..=n_max)
        .into_par_iter()
        .map(|n| dirichlet_norm(nf, n))
        .collect::<Result<_>>()?;
    let worst = (0..n_max)
        .max_by(|&a, &b| {
            let ra = lambdas[a] / lambdas[a + 1];
            let rb = lambdas[b] / lambdas[b + 1];
            ra.total_cmp(&rb).then(b.cmp(&a))
        })
        .expect("n_max >= 1");
    let label = CaseLabel {
        phi: nf.descriptor(),
        n: worst,
        case_id: format!("n<{n_max}"),
        witness: format!("worst n={worst}"),
    };
    Ok(VerificationReport::compare(
        &label,
        "lambda_monotone",
        lambdas[worst],
        4.0 * PI * lambdas[worst + 1],
        true,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletRow {
    pub n: usize,
    pub lambda_n: f64,
    pub lower_bound: f64,
    pub middle: f64,
    pub upper_bound_4pi: f64,
    pub upper_bound_2pi_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletNormTable {
    pub phi: String,
    pub rows: Vec<DirichletRow>,
}

impl DirichletNormTable {
    /// `λ_n` and the bracket at `λ = λ_n` for each degree, in the given order.
    pub fn compute(nf: &NFunction, degrees: &[usize]) -> Result<Self> {
        let rows = degrees
            .par_iter()
            .map(|&n| {
                let mut rule = TorusRule::new(&dirichlet(n));
                let lambda = rule.norm(nf)?.value;
                let b = bracket_with(nf, n, lambda, &mut rule)?;
                Ok(DirichletRow {
                    n,
                    lambda_n: lambda,
                    lower_bound: b.lower,
                    middle: b.middle,
                    upper_bound_4pi: b.upper_4pi,
                    upper_bound_2pi_holds: b.upper_2pi_holds,
                })
            })
            .collect::<Result<_>>()?;
        Ok(DirichletNormTable {
            phi: nf.descriptor(),
            rows,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertEstimate {
    /// `sup ‖Hf‖/‖f‖` over the family, a lower bound for `‖H‖_{L^φ}`.
    pub value: f64,
    /// `n/case_id` and descriptor of the maximiser.
    pub witness: String,
    pub cases: usize,
}

/// Family sup of `‖Hf‖_{L^φ} / ‖f‖_{L^φ}` at the given degrees.
pub fn estimate_hilbert_norm(nf: &NFunction, degrees: &[usize], family_spec: &FamilySpec) -> Result<HilbertEstimate> {
    if family_spec.count == 0 || degrees.is_empty() {
        return Err(Error::parameter("Hilbert norm estimate needs a nonempty family"));
    }
    let jobs: Vec<(usize, _)> = degrees
        .iter()
        .flat_map(|&n| family(family_spec, n).into_iter().map(move |c| (n, c)))
        .collect();
    let ratios: Vec<f64> = jobs
        .par_iter()
        .map(|(_, case)| {
            let f = TorusRule::new(&case.poly).norm(nf)?.value;
            if f == 0.0 {
                return Ok(0.0);
            }
            let h = TorusRule::new(&hilbert_transform(&case.poly)).norm(nf)?.value;
            Ok(h / f)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in ratios.iter().enumerate() {
        if *r > ratios[best] {
            best = i;
        }
    }
    let (n, case) = &jobs[best];
    Ok(HilbertEstimate {
        value: ratios[best],
        witness: format!("{n}/{};{}", case.id, case.witness),
        cases: jobs.len(),
    })
}

/// Smallest grid accepted by [`weak_type_estimate`].
pub const WEAK_TYPE_MIN_GRID: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakTypeEstimate {
    /// `sup_t t·|{|Hf| > t}| / ‖f‖_{L¹}`, both measures normalized to mass 1.
    pub value: f64,
    /// Level-set measure resolution, `1/grid_size` in the normalized measure.
    pub measure_error: f64,
    pub grid_size: usize,
}

/// Weak (1,1) quotient of `H` at `f`, counting level sets on a uniform grid.
///
/// The sup over `t ∈ [1e-3·max|Hf|, max|Hf|]` is taken exactly for the
/// empirical distribution: it is attained as `t` approaches a sample value
/// from below.
pub fn weak_type_estimate(f: &TrigPoly, grid_size: usize) -> Result<WeakTypeEstimate> {
    if grid_size < WEAK_TYPE_MIN_GRID {
        return Err(Error::parameter(format!(
            "grid_size must be at least {WEAK_TYPE_MIN_GRID}, got {grid_size}"
        )));
    }
    let measure_error = 1.0 / grid_size as f64;
    let zero = WeakTypeEstimate {
        value: 0.0,
        measure_error,
        grid_size,
    };
    let mut values: Vec<f64> = hilbert_transform(f)
        .eval_uniform(grid_size)
        .iter()
        .map(|v| v.norm())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let top = values[0];
    let l1 = crate::norms::continuous_modular(&NFunction::power(1.0)?, f, 1.0)?.value;
    if top == 0.0 || l1 == 0.0 {
        return Ok(zero);
    }
    let mut sup: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if v < 1e-3 * top {
            break;
        }
        sup = sup.max(v * (i + 1) as f64 / grid_size as f64);
    }
    Ok(WeakTypeEstimate {
        value: sup / l1,
        ..zero
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionTally {
    pub rows: Vec<VerificationReport>,
    pub passed: usize,
    /// Rows above the bound; with a lower estimate of `‖H‖` these decide nothing.
    pub inconclusive: usize,
}

/// `‖S_n g‖ ≤ ((1 + h)/2)² ‖g‖` for each `g`, where `h` estimates `‖H‖_{L^φ}`.
pub fn verify_projection_bound(
    nf: &NFunction,
    g_family: &[TrigPoly],
    n: usize,
    hnorm_estimate: f64,
) -> Result<ProjectionTally> {
    if let Some(g) = g_family.iter().find(|g| g.degree() <= n) {
        return Err(Error::parameter(format!(
            "projection test polynomials need degree > {n}, got {}",
            g.degree()
        )));
    }
    let factor = (0.5 * (1.0 + hnorm_estimate)).powi(2);
    let rows: Vec<VerificationReport> = g_family
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let full = TorusRule::new(g).norm(nf)?.value;
            let part = TorusRule::new(&project(g, n)).norm(nf)?.value;
            let label = CaseLabel {
                phi: nf.descriptor(),
                n,
                case_id: format!("g{i:03}"),
                witness: format!("degree={}", g.degree()),
            };
            let mut row = VerificationReport::compare(&label, "projection", part, factor * full, false);
            if !row.pass {
                row.note = Some("inconclusive".into());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(ProjectionTally {
        inconclusive: rows.len() - passed,
        passed,
        rows,
    })
}
