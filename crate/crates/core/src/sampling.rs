//! Checks of the sampling inequalities between `L^φ`, `ℓ_n^φ` and
//! `L^φ(ω_n)`, the test families they run over, and the batch scan driver.
//!
//! Inequalities checked (`q = φ⁻¹(2n+1)`):
//!
//! | check        | lhs                    | rhs              |
//! |--------------|------------------------|------------------|
//! | `simple`     | `‖f‖_ω`                | `3‖f‖_L`         |
//! | `zygmund`    | `avg_k φ(|f(x_k)|/3)`  | `avg φ(|f|)`     |
//! | `upper_thm4` | `‖f‖_ℓ`                | `2C²q‖f‖_ω`      |
//! | `upper_eq4`  | `‖f‖_ℓ`                | `6C²q‖f‖_L`      |
//! | `lower_thm4` | `Cq‖f‖_ω`              | `2‖f‖_ℓ`         |
//! | `lower_thm3` | `‖f‖_L`                | `Ĉ‖f‖_ω`         |
//! | `lower_eq5`  | `(C/Ĉ)q‖f‖_L`          | `2‖f‖_ℓ`         |
//!
//! `Ĉ` is either a claimed constant or the family sup of `‖f‖_L/‖f‖_ω`;
//! the last two rows are hard checks only for a claimed value.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nfunction::{
    in_region, multiplicativity_constant, MultiplicativityCertificate, MultiplicativityMode,
    NFunction,
};
use crate::norms::{discrete_norm_ln, discrete_norm_omega, NormResult, TorusRule};
use crate::trigpoly::{dirichlet, node_samples, random_poly, spike_poly, CoefficientLaw, TrigPoly};

/// `pass ⇔ ratio ≤ 1 + RATIO_TOL`.
pub const RATIO_TOL: f64 = 1e-7;
/// Bisection norms of spikes must match their closed forms to this.
pub const SPIKE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub phi: String,
    pub n: usize,
    pub case_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub witness: String,
    /// Hard rows decide the exit status; soft rows are informational.
    pub hard: bool,
    /// Set when the case could not be computed; the row then fails.
    pub error: Option<String>,
    pub note: Option<String>,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl VerificationReport {
    /// Builds a row for `lhs ≤ rhs` with tolerance [`RATIO_TOL`].
    pub fn compare(label: &CaseLabel, check: &str, lhs: f64, rhs: f64, hard: bool) -> Self {
        Self::compare_tol(label, check, lhs, rhs, hard, RATIO_TOL)
    }

    pub fn compare_tol(
        label: &CaseLabel,
        check: &str,
        lhs: f64,
        rhs: f64,
        hard: bool,
        tol: f64,
    ) -> Self {
        let ratio = ratio_of(lhs, rhs);
        VerificationReport {
            check: check.to_string(),
            phi: label.phi.clone(),
            n: label.n,
            case_id: label.case_id.clone(),
            lhs,
            rhs,
            ratio,
            pass: ratio <= 1.0 + tol,
            witness: label.witness.clone(),
            hard,
            error: None,
            note: None,
        }
    }

    pub fn failed(label: &CaseLabel, check: &str, err: &Error) -> Self {
        VerificationReport {
            check: check.to_string(),
            phi: label.phi.clone(),
            n: label.n,
            case_id: label.case_id.clone(),
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
            pass: false,
            witness: label.witness.clone(),
            hard: true,
            error: Some(err.to_string()),
            note: None,
        }
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        self.note = note;
        self
    }

    /// Failing hard row (including rows that carry an error).
    pub fn is_violation(&self) -> bool {
        self.hard && !self.pass && self.error.is_none()
    }

    pub fn is_convergence_failure(&self) -> bool {
        self.error.as_deref().is_some_and(|e| e.starts_with("convergence error"))
    }
}

/// Identifies one (φ, n, case) combination in reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseLabel {
    pub phi: String,
    pub n: usize,
    pub case_id: String,
    pub witness: String,
}

impl CaseLabel {
    pub fn new(nf: &NFunction, n: usize, case: &TestCase) -> Self {
        CaseLabel {
            phi: nf.descriptor(),
            n,
            case_id: case.id.clone(),
            witness: case.witness.clone(),
        }
    }

    fn single(nf: &NFunction, n: usize, witness: &str) -> Self {
        CaseLabel {
            phi: nf.descriptor(),
            n,
            case_id: "single".into(),
            witness: witness.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// test families

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Constants, single spikes, all-ones, a spike block, Dirichlet, lacunary
    /// and sparse cases first, then gaussian fill.
    Mixed,
    Gaussian,
    Sparse,
    Lacunary,
    Constants,
    Spikes,
    Dirichlet,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Mixed => "mixed",
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Sparse => "sparse",
            FamilyKind::Lacunary => "lacunary",
            FamilyKind::Constants => "constants",
            FamilyKind::Spikes => "spikes",
            FamilyKind::Dirichlet => "dirichlet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "mixed" => FamilyKind::Mixed,
            "gaussian" => FamilyKind::Gaussian,
            "sparse" => FamilyKind::Sparse,
            "lacunary" => FamilyKind::Lacunary,
            "constants" => FamilyKind::Constants,
            "spikes" => FamilyKind::Spikes,
            "dirichlet" => FamilyKind::Dirichlet,
            other => return Err(Error::parameter(format!("unknown family kind '{other}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(count={};seed={})", self.kind.name(), self.count, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub id: String,
    pub poly: TrigPoly,
    /// Family member descriptor: law and derived seed, or the spike set.
    pub witness: String,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for case `index` at degree `n`, so families are prefix-stable.
pub fn case_seed(seed: u64, n: usize, index: usize) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ n as u64) ^ index as u64)
}

fn describe_set(set: &[i64]) -> String {
    let contiguous = set.windows(2).all(|w| w[1] == w[0] + 1);
    if set.len() > 1 && contiguous {
        format!("{}..{}", set[0], set[set.len() - 1])
    } else {
        set.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn spike_case(n: usize, set: Vec<i64>) -> (TrigPoly, String) {
    let witness = format!("spike;S={}", describe_set(&set));
    (spike_poly(n, &set).expect("valid spike set"), witness)
}

fn random_case(n: usize, seed: u64, law: CoefficientLaw) -> (TrigPoly, String) {
    (random_poly(n, seed, law), format!("{};seed={seed}", law.name()))
}

fn constant_case(c: Complex64) -> (TrigPoly, String) {
    (TrigPoly::constant(c), format!("const;{}{:+}i", c.re, c.im))
}

fn mixed_case(n: usize, seed: u64, index: usize) -> (TrigPoly, String) {
    let ni = n as i64;
    let s = case_seed(seed, n, index);
    match index {
        0 => constant_case(Complex64::new(1.0, 0.0)),
        1 => constant_case(Complex64::new(2.0, -1.0)),
        2 => spike_case(n, vec![-ni]),
        3 => spike_case(n, vec![0]),
        4 => spike_case(n, vec![ni]),
        5 => spike_case(n, (-ni..=ni).collect()),
        6 => spike_case(n, (-ni..).take(n.div_ceil(2) + 1).collect()),
        7 => (dirichlet(n), "dirichlet".into()),
        8 => random_case(n, s, CoefficientLaw::Lacunary),
        9 => random_case(n, s, CoefficientLaw::Sparse),
        _ => random_case(n, s, CoefficientLaw::Gaussian),
    }
}

fn family_case(spec: &FamilySpec, n: usize, index: usize) -> (TrigPoly, String) {
    let ni = n as i64;
    let m = 2 * n + 1;
    let s = case_seed(spec.seed, n, index);
    match spec.kind {
        FamilyKind::Mixed => mixed_case(n, spec.seed, index),
        FamilyKind::Gaussian => random_case(n, s, CoefficientLaw::Gaussian),
        FamilyKind::Sparse => random_case(n, s, CoefficientLaw::Sparse),
        FamilyKind::Lacunary => random_case(n, s, CoefficientLaw::Lacunary),
        FamilyKind::Constants => {
            if index == 0 {
                constant_case(Complex64::new(1.0, 0.0))
            } else {
                let p = random_poly(0, s, CoefficientLaw::Gaussian);
                constant_case(p.coeff(0))
            }
        }
        FamilyKind::Spikes => {
            let k = index % m + 1;
            spike_case(n, (-ni..).take(k).collect())
        }
        FamilyKind::Dirichlet => {
            let shift = (index % m) as i64 - ni;
            let x = crate::trigpoly::nodes(n).node(shift);
            // D_n(· - x_{n,j}) has coefficients e^{-ikx}
            let coeffs = (-ni..=ni).map(|k| Complex64::cis(-(k as f64) * x)).collect();
            let p = TrigPoly::new(coeffs).expect("odd length");
            (p, format!("dirichlet;shift={shift}"))
        }
    }
}

/// The first `spec.count` cases of the family at degree `n`.
pub fn family(spec: &FamilySpec, n: usize) -> Vec<TestCase> {
    let width = spec.count.saturating_sub(1).to_string().len().max(3);
    (0..spec.count)
        .map(|i| {
            let (poly, witness) = family_case(spec, n, i);
            TestCase {
                id: format!("c{i:0width$}"),
                poly,
                witness,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// per-case norms

/// All norms of one polynomial needed by the checks.
#[derive(Clone, Debug)]
pub struct CaseNorms {
    pub n: usize,
    pub samples: Vec<Complex64>,
    pub continuous: NormResult,
    pub ell: NormResult,
    pub omega: NormResult,
    /// `(1/2π) ∫ φ(|f|)`.
    pub modular_at_one: f64,
}

impl CaseNorms {
    pub fn compute(nf: &NFunction, f: &TrigPoly, n: usize) -> Result<Self> {
        Self::with_rule(nf, f, n, &mut TorusRule::new(f))
    }

    /// Reuses a quadrature rule built for `f` (it does not depend on φ).
    pub fn with_rule(nf: &NFunction, f: &TrigPoly, n: usize, rule: &mut TorusRule) -> Result<Self> {
        if f.degree() > n {
            return Err(Error::parameter(format!(
                "polynomial of degree {} checked at n = {n}",
                f.degree()
            )));
        }
        let samples = node_samples(f, n);
        Ok(CaseNorms {
            n,
            continuous: rule.norm(nf)?,
            ell: discrete_norm_ln(nf, &samples)?,
            omega: discrete_norm_omega(nf, &samples, n)?,
            modular_at_one: rule.modular(nf, 1.0)?.value,
            samples,
        })
    }
}

fn phi_inv_nodes(nf: &NFunction, n: usize) -> Result<f64> {
    nf.eval_inverse((2 * n + 1) as f64)
}

fn simple_row(label: &CaseLabel, c: &CaseNorms) -> VerificationReport {
    VerificationReport::compare(label, "simple", c.omega.value, 3.0 * c.continuous.value, true)
}

fn zygmund_row(nf: &NFunction, label: &CaseLabel, c: &CaseNorms) -> VerificationReport {
    let w = 1.0 / c.samples.len() as f64;
    let lhs: f64 = c.samples.iter().map(|v| w * nf.eval(v.norm() / 3.0)).sum();
    VerificationReport::compare(label, "zygmund", lhs, c.modular_at_one, true)
}

/// Pairs `(a, b)` the two halves of the comparison proofs feed into the
/// multiplicativity assumption for this polynomial.
fn realized_pairs(
    nf: &NFunction,
    c: &CaseNorms,
    mode: MultiplicativityMode,
    constant: f64,
) -> Result<Vec<(f64, f64)>> {
    let q = phi_inv_nodes(nf, c.n)?;
    let mut pairs = Vec::new();
    match mode {
        MultiplicativityMode::Super => {
            if c.omega.value > 0.0 {
                for v in &c.samples {
                    let p = v.norm() / c.omega.value;
                    if p >= constant {
                        pairs.push((p / (constant * q), q));
                    }
                }
            }
            pairs.push((nf.eval_inverse(1.0 / (2 * c.n + 1) as f64)?, q));
        }
        MultiplicativityMode::Sub => {
            if c.ell.value > 0.0 {
                for v in &c.samples {
                    let a = v.norm() / c.ell.value;
                    if q * a >= 1.0 {
                        pairs.push((a, q));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

fn pair_note(
    nf: &NFunction,
    cert: &MultiplicativityCertificate,
    pairs: &[(f64, f64)],
) -> Option<String> {
    let outside = pairs.iter().filter(|p| !in_region(p.0, p.1)).count();
    let off_grid = pairs
        .iter()
        .filter(|p| in_region(p.0, p.1) && (p.0 < cert.grid.a_min || p.1 > cert.grid.b_max))
        .count();
    let broken = pairs
        .iter()
        .filter(|p| in_region(p.0, p.1) && !cert.holds_at(nf, p.0, p.1))
        .count();
    let mut parts = Vec::new();
    if outside > 0 {
        parts.push(format!("{outside} realized pair(s) outside a<1<=ab<b"));
    }
    if off_grid > 0 {
        parts.push(format!("{off_grid} realized pair(s) outside the certificate grid"));
    }
    if broken > 0 {
        parts.push(format!("certificate fails at {broken} realized pair(s)"));
    }
    (!parts.is_empty()).then(|| parts.join("; "))
}

fn upper_rows(
    nf: &NFunction,
    label: &CaseLabel,
    c: &CaseNorms,
    cert: &MultiplicativityCertificate,
) -> Result<Vec<VerificationReport>> {
    let q = phi_inv_nodes(nf, c.n)?;
    let k = cert.constant * cert.constant;
    let note = pair_note(nf, cert, &realized_pairs(nf, c, cert.mode, cert.constant)?);
    Ok(vec![
        VerificationReport::compare(label, "upper_thm4", c.ell.value, 2.0 * k * q * c.omega.value, true)
            .with_note(note.clone()),
        VerificationReport::compare(label, "upper_eq4", c.ell.value, 6.0 * k * q * c.continuous.value, true)
            .with_note(note),
    ])
}

fn lower_rows(
    nf: &NFunction,
    label: &CaseLabel,
    c: &CaseNorms,
    cert: &MultiplicativityCertificate,
    cphi: &CphiEstimate,
) -> Result<Vec<VerificationReport>> {
    let q = phi_inv_nodes(nf, c.n)?;
    let note = pair_note(nf, cert, &realized_pairs(nf, c, cert.mode, cert.constant)?);
    let lhs5 = cert.constant / cphi.value * q * c.continuous.value;
    Ok(vec![
        VerificationReport::compare(
            label,
            "lower_thm4",
            cert.constant * q * c.omega.value,
            2.0 * c.ell.value,
            true,
        )
        .with_note(note),
        VerificationReport::compare(label, "lower_thm3", c.continuous.value, cphi.value * c.omega.value, cphi.claimed),
        VerificationReport::compare(label, "lower_eq5", lhs5, 2.0 * c.ell.value, cphi.claimed),
    ])
}

fn require_super(cert: &MultiplicativityCertificate) -> Result<()> {
    if cert.mode != MultiplicativityMode::Super {
        return Err(Error::parameter("upper sampling needs a super-multiplicativity certificate"));
    }
    Ok(())
}

fn require_sub(nf: &NFunction, cert: &MultiplicativityCertificate) -> Result<()> {
    if cert.mode != MultiplicativityMode::Sub {
        return Err(Error::parameter("lower sampling needs a sub-multiplicativity certificate"));
    }
    if nf.delta2_constant().non_delta2 {
        return Err(Error::parameter(format!("{} fails the doubling condition", nf.descriptor())));
    }
    Ok(())
}

/// `‖f‖_{L^φ(ω_n)} ≤ 3‖f‖_{L^φ}`.
pub fn verify_simple(nf: &NFunction, f: &TrigPoly, n: usize) -> Result<VerificationReport> {
    let c = CaseNorms::compute(nf, f, n)?;
    Ok(simple_row(&CaseLabel::single(nf, n, "given"), &c))
}

/// `(1/(2n+1)) Σ φ(|f(x_k)|/3) ≤ (1/2π) ∫ φ(|f|)`.
pub fn verify_modular_zygmund(nf: &NFunction, f: &TrigPoly, n: usize) -> Result<VerificationReport> {
    let c = CaseNorms::compute(nf, f, n)?;
    Ok(zygmund_row(nf, &CaseLabel::single(nf, n, "given"), &c))
}

/// The `2C²` (against `ω_n`) and `6C²` (against `L^φ`) upper bounds for `‖f‖_ℓ`.
pub fn verify_upper_sampling(
    nf: &NFunction,
    f: &TrigPoly,
    n: usize,
    cert: &MultiplicativityCertificate,
) -> Result<Vec<VerificationReport>> {
    require_super(cert)?;
    let c = CaseNorms::compute(nf, f, n)?;
    upper_rows(nf, &CaseLabel::single(nf, n, "given"), &c, cert)
}

/// The constant-free lower bound plus the two forms that involve `C_φ`.
pub fn verify_lower_sampling(
    nf: &NFunction,
    f: &TrigPoly,
    n: usize,
    cert: &MultiplicativityCertificate,
    cphi: &CphiEstimate,
) -> Result<Vec<VerificationReport>> {
    require_sub(nf, cert)?;
    let c = CaseNorms::compute(nf, f, n)?;
    lower_rows(nf, &CaseLabel::single(nf, n, "given"), &c, cert, cphi)
}

// ---------------------------------------------------------------------------
// C_φ

#[derive(Clone, Debug, PartialEq)]
pub struct CphiEstimate {
    pub value: f64,
    /// A value supplied by the user rather than measured.
    pub claimed: bool,
    pub family: String,
    /// `(n, sup over the family at that degree)`.
    pub per_degree: Vec<(usize, f64)>,
    /// `n/case_id` of the maximiser.
    pub witness: String,
}

impl CphiEstimate {
    pub fn claimed(value: f64) -> Self {
        CphiEstimate {
            value,
            claimed: true,
            family: "claimed".into(),
            per_degree: Vec::new(),
            witness: String::new(),
        }
    }

    fn from_ratios(family: String, ratios: &[(usize, String, f64)]) -> Self {
        let mut per_degree: Vec<(usize, f64)> = Vec::new();
        let mut best = (f64::NEG_INFINITY, String::new());
        for (n, id, r) in ratios {
            match per_degree.iter_mut().find(|(m, _)| m == n) {
                Some(entry) => entry.1 = entry.1.max(*r),
                None => per_degree.push((*n, *r)),
            }
            if *r > best.0 {
                best = (*r, format!("{n}/{id}"));
            }
        }
        CphiEstimate {
            value: best.0,
            claimed: false,
            family,
            per_degree,
            witness: best.1,
        }
    }
}

/// `sup ‖f‖_{L^φ} / ‖f‖_{L^φ(ω_n)}` over the family at every degree.
pub fn estimate_cphi(
    nf: &NFunction,
    degrees: &[usize],
    family_spec: &FamilySpec,
) -> Result<CphiEstimate> {
    if family_spec.count == 0 || degrees.is_empty() {
        return Err(Error::parameter("C_phi estimate needs a nonempty family and degree list"));
    }
    let jobs: Vec<(usize, TestCase)> = degrees
        .iter()
        .flat_map(|&n| family(family_spec, n).into_iter().map(move |c| (n, c)))
        .collect();
    let ratios: Vec<(usize, String, f64)> = jobs
        .par_iter()
        .map(|(n, case)| {
            let c = CaseNorms::compute(nf, &case.poly, *n)?;
            Ok((*n, case.id.clone(), ratio_of(c.continuous.value, c.omega.value)))
        })
        .collect::<Result<_>>()?;
    Ok(CphiEstimate::from_ratios(family_spec.to_string(), &ratios))
}

// ---------------------------------------------------------------------------
// necessity

#[derive(Clone, Debug, PartialEq)]
pub struct NecessityReport {
    pub report: VerificationReport,
    /// `φ⁻¹((2n+1)/k) / (φ⁻¹(1/k) φ⁻¹(2n+1))`.
    pub c_implied: f64,
    pub ell_closed: f64,
    pub ell_bisection: f64,
    pub omega_closed: f64,
    pub omega_bisection: f64,
    /// The `(a, b)` pair the implied constant corresponds to.
    pub pair: (f64, f64),
}

/// Spike polynomial with `k` ones: closed-form norms against bisection, and
/// the multiplicativity constant the sampling inequality forces.
///
/// With a certificate the row compares `φ⁻¹((2n+1)/k)` against
/// `C φ⁻¹(1/k) φ⁻¹(2n+1)` (hard); without one the bound uses `C = 1` and
/// the row is informational.
pub fn necessity_check(
    nf: &NFunction,
    n: usize,
    k: usize,
    cert: Option<&MultiplicativityCertificate>,
) -> Result<NecessityReport> {
    let m = 2 * n + 1;
    if k == 0 || k > m {
        return Err(Error::parameter(format!("k must lie in 1..={m}, got {k}")));
    }
    let ni = n as i64;
    let set: Vec<i64> = (-ni..).take(k).collect();
    let poly = spike_poly(n, &set)?;
    let samples = node_samples(&poly, n);
    let ell_bisection = discrete_norm_ln(nf, &samples)?.value;
    let omega_bisection = discrete_norm_omega(nf, &samples, n)?.value;
    let a = nf.eval_inverse(1.0 / k as f64)?;
    let top = nf.eval_inverse(m as f64 / k as f64)?;
    let b = phi_inv_nodes(nf, n)?;
    let ell_closed = 1.0 / a;
    let omega_closed = 1.0 / top;
    for (what, x, y) in [("ell", ell_bisection, ell_closed), ("omega", omega_bisection, omega_closed)] {
        if (x - y).abs() > SPIKE_TOL * y {
            return Err(Error::convergence(
                "spike norms",
                format!("{what} norm {x} disagrees with closed form {y}"),
            ));
        }
    }
    let c_implied = top / (a * b);
    let label = CaseLabel {
        phi: nf.descriptor(),
        n,
        case_id: format!("k{k:04}"),
        witness: format!("spike;S={}", describe_set(&set)),
    };
    let constant = cert.map_or(1.0, |c| c.constant);
    let report = VerificationReport::compare(&label, "necessity", top, constant * a * b, cert.is_some());
    Ok(NecessityReport {
        report,
        c_implied,
        ell_closed,
        ell_bisection,
        omega_closed,
        omega_bisection,
        pair: (a, b),
    })
}

// ---------------------------------------------------------------------------
// scan

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Simple,
    Zygmund,
    Upper,
    Lower,
    Necessity,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Simple => "simple",
            Check::Zygmund => "zygmund",
            Check::Upper => "upper",
            Check::Lower => "lower",
            Check::Necessity => "necessity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "simple" => Check::Simple,
            "zygmund" => Check::Zygmund,
            "upper" => Check::Upper,
            "lower" => Check::Lower,
            "necessity" => Check::Necessity,
            other => return Err(Error::parameter(format!("unknown check '{other}'"))),
        })
    }

    pub const ALL: [Check; 5] = [Check::Simple, Check::Zygmund, Check::Upper, Check::Lower, Check::Necessity];
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOptions {
    /// Use this `C_φ` instead of the family estimate; makes the `C_φ` rows hard.
    pub claimed_cphi: Option<f64>,
    pub ratio_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            claimed_cphi: None,
            ratio_tol: RATIO_TOL,
        }
    }
}

struct PhiSetup {
    nf: NFunction,
    upper: Option<std::result::Result<MultiplicativityCertificate, Error>>,
    lower: Option<std::result::Result<MultiplicativityCertificate, Error>>,
}

fn setup(nf: &NFunction, checks: &[Check]) -> PhiSetup {
    let wants = |c: Check| checks.contains(&c);
    PhiSetup {
        nf: nf.clone(),
        upper: (wants(Check::Upper) || wants(Check::Necessity))
            .then(|| multiplicativity_constant(nf, MultiplicativityMode::Super)),
        lower: wants(Check::Lower).then(|| {
            let cert = multiplicativity_constant(nf, MultiplicativityMode::Sub)?;
            require_sub(nf, &cert)?;
            Ok(cert)
        }),
    }
}

fn retol(mut r: VerificationReport, tol: f64) -> VerificationReport {
    if r.error.is_none() {
        r.pass = r.ratio <= 1.0 + tol;
    }
    r
}

/// Runs every selected check over `φ × degrees × family`. Case failures are
/// recorded in their rows. Output is sorted by `(check, φ, n, case_id)`.
pub fn scan(
    nfs: &[NFunction],
    degrees: &[usize],
    family_spec: &FamilySpec,
    checks: &[Check],
    options: &ScanOptions,
) -> Vec<VerificationReport> {
    let needs_cases = checks.iter().any(|c| *c != Check::Necessity);
    let cases: Vec<(usize, TestCase)> = if needs_cases && !nfs.is_empty() {
        degrees
            .iter()
            .flat_map(|&n| family(family_spec, n).into_iter().map(move |c| (n, c)))
            .collect()
    } else {
        Vec::new()
    };
    scan_cases(nfs, degrees, &cases, &family_spec.to_string(), checks, options)
}

/// [`scan`] over explicit `(n, case)` pairs. `degrees` only drives the
/// necessity check; `family_label` names the `C_φ` estimate.
pub fn scan_cases(
    nfs: &[NFunction],
    degrees: &[usize],
    cases: &[(usize, TestCase)],
    family_label: &str,
    checks: &[Check],
    options: &ScanOptions,
) -> Vec<VerificationReport> {
    if checks.is_empty() || degrees.is_empty() || nfs.is_empty() {
        return Vec::new();
    }
    let setups: Vec<PhiSetup> = nfs.iter().map(|nf| setup(nf, checks)).collect();
    let wants = |c: Check| checks.contains(&c);

    // norms per (case, φ); the quadrature rule is shared across φ
    let norms: Vec<Vec<Result<CaseNorms>>> = cases
        .par_iter()
        .map(|(n, case)| {
            let mut rule = TorusRule::new(&case.poly);
            setups
                .iter()
                .map(|s| CaseNorms::with_rule(&s.nf, &case.poly, *n, &mut rule))
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for (pi, s) in setups.iter().enumerate() {
        let nf = &s.nf;
        let cphi = wants(Check::Lower).then(|| match options.claimed_cphi {
            Some(v) => CphiEstimate::claimed(v),
            None => {
                let ratios: Vec<(usize, String, f64)> = cases
                    .iter()
                    .zip(&norms)
                    .filter_map(|((n, case), per_phi)| {
                        per_phi[pi]
                            .as_ref()
                            .ok()
                            .map(|c| (*n, case.id.clone(), ratio_of(c.continuous.value, c.omega.value)))
                    })
                    .collect();
                CphiEstimate::from_ratios(family_label.to_string(), &ratios)
            }
        });
        for ((n, case), per_phi) in cases.iter().zip(&norms) {
            let label = CaseLabel::new(nf, *n, case);
            let c = match &per_phi[pi] {
                Ok(c) => c,
                Err(e) => {
                    for check in checks.iter().filter(|c| **c != Check::Necessity) {
                        rows.push(VerificationReport::failed(&label, check.name(), e));
                    }
                    continue;
                }
            };
            if wants(Check::Simple) {
                rows.push(simple_row(&label, c));
            }
            if wants(Check::Zygmund) {
                rows.push(zygmund_row(nf, &label, c));
            }
            if wants(Check::Upper) {
                match s.upper.as_ref().expect("set up") {
                    Ok(cert) => match upper_rows(nf, &label, c, cert) {
                        Ok(r) => rows.extend(r),
                        Err(e) => rows.push(VerificationReport::failed(&label, "upper", &e)),
                    },
                    Err(e) => rows.push(VerificationReport::failed(&label, "upper", e)),
                }
            }
            if wants(Check::Lower) {
                match s.lower.as_ref().expect("set up") {
                    Ok(cert) => match lower_rows(nf, &label, c, cert, cphi.as_ref().expect("set up")) {
                        Ok(r) => rows.extend(r),
                        Err(e) => rows.push(VerificationReport::failed(&label, "lower", &e)),
                    },
                    Err(e) => rows.push(VerificationReport::failed(&label, "lower", e)),
                }
            }
        }
        if wants(Check::Necessity) {
            for &n in degrees {
                let cert = s.upper.as_ref().expect("set up");
                for k in 1..=2 * n + 1 {
                    let row = match cert {
                        Ok(cert) => {
                            match necessity_pair(nf, n, k).and_then(|p| cert.refine(nf, &[p])) {
                                Ok(refined) => necessity_check(nf, n, k, Some(&refined)).map(|r| {
                                    let note = (refined.constant > cert.constant)
                                        .then(|| format!("certificate refined to {:e}", refined.constant));
                                    r.report.with_note(note)
                                }),
                                Err(e) => Err(e),
                            }
                        }
                        Err(e) => Err(e.clone()),
                    };
                    rows.push(row.unwrap_or_else(|e| {
                        let label = CaseLabel {
                            phi: nf.descriptor(),
                            n,
                            case_id: format!("k{k:04}"),
                            witness: String::new(),
                        };
                        VerificationReport::failed(&label, "necessity", &e)
                    }));
                }
            }
        }
    }
    let mut rows: Vec<VerificationReport> = rows.into_iter().map(|r| retol(r, options.ratio_tol)).collect();
    rows.sort_by(|a, b| {
        (a.check.as_str(), a.phi.as_str(), a.n, a.case_id.as_str())
            .cmp(&(b.check.as_str(), b.phi.as_str(), b.n, b.case_id.as_str()))
    });
    rows
}

fn necessity_pair(nf: &NFunction, n: usize, k: usize) -> Result<(f64, f64)> {
    Ok((nf.eval_inverse(1.0 / k as f64)?, phi_inv_nodes(nf, n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunction::catalogue;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn family_is_prefix_stable_and_deterministic() {
        let big = FamilySpec { kind: FamilyKind::Mixed, count: 40, seed: 42 };
        let small = FamilySpec { count: 15, ..big };
        let a = family(&big, 8);
        let b = family(&small, 8);
        assert_eq!(&a[..15], &b[..]);
        assert_eq!(a, family(&big, 8));
        assert_eq!(a[0].id, "c000");
        assert!(a.iter().all(|c| c.poly.degree() <= 8));
        let names: Vec<&str> = a.iter().map(|c| c.witness.split(';').next().unwrap()).collect();
        for kind in ["const", "spike", "dirichlet", "lacunary", "sparse", "gaussian"] {
            assert!(names.contains(&kind), "{kind}");
        }
        assert_ne!(family(&big, 4)[20].poly, family(&FamilySpec { seed: 43, ..big }, 4)[20].poly);
    }

    #[test]
    fn simple_examples() {
        let sq = NFunction::power(2.0).unwrap();
        let r = verify_simple(&sq, &TrigPoly::constant(c(1.0)), 3).unwrap();
        assert!((r.ratio - 1.0 / 3.0).abs() < 1e-12 && r.pass);
        for n in [1usize, 8, 64] {
            let r = verify_simple(&sq, &dirichlet(n), n).unwrap();
            // ‖D_n‖_ω = (2n+1)/√(2n+1), ‖D_n‖_L² = √(2n+1)
            let m = (2 * n + 1) as f64;
            assert!((r.lhs - m.sqrt()).abs() < 1e-9 * m && (r.rhs - 3.0 * m.sqrt()).abs() < 1e-9 * m);
            assert!(r.pass);
        }
        assert!(verify_simple(&sq, &dirichlet(5), 4).is_err());
    }

    #[test]
    fn zygmund_examples() {
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let z = verify_modular_zygmund(&pl, &TrigPoly::zero(3), 3).unwrap();
        assert_eq!((z.lhs, z.rhs, z.pass), (0.0, 0.0, true));
        let three = verify_modular_zygmund(&pl, &TrigPoly::constant(c(3.0)), 2).unwrap();
        assert!((three.lhs - 1.0).abs() < 1e-14 && (three.rhs - pl.eval(3.0)).abs() < 1e-12);
        assert!(three.pass);
    }

    #[test]
    fn upper_examples() {
        let sq = NFunction::power(2.0).unwrap();
        let cert = multiplicativity_constant(&sq, MultiplicativityMode::Super).unwrap();
        for n in [2usize, 9] {
            let rows = verify_upper_sampling(&sq, &spike_poly(n, &[0]).unwrap(), n, &cert).unwrap();
            let eq4 = rows.iter().find(|r| r.check == "upper_eq4").unwrap();
            assert!((eq4.lhs - 1.0).abs() < 1e-12 && (eq4.rhs - 6.0).abs() < 1e-9);
            assert!(rows.iter().all(|r| r.pass));
        }
        // constant 1: ‖1‖_ℓ = 1/φ⁻¹(1/(2n+1)) ≤ 2C² φ⁻¹(2n+1)
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let cert = multiplicativity_constant(&pl, MultiplicativityMode::Super).unwrap();
        let n = 16;
        let rows = verify_upper_sampling(&pl, &TrigPoly::constant(c(1.0)), n, &cert).unwrap();
        let thm4 = &rows[0];
        let want = 1.0 / pl.eval_inverse(1.0 / 33.0).unwrap();
        assert!((thm4.lhs - want).abs() < 1e-9 * want && thm4.pass);
        assert!(thm4.note.is_none(), "{:?}", thm4.note);
    }

    #[test]
    fn lower_examples() {
        let sq = NFunction::power(2.0).unwrap();
        let cert = multiplicativity_constant(&sq, MultiplicativityMode::Sub).unwrap();
        let cphi = CphiEstimate::claimed(1.0);
        let n = 5;
        let m = 11.0f64;
        let all: Vec<i64> = (-5..=5).collect();
        let rows = verify_lower_sampling(&sq, &spike_poly(n, &all).unwrap(), n, &cert, &cphi).unwrap();
        let thm4 = &rows[0];
        assert!((thm4.lhs - m.sqrt()).abs() < 1e-9 && (thm4.rhs - 2.0 * m.sqrt()).abs() < 1e-9);
        let rows = verify_lower_sampling(&sq, &spike_poly(n, &[2]).unwrap(), n, &cert, &cphi).unwrap();
        assert!((rows[0].lhs - 1.0).abs() < 1e-9 && (rows[0].rhs - 2.0).abs() < 1e-9);
        assert!(rows.iter().all(|r| r.pass));
        let wrong = multiplicativity_constant(&sq, MultiplicativityMode::Super).unwrap();
        assert!(verify_lower_sampling(&sq, &dirichlet(2), 2, &wrong, &cphi).is_err());
    }

    #[test]
    fn cphi_examples() {
        let sq = NFunction::power(2.0).unwrap();
        let consts = FamilySpec { kind: FamilyKind::Constants, count: 5, seed: 1 };
        let est = estimate_cphi(&sq, &[1, 4], &consts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
        let g = FamilySpec { kind: FamilyKind::Gaussian, count: 20, seed: 3 };
        let e32 = estimate_cphi(&sq, &[4, 8, 16, 32], &g).unwrap();
        let e64 = estimate_cphi(&sq, &[4, 8, 16, 32, 64], &g).unwrap();
        assert!(e64.value >= e32.value && e64.value <= 2.0 * e32.value);
        assert!(e32.value >= 1.0 - 1e-9);
        // a larger family can only raise the sup
        let g40 = FamilySpec { count: 40, ..g };
        assert!(estimate_cphi(&sq, &[8], &g40).unwrap().value >= estimate_cphi(&sq, &[8], &g).unwrap().value);
    }

    #[test]
    fn linear_phi_dirichlet_ratio_grows() {
        let lin = NFunction::power(1.0).unwrap();
        let d = FamilySpec { kind: FamilyKind::Dirichlet, count: 1, seed: 0 };
        let est = estimate_cphi(&lin, &[8, 32, 128], &d).unwrap();
        let r: Vec<f64> = est.per_degree.iter().map(|p| p.1).collect();
        assert!(r[0] < r[1] && r[1] < r[2]);
        assert!(r[2] / r[0] >= 1.5, "{r:?}");
        // Lebesgue constants: (4/π²) ln n + O(1)
        let growth = (r[2] - r[0]) / (128f64 / 8.0).ln();
        assert!((growth - 4.0 / std::f64::consts::PI.powi(2)).abs() < 0.05, "{growth}");
    }

    #[test]
    fn necessity_examples() {
        for nf in catalogue() {
            let n = 8;
            for k in 1..=17 {
                let r = necessity_check(&nf, n, k, None).unwrap();
                if nf.descriptor().starts_with("power(") {
                    assert!((r.c_implied - 1.0).abs() < 1e-12);
                }
                assert!((r.ell_bisection - r.ell_closed).abs() <= 1e-9 * r.ell_closed);
            }
        }
        let pl = NFunction::power_log(2.0, 1.0).unwrap();
        let cert = multiplicativity_constant(&pl, MultiplicativityMode::Super).unwrap();
        let mut pairs = Vec::new();
        let mut sup: f64 = 0.0;
        for n in [1usize, 4, 16, 64] {
            for k in 1..=2 * n + 1 {
                let r = necessity_check(&pl, n, k, None).unwrap();
                sup = sup.max(r.c_implied);
                pairs.push(r.pair);
            }
        }
        let refined = cert.refine(&pl, &pairs).unwrap();
        assert!(sup <= refined.constant * (1.0 + 1e-12), "{sup} vs {}", refined.constant);
        assert!(necessity_check(&pl, 3, 0, None).is_err());
        assert!(necessity_check(&pl, 3, 8, None).is_err());
    }

    #[test]
    fn scan_basics() {
        let spec = FamilySpec { kind: FamilyKind::Mixed, count: 12, seed: 42 };
        assert!(scan(&catalogue(), &[], &spec, &[Check::Simple], &ScanOptions::default()).is_empty());
        assert!(scan(&catalogue(), &[4], &spec, &[], &ScanOptions::default()).is_empty());
        let checks = [Check::Simple, Check::Zygmund, Check::Upper, Check::Lower];
        let a = scan(&catalogue(), &[2, 4], &spec, &checks, &ScanOptions::default());
        let b = scan(&catalogue(), &[2, 4], &spec, &checks, &ScanOptions::default());
        assert_eq!(a, b);
        assert_eq!(a.len(), 4 * 2 * 12 * 7);
        assert!(a.iter().all(|r| r.pass && r.error.is_none()), "{:?}", a.iter().find(|r| !r.pass));
        let mut sorted = a.clone();
        sorted.sort_by(|x, y| (x.check.as_str(), x.phi.as_str(), x.n, x.case_id.as_str()).cmp(&(y.check.as_str(), y.phi.as_str(), y.n, y.case_id.as_str())));
        assert_eq!(a, sorted);
    }
}
