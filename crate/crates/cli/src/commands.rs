use std::path::{Path, PathBuf};

use orlicz_core::nfunction::{
    check_big_condition, check_small_condition, matuszewska_indices_in, prescan_condition_params,
};
use orlicz_core::samplingfn::t_grid;
use orlicz_core::trigpoly::node_samples;
use orlicz_core::{
    discrete_norm_ln, discrete_norm_omega, interpolating_bound, sampling_function, scan,
    scan_cases, DirichletNormTable, IndexScope, NormKind, NormResult, ScanOptions, TestCase,
    TorusRule, TrigPoly, VerificationReport, XGrid,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, write_notes, write_reports, writer};

/// What a successful command found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Violation,
    BadInput,
    NonConvergence,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
            Outcome::BadInput => 2,
            Outcome::NonConvergence => 3,
        }
    }
}

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl Context {
    fn path(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    fn options(&self) -> ScanOptions {
        ScanOptions {
            claimed_cphi: self.config.claimed_cphi,
            ratio_tol: self.config.tolerances.ratio_rel,
        }
    }
}

fn read_poly(path: &Path) -> Result<TrigPoly, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    TrigPoly::from_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn outcome_of(rows: &[VerificationReport]) -> Outcome {
    rows.iter()
        .map(|r| {
            if r.is_convergence_failure() {
                Outcome::NonConvergence
            } else if r.error.is_some() {
                Outcome::BadInput
            } else if r.hard && !r.pass {
                Outcome::Violation
            } else {
                Outcome::Pass
            }
        })
        .max()
        .unwrap_or(Outcome::Pass)
}

fn report(ctx: &Context, stem: &str, rows: &[VerificationReport]) -> Result<Outcome, CliError> {
    let main = ctx.path(&format!("{stem}.csv"))?;
    write_reports(&main, rows)?;
    write_notes(&ctx.path(&format!("{stem}_notes.csv"))?, rows)?;
    let hard_fail = rows.iter().filter(|r| r.is_violation()).count();
    let soft_fail = rows.iter().filter(|r| !r.hard && !r.pass).count();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "{stem}: {} rows, {hard_fail} hard failures, {soft_fail} soft failures, {errors} errors -> {}",
        rows.len(),
        main.display()
    );
    Ok(outcome_of(rows))
}

pub fn norm(ctx: &Context, poly: &Path) -> Result<Outcome, CliError> {
    let f = read_poly(poly)?;
    let n = f.degree();
    let samples = node_samples(&f, n);
    let path = ctx.path("norm.csv")?;
    let mut w = writer(&path)?;
    w.write_record(["phi", "norm_kind", "value", "residual", "points", "converged"])?;
    let mut rule = TorusRule::new(&f);
    for nf in ctx.config.nfunctions()? {
        let results: [(NormKind, NormResult); 3] = [
            (NormKind::Continuous, rule.norm(&nf)?),
            (NormKind::Ell, discrete_norm_ln(&nf, &samples)?),
            (NormKind::Omega, discrete_norm_omega(&nf, &samples, n)?),
        ];
        for (kind, r) in results {
            println!("{:<16} {:<12} {}", nf.descriptor(), kind.name(), num(r.value));
            w.write_record([
                nf.descriptor(),
                kind.name().to_string(),
                num(r.value),
                num(r.residual),
                r.points.to_string(),
                r.converged.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(Outcome::Pass)
}

pub fn verify(ctx: &Context, poly: &Path) -> Result<Outcome, CliError> {
    let f = read_poly(poly)?;
    let mut degrees: Vec<usize> = ctx.config.degrees.iter().copied().filter(|&n| n >= f.degree()).collect();
    if degrees.is_empty() {
        degrees.push(f.degree());
    }
    let case = TestCase {
        id: "file".into(),
        poly: f,
        witness: poly.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    let cases: Vec<(usize, TestCase)> = degrees.iter().map(|&n| (n, case.clone())).collect();
    let rows = scan_cases(
        &ctx.config.nfunctions()?,
        &degrees,
        &cases,
        "file",
        &ctx.config.checks()?,
        &ctx.options(),
    );
    report(ctx, "verify", &rows)
}

pub fn run_scan(ctx: &Context) -> Result<Outcome, CliError> {
    let rows = scan(
        &ctx.config.nfunctions()?,
        &ctx.config.degrees,
        &ctx.config.family_spec()?,
        &ctx.config.checks()?,
        &ctx.options(),
    );
    report(ctx, "scan", &rows)
}

pub fn indices(ctx: &Context) -> Result<Outcome, CliError> {
    let path = ctx.path("indices.csv")?;
    let mut w = writer(&path)?;
    w.write_record(["phi", "scope", "alpha", "beta", "alpha_residual", "beta_residual"])?;
    for nf in ctx.config.nfunctions()? {
        for (scope, name) in [(IndexScope::Infinity, "infinity"), (IndexScope::Global, "global")] {
            let e = matuszewska_indices_in(&nf, scope);
            w.write_record([
                nf.descriptor(),
                name.to_string(),
                num(e.alpha),
                num(e.beta),
                num(e.alpha_residual),
                num(e.beta_residual),
            ])?;
        }
    }
    w.flush()?;
    println!("indices -> {}", path.display());
    Ok(Outcome::Pass)
}

pub fn conditions(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.config.conditions.clone().unwrap_or_default();
    let path = ctx.path("conditions.csv")?;
    let mut w = writer(&path)?;
    w.write_record(["phi", "condition", "param", "p", "sup_ratio", "argmax_s", "holds", "truncation_remainder"])?;
    let mut outcome = Outcome::Pass;
    for nf in ctx.config.nfunctions()? {
        let (sigma, gamma) = match (cfg.sigma, cfg.gamma) {
            (Some(s), Some(g)) => (s, g),
            (s, g) => {
                let scanned = prescan_condition_params(&nf, cfg.p)?;
                (s.unwrap_or(scanned.sigma), g.unwrap_or(scanned.gamma))
            }
        };
        for r in [check_small_condition(&nf, sigma)?, check_big_condition(&nf, gamma, cfg.p)?] {
            if !r.holds {
                outcome = Outcome::Violation;
            }
            w.write_record([
                nf.descriptor(),
                r.condition.to_string(),
                num(r.param),
                r.p.map(num).unwrap_or_default(),
                num(r.sup_ratio),
                num(r.argmax_s),
                r.holds.to_string(),
                num(r.truncation_remainder),
            ])?;
        }
    }
    w.flush()?;
    println!("conditions -> {}", path.display());
    Ok(outcome)
}

pub fn dirichlet(ctx: &Context) -> Result<Outcome, CliError> {
    let degrees: Vec<usize> = match &ctx.config.dirichlet {
        Some(d) => (0..=d.n_max).collect(),
        None => ctx.config.degrees.clone(),
    };
    let tol = ctx.config.tolerances.ratio_rel;
    let path = ctx.path("dirichlet.csv")?;
    let mut w = writer(&path)?;
    w.write_record(["phi", "n", "lambda_n", "lower_bound", "middle", "upper_bound_4pi", "upper_bound_2pi_holds"])?;
    let mut outcome = Outcome::Pass;
    for nf in ctx.config.nfunctions()? {
        let table = DirichletNormTable::compute(&nf, &degrees)?;
        for r in &table.rows {
            if r.lower_bound > r.middle * (1.0 + tol) || r.middle > r.upper_bound_4pi * (1.0 + tol) {
                outcome = Outcome::Violation;
            }
            w.write_record([
                table.phi.clone(),
                r.n.to_string(),
                num(r.lambda_n),
                num(r.lower_bound),
                num(r.middle),
                num(r.upper_bound_4pi),
                r.upper_bound_2pi_holds.to_string(),
            ])?;
        }
    }
    w.flush()?;
    println!("dirichlet -> {}", path.display());
    Ok(outcome)
}

pub fn sampling_fn(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = ctx.config.sampling_fn.clone().unwrap_or_default();
    let t = t_grid(cfg.t_min, cfg.t_points)?;
    let grid = XGrid {
        points: cfg.x_points,
        ..XGrid::default()
    };
    let path = ctx.path("sampling_fn.csv")?;
    let mut w = writer(&path)?;
    w.write_record(["phi", "t", "raw", "envelope", "closed_form", "ratio", "sup_raw"])?;
    for nf in ctx.config.nfunctions()? {
        let low = sampling_function(&nf, &t, &grid)?;
        let up = interpolating_bound(&nf, &t, &grid)?;
        let ratio = low.ratio();
        for i in 0..t.len() {
            let cf = low.closed_form.as_ref().map(|c| num(c[i])).unwrap_or_default();
            let r = ratio.as_ref().map(|r| num(r[i])).unwrap_or_default();
            w.write_record([
                nf.descriptor(),
                num(t[i]),
                num(low.raw[i]),
                num(low.envelope[i]),
                cf,
                r,
                num(up.raw[i]),
            ])?;
        }
        if low.unsettled.iter().any(|u| *u) {
            eprintln!("{}: inf still falling at the grid end for some t", nf.descriptor());
        }
    }
    w.flush()?;
    println!("sampling-fn -> {}", path.display());
    Ok(Outcome::Pass)
}
