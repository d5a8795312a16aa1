//! Sampling function of an N-function `Ψ`: the greatest convex minorant of
//! `t ↦ inf_{x > 1/t} Ψ(tx)/Ψ(x)` on `(0, 1]`, plus the sup variant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nfunction::{Family, NFunction};

/// Log-spaced `x ∈ (1/t, span/t]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XGrid {
    pub points: usize,
    pub span: f64,
}

impl Default for XGrid {
    fn default() -> Self {
        XGrid {
            points: 400,
            span: 1e8,
        }
    }
}

impl XGrid {
    fn values(&self, t: f64) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = ((1.0 / t).ln(), (self.span / t).ln());
        (1..=self.points).map(move |i| (a + (b - a) * i as f64 / self.points as f64).exp())
    }
}

/// Minimum number of `x` points accepted.
pub const MIN_X_POINTS: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawBound {
    pub value: f64,
    /// `x` where the extremum was found.
    pub argext: f64,
    /// The running extremum still moved in the last tenth of the grid.
    pub unsettled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Inf,
    Sup,
}

fn extremum(psi: &NFunction, t: f64, grid: &XGrid, dir: Direction) -> Result<RawBound> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::parameter(format!("t must lie in (0, 1], got {t}")));
    }
    if grid.points < MIN_X_POINTS || !(grid.span > 1.0) {
        return Err(Error::parameter(format!(
            "x grid needs at least {MIN_X_POINTS} points and span > 1"
        )));
    }
    let lt = t.ln();
    let tail = grid.points - grid.points / 10;
    let mut best = RawBound {
        value: match dir {
            Direction::Inf => f64::INFINITY,
            Direction::Sup => f64::NEG_INFINITY,
        },
        argext: f64::NAN,
        unsettled: false,
    };
    for (i, x) in grid.values(t).enumerate() {
        let u = x.ln();
        let r = (psi.ln_eval_exp(u + lt) - psi.ln_eval_exp(u)).exp();
        let better = match dir {
            Direction::Inf => r < best.value * (1.0 - 1e-12),
            Direction::Sup => r > best.value * (1.0 + 1e-12),
        };
        if better || i == 0 {
            best.value = r;
            best.argext = x;
            best.unsettled = i >= tail && i > 0;
        }
    }
    Ok(best)
}

/// `inf_{x>1/t} Ψ(tx)/Ψ(x)` over the grid; `unsettled` flags an inf that was
/// still falling at the right end (the sampling space is then degenerate).
pub fn raw_sampling_bound(psi: &NFunction, t: f64, grid: &XGrid) -> Result<RawBound> {
    extremum(psi, t, grid, Direction::Inf)
}

/// `sup_{x>1/t} Ψ(tx)/Ψ(x)` over the grid.
pub fn raw_interpolating_bound(psi: &NFunction, t: f64, grid: &XGrid) -> Result<RawBound> {
    extremum(psi, t, grid, Direction::Sup)
}

/// `count` log-spaced points in `[lo, 1]`.
pub fn t_grid(lo: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < 1.0) || count < 2 {
        return Err(Error::parameter("t grid needs 0 < lo < 1 and at least 2 points"));
    }
    let a = lo.ln();
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                1.0
            } else {
                (a * (1.0 - i as f64 / (count - 1) as f64)).exp()
            }
        })
        .collect())
}

/// 200 points over `[1e-6, 1]`.
pub fn default_t_grid() -> Vec<f64> {
    t_grid(1e-6, 200).expect("valid grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeTable {
    pub t: Vec<f64>,
    pub raw: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Indices of the hull vertices in `t`.
    pub hull: Vec<usize>,
    pub unsettled: Vec<bool>,
    /// Reference shape `t^α log^{-β}(1 + 1/t)` when one is known for `Ψ`.
    pub closed_form: Option<Vec<f64>>,
    /// `false` for the sup variant, whose hull is only a candidate.
    pub canonical: bool,
}

impl EnvelopeTable {
    /// `envelope / closed_form` per row.
    pub fn ratio(&self) -> Option<Vec<f64>> {
        self.closed_form
            .as_ref()
            .map(|c| self.envelope.iter().zip(c).map(|(e, c)| e / c).collect())
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone chain over points sorted by `x`: lower hull for `upper = false`.
pub fn hull_indices(x: &[f64], y: &[f64], upper: bool) -> Vec<usize> {
    let sign = if upper { -1.0 } else { 1.0 };
    let mut h: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while h.len() >= 2 {
            let (o, a) = (h[h.len() - 2], h[h.len() - 1]);
            if sign * cross((x[o], y[o]), (x[a], y[a]), (x[i], y[i])) <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Piecewise-linear interpolation of the hull back onto every grid point.
pub fn interpolate_hull(x: &[f64], y: &[f64], hull: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in a..=b {
            out[i] = if i == a {
                y[a]
            } else if i == b {
                y[b]
            } else {
                let s = (x[i] - x[a]) / (x[b] - x[a]);
                y[a] + s * (y[b] - y[a])
            };
        }
    }
    if let [only] = hull {
        out[*only] = y[*only];
    }
    out
}

fn closed_form(psi: &NFunction, t: &[f64]) -> Option<Vec<f64>> {
    let (alpha, beta, _) = psi.exponents();
    match psi.family() {
        Family::Power => Some(t.iter().map(|t| t.powf(alpha)).collect()),
        Family::PowerLog => Some(
            t.iter()
                .map(|t| {
                    let base = t.powf(alpha);
                    if beta > 0.0 {
                        base / (1.0 / t).ln_1p().powf(beta)
                    } else {
                        base
                    }
                })
                .collect(),
        ),
        _ => None,
    }
}

fn table(psi: &NFunction, t: &[f64], grid: &XGrid, dir: Direction) -> Result<EnvelopeTable> {
    if t.is_empty() {
        return Err(Error::parameter("t grid is empty"));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parameter("t grid must be strictly increasing"));
    }
    let raws: Vec<RawBound> = t
        .par_iter()
        .map(|&t| extremum(psi, t, grid, dir))
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = raws.iter().map(|r| r.value).collect();
    let hull = hull_indices(t, &raw, dir == Direction::Sup);
    let envelope = interpolate_hull(t, &raw, &hull);
    Ok(EnvelopeTable {
        t: t.to_vec(),
        envelope,
        hull,
        unsettled: raws.iter().map(|r| r.unsettled).collect(),
        closed_form: closed_form(psi, t),
        raw,
        canonical: dir == Direction::Inf,
    })
}

/// Raw inf values on `t` and their greatest convex minorant in linear coordinates.
pub fn sampling_function(psi: &NFunction, t: &[f64], grid: &XGrid) -> Result<EnvelopeTable> {
    table(psi, t, grid, Direction::Inf)
}

/// Raw sup values on `t` and their upper hull. A least convex majorant need
/// not exist; the hull is a candidate and the table is marked non-canonical.
pub fn interpolating_bound(psi: &NFunction, t: &[f64], grid: &XGrid) -> Result<EnvelopeTable> {
    table(psi, t, grid, Direction::Sup)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEstimate {
    /// Extrapolated `d ln ψ / d ln t` as `t → 0`.
    pub slope: f64,
    /// Secant slopes at the left end and at half the log-depth.
    pub near: f64,
    pub mid: f64,
}

/// Log-log slope of the envelope at `t → 0`, extrapolated linearly in `1/|ln t|`
/// from secant slopes at the first grid segment and at the segment halfway
/// (in `ln t`) to 1.
pub fn slope_at_zero(table: &EnvelopeTable) -> Result<SlopeEstimate> {
    let t = &table.t;
    let y = &table.envelope;
    if t.len() < 4 || t[0] >= 1.0 || y.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::parameter("slope needs at least 4 positive envelope points below 1"));
    }
    let secant = |i: usize| {
        let s = (y[i + 1].ln() - y[i].ln()) / (t[i + 1].ln() - t[i].ln());
        let u = 0.5 * (t[i].ln() + t[i + 1].ln());
        (s, 1.0 / u.abs())
    };
    let (s1, x1) = secant(0);
    let half = 0.5 * t[0].ln();
    let j = (1..t.len() - 1)
        .min_by(|&a, &b| (t[a].ln() - half).abs().total_cmp(&(t[b].ln() - half).abs()))
        .expect("nonempty");
    let (s2, x2) = secant(j);
    if (x2 - x1).abs() < 1e-12 {
        return Err(Error::parameter("t grid too short for extrapolation"));
    }
    Ok(SlopeEstimate {
        slope: s1 - x1 * (s2 - s1) / (x2 - x1),
        near: s1,
        mid: s2,
    })
}
