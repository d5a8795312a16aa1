//! Bracketed bisection for monotone scalar maps on `(0, ∞)`.
//!
//! Every root the crate needs (inverses of N-functions, Luxemburg norms,
//! conjugate maximisers) is the crossing point of a monotone function with a
//! target level, so a single bracketing routine serves all of them.

use crate::error::{Error, Result};

/// Relative bracket width that must be reached before the iteration cap.
pub const REL_TOL: f64 = 1e-10;
/// Bisection steps allowed once a bracket is found.
pub const MAX_BISECTIONS: usize = 200;
// Doubling/halving steps for the bracket search; covers the whole f64 range.
const MAX_BRACKET_STEPS: usize = 2200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotone {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug)]
pub struct Root {
    /// Left end of the final bracket (the map is on the "low" side here).
    pub lo: f64,
    /// Right end of the final bracket.
    pub hi: f64,
    pub iterations: usize,
}

impl Root {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn relative_width(&self) -> f64 {
        if self.hi > 0.0 {
            (self.hi - self.lo) / self.hi
        } else {
            0.0
        }
    }
}

/// Finds `x > 0` with `g(x) = target`, where `g` is monotone in the given
/// direction. The bracket is found by doubling/halving from `x0`.
///
/// The returned bracket `[lo, hi]` satisfies: `g(lo)` is on the far side of
/// `target` from `g(hi)` (or equal to it). Bisection runs until the bracket
/// collapses to adjacent floats or `MAX_BISECTIONS` is hit; the latter is an
/// error only when the relative width is still above [`REL_TOL`].
pub fn solve_monotone<G>(
    mut g: G,
    target: f64,
    x0: f64,
    direction: Monotone,
    context: &'static str,
) -> Result<Root>
where
    G: FnMut(f64) -> f64,
{
    let (lo, hi) = find_bracket(&mut g, target, x0, direction, context)?;
    bisect(g, target, lo, hi, direction, 0.0, context)
}

/// `true` when `x` lies left of the crossing point.
fn below<G: FnMut(f64) -> f64>(
    g: &mut G,
    x: f64,
    target: f64,
    direction: Monotone,
    context: &'static str,
) -> Result<bool> {
    let v = g(x);
    if v.is_nan() {
        return Err(Error::convergence(context, format!("map returned NaN at {x}")));
    }
    Ok(match direction {
        Monotone::Increasing => v < target,
        Monotone::Decreasing => v > target,
    })
}

/// Doubling/halving search from `x0` for `lo < hi` with the crossing in `(lo, hi]`.
pub fn find_bracket<G>(
    g: &mut G,
    target: f64,
    x0: f64,
    direction: Monotone,
    context: &'static str,
) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> f64,
{
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::parameter(format!(
            "{context}: bracket start must be positive and finite, got {x0}"
        )));
    }
    let (mut lo, mut hi);
    if below(g, x0, target, direction, context)? {
        lo = x0;
        hi = x0 * 2.0;
        let mut steps = 0;
        while below(g, hi, target, direction, context)? {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::convergence(context, "bracket expansion overflowed"));
            }
        }
    } else {
        hi = x0;
        lo = x0 * 0.5;
        let mut steps = 0;
        while !below(g, lo, target, direction, context)? {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo == 0.0 {
                return Err(Error::convergence(context, "bracket contraction underflowed"));
            }
        }
    }
    Ok((lo, hi))
}

/// Tries the bracket `[x(1 - δ), x(1 + δ)]` around a good guess before
/// falling back to [`find_bracket`].
pub fn bracket_near<G>(
    g: &mut G,
    target: f64,
    guess: f64,
    delta: f64,
    direction: Monotone,
    context: &'static str,
) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> f64,
{
    let (lo, hi) = (guess * (1.0 - delta), guess * (1.0 + delta));
    if lo > 0.0
        && below(g, lo, target, direction, context)?
        && !below(g, hi, target, direction, context)?
    {
        return Ok((lo, hi));
    }
    find_bracket(g, target, guess, direction, context)
}

/// Bisection on a valid bracket until its relative width is at most
/// `rel_width` (0 means down to adjacent floats).
pub fn bisect<G>(
    mut g: G,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    direction: Monotone,
    rel_width: f64,
    context: &'static str,
) -> Result<Root>
where
    G: FnMut(f64) -> f64,
{
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        if hi - lo <= rel_width * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(&mut g, mid, target, direction, context)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let root = Root { lo, hi, iterations };
    if root.relative_width() > REL_TOL {
        return Err(Error::convergence(
            context,
            format!(
                "bisection stopped at relative width {:e} after {iterations} steps",
                root.relative_width()
            ),
        ));
    }
    Ok(root)
}
