//! Restricted super/sub-multiplicativity constants on a finite pair grid.

use rayon::prelude::*;

use super::NFunction;
use crate::error::{Error, Result};

/// Constants within this distance of 1 are reported as exactly 1.
const SNAP: f64 = 1e-12;
const SUPER_MAX: f64 = 1e6;
const SUB_MIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MultiplicativityMode {
    /// `φ(a)φ(b) ≤ φ(Cab)` with `C ≥ 1`.
    Super,
    /// `φ(Cab) ≤ φ(a)φ(b)` with `C ≤ 1`.
    Sub,
}

impl MultiplicativityMode {
    pub fn name(self) -> &'static str {
        match self {
            MultiplicativityMode::Super => "super",
            MultiplicativityMode::Sub => "sub",
        }
    }
}

/// Log-spaced `a ∈ [a_min, 1)` and `b ∈ (1, b_max]`, restricted to `ab ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairGrid {
    pub a_min: f64,
    pub b_max: f64,
    /// Points per axis.
    pub points: usize,
}

impl Default for PairGrid {
    fn default() -> Self {
        PairGrid {
            a_min: 1e-6,
            b_max: 1e6,
            points: 400,
        }
    }
}

impl PairGrid {
    fn a_values(&self) -> Vec<f64> {
        let la = self.a_min.log10();
        (0..self.points)
            .map(|i| 10f64.powf(la * (1.0 - i as f64 / self.points as f64)))
            .collect()
    }

    fn b_values(&self) -> Vec<f64> {
        let lb = self.b_max.log10();
        (1..=self.points)
            .map(|j| 10f64.powf(lb * j as f64 / self.points as f64))
            .collect()
    }

    /// All admissible pairs in row-major order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        let bs = self.b_values();
        self.a_values()
            .into_iter()
            .flat_map(|a| bs.iter().filter(move |&&b| a * b >= 1.0).map(move |&b| (a, b)))
            .collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "a in [{:e}, 1), b in (1, {:e}], {}x{} log grid, ab >= 1",
            self.a_min, self.b_max, self.points, self.points
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativityCertificate {
    pub mode: MultiplicativityMode,
    pub constant: f64,
    pub grid: PairGrid,
    pub pairs_tested: usize,
    /// Pair that forces the constant (the extremal required value).
    pub witness: (f64, f64),
    /// Smallest relative slack of the inequality over the tested pairs.
    pub margin: f64,
}

/// The constant a single pair requires: `φ⁻¹(φ(a)φ(b)) / (ab)`.
fn required(nf: &NFunction, a: f64, b: f64) -> Result<f64> {
    let ab = a * b;
    let x = nf.eval_inverse_from(nf.eval(a) * nf.eval(b), ab)?;
    Ok(x / ab)
}

/// `a < 1 ≤ ab < b`.
pub fn in_region(a: f64, b: f64) -> bool {
    a < 1.0 && 1.0 <= a * b && a * b < b
}

impl MultiplicativityCertificate {
    /// Relative slack of the inequality at `(a, b)`; negative means violated.
    pub fn slack(&self, nf: &NFunction, a: f64, b: f64) -> f64 {
        let prod = nf.eval(a) * nf.eval(b);
        let scaled = nf.eval(self.constant * a * b);
        match self.mode {
            MultiplicativityMode::Super => (scaled - prod) / scaled.max(prod),
            MultiplicativityMode::Sub => (prod - scaled) / scaled.max(prod),
        }
    }

    /// Whether the certified inequality holds at `(a, b)` to relative `1e-12`.
    pub fn holds_at(&self, nf: &NFunction, a: f64, b: f64) -> bool {
        self.slack(nf, a, b) >= -SNAP
    }

    /// Enlarges (super) or shrinks (sub) the constant so that it also covers
    /// the given admissible pairs. Pairs outside `a < 1 ≤ ab < b` are ignored.
    pub fn refine(&self, nf: &NFunction, pairs: &[(f64, f64)]) -> Result<Self> {
        let mut out = self.clone();
        for &(a, b) in pairs.iter().filter(|p| in_region(p.0, p.1)) {
            let c = required(nf, a, b)?;
            let worse = match self.mode {
                MultiplicativityMode::Super => c > out.constant * (1.0 + SNAP),
                MultiplicativityMode::Sub => c < out.constant * (1.0 - SNAP),
            };
            if worse {
                out.constant = c;
                out.witness = (a, b);
            }
            out.pairs_tested += 1;
        }
        Ok(out)
    }
}

/// Certificate on the default 400×400 grid.
pub fn multiplicativity_constant(
    nf: &NFunction,
    mode: MultiplicativityMode,
) -> Result<MultiplicativityCertificate> {
    multiplicativity_constant_on(nf, mode, PairGrid::default())
}

pub fn multiplicativity_constant_on(
    nf: &NFunction,
    mode: MultiplicativityMode,
    grid: PairGrid,
) -> Result<MultiplicativityCertificate> {
    if !nf.is_normalized() && (nf.eval(1.0) - 1.0).abs() > SNAP {
        return Err(Error::parameter(
            "multiplicativity constants need a normalized N-function",
        ));
    }
    let pairs = grid.pairs();
    if pairs.is_empty() {
        return Err(Error::parameter("pair grid has no admissible pairs"));
    }
    let required: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| required(nf, a, b))
        .collect::<Result<_>>()?;

    // first extremal index keeps the witness independent of thread count
    let mut best = 0;
    for (i, &c) in required.iter().enumerate() {
        let better = match mode {
            MultiplicativityMode::Super => c > required[best],
            MultiplicativityMode::Sub => c < required[best],
        };
        if better {
            best = i;
        }
    }
    let extreme = required[best];
    let mut constant = match mode {
        MultiplicativityMode::Super => extreme.max(1.0),
        MultiplicativityMode::Sub => extreme.min(1.0),
    };
    if (constant - 1.0).abs() <= SNAP {
        constant = 1.0;
    }
    let ok = match mode {
        MultiplicativityMode::Super => constant.is_finite() && constant <= SUPER_MAX,
        MultiplicativityMode::Sub => constant.is_finite() && constant >= SUB_MIN,
    };
    if !ok {
        return Err(Error::NoCertificate(format!(
            "{} {}: required constant {constant:e} at (a, b) = ({:e}, {:e})",
            nf.descriptor(),
            mode.name(),
            pairs[best].0,
            pairs[best].1
        )));
    }
    let mut cert = MultiplicativityCertificate {
        mode,
        constant,
        grid,
        pairs_tested: pairs.len(),
        witness: pairs[best],
        margin: 0.0,
    };
    cert.margin = pairs
        .par_iter()
        .map(|&(a, b)| cert.slack(nf, a, b))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn powers_are_multiplicative() {
        for p in [1.5, 2.0, 4.0] {
            let nf = NFunction::power(p).unwrap();
            for mode in [MultiplicativityMode::Super, MultiplicativityMode::Sub] {
                let cert = multiplicativity_constant(&nf, mode).unwrap();
                assert_eq!(cert.constant, 1.0, "p={p} {mode:?}");
                assert!(cert.pairs_tested >= 200 * 200);
                let (a, b) = cert.witness;
                assert!(in_region(a, b));
                assert!(cert.margin >= -SNAP);
            }
        }
    }

    #[test]
    fn power_log_super_constant_with_random_cross_check() {
        // ln(1+a) ln(1+b) ≤ ln 2 · ln(1+ab) on the region, so C = 1, approached as a → 1
        let nf = NFunction::power_log(2.0, 1.0).unwrap();
        let cert = multiplicativity_constant(&nf, MultiplicativityMode::Super).unwrap();
        assert_eq!(cert.constant, 1.0);
        let (a, b) = cert.witness;
        assert!(in_region(a, b) && a > 0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        let mut checked = 0;
        while checked < 100_000 {
            let a = 10f64.powf(rng.random_range(-6.0..0.0));
            let b = 10f64.powf(rng.random_range(0.0..6.0));
            if !in_region(a, b) {
                continue;
            }
            worst = worst.max(required(&nf, a, b).unwrap());
            assert!(cert.holds_at(&nf, a, b));
            checked += 1;
        }
        assert!(worst <= 1.0 + 1e-12, "worst {worst}");
    }

    #[test]
    fn log_power_needs_a_constant_above_one() {
        // a log in the denominator breaks C = 1 for large b
        let nf = NFunction::custom(
            "t^3/log(1+t)",
            |t: f64| t.powi(3) / t.ln_1p(),
            |t: f64| {
                if t == 0.0 {
                    return 0.0;
                }
                let l = t.ln_1p();
                3.0 * t * t / l - t.powi(3) / ((1.0 + t) * l * l)
            },
            true,
        )
        .unwrap();
        let cert = multiplicativity_constant(&nf, MultiplicativityMode::Super).unwrap();
        assert!(cert.constant > 1.0 && cert.constant.is_finite());
        assert!(in_region(cert.witness.0, cert.witness.1));
    }

    #[test]
    fn power_log_sub_constant() {
        let nf = NFunction::power_log(2.0, 1.0).unwrap();
        let cert = multiplicativity_constant(&nf, MultiplicativityMode::Sub).unwrap();
        assert!(cert.constant < 1.0 && cert.constant >= SUB_MIN);
        assert!(cert.margin >= -1e-9);
    }

    #[test]
    fn refine_covers_new_pairs() {
        let nf = NFunction::power_log(2.0, 1.0).unwrap();
        let coarse = PairGrid {
            points: 20,
            ..PairGrid::default()
        };
        let cert = multiplicativity_constant_on(&nf, MultiplicativityMode::Super, coarse).unwrap();
        let extra = [(0.999, 1.002), (1e-6, 1e6), (2.0, 3.0)];
        let refined = cert.refine(&nf, &extra).unwrap();
        assert!(refined.constant >= cert.constant);
        for (a, b) in extra.into_iter().filter(|p| in_region(p.0, p.1)) {
            assert!(refined.holds_at(&nf, a, b));
        }
    }

    #[test]
    fn unnormalized_is_rejected() {
        let nf = NFunction::new(super::super::Family::Power, 2.0, 0.0, 0.0, false).unwrap();
        // t^2 already has phi(1) = 1, so it is accepted
        assert!(multiplicativity_constant_on(&nf, MultiplicativityMode::Super, PairGrid { points: 10, ..PairGrid::default() }).is_ok());
        let nf = NFunction::new(super::super::Family::PowerLog, 2.0, 1.0, 0.0, false).unwrap();
        assert!(multiplicativity_constant(&nf, MultiplicativityMode::Super).is_err());
    }
}
