//! Trigonometric polynomials on the torus `T = R / 2πZ`.
//!
//! A [`TrigPoly`] of degree `n` stores the `2n + 1` complex coefficients
//! `a_{-n}, ..., a_n` of `f(x) = Σ a_k e^{ikx}`. The sampling grid used
//! throughout is [`NodeSet`]: `x_{n,k} = 2π(n + k)/(2n + 1)` for `k = -n..=n`,
//! each node carrying weight `1/(2n + 1)`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds a polynomial from coefficients listed for `k = -n..=n`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::parameter(format!(
                "coefficient list must have odd length 2n+1, got {}",
                coeffs.len()
            )));
        }
        let degree = (coeffs.len() - 1) / 2;
        Ok(Self { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `e^{ikx}` as a polynomial of degree `|k|`.
    pub fn monomial(k: i64) -> Self {
        let mut p = Self::zero(k.unsigned_abs() as usize);
        p.set_coeff(k, Complex64::new(1.0, 0.0));
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_k`, zero outside `-n..=n`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    fn set_coeff(&mut self, k: i64, value: Complex64) {
        let n = self.degree as i64;
        self.coeffs[(k + n) as usize] = value;
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `Σ |a_k|²`, which equals `(1/2π) ∫ |f|²` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Same polynomial stored at a larger degree (zero padded).
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zero(degree.max(self.degree));
        for k in -(self.degree as i64)..=self.degree as i64 {
            out.set_coeff(k, self.coeff(k));
        }
        out
    }

    /// Evaluates `f(x)` by Horner's scheme in `z = e^{ix}`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let z = Complex64::cis(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc * Complex64::cis(-(self.degree as f64) * x)
    }

    /// Values at the `m` uniform points `2πj/m`, `j = 0..m`, via an inverse DFT.
    ///
    /// Coefficients are folded modulo `m` first, so any `m ≥ 1` is exact.
    pub fn eval_uniform(&self, m: usize) -> Vec<Complex64> {
        assert!(m > 0, "eval_uniform needs at least one point");
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let n = self.degree as i64;
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = i as i64 - n;
            buf[k.rem_euclid(m as i64) as usize] += a;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m).process(&mut buf);
        buf
    }

    /// `f'` (coefficients `ik·a_k`).
    pub fn derivative(&self) -> Self {
        let n = self.degree as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * Complex64::new(0.0, (i as i64 - n) as f64))
            .collect();
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let degree = self.degree.max(other.degree);
        let mut out = self.with_degree(degree);
        for k in -(other.degree as i64)..=other.degree as i64 {
            let v = out.coeff(k) + other.coeff(k);
            out.set_coeff(k, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Multiplication by `e^{imx}`; the coefficient at `k` moves to `k + m`.
    pub fn modulate(&self, m: i64) -> Self {
        let degree = self.degree + m.unsigned_abs() as usize;
        let mut out = Self::zero(degree);
        let n = self.degree as i64;
        for k in -n..=n {
            out.set_coeff(k + m, self.coeff(k));
        }
        out
    }

    /// Drops all coefficients with `|k| > m` and stores the result at degree `m`.
    pub fn truncated(&self, m: usize) -> Self {
        let mut out = Self::zero(m);
        let top = m.min(self.degree) as i64;
        for k in -top..=top {
            out.set_coeff(k, self.coeff(k));
        }
        out
    }

    /// Largest coefficient-wise modulus difference, padding to a common degree.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let top = self.degree.max(other.degree) as i64;
        (-top..=top)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Plain-text record: a `degree n` line followed by `2n + 1` lines of
    /// `re im` in ascending `k`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "degree {}", self.degree);
        for c in &self.coeffs {
            let _ = writeln!(s, "{:.16e} {:.16e}", c.re, c.im);
        }
        s
    }

    /// Parses the format written by [`TrigPoly::to_text`]. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
        let degree: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["degree", n] => n
                .parse()
                .map_err(|_| Error::Parse(format!("bad degree '{n}'")))?,
            _ => return Err(Error::Parse(format!("expected 'degree <n>', got '{header}'"))),
        };
        let mut coeffs = Vec::with_capacity(2 * degree + 1);
        for (i, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [re, im] = parts.as_slice() else {
                return Err(Error::Parse(format!(
                    "coefficient line {} needs two numbers: '{line}'",
                    i + 1
                )));
            };
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("bad number '{s}'")))
            };
            coeffs.push(Complex64::new(parse(re)?, parse(im)?));
        }
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::Parse(format!(
                "degree {degree} needs {} coefficients, found {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }
}

/// The Marcinkiewicz grid of degree `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    degree: usize,
    points: Vec<f64>,
}

impl NodeSet {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes in the order `k = -n..=n`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    /// `x_{n,k}` for `k ∈ -n..=n`.
    pub fn node(&self, k: i64) -> f64 {
        node_position(self.degree, k)
    }
}

fn node_position(n: usize, k: i64) -> f64 {
    TAU * (n as i64 + k) as f64 / (2 * n + 1) as f64
}

pub fn nodes(n: usize) -> NodeSet {
    let points = (-(n as i64)..=n as i64)
        .map(|k| node_position(n, k))
        .collect();
    NodeSet { degree: n, points }
}

/// `f(x_{n,k})` for `k = -n..=n`.
pub fn node_samples(f: &TrigPoly, n: usize) -> Vec<Complex64> {
    f.eval_uniform(2 * n + 1)
}

/// `D_n(x) = Σ_{|k|≤n} e^{ikx}`.
pub fn dirichlet(n: usize) -> TrigPoly {
    TrigPoly {
        degree: n,
        coeffs: vec![Complex64::new(1.0, 0.0); 2 * n + 1],
    }
}

/// Closed form `sin((2n+1)x/2) / sin(x/2)` with the limit `2n + 1` at `x ≡ 0`.
pub fn dirichlet_closed_form(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let s = half.sin();
    if s.abs() < 1e-300 {
        return (2 * n + 1) as f64;
    }
    ((2 * n + 1) as f64 * half).sin() / s
}

/// Degree-`n` polynomial equal to 1 at the nodes `x_{n,j}`, `j ∈ set`, and 0
/// at the other nodes: `Σ_{j∈S} D_n(x - x_{n,j}) / (2n + 1)`.
pub fn spike_poly(n: usize, set: &[i64]) -> Result<TrigPoly> {
    if set.is_empty() {
        return Err(Error::parameter("spike set must be nonempty"));
    }
    let ni = n as i64;
    if let Some(bad) = set.iter().find(|j| j.abs() > ni) {
        return Err(Error::parameter(format!("spike index {bad} outside -{n}..={n}")));
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let scale = 1.0 / (2 * n + 1) as f64;
    let coeffs = (-ni..=ni)
        .map(|m| {
            sorted
                .iter()
                .map(|&j| Complex64::cis(-(m as f64) * node_position(n, j)))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    Ok(TrigPoly { degree: n, coeffs })
}

/// Fourier multiplier `-i·sgn(k)`, with `sgn(0) = 0`.
pub fn hilbert_transform(f: &TrigPoly) -> TrigPoly {
    let n = f.degree as i64;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let k = i as i64 - n;
            a * Complex64::new(0.0, -(k.signum() as f64))
        })
        .collect();
    TrigPoly {
        degree: f.degree,
        coeffs,
    }
}

/// Partial-sum projection onto degree `n`; identity when `n ≥ degree(f)`.
pub fn project(f: &TrigPoly, n: usize) -> TrigPoly {
    if n >= f.degree {
        f.clone()
    } else {
        f.truncated(n)
    }
}

/// Projection onto strictly positive (`sign = 1`) or strictly negative
/// (`sign = -1`) frequencies, written with the conjugate-function operator:
/// `(f ± iHf - a_0) / 2`.
pub fn riesz_projection(f: &TrigPoly, sign: i8) -> TrigPoly {
    let ih = hilbert_transform(f).scale(Complex64::new(0.0, sign as f64));
    let mean = TrigPoly::constant(f.mean());
    f.add(&ih)
        .sub(&mean)
        .scale(Complex64::new(0.5, 0.0))
}

/// The partial-sum projection assembled from modulations and the two Riesz
/// projections: `e^{i(n+1)x} P₋( e^{-2i(n+1)x} P₊( e^{i(n+1)x} f ) )`.
pub fn project_by_composition(f: &TrigPoly, n: usize) -> TrigPoly {
    let shift = n as i64 + 1;
    let g = riesz_projection(&f.modulate(shift), 1);
    let g = riesz_projection(&g.modulate(-2 * shift), -1);
    g.modulate(shift).truncated(n.min(f.degree))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientLaw {
    /// i.i.d. standard complex normal coefficients (`E|a_k|² = 1`).
    Gaussian,
    /// Three nonzero Gaussian coefficients at random positions.
    Sparse,
    /// Gaussian coefficients at `k = ±2^j` only.
    Lacunary,
}

impl CoefficientLaw {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientLaw::Gaussian => "gaussian",
            CoefficientLaw::Sparse => "sparse",
            CoefficientLaw::Lacunary => "lacunary",
        }
    }
}

/// Deterministic random polynomial for a given `(n, seed, law)`.
pub fn random_poly(n: usize, seed: u64, law: CoefficientLaw) -> TrigPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let draw = |rng: &mut ChaCha8Rng| Complex64::new(normal.sample(rng), normal.sample(rng));
    let mut p = TrigPoly::zero(n);
    let ni = n as i64;
    match law {
        CoefficientLaw::Gaussian => {
            for k in -ni..=ni {
                let v = draw(&mut rng);
                p.set_coeff(k, v);
            }
        }
        CoefficientLaw::Sparse => {
            let len = 2 * n + 1;
            let mut picks = index::sample(&mut rng, len, len.min(3)).into_vec();
            picks.sort_unstable();
            for i in picks {
                let mut v = draw(&mut rng);
                while v.norm() == 0.0 {
                    v = draw(&mut rng);
                }
                p.set_coeff(i as i64 - ni, v);
            }
        }
        CoefficientLaw::Lacunary => {
            let mut step = 1i64;
            while step <= ni {
                for k in [-step, step] {
                    let v = draw(&mut rng);
                    p.set_coeff(k, v);
                }
                step *= 2;
            }
        }
    }
    p
}
