//! Shared inputs for the benchmarks.

use orlicz_core::trigpoly::{dirichlet, node_samples, random_poly};
use orlicz_core::{CoefficientLaw, Complex64, NFunction, TrigPoly};

pub const DEGREES: [usize; 3] = [4, 16, 64];

/// `t^2` and `t^2 log(1+t)`.
pub fn phis() -> Vec<(&'static str, NFunction)> {
    vec![
        ("power2", NFunction::power(2.0).expect("valid")),
        ("power_log", NFunction::power_log(2.0, 1.0).expect("valid")),
    ]
}

pub fn gaussian(n: usize) -> TrigPoly {
    random_poly(n, 42 + n as u64, CoefficientLaw::Gaussian)
}

pub fn kernel(n: usize) -> TrigPoly {
    dirichlet(n)
}

pub fn samples(f: &TrigPoly, n: usize) -> Vec<Complex64> {
    node_samples(f, n)
}
