//! Luxemburg norms of trigonometric polynomials and numerical checks of
//! Marcinkiewicz-type sampling inequalities in Orlicz spaces.

pub mod error;
pub mod hilbert;
pub mod nfunction;
pub mod norms;
pub mod quad;
pub mod root;
pub mod sampling;
pub mod samplingfn;
pub mod trigpoly;

pub use error::{Error, Result};
pub use hilbert::{
    dirichlet_norm, estimate_hilbert_norm, verify_dirichlet_lemma, verify_lambda_monotonicity,
    verify_projection_bound, weak_type_estimate, DirichletBracket, DirichletNormTable, DirichletRow,
    HilbertEstimate, ProjectionTally, WeakTypeEstimate,
};
pub use nfunction::{
    catalogue, ConditionParams, ConditionReport, Delta2, Family, IndexEstimate, IndexScope,
    MultiplicativityCertificate, MultiplicativityMode, NFunction, PairGrid,
};
pub use norms::{
    continuous_modular, discrete_norm_ln, discrete_norm_omega, luxemburg_norm_continuous,
    NormKind, NormResult, TorusRule,
};
pub use num_complex::Complex64;
pub use sampling::{
    estimate_cphi, family, necessity_check, scan, scan_cases, verify_lower_sampling, verify_modular_zygmund,
    verify_simple, verify_upper_sampling, Check, CphiEstimate, FamilyKind, FamilySpec,
    NecessityReport, ScanOptions, TestCase, VerificationReport,
};
pub use samplingfn::{
    default_t_grid, interpolating_bound, raw_sampling_bound, sampling_function, slope_at_zero,
    EnvelopeTable, RawBound, SlopeEstimate, XGrid,
};
pub use trigpoly::{CoefficientLaw, NodeSet, TrigPoly};
