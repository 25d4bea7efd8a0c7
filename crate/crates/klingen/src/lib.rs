//! Klingen Eisenstein series pullbacks in degree two.
//!
//! This crate computes both sides of the degree-two pullback identity for
//! Klingen Eisenstein series restricted to the diagonal `H x H` inside the
//! Siegel upper half space, together with every ingredient the identity
//! needs:
//!
//! * exact truncated q-expansions of elliptic modular forms
//!   ([`qseries`]),
//! * half-integral binary quadratic forms, their discriminant splits and
//!   theta series ([`quadforms`]),
//! * Dirichlet, Rankin convolution and symmetric square L-values with
//!   explicit tail bounds ([`lfunctions`]),
//! * exact integer linear algebra for `Sp(4)`, its congruence and
//!   paramodular subgroups, and coset enumeration ([`symplectic`]),
//! * pointwise evaluation of the Klingen expansion and of the pullback
//!   right-hand side, plus Fourier extraction of the coupled coefficients
//!   ([`evaluator`]),
//! * verification scenarios with machine-readable reports ([`report`]).
//!
//! The `examples/` directory contains one runnable program per capability;
//! the `klingen` binary exposes the same scenarios as subcommands.

pub mod arith;
pub mod evaluator;
#[cfg(test)]
pub(crate) mod testrng;
pub mod lfunctions;
pub mod qseries;
pub mod quadforms;
pub mod report;
pub mod sums;
pub mod symplectic;

pub use arith::{
    bernoulli, complete_coprime_pair, divisor_sum, generalized_bernoulli, kronecker,
    zeta_neg_odd, DirichletKronecker, Rational,
};
pub use evaluator::{
    eval_cuspform, eval_klingen_diag, eval_pullback_rhs, eval_pullback_rhs_para, eval_e1,
    extract_af, klingen_coeff, TruncationParams, UpperHalfPoint,
};
pub use lfunctions::{
    dirichlet_l_exact, dirichlet_l_numeric, phi_scalar, rankin_naive, sym2_l, ExactReal, LValue,
};
pub use qseries::{
    delta_qexp, eigenform, eigenform_coeffs_f64, eisenstein_qexp, hecke_apply,
    ingest_coefficients, EigenformSource, EigenformSpec, QSeries,
};
pub use quadforms::{
    disc_split, lambda_set, reduce_singular, theta_coeffs, theta_envelope,
    unimodular_transform, DiscriminantSplit, HalfIntMatrix,
};
pub use report::{
    verify_cor13, verify_cor14, verify_para_properties, verify_pointwise, VerificationReport,
};
pub use symplectic::{coset_reps, double_coset_reps, epsilon_cd, l_matrix, CosetRep, Group4,
    Mat2Z, SpRep};

/// Errors shared by the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A coefficient file or CLI value could not be parsed.
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
