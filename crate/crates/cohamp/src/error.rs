//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("trace deviates from 1 by {0:.3e}")]
    TraceDeviation(f64),

    #[error("state is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("projectors do not resolve the identity (deviation {0:.3e})")]
    IncompleteProjectors(f64),

    #[error("basis does not diagonalize the Hamiltonian (residual {0:.3e})")]
    NotEnergyEigenbasis(f64),

    #[error("invalid machine parameters: {0}")]
    InvalidParams(String),

    #[error("infinite-temperature bath unsupported (beta*E must be positive, got {0:.3e})")]
    InfiniteTemperature(f64),

    #[error("stationary nullspace has dimension {0} within the singular-value gap, expected 1")]
    DegenerateNullspace(usize),

    #[error("perturbative channel output not positive (min eigenvalue {0:.3e}); phi is outside the validity regime")]
    ChannelRegime(f64),

    #[error("unitary does not commute with the Hamiltonian (max |[U,H]| = {0:.3e})")]
    NotCovariant(f64),

    #[error("degenerate atom spectrum: perturbative entropy rate is undefined for the maximally mixed state")]
    DegenerateSpectrum,

    #[error("zero initial coherence: amplification ratio undefined")]
    ZeroCoherence,

    #[error("flow identity violated: {0}")]
    FlowIdentity(String),

    #[error("cascade stage {stage} failed: {source}")]
    CascadeStage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
