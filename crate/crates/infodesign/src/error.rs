use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type. Variants mirror the failure modes of the public
/// operations; constructors reject invalid inputs rather than renormalizing
/// them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid market primitives: {0}")]
    InvalidMarket(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),
    #[error("invalid outcome set: {0}")]
    InvalidOutcomeSet(String),
    #[error("invalid integration interval: a={a} > b={b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("degenerate prior: mu0 = {0} must lie strictly inside (0,1)")]
    DegeneratePrior(f64),
    #[error("mechanism is not incentive compatible: {0}")]
    NotIncentiveCompatible(String),
    #[error("belief split is not Bayes plausible: mean {mean} vs prior {prior}")]
    NotBayesPlausible { mean: f64, prior: f64 },
    #[error("signal realization {0} has zero probability under this type")]
    ZeroProbabilityRealization(usize),
    #[error("obedience constraints are infeasible: {0}")]
    InfeasibleConstraints(String),
    #[error("no efficient signal found within tolerance {0}")]
    NoEfficientSignalFound(f64),
    #[error("mean type equals L/H; comparison regimes require E[theta] != L/H")]
    BoundaryCase,
    #[error("{0} requires a full-support type distribution")]
    NotFullSupport(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
