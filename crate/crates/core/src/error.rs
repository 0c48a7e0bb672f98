use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("owner sets over different universes ({left} vs {right} owners)")]
    UniverseMismatch { left: usize, right: usize },

    #[error("owner universe of {requested} exceeds the configured cap of {cap}")]
    TooManyOwners { requested: usize, cap: usize },

    #[error("owner {owner} is outside a universe of {universe} owners")]
    OwnerOutOfRange { owner: usize, universe: usize },

    #[error("utility must be non-negative")]
    NegativeUtility,

    #[error("cannot minimalize an empty synthesis list")]
    EmptySyntheses,

    #[error("plan error: {0}")]
    Plan(String),

    #[error("tuple {tuple} has {count} minimal syntheses, above the cap of {cap}")]
    SynthesisCap { tuple: String, count: usize, cap: usize },

    #[error("{algorithm} cost too high: {detail}")]
    Cost { algorithm: &'static str, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("computation cancelled")]
    Cancelled,
}

impl Error {
    pub(crate) fn plan(msg: impl Into<String>) -> Self {
        Error::Plan(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
