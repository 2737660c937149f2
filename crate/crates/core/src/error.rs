use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("task collection is empty")]
    EmptyCollection,

    #[error("schedule length {schedule} does not match ordering length {ordering}")]
    LengthMismatch { schedule: usize, ordering: usize },

    #[error("scheme `{scheme}` cannot run with a {schedule} schedule")]
    ScheduleMismatch {
        scheme: &'static str,
        schedule: &'static str,
    },

    #[error("task index {index} out of range for {tasks} tasks")]
    TaskIndex { index: usize, tasks: usize },

    #[error("ordering without replacement needs k <= M (k = {k}, M = {m})")]
    OrderingTooLong { k: usize, m: usize },

    #[error("seen-task loss needs a nonempty ordering prefix")]
    EmptyPrefix,

    #[error("surrogate kind `{0}` has no sandwich constants")]
    NoSandwichConstants(&'static str),

    #[error("linear solve failed: {0}")]
    Solve(&'static str),

    #[error("probe failed: {0}")]
    Probe(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
