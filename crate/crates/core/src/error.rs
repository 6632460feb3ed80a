use thiserror::Error;

/// Errors raised by the numeric kernels, distributions and the filter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Cholesky pivot was not strictly positive.
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The mean of a modified inverted Wishart law needs more degrees of freedom.
    #[error("mean undefined: denominator {denominator} is not positive")]
    MeanUndefined { denominator: f64 },

    /// A computed quantity overflowed or became NaN.
    #[error("non-finite {0}")]
    NonFinite(&'static str),

    /// A failure inside one replication of a simulation experiment.
    #[error("in replication {index}: {source}")]
    AtReplication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// A failure inside the filter, tagged with the 1-based time index.
    #[error("at time {t}: {source}")]
    AtTime {
        t: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn at_time(self, t: usize) -> Self {
        Error::AtTime {
            t,
            source: Box::new(self),
        }
    }

    /// Strips any time annotation and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } | Error::AtReplication { source, .. } => source.root(),
            e => e,
        }
    }

    /// The 1-based time index attached by the filter, if any.
    pub fn time_index(&self) -> Option<usize> {
        match self {
            Error::AtTime { t, .. } => Some(*t),
            Error::AtReplication { source, .. } => source.time_index(),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
