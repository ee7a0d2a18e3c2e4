use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("{what} out of domain: {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("cannot fit Raman coefficient: {0}")]
    Unfittable(&'static str),

    /// A covariance-matrix discriminant went negative beyond rounding slack.
    #[error("unphysical state: {which} discriminant {value:e} is negative")]
    Physicality { which: &'static str, value: f64 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("config syntax: {0}")]
    ConfigSyntax(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("at z = {z_km} km: {source}")]
    AtDistance {
        z_km: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            reason,
        }
    }

    pub(crate) fn at(self, z_km: f64) -> Self {
        match self {
            e @ Error::AtDistance { .. } => e,
            e => Error::AtDistance {
                z_km,
                source: Box::new(e),
            },
        }
    }
}
