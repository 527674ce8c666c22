use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular {stencil} stencil at point {point} (det = {det:e})")]
    SingularStencil {
        point: usize,
        stencil: &'static str,
        det: f64,
    },

    #[error("reconstruction lost positivity at point {point} along edge to {neighbor}")]
    Reconstruction { point: usize, neighbor: usize },

    #[error("non-positive state at point {point}: rho = {rho:e}, p = {p:e}")]
    Positivity { point: usize, rho: f64, p: f64 },

    #[error("solver failed at iteration {iteration}: {source}")]
    Solver {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("store capacity mismatch: {0} vs {1}")]
    CapacityMismatch(usize, usize),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Point the error is attributed to, if any.
    pub fn point(&self) -> Option<usize> {
        match self {
            Error::SingularStencil { point, .. }
            | Error::Reconstruction { point, .. }
            | Error::Positivity { point, .. } => Some(*point),
            Error::Solver { source, .. } => source.point(),
            _ => None,
        }
    }

    /// Rewrites point indices carried by the error through `map`.
    pub(crate) fn remap_points(self, map: impl Fn(usize) -> usize) -> Self {
        match self {
            Error::SingularStencil { point, stencil, det } => Error::SingularStencil {
                point: map(point),
                stencil,
                det,
            },
            Error::Reconstruction { point, neighbor } => Error::Reconstruction {
                point: map(point),
                neighbor: map(neighbor),
            },
            Error::Positivity { point, rho, p } => Error::Positivity {
                point: map(point),
                rho,
                p,
            },
            other => other,
        }
    }
}
