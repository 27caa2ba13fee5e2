use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The measure text does not match the schema (missing key, wrong type, bad JSON).
    #[error("measure schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// A field parsed but violates a domain invariant.
    #[error("invalid value at `{path}`: {message}")]
    InvalidField { path: String, message: String },

    #[error("duplicate atom location {location} at `{path}`")]
    DuplicateAtom { path: String, location: f64 },

    #[error("{what} of {requested} exceeds the configured cap of {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("measure has an atom at an endpoint; the endpoint formulas are handled by classify_boundedness")]
    EndpointAtom,

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: error estimate {estimate:e} at order {order}")]
    QuadratureNonConvergence { estimate: f64, order: usize },

    #[error("e_n series needs more than {max_terms} terms (tail bound {tail_bound:e} at cutoff)")]
    MaxTermsExceeded { max_terms: usize, tail_bound: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {last})")]
    PowerIterationNonConvergence { iterations: usize, last: f64 },

    #[error("certification report invariant violated: {0}")]
    ReportInvariant(String),

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
}
