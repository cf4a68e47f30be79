use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex index {0} is out of range")]
    VertexOutOfRange(usize),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),

    #[error("loop at vertex `{0}`")]
    Loop(String),

    #[error("invalid sign {0}: must be +1 or -1")]
    InvalidSign(i64),

    #[error("{0:?} is not a triangle")]
    NotATriangle(Vec<String>),

    #[error("triangle {0:?} has the wrong sign for this operation")]
    WrongTriangleSign(Vec<String>),

    #[error("{0}-{1} is not an edge")]
    NotAnEdge(String, String),

    #[error("missing terminal `{0}`")]
    MissingTerminal(String),

    #[error("cannot align edge signs when identifying {0:?}")]
    SignAlignment(Vec<String>),

    #[error("size guard exceeded: {size} > {guard} ({hint})")]
    GuardExceeded {
        size: usize,
        guard: usize,
        hint: &'static str,
    },

    #[error("trace step {step}: {source}")]
    TraceStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("vertex `{0}` lies in no set of the family; the covering LP is infeasible")]
    Uncovered(String),

    #[error("LP certificate check failed: {0}")]
    CertificateCheck(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("composer: {0}")]
    Compose(String),

    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),

    #[error("invalid bound parameters p={p}, q={q}: need 2q <= p <= 5q/2")]
    BoundParams { p: u64, q: u64 },
}

impl Error {
    pub fn is_guard(&self) -> bool {
        match self {
            Error::GuardExceeded { .. } => true,
            Error::TraceStep { source, .. } => source.is_guard(),
            _ => false,
        }
    }
}
