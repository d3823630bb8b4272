use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario has {variables} contextual variables; at most {max} can be enumerated")]
    ScenarioTooLarge { variables: usize, max: usize },

    #[error("assignment has {got} values but the scenario has {expected} contextual variables")]
    AssignmentShape { expected: usize, got: usize },

    #[error("points span an affine hull of dimension {hull_dim} inside dimension {dim}")]
    DegeneratePolytope { dim: usize, hull_dim: usize },

    #[error("polytope too large: {0}")]
    PolytopeTooLarge(String),

    #[error("polyhedron is unbounded")]
    UnboundedPolyhedron,

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("target {target} is not attainable (admissible range [{min}, {max}])")]
    InfeasibleTarget { target: String, min: String, max: String },

    #[error("line {line}: atom `{atom}` appears twice in one context")]
    DuplicateAtomInContext { line: usize, atom: String },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("hypergraph has {atoms} atoms; at most {max} are supported")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("embeddability checks need the exhaustive state list")]
    NonExhaustiveStates,

    #[error("invalid stream spec: {0}")]
    SpecInvalid(String),

    #[error("stream is empty")]
    EmptyStream,

    #[error("target {target} outside [{min}, {max}]")]
    TargetOutOfRange { target: String, min: String, max: String },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
}
