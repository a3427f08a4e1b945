use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("cycle notation parse error at position {pos}: {msg}")]
    CycleSyntax { pos: usize, msg: String },
    #[error("edge count mismatch: {left} vs {right}")]
    EdgeCountMismatch { left: usize, right: usize },
    #[error("invalid open set: {0}")]
    InvalidOpenSet(String),
    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),
    #[error("permutation {0} is not an element of the acting group")]
    NotInGroup(String),
    #[error("group action is not faithful on edges: {0} acts trivially")]
    NotFaithful(String),
    #[error("germs are not composable: source of {left} differs from range of {right}")]
    NotComposable { left: String, right: String },
    #[error("germ {0} does not belong to the groupoid")]
    GermNotInGroupoid(String),
    #[error("elements live over different groupoids or groups")]
    GroupMismatch,
    #[error("operation requires the Klein cross groupoid")]
    NotCrossGroupoid,
    #[error("element is not unitary: {0}")]
    NotUnitary(String),
    #[error("induced point map is multi-valued at edge {edge} on ({lo}, {hi}): targets {targets:?}")]
    MultiValued { edge: usize, lo: String, hi: String, targets: Vec<usize> },
    #[error("linear system is inconsistent: target is not in the image")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("star example needs at least 4 edges, got {0}")]
    TooFewEdges(usize),
    #[error("internal verification failed: {0}")]
    Verification(String),
    #[error("groupoid axiom violated: {0}")]
    Axiom(String),
    #[error("numeric splitting failed: {0}")]
    Numeric(String),
    #[error("spec error: {0}")]
    Spec(String),
    #[error("scalar parse error: {0}")]
    ScalarSyntax(String),
}

pub type Result<T> = std::result::Result<T, Error>;
