use thiserror::Error;

/// Errors raised across the engine. Verdict-like outcomes (exhausted
/// searches, negative checks) are ordinary return values, not errors;
/// everything here is a genuine failure of a precondition or a budget.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("letter `{letter}` used with ranks ({in_rank},{out_rank}) but declared ({decl_in},{decl_out})")]
    RankMismatch {
        letter: String,
        in_rank: usize,
        out_rank: usize,
        decl_in: usize,
        decl_out: usize,
    },
    #[error("port index {index} out of range for {node} ({dir} rank {rank})")]
    PortIndexOutOfRange {
        node: String,
        dir: &'static str,
        index: usize,
        rank: usize,
    },
    #[error("port {0} occupied by more than one edge")]
    PortDoubleOccupied(String),
    #[error("duplicate tag `{0}`")]
    DuplicateTag(String),
    #[error("tag `{0}` names an occupied port")]
    TagOnOccupiedPort(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("net has no nodes")]
    EmptyNet,
    #[error("net is broken ({0} components)")]
    BrokenNet(usize),
    #[error("bound must be at least 1")]
    BoundTooSmall,
    #[error("height undefined: net contains a directed loop")]
    HeightUndefined,

    #[error("substitution direction mismatch for variable `{0}`")]
    DirectionMismatch(String),
    #[error("no free {dir} port designated on the image of variable `{var}`")]
    NoFreePortOnImage { var: String, dir: &'static str },
    #[error("rule `{rule}`: right side demands tag `{tag}` absent from the left side")]
    BoundaryMismatch { rule: String, tag: String },
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("left side of a preform must contain a ranked node")]
    BareVariableLeft,
    #[error("variable `{0}` must be tied to exactly one pattern port")]
    VariableTieCount(String),

    #[error("budget exhausted after {0} steps")]
    BudgetExhausted(usize),
    #[error("stage {stage} budget exhausted")]
    StageBudgetExhausted { stage: usize },

    #[error("block is not connected")]
    DisconnectedBlock,
    #[error("blocks do not form a partition: {0}")]
    NotAPartition(String),
    #[error("jungles are not abstract sisters")]
    NotSisters,
    #[error("letter `{0}` is not in the concept alphabet")]
    NotInConceptAlphabet(String),
    #[error("redex straddles blocks in a configuration the macro construction does not support: {0}")]
    RedexStraddlesUnsupported(String),
    #[error("macro construction unsupported: {0}")]
    ConstructionUnsupported(String),
    #[error("closure violation: results span {0} distinct signatures")]
    ClosureViolation(usize),
    #[error("colouring recursion revisits a coloured jungle (cycle of length {0})")]
    NonTerminatingColouring(usize),

    #[error("missing input for unoccupied in-port {0}")]
    MissingInput(String),
    #[error("no fixpoint within {0} iterations")]
    NoFixpointWithinBudget(usize),
    #[error("generator `{0}` is unmapped")]
    GeneratorUnmapped(String),
    #[error("image of letter `{letter}` omits a placeholder for an occupied source port")]
    PlaceholderArityMismatch { letter: String },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("corrupt memory entry `{0}`: {1}")]
    CorruptEntry(String, String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
