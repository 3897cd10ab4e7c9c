use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: expected {}", expected.join(" | "))]
    Parse { offset: usize, expected: Vec<String> },

    #[error("{line}: {message}")]
    Format { line: usize, message: String },

    #[error("coefficient domain mismatch: {0} vs {1}")]
    DomainMismatch(String, String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("degree {degree} exceeds the configured degree cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("Groebner computation exhausted degree cap {cap} (achieved degree {achieved})")]
    GroebnerCapExhausted { achieved: u32, cap: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),

    #[error("module mismatch")]
    ModuleMismatch,

    #[error("coherence violation between levels {lower} and {upper}")]
    Coherence { lower: usize, upper: usize },

    #[error("decay failure at threshold {threshold}: witnesses {witnesses:?}")]
    DecayFailure { threshold: usize, witnesses: Vec<usize> },

    #[error("level {level} lies beyond the certified cap {cap}")]
    LevelBeyondCap { level: usize, cap: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("family does not generate at level {level}: {witness}")]
    NotGenerating { level: usize, witness: String },

    #[error("map is not surjective: {witness}")]
    NotSurjective { witness: String },

    #[error("map is not well defined: {0}")]
    IllDefinedMap(String),

    #[error("not flat at level {level}: relation {relation}")]
    NotFlat { level: usize, relation: String },

    #[error("invalid adic system at level {level}: {reason}")]
    InvalidSystem { level: usize, reason: String },

    #[error("cap {cap} too small (need at least {required})")]
    CapTooSmall { cap: usize, required: usize },

    #[error("no applicable witness strategy: {0}")]
    NoWitness(String),
}
