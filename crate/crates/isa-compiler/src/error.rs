use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("{what} expects a ciphertext operand, {name:?} is a constant")]
    ConstOperand { what: &'static str, name: String },
    #[error("rotation exponent {0} must be odd")]
    EvenRotation(usize),
    #[error("constant for {name:?} has {got} coefficients, ring degree is {n}")]
    ConstTooWide { name: String, got: usize, n: usize },
    #[error(
        "noise budget exhausted at node {node:?}: {bits:.1} bits over budget \
         and no bootstrapping available"
    )]
    BudgetInfeasible { node: String, bits: f64 },
    #[error("distant memory overflow: {need} pages needed, {have} available")]
    DistantOverflow { need: usize, have: usize },
    #[error("on-chip capacity too small: {need} pages needed, {have} available")]
    CapacityTooSmall { need: usize, have: usize },
    #[error("register file plan needs {0} entries, hardware has {1}")]
    RegisterFileOverflow(usize, usize),
    #[error("malformed trace at line {line}: {msg}")]
    Trace { line: usize, msg: String },
    #[error("execution error: {0}")]
    Exec(String),
    #[error(transparent)]
    Ring(#[from] rns_ring::RingError),
    #[error(transparent)]
    Bgv(#[from] bgv_core::BgvError),
}

impl From<accel_model::AccelError> for CompileError {
    fn from(e: accel_model::AccelError) -> Self {
        CompileError::Exec(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CompileError>;
