use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building or checking a finite model.
///
/// Law violations are *not* errors: they are reported through
/// [`LawReport`](crate::report::LawReport). These variants cover malformed
/// input, exceeded enumeration bounds and failed liftings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed {table} table: {detail}")]
    Structural { table: String, detail: String },

    #[error("capacity exceeded for {what}: reached {reached}, bound is {bound}")]
    Capacity {
        what: String,
        reached: u128,
        bound: u128,
    },

    #[error("the {kind} of {{{elements}}} does not exist in this algebra")]
    Incomplete { kind: String, elements: String },

    #[error("object kinds do not match: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("operation {op} is not supported for {kind} objects")]
    UnsupportedKind { op: String, kind: String },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("{op} does not lift into the fibre: violated at point {point}")]
    Lifting { op: String, point: String },

    #[error("missing structure: {0}")]
    MissingStructure(String),

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn structural(table: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Structural {
            table: table.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn capacity(what: impl Into<String>, reached: u128, bound: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            reached,
            bound,
        }
    }

    pub(crate) fn lifting(op: impl Into<String>, point: impl Into<String>) -> Self {
        Error::Lifting {
            op: op.into(),
            point: point.into(),
        }
    }
}

/// `base^exp`, saturating at `u128::MAX`. Used for every capacity pre-check.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc == u128::MAX {
            break;
        }
    }
    if base == 0 && exp > 0 {
        0
    } else {
        acc
    }
}

pub(crate) fn check_capacity(what: &str, needed: u128, bound: usize) -> Result<()> {
    if needed > bound as u128 {
        Err(Error::capacity(what, needed, bound as u128))
    } else {
        Ok(())
    }
}
