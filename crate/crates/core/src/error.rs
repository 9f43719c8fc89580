use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the analysis routines.
///
/// Budget exhaustion in the combinatorial searches is deliberately *not* an
/// error for the decision procedures (see [`crate::oracle::SearchOutcome`]);
/// it only surfaces here for operations that must return a number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    EmptyMatrix,
    NonFinite { row: usize, col: usize },
    Ragged { row: usize, expected: usize, found: usize },
    LengthMismatch { expected: usize, found: usize },
    NotSquare { rows: usize, cols: usize },
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    InvalidTolerance(&'static str),
    InvalidParameter(&'static str),
    SparsityOutOfRange { s: usize, inputs: usize },
    IndexOutOfRange { index: usize, bound: usize },
    MissingOutputMatrix,
    SingularTransform,
    Uncontrollable,
    /// The pair (D, H) is not controllable, so no controllable column subset exists.
    SStarUndefined,
    NotSparseControllable { s: usize },
    NotCommonSupportControllable { s: usize },
    NotOutputSparseControllable { s: usize },
    /// rank(AH) = 0 makes the output lower bound m / R*_{AH,s} meaningless.
    DegenerateOutputBound,
    BudgetExceeded,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMatrix => write!(f, "matrix must have at least one row and one column"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite entry at row {row}, column {col}")
            }
            Error::Ragged { row, expected, found } => write!(
                f,
                "row {row} has {found} entries, expected {expected}"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            Error::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, found {found}")
            }
            Error::InvalidTolerance(msg) => write!(f, "invalid tolerance: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SparsityOutOfRange { s, inputs } => {
                write!(f, "sparsity {s} out of range 1..={inputs}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "input index {index} out of range (number of inputs {bound})")
            }
            Error::MissingOutputMatrix => write!(f, "operation requires an output matrix A"),
            Error::SingularTransform => write!(f, "change-of-basis matrix is singular"),
            Error::Uncontrollable => write!(f, "system is not controllable"),
            Error::SStarUndefined => {
                write!(f, "S* undefined: the system is not controllable")
            }
            Error::NotSparseControllable { s } => {
                write!(f, "system is not {s}-sparse-controllable")
            }
            Error::NotCommonSupportControllable { s } => write!(
                f,
                "system is not controllable with {s}-sparse inputs sharing a common support"
            ),
            Error::NotOutputSparseControllable { s } => {
                write!(f, "system is not output {s}-sparse-controllable")
            }
            Error::DegenerateOutputBound => {
                write!(f, "output bound undefined: rank(AH) is zero")
            }
            Error::BudgetExceeded => write!(f, "search budget exceeded"),
        }
    }
}

impl core::error::Error for Error {}
