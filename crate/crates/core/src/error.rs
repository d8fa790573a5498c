use thiserror::Error;

use crate::qtorus::Position;
use crate::restoration::Step;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a unit of Z[q, q^-1]")]
    NotAUnit(String),

    #[error("torus element {0} is not an invertible monomial")]
    NotInvertible(String),

    /// A pivot of the (inverse) deleting-derivations algorithm was nonzero but
    /// not a single unit-coefficient monomial.
    #[error("pivot at step {step} (entry {position}) is not a monomial: {value}")]
    PivotNotMonomial { step: Step, position: Position, value: String },

    #[error("grid size {n} is outside the supported range 1..={max}")]
    SizeTooLarge { n: usize, max: usize },

    #[error("gamma vector {gamma:?} is not in Gamma_r for r = {r:?}")]
    GammaOutOfRange { r: Vec<usize>, gamma: Vec<usize> },

    #[error("invalid r vector {r:?} for n = {n}: entries must be strictly increasing in 1..={n}")]
    BadRVector { n: usize, r: Vec<usize> },

    #[error("diagram {diagram} has nonvanishing minors of size {size} above a size whose minors all vanish")]
    GapViolation { diagram: String, size: usize },

    #[error("invalid composition {parts:?}: {reason}")]
    BadComposition { parts: Vec<usize>, reason: String },

    /// The cell is in the set but is neither row- nor column-coverable.
    #[error("{grid} is not a union of truncated rows and columns: cell {cell} is not coverable")]
    NotADiagram { grid: String, cell: Position },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
