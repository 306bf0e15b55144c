use thiserror::Error;

use crate::cube_split::BitVertex;
use crate::grid::GridPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// `unit <= zero` in the grid order, yet the oracle answered 1 at `unit`
    /// and 0 at `zero`.
    #[error("oracle is not monotone: F({unit}) = 1 but F({zero}) = 0 and {unit} <= {zero}")]
    Contradiction { unit: GridPoint, zero: GridPoint },

    /// Same as [`Error::Contradiction`], expressed inside an induced cube.
    #[error("cube function is not monotone: f({unit}) = 1 but f({zero}) = 0")]
    CubeContradiction { unit: BitVertex, zero: BitVertex },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Two routes that must agree produced different answers.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
