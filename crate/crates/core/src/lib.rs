//! Recognition of monotone binary functions on the multi-valued grid
//! `{0..=m}^n` by membership queries.
//!
//! The grid is split into vertical equivalence classes, each
//! order-isomorphic to a binary cube ([`cube_split`]). The function induced
//! on each cube is monotone and is recognized with Hansel chains
//! ([`hansel`]); the per-cube answers are mapped back and reduced to the
//! lower units and upper zeros of the grid function ([`recognizer`]).

pub mod cube_split;
pub mod error;
pub mod grid;
pub mod hansel;
pub mod oracles;
pub mod recognizer;
pub mod report;

pub use cube_split::{Anchor, BitVertex, CubeCell};
pub use error::{Error, Result};
pub use grid::{GridParams, GridPoint};
pub use hansel::{Chain, CubeAssignment};
pub use oracles::{ExplicitMonotone, Oracle, OracleSpec};
pub use recognizer::{AlgorithmTag, AreaResource, OracleHandle, RecognitionResult, Recognizer};
