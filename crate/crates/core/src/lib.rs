//! Cycles (circles, lines, points and their quadric analogues in elliptic,
//! parabolic and hyperbolic metrics) as projective coefficient vectors, and
//! figures of cycles defined through geometric relations.

pub mod algebra;
pub mod cycle;
pub mod error;
pub mod figure;
mod linalg;
pub mod relations;
pub mod render;
pub mod solver;

pub use algebra::{is_less_than_epsilon, sl2_lift, CliffordElement, FscMatrix, Metric, Scalar, DEFAULT_EPSILON};
pub use cycle::Cycle;
pub use error::{Error, Result};
pub use figure::{Figure, Value};
pub use relations::{CheckKind, MeasureKind, Parameter, RelationKind, RelationSpec};
pub use solver::{evaluate_cycle, unique_cycle, SolutionSet};
