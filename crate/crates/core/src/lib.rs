//! Rowmotion dynamics, toggleability spaces and homomesy detection on fence
//! posets, computed with exact rational arithmetic.

pub mod error;
pub mod fence;
pub mod ideals;
pub mod lifted;
pub mod linalg;
pub mod selfdual;
pub mod spaces;
pub mod stats;

pub use error::{FenceError, Result};
pub use fence::{build_fence, ElementClass, Fence, FenceShape, Involution, Segment};
pub use ideals::{DynamicsMap, Ideal, IdealIndex, OrbitDecomposition};
pub use linalg::{RatMatrix, Rational};
