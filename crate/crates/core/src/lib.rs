//! Exact triangle-area census for planar line arrangements.
//!
//! Arithmetic is exact over `Q` or a single quadratic field `Q(√d)`;
//! constructions whose defining equations leave the field run on
//! certified intervals.

pub mod arrangement;
pub mod bounds;
pub mod census;
pub mod chain;
pub mod conic;
pub mod constructions;
pub mod duality;
pub mod extraction;
pub mod geometry;
pub mod interval;
mod kernel;
mod linalg;
pub mod par;
pub mod scalar;

pub use arrangement::{Arrangement, ArrangementError, Classification};
pub use geometry::{
    choose_reference_frame, frame_params, intersect, three_term_area, triple_area, AffineMap, Frame, FrameParam,
    GeometryError, Intersection, Line, Point, ReferenceFrame, TripleArea, TripleStatus,
};
pub use interval::{CertifiedInterval, Comparison, PrecisionPolicy, RealExpr};
pub use par::ExecMode;
pub use scalar::{Field, QuadExt, Radicand, Rational, Scalar, ScalarError, Sign};
