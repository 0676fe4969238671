//! Local inverses from Sylvester minors, the quadratic closed form, and the
//! global piecewise inverse.

mod local;
mod piecewise;
mod sylvester;

pub use local::{
    active_triple_det, build_local_inverse, local_inverse_from_minors, monomial_to_bernstein,
    quadratic_closed_form, InverseSource, LocalInverse, RationalMap,
};
pub use piecewise::{
    genericity_check, InverseSegment, PiecewiseInverse, Preimage, PreimageResult, SegmentReport,
};
pub(crate) use piecewise::finish_candidates;
pub use sylvester::{sylvester, SylvesterPencil};
