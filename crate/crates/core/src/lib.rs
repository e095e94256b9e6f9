//! Lower-triangular factorization mechanisms for differentially private
//! counting and averaging under continual release.

pub mod apps;
pub mod error;
pub mod factor;
pub mod ldp;
pub mod mech;
pub mod privacy;

pub use error::{Error, Result};
