pub mod approx;
pub mod candidates;
pub mod convex;
pub mod error;
pub mod exact;
pub mod gen;
pub mod geometry;
pub mod hull;
pub mod oracle;
pub mod par;
pub mod partition;
pub mod perimeter_query;
pub mod quadtree;

pub use error::{Error, Result};
pub use geometry::{Orientation, Point};
