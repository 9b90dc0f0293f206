//! Planar domains: an ambient disk minus obstacles, with exact distance,
//! membership and nearest-boundary-point queries.

mod domain;
mod obstacle;
mod point;
mod spec;

pub use domain::{BoundaryPart, Closest, Domain};
pub(crate) use domain::LOCAL_FRAME_RADIUS;
pub use obstacle::{Arc, Obstacle, Polygon, Segment};
pub use point::Point;
pub use spec::{AmbientSpec, DomainSpec, ObstacleSpec};
