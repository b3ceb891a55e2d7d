//! Motion of polygonal curves within a fixed class of edge normal directions.
//!
//! A polygon class is pinned by its cyclic sequence of outward unit normals;
//! a polygon in the class is just a vector of edge heights. This crate
//! provides the closed-form geometry of such polygons ([`geom`]), a catalogue
//! of velocity laws with declared area/length conservation behaviour
//! ([`law`]), an explicit Euler scheme and a second-order implicit midpoint
//! scheme whose discrete area change is exact for constant-area-speed laws
//! ([`integrate`]), conservation and convergence diagnostics
//! ([`diagnostics`]), preset shapes and a plain-text scenario format
//! ([`scenario`]), and CSV/SVG writers ([`output`]).

pub mod diagnostics;
pub mod geom;
pub mod integrate;
pub mod law;
pub mod output;
pub mod quad;
pub mod sampling;
pub mod scenario;

pub use geom::{NormalFan, Polygon, Vec2};
pub use integrate::{run, Scheme, StepControl, Trajectory};
pub use law::{VectorField2D, VelocityLaw};
