//! Deciding first-order immobilization of a planar convex body by finitely
//! many boundary points.

pub mod body;
pub mod classify;
pub mod consistency;
pub mod feasibility;
pub mod fixtures;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod render;
pub mod sectors;
