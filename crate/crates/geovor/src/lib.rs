//! Geodesic Voronoi diagrams on triangulated terrains.
//!
//! The crate provides:
//!
//! - terrain types over the unit square with exact-sign predicates
//!   ([`terrain`], [`geom`]);
//! - a Steiner-subdivision geodesic distance engine with single- and
//!   multi-source queries ([`engine`]);
//! - realistic-input measurements: low density, slope bound, the
//!   geodesic/Euclidean distance sandwich and geodesic disk areas
//!   ([`input_models`]);
//! - discrete Voronoi complexity counting: Voronoi vertices, chord/edge
//!   crossings, Euler audits ([`voronoi`], exact planar oracle in [`planar`]);
//! - the worst-case farm/road/ridge scenes with their analytic metric and
//!   elimination simulator ([`constructions`]);
//! - samplers, grid-contributor statistics and scaling experiments
//!   ([`experiments`]);
//! - random planar Voronoi cells on the unit torus: diameter tails,
//!   second-neighbor bands, inscribed disks and fatness ([`fatness`]).

pub mod constructions;
pub mod convex;
pub mod engine;
pub mod experiments;
pub mod fatness;
pub mod geom;
pub mod input_models;
pub mod planar;
pub mod svg;
pub mod terrain;
pub mod voronoi;

pub use engine::{DistanceField, GeodesicGraph};
pub use geom::{euclid_dist, Point2, Point3, Segment2};
pub use terrain::{build_terrain, read_terrain, write_terrain, TriangulatedTerrain};
