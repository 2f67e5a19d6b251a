//! Penny graphs: contact graphs of non-overlapping unit-diameter disks in the
//! plane, together with the machinery to study discrete harmonic functions on
//! them.
//!
//! The pipeline runs packing -> contact graph -> faces -> diagonal
//! triangulation -> scalar fields, and on top of that: piecewise linear
//! extension with exact quadrature, mean value inequality probes, a Gram
//! pencil estimator for the dimension of polynomial-growth harmonic function
//! spaces, heat flow with caloric polynomials, and metric-measure diagnostics
//! (volume doubling, Poincare inequality, quasi-isometry to the lattice).
//!
//! Every capability has a runnable example under `examples/`; the `penny`
//! binary exposes the same operations as subcommands emitting JSON reports.

pub mod cli;
pub mod contact;
pub mod dimension;
pub mod error;
pub mod extend;
pub mod faces;
pub mod field;
pub mod geometry;
pub mod heat;
pub mod packing;
pub mod report;
pub mod svg;
pub mod triangulate;

pub use contact::{ball, build_contact_graph, graph_distance, vertex_boundary, PennyGraph, VertexSet};
pub use error::{Error, Result};
pub use faces::{face_polygon, trace_faces, FaceSet, FaceWalk};
pub use field::{discrete_mvi_ratio, laplacian, solve_dirichlet, ScalarField};
pub use packing::{generate_lattice, generate_random_subset, validate_packing, DiskPacking, LatticeKind};
pub use triangulate::{quality_report, triangulate_face, triangulate_window, Triangle, Triangulation};
