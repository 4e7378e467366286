//! Behavioural-inheritance conformance checking for finite class
//! hierarchies.
//!
//! A hierarchy is written in the `.bi` language ([`dsl`]), given an
//! exhaustive finite-state meaning ([`semantics`]), and checked edge by edge
//! against the forward-simulation rules for subclassing with the projection
//! function as retrieve relation ([`refinement`]). [`system`] covers the
//! promoted, whole-system view: object populations, global constraints, and
//! bounded substitutability experiments.

pub mod dsl;
pub mod model;
pub mod refinement;
pub mod report;
pub mod semantics;
pub mod system;
