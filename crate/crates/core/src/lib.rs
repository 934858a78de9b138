//! Fixed points and transient lengths of one-dimensional sandpile models.
//!
//! [`model`] holds configurations and the SPM / IPM(k) rules together with a
//! naive simulator; [`analysis`] the closed forms for single piles and the
//! exhaustive orbit graphs; [`fastfix`] the cut / compute / merge algorithm;
//! [`harness`] input generators and the fast-vs-naive benchmark runner.

pub mod analysis;
pub mod error;
pub mod fastfix;
pub mod harness;
pub mod model;

pub use analysis::{
    build_orbit_graph, closed_form_fixpoint, f_n, integer_decomposition, is_lattice, is_reachable,
    restrict_length, t_seq_closed_form, Decomposition, OrbitGraph, TransientReport,
};
pub use error::{Result, SandpileError};
pub use fastfix::{run_fast_general, run_fast_spm, FixpointReport, Interval};
pub use harness::{Algorithm, BenchRecord};
pub use model::{
    applicable_moves, apply_move, height_differences, phi, run_to_fixpoint_naive, step_parallel,
    Configuration, Mode, Model, ModelKind, Move, Rule,
};
