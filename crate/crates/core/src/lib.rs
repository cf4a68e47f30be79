//! Fractional balanced colorings of signed graphs and fractional arboricity.
//!
//! The crate builds the planar gadget family used to push the fractional
//! balanced chromatic number of planar signed simple graphs above 2,
//! re-checks the finite combinatorial claims about those gadgets by
//! exhaustive search, solves the covering LP exactly over rationals, and
//! verifies or synthesizes explicit `(p, q)`-colorings.

pub mod balance;
pub mod bounds;
pub mod certify;
pub mod compose;
pub mod error;
pub mod fracsolve;
pub mod gadgets;
pub mod graph;
pub mod oracle;
pub mod reproduce;
pub mod setfam;

pub use balance::{
    all_triangles, is_acyclic, is_balanced, is_k4_minus_equivalent, negative_cycle_witness,
    switch, CycleWitness,
};
pub use certify::{verify, Certificate, Class, Mode, VerifyReport};
pub use error::{Error, Result};
pub use fracsolve::{a_f, chi_fb, LpResult, Rational};
pub use gadgets::{BuildTrace, GadgetGraph, Orientation, TraceBase, TraceStep};
pub use graph::{parse_graph, serialize_graph, Sign, SignedGraph, VertexSet};
pub use setfam::{enumerate_sets, EnumOptions, Property, SetFamily};
