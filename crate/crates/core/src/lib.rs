//! Skew braces, the biquandles they induce, and the braid-closure
//! fixed-point invariant `J_X(K)` for finite and continuous carriers.

pub mod biquandle;
pub mod brace;
pub mod braid;
pub mod element;
pub mod error;
pub mod group;
pub mod link;
pub mod numeric;
pub mod quandle;
pub mod report;

pub use biquandle::{
    brace_to_biquandle, check_biquandle_axioms, detect_quandle, is_involutive, make_alexander,
    make_wada, quandle_to_biquandle, Biquandle, BiquandleDoc, ClosedForm, FiniteMaps,
    InvolutivityReport, Provenance,
};
pub use brace::{
    even_residue_brace, heisenberg_brace, inversion_semidirect_brace, make_radical_ring_brace, make_semidirect_brace, make_trivial_brace,
    torus_brace, validate_skew_brace, BraceOrder, SkewBrace,
};
pub use braid::{
    apply_letter, fixed_points_finite, fixed_points_finite_with, induced_map, markov_conjugate,
    markov_stabilize, parse_braid, BraidWord, EnumerationConfig, FixedSetReport,
};
pub use element::{Carrier, Element};
pub use error::{Error, Result};
pub use group::{validate_group, ContinuousGroup, CustomGroup, FiniteGroup, Group, TableDoc};
pub use link::{
    closure_components, coloring_space_system, crossing_matrix, verify_system_vs_fixed_points,
    BilinearSystem, Components, ConsistencyReport, Equation, LinkProfile, Term,
};
pub use numeric::{
    estimate_dimension, estimate_dimension_with, fixed_residual, sample_fixed_set,
    solve_fixed_point_near, solve_fixed_point_near_with, DimensionEstimate, FixedSample,
    NumericConfig,
};
pub use quandle::{check_quandle_axioms, Quandle};
pub use report::{CheckMode, ValidationReport, Violation};
