//! Exact correlation polytopes for Bell and sequential Wigner's-friend
//! scenarios.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`]: scenarios, behaviours and their coordinate layout.
//! * [`polytope`]: exact vertex/facet enumeration, LP membership with
//!   certificates, polytope equality and facet canonicalisation.
//! * [`models`]: the LD, NS, PD, LF and SW vertex constructions and the CH
//!   inequality family.
//! * [`quantum`]: Born-rule behaviours, measurement dilation and the
//!   sequential friend/reversal protocol.
//! * [`verify`]: end-to-end claim harnesses producing certified reports.
//!
//! All polytope-facing arithmetic is exact ([`Rational`]); floating point
//! only appears inside [`quantum`] and is rationalised at its boundary.

pub mod error;
pub mod linalg;
pub mod models;
pub mod polytope;
pub mod quantum;
pub mod rational;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use models::{
    ch_inequalities, ch_row, ch_row_lifted, evaluate_inequality, ld_vertices, lf_vertices, ns_hrep, ns_vertices,
    pd_vertices, sw_scenario, sw_vertices, DeterministicStrategy, PdSpec, SwScenario, SwVertexLabel,
};
pub use polytope::{
    canonicalize_inequality, facet_enum, membership, polytope_equal, vertex_enum, CanonicalForm,
    HPolytope, Inequality, MembershipResult, SymmetryGroup, VPolytope,
};
pub use quantum::{
    born_behaviour, dilate_measurement, polarization_projectors, rationalize_behaviour,
    sequential_behaviour, ProjectiveMeasurement, QuantumBehaviour, QuantumSetup,
    SequentialProtocol, StateVector,
};
pub use rational::Rational;
pub use scenario::{Behaviour, Scenario, Violation};
pub use verify::{
    verify_lf_gap, verify_quantum_violation, verify_theorem5, verify_woodhead, Outcome, ScaleGuard,
    VerificationReport, Witness,
};
