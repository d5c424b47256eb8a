//! Knowledge excesses for complementary measurements on a correlated qubit pair.
//!
//! A two-qubit state is held as a 4×4 density matrix in the tensor basis
//! `|HH⟩, |HV⟩, |VH⟩, |VV⟩` with the signal qubit first and the meter qubit
//! second. Bloch direction `+z` is `|H⟩` and `+x` is `(|H⟩ + |V⟩)/√2`.

pub mod bloch;
pub mod canonical;
pub mod conditional;
pub mod error;
pub mod expsim;
pub mod fuzz;
pub mod io;
pub mod knowledge;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod rotation;
pub mod state;
pub mod states;
pub mod sweep;

pub use bloch::BlochForm;
pub use canonical::{
    canonical_form, filter_normal_form, saturate_after_filter, CanonicalForm, FilterResult,
};
pub use conditional::{conditional_decompose, ConditionalDecomposition};
pub use error::{Error, Result};
pub use knowledge::{
    apriori, bell_max, check_bound, check_same_meter_bound, distinguishability, knowledge,
    knowledge_excess, optimal_meter, BoundCheck, KnowledgeReport, OptimalMeter,
};
pub use measurement::QubitMeasurement;
pub use optimize::{optimize_excess_sum, ExcessOptimum};
pub use rotation::{rotation_of_unitary, unitary_from_rotation};
pub use state::TwoQubitState;
