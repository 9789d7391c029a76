//! Sequential unsharp measurements on one half of a two-qubit entangled state.
//!
//! Alice repeatedly measures her qubit with tunable-sharpness instruments;
//! after each step the shared state keeps the form
//! `U_A ⊗ U_B (cos η |00⟩ + sin η |11⟩)` and can be certified either through
//! a CHSH violation or an entanglement witness.
//!
//! - [`qcore`]: kets, operators, Paulis, Y-rotations, Schmidt decomposition.
//! - [`instrument`]: Kraus operators, effects, observables, state update.
//! - [`protocol`]: closed-form parameter recursion, branch simulation, tree.
//! - [`analysis`]: CHSH (Born rule and closed form), witness, min-entropy bound.
//! - [`montecarlo`]: Poisson coincidence counts and estimators.
//!
//! Linear algebra and protocol code is generic over [`Scalar`] (`f32`/`f64`);
//! the aliases below fix it to `f64`, which is what the tolerances quoted in
//! the documentation assume.

// `!(x > 0)` is used on purpose so NaN lands in the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod instrument;
pub mod montecarlo;
pub mod protocol;
pub mod qcore;
pub mod scalar;

pub use error::{Error, Result};
pub use instrument::{Basis, Outcome};
pub use montecarlo::{CountTable, Estimate, ExperimentPlan, Layout};
pub use protocol::{History, HistoryEntry};
pub use scalar::Scalar;

pub type Ket2 = qcore::Ket2<f64>;
pub type Ket4 = qcore::Ket4<f64>;
pub type Op2 = qcore::Op2<f64>;
pub type Op4 = qcore::Op4<f64>;
pub type SchmidtResult = qcore::SchmidtResult<f64>;
pub type MeasurementSetting = instrument::MeasurementSetting<f64>;
pub type KrausPair = instrument::KrausPair<f64>;
pub type StepParams = protocol::StepParams<f64>;
pub type ProtocolConfig = protocol::ProtocolConfig<f64>;
pub type TreeNode = protocol::TreeNode<f64>;
pub type BranchRun = protocol::BranchRun<f64>;
pub type ChshBreakdown = analysis::ChshBreakdown<f64>;
pub type WitnessReport = analysis::WitnessReport<f64>;
