//! Coded caching and blind interference-avoidance delivery for (K,d) regular
//! partially connected fog radio access networks.
//!
//! * [`topology`]: the cyclic EN/user connectivity.
//! * [`placement`]: MDS coded cache placement over GF(p).
//! * [`scheduler`]: the stage/phase/block delivery schedule.
//! * [`validator`]: collision, completeness and end-to-end decoding checks, and
//!   NDT accounting.
//! * [`analysis`]: closed-form NDTs with fronthaul, thresholds and envelopes.
//! * [`oracle`]: exhaustive searches for small networks.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod field;
pub mod oracle;
pub mod placement;
pub mod rational;
pub mod scheduler;
pub mod topology;
pub mod validator;

pub use error::{Error, Result};
pub use field::PrimeField;
pub use placement::{build_placement, decode, encode, DemandVector, Library, PlacementScheme};
pub use rational::{Ndt, Rational};
pub use scheduler::{build_schedule, Schedule, Slot, Transmission};
pub use topology::Topology;
pub use validator::NdtReport;
