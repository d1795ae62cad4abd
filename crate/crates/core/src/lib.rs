//! Simulation and analysis of a two-platform knowledge ecosystem: a GenAI
//! platform whose answers go stale between trainings, and a human forum whose
//! value grows with the number of people using it.
//!
//! * [`model`] — utilities, instances and training schemes.
//! * [`dynamics`] — round-by-round simulation.
//! * [`optimizer`] — exact and approximate revenue/welfare optimisation.
//! * [`cyclic`] — periodic schemes and their long-run revenue.
//! * [`regulator`] — welfare bounds a regulator can certify.
//! * [`config`] / [`report`] — text configuration and CSV/report output.

pub mod config;
pub mod cyclic;
pub mod dynamics;
pub mod error;
pub mod interval;
pub mod model;
pub mod optimizer;
pub mod presets;
pub mod regulator;
pub mod report;

pub use error::{EligibilityReason, Error, Result};
pub use model::{
    DecayUtility, Instance, InstanceParams, NetworkUtility, Sensitivity, TrainingScheme,
};
