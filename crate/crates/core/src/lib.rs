//! Occluded-pedestrian braking simulator.
//!
//! A subject vehicle approaches a midblock crossing while a vehicle in the
//! adjacent lane stops for, and hides, a crossing pedestrian. The hidden
//! pedestrian can be relayed to the subject vehicle over V2V; the subject
//! vehicle brakes in proportion to its time-to-collision.

pub mod brake;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod scenario;
pub mod ttc;
pub mod world;

pub use brake::{decel_of, decide, derive_tau_max, BrakeCommand, BrakePolicy};
pub use error::{Error, Result};
pub use geometry::{from_si, relative_state, to_si, ActorState, RelativeState, Unit, Vec2};
pub use harness::{
    run_scenario, sweep, write_csv, write_trace, SimResult, StepRecord, Strategy, SweepSpec,
};
pub use scenario::{calibrate_entry, load_config, serialize_config, Scenario, ScenarioConfig};
pub use ttc::{classify_ttc, quadratic_coeffs, ttc, QuadraticDiag, TtcOutcome, NO_VALID_SENTINEL};
pub use world::{ChannelModel, SensorModel, V2VMessage, VehicleBody, WorldParams, WorldState};
