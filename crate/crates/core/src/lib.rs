//! Discrete-direction kinetic model of pedestrian crowds.
//!
//! The state is a set of densities `f^i(t, x)`, one per walking direction
//! `theta_i`, advanced by Lie splitting: Lax-Friedrichs transport along x,
//! then along y, then a forward-Euler step of the interaction operator built
//! from two tables of games (interaction with the environment and with other
//! pedestrians).
//!
//! ```no_run
//! use crowdkin::scenario::{builtin, Experiment};
//!
//! let cfg = builtin("room-one-exit-46")?;
//! let exp = Experiment::from_config(&cfg)?;
//! let trace = crowdkin::solver::run(&exp)?;
//! println!("{:?}", trace.evacuation_time);
//! # Ok::<(), crowdkin::CrowdError>(())
//! ```

// Validation checks are written as `!(x > 0.0)` on purpose: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod kinetics;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod solver;

pub use error::{CrowdError, Result};
pub use geometry::{DomainSpec, GeometricQuery, Obstacle, Rect, Segment, Side, Vec2};
pub use kinetics::{DirectionSet, ModelParams, VelocityLaw};
pub use metrics::{MeasurementRegion, MetricSeries};
pub use scenario::{Experiment, ReferenceQuantities, ScenarioConfig};
pub use solver::{BoundaryPolicy, DistributionField, EdgeKind, Grid, Simulation, SolverConfig, TimeStepping, Trace};
