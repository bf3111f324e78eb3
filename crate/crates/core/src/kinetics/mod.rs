//! Closure and interaction terms of the discrete-direction kinetic model.

mod collision;
mod speed;
mod tables;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};

pub use collision::{collision_operator, CellContext};
pub use speed::{speed, speed_clamped, CubicCoefficients, VelocityLaw};
pub use tables::{
    congestion_direction, geometric_preferred_direction, interaction_preferred_direction, table_a_row, table_b_entry,
    transition, Transition,
};

/// The discrete set of walking directions `theta_i = i * 2 pi / n`, `i = 0..n`.
///
/// Indices are zero-based here; index 0 is the direction of the positive
/// x axis and indices increase counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionSet {
    n: usize,
}

impl DirectionSet {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(CrowdError::config("model.directions", format!("need at least 3 directions, got {n}")));
        }
        Ok(DirectionSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn delta(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn angle(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        i as f64 * self.delta()
    }

    pub fn unit(&self, i: usize) -> (f64, f64) {
        let a = self.angle(i);
        (a.cos(), a.sin())
    }

    /// Clockwise neighbor, wrapping around.
    pub fn prev(&self, i: usize) -> usize {
        (i + self.n - 1) % self.n
    }

    /// Counterclockwise neighbor, wrapping around.
    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.n
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.angle(i))
    }
}

/// Angular distance on the circle, in `[0, pi]`.
pub fn angular_distance(theta_p: f64, theta_q: f64) -> f64 {
    let d = (theta_p - theta_q).abs() % TAU;
    if d <= std::f64::consts::PI {
        d
    } else {
        TAU - d
    }
}

/// Maps an angle into `[0, 2 pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Environment quality in `[0, 1]`.
    pub alpha: f64,
    /// Weight between congestion avoidance (0) and following the stream (1).
    pub epsilon: f64,
    pub velocity_law: VelocityLaw,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CrowdError::config("model.alpha", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(CrowdError::config("model.epsilon", "must lie in [0, 1]"));
        }
        Ok(())
    }
}
