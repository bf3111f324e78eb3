//! Observables: person counts, evacuation time, grid-averaged Voronoi density
//! and flow in front of exits, and a lane order parameter for corridors.

use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};
use crate::geometry::Rect;
use crate::kinetics::DirectionSet;
use crate::scenario::ReferenceQuantities;
use crate::solver::{DistributionField, Grid};

/// Count below which the room is considered empty.
pub const EVACUATED_BELOW: f64 = 0.5;

/// Area in front of an exit over which density and flow are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRegion {
    pub label: String,
    /// Dimensionless rectangle.
    pub region: Rect,
    pub exit_width_m: f64,
}

/// A labeled time series with strictly increasing timestamps in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub label: String,
    pub units: String,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl MetricSeries {
    pub fn new(label: impl Into<String>, units: impl Into<String>) -> Self {
        MetricSeries { label: label.into(), units: units.into(), times: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(CrowdError::config(
                    "series",
                    format!("timestamp {t} does not follow {last} in `{}`", self.label),
                ));
            }
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    /// Value at `t`, linearly interpolated; clamped to the end samples.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let n = self.times.len();
        if n == 0 {
            return None;
        }
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return Some(self.values[0]);
        }
        if k == n {
            return Some(self.values[n - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// Trapezoidal time average over `[t0, t1]` using the stored samples.
    pub fn time_average(&self, t0: f64, t1: f64) -> Option<f64> {
        if self.is_empty() || t1 <= t0 {
            return None;
        }
        let mut knots = vec![t0];
        knots.extend(self.times.iter().copied().filter(|&t| t > t0 && t < t1));
        knots.push(t1);
        let mut area = 0.0;
        for w in knots.windows(2) {
            let a = self.value_at(w[0])?;
            let b = self.value_at(w[1])?;
            area += 0.5 * (a + b) * (w[1] - w[0]);
        }
        Some(area / (t1 - t0))
    }
}

/// Persons in the given cells: `rho_M * D^2 * sum(rho * dx * dy)`.
pub fn person_count(f: &DistributionField, grid: &Grid, cells: &[usize], refs: &ReferenceQuantities) -> f64 {
    let mass: f64 = cells.iter().map(|&c| f.density_at(c)).sum();
    mass * grid.cell_area() * refs.persons_per_unit_mass()
}

/// Persons in the cells whose centers lie in `region` (dimensionless).
pub fn persons_in(f: &DistributionField, grid: &Grid, region: &Rect, refs: &ReferenceQuantities) -> f64 {
    person_count(f, grid, &grid.cells_in(region), refs)
}

/// First time the count drops below half a person, linearly interpolated
/// between the bracketing samples; `None` if it never does.
pub fn evacuation_time(count: &MetricSeries) -> Option<f64> {
    let (t, v) = (count.times(), count.values());
    let k = v.iter().position(|&c| c < EVACUATED_BELOW)?;
    if k == 0 {
        return Some(t[0]);
    }
    let (t0, t1, c0, c1) = (t[k - 1], t[k], v[k - 1], v[k]);
    Some(t0 + (c0 - EVACUATED_BELOW) / (c0 - c1) * (t1 - t0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiSample {
    /// Mean density in persons per square meter.
    pub density: f64,
    /// Density-weighted mean speed in m/s.
    pub speed: f64,
    /// `density * speed * exit width`, persons per second.
    pub flow: f64,
}

/// Grid-averaged density and flow over `cells`; `speed` is dimensionless per cell.
pub fn voronoi_density_flow(
    f: &DistributionField,
    speed: &[f64],
    cells: &[usize],
    refs: &ReferenceQuantities,
    exit_width_m: f64,
) -> VoronoiSample {
    if cells.is_empty() {
        return VoronoiSample { density: 0.0, speed: 0.0, flow: 0.0 };
    }
    let rho: Vec<f64> = cells.iter().map(|&c| f.density_at(c)).collect();
    let mass: f64 = rho.iter().sum();
    let density = mass / cells.len() as f64 * refs.capacity_per_m2;
    let mean_v = if mass > 0.0 {
        cells.iter().zip(&rho).map(|(&c, r)| r * speed[c]).sum::<f64>() / mass
    } else {
        cells.iter().map(|&c| speed[c]).sum::<f64>() / cells.len() as f64
    };
    let speed_mps = mean_v * refs.speed_mps;
    VoronoiSample { density, speed: speed_mps, flow: density * speed_mps * exit_width_m }
}

/// Mass-weighted mean over grid rows of `|R - L| / (R + L + S)`, where `R`
/// and `L` are the row masses walking right and left and `S` the rest.
/// Zero for an empty field.
pub fn lane_order_parameter(f: &DistributionField, grid: &Grid, dirs: &DirectionSet) -> f64 {
    let nd = dirs.len();
    let sign: Vec<f64> = (0..nd)
        .map(|d| {
            let c = dirs.unit(d).0;
            if c > 1e-12 {
                1.0
            } else if c < -1e-12 {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    let (mut weighted, mut total) = (0.0, 0.0);
    for j in 0..grid.ny {
        let (mut signed, mut mass) = (0.0, 0.0);
        for i in 0..grid.nx {
            let cell = f.cell(grid.index(i, j));
            for (v, s) in cell.iter().zip(&sign) {
                signed += s * v;
                mass += v;
            }
        }
        if mass > 0.0 {
            // mass * |signed / mass|
            weighted += signed.abs();
            total += mass;
        }
    }
    if total > 0.0 {
        weighted / total
    } else {
        0.0
    }
}
