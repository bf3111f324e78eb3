//! Lie splitting of transport and interactions on a uniform grid.
//!
//! One outer step of length `dt` runs `M` Lax-Friedrichs sub-steps in x,
//! then `M` in y, then `M` forward-Euler interaction sub-steps, each of size
//! `tau = dt / M`. Every sub-step reads the previous field and writes a
//! fresh one.

mod advection;
mod field;
mod interaction;
mod run;
mod simulation;

use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};
use crate::geometry::{DomainSpec, Rect, Vec2, GEOM_EPS};

pub use advection::{advect_x, advect_y, Transport};
pub use field::{DensitySampler, DistributionField};
pub use interaction::{interaction_step, InteractionTables};
pub use run::{run, run_observed, Snapshot, Trace};
pub use simulation::{Simulation, SolverConfig, StepReport, NEGATIVE_TOL};

/// Uniform cell-centered grid over the computational box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: Vec2,
}

impl Grid {
    pub fn new(bbox: &Rect, dx: f64, dy: f64) -> Result<Self> {
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(CrowdError::config("numerics.dx_m", "cell sizes must be positive"));
        }
        let count = |extent: f64, h: f64, field: &str| -> Result<usize> {
            let n = extent / h;
            let rounded = n.round();
            if rounded < 1.0 || (n - rounded).abs() > 1e-9 * rounded.max(1.0) {
                return Err(CrowdError::config(field, format!("box extent is not a whole number of cells ({n:.6})")));
            }
            Ok(rounded as usize)
        };
        Ok(Grid {
            nx: count(bbox.width(), dx, "numerics.dx_m")?,
            ny: count(bbox.height(), dy, "numerics.dy_m")?,
            dx,
            dy,
            origin: Vec2::new(bbox.x_min, bbox.y_min),
        })
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.origin.x + (i as f64 + 0.5) * self.dx, self.origin.y + (j as f64 + 0.5) * self.dy)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Indices of the cells whose centers lie in the closed rectangle.
    pub fn cells_in(&self, region: &Rect) -> Vec<usize> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if region.contains(self.center(i, j)) {
                    out.push(self.index(i, j));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeStepping {
    pub dt: f64,
    pub substeps: usize,
    pub t_end: f64,
}

impl TimeStepping {
    pub fn tau(&self) -> f64 {
        self.dt / self.substeps as f64
    }

    pub fn cfl_ratio(&self, grid: &Grid) -> f64 {
        let tau = self.tau();
        (tau / grid.dx).max(tau / grid.dy)
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if self.substeps < 3 {
            return Err(CrowdError::config(
                "numerics.substeps",
                format!("need at least 3 sub-steps, got {}", self.substeps),
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CrowdError::config("numerics.dt_s", "time step must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(CrowdError::config("numerics.t_end_s", "horizon must be non-negative"));
        }
        let ratio = self.cfl_ratio(grid);
        if ratio > 1.0 + 1e-12 {
            return Err(CrowdError::Cfl { ratio, tau: self.tau(), dx: grid.dx, dy: grid.dy });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Treatment of one edge of the computational box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// No flux through the edge.
    Wall,
    /// Zero-gradient ghost; mass may leave but never enter.
    Outflow,
    /// Wraps to the opposite edge.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPolicy {
    pub left: EdgeKind,
    pub right: EdgeKind,
    pub bottom: EdgeKind,
    pub top: EdgeKind,
}

impl BoundaryPolicy {
    pub fn validate(&self) -> Result<()> {
        let paired = |a: EdgeKind, b: EdgeKind| (a == EdgeKind::Periodic) == (b == EdgeKind::Periodic);
        if !paired(self.left, self.right) {
            return Err(CrowdError::config(
                "domain.boundaries",
                "left and right edges must both be periodic or neither",
            ));
        }
        if !paired(self.bottom, self.top) {
            return Err(CrowdError::config(
                "domain.boundaries",
                "bottom and top edges must both be periodic or neither",
            ));
        }
        Ok(())
    }

    pub fn periodic_x(&self) -> bool {
        self.left == EdgeKind::Periodic
    }

    pub fn periodic_y(&self) -> bool {
        self.bottom == EdgeKind::Periodic
    }

    pub fn any_periodic(&self) -> bool {
        self.periodic_x() || self.periodic_y()
    }
}

/// Open fraction of every cell face; walls close faces fully or partially.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceApertures {
    /// Faces normal to x, indexed `j * (nx + 1) + p` for `p = 0..=nx`.
    pub x: Vec<f64>,
    /// Faces normal to y, indexed `q * nx + i` for `q = 0..=ny`.
    pub y: Vec<f64>,
}

impl FaceApertures {
    /// Builds apertures from the domain walls. Walls must lie on grid lines.
    pub fn build(grid: &Grid, domain: &DomainSpec, policy: &BoundaryPolicy) -> Result<Self> {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut x = vec![1.0; (nx + 1) * ny];
        let mut y = vec![1.0; nx * (ny + 1)];
        let line_index = |coord: f64, origin: f64, h: f64, n: usize| -> Result<usize> {
            let k = (coord - origin) / h;
            let r = k.round();
            if (k - r).abs() > 1e-6 || r < 0.0 || r > n as f64 {
                return Err(CrowdError::Geometry(format!("wall at {coord:.6} does not lie on a grid line")));
            }
            Ok(r as usize)
        };
        let overlap = |lo: f64, hi: f64, a: f64, b: f64| (hi.min(b) - lo.max(a)).max(0.0);
        for wall in &domain.walls {
            let (c, lo, hi) = wall.span();
            if wall.is_vertical() {
                let p = line_index(c, grid.origin.x, grid.dx, nx)?;
                for j in 0..ny {
                    let y0 = grid.origin.y + j as f64 * grid.dy;
                    let o = overlap(lo, hi, y0, y0 + grid.dy) / grid.dy;
                    let face = &mut x[j * (nx + 1) + p];
                    *face = (*face - o).max(0.0);
                }
            } else {
                let q = line_index(c, grid.origin.y, grid.dy, ny)?;
                for i in 0..nx {
                    let x0 = grid.origin.x + i as f64 * grid.dx;
                    let o = overlap(lo, hi, x0, x0 + grid.dx) / grid.dx;
                    let face = &mut y[q * nx + i];
                    *face = (*face - o).max(0.0);
                }
            }
        }
        for j in 0..ny {
            let row = j * (nx + 1);
            if policy.left == EdgeKind::Wall {
                x[row] = 0.0;
            }
            if policy.right == EdgeKind::Wall {
                x[row + nx] = 0.0;
            }
            if policy.periodic_x() {
                let w = x[row].min(x[row + nx]);
                x[row] = w;
                x[row + nx] = w;
            }
        }
        for i in 0..nx {
            if policy.bottom == EdgeKind::Wall {
                y[i] = 0.0;
            }
            if policy.top == EdgeKind::Wall {
                y[ny * nx + i] = 0.0;
            }
            if policy.periodic_y() {
                let w = y[i].min(y[ny * nx + i]);
                y[i] = w;
                y[ny * nx + i] = w;
            }
        }
        // Snap rounding noise so fully covered faces are exactly closed.
        for a in x.iter_mut().chain(y.iter_mut()) {
            if *a < GEOM_EPS {
                *a = 0.0;
            } else if *a > 1.0 - GEOM_EPS {
                *a = 1.0;
            }
        }
        Ok(FaceApertures { x, y })
    }
}
