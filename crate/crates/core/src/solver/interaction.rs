//! Forward-Euler interaction sub-step in transfer form.
//!
//! Every table row moves mass from a direction `h` to one neighbor only, so
//! `tau * J` can be applied as a list of transfers instead of assembling
//! full rows: the geometric game moves `tau * mu * w_h * f^h` and each
//! encounter with field direction `k` moves `tau * eta * alpha * rho *
//! beta_hk * f^h * f^k`.

use rayon::prelude::*;

use super::{DensitySampler, DistributionField, Grid};
use crate::kinetics::{congestion_direction, interaction_preferred_direction, transition, DirectionSet, Transition};

/// Precomputed transition data for the interaction step.
#[derive(Debug, Clone)]
pub struct InteractionTables {
    dirs: DirectionSet,
    /// Local quality per cell.
    alpha: Vec<f64>,
    /// Geometric transition of every `(cell, h)`, weight already scaled by the
    /// local quality.
    geo: Vec<Transition>,
    /// Pedestrian transition of every `(h, c, k)` with congestion direction
    /// `c` and field direction `k`; weight is the unscaled damping factor.
    ped: Vec<Transition>,
}

impl InteractionTables {
    /// `theta_g` holds the geometric preferred direction of every `(cell, h)`
    /// pair, cell-major.
    pub fn new(dirs: DirectionSet, epsilon: f64, alpha: Vec<f64>, theta_g: &[f64]) -> Self {
        let n = dirs.len();
        assert_eq!(theta_g.len(), alpha.len() * n);
        let geo = theta_g.iter().enumerate().map(|(idx, &tg)| transition(idx % n, tg, alpha[idx / n], &dirs)).collect();
        let mut ped = Vec::with_capacity(n * n * n);
        for h in 0..n {
            for c in 0..n {
                for k in 0..n {
                    let tp = interaction_preferred_direction(dirs.angle(c), dirs.angle(k), epsilon);
                    ped.push(transition(h, tp, 1.0, &dirs));
                }
            }
        }
        InteractionTables { dirs, alpha, geo, ped }
    }

    pub fn dirs(&self) -> &DirectionSet {
        &self.dirs
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    #[inline]
    fn ped(&self, h: usize, c: usize, k: usize) -> Transition {
        let n = self.dirs.len();
        self.ped[(h * n + c) * n + k]
    }
}

/// Applies `f <- f + tau * J[f]` on every cell, reading `input` and writing
/// `output`. Congestion directions come from the density of `input`.
pub fn interaction_step(
    tables: &InteractionTables,
    grid: &Grid,
    periodic: (bool, bool),
    input: &DistributionField,
    output: &mut DistributionField,
    tau: f64,
) {
    let dirs = tables.dirs;
    let n = dirs.len();
    let nx = grid.nx;
    let density = input.density();
    let sampler = DensitySampler { values: &density, grid, periodic_x: periodic.0, periodic_y: periodic.1 };
    let units: Vec<(f64, f64)> = (0..n).map(|d| dirs.unit(d)).collect();

    output.as_mut_slice().par_chunks_mut(nx * n).enumerate().for_each(|(j, out_row)| {
        let mut derivs = vec![0.0; n];
        for i in 0..nx {
            let cell = grid.index(i, j);
            let f = input.cell(cell);
            let out = &mut out_row[i * n..(i + 1) * n];
            out.copy_from_slice(f);
            let rho = density[cell];
            if rho == 0.0 {
                continue;
            }
            let rc = rho.clamp(0.0, 1.0);
            let mu = 1.0 - rc;
            let eta = rc;
            let alpha = tables.alpha[cell];
            for (d, &(c, s)) in units.iter().enumerate() {
                derivs[d] = sampler.directional_derivative(i, j, c, s);
            }
            let ped_scale = tau * eta * alpha * rc;
            for h in 0..n {
                let fh = f[h];
                if fh == 0.0 {
                    continue;
                }
                let g = tables.geo[cell * n + h];
                let m = tau * mu * g.weight * fh;
                out[h] -= m;
                out[g.target] += m;
                if ped_scale == 0.0 {
                    continue;
                }
                let c = congestion_direction(h, &derivs, &dirs);
                for (k, &fk) in f.iter().enumerate() {
                    let t = tables.ped(h, c, k);
                    let m = ped_scale * t.weight * fh * fk;
                    out[h] -= m;
                    out[t.target] += m;
                }
            }
        }
    });
}
