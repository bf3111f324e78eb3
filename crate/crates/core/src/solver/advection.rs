//! Lax-Friedrichs transport sub-steps along one axis.
//!
//! The flux through the face between cells `L` and `R` is
//! `w * (h / (2 tau) * (phi_L - phi_R) + (a_L phi_L + a_R phi_R) / 2)` with
//! `a = v * cos(theta)` (or `sin` along y) and `w` the open fraction of the
//! face. Outflow edges pass only the outgoing part of `a * phi` of the
//! adjacent cell, so nothing re-enters from outside the box.

use rayon::prelude::*;

use super::{BoundaryPolicy, DistributionField, EdgeKind, FaceApertures, Grid};
use crate::kinetics::DirectionSet;

/// Removes the rounding residue of `cos(pi / 2)` and friends so that axis
/// directions carry no transport across them.
fn snap(c: f64) -> f64 {
    if c.abs() < 1e-12 {
        0.0
    } else {
        c
    }
}

#[inline]
fn lf_flux(diff: f64, phi_l: f64, phi_r: f64, a_l: f64, a_r: f64) -> f64 {
    diff * (phi_l - phi_r) + 0.5 * (a_l * phi_l + a_r * phi_r)
}

/// Shared inputs of one transport sub-step.
pub struct Transport<'a> {
    pub grid: &'a Grid,
    pub faces: &'a FaceApertures,
    pub policy: &'a BoundaryPolicy,
    pub dirs: &'a DirectionSet,
    /// Dimensionless speed per cell.
    pub speed: &'a [f64],
    pub tau: f64,
}

/// One sub-step along x. Returns the mass that left through the box edges.
pub fn advect_x(t: &Transport<'_>, input: &DistributionField, output: &mut DistributionField) -> f64 {
    let g = t.grid;
    let (nx, nd) = (g.nx, t.dirs.len());
    let diff = g.dx / (2.0 * t.tau);
    let ratio = t.tau / g.dx;
    let cosines: Vec<f64> = (0..nd).map(|d| snap(t.dirs.unit(d).0)).collect();
    let periodic = t.policy.periodic_x();
    let (left, right) = (t.policy.left, t.policy.right);
    let src = input.as_slice();

    let row_out: Vec<f64> = output
        .as_mut_slice()
        .par_chunks_mut(nx * nd)
        .enumerate()
        .map(|(j, out_row)| {
            let row = &src[j * nx * nd..(j + 1) * nx * nd];
            let speed = &t.speed[j * nx..(j + 1) * nx];
            let apert = &t.faces.x[j * (nx + 1)..(j + 1) * (nx + 1)];
            let mut flux = vec![0.0; nx + 1];
            let mut net = 0.0;
            for (d, &c) in cosines.iter().enumerate() {
                let phi = |i: usize| row[i * nd + d];
                let a = |i: usize| speed[i] * c;
                for p in 1..nx {
                    let w = apert[p];
                    flux[p] = if w == 0.0 { 0.0 } else { w * lf_flux(diff, phi(p - 1), phi(p), a(p - 1), a(p)) };
                }
                if periodic {
                    let f = apert[0] * lf_flux(diff, phi(nx - 1), phi(0), a(nx - 1), a(0));
                    flux[0] = f;
                    flux[nx] = f;
                } else {
                    flux[0] = match left {
                        EdgeKind::Outflow => apert[0] * (a(0) * phi(0)).min(0.0),
                        _ => 0.0,
                    };
                    flux[nx] = match right {
                        EdgeKind::Outflow => apert[nx] * (a(nx - 1) * phi(nx - 1)).max(0.0),
                        _ => 0.0,
                    };
                    net += flux[nx] - flux[0];
                }
                for i in 0..nx {
                    out_row[i * nd + d] = phi(i) - ratio * (flux[i + 1] - flux[i]);
                }
            }
            net * t.tau * g.dy
        })
        .collect();
    row_out.iter().sum()
}

/// One sub-step along y. Returns the mass that left through the box edges.
pub fn advect_y(t: &Transport<'_>, input: &DistributionField, output: &mut DistributionField) -> f64 {
    let g = t.grid;
    let (nx, ny, nd) = (g.nx, g.ny, t.dirs.len());
    let diff = g.dy / (2.0 * t.tau);
    let ratio = t.tau / g.dy;
    let sines: Vec<f64> = (0..nd).map(|d| snap(t.dirs.unit(d).1)).collect();
    let periodic = t.policy.periodic_y();
    let (bottom, top) = (t.policy.bottom, t.policy.top);
    let src = input.as_slice();
    let at = |i: usize, j: usize, d: usize| src[(j * nx + i) * nd + d];
    let spd = |i: usize, j: usize| t.speed[j * nx + i];

    // Flux through face q (between rows q - 1 and q) for column i, direction d.
    let face_flux = |q: usize, i: usize, d: usize| -> f64 {
        let w = t.faces.y[q * nx + i];
        let s = sines[d];
        if q == 0 || q == ny {
            if periodic {
                let (l, r) = (ny - 1, 0);
                return w * lf_flux(diff, at(i, l, d), at(i, r, d), spd(i, l) * s, spd(i, r) * s);
            }
            let kind = if q == 0 { bottom } else { top };
            if kind != EdgeKind::Outflow || w == 0.0 {
                return 0.0;
            }
            return if q == 0 {
                w * (spd(i, 0) * s * at(i, 0, d)).min(0.0)
            } else {
                w * (spd(i, ny - 1) * s * at(i, ny - 1, d)).max(0.0)
            };
        }
        if w == 0.0 {
            return 0.0;
        }
        w * lf_flux(diff, at(i, q - 1, d), at(i, q, d), spd(i, q - 1) * s, spd(i, q) * s)
    };

    let row_out: Vec<f64> = output
        .as_mut_slice()
        .par_chunks_mut(nx * nd)
        .enumerate()
        .map(|(j, out_row)| {
            let mut net = 0.0;
            for i in 0..nx {
                for d in 0..nd {
                    let lo = face_flux(j, i, d);
                    let hi = face_flux(j + 1, i, d);
                    out_row[i * nd + d] = at(i, j, d) - ratio * (hi - lo);
                    if !periodic {
                        if j == 0 {
                            net -= lo;
                        }
                        if j == ny - 1 {
                            net += hi;
                        }
                    }
                }
            }
            net * t.tau * g.dx
        })
        .collect();
    row_out.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn setup(nx: usize, ny: usize, policy: BoundaryPolicy) -> (Grid, FaceApertures) {
        let grid = Grid::new(&Rect::new(0.0, 0.0, nx as f64 * 0.1, ny as f64 * 0.1), 0.1, 0.1).unwrap();
        let faces = open_faces(&grid, &policy);
        (grid, faces)
    }

    fn open_faces(grid: &Grid, policy: &BoundaryPolicy) -> FaceApertures {
        let (nx, ny) = (grid.nx, grid.ny);
        let mut x = vec![1.0; (nx + 1) * ny];
        let mut y = vec![1.0; nx * (ny + 1)];
        for j in 0..ny {
            if policy.left == EdgeKind::Wall {
                x[j * (nx + 1)] = 0.0;
            }
            if policy.right == EdgeKind::Wall {
                x[j * (nx + 1) + nx] = 0.0;
            }
        }
        for i in 0..nx {
            if policy.bottom == EdgeKind::Wall {
                y[i] = 0.0;
            }
            if policy.top == EdgeKind::Wall {
                y[ny * nx + i] = 0.0;
            }
        }
        FaceApertures { x, y }
    }

    fn all(kind: EdgeKind) -> BoundaryPolicy {
        BoundaryPolicy { left: kind, right: kind, bottom: kind, top: kind }
    }

    fn dirs() -> DirectionSet {
        DirectionSet::new(8).unwrap()
    }

    #[test]
    fn zero_speed_is_averaging_at_unit_ratio() {
        let policy = all(EdgeKind::Periodic);
        let (grid, faces) = setup(6, 1, policy);
        let d = dirs();
        let speed = vec![0.0; grid.cells()];
        let t = Transport { grid: &grid, faces: &faces, policy: &policy, dirs: &d, speed: &speed, tau: 0.1 };
        let mut f = DistributionField::zeros(&grid, 8);
        let vals = [0.1, 0.5, 0.2, 0.0, 0.3, 0.4];
        for (c, v) in vals.iter().enumerate() {
            f.set(c, 0, *v);
        }
        let mut out = f.clone();
        advect_x(&t, &f, &mut out);
        for p in 0..6 {
            let expected = 0.5 * (vals[(p + 5) % 6] + vals[(p + 1) % 6]);
            assert!((out.get(p, 0) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_speed_is_averaging_at_any_ratio() {
        // Expanding the two fluxes with a = 0: the diffusive coefficient
        // h / (2 tau) cancels the tau / h factor, leaving a pure average.
        let policy = all(EdgeKind::Periodic);
        let (grid, faces) = setup(5, 1, policy);
        let d = dirs();
        let speed = vec![0.0; grid.cells()];
        let t = Transport { grid: &grid, faces: &faces, policy: &policy, dirs: &d, speed: &speed, tau: 0.04 };
        let mut f = DistributionField::zeros(&grid, 8);
        let vals = [0.3, 0.1, 0.7, 0.2, 0.0];
        for (c, v) in vals.iter().enumerate() {
            f.set(c, 2, *v);
        }
        let mut out = f.clone();
        advect_x(&t, &f, &mut out);
        for p in 0..5 {
            let expected = 0.5 * (vals[(p + 4) % 5] + vals[(p + 1) % 5]);
            assert!((out.get(p, 2) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_state_is_stationary_when_periodic() {
        let policy = all(EdgeKind::Periodic);
        let (grid, faces) = setup(7, 5, policy);
        let d = dirs();
        let speed = vec![0.6; grid.cells()];
        let t = Transport { grid: &grid, faces: &faces, policy: &policy, dirs: &d, speed: &speed, tau: 0.08 };
        let mut f = DistributionField::zeros(&grid, 8);
        f.as_mut_slice().iter_mut().enumerate().for_each(|(k, v)| *v = 0.01 * (k % 8) as f64);
        let mut out = f.clone();
        advect_x(&t, &f, &mut out);
        let mut out2 = f.clone();
        advect_y(&t, &out, &mut out2);
        for (a, b) in f.as_slice().iter().zip(out2.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn walls_conserve_mass_and_outflow_accounts_for_loss() {
        let d = dirs();
        for kind in [EdgeKind::Wall, EdgeKind::Outflow] {
            let policy = all(kind);
            let (grid, faces) = setup(9, 6, policy);
            let speed: Vec<f64> = (0..grid.cells()).map(|c| 0.3 + 0.07 * (c % 5) as f64).collect();
            let t = Transport { grid: &grid, faces: &faces, policy: &policy, dirs: &d, speed: &speed, tau: 0.1 };
            let mut f = DistributionField::zeros(&grid, 8);
            f.as_mut_slice().iter_mut().enumerate().for_each(|(k, v)| *v = 0.002 * ((k * 7) % 13) as f64);
            let m0 = f.total_mass(&grid);
            let mut a = f.clone();
            let out_x = advect_x(&t, &f, &mut a);
            let mut b = a.clone();
            let out_y = advect_y(&t, &a, &mut b);
            let m1 = b.total_mass(&grid);
            assert!((m0 - m1 - out_x - out_y).abs() < 1e-14, "{kind:?}");
            if kind == EdgeKind::Wall {
                assert_eq!(out_x + out_y, 0.0);
            } else {
                assert!(out_x > 0.0 && out_y > 0.0);
            }
            assert!(b.min_value() >= 0.0);
        }
    }

    #[test]
    fn bump_moves_upward() {
        let policy = all(EdgeKind::Periodic);
        let (grid, faces) = setup(3, 60, policy);
        let d = dirs();
        let speed = vec![0.8; grid.cells()];
        let tau = 0.05;
        let t = Transport { grid: &grid, faces: &faces, policy: &policy, dirs: &d, speed: &speed, tau };
        let dir = 2; // theta = pi / 2
        let mut f = DistributionField::zeros(&grid, 8);
        for j in 0..grid.ny {
            let y = grid.center(0, j).y;
            for i in 0..grid.nx {
                f.set(grid.index(i, j), dir, (-(y - 2.0f64).powi(2) / 0.2).exp());
            }
        }
        let com = |f: &DistributionField| {
            let (mut m, mut my) = (0.0, 0.0);
            for j in 0..grid.ny {
                let r = f.get(grid.index(0, j), dir);
                m += r;
                my += r * grid.center(0, j).y;
            }
            my / m
        };
        let y0 = com(&f);
        let steps = 10;
        let mut cur = f;
        for _ in 0..steps {
            let mut next = cur.clone();
            advect_y(&t, &cur, &mut next);
            cur = next;
        }
        let shift = com(&cur) - y0;
        let expected = 0.8 * tau * steps as f64;
        assert!((shift - expected).abs() < 0.2 * expected, "{shift} vs {expected}");
    }
}
