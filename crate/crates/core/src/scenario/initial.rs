use super::config::{ClusterSpec, ProfileSpec, ScenarioConfig, ShapeSpec};
use crate::error::{CrowdError, Result};
use crate::geometry::Vec2;
use crate::kinetics::DirectionSet;
use crate::solver::{DistributionField, Grid};

/// Slack allowed above full capacity when clusters are superposed.
const CAPACITY_TOL: f64 = 1e-9;

fn contains(shape: &ShapeSpec, p: Vec2) -> bool {
    match *shape {
        ShapeSpec::Circle { center, radius } => (p - Vec2::new(center[0], center[1])).norm() <= radius,
        ShapeSpec::Rectangle { x_min, y_min, x_max, y_max } => {
            (x_min..=x_max).contains(&p.x) && (y_min..=y_max).contains(&p.y)
        }
    }
}

/// Profile value at `p` (meters) for a cluster walking along `heading`.
fn profile_value(c: &ClusterSpec, heading: Vec2, p: Vec2) -> f64 {
    match c.profile {
        ProfileSpec::Constant { value } => value,
        ProfileSpec::Linear { front, back } => {
            let (lo, hi) = match c.shape {
                ShapeSpec::Circle { center, radius } => {
                    let m = Vec2::new(center[0], center[1]).dot(&heading);
                    (m - radius, m + radius)
                }
                ShapeSpec::Rectangle { .. } => {
                    let corners = c.shape.bounds().corners();
                    corners
                        .iter()
                        .map(|q| q.dot(&heading))
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
                }
            };
            let s = if hi > lo { ((hi - p.dot(&heading)) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            front + (back - front) * s
        }
        ProfileSpec::Parabolic { peak, edge } => {
            let bump = match c.shape {
                ShapeSpec::Circle { center, radius } => {
                    let r = (p - Vec2::new(center[0], center[1])).norm() / radius;
                    1.0 - r * r
                }
                ShapeSpec::Rectangle { .. } => {
                    let b = c.shape.bounds();
                    let u = (p.x - b.center().x) / (b.width() / 2.0);
                    let v = (p.y - b.center().y) / (b.height() / 2.0);
                    (1.0 - u * u) * (1.0 - v * v)
                }
            };
            edge + (peak - edge) * bump.clamp(0.0, 1.0)
        }
    }
}

fn check_cluster(k: usize, c: &ClusterSpec, cfg: &ScenarioConfig, n_dirs: usize) -> Result<()> {
    let field = format!("clusters.{k}");
    if c.direction == 0 || c.direction > n_dirs {
        return Err(CrowdError::config(format!("{field}.direction"), format!("must be between 1 and {n_dirs}")));
    }
    match c.shape {
        ShapeSpec::Circle { radius, .. } if !(radius > 0.0) => {
            return Err(CrowdError::config(format!("{field}.shape"), "radius must be positive"));
        }
        ShapeSpec::Rectangle { .. } if !c.shape.bounds().is_valid() => {
            return Err(CrowdError::config(format!("{field}.shape"), "degenerate rectangle"));
        }
        _ => {}
    }
    if !c.shape.bounds().within(&cfg.domain.room, 1e-9) {
        return Err(CrowdError::config(format!("{field}.shape"), "cluster leaves the room"));
    }
    let values: Vec<f64> = match c.profile {
        ProfileSpec::Constant { value } => vec![value],
        ProfileSpec::Linear { front, back } => vec![front, back],
        ProfileSpec::Parabolic { peak, edge } => vec![peak, edge],
    };
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(CrowdError::config(format!("{field}.profile"), "densities must lie in [0, 1]"));
    }
    if let Some(p) = c.persons {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(CrowdError::config(format!("{field}.persons"), "must be non-negative"));
        }
    }
    Ok(())
}

/// Lays out every cluster on the grid, all mass on the cluster's direction,
/// rescaling profiles to their target head counts. Overlapping clusters add
/// up; exceeding full capacity anywhere is an error.
pub fn build_initial_field(cfg: &ScenarioConfig, grid: &Grid, dirs: &DirectionSet) -> Result<DistributionField> {
    let d = cfg.references.length_m;
    let cell_persons = cfg.references.capacity_per_m2 * cfg.numerics.dx_m * cfg.numerics.dy_m;
    let mut field = DistributionField::zeros(grid, dirs.len());
    for (k, c) in cfg.clusters.iter().enumerate() {
        check_cluster(k, c, cfg, dirs.len())?;
        let dir = c.direction - 1;
        let (hx, hy) = dirs.unit(dir);
        let heading = Vec2::new(hx, hy);
        let mut cells = Vec::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = grid.center(i, j) * d;
                if contains(&c.shape, p) {
                    cells.push((grid.index(i, j), profile_value(c, heading, p).max(0.0)));
                }
            }
        }
        if cells.is_empty() {
            return Err(CrowdError::config(format!("clusters.{k}.shape"), "covers no cell centers"));
        }
        let natural: f64 = cells.iter().map(|(_, v)| v).sum::<f64>() * cell_persons;
        let scale = match c.persons {
            Some(p) if natural > 0.0 => p / natural,
            Some(p) if p > 0.0 => {
                return Err(CrowdError::config(format!("clusters.{k}.profile"), "profile is zero everywhere"));
            }
            _ => 1.0,
        };
        for (cell, v) in cells {
            let cur = field.get(cell, dir);
            field.set(cell, dir, cur + v * scale);
        }
    }
    if let Some((c, rho)) = field.density().into_iter().enumerate().find(|(_, r)| *r > 1.0 + CAPACITY_TOL) {
        return Err(CrowdError::config(
            "clusters",
            format!("superposed density {rho:.6} exceeds capacity in cell {c}"),
        ));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::super::{builtin, builtin_names, Experiment};
    use crate::metrics::persons_in;

    #[test]
    fn builtin_head_counts_match() {
        for name in builtin_names() {
            let cfg = builtin(name).unwrap();
            let exp = Experiment::from_config(&cfg).unwrap();
            let expected: f64 = cfg.clusters.iter().filter_map(|c| c.persons).sum();
            let got = persons_in(&exp.initial, &exp.solver.grid, &exp.domain.room, &exp.refs);
            assert!((got - expected).abs() < 0.5, "{name}: {got} vs {expected}");
        }
    }

    #[test]
    fn empty_cluster_list_gives_zero_field() {
        let mut cfg = builtin("room-one-exit-46").unwrap();
        cfg.clusters.clear();
        let exp = Experiment::from_config(&cfg).unwrap();
        assert!(exp.initial.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn overfull_superposition_rejected() {
        let mut cfg = builtin("room-one-exit-46").unwrap();
        let c = cfg.clusters[0].clone();
        cfg.clusters.push(c.clone());
        cfg.clusters.push(c);
        for c in &mut cfg.clusters {
            c.persons = Some(60.0);
        }
        assert!(Experiment::from_config(&cfg).is_err());
    }

    #[test]
    fn linear_profile_increases_toward_back() {
        let cfg = builtin("room-two-exit-40").unwrap();
        let exp = Experiment::from_config(&cfg).unwrap();
        let g = exp.solver.grid;
        let f = &exp.initial;
        // Walking along +x, so the back is on the left: density decreases with x.
        let j = g.ny / 2;
        let row: Vec<f64> = (0..g.nx).map(|i| f.density_at(g.index(i, j))).filter(|&r| r > 0.0).collect();
        assert!(row.len() > 2);
        assert!(row.windows(2).all(|w| w[0] >= w[1]));
        assert!(row[0] > row[row.len() - 1]);
    }
}
