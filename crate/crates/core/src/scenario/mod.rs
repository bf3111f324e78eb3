//! Complete experiments: configuration documents, validation, conversion to
//! dimensionless form and the built-in scenarios.

mod builtin;
mod config;
mod initial;

pub use builtin::{builtin, builtin_names};
pub use config::{
    BoundarySpec, ClusterSpec, DomainSection, ExitSpec, MeasurementSpec, ModelSection, NumericsSection, ObstacleSpec,
    OutputSection, ProfileSpec, ReferenceQuantities, ScenarioConfig, ScenarioMeta, ShapeSpec, WallSpec,
};
pub use initial::build_initial_field;

use crate::error::{CrowdError, Result};
use crate::geometry::{DomainSpec, Obstacle, Rect, Segment, Side, Vec2, GEOM_EPS};
use crate::kinetics::{DirectionSet, ModelParams};
use crate::metrics::MeasurementRegion;
use crate::solver::{BoundaryPolicy, DistributionField, Grid, SolverConfig, TimeStepping};

/// A validated experiment in dimensionless units, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub refs: ReferenceQuantities,
    pub domain: DomainSpec,
    pub solver: SolverConfig,
    pub initial: DistributionField,
    pub measurements: Vec<MeasurementRegion>,
    pub cadence_s: f64,
    /// Outer step in seconds, as configured.
    pub dt_s: f64,
    pub stop_when_evacuated: bool,
}

impl Experiment {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let refs = cfg.references;
        refs.validate()?;
        let d = refs.length_m;
        let t_ref = refs.time_s();
        let dirs = DirectionSet::new(cfg.model.directions)?;
        let params =
            ModelParams { alpha: cfg.model.alpha, epsilon: cfg.model.epsilon, velocity_law: cfg.model.velocity_law };
        params.validate()?;

        let domain = build_domain(&cfg.domain, d)?;
        let n = &cfg.numerics;
        for (v, field) in [(n.dx_m, "numerics.dx_m"), (n.dy_m, "numerics.dy_m")] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CrowdError::config(field, "must be positive"));
            }
        }
        let grid = Grid::new(&domain.bounding_box, n.dx_m / d, n.dy_m / d)?;
        let stepping = TimeStepping { dt: n.dt_s / t_ref, substeps: n.substeps, t_end: n.t_end_s / t_ref };
        let b = &cfg.domain.boundaries;
        let boundaries = BoundaryPolicy { left: b.left, right: b.right, bottom: b.bottom, top: b.top };
        let solver = SolverConfig {
            grid,
            stepping,
            boundaries,
            dirs,
            params,
            interaction_rate: cfg.references.interaction_rate(),
        };
        solver.validate()?;

        if !(cfg.output.cadence_s > 0.0 && cfg.output.cadence_s.is_finite()) {
            return Err(CrowdError::config("output.cadence_s", "must be positive"));
        }

        let measurements = cfg
            .measurements
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let field = format!("measurements.{k}");
                if !m.region.is_valid() || !m.region.within(&cfg.domain.room, GEOM_EPS * d) {
                    return Err(CrowdError::config(field, "region must be a rectangle inside the room"));
                }
                if !(m.exit_width_m > 0.0) {
                    return Err(CrowdError::config(field, "exit width must be positive"));
                }
                let region = scale_rect(&m.region, d);
                if grid.cells_in(&region).len() < 4 {
                    return Err(CrowdError::config(field, "region covers fewer than 4 cells"));
                }
                Ok(MeasurementRegion { label: m.label.clone(), region, exit_width_m: m.exit_width_m })
            })
            .collect::<Result<Vec<_>>>()?;

        let initial = build_initial_field(cfg, &grid, &dirs)?;
        Ok(Experiment {
            name: cfg.scenario.name.clone(),
            refs,
            domain,
            solver,
            initial,
            measurements,
            cadence_s: cfg.output.cadence_s,
            dt_s: n.dt_s,
            stop_when_evacuated: n.stop_when_evacuated,
        })
    }

    /// Converts a dimensionless time to seconds.
    pub fn seconds(&self, t: f64) -> f64 {
        t * self.refs.time_s()
    }
}

/// Parses and fully validates a scenario document.
pub fn load_and_validate(text: &str) -> Result<ScenarioConfig> {
    let cfg = ScenarioConfig::parse(text)?;
    Experiment::from_config(&cfg)?;
    Ok(cfg)
}

pub(crate) fn scale_rect(r: &Rect, d: f64) -> Rect {
    Rect::new(r.x_min / d, r.y_min / d, r.x_max / d, r.y_max / d)
}

fn build_domain(s: &DomainSection, d: f64) -> Result<DomainSpec> {
    if !s.bounding_box.is_valid() {
        return Err(CrowdError::config("domain.bounding_box", "degenerate rectangle"));
    }
    if !s.room.is_valid() || !s.room.within(&s.bounding_box, GEOM_EPS * d) {
        return Err(CrowdError::config("domain.room", "must be a rectangle inside the bounding box"));
    }
    let room = scale_rect(&s.room, d);
    let exits = s
        .exits
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let field = format!("domain.exits.{k}");
            if !(e.width > 0.0) {
                return Err(CrowdError::config(field, "width must be positive"));
            }
            let (c, lo, hi) = s.room.side(e.side).span();
            let (a, b) = (e.center - e.width / 2.0, e.center + e.width / 2.0);
            if a < lo - GEOM_EPS || b > hi + GEOM_EPS {
                return Err(CrowdError::config(field, "exit extends past the end of its room side"));
            }
            let (a, b, c) = (a / d, b / d, c / d);
            if e.side.is_vertical() {
                Segment::new(Vec2::new(c, a), Vec2::new(c, b))
            } else {
                Segment::new(Vec2::new(a, c), Vec2::new(b, c))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let obstacles = s
        .obstacles
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let fp = scale_rect(&o.footprint, d);
            let built = match &o.effective {
                Some(e) => Obstacle::with_effective_area(fp, scale_rect(e, d), o.alpha),
                None => Obstacle::new(fp, o.alpha),
            };
            built.map_err(|e| CrowdError::config(format!("domain.obstacles.{k}"), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let open: Vec<Side> = s.open_sides.clone();
    let mut domain = DomainSpec::rectangular_room(scale_rect(&s.bounding_box, d), room, exits, obstacles, open)?;
    if !s.walls.is_empty() {
        let extra = s
            .walls
            .iter()
            .map(|w| Segment::new(Vec2::new(w.from[0] / d, w.from[1] / d), Vec2::new(w.to[0] / d, w.to[1] / d)))
            .collect::<Result<Vec<_>>>()?;
        let mut walls = domain.walls.clone();
        walls.extend(extra);
        let exits = domain.exits.iter().map(|e| e.segment).collect();
        domain = DomainSpec::new(
            domain.bounding_box,
            domain.room,
            walls,
            exits,
            domain.obstacles.clone(),
            domain.open_sides.clone(),
        )?;
    }
    Ok(domain)
}
