use rayon::prelude::*;

use super::advection::Transport;
use super::{
    advect_x, advect_y, interaction_step, BoundaryPolicy, DistributionField, FaceApertures, Grid, InteractionTables,
    TimeStepping,
};
use crate::error::{CrowdError, Result};
use crate::geometry::DomainSpec;
use crate::kinetics::{geometric_preferred_direction, speed, DirectionSet, ModelParams};

/// Undershoot below this is an error; anything between it and zero is clamped.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// Everything the solver needs besides geometry and the initial state, in
/// dimensionless units.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub stepping: TimeStepping,
    pub boundaries: BoundaryPolicy,
    pub dirs: DirectionSet,
    pub params: ModelParams,
    /// Multiplier on the interaction rates, the reference time divided by
    /// the time unit in which the rates are expressed.
    pub interaction_rate: f64,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.boundaries.validate()?;
        self.stepping.validate(&self.grid)?;
        if !(self.interaction_rate > 0.0 && self.interaction_rate.is_finite()) {
            return Err(CrowdError::config("references.interaction_time_s", "must be positive"));
        }
        // Forward Euler keeps every f^i non-negative only if no direction can
        // lose more than its whole content in one sub-step.
        let k = self.stepping.tau() * self.interaction_rate;
        if k > 1.0 + 1e-12 {
            return Err(CrowdError::config(
                "numerics.substeps",
                format!("interaction sub-step {k:.3} exceeds one rate time; raise the sub-step count"),
            ));
        }
        Ok(())
    }
}

/// Mass bookkeeping of one outer step, in dimensionless mass units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub mass_before: f64,
    pub mass_after: f64,
    /// Mass that crossed outflow edges of the box during the step.
    pub outflow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    TransportX,
    TransportY,
    Interaction,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::TransportX => "transport-x",
            Phase::TransportY => "transport-y",
            Phase::Interaction => "interaction",
        }
    }
}

pub struct Simulation {
    domain: DomainSpec,
    config: SolverConfig,
    faces: FaceApertures,
    tables: InteractionTables,
    field: DistributionField,
    scratch: DistributionField,
    step: usize,
}

impl Simulation {
    pub fn new(domain: DomainSpec, config: SolverConfig, initial: DistributionField) -> Result<Self> {
        config.validate()?;
        let grid = config.grid;
        let dirs = config.dirs;
        let blank = DistributionField::zeros(&grid, dirs.len());
        if !initial.same_shape(&blank) {
            return Err(CrowdError::config("clusters", "initial field does not match the grid and direction count"));
        }
        let faces = FaceApertures::build(&grid, &domain, &config.boundaries)?;
        let centers: Vec<_> =
            (0..grid.ny).flat_map(|j| (0..grid.nx).map(move |i| (i, j))).map(|(i, j)| grid.center(i, j)).collect();
        let alpha =
            centers.par_iter().map(|&x| domain.quality_at(x, config.params.alpha)).collect::<Result<Vec<f64>>>()?;
        let theta_g = centers
            .par_iter()
            .map(|&x| {
                (0..dirs.len())
                    .map(|h| Ok(geometric_preferred_direction(&domain.query(x, dirs.angle(h))?)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?
            .concat();
        let tables = InteractionTables::new(dirs, config.params.epsilon, alpha, &theta_g);
        let scratch = initial.clone();
        let mut sim = Simulation { domain, config, faces, tables, field: initial, scratch, step: 0 };
        sim.check_state(Phase::Interaction, 0)?;
        Ok(sim)
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.config.grid
    }

    /// Local quality per cell.
    pub fn quality(&self) -> &[f64] {
        self.tables.alpha()
    }

    pub fn faces(&self) -> &FaceApertures {
        &self.faces
    }

    /// Dimensionless time reached so far.
    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.stepping.dt
    }

    /// Number of completed outer steps.
    pub fn steps_done(&self) -> usize {
        self.step
    }

    pub fn total_mass(&self) -> f64 {
        self.field.total_mass(&self.config.grid)
    }

    /// Dimensionless speed in every cell for the current state.
    pub fn speed_field(&self) -> Result<Vec<f64>> {
        self.speed_of(&self.field, 0)
    }

    fn speed_of(&self, f: &DistributionField, substep: usize) -> Result<Vec<f64>> {
        let law = self.config.params.velocity_law;
        let alpha = self.tables.alpha();
        let step = self.step;
        f.as_slice()
            .par_chunks_exact(f.n_dirs())
            .enumerate()
            .map(|(c, cell)| {
                let rho: f64 = cell.iter().sum();
                speed(rho, alpha[c], law).map_err(|_| CrowdError::NumericState {
                    step,
                    substep,
                    phase: "speed",
                    message: format!("density {rho:.12} outside [0, 1] in cell {c}"),
                })
            })
            .collect()
    }

    /// Rejects undershoot beyond tolerance and clamps the rest to zero.
    fn check_state(&mut self, phase: Phase, substep: usize) -> Result<()> {
        let nd = self.field.n_dirs();
        let data = self.field.as_mut_slice();
        if let Some(k) = data.par_iter().position_first(|v| !(*v >= -NEGATIVE_TOL)) {
            return Err(CrowdError::NumericState {
                step: self.step,
                substep,
                phase: phase.name(),
                message: format!("f[{}] = {:e} in cell {} is negative or not finite", k % nd + 1, data[k], k / nd),
            });
        }
        data.par_iter_mut().for_each(|v| {
            if *v < 0.0 {
                *v = 0.0;
            }
        });
        Ok(())
    }

    /// Advances one outer step of length `dt`. A zero step is the identity.
    pub fn lie_step(&mut self) -> Result<StepReport> {
        let mass_before = self.total_mass();
        let stepping = self.config.stepping;
        if stepping.dt == 0.0 {
            return Ok(StepReport { mass_before, mass_after: mass_before, outflow: 0.0 });
        }
        let tau = stepping.tau();
        let mut outflow = 0.0;
        for phase in [Phase::TransportX, Phase::TransportY, Phase::Interaction] {
            for m in 0..stepping.substeps {
                match phase {
                    Phase::TransportX | Phase::TransportY => {
                        let speed = self.speed_of(&self.field, m)?;
                        let t = Transport {
                            grid: &self.config.grid,
                            faces: &self.faces,
                            policy: &self.config.boundaries,
                            dirs: &self.config.dirs,
                            speed: &speed,
                            tau,
                        };
                        outflow += if phase == Phase::TransportX {
                            advect_x(&t, &self.field, &mut self.scratch)
                        } else {
                            advect_y(&t, &self.field, &mut self.scratch)
                        };
                    }
                    Phase::Interaction => {
                        let b = &self.config.boundaries;
                        interaction_step(
                            &self.tables,
                            &self.config.grid,
                            (b.periodic_x(), b.periodic_y()),
                            &self.field,
                            &mut self.scratch,
                            tau * self.config.interaction_rate,
                        );
                    }
                }
                std::mem::swap(&mut self.field, &mut self.scratch);
                self.check_state(phase, m)?;
            }
        }
        self.step += 1;
        Ok(StepReport { mass_before, mass_after: self.total_mass(), outflow })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Rect, Segment, Vec2};
    use crate::kinetics::VelocityLaw;
    use crate::solver::EdgeKind;

    fn room_setup(dt: f64) -> (DomainSpec, SolverConfig) {
        let exit = Segment::new(Vec2::new(1.0, 0.4), Vec2::new(1.0, 0.6)).unwrap();
        let domain = DomainSpec::rectangular_room(
            Rect::new(0.0, 0.0, 1.4, 1.0),
            Rect::new(0.0, 0.0, 1.0, 1.0),
            vec![exit],
            vec![],
            vec![],
        )
        .unwrap();
        let grid = Grid::new(&domain.bounding_box, 0.05, 0.05).unwrap();
        let config = SolverConfig {
            grid,
            stepping: TimeStepping { dt, substeps: 3, t_end: 1.0 },
            boundaries: BoundaryPolicy {
                left: EdgeKind::Outflow,
                right: EdgeKind::Outflow,
                bottom: EdgeKind::Outflow,
                top: EdgeKind::Outflow,
            },
            dirs: DirectionSet::new(8).unwrap(),
            params: ModelParams { alpha: 1.0, epsilon: 0.4, velocity_law: VelocityLaw::Cubic },
            interaction_rate: 5.0,
        };
        (domain, config)
    }

    fn blob(grid: &Grid) -> DistributionField {
        let mut f = DistributionField::zeros(grid, 8);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let x = grid.center(i, j);
                if (x - Vec2::new(0.5, 0.5)).norm() < 0.2 {
                    f.set(grid.index(i, j), 2, 0.6);
                }
            }
        }
        f
    }

    #[test]
    fn zero_dt_is_identity() {
        let (domain, mut config) = room_setup(0.1);
        let f = blob(&config.grid);
        config.stepping.dt = 0.0;
        // A zero step bypasses CFL validation only through the identity path.
        let mut sim = Simulation::new(domain.clone(), room_setup(0.1).1, f.clone()).unwrap();
        sim.config.stepping.dt = 0.0;
        let r = sim.lie_step().unwrap();
        assert_eq!(sim.field(), &f);
        assert_eq!(r.mass_before, r.mass_after);
        assert!(Simulation::new(domain, config, f).is_err());
    }

    #[test]
    fn empty_room_stays_empty() {
        let (domain, config) = room_setup(0.15);
        let f = DistributionField::zeros(&config.grid, 8);
        let mut sim = Simulation::new(domain, config, f.clone()).unwrap();
        sim.lie_step().unwrap();
        assert_eq!(sim.field(), &f);
    }

    #[test]
    fn mass_balance_and_room_count_decrease() {
        let (domain, config) = room_setup(0.15);
        let grid = config.grid;
        let f = blob(&grid);
        let room_cells = grid.cells_in(&domain.room);
        let in_room = |f: &DistributionField| room_cells.iter().map(|&c| f.density_at(c)).sum::<f64>();
        let mut sim = Simulation::new(domain, config, f).unwrap();
        let mut last = in_room(sim.field());
        for _ in 0..20 {
            let r = sim.lie_step().unwrap();
            let now = in_room(sim.field());
            assert!(now <= last + 1e-12);
            last = now;
            let lost = r.mass_before - r.mass_after;
            assert!((lost - r.outflow).abs() <= 1e-10 * r.mass_before.max(1e-300));
            assert!(sim.field().min_value() >= 0.0);
        }
    }

    #[test]
    fn speed_field_rejects_overfull_cells() {
        let (domain, config) = room_setup(0.15);
        let mut f = DistributionField::zeros(&config.grid, 8);
        f.set(5, 0, 1.5);
        let sim = Simulation::new(domain, config, f).unwrap();
        assert!(matches!(sim.speed_field(), Err(CrowdError::NumericState { .. })));
    }

    #[test]
    fn negative_initial_state_rejected() {
        let (domain, config) = room_setup(0.15);
        let mut f = DistributionField::zeros(&config.grid, 8);
        f.set(5, 0, -1e-6);
        assert!(Simulation::new(domain, config, f).is_err());
    }
}
