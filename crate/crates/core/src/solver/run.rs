use super::{DistributionField, Simulation};
use crate::error::Result;
use crate::metrics::{
    evacuation_time, lane_order_parameter, person_count, voronoi_density_flow, MetricSeries, EVACUATED_BELOW,
};
use crate::scenario::Experiment;

/// Full state at one output time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t_s: f64,
    pub field: DistributionField,
    /// Dimensionless speed per cell.
    pub speed: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trace {
    /// `in_room`, `total`, then per measurement region `density_<label>` and
    /// `flow_<label>`, then `lane_order` when an edge is periodic.
    pub series: Vec<MetricSeries>,
    pub snapshots: Vec<Snapshot>,
    /// Seconds until fewer than half a person remains in the room.
    pub evacuation_time: Option<f64>,
    pub steps: usize,
}

impl Trace {
    pub fn series(&self, label: &str) -> Option<&MetricSeries> {
        self.series.iter().find(|s| s.label == label)
    }
}

/// Runs an experiment to its horizon, or until the room is empty when the
/// experiment asks for it, collecting snapshots at the configured cadence.
pub fn run(exp: &Experiment) -> Result<Trace> {
    run_observed(exp, true, |_, _| Ok(()))
}

/// Like [`run`], calling `observe(sim, t_seconds)` after the initial state
/// and after every outer step. Snapshot collection can be switched off.
pub fn run_observed<F>(exp: &Experiment, snapshots: bool, mut observe: F) -> Result<Trace>
where
    F: FnMut(&Simulation, f64) -> Result<()>,
{
    let mut sim = Simulation::new(exp.domain.clone(), exp.solver.clone(), exp.initial.clone())?;
    let grid = exp.solver.grid;
    let room_cells = grid.cells_in(&exp.domain.room);
    let all_cells: Vec<usize> = (0..grid.cells()).collect();
    let regions: Vec<Vec<usize>> = exp.measurements.iter().map(|m| grid.cells_in(&m.region)).collect();
    let lanes = exp.solver.boundaries.any_periodic();

    let mut series = vec![MetricSeries::new("in_room", "persons"), MetricSeries::new("total", "persons")];
    for m in &exp.measurements {
        series.push(MetricSeries::new(format!("density_{}", m.label), "persons/m^2"));
        series.push(MetricSeries::new(format!("flow_{}", m.label), "persons/s"));
    }
    if lanes {
        series.push(MetricSeries::new("lane_order", "1"));
    }

    let mut shots = Vec::new();
    let mut next_shot = 0.0;
    let cadence = exp.cadence_s;
    let steps = exp.solver.stepping.steps();
    let mut done = 0;

    loop {
        // Step count times the dimensional step, so output times are exact.
        let t = done as f64 * exp.dt_s;
        let f = sim.field();
        let speed = sim.speed_field()?;
        let in_room = person_count(f, &grid, &room_cells, &exp.refs);
        let mut values = vec![in_room, person_count(f, &grid, &all_cells, &exp.refs)];
        for (m, cells) in exp.measurements.iter().zip(&regions) {
            let v = voronoi_density_flow(f, &speed, cells, &exp.refs, m.exit_width_m);
            values.push(v.density);
            values.push(v.flow);
        }
        if lanes {
            values.push(lane_order_parameter(f, &grid, &exp.solver.dirs));
        }
        for (s, v) in series.iter_mut().zip(values) {
            s.push(t, v)?;
        }
        if snapshots && t >= next_shot - 1e-9 {
            shots.push(Snapshot { t_s: t, field: f.clone(), speed });
            while next_shot <= t + 1e-9 {
                next_shot += cadence;
            }
        }
        observe(&sim, t)?;
        if done >= steps || (exp.stop_when_evacuated && in_room < EVACUATED_BELOW) {
            break;
        }
        sim.lie_step()?;
        done += 1;
    }

    let evacuation_time = evacuation_time(&series[0]);
    Ok(Trace { series, snapshots: shots, evacuation_time, steps: done })
}
