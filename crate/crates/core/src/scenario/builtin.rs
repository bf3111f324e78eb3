//! Built-in scenarios.
//!
//! Cluster placements, cluster sizes, obstacle positions and measurement
//! areas were estimated from plots rather than given as numbers; they are
//! listed under `scenario.estimated`.
//!
//! A 0.25 m mesh with 0.75 s steps and three sub-steps gives `tau / dx = 2`
//! in dimensionless units for a 2 m/s reference speed. The room scenarios
//! keep that mesh and outer step and use six sub-steps, so the ratio is
//! exactly 1.

use super::config::*;
use crate::error::{CrowdError, Result};
use crate::geometry::{Rect, Side};
use crate::kinetics::VelocityLaw;
use crate::solver::EdgeKind;

const NAMES: &[&str] = &[
    "room-one-exit-46",
    "room-two-exit-138",
    "room-two-exit-40",
    "room-two-exit-18",
    "room-obstacles-none-44",
    "room-obstacle-single-alpha1",
    "room-obstacle-single-alpha0",
    "room-obstacle-pair-alpha1",
    "room-obstacle-pair-alpha0",
    "corridor-lanes-98",
    "corridor-lanes-188",
];

pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    match name {
        "room-one-exit-46" => Ok(one_exit()),
        "room-two-exit-138" => Ok(two_exit_138()),
        "room-two-exit-40" => Ok(two_exit_square(40.0, 3.4)),
        "room-two-exit-18" => Ok(two_exit_square(18.0, 2.3)),
        "room-obstacles-none-44" => Ok(obstacle_room(name, vec![])),
        "room-obstacle-single-alpha1" => Ok(obstacle_room(name, single_obstacle(1.0))),
        "room-obstacle-single-alpha0" => Ok(obstacle_room(name, single_obstacle(0.0))),
        "room-obstacle-pair-alpha1" => Ok(obstacle_room(name, obstacle_pair(1.0))),
        "room-obstacle-pair-alpha0" => Ok(obstacle_room(name, obstacle_pair(0.0))),
        "corridor-lanes-98" => Ok(corridor(98.0)),
        "corridor-lanes-188" => Ok(corridor(188.0)),
        _ => Err(CrowdError::UnknownScenario(name.to_string())),
    }
}

fn room_refs() -> ReferenceQuantities {
    ReferenceQuantities {
        length_m: 10.0 * std::f64::consts::SQRT_2,
        speed_mps: 2.0,
        capacity_per_m2: 7.0,
        interaction_time_s: 1.0,
    }
}

fn room_boundaries() -> BoundarySpec {
    BoundarySpec { left: EdgeKind::Wall, right: EdgeKind::Outflow, bottom: EdgeKind::Outflow, top: EdgeKind::Outflow }
}

fn room_domain(exits: Vec<ExitSpec>, obstacles: Vec<ObstacleSpec>) -> DomainSection {
    DomainSection {
        bounding_box: Rect::new(0.0, 0.0, 14.0, 10.0),
        room: Rect::new(0.0, 0.0, 10.0, 10.0),
        open_sides: vec![],
        exits,
        walls: vec![],
        obstacles,
        boundaries: room_boundaries(),
    }
}

fn exit(center: f64, width: f64, label: &str) -> ExitSpec {
    ExitSpec { side: Side::Right, center, width, label: Some(label.to_string()) }
}

fn model(epsilon: f64) -> ModelSection {
    ModelSection { directions: 8, alpha: 1.0, epsilon, velocity_law: VelocityLaw::Cubic }
}

fn rect(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> ShapeSpec {
    ShapeSpec::Rectangle { x_min, y_min, x_max, y_max }
}

fn cluster(label: &str, direction: usize, persons: f64, shape: ShapeSpec, profile: ProfileSpec) -> ClusterSpec {
    ClusterSpec { label: Some(label.to_string()), direction, persons: Some(persons), shape, profile }
}

fn numerics(dx: f64, dt: f64, substeps: usize, t_end: f64, stop: bool) -> NumericsSection {
    NumericsSection { dx_m: dx, dy_m: dx, dt_s: dt, substeps, t_end_s: t_end, stop_when_evacuated: stop }
}

fn estimated(keys: &[&str]) -> Vec<String> {
    keys.iter().map(|s| s.to_string()).collect()
}

fn one_exit() -> ScenarioConfig {
    // Two equal circles on the left of the room walking toward each other:
    // the upper one down (direction 7), the lower one up (direction 3).
    let profile = ProfileSpec::Constant { value: 0.5 };
    ScenarioConfig {
        scenario: ScenarioMeta {
            name: "room-one-exit-46".into(),
            description: "46 pedestrians in two circular clusters leave a 10 m square room through a 2.6 m door".into(),
            estimated: estimated(&[
                "domain.bounding_box",
                "clusters.0.shape",
                "clusters.1.shape",
                "clusters.0.profile",
                "clusters.1.profile",
            ]),
        },
        references: room_refs(),
        model: model(0.4),
        domain: room_domain(vec![exit(5.0, 2.6, "exit")], vec![]),
        clusters: vec![
            cluster("upper", 7, 23.0, ShapeSpec::Circle { center: [2.5, 7.5], radius: 1.45 }, profile.clone()),
            cluster("lower", 3, 23.0, ShapeSpec::Circle { center: [2.5, 2.5], radius: 1.45 }, profile),
        ],
        numerics: numerics(0.25, 0.75, 6, 40.0, true),
        measurements: vec![],
        output: OutputSection::default(),
    }
}

fn two_exit_domain() -> DomainSection {
    // Exit edges 3 m apart: [2.8, 3.5] and [6.5, 7.6] on the right wall.
    room_domain(vec![exit(3.15, 0.7, "exit-1"), exit(7.05, 1.1, "exit-2")], vec![])
}

fn two_exit_measurements() -> Vec<MeasurementSpec> {
    vec![
        MeasurementSpec { label: "exit-1".into(), region: Rect::new(8.0, 2.15, 10.0, 4.15), exit_width_m: 0.7 },
        MeasurementSpec { label: "exit-2".into(), region: Rect::new(8.0, 6.05, 10.0, 8.05), exit_width_m: 1.1 },
    ]
}

fn two_exit_138() -> ScenarioConfig {
    ScenarioConfig {
        scenario: ScenarioMeta {
            name: "room-two-exit-138".into(),
            description: "138 pedestrians, a constant-density block of 90 and a graded square of 48 behind it, leave through exits of 0.7 m and 1.1 m".into(),
            estimated: estimated(&[
                "domain.exits.0.center",
                "domain.exits.1.center",
                "clusters.0.shape",
                "clusters.1.shape",
                "clusters.1.profile",
                "measurements",
            ]),
        },
        references: room_refs(),
        model: model(0.4),
        domain: two_exit_domain(),
        clusters: vec![
            cluster("block", 1, 90.0, rect(4.0, 2.0, 8.0, 8.0), ProfileSpec::Constant { value: 0.55 }),
            cluster("square", 1, 48.0, rect(1.0, 3.5, 4.0, 6.5), ProfileSpec::Linear { front: 0.5, back: 1.0 }),
        ],
        numerics: numerics(0.25, 0.375, 3, 150.0, true),
        measurements: two_exit_measurements(),
        output: OutputSection::default(),
    }
}

fn two_exit_square(persons: f64, side: f64) -> ScenarioConfig {
    let name = format!("room-two-exit-{persons}");
    let (x0, y0) = (1.0, 5.0 - side / 2.0);
    ScenarioConfig {
        scenario: ScenarioMeta {
            name,
            description: format!("{persons} pedestrians in a graded square at the back of the room leave through exits of 0.7 m and 1.1 m"),
            estimated: estimated(&["domain.exits.0.center", "domain.exits.1.center", "clusters.0.shape", "clusters.0.profile", "measurements"]),
        },
        references: room_refs(),
        model: model(0.4),
        domain: two_exit_domain(),
        clusters: vec![cluster(
            "square",
            1,
            persons,
            rect(x0, y0, x0 + side, y0 + side),
            ProfileSpec::Linear { front: 0.3, back: 0.7 },
        )],
        numerics: numerics(0.25, 0.375, 3, 90.0, true),
        measurements: two_exit_measurements(),
        output: OutputSection::default(),
    }
}

fn single_obstacle(alpha: f64) -> Vec<ObstacleSpec> {
    vec![ObstacleSpec { footprint: Rect::new(6.675, 4.375, 7.625, 5.625), alpha, effective: None }]
}

fn obstacle_pair(alpha: f64) -> Vec<ObstacleSpec> {
    vec![
        ObstacleSpec { footprint: Rect::new(6.675, 1.675, 7.625, 2.925), alpha, effective: None },
        ObstacleSpec { footprint: Rect::new(6.675, 6.875, 7.625, 8.125), alpha, effective: None },
    ]
}

fn obstacle_room(name: &str, obstacles: Vec<ObstacleSpec>) -> ScenarioConfig {
    let mut keys = vec!["clusters.0.shape"];
    if !obstacles.is_empty() {
        keys.push("domain.obstacles");
    }
    ScenarioConfig {
        scenario: ScenarioMeta {
            name: name.into(),
            description:
                "44 pedestrians at constant density walk from the left of the room toward a 2.6 m door past obstacles"
                    .into(),
            estimated: estimated(&keys),
        },
        references: room_refs(),
        model: model(0.4),
        domain: room_domain(vec![exit(5.0, 2.6, "exit")], obstacles),
        clusters: vec![cluster("block", 1, 44.0, rect(0.5, 3.6, 3.3, 6.4), ProfileSpec::Constant { value: 0.8 })],
        numerics: numerics(0.25, 0.75, 6, 60.0, true),
        measurements: vec![],
        output: OutputSection::default(),
    }
}

fn corridor(persons: f64) -> ScenarioConfig {
    // Four equal rectangles: two at the left end walking right (direction 1),
    // two at the right end walking left (direction 5), stacked across the
    // width so every occupied row initially holds both streams.
    let (w, t_end) = if persons < 100.0 { (2.4, 75.0) } else { (4.6, 90.0) };
    let per = persons / 4.0;
    let profile = ProfileSpec::Parabolic { peak: 1.0, edge: 0.6 };
    let left = 0.4;
    let right = 19.6;
    let (lo, hi) = ((0.2, 2.4), (2.6, 4.8));
    let shape = |x0: f64, y: (f64, f64)| rect(x0, y.0, x0 + w, y.1);
    ScenarioConfig {
        scenario: ScenarioMeta {
            name: format!("corridor-lanes-{persons}"),
            description: format!("{persons} pedestrians in four clusters walk in opposite directions along a periodic 20 m x 5 m corridor"),
            estimated: estimated(&["clusters.0.shape", "clusters.1.shape", "clusters.2.shape", "clusters.3.shape", "model.epsilon"]),
        },
        references: ReferenceQuantities {
            length_m: 5.0 * 17f64.sqrt(),
            speed_mps: 2.0,
            capacity_per_m2: 7.0,
            interaction_time_s: 1.0,
        },
        model: model(0.4),
        domain: DomainSection {
            bounding_box: Rect::new(0.0, 0.0, 20.0, 5.0),
            room: Rect::new(0.0, 0.0, 20.0, 5.0),
            open_sides: vec![Side::Left, Side::Right],
            exits: vec![],
            walls: vec![],
            obstacles: vec![],
            boundaries: BoundarySpec {
                left: EdgeKind::Periodic,
                right: EdgeKind::Periodic,
                bottom: EdgeKind::Wall,
                top: EdgeKind::Wall,
            },
        },
        clusters: vec![
            cluster("left-low", 1, per, shape(left, lo), profile.clone()),
            cluster("left-high", 1, per, shape(left, hi), profile.clone()),
            cluster("right-low", 5, per, shape(right - w, lo), profile.clone()),
            cluster("right-high", 5, per, shape(right - w, hi), profile),
        ],
        numerics: numerics(0.2, 0.3, 3, t_end, false),
        measurements: vec![],
        output: OutputSection::default(),
    }
}
