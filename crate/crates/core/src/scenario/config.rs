//! TOML scenario documents in physical units.
//!
//! Lengths are meters, times seconds; cluster densities are fractions of the
//! capacity `references.capacity_per_m2`. Direction indices are 1-based,
//! direction 1 pointing along +x and increasing counterclockwise.

use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};
use crate::geometry::{Rect, Side};
use crate::kinetics::VelocityLaw;
use crate::solver::EdgeKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioMeta,
    pub references: ReferenceQuantities,
    pub model: ModelSection,
    pub domain: DomainSection,
    #[serde(default)]
    pub clusters: Vec<ClusterSpec>,
    pub numerics: NumericsSection,
    #[serde(default)]
    pub measurements: Vec<MeasurementSpec>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Dotted keys whose values were read off figures rather than stated.
    #[serde(default)]
    pub estimated: Vec<String>,
}

/// Scales used to make the model dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceQuantities {
    /// Reference length `D`.
    pub length_m: f64,
    /// Maximal walking speed `V_M`.
    pub speed_mps: f64,
    /// Maximal admissible density `rho_M`.
    pub capacity_per_m2: f64,
    /// Time unit of the interaction rates: one rate unit turns a whole
    /// direction over in this many seconds when nobody is around.
    #[serde(default = "default_interaction_time")]
    pub interaction_time_s: f64,
}

fn default_interaction_time() -> f64 {
    1.0
}

impl ReferenceQuantities {
    /// Reference time `T = D / V_M`.
    pub fn time_s(&self) -> f64 {
        self.length_m / self.speed_mps
    }

    /// Persons represented by a unit of dimensionless mass, `rho_M * D^2`.
    pub fn persons_per_unit_mass(&self) -> f64 {
        self.capacity_per_m2 * self.length_m * self.length_m
    }

    pub fn validate(&self) -> Result<()> {
        let check = |v: f64, field: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CrowdError::config(field, "must be positive"))
            }
        };
        check(self.length_m, "references.length_m")?;
        check(self.speed_mps, "references.speed_mps")?;
        check(self.capacity_per_m2, "references.capacity_per_m2")?;
        check(self.interaction_time_s, "references.interaction_time_s")
    }

    /// Interaction-rate multiplier in dimensionless time, `T / t_int`.
    pub fn interaction_rate(&self) -> f64 {
        self.time_s() / self.interaction_time_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_directions")]
    pub directions: usize,
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(default = "default_law")]
    pub velocity_law: VelocityLaw,
}

fn default_directions() -> usize {
    8
}

fn default_law() -> VelocityLaw {
    VelocityLaw::Cubic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub bounding_box: Rect,
    pub room: Rect,
    /// Room sides left without walls.
    #[serde(default)]
    pub open_sides: Vec<Side>,
    #[serde(default)]
    pub exits: Vec<ExitSpec>,
    /// Extra wall segments besides the room sides.
    #[serde(default)]
    pub walls: Vec<WallSpec>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    pub boundaries: BoundarySpec,
}

/// Door on one room side, given by the coordinate of its center along that
/// side and its width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExitSpec {
    pub side: Side,
    pub center: f64,
    pub width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallSpec {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub footprint: Rect,
    /// Quality inside the effective area.
    pub alpha: f64,
    /// Explicit effective area; defaults to the footprint doubled in both
    /// directions about its center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<Rect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: EdgeKind,
    pub right: EdgeKind,
    pub bottom: EdgeKind,
    pub top: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// 1-based direction index.
    pub direction: usize,
    /// Target head count; the profile is rescaled to match it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persons: Option<f64>,
    pub shape: ShapeSpec,
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle { center: [f64; 2], radius: f64 },
    Rectangle { x_min: f64, y_min: f64, x_max: f64, y_max: f64 },
}

impl ShapeSpec {
    pub fn bounds(&self) -> Rect {
        match *self {
            ShapeSpec::Circle { center, radius } => {
                Rect::new(center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius)
            }
            ShapeSpec::Rectangle { x_min, y_min, x_max, y_max } => Rect::new(x_min, y_min, x_max, y_max),
        }
    }
}

/// Density profile over a cluster, in fractions of capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: f64,
    },
    /// Linear from the leading edge (along the walking direction) to the
    /// trailing edge.
    Linear {
        front: f64,
        back: f64,
    },
    /// `peak` at the center falling to `edge` on the boundary.
    Parabolic {
        peak: f64,
        edge: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub dx_m: f64,
    pub dy_m: f64,
    pub dt_s: f64,
    pub substeps: usize,
    pub t_end_s: f64,
    #[serde(default)]
    pub stop_when_evacuated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    pub label: String,
    pub region: Rect,
    pub exit_width_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_cadence")]
    pub cadence_s: f64,
}

fn default_cadence() -> f64 {
    1.5
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { cadence_s: default_cadence() }
    }
}

impl ScenarioConfig {
    /// Parses a document without semantic validation.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Replaces the value at a dotted path such as `model.epsilon` or
    /// `domain.exits.0.width`. The new value is parsed as the type of the
    /// value it replaces; integers are accepted where floats are expected.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        let mut doc = toml::Value::try_from(self)?;
        let mut slot = &mut doc;
        for part in key.split('.') {
            slot = match slot {
                toml::Value::Table(t) => t.get_mut(part),
                toml::Value::Array(a) => part.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
                _ => None,
            }
            .ok_or_else(|| CrowdError::config(key, "no such configuration key"))?;
        }
        let bad = |what: &str| CrowdError::config(key, format!("`{value}` is not a valid {what}"));
        *slot = match slot {
            toml::Value::Float(_) => toml::Value::Float(value.trim().parse().map_err(|_| bad("number"))?),
            toml::Value::Integer(_) => toml::Value::Integer(value.trim().parse().map_err(|_| bad("integer"))?),
            toml::Value::Boolean(_) => toml::Value::Boolean(value.trim().parse().map_err(|_| bad("boolean"))?),
            toml::Value::String(_) => toml::Value::String(value.to_string()),
            _ => return Err(CrowdError::config(key, "only scalar keys can be overridden")),
        };
        let text = toml::to_string(&doc)?;
        let parsed: ScenarioConfig = toml::from_str(&text).map_err(|e| CrowdError::config(key, e.to_string()))?;
        Ok(parsed)
    }
}
