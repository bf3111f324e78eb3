//! Walkable domain: walls, exits and obstacles with their effective areas.
//!
//! All coordinates are dimensionless (already divided by the reference
//! length), so exit and wall distances fall in `[0, 1]` for any point of a
//! room whose largest extent is the reference length. Walls and exits are
//! axis-aligned segments.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};

pub type Vec2 = Vector2<f64>;

/// Tolerance for coordinate comparisons in dimensionless units.
pub const GEOM_EPS: f64 = 1e-9;
/// Minimum ray parameter counted as a hit.
const RAY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Rect { x_min, y_min, x_max, y_max }
    }

    pub fn from_center(center: Vec2, width: f64, height: f64) -> Self {
        Rect::new(center.x - width / 2.0, center.y - height / 2.0, center.x + width / 2.0, center.y + height / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn is_valid(&self) -> bool {
        self.x_min.is_finite()
            && self.y_min.is_finite()
            && self.x_max.is_finite()
            && self.y_max.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }

    /// Closed containment.
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Closed containment with a tolerance band of `eps` around the rectangle.
    pub fn contains_eps(&self, p: Vec2, eps: f64) -> bool {
        p.x >= self.x_min - eps && p.x <= self.x_max + eps && p.y >= self.y_min - eps && p.y <= self.y_max + eps
    }

    /// `self` lies strictly inside `other`.
    pub fn strictly_inside(&self, other: &Rect) -> bool {
        self.x_min > other.x_min && self.x_max < other.x_max && self.y_min > other.y_min && self.y_max < other.y_max
    }

    pub fn within(&self, other: &Rect, eps: f64) -> bool {
        self.x_min >= other.x_min - eps
            && self.x_max <= other.x_max + eps
            && self.y_min >= other.y_min - eps
            && self.y_max <= other.y_max + eps
    }

    pub fn scaled(&self, factor: f64) -> Rect {
        Rect::from_center(self.center(), self.width() * factor, self.height() * factor)
    }

    /// Corners in counterclockwise order starting at the lower-left one.
    pub fn corners(&self) -> [Vec2; 4] {
        [
            Vec2::new(self.x_min, self.y_min),
            Vec2::new(self.x_max, self.y_min),
            Vec2::new(self.x_max, self.y_max),
            Vec2::new(self.x_min, self.y_max),
        ]
    }

    pub fn edges(&self) -> [Segment; 4] {
        let c = self.corners();
        [
            Segment { a: c[0], b: c[1] },
            Segment { a: c[1], b: c[2] },
            Segment { a: c[2], b: c[3] },
            Segment { a: c[3], b: c[0] },
        ]
    }

    pub fn side(&self, side: Side) -> Segment {
        let c = self.corners();
        match side {
            Side::Bottom => Segment { a: c[0], b: c[1] },
            Side::Right => Segment { a: c[1], b: c[2] },
            Side::Top => Segment { a: c[3], b: c[2] },
            Side::Left => Segment { a: c[0], b: c[3] },
        }
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        let dx = (self.x_min - p.x).max(0.0).max(p.x - self.x_max);
        let dy = (self.y_min - p.y).max(0.0).max(p.y - self.y_max);
        dx.hypot(dy)
    }

    /// Whether the segment `p -> q` passes through the open interior.
    pub fn segment_crosses_interior(&self, p: Vec2, q: Vec2) -> bool {
        // Liang-Barsky clipping against the open rectangle.
        let d = q - p;
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        let checks =
            [(-d.x, p.x - self.x_min), (d.x, self.x_max - p.x), (-d.y, p.y - self.y_min), (d.y, self.y_max - p.y)];
        for (den, num) in checks {
            if den.abs() < 1e-15 {
                if num <= RAY_EPS {
                    return false;
                }
                continue;
            }
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        t1 - t0 > RAY_EPS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal of a rectangle side.
    pub fn outward_normal(self) -> Vec2 {
        match self {
            Side::Left => Vec2::new(-1.0, 0.0),
            Side::Right => Vec2::new(1.0, 0.0),
            Side::Bottom => Vec2::new(0.0, -1.0),
            Side::Top => Vec2::new(0.0, 1.0),
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Left | Side::Right)
    }
}

/// Axis-aligned line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Result<Self> {
        let d = b - a;
        if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
            return Err(CrowdError::Geometry("segment has non-finite endpoint".into()));
        }
        if d.norm() <= GEOM_EPS {
            return Err(CrowdError::Geometry(format!("degenerate segment at ({}, {})", a.x, a.y)));
        }
        if d.x.abs() > GEOM_EPS && d.y.abs() > GEOM_EPS {
            return Err(CrowdError::Geometry(format!(
                "segment ({}, {}) -> ({}, {}) is not axis-aligned",
                a.x, a.y, b.x, b.y
            )));
        }
        // Normalize so that `a` has the smaller varying coordinate.
        let (a, b) =
            if (d.x.abs() > GEOM_EPS && d.x < 0.0) || (d.y.abs() > GEOM_EPS && d.y < 0.0) { (b, a) } else { (a, b) };
        Ok(Segment { a, b })
    }

    pub fn is_vertical(&self) -> bool {
        (self.b.x - self.a.x).abs() <= GEOM_EPS
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn tangent(&self) -> Vec2 {
        (self.b - self.a) / self.length()
    }

    pub fn midpoint(&self) -> Vec2 {
        0.5 * (self.a + self.b)
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let d = self.b - self.a;
        let t = ((p - self.a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        self.a + t * d
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        (p - self.closest_point(p)).norm()
    }

    /// `(line coordinate, lo, hi)`: the fixed coordinate and the span along the segment.
    pub fn span(&self) -> (f64, f64, f64) {
        if self.is_vertical() {
            (self.a.x, self.a.y.min(self.b.y), self.a.y.max(self.b.y))
        } else {
            (self.a.y, self.a.x.min(self.b.x), self.a.x.max(self.b.x))
        }
    }

    /// Length of the collinear overlap with another segment (0 if not collinear).
    pub fn overlap_length(&self, other: &Segment) -> f64 {
        if self.is_vertical() != other.is_vertical() {
            return 0.0;
        }
        let (c1, lo1, hi1) = self.span();
        let (c2, lo2, hi2) = other.span();
        if (c1 - c2).abs() > GEOM_EPS {
            return 0.0;
        }
        (hi1.min(hi2) - lo1.max(lo2)).max(0.0)
    }

    /// Ray parameter of the intersection of `origin + t * dir` with this segment.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let (c, lo, hi) = self.span();
        let (o_fixed, d_fixed, o_free, d_free) =
            if self.is_vertical() { (origin.x, dir.x, origin.y, dir.y) } else { (origin.y, dir.y, origin.x, dir.x) };
        if d_fixed.abs() < 1e-15 {
            return None;
        }
        let t = (c - o_fixed) / d_fixed;
        if t <= RAY_EPS {
            return None;
        }
        let s = o_free + t * d_free;
        (s >= lo - RAY_EPS && s <= hi + RAY_EPS).then_some(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exit {
    pub segment: Segment,
    /// The room side the exit sits on.
    pub side: Side,
}

impl Exit {
    pub fn outward_normal(&self) -> Vec2 {
        self.side.outward_normal()
    }

    pub fn width(&self) -> f64 {
        self.segment.length()
    }
}

/// An obstacle: its real footprint plus the enlarged effective area used for
/// steering and for the local environment quality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub footprint: Rect,
    pub effective_area: Rect,
    pub alpha_eff: f64,
}

impl Obstacle {
    /// Linear scale factor between footprint and effective area (area ratio 4).
    pub const EFFECTIVE_SCALE: f64 = 2.0;

    /// Obstacle whose effective area is the concentric footprint scaled by two.
    pub fn new(footprint: Rect, alpha_eff: f64) -> Result<Self> {
        Obstacle::with_effective_area(footprint, footprint.scaled(Self::EFFECTIVE_SCALE), alpha_eff)
    }

    pub fn with_effective_area(footprint: Rect, effective_area: Rect, alpha_eff: f64) -> Result<Self> {
        if !footprint.is_valid() || !effective_area.is_valid() {
            return Err(CrowdError::Geometry("obstacle rectangle is degenerate".into()));
        }
        if !(0.0..=1.0).contains(&alpha_eff) {
            return Err(CrowdError::Geometry(format!("obstacle alpha {alpha_eff} outside [0, 1]")));
        }
        if !footprint.strictly_inside(&effective_area) {
            return Err(CrowdError::Geometry("obstacle footprint must lie strictly inside its effective area".into()));
        }
        let ratio = effective_area.area() / footprint.area();
        if (ratio - 4.0).abs() > 1e-9 * 4.0 {
            return Err(CrowdError::Geometry(format!(
                "effective area must be four times the footprint area (ratio {ratio})"
            )));
        }
        let scale = effective_area.center().norm().max(footprint.center().norm()).max(1.0);
        if (effective_area.center() - footprint.center()).norm() > GEOM_EPS * scale {
            return Err(CrowdError::Geometry("effective area must be concentric with the footprint".into()));
        }
        Ok(Obstacle { footprint, effective_area, alpha_eff })
    }
}

/// Distance and unit direction to the exit as seen from a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitQuery {
    /// Dimensionless distance to the nearest exit point, clamped to `[0, 1]`.
    pub distance: f64,
    pub direction: Vec2,
    pub exit_point: Vec2,
    pub exit_index: usize,
    /// Set when the direction was redirected around an obstacle.
    pub detour_corner: Option<Vec2>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallHit {
    pub distance: f64,
    pub tangent: Vec2,
    /// `None` when the ray leaves through an exit or hits nothing.
    pub point: Option<Vec2>,
}

/// Everything the geometric table of games needs at one position and heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricQuery {
    pub d_e: f64,
    pub u_e: Vec2,
    pub d_w: f64,
    pub u_w: Vec2,
    pub x_w: Option<Vec2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub bounding_box: Rect,
    pub room: Rect,
    pub walls: Vec<Segment>,
    pub exits: Vec<Exit>,
    pub obstacles: Vec<Obstacle>,
    /// Room sides deliberately left without walls (periodic corridor ends).
    pub open_sides: Vec<Side>,
}

impl DomainSpec {
    /// Validates and assembles a domain from explicit wall and exit segments.
    pub fn new(
        bounding_box: Rect,
        room: Rect,
        walls: Vec<Segment>,
        exits: Vec<Segment>,
        obstacles: Vec<Obstacle>,
        open_sides: Vec<Side>,
    ) -> Result<Self> {
        if !bounding_box.is_valid() {
            return Err(CrowdError::Geometry("bounding box is degenerate".into()));
        }
        if !room.is_valid() || !room.within(&bounding_box, GEOM_EPS) {
            return Err(CrowdError::Geometry(
                "room region must be a non-degenerate rectangle inside the bounding box".into(),
            ));
        }
        for s in walls.iter().chain(exits.iter()) {
            if !bounding_box.contains_eps(s.a, GEOM_EPS) || !bounding_box.contains_eps(s.b, GEOM_EPS) {
                return Err(CrowdError::Geometry(format!(
                    "segment ({}, {}) -> ({}, {}) leaves the bounding box",
                    s.a.x, s.a.y, s.b.x, s.b.y
                )));
            }
        }
        for (i, e) in exits.iter().enumerate() {
            for w in &walls {
                if e.overlap_length(w) > GEOM_EPS {
                    return Err(CrowdError::Geometry(format!("exit {i} overlaps a wall")));
                }
            }
            for (j, other) in exits.iter().enumerate().skip(i + 1) {
                if e.overlap_length(other) > GEOM_EPS {
                    return Err(CrowdError::Geometry(format!("exits {i} and {j} overlap")));
                }
            }
        }
        let exits = exits
            .into_iter()
            .enumerate()
            .map(|(i, segment)| {
                Side::ALL
                    .into_iter()
                    .find(|&side| (segment.overlap_length(&room.side(side)) - segment.length()).abs() <= GEOM_EPS)
                    .map(|side| Exit { segment, side })
                    .ok_or_else(|| CrowdError::Geometry(format!("exit {i} does not lie on the room boundary")))
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, o) in obstacles.iter().enumerate() {
            if !o.effective_area.within(&bounding_box, GEOM_EPS) {
                return Err(CrowdError::Geometry(format!("obstacle {i} effective area leaves the bounding box")));
            }
        }
        let domain = DomainSpec { bounding_box, room, walls, exits, obstacles, open_sides };
        domain.check_boundary_cover()?;
        Ok(domain)
    }

    /// Rectangular room whose walls are the room sides minus the exits and
    /// minus the open sides.
    pub fn rectangular_room(
        bounding_box: Rect,
        room: Rect,
        exits: Vec<Segment>,
        obstacles: Vec<Obstacle>,
        open_sides: Vec<Side>,
    ) -> Result<Self> {
        let mut walls = Vec::new();
        for side in Side::ALL {
            if open_sides.contains(&side) {
                continue;
            }
            let edge = room.side(side);
            let (c, lo, hi) = edge.span();
            let mut gaps: Vec<(f64, f64)> = exits
                .iter()
                .filter(|e| e.overlap_length(&edge) > GEOM_EPS)
                .map(|e| {
                    let (_, a, b) = e.span();
                    (a, b)
                })
                .collect();
            gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cursor = lo;
            let mut push = |from: f64, to: f64| -> Result<()> {
                if to - from > GEOM_EPS {
                    let seg = if side.is_vertical() {
                        Segment::new(Vec2::new(c, from), Vec2::new(c, to))?
                    } else {
                        Segment::new(Vec2::new(from, c), Vec2::new(to, c))?
                    };
                    walls.push(seg);
                }
                Ok(())
            };
            for (a, b) in gaps {
                push(cursor, a)?;
                cursor = cursor.max(b);
            }
            push(cursor, hi)?;
        }
        DomainSpec::new(bounding_box, room, walls, exits, obstacles, open_sides)
    }

    fn check_boundary_cover(&self) -> Result<()> {
        for side in Side::ALL {
            if self.open_sides.contains(&side) {
                continue;
            }
            let edge = self.room.side(side);
            let (_, lo, hi) = edge.span();
            let mut spans: Vec<(f64, f64)> = self
                .walls
                .iter()
                .chain(self.exits.iter().map(|e| &e.segment))
                .filter(|s| s.overlap_length(&edge) > 0.0)
                .map(|s| {
                    let (_, a, b) = s.span();
                    (a.max(lo), b.min(hi))
                })
                .collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut covered = lo;
            for (a, b) in spans {
                if a > covered + GEOM_EPS {
                    break;
                }
                covered = covered.max(b);
            }
            if covered < hi - GEOM_EPS {
                return Err(CrowdError::Geometry(format!(
                    "room side {side:?} is not covered by walls and exits (gap at {covered})"
                )));
            }
        }
        Ok(())
    }

    fn check_inside(&self, x: Vec2) -> Result<()> {
        if self.bounding_box.contains_eps(x, GEOM_EPS) {
            Ok(())
        } else {
            Err(CrowdError::OutsideDomain { x: x.x, y: x.y })
        }
    }

    pub fn in_room(&self, x: Vec2) -> bool {
        self.room.contains(x)
    }

    fn nearest_exit(&self, x: Vec2) -> Option<(usize, Vec2, f64)> {
        self.exits
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let p = e.segment.closest_point(x);
                (i, p, (p - x).norm())
            })
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }

    /// Distance and heading to the nearest exit; `None` when the domain has no exits.
    ///
    /// Points outside the room have already left it and keep walking along the
    /// outward normal of their nearest exit. Inside the room the heading is
    /// redirected to an effective-area corner when the straight path to the
    /// exit is blocked by a nearby obstacle.
    pub fn distance_to_exit(&self, x: Vec2) -> Result<Option<ExitQuery>> {
        self.check_inside(x)?;
        let Some((exit_index, exit_point, dist)) = self.nearest_exit(x) else {
            return Ok(None);
        };
        let normal = self.exits[exit_index].outward_normal();
        let distance = dist.min(1.0);
        if !self.in_room(x) || dist <= GEOM_EPS {
            return Ok(Some(ExitQuery { distance, direction: normal, exit_point, exit_index, detour_corner: None }));
        }
        let straight = (exit_point - x) / dist;
        let detour = self.detour_corner(x, exit_point);
        let direction = match detour {
            Some(c) if (c - x).norm() > GEOM_EPS => (c - x).normalize(),
            _ => straight,
        };
        Ok(Some(ExitQuery { distance, direction, exit_point, exit_index, detour_corner: detour }))
    }

    /// Corner of the first blocking effective area to aim for, if any.
    fn detour_corner(&self, x: Vec2, exit_point: Vec2) -> Option<Vec2> {
        let blocking = self
            .obstacles
            .iter()
            .map(|o| &o.effective_area)
            .filter(|r| r.segment_crosses_interior(x, exit_point))
            .filter(|r| r.distance_to(x) <= r.diagonal())
            .min_by(|a, b| a.distance_to(x).total_cmp(&b.distance_to(x)))?;
        let inside = blocking.contains(x);
        let corners = blocking.corners();
        let mut best: Option<(f64, Vec2)> = None;
        for (i, &c) in corners.iter().enumerate() {
            if !inside && blocking.segment_crosses_interior(x, c) {
                continue;
            }
            let tail = if !blocking.segment_crosses_interior(c, exit_point) {
                (exit_point - c).norm()
            } else {
                // Continue around the rectangle through an adjacent corner.
                [corners[(i + 1) % 4], corners[(i + 3) % 4]]
                    .into_iter()
                    .filter(|&n| !blocking.segment_crosses_interior(n, exit_point))
                    .map(|n| (n - c).norm() + (exit_point - n).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            let cost = (c - x).norm() + tail;
            let better = match best {
                None => true,
                Some((b, bc)) => cost < b - 1e-12 || ((cost - b).abs() <= 1e-12 && (c.y, c.x) < (bc.y, bc.x)),
            };
            if better && cost.is_finite() {
                best = Some((cost, c));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Casts the ray `x + t (cos theta, sin theta)` against walls and
    /// effective-area boundaries.
    ///
    /// `u_e` orients the tangent toward the exit; when it is orthogonal to the
    /// boundary, the tangent turning counterclockwise from the heading is used.
    pub fn wall_query(&self, x: Vec2, theta: f64, u_e: Vec2) -> Result<WallHit> {
        self.check_inside(x)?;
        let miss = WallHit { distance: 1.0, tangent: u_e, point: None };
        if !self.in_room(x) {
            return Ok(miss);
        }
        let heading = Vec2::new(theta.cos(), theta.sin());
        let mut hit: Option<(f64, Segment)> = None;
        let effective_edges = self.obstacles.iter().flat_map(|o| o.effective_area.edges());
        for seg in self.walls.iter().copied().chain(effective_edges) {
            if let Some(t) = seg.ray_hit(x, heading) {
                if hit.is_none_or(|(best, _)| t < best) {
                    hit = Some((t, seg));
                }
            }
        }
        let Some((t_wall, seg)) = hit else {
            return Ok(miss);
        };
        let t_exit = self.exits.iter().filter_map(|e| e.segment.ray_hit(x, heading)).fold(f64::INFINITY, f64::min);
        if t_exit <= t_wall {
            return Ok(miss);
        }
        let t = seg.tangent();
        let along = t.dot(&u_e);
        let tangent = if along > 1e-12 {
            t
        } else if along < -1e-12 {
            -t
        } else if heading.x * t.y - heading.y * t.x > 0.0 {
            t
        } else {
            -t
        };
        Ok(WallHit { distance: t_wall.min(1.0), tangent, point: Some(x + t_wall * heading) })
    }

    /// Full geometric query for a pedestrian at `x` heading along `theta`.
    ///
    /// In domains without exits the exit term carries no weight and the
    /// heading itself stands in for `u_e`.
    pub fn query(&self, x: Vec2, theta: f64) -> Result<GeometricQuery> {
        let (d_e, u_e) = match self.distance_to_exit(x)? {
            Some(q) => (q.distance, q.direction),
            None => (1.0, Vec2::new(theta.cos(), theta.sin())),
        };
        let wall = self.wall_query(x, theta, u_e)?;
        Ok(GeometricQuery { d_e, u_e, d_w: wall.distance, u_w: wall.tangent, x_w: wall.point })
    }

    /// Environment quality at `x`: the obstacle's value inside any (closed)
    /// effective area, `base_alpha` elsewhere.
    pub fn quality_at(&self, x: Vec2, base_alpha: f64) -> Result<f64> {
        self.check_inside(x)?;
        Ok(self.obstacles.iter().find(|o| o.effective_area.contains(x)).map_or(base_alpha, |o| o.alpha_eff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_room_right_exit(width: f64) -> DomainSpec {
        let exit = Segment::new(Vec2::new(1.0, 0.5 - width / 2.0), Vec2::new(1.0, 0.5 + width / 2.0)).unwrap();
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        DomainSpec::rectangular_room(r, r, vec![exit], vec![], vec![]).unwrap()
    }

    /// Room of side 1 inside a wider box, one obstacle in front of the exit.
    fn configuration_one() -> DomainSpec {
        let exit = Segment::new(Vec2::new(1.0, 0.4), Vec2::new(1.0, 0.6)).unwrap();
        let obstacle = Obstacle::new(Rect::from_center(Vec2::new(0.75, 0.5), 0.1, 0.1), 0.0).unwrap();
        DomainSpec::rectangular_room(
            Rect::new(0.0, 0.0, 1.4, 1.0),
            Rect::new(0.0, 0.0, 1.0, 1.0),
            vec![exit],
            vec![obstacle],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn walls_are_room_minus_exits() {
        let d = unit_room_right_exit(0.2);
        assert_eq!(d.walls.len(), 5);
        let total: f64 = d.walls.iter().map(Segment::length).sum();
        assert_abs_diff_eq!(total, 3.8, epsilon = 1e-12);
    }

    #[test]
    fn exit_overlapping_wall_rejected() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        let wall = Segment::new(Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let exit = Segment::new(Vec2::new(1.0, 0.4), Vec2::new(1.0, 0.6)).unwrap();
        let err = DomainSpec::new(r, r, vec![wall], vec![exit], vec![], vec![]).unwrap_err();
        assert!(err.to_string().contains("overlaps"));
    }

    #[test]
    fn uncovered_boundary_rejected() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        let wall = Segment::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!(DomainSpec::new(r, r, vec![wall], vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn exit_off_boundary_rejected() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        let exit = Segment::new(Vec2::new(0.5, 0.4), Vec2::new(0.5, 0.6)).unwrap();
        assert!(DomainSpec::rectangular_room(r, r, vec![exit], vec![], vec![]).is_err());
    }

    #[test]
    fn diagonal_segment_rejected() {
        assert!(Segment::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn obstacle_invariants() {
        let fp = Rect::from_center(Vec2::new(0.5, 0.5), 0.2, 0.1);
        let o = Obstacle::new(fp, 1.0).unwrap();
        assert_abs_diff_eq!(o.effective_area.area(), 4.0 * fp.area(), epsilon = 1e-15);
        assert!(fp.strictly_inside(&o.effective_area));
        let shifted = Rect::from_center(Vec2::new(0.55, 0.5), 0.4, 0.2);
        assert!(Obstacle::with_effective_area(fp, shifted, 1.0).is_err());
        let too_big = Rect::from_center(Vec2::new(0.5, 0.5), 0.5, 0.2);
        assert!(Obstacle::with_effective_area(fp, too_big, 1.0).is_err());
        assert!(Obstacle::new(fp, 1.5).is_err());
    }

    #[test]
    fn exit_at_midpoint_uses_outward_normal() {
        let d = unit_room_right_exit(0.2);
        let q = d.distance_to_exit(Vec2::new(1.0, 0.5)).unwrap().unwrap();
        assert_eq!(q.distance, 0.0);
        assert_eq!(q.direction, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn exit_distance_symmetric_case() {
        let d = unit_room_right_exit(0.2);
        let q = d.distance_to_exit(Vec2::new(0.5, 0.5)).unwrap().unwrap();
        assert_abs_diff_eq!(q.distance, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.direction.x, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.direction.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn outside_point_is_rejected() {
        let d = unit_room_right_exit(0.2);
        assert!(matches!(d.distance_to_exit(Vec2::new(1.5, 0.5)), Err(CrowdError::OutsideDomain { .. })));
        assert!(d.quality_at(Vec2::new(-0.1, 0.5), 1.0).is_err());
    }

    #[test]
    fn egressed_points_keep_walking_outward() {
        let d = configuration_one();
        let q = d.distance_to_exit(Vec2::new(1.2, 0.9)).unwrap().unwrap();
        assert_eq!(q.direction, Vec2::new(1.0, 0.0));
        let w = d.wall_query(Vec2::new(1.2, 0.9), PI, q.direction).unwrap();
        assert_eq!(w.distance, 1.0);
        assert!(w.point.is_none());
    }

    #[test]
    fn blocked_exit_redirects_to_corner() {
        let d = configuration_one();
        let x = Vec2::new(0.6, 0.52);
        let q = d.distance_to_exit(x).unwrap().unwrap();
        // Brute-force check that the straight path enters the effective area.
        let eff = d.obstacles[0].effective_area;
        let blocked = (1..1000).any(|k| {
            let t = k as f64 / 1000.0;
            let p = x + t * (q.exit_point - x);
            p.x > eff.x_min && p.x < eff.x_max && p.y > eff.y_min && p.y < eff.y_max
        });
        assert!(blocked);
        let corner = q.detour_corner.expect("detour expected");
        assert!(eff.corners().iter().any(|c| (c - corner).norm() < 1e-15));
        // Shortest visible detour from slightly above the centerline goes over the top.
        assert_abs_diff_eq!(corner.y, eff.y_max, epsilon = 1e-15);
        assert_abs_diff_eq!(corner.x, eff.x_min, epsilon = 1e-15);
        let expected = (corner - x).normalize();
        assert_abs_diff_eq!((q.direction - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn centered_detour_tie_breaks_to_smaller_y() {
        let d = configuration_one();
        let q = d.distance_to_exit(Vec2::new(0.6, 0.5)).unwrap().unwrap();
        let eff = d.obstacles[0].effective_area;
        assert_eq!(q.detour_corner.unwrap().y, eff.y_min);
    }

    #[test]
    fn far_points_are_not_redirected() {
        let d = configuration_one();
        let q = d.distance_to_exit(Vec2::new(0.05, 0.5)).unwrap().unwrap();
        assert!(q.detour_corner.is_none());
        assert_abs_diff_eq!(q.direction.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn axis_aligned_ray_hits_left_wall() {
        let d = unit_room_right_exit(0.2);
        let x = Vec2::new(0.5, 0.5);
        let w = d.wall_query(x, PI, Vec2::new(1.0, 0.0)).unwrap();
        let p = w.point.unwrap();
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.distance, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn top_wall_tangent_points_to_exit_side() {
        let d = unit_room_right_exit(0.2);
        let x = Vec2::new(0.3, 0.8);
        let u_e = d.distance_to_exit(x).unwrap().unwrap().direction;
        let w = d.wall_query(x, PI / 4.0, u_e).unwrap();
        assert_abs_diff_eq!(w.point.unwrap().y, 1.0, epsilon = 1e-12);
        assert_eq!(w.tangent, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn ray_through_exit_has_no_wall() {
        let d = unit_room_right_exit(0.2);
        let u_e = Vec2::new(1.0, 0.0);
        let w = d.wall_query(Vec2::new(0.5, 0.5), 0.0, u_e).unwrap();
        assert_eq!(w.distance, 1.0);
        assert_eq!(w.tangent, u_e);
    }

    #[test]
    fn orthogonal_tangent_tie_turns_counterclockwise() {
        let d = unit_room_right_exit(0.2);
        // Heading left toward the left wall with the exit straight behind.
        let w = d.wall_query(Vec2::new(0.5, 0.5), PI, Vec2::new(1.0, 0.0)).unwrap();
        // Counterclockwise of heading (-1, 0) is (0, -1).
        assert_eq!(w.tangent, Vec2::new(0.0, -1.0));
    }

    #[test]
    fn ray_stops_at_effective_area_not_footprint() {
        let d = configuration_one();
        let x = Vec2::new(0.5, 0.5);
        let w = d.wall_query(x, 0.0, Vec2::new(1.0, 0.0)).unwrap();
        let eff = d.obstacles[0].effective_area;
        let p = w.point.unwrap();
        // Brute-force first crossing of any boundary segment along the ray.
        let boundaries: Vec<Segment> = d.walls.iter().copied().chain(eff.edges()).collect();
        let first = (1..200_000)
            .map(|k| k as f64 * 1e-5)
            .find(|&t| boundaries.iter().any(|s| s.distance(x + t * Vec2::new(1.0, 0.0)) < 1e-5))
            .unwrap();
        assert_abs_diff_eq!(p.x, eff.x_min, epsilon = 1e-12);
        assert!((first - w.distance).abs() < 2e-5);
        assert!(p.x < d.obstacles[0].footprint.x_min);
    }

    #[test]
    fn quality_field_values() {
        let d = configuration_one();
        let eff = d.obstacles[0].effective_area;
        assert_eq!(d.quality_at(Vec2::new(0.1, 0.1), 1.0).unwrap(), 1.0);
        assert_eq!(d.quality_at(eff.center(), 1.0).unwrap(), 0.0);
        assert_eq!(d.quality_at(Vec2::new(eff.x_min, eff.center().y), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn no_exit_domain_uses_heading() {
        let r = Rect::new(0.0, 0.0, 1.0, 0.25);
        let d = DomainSpec::rectangular_room(r, r, vec![], vec![], vec![Side::Left, Side::Right]).unwrap();
        assert!(d.distance_to_exit(Vec2::new(0.5, 0.1)).unwrap().is_none());
        let q = d.query(Vec2::new(0.5, 0.1), 0.0).unwrap();
        assert_eq!(q.d_e, 1.0);
        assert_eq!(q.d_w, 1.0);
        assert_eq!(q.u_e, Vec2::new(1.0, 0.0));
        // A diagonal heading is steered along the wall in its own direction.
        let q = d.query(Vec2::new(0.5, 0.1), PI / 4.0).unwrap();
        assert_eq!(q.u_w, Vec2::new(1.0, 0.0));
    }

    proptest! {
        #[test]
        fn hit_points_lie_on_boundaries(px in 0.01f64..0.99, py in 0.01f64..0.99, h in 0usize..8) {
            let d = configuration_one();
            let x = Vec2::new(px, py);
            let theta = h as f64 * PI / 4.0;
            let q = d.query(x, theta).unwrap();
            prop_assert!((q.u_e.norm() - 1.0).abs() < 1e-12);
            prop_assert!((q.u_w.norm() - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&q.d_e));
            prop_assert!((0.0..=1.0).contains(&q.d_w));
            if let Some(p) = q.x_w {
                let eff = d.obstacles[0].effective_area;
                let on_boundary = d.walls.iter().copied().chain(eff.edges())
                    .any(|s| s.distance(p) < 1e-9);
                prop_assert!(on_boundary);
            }
        }

        #[test]
        fn quality_is_idempotent(px in 0.0f64..1.4, py in 0.0f64..1.0, base in 0.0f64..1.0) {
            let d = configuration_one();
            let x = Vec2::new(px, py);
            let a = d.quality_at(x, base).unwrap();
            prop_assert_eq!(a, d.quality_at(x, base).unwrap());
            prop_assert!(a == base || a == d.obstacles[0].alpha_eff);
        }

        #[test]
        fn no_obstacle_means_straight_exit_heading(px in 0.0f64..1.0, py in 0.0f64..1.0) {
            let d = unit_room_right_exit(0.2);
            let x = Vec2::new(px, py);
            let q = d.distance_to_exit(x).unwrap().unwrap();
            prop_assert!(q.detour_corner.is_none());
            if q.distance > 1e-9 {
                let straight = (q.exit_point - x).normalize();
                prop_assert!((q.direction - straight).norm() < 1e-15);
            }
            prop_assert_eq!(q.distance <= 1e-12, d.exits[0].segment.distance(x) <= 1e-12);
        }
    }
}
