//! Preferred directions and the two tables of games.
//!
//! Both tables move probability from the current direction `h` to one of its
//! two neighbors only, so a row is fully described by the chosen neighbor and
//! the weight sent there; the remainder stays on `h`.

use super::{angular_distance, wrap_angle, DirectionSet};
use crate::geometry::GeometricQuery;

const TIE_EPS: f64 = 1e-12;
const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Neighbor of `h` that receives the moving mass.
    pub target: usize,
    /// Probability of moving to `target`; `1 - weight` stays on `h`.
    pub weight: f64,
}

/// Transition from direction `h` toward the preferred angle `preferred`,
/// with eagerness `scale` (`alpha` for the geometric table, `alpha * rho`
/// for the pedestrian table).
///
/// The eagerness is damped linearly when the preferred angle is within one
/// angular step of `h`. Ties between the two neighbors go to the
/// counterclockwise one.
pub fn transition(h: usize, preferred: f64, scale: f64, dirs: &DirectionSet) -> Transition {
    let delta = dirs.delta();
    let off = angular_distance(dirs.angle(h), preferred);
    let damping = if off >= delta { 1.0 } else { off / delta };
    let next = dirs.next(h);
    let prev = dirs.prev(h);
    let to_next = angular_distance(preferred, dirs.angle(next));
    let to_prev = angular_distance(preferred, dirs.angle(prev));
    let target = if to_next <= to_prev + TIE_EPS { next } else { prev };
    Transition { target, weight: scale * damping }
}

fn row(h: usize, t: Transition, dirs: &DirectionSet) -> [f64; 3] {
    if t.target == dirs.next(h) {
        [0.0, 1.0 - t.weight, t.weight]
    } else {
        [t.weight, 1.0 - t.weight, 0.0]
    }
}

/// Geometric table row of `h` as weights on `(h-1, h, h+1)`.
pub fn table_a_row(h: usize, theta_g: f64, alpha: f64, dirs: &DirectionSet) -> [f64; 3] {
    row(h, transition(h, theta_g, alpha, dirs), dirs)
}

/// Pedestrian table row of candidate `h` (for a field direction that
/// produced `theta_p`) as weights on `(h-1, h, h+1)`.
pub fn table_b_entry(h: usize, theta_p: f64, rho: f64, alpha: f64, dirs: &DirectionSet) -> [f64; 3] {
    row(h, transition(h, theta_p, alpha * rho, dirs), dirs)
}

/// Angle of the normalized blend of the exit and wall directions, each
/// weighted by one minus its distance.
pub fn geometric_preferred_direction(q: &GeometricQuery) -> f64 {
    let blend = (1.0 - q.d_e) * q.u_e + (1.0 - q.d_w) * q.u_w;
    if blend.norm() <= DEGENERATE_NORM {
        wrap_angle(q.u_e.y.atan2(q.u_e.x))
    } else {
        wrap_angle(blend.y.atan2(blend.x))
    }
}

/// Least-congested direction among `h` and its neighbors given the density
/// derivative along every direction. Ties keep `h`, then prefer `h + 1`.
pub fn congestion_direction(h: usize, derivatives: &[f64], dirs: &DirectionSet) -> usize {
    let mut best = h;
    for j in [dirs.next(h), dirs.prev(h)] {
        if derivatives[j] < derivatives[best] {
            best = j;
        }
    }
    best
}

/// Angle of the normalized blend `eps * u_F + (1 - eps) * u_C`.
pub fn interaction_preferred_direction(theta_c: f64, theta_k: f64, epsilon: f64) -> f64 {
    let x = epsilon * theta_k.cos() + (1.0 - epsilon) * theta_c.cos();
    let y = epsilon * theta_k.sin() + (1.0 - epsilon) * theta_c.sin();
    if x.hypot(y) <= DEGENERATE_NORM {
        wrap_angle(theta_c)
    } else {
        wrap_angle(y.atan2(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn eight() -> DirectionSet {
        DirectionSet::new(8).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        angular_distance(wrap_angle(a), wrap_angle(b)) < 1e-12
    }

    #[test]
    fn aligned_goal_keeps_direction() {
        let d = eight();
        for h in 0..8 {
            assert_eq!(table_a_row(h, d.angle(h), 1.0, &d), [0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn far_goal_forces_transition() {
        let d = eight();
        // theta_h = 0, goal at 3 pi / 4: beyond one step, closer to h + 1.
        assert_eq!(table_a_row(0, 0.75 * PI, 1.0, &d), [0.0, 0.0, 1.0]);
        assert_eq!(table_a_row(0, 1.25 * PI, 1.0, &d), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn half_step_goal_splits_evenly() {
        let d = eight();
        // Direct evaluation: beta = (pi/8) / (pi/4) = 1/2, s = h + 1.
        let beta = (PI / 8.0) / (PI / 4.0);
        let row = table_a_row(0, PI / 8.0, 1.0, &d);
        assert_eq!(row[0], 0.0);
        assert!((row[1] - (1.0 - beta)).abs() < 1e-15);
        assert!((row[2] - beta).abs() < 1e-15);
    }

    #[test]
    fn vacuum_has_no_pedestrian_transitions() {
        let d = eight();
        assert_eq!(table_b_entry(3, 1.0, 0.0, 1.0, &d), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn saturated_pedestrian_transition() {
        let d = eight();
        // theta_h = pi/2, theta_P = 7pi/4: far from h and nearer to h - 1 (pi/4).
        let row = table_b_entry(2, 1.75 * PI, 1.0, 1.0, &d);
        assert_eq!(row, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn quarter_pedestrian_transition() {
        let d = eight();
        // beta_hk = 1/2 and rho = 0.5 give 0.25 moving to h + 1.
        let row = table_b_entry(0, PI / 8.0, 0.5, 1.0, &d);
        let moved = 0.5 * ((PI / 8.0) / (PI / 4.0));
        assert_eq!(row[0], 0.0);
        assert!((row[1] - (1.0 - moved)).abs() < 1e-15);
        assert!((row[2] - moved).abs() < 1e-15);
        assert!((row[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn opposite_goal_tie_goes_counterclockwise() {
        let d = eight();
        let t = transition(0, PI, 1.0, &d);
        assert_eq!(t.target, 1);
        assert_eq!(t.weight, 1.0);
    }

    #[test]
    fn geometric_direction_cases() {
        let mut q =
            GeometricQuery { d_e: 0.5, u_e: Vec2::new(0.0, -1.0), d_w: 1.0, u_w: Vec2::new(1.0, 0.0), x_w: None };
        assert!(close(geometric_preferred_direction(&q), 1.5 * PI));
        q.d_e = 1.0;
        q.d_w = 0.2;
        assert!(close(geometric_preferred_direction(&q), 0.0));
        q.u_e = Vec2::new(1.0, 0.0);
        q.u_w = Vec2::new(0.0, 1.0);
        q.d_e = 0.5;
        q.d_w = 0.5;
        assert!(close(geometric_preferred_direction(&q), PI / 4.0));
        // Degenerate blend falls back to the exit direction.
        q.u_w = Vec2::new(-1.0, 0.0);
        assert!(close(geometric_preferred_direction(&q), 0.0));
    }

    #[test]
    fn congestion_uniform_keeps_direction() {
        let d = eight();
        let derivs = [0.0; 8];
        for h in 0..8 {
            assert_eq!(congestion_direction(h, &derivs, &d), h);
        }
    }

    #[test]
    fn congestion_gradient_in_x() {
        let d = eight();
        // rho increasing along +x: derivative along theta_j is cos(theta_j).
        let derivs: Vec<f64> = d.angles().map(f64::cos).collect();
        // theta_h = pi/2: candidates pi/4, pi/2, 3pi/4; the minimum is 3pi/4.
        assert_eq!(congestion_direction(2, &derivs, &d), 3);
    }

    #[test]
    fn congestion_unique_minimizer_clockwise() {
        let d = eight();
        let mut derivs = [0.0; 8];
        derivs[4] = -1.0;
        assert_eq!(congestion_direction(5, &derivs, &d), 4);
    }

    #[test]
    fn interaction_direction_cases() {
        assert!(close(interaction_preferred_direction(1.0, 2.0, 0.0), 1.0));
        assert!(close(interaction_preferred_direction(1.0, 2.0, 1.0), 2.0));
        assert!(close(interaction_preferred_direction(0.0, PI / 2.0, 0.5), PI / 4.0));
        // Antipodal with equal weights falls back to the congestion direction.
        assert!(close(interaction_preferred_direction(0.0, PI, 0.5), 0.0));
    }

    proptest! {
        #[test]
        fn rows_are_stochastic_with_local_support(
            h in 0usize..8, theta in 0.0f64..TAU, alpha in 0.0f64..=1.0, rho in 0.0f64..=1.0
        ) {
            let d = eight();
            for row in [table_a_row(h, theta, alpha, &d), table_b_entry(h, theta, rho, alpha, &d)] {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|w| (0.0..=1.0).contains(w)));
                prop_assert!(row[0] == 0.0 || row[2] == 0.0);
            }
        }

        #[test]
        fn epsilon_endpoints(theta_c in 0.0f64..TAU, theta_k in 0.0f64..TAU) {
            prop_assert!(close(interaction_preferred_direction(theta_c, theta_k, 1.0), theta_k));
            prop_assert!(close(interaction_preferred_direction(theta_c, theta_k, 0.0), theta_c));
        }
    }
}
