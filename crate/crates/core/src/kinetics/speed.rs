use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CrowdError, Result};

/// Speed-density closure.
///
/// `Cubic` is free flow at speed `alpha` up to the critical density
/// `alpha / 5`, then a cubic that reaches zero with zero slope at `rho = 1`.
/// The other three are cosine laws with a fixed critical density of 0.2 and
/// exponents 2/3, 1/2 and 1/3; a smaller exponent gives a slower crowd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityLaw {
    Cubic,
    Purple,
    Orange,
    Blue,
}

impl VelocityLaw {
    pub const ALL: [VelocityLaw; 4] = [VelocityLaw::Cubic, VelocityLaw::Purple, VelocityLaw::Orange, VelocityLaw::Blue];

    fn cosine_exponent(self) -> Option<f64> {
        match self {
            VelocityLaw::Cubic => None,
            VelocityLaw::Purple => Some(2.0 / 3.0),
            VelocityLaw::Orange => Some(0.5),
            VelocityLaw::Blue => Some(1.0 / 3.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityLaw::Cubic => "cubic",
            VelocityLaw::Purple => "purple",
            VelocityLaw::Orange => "orange",
            VelocityLaw::Blue => "blue",
        }
    }
}

impl fmt::Display for VelocityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VelocityLaw {
    type Err = CrowdError;

    fn from_str(s: &str) -> Result<Self> {
        VelocityLaw::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| CrowdError::config("model.velocity_law", format!("unknown law `{s}`")))
    }
}

/// Coefficients `a0..a3` of the slowdown cubic for a given quality `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub a: [f64; 4],
    pub rho_c: f64,
}

impl CubicCoefficients {
    pub fn new(alpha: f64) -> Self {
        // (alpha - 5)^3 expanded.
        let den = alpha.powi(3) - 15.0 * alpha.powi(2) + 75.0 * alpha - 125.0;
        let a2 = alpha * alpha;
        CubicCoefficients {
            a: [
                (75.0 * a2 - 125.0 * alpha) / den,
                (-150.0 * a2) / den,
                (75.0 * a2 + 375.0 * alpha) / den,
                (-250.0 * alpha) / den,
            ],
            rho_c: alpha / 5.0,
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let [a0, a1, a2, a3] = self.a;
        ((a3 * rho + a2) * rho + a1) * rho + a0
    }
}

/// Dimensionless walking speed at density `rho` in an environment of quality
/// `alpha`. Densities within `1e-6` of `[0, 1]` are clamped; anything further
/// out is a numeric-state error.
pub fn speed(rho: f64, alpha: f64, law: VelocityLaw) -> Result<f64> {
    if !(-1e-6..=1.0 + 1e-6).contains(&rho) || !rho.is_finite() {
        return Err(CrowdError::NumericState {
            step: 0,
            substep: 0,
            phase: "speed",
            message: format!("density {rho} outside [0, 1]"),
        });
    }
    Ok(speed_clamped(rho.clamp(0.0, 1.0), alpha, law))
}

/// Speed for a density already known to lie in `[0, 1]`.
#[inline]
pub fn speed_clamped(rho: f64, alpha: f64, law: VelocityLaw) -> f64 {
    match law.cosine_exponent() {
        None => {
            let rho_c = alpha / 5.0;
            if rho <= rho_c {
                alpha
            } else {
                CubicCoefficients::new(alpha).eval(rho).clamp(0.0, alpha)
            }
        }
        Some(p) => {
            if rho <= 0.2 {
                alpha
            } else {
                let phase = (rho - 0.2).powf(p) * std::f64::consts::PI / 0.8f64.powf(p);
                (alpha * 0.5 * (1.0 + phase.cos())).clamp(0.0, alpha)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix4, Vector4};

    /// Coefficients obtained by solving the four anchor conditions directly.
    fn solved_coefficients(alpha: f64) -> [f64; 4] {
        let rc = alpha / 5.0;
        let m = Matrix4::new(
            1.0,
            rc,
            rc * rc,
            rc * rc * rc,
            0.0,
            1.0,
            2.0 * rc,
            3.0 * rc * rc,
            1.0,
            1.0,
            1.0,
            1.0,
            0.0,
            1.0,
            2.0,
            3.0,
        );
        let rhs = Vector4::new(alpha, 0.0, 0.0, 0.0);
        let x = m.lu().solve(&rhs).unwrap();
        [x[0], x[1], x[2], x[3]]
    }

    #[test]
    fn closed_form_matches_linear_solve() {
        for alpha in [0.1, 0.4, 0.7, 1.0] {
            let closed = CubicCoefficients::new(alpha).a;
            let solved = solved_coefficients(alpha);
            for (c, s) in closed.iter().zip(solved) {
                assert!((c - s).abs() < 1e-10, "alpha {alpha}: {closed:?} vs {solved:?}");
            }
        }
    }

    #[test]
    fn unit_alpha_coefficients() {
        let c = CubicCoefficients::new(1.0).a;
        let expected = [25.0 / 32.0, 75.0 / 32.0, -225.0 / 32.0, 125.0 / 32.0];
        for (c, e) in c.iter().zip(expected) {
            assert!((c - e).abs() < 1e-14);
        }
        // Direct polynomial evaluation at the critical density.
        let v = expected[3] * 0.008 + expected[2] * 0.04 + expected[1] * 0.2 + expected[0];
        assert!((v - 1.0).abs() < 1e-14);
        assert!((speed(0.2, 1.0, VelocityLaw::Cubic).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jammed_speed_is_zero() {
        assert!(speed(1.0, 1.0, VelocityLaw::Cubic).unwrap().abs() < 1e-12);
        assert_eq!(speed(1.0, 0.3, VelocityLaw::Blue).unwrap(), 0.0);
    }

    #[test]
    fn slowdown_branch_at_low_alpha() {
        // rho_c = 0.08 < 0.1, so the cubic branch applies.
        let [a0, a1, a2, a3] = solved_coefficients(0.4);
        let oracle = a0 + a1 * 0.1 + a2 * 0.01 + a3 * 0.001;
        let v = speed(0.1, 0.4, VelocityLaw::Cubic).unwrap();
        assert!((v - oracle).abs() < 1e-12);
        assert!(v < 0.4 && v > 0.39);
    }

    #[test]
    fn free_flow_branch() {
        assert_eq!(speed(0.05, 0.4, VelocityLaw::Cubic).unwrap(), 0.4);
        assert_eq!(speed(0.0, 1.0, VelocityLaw::Orange).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_density_is_error() {
        assert!(speed(1.0 + 1e-7, 1.0, VelocityLaw::Cubic).is_ok());
        assert!(speed(1.01, 1.0, VelocityLaw::Cubic).is_err());
        assert!(speed(-0.01, 1.0, VelocityLaw::Cubic).is_err());
        assert!(speed(f64::NAN, 1.0, VelocityLaw::Cubic).is_err());
    }

    #[test]
    fn parse_law_names() {
        for law in VelocityLaw::ALL {
            assert_eq!(law.name().parse::<VelocityLaw>().unwrap(), law);
        }
        assert!("green".parse::<VelocityLaw>().is_err());
    }
}
