use super::{interaction_preferred_direction, table_a_row, table_b_entry, DirectionSet};

/// Per-cell inputs of the collision operator.
#[derive(Debug, Clone)]
pub struct CellContext {
    pub dirs: DirectionSet,
    /// Geometric preferred direction for each candidate direction `h`.
    pub theta_g: Vec<f64>,
    /// Least-congested direction index for each candidate direction `h`.
    pub congestion: Vec<usize>,
    pub alpha: f64,
    pub epsilon: f64,
}

/// Net interaction gain `J^i` for every direction at one cell, assembled
/// from the full transition tables.
///
/// Rates use the local density clamped to `[0, 1]`: `mu = 1 - rho` for the
/// environment and `eta = rho` for pedestrian encounters. The sum over `i` of
/// the result vanishes up to rounding because every table row is stochastic.
pub fn collision_operator(f: &[f64], ctx: &CellContext) -> Vec<f64> {
    let dirs = &ctx.dirs;
    let n = dirs.len();
    debug_assert_eq!(f.len(), n);
    let rho: f64 = f.iter().sum();
    let rho_c = rho.clamp(0.0, 1.0);
    let mu = 1.0 - rho_c;
    let eta = rho_c;

    let mut gain_g = vec![0.0; n];
    let mut gain_p = vec![0.0; n];
    for h in 0..n {
        let idx = [dirs.prev(h), h, dirs.next(h)];
        let a = table_a_row(h, ctx.theta_g[h], ctx.alpha, dirs);
        for (&i, w) in idx.iter().zip(a) {
            gain_g[i] += w * f[h];
        }
        let theta_c = dirs.angle(ctx.congestion[h]);
        for k in 0..n {
            let theta_p = interaction_preferred_direction(theta_c, dirs.angle(k), ctx.epsilon);
            let b = table_b_entry(h, theta_p, rho_c, ctx.alpha, dirs);
            for (&i, w) in idx.iter().zip(b) {
                gain_p[i] += w * f[h] * f[k];
            }
        }
    }
    (0..n).map(|i| mu * (gain_g[i] - f[i]) + eta * (gain_p[i] - f[i] * rho)).collect()
}
