use super::Grid;
use crate::geometry::Vec2;

/// Per-direction densities `f^i` on every cell, stored cell-major so that the
/// `n_dirs` values of one cell are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    nx: usize,
    ny: usize,
    n_dirs: usize,
    data: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(grid: &Grid, n_dirs: usize) -> Self {
        DistributionField { nx: grid.nx, ny: grid.ny, n_dirs, data: vec![0.0; grid.cells() * n_dirs] }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_dirs(&self) -> usize {
        self.n_dirs
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn cell(&self, c: usize) -> &[f64] {
        &self.data[c * self.n_dirs..(c + 1) * self.n_dirs]
    }

    #[inline]
    pub fn cell_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.n_dirs..(c + 1) * self.n_dirs]
    }

    pub fn get(&self, c: usize, dir: usize) -> f64 {
        self.data[c * self.n_dirs + dir]
    }

    pub fn set(&mut self, c: usize, dir: usize, value: f64) {
        self.data[c * self.n_dirs + dir] = value;
    }

    pub fn density_at(&self, c: usize) -> f64 {
        self.cell(c).iter().sum()
    }

    pub fn density(&self) -> Vec<f64> {
        self.data.chunks_exact(self.n_dirs).map(|c| c.iter().sum()).collect()
    }

    /// Sum of `rho * cell_area` in a fixed cell order.
    pub fn total_mass(&self, grid: &Grid) -> f64 {
        self.density().iter().sum::<f64>() * grid.cell_area()
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn same_shape(&self, other: &DistributionField) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.n_dirs == other.n_dirs
    }
}

/// Bilinear sampler over a cell-centered scalar field, with wrap-around on
/// periodic axes and clamping to the outermost cell centers elsewhere.
pub struct DensitySampler<'a> {
    pub values: &'a [f64],
    pub grid: &'a Grid,
    pub periodic_x: bool,
    pub periodic_y: bool,
}

impl DensitySampler<'_> {
    fn axis(u: f64, n: usize, periodic: bool) -> (usize, usize, f64) {
        if periodic {
            let u = u.rem_euclid(n as f64);
            let i0 = (u.floor() as usize).min(n - 1);
            (i0, (i0 + 1) % n, u - i0 as f64)
        } else {
            let u = u.clamp(0.0, (n - 1) as f64);
            let i0 = (u.floor() as usize).min(n.saturating_sub(2));
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, u - i0 as f64)
        }
    }

    pub fn sample(&self, p: Vec2) -> f64 {
        let g = self.grid;
        let u = (p.x - g.origin.x) / g.dx - 0.5;
        let v = (p.y - g.origin.y) / g.dy - 0.5;
        let (i0, i1, tx) = Self::axis(u, g.nx, self.periodic_x);
        let (j0, j1, ty) = Self::axis(v, g.ny, self.periodic_y);
        let r00 = self.values[g.index(i0, j0)];
        let r10 = self.values[g.index(i1, j0)];
        let r01 = self.values[g.index(i0, j1)];
        let r11 = self.values[g.index(i1, j1)];
        // Difference form keeps constant fields exactly constant.
        let lo = r00 + tx * (r10 - r00);
        let hi = r01 + tx * (r11 - r01);
        lo + ty * (hi - lo)
    }

    /// Forward difference of the density along `(cos, sin)` over one cell
    /// size `min(dx, dy)`, starting from the center of cell `(i, j)`.
    pub fn directional_derivative(&self, i: usize, j: usize, cos: f64, sin: f64) -> f64 {
        let g = self.grid;
        let lambda = g.dx.min(g.dy);
        let here = self.values[g.index(i, j)];
        let p = g.center(i, j) + lambda * Vec2::new(cos, sin);
        (self.sample(p) - here) / lambda
    }
}
