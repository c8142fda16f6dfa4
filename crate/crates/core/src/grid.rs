//! Uniform 1-D node grids and functions sampled on them.

use crate::error::{Error, Result};

/// Uniform grid of `n_cells + 1` nodes on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Invalid(format!("grid needs x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_cells < 8 {
            return Err(Error::Invalid(format!("grid needs at least 8 cells, got {n_cells}")));
        }
        Ok(Self { x_min, x_max, n_cells })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_max
        } else {
            self.x_min + self.dx() * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let r = ((x - self.x_min) / self.dx()).round();
        r.clamp(0.0, self.n_cells as f64) as usize
    }
}

/// Node values of a function on a [`Grid1D`] at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub time: f64,
}

impl GridFunction {
    pub fn new(grid: Grid1D, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.n_nodes())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("value at node {i}")));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid1D, time: f64, f: F) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values, time)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piecewise-linear value at `x`, constant beyond the ends.
    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.grid;
        let s = (x - g.x_min) / g.dx();
        if s <= 0.0 {
            return self.values[0];
        }
        if s >= g.n_cells as f64 {
            return self.values[g.n_cells];
        }
        let i = (s.floor() as usize).min(g.n_cells - 1);
        let w = s - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Linear resampling onto another grid. Introduces no new extrema.
    pub fn resample(&self, grid: Grid1D) -> GridFunction {
        let values = grid.nodes().into_iter().map(|x| self.interpolate(x)).collect();
        GridFunction { grid, values, time: self.time }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), time: self.time }
    }

    /// Total variation of the node values.
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// `L1` distance of two functions on a common grid (trapezoid weights).
pub fn l1_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid, g.grid)));
    }
    let n = f.values.len();
    let dx = f.grid.dx();
    let sum: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .enumerate()
        .map(|(i, (a, b))| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            w * (a - b).abs()
        })
        .sum();
    Ok(sum * dx)
}

/// Sup-norm distance on a common grid.
pub fn sup_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid, g.grid)));
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        let g = Grid1D::new(0.0, 2.0, 200).unwrap();
        let f = GridFunction::from_fn(g, 0.0, |x| x).unwrap();
        assert_eq!(l1_distance(&f, &f).unwrap(), 0.0);
        let h = GridFunction::from_fn(g, 0.0, |x| x + 1.0).unwrap();
        assert!((l1_distance(&f, &h).unwrap() - 2.0).abs() < 1e-12);

        // unit states -1 / 1, shift by s = 0.25 -> 2 s
        let g = Grid1D::new(-2.0, 2.0, 400).unwrap();
        let a = GridFunction::from_fn(g, 0.0, |x| if x < 0.0 { -1.0 } else { 1.0 }).unwrap();
        let b = GridFunction::from_fn(g, 0.0, |x| if x < 0.25 - 1e-12 { -1.0 } else { 1.0 }).unwrap();
        assert!((l1_distance(&a, &b).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = GridFunction::from_fn(Grid1D::new(0.0, 1.0, 10).unwrap(), 0.0, |x| x).unwrap();
        let b = GridFunction::from_fn(Grid1D::new(0.0, 1.0, 20).unwrap(), 0.0, |x| x).unwrap();
        assert!(matches!(l1_distance(&a, &b), Err(Error::GridMismatch(_))));
        assert!(l1_distance(&a.resample(b.grid), &b).unwrap() < 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 4).is_err());
        let g = Grid1D::new(-1.0, 1.0, 8).unwrap();
        assert_eq!(g.x(8), 1.0);
        assert_eq!(g.nearest(0.01), 4);
    }
}
