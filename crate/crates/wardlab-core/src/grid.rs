//! Uniform Cartesian grids on the spatial plane.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MIN_POINTS: usize = 8;

/// A uniform nx x ny grid with spacing `h`; node (0,0) sits at `origin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, h: f64, origin: [f64; 2]) -> Result<Self> {
        if nx < MIN_POINTS || ny < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid must have at least {MIN_POINTS} points per axis, got {nx} x {ny}"
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(GridSpec { nx, ny, h, origin })
    }

    /// Grid covering [xmin, xmax] x [ymin, ymax] with spacing h (extents are
    /// rounded outward to whole steps).
    pub fn from_extent(xmin: f64, xmax: f64, ymin: f64, ymax: f64, h: f64) -> Result<Self> {
        if !(xmax > xmin) || !(ymax > ymin) {
            return Err(Error::Config(format!(
                "empty extent [{xmin},{xmax}] x [{ymin},{ymax}]"
            )));
        }
        let nx = ((xmax - xmin) / h).round() as usize + 1;
        let ny = ((ymax - ymin) / h).round() as usize + 1;
        GridSpec::new(nx, ny, h, [xmin, ymin])
    }

    /// Coordinates of node (i, j), exact from indices.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_max(&self) -> f64 {
        self.origin[0] + (self.nx - 1) as f64 * self.h
    }

    pub fn y_max(&self) -> f64 {
        self.origin[1] + (self.ny - 1) as f64 * self.h
    }

    /// Covered area (nx-1)(ny-1) h^2.
    pub fn area(&self) -> f64 {
        (self.nx - 1) as f64 * (self.ny - 1) as f64 * self.h * self.h
    }

    /// Same node set enlarged by `pad` nodes on every side.
    pub fn padded(&self, pad: usize) -> Result<GridSpec> {
        GridSpec::new(
            self.nx + 2 * pad,
            self.ny + 2 * pad,
            self.h,
            [
                self.origin[0] - pad as f64 * self.h,
                self.origin[1] - pad as f64 * self.h,
            ],
        )
    }

    /// Trapezoid quadrature weight of node (i, j), including the h^2 factor.
    pub fn trapezoid_weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
        wx * wy * self.h * self.h
    }
}
