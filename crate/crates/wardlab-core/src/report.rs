//! Scalar-field reports shared by the residual and energy diagnostics.

use crate::grid::GridSpec;

/// Pointwise Frobenius norms of a matrix residual field, with sup and
/// area-weighted l2 norms.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub grid: GridSpec,
    pub field: Vec<f64>,
    pub sup: f64,
    pub l2: f64,
}

impl ResidualReport {
    pub fn from_field(grid: GridSpec, field: Vec<f64>) -> Self {
        assert_eq!(field.len(), grid.len());
        let sup = field.iter().copied().fold(0.0, f64::max);
        let mut sq = 0.0;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let v = field[grid.idx(i, j)];
                sq += v * v * grid.trapezoid_weight(i, j);
            }
        }
        ResidualReport { grid, field, sup, l2: sq.sqrt() }
    }
}

/// Energy density on a grid slice with its quadrature total.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub grid: GridSpec,
    pub density: Vec<f64>,
    pub total: f64,
    pub time: f64,
}

impl EnergyReport {
    pub fn from_density(grid: GridSpec, density: Vec<f64>, time: f64) -> Self {
        assert_eq!(density.len(), grid.len());
        let mut total = 0.0;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                total += density[grid.idx(i, j)] * grid.trapezoid_weight(i, j);
            }
        }
        EnergyReport { grid, density, total, time }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_bounded_by_sup_times_sqrt_area() {
        let grid = GridSpec::new(9, 9, 0.5, [0.0, 0.0]).unwrap();
        let field: Vec<f64> = (0..grid.len()).map(|k| (k % 7) as f64).collect();
        let rep = ResidualReport::from_field(grid.clone(), field);
        assert!(rep.l2 <= rep.sup * grid.area().sqrt() + 1e-12);
    }
}
