//! Central finite-difference stencils.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Order2,
    Order4,
}

impl Scheme {
    /// Stencil half width.
    pub fn radius(self) -> usize {
        match self {
            Scheme::Order2 => 1,
            Scheme::Order4 => 2,
        }
    }

    /// First-derivative weights as (offset, coefficient/h) pairs.
    pub fn first_derivative(self) -> &'static [(isize, f64)] {
        match self {
            Scheme::Order2 => &[(-1, -0.5), (1, 0.5)],
            Scheme::Order4 => &[
                (-2, 1.0 / 12.0),
                (-1, -8.0 / 12.0),
                (1, 8.0 / 12.0),
                (2, -1.0 / 12.0),
            ],
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2" | "order-2" | "order2" => Ok(Scheme::Order2),
            "4" | "order-4" | "order4" => Ok(Scheme::Order4),
            other => Err(format!("unknown scheme '{other}', expected order-2 or order-4")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_differentiate_polynomials() {
        // f(x) = x^3 is differentiated exactly by the order-4 stencil
        let f = |x: f64| x * x * x;
        let h = 0.1;
        let x0 = 0.7;
        for (scheme, tol) in [(Scheme::Order2, 2e-2), (Scheme::Order4, 1e-13)] {
            let d: f64 = scheme
                .first_derivative()
                .iter()
                .map(|&(k, w)| w * f(x0 + k as f64 * h))
                .sum::<f64>()
                / h;
            assert!((d - 3.0 * x0 * x0).abs() < tol, "{scheme:?}");
        }
    }
}
