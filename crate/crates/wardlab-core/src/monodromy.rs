//! Transport along the plane's line family.
//!
//! For a line iota(u) = (cos th * u + x0, sin th * u + y0) at fixed time, the
//! transport solves F'(u) = -K(u) F with
//!
//!   K = (1 + cos th)/2 * Lx + sin th / 2 * (Ly + Lt),
//!
//! F(-inf) = I. The monodromy matrix M = F(+inf) is the identity exactly for
//! the fields this crate's constructors produce; its deviation from the
//! identity is the computable criterion the other diagnostics gate on.
//!
//! Truncated mode integrates u in [-L, L]; the coefficient decays like 1/u^2,
//! so the deviation floor scales like 1/L. Compactified mode substitutes
//! u = tan(s/2) and integrates the bounded transformed coefficient over the
//! full circle, which removes the truncation floor entirely. For accuracy the
//! compactified chart is centered at the line's closest approach to the
//! origin; the path-ordered product over the whole line does not depend on
//! that choice.

use crate::analytic::ScalarSource;
use crate::cmatrix::{polar_unitary, C64, CMatrix};
use crate::error::{Error, Result};
use crate::field::{FieldSource, MatrixField};
use crate::grid::GridSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameter value standing in for u = +/- infinity on the compactified
/// circle; the transformed coefficient has a finite limit there.
const U_CLAMP: f64 = 1e8;

/// Step-doubling stops when the monodromy matrix moves less than this.
pub const STEP_DOUBLING_TOL: f64 = 1e-8;

/// An oriented line in a constant-time plane.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Line {
    pub theta: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Line {
    pub fn new(theta: f64, x0: f64, y0: f64) -> Result<Self> {
        if !(theta.is_finite() && x0.is_finite() && y0.is_finite()) {
            return Err(Error::Config("line parameters must be finite".into()));
        }
        Ok(Line { theta: theta.rem_euclid(2.0 * PI), x0, y0 })
    }

    #[inline]
    pub fn point(&self, u: f64) -> (f64, f64) {
        (self.theta.cos() * u + self.x0, self.theta.sin() * u + self.y0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TransportMode {
    Truncated { half_length: f64 },
    Compactified { n_nodes: usize },
}

impl TransportMode {
    pub fn label(&self) -> String {
        match self {
            TransportMode::Truncated { half_length } => format!("truncated({half_length})"),
            TransportMode::Compactified { .. } => "compactified".to_string(),
        }
    }

    pub fn resolution(&self) -> f64 {
        match self {
            TransportMode::Truncated { half_length } => *half_length,
            TransportMode::Compactified { n_nodes } => *n_nodes as f64,
        }
    }
}

/// Result of one line transport.
#[derive(Clone, Debug)]
pub struct TransportResult {
    pub m: CMatrix,
    /// Frobenius distance of M from the identity.
    pub deviation: f64,
    pub mode: TransportMode,
    /// Step-doubling difference plus, in truncated mode, the 1/L tail bound.
    pub self_error: f64,
    pub steps: usize,
}

fn transport_generator(source: &FieldSource, theta: f64, t: f64) -> impl Fn(f64, f64) -> Result<CMatrix> + '_ {
    let (ct, st) = (theta.cos(), theta.sin());
    let a = 0.5 * (1.0 + ct);
    let b = 0.5 * st;
    move |x: f64, y: f64| {
        let cur = source.currents_at(x, y, t)?;
        let mut k = cur.lx.scale(C64::new(a, 0.0));
        k.add_scaled_assign(C64::new(b, 0.0), &cur.ly);
        k.add_scaled_assign(C64::new(b, 0.0), &cur.lt);
        Ok(k)
    }
}

/// Classical RK4 for F' = -K(s) F over [a, b] with n fixed steps.
fn integrate(k: &impl Fn(f64) -> Result<CMatrix>, a: f64, b: f64, n: usize, dim: usize) -> Result<CMatrix> {
    let mut f = CMatrix::identity(dim);
    let h = (b - a) / n as f64;
    let mut s = a;
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    for _ in 0..n {
        let k1 = k(s)?.mul(&f).scale(C64::new(-1.0, 0.0));
        let mut y = f.clone();
        y.add_scaled_assign(half, &k1);
        let km = k(s + 0.5 * h)?;
        let k2 = km.mul(&y).scale(C64::new(-1.0, 0.0));
        let mut y = f.clone();
        y.add_scaled_assign(half, &k2);
        let k3 = km.mul(&y).scale(C64::new(-1.0, 0.0));
        let mut y = f.clone();
        y.add_scaled_assign(full, &k3);
        let k4 = k(s + h)?.mul(&y).scale(C64::new(-1.0, 0.0));
        let w = h / 6.0;
        f.add_scaled_assign(C64::new(w, 0.0), &k1);
        f.add_scaled_assign(C64::new(2.0 * w, 0.0), &k2);
        f.add_scaled_assign(C64::new(2.0 * w, 0.0), &k3);
        f.add_scaled_assign(C64::new(w, 0.0), &k4);
        s += h;
    }
    Ok(f)
}

fn integrate_doubling(
    k: &impl Fn(f64) -> Result<CMatrix>,
    a: f64,
    b: f64,
    n0: usize,
    dim: usize,
) -> Result<(CMatrix, f64, usize)> {
    let mut n = n0.max(64);
    if n % 2 == 1 {
        n += 1;
    }
    let mut m = integrate(k, a, b, n, dim)?;
    loop {
        let m2 = integrate(k, a, b, 2 * n, dim)?;
        let diff = m2.sub(&m).frobenius_norm();
        n *= 2;
        m = m2;
        if diff < STEP_DOUBLING_TOL || n >= (1 << 21) {
            return Ok((m, diff, n));
        }
    }
}

/// Solve the transport along one line and return the monodromy matrix.
pub fn transport(source: &FieldSource, line: &Line, t: f64, mode: TransportMode) -> Result<TransportResult> {
    let dim = source.dim();
    let gen = transport_generator(source, line.theta, t);
    let check = |u: f64, m: CMatrix| -> Result<CMatrix> {
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::NonFiniteCoefficient { u })
        }
    };
    match mode {
        TransportMode::Truncated { half_length } => {
            if !(half_length > 0.0) {
                return Err(Error::Config("truncated transport needs a positive half length".into()));
            }
            let l = half_length;
            let ku = |u: f64| {
                let (x, y) = line.point(u);
                check(u, gen(x, y)?)
            };
            let n0 = ((8.0 * l) as usize).max(512);
            let (m, step_diff, steps) = integrate_doubling(&ku, -l, l, n0, dim)?;
            let tail = (ku(-l)?.sup_norm() + ku(l)?.sup_norm()) * l;
            let deviation = m.sub(&CMatrix::identity(dim)).frobenius_norm();
            Ok(TransportResult { m, deviation, mode, self_error: step_diff + tail, steps })
        }
        TransportMode::Compactified { n_nodes } => {
            // re-center the chart on the foot of the perpendicular from the
            // origin; same path-ordered product, far better resolution of
            // the field core
            let (ct, st) = (line.theta.cos(), line.theta.sin());
            let shift = -(line.x0 * ct + line.y0 * st);
            let (fx, fy) = line.point(shift);
            let ks = |s: f64| {
                let half = 0.5 * s;
                let u = if half.cos().abs() < 1.0 / U_CLAMP {
                    half.sin().signum() * U_CLAMP
                } else {
                    half.tan().clamp(-U_CLAMP, U_CLAMP)
                };
                let jac = 0.5 * (1.0 + u * u);
                let m = gen(fx + ct * u, fy + st * u)?.scale(C64::new(jac, 0.0));
                check(u, m)
            };
            let (m, step_diff, steps) = integrate_doubling(&ks, -PI, PI, n_nodes.max(64), dim)?;
            let deviation = m.sub(&CMatrix::identity(dim)).frobenius_norm();
            Ok(TransportResult { m, deviation, mode, self_error: step_diff, steps })
        }
    }
}

/// One row of a monodromy sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub x0: f64,
    pub y0: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub mode: TransportMode,
}

/// Deviation of the line monodromy from the identity over a family of lines.
pub fn null_monodromy_sweep(
    source: &FieldSource,
    t: f64,
    thetas: &[f64],
    offsets: &[(f64, f64)],
    mode: TransportMode,
) -> Result<SweepReport> {
    let mut lines = Vec::new();
    for &theta in thetas {
        for &(x0, y0) in offsets {
            lines.push(Line::new(theta, x0, y0)?);
        }
    }
    let results: Vec<Result<SweepRow>> = lines
        .par_iter()
        .map(|line| {
            let r = transport(source, line, t, mode)?;
            Ok(SweepRow { theta: line.theta, x0: line.x0, y0: line.y0, deviation: r.deviation })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let mean_deviation = rows.iter().map(|r| r.deviation).sum::<f64>() / rows.len().max(1) as f64;
    Ok(SweepReport { rows, max_deviation, mean_deviation, mode })
}

/// Uniformly spaced sweep angles in [0, 2 pi).
pub fn sweep_thetas(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Default gate for the frame construction.
pub const FRAME_GATE: f64 = 1e-2;

/// Default circle resolution for frame transports.
pub const FRAME_NODES: usize = 512;

/// Probes the monodromy for direction `theta` with a handful of lines across
/// the grid; the frame field is only well defined below the gate.
fn gate_check(source: &FieldSource, theta: f64, grid: &GridSpec, t: f64, gate: f64, n_nodes: usize) -> Result<()> {
    let cx = 0.5 * (grid.origin[0] + grid.x_max());
    let cy = 0.5 * (grid.origin[1] + grid.y_max());
    let r = 0.5 * (grid.x_max() - grid.origin[0]).min(grid.y_max() - grid.origin[1]);
    let (ps, pc) = (-theta.sin(), theta.cos());
    let mut measured = 0.0f64;
    for p in [-0.5 * r, -0.25 * r, 0.0, 0.25 * r, 0.5 * r] {
        let line = Line::new(theta, cx + p * ps, cy + p * pc)?;
        let res = transport(source, &line, t, TransportMode::Compactified { n_nodes })?;
        measured = measured.max(res.deviation);
    }
    if measured > gate {
        return Err(Error::MonodromyGate { measured, gate, theta });
    }
    Ok(())
}

/// Solves the direction-theta transport on the line through every grid node,
/// with F = I at the far end, and returns J_theta(node) = F(node).
///
/// The integration runs on the compactified circle from s = -pi to the node's
/// chart coordinate; for unitary sources the result is polar-projected, since
/// the generator is anti-hermitian and the exact flow unitary.
pub fn frame_field(
    source: &FieldSource,
    theta: f64,
    grid: &GridSpec,
    t: f64,
    gate: f64,
    n_nodes: usize,
) -> Result<MatrixField> {
    gate_check(source, theta, grid, t, gate, n_nodes)?;
    let dim = source.dim();
    let gen = transport_generator(source, theta, t);
    let (ct, st) = (theta.cos(), theta.sin());
    let unitary = source.unitary();

    let results: Vec<Result<CMatrix>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let (x, y) = grid.node(i, j);
            // chart centered at the foot of the perpendicular from the origin
            let u_node = x * ct + y * st;
            let (fx, fy) = (x - u_node * ct, y - u_node * st);
            let s_node = 2.0 * u_node.atan();
            let ks = |s: f64| {
                let half = 0.5 * s;
                let u = if half.cos().abs() < 1.0 / U_CLAMP {
                    half.sin().signum() * U_CLAMP
                } else {
                    half.tan().clamp(-U_CLAMP, U_CLAMP)
                };
                let jac = 0.5 * (1.0 + u * u);
                let m = gen(fx + ct * u, fy + st * u)?.scale(C64::new(jac, 0.0));
                if m.is_finite() {
                    Ok(m)
                } else {
                    Err(Error::NonFiniteCoefficient { u })
                }
            };
            let frac = (s_node + PI) / (2.0 * PI);
            let n = ((n_nodes as f64 * frac).ceil() as usize).max(8);
            let f = integrate(&ks, -PI, s_node, n, dim)?;
            if unitary {
                polar_unitary(&f)
            } else {
                Ok(f)
            }
        })
        .collect();
    let mut data = Vec::with_capacity(grid.len());
    for r in results {
        data.push(r?);
    }
    MatrixField::from_data(grid.clone(), dim, t, unitary, data)
}

/// Line-integral diagnostics of a scalar field.
#[derive(Clone, Debug, Serialize)]
pub struct RadonReport {
    /// integral of (1 + cos th) j_x + sin th (j_y + j_t) along the line
    pub i_total: f64,
    /// integral of cos th j_x + sin th j_y (a perfect derivative)
    pub i_fund: f64,
    /// d/dt of the line integral of j, by centered difference
    pub dt_radon: f64,
    pub truncation_warning: bool,
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Default truncation for the time-derivative Radon integral.
const RADON_HALF_LENGTH: f64 = 400.0;

/// Radon-transform diagnostics for a scalar source along one line.
///
/// `dt_radon` always uses a truncated centered difference of the line
/// integral of j itself: the integral may diverge logarithmically for slowly
/// decaying sources, but the divergence is time independent and cancels in
/// the difference.
pub fn radon_u1(
    scalar: &ScalarSource,
    theta: f64,
    base: (f64, f64),
    t: f64,
    mode: TransportMode,
) -> Result<RadonReport> {
    let line = Line::new(theta, base.0, base.1)?;
    let (ct, st) = (line.theta.cos(), line.theta.sin());
    let total_integrand = |u: f64, tt: f64| {
        let (x, y) = line.point(u);
        let s = scalar.jet(x, y, tt);
        (1.0 + ct) * s.jx + st * (s.jy + s.jt)
    };
    let fund_integrand = |u: f64| {
        let (x, y) = line.point(u);
        let s = scalar.jet(x, y, t);
        ct * s.jx + st * s.jy
    };
    let (i_total, i_fund, l_probe, n_probe) = match mode {
        TransportMode::Truncated { half_length } => {
            if !(half_length > 0.0) {
                return Err(Error::Config("truncated radon needs a positive half length".into()));
            }
            let l = half_length;
            let n = ((16.0 * l) as usize).clamp(4096, 400_000);
            (
                simpson(&|u| total_integrand(u, t), -l, l, n),
                simpson(&fund_integrand, -l, l, n),
                l,
                n,
            )
        }
        TransportMode::Compactified { n_nodes } => {
            let n = n_nodes.max(4096);
            let sub = |f: &dyn Fn(f64) -> f64| {
                simpson(
                    &|s: f64| {
                        let half = 0.5 * s;
                        let u = if half.cos().abs() < 1.0 / U_CLAMP {
                            half.sin().signum() * U_CLAMP
                        } else {
                            half.tan().clamp(-U_CLAMP, U_CLAMP)
                        };
                        f(u) * 0.5 * (1.0 + u * u)
                    },
                    -PI,
                    PI,
                    n,
                )
            };
            (
                sub(&|u| total_integrand(u, t)),
                sub(&fund_integrand),
                RADON_HALF_LENGTH,
                ((16.0 * RADON_HALF_LENGTH) as usize).min(400_000),
            )
        }
    };
    let dt = 1e-4;
    let radon_at = |tt: f64| {
        simpson(
            &|u: f64| {
                let (x, y) = line.point(u);
                scalar.jet(x, y, tt).j
            },
            -l_probe,
            l_probe,
            n_probe,
        )
    };
    let dt_radon = (radon_at(t + dt) - radon_at(t - dt)) / (2.0 * dt);
    let warn = total_integrand(-l_probe, t).abs().max(total_integrand(l_probe, t).abs()) > 1e-9;
    Ok(RadonReport { i_total, i_fund, dt_radon, truncation_warning: warn })
}
