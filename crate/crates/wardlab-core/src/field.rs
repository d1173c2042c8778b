//! Matrix-valued fields: grid storage, analytic sources with derivative
//! hooks, sampled trajectories with interpolation, and the current fields
//! L_mu = J^{-1} d_mu J that every diagnostic is built from.

use crate::cmatrix::{polar_unitary, C64, CMatrix};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scheme::Scheme;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Unitarity gate on stored fields: max node sup-norm of (J^dag J - I).
pub const UNITARY_TOL: f64 = 1e-10;

/// Step for fallback centered differences on analytic sources that do not
/// provide exact derivatives.
pub const ANALYTIC_FD_STEP: f64 = 1e-4;

/// Nearest unitary in Frobenius norm (polar factor), determinant phase kept.
pub fn unitarize(m: &CMatrix) -> Result<CMatrix> {
    polar_unitary(m)
}

/// A matrix-valued field on one time slice.
#[derive(Clone, Debug)]
pub struct MatrixField {
    pub grid: GridSpec,
    pub n: usize,
    pub t: f64,
    pub unitary: bool,
    data: Vec<CMatrix>,
}

impl MatrixField {
    pub fn from_fn(
        grid: GridSpec,
        n: usize,
        t: f64,
        unitary: bool,
        f: impl Fn(f64, f64) -> CMatrix + Sync,
    ) -> Self {
        let data: Vec<CMatrix> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                let (x, y) = grid.node(i, j);
                f(x, y)
            })
            .collect();
        MatrixField { grid, n, t, unitary, data }
    }

    pub fn constant(grid: GridSpec, m: CMatrix, t: f64, unitary: bool) -> Self {
        let n = m.dim();
        let data = vec![m; grid.len()];
        MatrixField { grid, n, t, unitary, data }
    }

    pub fn from_data(grid: GridSpec, n: usize, t: f64, unitary: bool, data: Vec<CMatrix>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Config(format!(
                "field data length {} does not match grid {}x{}",
                data.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(MatrixField { grid, n, t, unitary, data })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &CMatrix {
        &self.data[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CMatrix {
        let idx = self.grid.idx(i, j);
        &mut self.data[idx]
    }

    pub fn data(&self) -> &[CMatrix] {
        &self.data
    }

    pub fn max_sup_norm(&self) -> f64 {
        self.data.iter().map(|m| m.sup_norm()).fold(0.0, f64::max)
    }

    /// Checks finiteness and, if flagged unitary, the UNITARY_TOL gate.
    /// Reports the worst node on failure.
    pub fn validate(&self) -> Result<()> {
        let mut worst = (0usize, 0usize, 0.0f64);
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let m = self.at(i, j);
                if !m.is_finite() {
                    return Err(Error::Invariant(format!("non-finite entry at node ({i},{j})")));
                }
                if self.unitary {
                    let d = m.unitary_defect();
                    if d > worst.2 {
                        worst = (i, j, d);
                    }
                }
            }
        }
        if self.unitary && worst.2 > UNITARY_TOL {
            return Err(Error::Invariant(format!(
                "unitarity defect {:.3e} at node ({},{}) exceeds {UNITARY_TOL:.0e}",
                worst.2, worst.0, worst.1
            )));
        }
        Ok(())
    }
}

/// Exact point values of J and its first derivatives.
pub struct FieldJet {
    pub j: CMatrix,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jt: CMatrix,
}

/// The currents L_mu = J^{-1} d_mu J at one point.
pub struct PointCurrents {
    pub lx: CMatrix,
    pub ly: CMatrix,
    pub lt: CMatrix,
}

impl FieldJet {
    pub fn currents(&self) -> Result<PointCurrents> {
        let jinv = self.j.inverse()?;
        Ok(PointCurrents {
            lx: jinv.mul(&self.jx),
            ly: jinv.mul(&self.jy),
            lt: jinv.mul(&self.jt),
        })
    }
}

/// A field J(x, y, t) evaluable anywhere, with first-derivative hooks.
pub trait AnalyticField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: f64, y: f64, t: f64) -> CMatrix;

    /// Value plus exact first derivatives. The default falls back to
    /// small-step centered differences of `eval`.
    fn jet(&self, x: f64, y: f64, t: f64) -> FieldJet {
        let e = ANALYTIC_FD_STEP;
        let d = |fa: CMatrix, fb: CMatrix| fa.sub(&fb).scale(C64::new(0.5 / e, 0.0));
        FieldJet {
            j: self.eval(x, y, t),
            jx: d(self.eval(x + e, y, t), self.eval(x - e, y, t)),
            jy: d(self.eval(x, y + e, t), self.eval(x, y - e, t)),
            jt: d(self.eval(x, y, t + e), self.eval(x, y, t - e)),
        }
    }

    /// Currents at a point; constructors with closed-form currents override.
    fn currents_at(&self, x: f64, y: f64, t: f64) -> Result<PointCurrents> {
        self.jet(x, y, t).currents()
    }

    fn unitary(&self) -> bool {
        true
    }

    fn special_unitary(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterpOrder {
    Linear,
    Cubic,
}

/// An ordered trajectory of slices on one grid at uniform time steps,
/// sampled by tensor-product interpolation inside its space-time hull.
pub struct SampledField {
    slices: Vec<MatrixField>,
    t0: f64,
    dt: f64,
    order: InterpOrder,
    n: usize,
    unitary: bool,
}

impl SampledField {
    pub fn new(slices: Vec<MatrixField>, order: InterpOrder) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::Config("sampled source needs at least one slice".into()));
        }
        let grid = slices[0].grid.clone();
        let n = slices[0].n;
        let unitary = slices[0].unitary;
        let t0 = slices[0].t;
        let dt = if slices.len() > 1 { slices[1].t - slices[0].t } else { 0.0 };
        if slices.len() > 1 && !(dt > 0.0) {
            return Err(Error::Config("slice times must strictly increase".into()));
        }
        for (k, s) in slices.iter().enumerate() {
            if s.grid != grid || s.n != n {
                return Err(Error::Config(format!("slice {k} disagrees on grid or matrix size")));
            }
            let expect = t0 + k as f64 * dt;
            if (s.t - expect).abs() > 1e-9 * (1.0 + dt.abs()) {
                return Err(Error::Config(format!(
                    "slice {k} at t = {} breaks the uniform step {dt}",
                    s.t
                )));
            }
        }
        Ok(SampledField { slices, t0, dt, order, n, unitary })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.slices[0].grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + (self.slices.len() - 1) as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slice(&self, k: usize) -> &MatrixField {
        &self.slices[k]
    }

    pub fn slices(&self) -> &[MatrixField] {
        &self.slices
    }

    pub fn order(&self) -> InterpOrder {
        self.order
    }

    fn hull_text(&self) -> String {
        let g = self.grid();
        format!(
            "[{}, {}] x [{}, {}] x [{}, {}]",
            g.origin[0],
            g.x_max(),
            g.origin[1],
            g.y_max(),
            self.t0,
            self.t_end()
        )
    }

    /// Axis lookup: cell index and local coordinate, snapping to nodes.
    fn locate(u: f64, count: usize) -> Option<(usize, f64)> {
        let eps = 1e-9;
        if u < -eps || u > (count - 1) as f64 + eps {
            return None;
        }
        let near = u.round();
        if (u - near).abs() < eps {
            let i = (near.max(0.0) as usize).min(count - 1);
            return Some((i, -1.0)); // -1 marks "exactly on node i"
        }
        let i = (u.floor().max(0.0) as usize).min(count - 2);
        Some((i, u - i as f64))
    }

    fn axis_weights(order: InterpOrder, i: usize, s: f64, count: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if s < 0.0 {
            out.push((i, 1.0));
            return;
        }
        match order {
            InterpOrder::Linear => {
                out.push((i, 1.0 - s));
                out.push((i + 1, s));
            }
            InterpOrder::Cubic => {
                // Catmull-Rom weights; edge cells clamp the outer index.
                let s2 = s * s;
                let s3 = s2 * s;
                let w = [
                    0.5 * (-s3 + 2.0 * s2 - s),
                    0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
                    0.5 * (-3.0 * s3 + 4.0 * s2 + s),
                    0.5 * (s3 - s2),
                ];
                let idx = |k: isize| -> usize {
                    let raw = i as isize + k;
                    raw.clamp(0, count as isize - 1) as usize
                };
                for (k, wk) in (-1..=2).zip(w) {
                    out.push((idx(k), wk));
                }
            }
        }
    }

    pub fn sample(&self, x: f64, y: f64, t: f64) -> Result<CMatrix> {
        let g = self.grid();
        let ux = (x - g.origin[0]) / g.h;
        let uy = (y - g.origin[1]) / g.h;
        let ut = if self.slices.len() > 1 { (t - self.t0) / self.dt } else { 0.0 };
        let out_of_hull = || {
            Error::Domain(format!(
                "sample at ({x}, {y}, {t}) leaves the sampled hull {}",
                self.hull_text()
            ))
        };
        if self.slices.len() == 1 && (t - self.t0).abs() > 1e-9 {
            return Err(out_of_hull());
        }
        let (ix, sx) = Self::locate(ux, g.nx).ok_or_else(out_of_hull)?;
        let (iy, sy) = Self::locate(uy, g.ny).ok_or_else(out_of_hull)?;
        let (it, st) = Self::locate(ut, self.slices.len()).ok_or_else(out_of_hull)?;

        if sx < 0.0 && sy < 0.0 && st < 0.0 {
            return Ok(self.slices[it].at(ix, iy).clone());
        }

        let mut wx = Vec::with_capacity(4);
        let mut wy = Vec::with_capacity(4);
        let mut wt = Vec::with_capacity(4);
        Self::axis_weights(self.order, ix, sx, g.nx, &mut wx);
        Self::axis_weights(self.order, iy, sy, g.ny, &mut wy);
        Self::axis_weights(self.order, it, st, self.slices.len(), &mut wt);

        let mut acc = CMatrix::zeros(self.n);
        for &(kt, vt) in &wt {
            let slice = &self.slices[kt];
            for &(ky, vy) in &wy {
                for &(kx, vx) in &wx {
                    acc.add_scaled_assign(C64::new(vt * vy * vx, 0.0), slice.at(kx, ky));
                }
            }
        }
        if self.unitary {
            acc = polar_unitary(&acc)?;
        }
        Ok(acc)
    }

    /// Centered differences with the grid's own steps; the time stencil
    /// falls back to a second-order one-sided form at the trajectory ends.
    pub fn currents_at(&self, x: f64, y: f64, t: f64) -> Result<PointCurrents> {
        let g = self.grid();
        let h = g.h;
        let j = self.sample(x, y, t)?;
        let jinv = j.inverse()?;
        let half = C64::new(0.5 / h, 0.0);
        let jx = self.sample(x + h, y, t)?.sub(&self.sample(x - h, y, t)?).scale(half);
        let jy = self.sample(x, y + h, t)?.sub(&self.sample(x, y - h, t)?).scale(half);
        let jt = self.time_derivative(x, y, t)?;
        Ok(PointCurrents {
            lx: jinv.mul(&jx),
            ly: jinv.mul(&jy),
            lt: jinv.mul(&jt),
        })
    }

    fn time_derivative(&self, x: f64, y: f64, t: f64) -> Result<CMatrix> {
        if self.slices.len() < 3 {
            return Err(Error::Domain(format!(
                "time derivative needs at least 3 slices, trajectory has {}",
                self.slices.len()
            )));
        }
        let dt = self.dt;
        let lo = self.t0;
        let hi = self.t_end();
        let half = C64::new(0.5 / dt, 0.0);
        if t - dt >= lo - 1e-12 && t + dt <= hi + 1e-12 {
            Ok(self.sample(x, y, t + dt)?.sub(&self.sample(x, y, t - dt)?).scale(half))
        } else if t - dt < lo - 1e-12 {
            // (-3 f0 + 4 f1 - f2) / (2 dt)
            let f0 = self.sample(x, y, t)?;
            let f1 = self.sample(x, y, t + dt)?;
            let f2 = self.sample(x, y, t + 2.0 * dt)?;
            let mut out = f0.scale(C64::new(-3.0, 0.0));
            out.add_scaled_assign(C64::new(4.0, 0.0), &f1);
            out.add_scaled_assign(C64::new(-1.0, 0.0), &f2);
            Ok(out.scale(half))
        } else {
            let f0 = self.sample(x, y, t)?;
            let f1 = self.sample(x, y, t - dt)?;
            let f2 = self.sample(x, y, t - 2.0 * dt)?;
            let mut out = f0.scale(C64::new(3.0, 0.0));
            out.add_scaled_assign(C64::new(-4.0, 0.0), &f1);
            out.add_scaled_assign(C64::new(1.0, 0.0), &f2);
            Ok(out.scale(half))
        }
    }
}

/// The universal input to the diagnostics: an exact constructor or a
/// sampled trajectory.
#[derive(Clone)]
pub enum FieldSource {
    Analytic(Arc<dyn AnalyticField>),
    Sampled(Arc<SampledField>),
}

impl FieldSource {
    pub fn analytic(f: impl AnalyticField + 'static) -> Self {
        FieldSource::Analytic(Arc::new(f))
    }

    pub fn dim(&self) -> usize {
        match self {
            FieldSource::Analytic(a) => a.dim(),
            FieldSource::Sampled(s) => s.n,
        }
    }

    pub fn unitary(&self) -> bool {
        match self {
            FieldSource::Analytic(a) => a.unitary(),
            FieldSource::Sampled(s) => s.unitary,
        }
    }

    pub fn sample(&self, x: f64, y: f64, t: f64) -> Result<CMatrix> {
        if !(x.is_finite() && y.is_finite() && t.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample point ({x}, {y}, {t})")));
        }
        match self {
            FieldSource::Analytic(a) => Ok(a.eval(x, y, t)),
            FieldSource::Sampled(s) => s.sample(x, y, t),
        }
    }

    pub fn currents_at(&self, x: f64, y: f64, t: f64) -> Result<PointCurrents> {
        match self {
            FieldSource::Analytic(a) => a.currents_at(x, y, t),
            FieldSource::Sampled(s) => s.currents_at(x, y, t),
        }
    }

    /// Materialize one slice on a grid.
    pub fn slice(&self, grid: &GridSpec, t: f64) -> Result<MatrixField> {
        let n = self.dim();
        let results: Vec<Result<CMatrix>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                let (x, y) = grid.node(i, j);
                self.sample(x, y, t)
            })
            .collect();
        let mut data = Vec::with_capacity(results.len());
        for r in results {
            data.push(r?);
        }
        MatrixField::from_data(grid.clone(), n, t, self.unitary(), data)
    }
}

/// The Lie-algebra current fields on one grid slice.
pub struct CurrentSet {
    pub lx: MatrixField,
    pub ly: MatrixField,
    pub lt: MatrixField,
}

impl CurrentSet {
    /// Anti-hermiticity gate: sup(L + L^dag) <= 1e-8 (1 + sup L) per field.
    pub fn validate_anti_hermitian(&self) -> Result<()> {
        for (name, f) in [("Lx", &self.lx), ("Ly", &self.ly), ("Lt", &self.lt)] {
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for m in f.data() {
                worst = worst.max(m.add(&m.conj_transpose()).sup_norm());
                scale = scale.max(m.sup_norm());
            }
            if worst > 1e-8 * (1.0 + scale) {
                return Err(Error::Invariant(format!(
                    "{name} anti-hermiticity defect {worst:.3e} exceeds 1e-8 (1 + {scale:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Tracelessness gate for special-unitary sources.
    pub fn validate_traceless(&self) -> Result<()> {
        for (name, f) in [("Lx", &self.lx), ("Ly", &self.ly), ("Lt", &self.lt)] {
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for m in f.data() {
                worst = worst.max(m.trace().norm());
                scale = scale.max(m.sup_norm());
            }
            if worst > 1e-8 * (1.0 + scale) {
                return Err(Error::Invariant(format!(
                    "{name} trace defect {worst:.3e} exceeds tolerance"
                )));
            }
        }
        Ok(())
    }
}

/// L_mu = J^{-1} D_mu J on a grid slice. Spatial derivatives are central
/// differences of the chosen order; the time derivative uses the exact hook
/// of analytic sources and the trajectory step of sampled ones.
pub fn currents(source: &FieldSource, grid: &GridSpec, t: f64, scheme: Scheme) -> Result<CurrentSet> {
    let pad = scheme.radius();
    let padded = grid.padded(pad)?;
    let j = source.slice(&padded, t)?;
    let n = source.dim();
    let stencil = scheme.first_derivative();
    let inv_h = 1.0 / grid.h;

    // time samples for sampled sources
    let time_slices: Option<(MatrixField, MatrixField)> = match source {
        FieldSource::Analytic(_) => None,
        FieldSource::Sampled(s) => {
            let dt = s.dt();
            if dt <= 0.0 {
                return Err(Error::Domain("single-slice source has no time derivative".into()));
            }
            Some((source.slice(grid, t - dt)?, source.slice(grid, t + dt)?))
        }
    };

    let rows: Vec<Result<(CMatrix, CMatrix, CMatrix)>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j0) = (idx % grid.nx, idx / grid.nx);
            let (pi, pj) = (i + pad, j0 + pad);
            let jc = j.at(pi, pj);
            let jinv = jc.inverse()?;
            let mut dx = CMatrix::zeros(n);
            let mut dy = CMatrix::zeros(n);
            for &(k, w) in stencil {
                let w = C64::new(w * inv_h, 0.0);
                dx.add_scaled_assign(w, j.at((pi as isize + k) as usize, pj));
                dy.add_scaled_assign(w, j.at(pi, (pj as isize + k) as usize));
            }
            let lx = jinv.mul(&dx);
            let ly = jinv.mul(&dy);
            let lt = match (&time_slices, source) {
                (Some((before, after)), FieldSource::Sampled(s)) => {
                    let half = C64::new(0.5 / s.dt(), 0.0);
                    let dt_j = after.at(i, j0).sub(before.at(i, j0)).scale(half);
                    jinv.mul(&dt_j)
                }
                _ => {
                    let (x, y) = grid.node(i, j0);
                    source.currents_at(x, y, t)?.lt
                }
            };
            Ok((lx, ly, lt))
        })
        .collect();

    let mut lx = Vec::with_capacity(grid.len());
    let mut ly = Vec::with_capacity(grid.len());
    let mut lt = Vec::with_capacity(grid.len());
    for r in rows {
        let (a, b, c) = r?;
        lx.push(a);
        ly.push(b);
        lt.push(c);
    }
    Ok(CurrentSet {
        lx: MatrixField::from_data(grid.clone(), n, t, false, lx)?,
        ly: MatrixField::from_data(grid.clone(), n, t, false, ly)?,
        lt: MatrixField::from_data(grid.clone(), n, t, false, lt)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{ConstantField, DiagPhaseField};

    #[test]
    fn constant_source_samples_identity() {
        let src = FieldSource::analytic(ConstantField::new(CMatrix::identity(2)).unwrap());
        let m = src.sample(3.4, -1.2, 0.7).unwrap();
        assert_eq!(m, CMatrix::identity(2));
    }

    #[test]
    fn diag_phase_closed_form_sample() {
        let src = FieldSource::analytic(DiagPhaseField::new(1.0));
        let m = src.sample(0.5, 0.0, 0.0).unwrap();
        let expect = C64::new(0.0, 0.5).exp();
        assert!((m[(0, 0)] - expect).norm() < 1e-15);
        assert!((m[(1, 1)] - expect.conj()).norm() < 1e-15);
    }

    #[test]
    fn currents_of_identity_vanish() {
        let grid = GridSpec::new(9, 9, 0.25, [-1.0, -1.0]).unwrap();
        let src = FieldSource::analytic(ConstantField::new(CMatrix::identity(2)).unwrap());
        let cs = currents(&src, &grid, 0.0, Scheme::Order2).unwrap();
        assert_eq!(cs.lx.max_sup_norm(), 0.0);
        assert_eq!(cs.ly.max_sup_norm(), 0.0);
        assert_eq!(cs.lt.max_sup_norm(), 0.0);
    }

    #[test]
    fn diag_phase_currents_match_sin_formula() {
        let a = 1.0;
        let grid = GridSpec::new(9, 9, 0.1, [-0.4, -0.4]).unwrap();
        let src = FieldSource::analytic(DiagPhaseField::new(a));
        let cs = currents(&src, &grid, 0.0, Scheme::Order2).unwrap();
        let expect = (a * grid.h).sin() / grid.h;
        for m in cs.lx.data() {
            assert!((m[(0, 0)] - C64::new(0.0, expect)).norm() < 1e-14);
            assert!((m[(1, 1)] - C64::new(0.0, -expect)).norm() < 1e-14);
        }
        cs.validate_anti_hermitian().unwrap();
        cs.validate_traceless().unwrap();
        // relative error of the order-2 stencil is (ah)^2/6
        let rel = ((expect - a) / a).abs();
        assert!((rel - (a * grid.h).powi(2) / 6.0).abs() < 1e-5);
    }

    #[test]
    fn order4_richardson_slope() {
        // halving h twice must show observed order in [3.7, 4.3]
        let a = 1.0;
        let src = FieldSource::analytic(DiagPhaseField::new(a));
        let mut errs = Vec::new();
        for h in [0.2, 0.1, 0.05] {
            let grid = GridSpec::new(9, 9, h, [-0.1, -0.1]).unwrap();
            let cs = currents(&src, &grid, 0.0, Scheme::Order4).unwrap();
            let m = cs.lx.at(4, 4);
            errs.push((m[(0, 0)] - C64::new(0.0, a)).norm());
        }
        let p1 = (errs[0] / errs[1]).log2();
        let p2 = (errs[1] / errs[2]).log2();
        for p in [p1, p2] {
            assert!((3.7..=4.3).contains(&p), "observed order {p}");
        }
    }

    #[test]
    fn sampled_cubic_matches_closed_form_off_node() {
        let grid = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 0.1).unwrap();
        let analytic = FieldSource::analytic(DiagPhaseField::new(1.0));
        let slices: Vec<MatrixField> = (0..3)
            .map(|k| analytic.slice(&grid, k as f64 * 0.1).unwrap())
            .collect();
        let sampled = SampledField::new(slices, InterpOrder::Cubic).unwrap();
        let q = (0.234, -0.417, 0.13);
        let got = sampled.sample(q.0, q.1, q.2).unwrap();
        let want = analytic.sample(q.0, q.1, q.2).unwrap();
        assert!(got.sub(&want).sup_norm() < 1e-4, "err {}", got.sub(&want).sup_norm());
    }

    #[test]
    fn sampled_exact_at_nodes() {
        let grid = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 0.1).unwrap();
        let analytic = FieldSource::analytic(DiagPhaseField::new(1.0));
        let slices: Vec<MatrixField> = (0..3)
            .map(|k| analytic.slice(&grid, k as f64 * 0.1).unwrap())
            .collect();
        let reference = slices[1].clone();
        let sampled = SampledField::new(slices, InterpOrder::Cubic).unwrap();
        let (x, y) = grid.node(7, 13);
        let got = sampled.sample(x, y, 0.1).unwrap();
        assert_eq!(&got, reference.at(7, 13));
    }

    #[test]
    fn sampled_out_of_hull_is_domain_error() {
        let grid = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 0.25).unwrap();
        let analytic = FieldSource::analytic(DiagPhaseField::new(1.0));
        let slices = vec![analytic.slice(&grid, 0.0).unwrap()];
        let sampled = SampledField::new(slices, InterpOrder::Linear).unwrap();
        let err = sampled.sample(1.5, 0.0, 0.0).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("hull"), "{msg}"),
            other => panic!("expected domain error, got {other}"),
        }
    }
}
