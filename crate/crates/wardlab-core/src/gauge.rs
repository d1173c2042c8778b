//! The standard-gauge dictionary J -> (A, Phi), the first-order system
//! residuals, the spectral-parameter family of flat operators, and the
//! fibrewise del-bar operator.
//!
//! In the standard gauge the connection and Higgs field are
//!
//!   Ax = Lx / 2 = -Phi,    Ay = At = (Ly + Lt) / 2,
//!
//! with L_mu = J^{-1} d_mu J. With this sign choice the three first-order
//! residuals
//!
//!   R1 = grad_t Phi + [D_x, D_y]
//!   R2 = grad_x Phi - [D_y, D_t]
//!   R3 = grad_y Phi - [D_t, D_x]
//!
//! vanish exactly on solutions of the field equation, and the whole
//! lambda-family
//!
//!   [ D_zbar + (i lambda/2) D_t - (lambda/2) Phi ,
//!     D_z - (i/2 lambda) D_t - (1/2 lambda) Phi ]  =  0
//!
//! collapses to that single equation. The z-derivative convention is fixed
//! project-wide as d_z = (d_x - i d_y)/2 (see docs/conventions.md).

use crate::cmatrix::{C64, CMatrix};
use crate::error::{Error, Result};
use crate::field::{currents, CurrentSet, FieldSource, MatrixField};
use crate::grid::GridSpec;
use crate::report::ResidualReport;
use crate::scheme::Scheme;
use serde::{Deserialize, Serialize};

/// A nonzero spectral parameter.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LaxPoint {
    pub lambda: C64,
}

impl LaxPoint {
    pub fn new(lambda: C64) -> Result<Self> {
        if lambda.norm() == 0.0 || !lambda.is_finite() {
            return Err(Error::Config("spectral parameter must be nonzero and finite".into()));
        }
        Ok(LaxPoint { lambda })
    }

    pub fn on_equator(&self) -> bool {
        (self.lambda.norm() - 1.0).abs() < 1e-12
    }
}

/// Holomorphic fibre coordinate eta = (z - lambda^2 zbar) / (1 - lambda conj(lambda));
/// degenerates on the equator |lambda| = 1.
pub fn eta_coord(z: C64, lambda: &LaxPoint) -> Result<C64> {
    let l = lambda.lambda;
    let denom = 1.0 - l.norm_sqr();
    if denom.abs() < 1e-14 {
        return Err(Error::Singular(format!(
            "eta denominator 1 - |lambda|^2 vanishes at lambda = {l}"
        )));
    }
    Ok((z - l * l * z.conj()) / C64::new(denom, 0.0))
}

/// Connection components and Higgs field in the standard gauge. The two
/// construction identities Ax = -Phi and Ay = At hold exactly by storage.
pub struct GaugeData {
    pub phi: MatrixField,
    pub ax: MatrixField,
    pub ay: MatrixField,
    pub at: MatrixField,
}

impl GaugeData {
    pub fn grid(&self) -> &GridSpec {
        &self.phi.grid
    }
}

/// The standard-gauge dictionary: Phi = -Lx/2, Ax = Lx/2, Ay = At = (Ly+Lt)/2.
pub fn standard_gauge(cs: &CurrentSet) -> GaugeData {
    let half = C64::new(0.5, 0.0);
    let minus_half = C64::new(-0.5, 0.0);
    let grid = cs.lx.grid.clone();
    let n = cs.lx.n;
    let t = cs.lx.t;
    let len = grid.len();
    let mut phi = Vec::with_capacity(len);
    let mut ax = Vec::with_capacity(len);
    let mut ay = Vec::with_capacity(len);
    for idx in 0..len {
        let lx = &cs.lx.data()[idx];
        phi.push(lx.scale(minus_half));
        ax.push(lx.scale(half));
        let mut b = cs.ly.data()[idx].scale(half);
        b.add_scaled_assign(half, &cs.lt.data()[idx]);
        ay.push(b);
    }
    let ay = MatrixField::from_data(grid.clone(), n, t, false, ay).expect("sized data");
    GaugeData {
        phi: MatrixField::from_data(grid.clone(), n, t, false, phi).expect("sized data"),
        ax: MatrixField::from_data(grid.clone(), n, t, false, ax).expect("sized data"),
        at: ay.clone(),
        ay,
    }
}

/// Gauge data at the centre time (spatially padded) and at the shifted
/// times needed for time derivatives (unpadded).
struct GaugeStack {
    pad: usize,
    centre: GaugeData,
    shifted: Vec<(isize, GaugeData)>,
    ht: f64,
}

fn gauge_stack(source: &FieldSource, grid: &GridSpec, t: f64, scheme: Scheme) -> Result<GaugeStack> {
    let pad = scheme.radius();
    let padded = grid.padded(pad)?;
    let centre = standard_gauge(&currents(source, &padded, t, scheme)?);
    let ht = match source {
        FieldSource::Analytic(_) => grid.h,
        FieldSource::Sampled(s) => s.dt(),
    };
    let mut shifted = Vec::new();
    for &(k, _) in scheme.first_derivative() {
        let cs = currents(source, grid, t + k as f64 * ht, scheme)?;
        shifted.push((k, standard_gauge(&cs)));
    }
    Ok(GaugeStack { pad, centre, shifted, ht })
}

enum Component {
    Phi,
    Ax,
    Ay,
    At,
}

impl GaugeStack {
    fn centre_at(&self, comp: &Component, i: usize, j: usize) -> &CMatrix {
        let f = match comp {
            Component::Phi => &self.centre.phi,
            Component::Ax => &self.centre.ax,
            Component::Ay => &self.centre.ay,
            Component::At => &self.centre.at,
        };
        f.at(i + self.pad, j + self.pad)
    }

    /// Spatial derivative on the unpadded grid; axis 0 = x, 1 = y.
    fn spatial_d(&self, comp: &Component, axis: usize, i: usize, j: usize, scheme: Scheme, h: f64) -> CMatrix {
        let n = self.centre.phi.n;
        let mut out = CMatrix::zeros(n);
        for &(k, w) in scheme.first_derivative() {
            let (ii, jj) = if axis == 0 {
                ((i as isize + k) as usize, j)
            } else {
                (i, (j as isize + k) as usize)
            };
            out.add_scaled_assign(C64::new(w / h, 0.0), self.centre_at(comp, ii, jj));
        }
        out
    }

    fn time_d(&self, comp: &Component, i: usize, j: usize, scheme: Scheme) -> CMatrix {
        let n = self.centre.phi.n;
        let mut out = CMatrix::zeros(n);
        for ((k, w), (ks, g)) in scheme.first_derivative().iter().zip(self.shifted.iter()) {
            debug_assert_eq!(k, ks);
            let f = match comp {
                Component::Phi => &g.phi,
                Component::Ax => &g.ax,
                Component::Ay => &g.ay,
                Component::At => &g.at,
            };
            out.add_scaled_assign(C64::new(w / self.ht, 0.0), f.at(i, j));
        }
        out
    }
}

/// The three first-order residual matrix fields R1, R2, R3 on the grid.
pub fn bogomolny_residual_fields(
    source: &FieldSource,
    grid: &GridSpec,
    t: f64,
    scheme: Scheme,
) -> Result<[MatrixField; 3]> {
    let stack = gauge_stack(source, grid, t, scheme)?;
    let n = source.dim();
    let h = grid.h;
    let mut r1 = Vec::with_capacity(grid.len());
    let mut r2 = Vec::with_capacity(grid.len());
    let mut r3 = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let phi = stack.centre_at(&Component::Phi, i, j);
            let ax = stack.centre_at(&Component::Ax, i, j);
            let ay = stack.centre_at(&Component::Ay, i, j);
            let at = stack.centre_at(&Component::At, i, j);

            let dx = |c: &Component| stack.spatial_d(c, 0, i, j, scheme, h);
            let dy = |c: &Component| stack.spatial_d(c, 1, i, j, scheme, h);
            let dt = |c: &Component| stack.time_d(c, i, j, scheme);

            // grad_mu Phi = D_mu Phi + [A_mu, Phi]
            let grad_t_phi = dt(&Component::Phi).add(&at.commutator(phi));
            let grad_x_phi = dx(&Component::Phi).add(&ax.commutator(phi));
            let grad_y_phi = dy(&Component::Phi).add(&ay.commutator(phi));

            // curvatures F_mu_nu = D_mu A_nu - D_nu A_mu + [A_mu, A_nu]
            let f_xy = dx(&Component::Ay).sub(&dy(&Component::Ax)).add(&ax.commutator(ay));
            let f_yt = dy(&Component::At).sub(&dt(&Component::Ay)).add(&ay.commutator(at));
            let f_tx = dt(&Component::Ax).sub(&dx(&Component::At)).add(&at.commutator(ax));

            r1.push(grad_t_phi.add(&f_xy));
            r2.push(grad_x_phi.sub(&f_yt));
            r3.push(grad_y_phi.sub(&f_tx));
            debug_assert_eq!(n, phi.dim());
        }
    }
    Ok([
        MatrixField::from_data(grid.clone(), n, t, false, r1)?,
        MatrixField::from_data(grid.clone(), n, t, false, r2)?,
        MatrixField::from_data(grid.clone(), n, t, false, r3)?,
    ])
}

fn norm_report(grid: &GridSpec, f: &MatrixField) -> ResidualReport {
    let field: Vec<f64> = f.data().iter().map(|m| m.frobenius_norm()).collect();
    ResidualReport::from_field(grid.clone(), field)
}

/// Norm reports of the three first-order residuals.
pub fn bogomolny_residual(
    source: &FieldSource,
    grid: &GridSpec,
    t: f64,
    scheme: Scheme,
) -> Result<[ResidualReport; 3]> {
    let [r1, r2, r3] = bogomolny_residual_fields(source, grid, t, scheme)?;
    Ok([norm_report(grid, &r1), norm_report(grid, &r2), norm_report(grid, &r3)])
}

/// The multiplication-operator part of the commutator of the two flat
/// operators at a spectral parameter; derivative cross-terms cancel
/// identically and the remaining matrix field is
///
///   F_zbar_z - (i/2) grad_t Phi
///     + lambda  [ (1/2) grad_z Phi + (i/2) F_t_z ]
///     + 1/lambda [ -(1/2) grad_zbar Phi - (i/2) F_zbar_t ].
pub fn zero_curvature_field(
    source: &FieldSource,
    grid: &GridSpec,
    t: f64,
    scheme: Scheme,
    lambda: &LaxPoint,
) -> Result<MatrixField> {
    let stack = gauge_stack(source, grid, t, scheme)?;
    let n = source.dim();
    let h = grid.h;
    let l = lambda.lambda;
    let linv = l.inv();
    let half = C64::new(0.5, 0.0);
    let ihalf = C64::new(0.0, 0.5);
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let phi = stack.centre_at(&Component::Phi, i, j);
            let ax = stack.centre_at(&Component::Ax, i, j);
            let ay = stack.centre_at(&Component::Ay, i, j);
            let at = stack.centre_at(&Component::At, i, j);

            // complex combinations A_z = (Ax - i Ay)/2, A_zbar = (Ax + i Ay)/2
            let az = ax.scale(half).add(&ay.scale(-ihalf));
            let azb = ax.scale(half).add(&ay.scale(ihalf));

            let dx = |c: &Component| stack.spatial_d(c, 0, i, j, scheme, h);
            let dy = |c: &Component| stack.spatial_d(c, 1, i, j, scheme, h);
            let dt = |c: &Component| stack.time_d(c, i, j, scheme);
            // D_z F = (D_x F - i D_y F)/2 on each component
            let dz = |c: &Component| dx(c).scale(half).add(&dy(c).scale(-ihalf));
            let dzb = |c: &Component| dx(c).scale(half).add(&dy(c).scale(ihalf));

            let dzb_az = dzb(&Component::Ax).scale(half).add(&dzb(&Component::Ay).scale(-ihalf));
            let dz_azb = dz(&Component::Ax).scale(half).add(&dz(&Component::Ay).scale(ihalf));
            let dt_az = dt(&Component::Ax).scale(half).add(&dt(&Component::Ay).scale(-ihalf));
            let dt_azb = dt(&Component::Ax).scale(half).add(&dt(&Component::Ay).scale(ihalf));

            let f_zb_z = dzb_az.sub(&dz_azb).add(&azb.commutator(&az));
            let f_t_z = dt_az.sub(&dz(&Component::At)).add(&at.commutator(&az));
            let f_zb_t = dzb(&Component::At).sub(&dt_azb).add(&azb.commutator(at));

            let grad_t_phi = dt(&Component::Phi).add(&at.commutator(phi));
            let grad_z_phi = dz(&Component::Phi).add(&az.commutator(phi));
            let grad_zb_phi = dzb(&Component::Phi).add(&azb.commutator(phi));

            let mut m = f_zb_z;
            m.add_scaled_assign(-ihalf, &grad_t_phi);
            m.add_scaled_assign(l * half, &grad_z_phi);
            m.add_scaled_assign(l * ihalf, &f_t_z);
            m.add_scaled_assign(-linv * half, &grad_zb_phi);
            m.add_scaled_assign(-linv * ihalf, &f_zb_t);
            debug_assert_eq!(m.dim(), n);
            out.push(m);
        }
    }
    MatrixField::from_data(grid.clone(), n, t, false, out)
}

/// Norm report of the zero-curvature residual at one spectral parameter.
pub fn zero_curvature_residual(
    source: &FieldSource,
    grid: &GridSpec,
    t: f64,
    scheme: Scheme,
    lambda: &LaxPoint,
) -> Result<ResidualReport> {
    let f = zero_curvature_field(source, grid, t, scheme, lambda)?;
    Ok(norm_report(grid, &f))
}

/// Result of applying the fibrewise del-bar operator to a section.
pub struct DbarApplied {
    pub field: MatrixField,
    /// Set when |lambda| = 1: finite there, but the holomorphic fibre
    /// coordinate it annihilates degenerates.
    pub equatorial: bool,
}

/// Applies (1 + lambda^2) D_x + i(1 - lambda^2) D_y
///   + (1 + lambda)^2 Ax + (i/2)(1 - lambda^2)(Ay + At)
/// to a section on the gauge grid. Edge nodes use one-sided differences.
pub fn dbar_apply(gauge: &GaugeData, lambda: &LaxPoint, section: &MatrixField) -> Result<DbarApplied> {
    if section.grid != *gauge.grid() {
        return Err(Error::Config("section and gauge data live on different grids".into()));
    }
    let grid = section.grid.clone();
    let l = lambda.lambda;
    let one = C64::new(1.0, 0.0);
    let cx = one + l * l;
    let cy = C64::new(0.0, 1.0) * (one - l * l);
    let ca = (one + l) * (one + l);
    let cb = C64::new(0.0, 0.5) * (one - l * l);
    let h = grid.h;
    let n = section.n;
    let mut out = Vec::with_capacity(grid.len());
    let d_axis = |i: usize, j: usize, axis: usize| -> CMatrix {
        // centered in the interior, one-sided at the edges
        let (count, pos) = if axis == 0 { (grid.nx, i) } else { (grid.ny, j) };
        let get = |p: usize| if axis == 0 { section.at(p, j) } else { section.at(i, p) };
        let inv = C64::new(1.0 / h, 0.0);
        if pos == 0 {
            get(1).sub(get(0)).scale(inv)
        } else if pos == count - 1 {
            get(count - 1).sub(get(count - 2)).scale(inv)
        } else {
            get(pos + 1).sub(get(pos - 1)).scale(inv * C64::new(0.5, 0.0))
        }
    };
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let mut m = d_axis(i, j, 0).scale(cx);
            m.add_scaled_assign(cy, &d_axis(i, j, 1));
            let mut coeff = gauge.ax.at(i, j).scale(ca);
            coeff.add_scaled_assign(cb, gauge.ay.at(i, j));
            coeff.add_scaled_assign(cb, gauge.at.at(i, j));
            m = m.add(&coeff.mul(section.at(i, j)));
            out.push(m);
        }
    }
    Ok(DbarApplied {
        field: MatrixField::from_data(grid, n, section.t, false, out)?,
        equatorial: lambda.on_equator(),
    })
}
