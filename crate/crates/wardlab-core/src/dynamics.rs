//! The field equation residual, the energy functional, and an explicit
//! initial-value evolver.
//!
//! The equation, written in currents L_mu = J^{-1} d_mu J, is
//!
//!   d_t Lt - d_x Lx - d_y Ly + [Ly, Lt] = 0,
//!
//! and the energy density is the standard positive chiral functional
//! e = -tr(Lt^2 + Lx^2 + Ly^2)/2, which is nonnegative for anti-hermitian
//! currents (units 1/length^4 under the model's far-field conventions).

use crate::cmatrix::{polar_unitary, C64, CMatrix};
use crate::error::{Error, Result};
use crate::field::{currents, FieldSource, InterpOrder, MatrixField, SampledField};
use crate::grid::GridSpec;
use crate::report::{EnergyReport, ResidualReport};
use crate::scheme::Scheme;
use rayon::prelude::*;
use std::sync::Arc;

/// Time step used for the residual's outer time derivative: the grid spacing
/// for analytic sources, the trajectory step for sampled ones.
fn time_step(source: &FieldSource, grid: &GridSpec) -> f64 {
    match source {
        FieldSource::Analytic(_) => grid.h,
        FieldSource::Sampled(s) => s.dt(),
    }
}

/// Pointwise residual R = D_t(Lt) - D_x(Lx) - D_y(Ly) + [Ly, Lt] of the
/// field equation, reported in Frobenius norm.
pub fn ward_residual(source: &FieldSource, grid: &GridSpec, t: f64, scheme: Scheme) -> Result<ResidualReport> {
    let pad = scheme.radius();
    let cs = currents(source, &grid.padded(pad)?, t, scheme)?;
    let ht = time_step(source, grid);
    let stencil = scheme.first_derivative();

    // Lt fields at the shifted times, on the unpadded grid
    let mut lt_shift: Vec<(isize, MatrixField)> = Vec::new();
    for &(k, _) in stencil {
        let tk = t + k as f64 * ht;
        lt_shift.push((k, currents(source, grid, tk, scheme)?.lt));
    }

    let field: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let (pi, pj) = (i + pad, j + pad);
            let n = source.dim();
            let mut r = CMatrix::zeros(n);
            // D_t Lt
            for ((k, w), (ks, lt)) in stencil.iter().zip(lt_shift.iter()) {
                debug_assert_eq!(k, ks);
                r.add_scaled_assign(C64::new(w / ht, 0.0), lt.at(i, j));
            }
            // - D_x Lx - D_y Ly
            for &(k, w) in stencil {
                let c = C64::new(-w / grid.h, 0.0);
                r.add_scaled_assign(c, cs.lx.at((pi as isize + k) as usize, pj));
                r.add_scaled_assign(c, cs.ly.at(pi, (pj as isize + k) as usize));
            }
            // + [Ly, Lt]
            r = r.add(&cs.ly.at(pi, pj).commutator(cs.lt.at(pi, pj)));
            r.frobenius_norm()
        })
        .collect();
    Ok(ResidualReport::from_field(grid.clone(), field))
}

fn density_from_currents(lx: &CMatrix, ly: &CMatrix, lt: &CMatrix) -> f64 {
    let sq = |m: &CMatrix| m.mul(m).trace().re;
    -0.5 * (sq(lt) + sq(lx) + sq(ly))
}

/// Energy density e = -tr(Lt^2 + Lx^2 + Ly^2)/2 and its trapezoid total.
pub fn energy(source: &FieldSource, grid: &GridSpec, t: f64) -> Result<EnergyReport> {
    let cs = currents(source, grid, t, Scheme::Order2)?;
    let density: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            density_from_currents(cs.lx.at(i, j), cs.ly.at(i, j), cs.lt.at(i, j))
        })
        .collect();
    Ok(EnergyReport::from_density(grid.clone(), density, t))
}

/// Pointwise energy density from the source's own derivative hooks; used by
/// the asymptotics fits, which sample far off any grid.
pub fn point_energy_density(source: &FieldSource, x: f64, y: f64, t: f64) -> Result<f64> {
    let cur = source.currents_at(x, y, t)?;
    Ok(density_from_currents(&cur.lx, &cur.ly, &cur.lt))
}

/// Boundary handling for the evolver: clamp the two-node boundary ring to
/// the exact constructor values or freeze it at the initial data.
#[derive(Clone)]
pub enum BoundaryMode {
    Exact(FieldSource),
    Frozen,
}

/// Width of the clamped boundary ring; the update stencil of the second-order
/// step needs two rings.
pub const BOUNDARY_RING: usize = 2;

/// Stability bound dt <= h / sqrt(2).
pub fn cfl_limit(h: f64) -> f64 {
    h / 2.0f64.sqrt()
}

/// Leapfrog evolution of the field equation rearranged for J_tt, with one
/// predictor-corrector pass for the J_t-dependent terms and a polar
/// re-unitarization at every node. Returns the full trajectory.
pub fn evolve(
    j0: &MatrixField,
    j1: &MatrixField,
    steps: usize,
    dt: f64,
    boundary: BoundaryMode,
) -> Result<SampledField> {
    if j0.grid != j1.grid || j0.n != j1.n {
        return Err(Error::Config("initial slices disagree on grid or matrix size".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Config("time step must be positive".into()));
    }
    if (j1.t - j0.t - dt).abs() > 1e-9 * dt {
        return Err(Error::Config(format!(
            "second slice must sit one step after the first: t0 = {}, t1 = {}, dt = {dt}",
            j0.t, j1.t
        )));
    }
    let grid = j0.grid.clone();
    if dt > cfl_limit(grid.h) * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "time step {dt} violates the stability bound h/sqrt(2) = {}",
            cfl_limit(grid.h)
        )));
    }
    if grid.nx < 2 * BOUNDARY_RING + 3 || grid.ny < 2 * BOUNDARY_RING + 3 {
        return Err(Error::Config("grid too small for the boundary ring".into()));
    }

    let n = j0.n;
    let mut slices = vec![j0.clone(), j1.clone()];
    for step in 1..steps {
        let t_next = j0.t + (step as f64 + 1.0) * dt;
        let cur = &slices[step];
        let prev = &slices[step - 1];

        // currents of the current slice on the one-ring interior
        let lxy: Vec<Option<(CMatrix, CMatrix, CMatrix)>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                if i < 1 || i >= grid.nx - 1 || j < 1 || j >= grid.ny - 1 {
                    return None;
                }
                let jinv = cur.at(i, j).inverse().ok()?;
                let half = C64::new(0.5 / grid.h, 0.0);
                let dx = cur.at(i + 1, j).sub(cur.at(i - 1, j)).scale(half);
                let dy = cur.at(i, j + 1).sub(cur.at(i, j - 1)).scale(half);
                Some((jinv.mul(&dx), jinv.mul(&dy), jinv))
            })
            .collect();

        let acceleration = |jt: &(dyn Fn(usize, usize) -> CMatrix + Sync)| -> Vec<Option<CMatrix>> {
            (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx % grid.nx, idx / grid.nx);
                    if i < BOUNDARY_RING
                        || i >= grid.nx - BOUNDARY_RING
                        || j < BOUNDARY_RING
                        || j >= grid.ny - BOUNDARY_RING
                    {
                        return None;
                    }
                    let (lx, ly, jinv) = lxy[idx].as_ref()?;
                    let _ = lx;
                    let half = C64::new(0.5 / grid.h, 0.0);
                    let (lx_p, _, _) = lxy[grid.idx(i + 1, j)].as_ref()?;
                    let (lx_m, _, _) = lxy[grid.idx(i - 1, j)].as_ref()?;
                    let (_, ly_p, _) = lxy[grid.idx(i, j + 1)].as_ref()?;
                    let (_, ly_m, _) = lxy[grid.idx(i, j - 1)].as_ref()?;
                    let div = lx_p.sub(lx_m).add(&ly_p.sub(ly_m)).scale(half);
                    let jt_ij = jt(i, j);
                    let lt = jinv.mul(&jt_ij);
                    let torsion = ly.commutator(&lt);
                    // J_tt = Jt J^{-1} Jt + J (div L - [Ly, Lt])
                    let a = jt_ij.mul(jinv).mul(&jt_ij);
                    Some(a.add(&cur.at(i, j).mul(&div.sub(&torsion))))
                })
                .collect()
        };

        let inv_dt = C64::new(1.0 / dt, 0.0);
        let acc1 = acceleration(&|i, j| {
            let mut m = cur.at(i, j).clone();
            m.add_scaled_assign(C64::new(-1.0, 0.0), prev.at(i, j));
            m.scale(inv_dt)
        });

        // predictor slice, then one corrector pass with the centered Jt
        let dt2 = C64::new(dt * dt, 0.0);
        let predict: Vec<Option<CMatrix>> = (0..grid.len())
            .map(|idx| {
                acc1[idx].as_ref().map(|a| {
                    let (i, j) = (idx % grid.nx, idx / grid.nx);
                    let mut m = cur.at(i, j).scale(C64::new(2.0, 0.0));
                    m.add_scaled_assign(C64::new(-1.0, 0.0), prev.at(i, j));
                    m.add_scaled_assign(dt2, a);
                    m
                })
            })
            .collect();
        let half_dt = C64::new(0.5 / dt, 0.0);
        let acc2 = acceleration(&|i, j| {
            let idx = grid.idx(i, j);
            match predict[idx].as_ref() {
                Some(p) => {
                    let mut m = p.clone();
                    m.add_scaled_assign(C64::new(-1.0, 0.0), prev.at(i, j));
                    m.scale(half_dt)
                }
                None => CMatrix::zeros(n),
            }
        });

        let next_data: Vec<std::result::Result<CMatrix, String>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                match acc2[idx].as_ref() {
                    Some(a) => {
                        let mut m = cur.at(i, j).scale(C64::new(2.0, 0.0));
                        m.add_scaled_assign(C64::new(-1.0, 0.0), prev.at(i, j));
                        m.add_scaled_assign(dt2, a);
                        polar_unitary(&m).map_err(|e| e.to_string())
                    }
                    None => {
                        // clamped boundary ring
                        match &boundary {
                            BoundaryMode::Exact(src) => {
                                let (x, y) = grid.node(i, j);
                                src.sample(x, y, t_next).map_err(|e| e.to_string())
                            }
                            BoundaryMode::Frozen => Ok(j0.at(i, j).clone()),
                        }
                    }
                }
            })
            .collect();
        let mut data = Vec::with_capacity(grid.len());
        for r in next_data {
            match r {
                Ok(m) => data.push(m),
                Err(detail) => return Err(Error::BlowUp { step, detail }),
            }
        }
        slices.push(MatrixField::from_data(grid.clone(), n, t_next, true, data)?);
    }
    SampledField::new(slices, InterpOrder::Cubic)
}

/// Per-step diagnostics of a stored trajectory: residual norms and energy on
/// the sub-grid untouched by the boundary clamp. Time stencils are centered
/// in the interior and fall back to second-order one-sided forms at the two
/// trajectory ends.
#[derive(Clone, Debug)]
pub struct TrajectoryDiagnostics {
    pub step: usize,
    pub t: f64,
    pub sup_residual: f64,
    pub l2_residual: f64,
    pub energy: f64,
}

fn slice_lt(traj: &SampledField, k: usize) -> Result<Vec<CMatrix>> {
    let grid = traj.grid();
    let dt = traj.dt();
    let last = traj.len() - 1;
    let terms: &[(usize, f64)] = if k == 0 {
        &[(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if k == last {
        &[(last, 1.5), (last - 1, -2.0), (last - 2, 0.5)]
    } else {
        // centered; encoded as two one-sided half-weights
        return (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx % grid.nx, idx / grid.nx);
                let jinv = traj.slice(k).at(i, j).inverse()?;
                let d = traj
                    .slice(k + 1)
                    .at(i, j)
                    .sub(traj.slice(k - 1).at(i, j))
                    .scale(C64::new(0.5 / dt, 0.0));
                Ok(jinv.mul(&d))
            })
            .collect();
    };
    if traj.len() < 3 {
        return Err(Error::Domain("trajectory too short for time derivatives".into()));
    }
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let jinv = traj.slice(k).at(i, j).inverse()?;
            let mut d = CMatrix::zeros(traj.slice(k).n);
            for &(kk, w) in terms {
                d.add_scaled_assign(C64::new(w / dt, 0.0), traj.slice(kk).at(i, j));
            }
            Ok(jinv.mul(&d))
        })
        .collect()
}

/// Spatial currents of one slice on the one-ring interior (None elsewhere).
fn slice_spatial_currents(traj: &SampledField, k: usize) -> Result<Vec<Option<(CMatrix, CMatrix)>>> {
    let grid = traj.grid();
    let s = traj.slice(k);
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            if i < 1 || i >= grid.nx - 1 || j < 1 || j >= grid.ny - 1 {
                return Ok(None);
            }
            let jinv = s.at(i, j).inverse()?;
            let half = C64::new(0.5 / grid.h, 0.0);
            let dx = s.at(i + 1, j).sub(s.at(i - 1, j)).scale(half);
            let dy = s.at(i, j + 1).sub(s.at(i, j - 1)).scale(half);
            Ok(Some((jinv.mul(&dx), jinv.mul(&dy))))
        })
        .collect()
}

/// Energy of one trajectory slice over the one-ring interior sub-grid.
pub fn slice_energy(traj: &SampledField, k: usize) -> Result<EnergyReport> {
    let grid = traj.grid();
    let inner = GridSpec::new(
        grid.nx - 2,
        grid.ny - 2,
        grid.h,
        [grid.origin[0] + grid.h, grid.origin[1] + grid.h],
    )?;
    let lt = slice_lt(traj, k)?;
    let lxy = slice_spatial_currents(traj, k)?;
    let mut density = vec![0.0; inner.len()];
    for j in 0..inner.ny {
        for i in 0..inner.nx {
            let idx = grid.idx(i + 1, j + 1);
            let (lx, ly) = lxy[idx].as_ref().expect("interior node");
            density[inner.idx(i, j)] = density_from_currents(lx, ly, &lt[idx]);
        }
    }
    Ok(EnergyReport::from_density(inner, density, traj.slice(k).t))
}

/// Residual and energy for every step of a trajectory.
pub fn trajectory_diagnostics(traj: &SampledField) -> Result<Vec<TrajectoryDiagnostics>> {
    if traj.len() < 3 {
        return Err(Error::Domain("trajectory too short for diagnostics".into()));
    }
    let grid = traj.grid();
    let dt = traj.dt();
    let last = traj.len() - 1;
    let inner = GridSpec::new(
        grid.nx - 2 * BOUNDARY_RING,
        grid.ny - 2 * BOUNDARY_RING,
        grid.h,
        [
            grid.origin[0] + BOUNDARY_RING as f64 * grid.h,
            grid.origin[1] + BOUNDARY_RING as f64 * grid.h,
        ],
    )?;
    let mut rows = Vec::with_capacity(traj.len());
    // Lt slices are reused across the moving time stencil
    let mut lt_cache: Vec<Option<Arc<Vec<CMatrix>>>> = vec![None; traj.len()];
    let lt_at = |k: usize, cache: &mut Vec<Option<Arc<Vec<CMatrix>>>>| -> Result<Arc<Vec<CMatrix>>> {
        if cache[k].is_none() {
            cache[k] = Some(Arc::new(slice_lt(traj, k)?));
        }
        Ok(cache[k].clone().unwrap())
    };
    for k in 0..=last {
        let lxy = slice_spatial_currents(traj, k)?;
        let lt0 = lt_at(k, &mut lt_cache)?;
        // outer time derivative of Lt, clamped at the ends
        let dt_lt: Vec<(f64, Arc<Vec<CMatrix>>)> = if k == 0 {
            vec![
                (-1.5 / dt, lt_at(0, &mut lt_cache)?),
                (2.0 / dt, lt_at(1, &mut lt_cache)?),
                (-0.5 / dt, lt_at(2, &mut lt_cache)?),
            ]
        } else if k == last {
            vec![
                (1.5 / dt, lt_at(last, &mut lt_cache)?),
                (-2.0 / dt, lt_at(last - 1, &mut lt_cache)?),
                (0.5 / dt, lt_at(last - 2, &mut lt_cache)?),
            ]
        } else {
            vec![
                (-0.5 / dt, lt_at(k - 1, &mut lt_cache)?),
                (0.5 / dt, lt_at(k + 1, &mut lt_cache)?),
            ]
        };
        let mut res_field = vec![0.0; inner.len()];
        let mut density = vec![0.0; inner.len()];
        for j in 0..inner.ny {
            for i in 0..inner.nx {
                let (gi, gj) = (i + BOUNDARY_RING, j + BOUNDARY_RING);
                let idx = grid.idx(gi, gj);
                let n = traj.slice(k).n;
                let mut r = CMatrix::zeros(n);
                for (w, lt) in &dt_lt {
                    r.add_scaled_assign(C64::new(*w, 0.0), &lt[idx]);
                }
                let half = C64::new(0.5 / grid.h, 0.0);
                let (lx_p, _) = lxy[grid.idx(gi + 1, gj)].as_ref().expect("interior");
                let (lx_m, _) = lxy[grid.idx(gi - 1, gj)].as_ref().expect("interior");
                let (_, ly_p) = lxy[grid.idx(gi, gj + 1)].as_ref().expect("interior");
                let (_, ly_m) = lxy[grid.idx(gi, gj - 1)].as_ref().expect("interior");
                let div = lx_p.sub(lx_m).add(&ly_p.sub(ly_m)).scale(half);
                r.add_scaled_assign(C64::new(-1.0, 0.0), &div);
                let (lx, ly) = lxy[idx].as_ref().expect("interior");
                r = r.add(&ly.commutator(&lt0[idx]));
                res_field[inner.idx(i, j)] = r.frobenius_norm();
                density[inner.idx(i, j)] = density_from_currents(lx, ly, &lt0[idx]);
            }
        }
        let res = ResidualReport::from_field(inner.clone(), res_field);
        let en = EnergyReport::from_density(inner.clone(), density, traj.slice(k).t);
        rows.push(TrajectoryDiagnostics {
            step: k,
            t: traj.slice(k).t,
            sup_residual: res.sup,
            l2_residual: res.l2,
            energy: en.total,
        });
        // drop cache entries that the stencil has moved past
        if k >= 3 {
            lt_cache[k - 3] = None;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{ConstantField, DiagPhaseField};
    use crate::cmatrix::CMatrix;
    use crate::solitons::{one_pole, SolitonSpec};

    #[test]
    fn residual_of_identity_is_exactly_zero() {
        let src = crate::solitons::constant_field(CMatrix::identity(2)).unwrap();
        let grid = GridSpec::new(9, 9, 0.3, [-1.0, -1.0]).unwrap();
        let rep = ward_residual(&src, &grid, 0.0, Scheme::Order2).unwrap();
        assert_eq!(rep.sup, 0.0);
    }

    #[test]
    fn residual_of_nonidentity_constant_is_exactly_zero() {
        let mut u = CMatrix::zeros(2);
        u[(0, 0)] = C64::new(0.0, 1.0);
        u[(1, 1)] = C64::new(0.0, -1.0);
        let src = crate::solitons::constant_field(u).unwrap();
        let grid = GridSpec::new(9, 9, 0.3, [-1.0, -1.0]).unwrap();
        let rep = ward_residual(&src, &grid, 0.5, Scheme::Order2).unwrap();
        assert_eq!(rep.sup, 0.0);
    }

    #[test]
    fn residual_converges_at_order_two_on_the_static_lump() {
        let src = one_pole(&SolitonSpec::monomial(C64::new(0.0, 1.0), 1).unwrap()).unwrap();
        let mut sups = Vec::new();
        for h in [0.2, 0.1, 0.05] {
            let grid = GridSpec::from_extent(-4.0, 4.0, -4.0, 4.0, h).unwrap();
            sups.push(ward_residual(&src, &grid, 0.0, Scheme::Order2).unwrap().sup);
        }
        let p1 = (sups[0] / sups[1]).log2();
        let p2 = (sups[1] / sups[2]).log2();
        for p in [p1, p2] {
            assert!((1.7..=2.3).contains(&p), "observed order {p}, sups {sups:?}");
        }
    }

    #[test]
    fn residual_is_left_translation_invariant() {
        use crate::analytic::LeftTranslatedField;
        use crate::solitons::OnePoleField;
        let spec = SolitonSpec::monomial(C64::new(0.5, 1.0), 1).unwrap();
        let plain = one_pole(&spec).unwrap();
        let u0 = CMatrix::from_rows(
            2,
            &[
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
            ],
        );
        let shifted = FieldSource::analytic(
            LeftTranslatedField::new(u0, std::sync::Arc::new(OnePoleField::new(&spec).unwrap())).unwrap(),
        );
        let grid = GridSpec::from_extent(-2.0, 2.0, -2.0, 2.0, 0.2).unwrap();
        let a = ward_residual(&plain, &grid, 0.3, Scheme::Order2).unwrap();
        let b = ward_residual(&shifted, &grid, 0.3, Scheme::Order2).unwrap();
        for (va, vb) in a.field.iter().zip(b.field.iter()) {
            assert!((va - vb).abs() <= 1e-12);
        }
    }

    #[test]
    fn energy_of_diag_phase_on_unit_square() {
        let src = FieldSource::analytic(DiagPhaseField::new(1.0));
        let grid = GridSpec::from_extent(0.0, 1.0, 0.0, 1.0, 0.05).unwrap();
        let rep = energy(&src, &grid, 0.0).unwrap();
        assert!((rep.total - 1.0).abs() < 0.02, "total {}", rep.total);
        for v in &rep.density {
            assert!(*v >= -1e-12);
        }
    }

    #[test]
    fn soliton_energy_is_conserved_between_slices() {
        let src = one_pole(&SolitonSpec::monomial(C64::new(0.5, 1.0), 1).unwrap()).unwrap();
        let grid = GridSpec::from_extent(-14.0, 14.0, -14.0, 14.0, 0.125).unwrap();
        let e0 = energy(&src, &grid, 0.0).unwrap().total;
        let e1 = energy(&src, &grid, 1.0).unwrap().total;
        assert!(((e1 - e0) / e0).abs() < 0.005, "drift {}", ((e1 - e0) / e0).abs());
    }

    #[test]
    fn evolve_keeps_constant_data_constant() {
        let grid = GridSpec::new(12, 12, 0.25, [-1.375, -1.375]).unwrap();
        let mut u = CMatrix::zeros(2);
        u[(0, 0)] = C64::new(0.0, 1.0);
        u[(1, 1)] = C64::new(0.0, -1.0);
        let j0 = MatrixField::constant(grid.clone(), u.clone(), 0.0, true);
        let j1 = MatrixField::constant(grid.clone(), u.clone(), 0.1, true);
        let traj = evolve(&j0, &j1, 10, 0.1, BoundaryMode::Frozen).unwrap();
        assert_eq!(traj.len(), 11);
        for k in 0..traj.len() {
            for m in traj.slice(k).data() {
                assert!(m.sub(&u).sup_norm() < 1e-13);
            }
        }
    }

    #[test]
    fn evolve_rejects_cfl_violation() {
        let grid = GridSpec::new(12, 12, 0.25, [-1.375, -1.375]).unwrap();
        let j0 = MatrixField::constant(grid.clone(), CMatrix::identity(2), 0.0, true);
        let j1 = MatrixField::constant(grid.clone(), CMatrix::identity(2), 0.3, true);
        let err = evolve(&j0, &j1, 4, 0.3, BoundaryMode::Frozen).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn evolve_tracks_the_exact_soliton() {
        let spec = SolitonSpec::monomial(C64::new(0.5, 1.0), 1).unwrap();
        let src = one_pole(&spec).unwrap();
        let grid = GridSpec::from_extent(-8.0, 8.0, -8.0, 8.0, 0.25).unwrap();
        let dt = 0.125;
        let steps = 8; // to t = 1
        let j0 = src.slice(&grid, 0.0).unwrap();
        let j1 = src.slice(&grid, dt).unwrap();
        let traj = evolve(&j0, &j1, steps, dt, BoundaryMode::Exact(src.clone())).unwrap();
        let exact = src.slice(&grid, 1.0).unwrap();
        let last = traj.slice(steps);
        let mut sup = 0.0f64;
        for (a, b) in last.data().iter().zip(exact.data().iter()) {
            sup = sup.max(a.sub(b).sup_norm());
        }
        assert!(sup < 0.05, "sup error {sup}");
        last.validate().unwrap();
    }

    #[test]
    fn evolve_is_time_reversible() {
        let spec = SolitonSpec::monomial(C64::new(0.5, 1.0), 1).unwrap();
        let src = one_pole(&spec).unwrap();
        let grid = GridSpec::from_extent(-6.0, 6.0, -6.0, 6.0, 0.25).unwrap();
        let dt = 0.125;
        let steps = 8;
        let j0 = src.slice(&grid, 0.0).unwrap();
        let j1 = src.slice(&grid, dt).unwrap();
        let fwd = evolve(&j0, &j1, steps, dt, BoundaryMode::Exact(src.clone())).unwrap();
        // one-way error vs the exact field
        let exact = src.slice(&grid, fwd.t_end()).unwrap();
        let mut one_way = 0.0f64;
        for (a, b) in fwd.slice(steps).data().iter().zip(exact.data().iter()) {
            one_way = one_way.max(a.sub(b).sup_norm());
        }
        // march backwards by swapping the two last slices
        let mut back0 = fwd.slice(steps).clone();
        let mut back1 = fwd.slice(steps - 1).clone();
        back0.t = 0.0;
        back1.t = dt;
        let reversed_src = TimeReversed { inner: src.clone(), t_total: fwd.t_end() };
        let bwd = evolve(
            &back0,
            &back1,
            steps,
            dt,
            BoundaryMode::Exact(FieldSource::analytic(reversed_src)),
        )
        .unwrap();
        let mut round_trip = 0.0f64;
        for (a, b) in bwd.slice(steps).data().iter().zip(j0.data().iter()) {
            round_trip = round_trip.max(a.sub(b).sup_norm());
        }
        assert!(
            round_trip <= 10.0 * one_way.max(1e-12),
            "round trip {round_trip}, one-way {one_way}"
        );
    }

    struct TimeReversed {
        inner: FieldSource,
        t_total: f64,
    }

    impl crate::field::AnalyticField for TimeReversed {
        fn dim(&self) -> usize {
            self.inner.dim()
        }
        fn eval(&self, x: f64, y: f64, t: f64) -> CMatrix {
            self.inner.sample(x, y, self.t_total - t).unwrap()
        }
    }

    #[test]
    fn trajectory_diagnostics_report_small_residual_for_exact_data() {
        let spec = SolitonSpec::monomial(C64::new(0.5, 1.0), 1).unwrap();
        let src = one_pole(&spec).unwrap();
        let grid = GridSpec::from_extent(-4.0, 4.0, -4.0, 4.0, 0.25).unwrap();
        let slices: Vec<MatrixField> = (0..6).map(|k| src.slice(&grid, 0.125 * k as f64).unwrap()).collect();
        let traj = SampledField::new(slices, InterpOrder::Cubic).unwrap();
        let rows = trajectory_diagnostics(&traj).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert!(row.sup_residual < 0.2, "step {}: {}", row.step, row.sup_residual);
            assert!(row.energy > 0.0);
        }
    }

    #[test]
    fn constant_source_diagnostics_are_zero() {
        let grid = GridSpec::new(10, 10, 0.2, [-0.9, -0.9]).unwrap();
        let u = CMatrix::identity(2);
        let slices: Vec<MatrixField> =
            (0..4).map(|k| MatrixField::constant(grid.clone(), u.clone(), 0.1 * k as f64, true)).collect();
        let traj = SampledField::new(slices, InterpOrder::Linear).unwrap();
        for row in trajectory_diagnostics(&traj).unwrap() {
            assert_eq!(row.sup_residual, 0.0);
            assert_eq!(row.energy, 0.0);
        }
        let _ = ConstantField::new(u).unwrap();
    }
}
