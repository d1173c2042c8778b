//! Built-in analytic fields and scalar sources used as references and
//! controls: constants, diagonal phase fields, U(1) phase fields driven by a
//! scalar profile, and a smooth non-solution field.

use crate::cmatrix::{C64, CMatrix};
use crate::error::{Error, Result};
use crate::field::{AnalyticField, FieldJet};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// J == U0.
pub struct ConstantField {
    u0: CMatrix,
}

impl ConstantField {
    pub fn new(u0: CMatrix) -> Result<Self> {
        if u0.unitary_defect() > 1e-10 {
            return Err(Error::Config(format!(
                "constant field requires a unitary matrix, defect {:.3e}",
                u0.unitary_defect()
            )));
        }
        Ok(ConstantField { u0 })
    }
}

impl AnalyticField for ConstantField {
    fn dim(&self) -> usize {
        self.u0.dim()
    }

    fn eval(&self, _x: f64, _y: f64, _t: f64) -> CMatrix {
        self.u0.clone()
    }

    fn jet(&self, _x: f64, _y: f64, _t: f64) -> FieldJet {
        let z = CMatrix::zeros(self.u0.dim());
        FieldJet { j: self.u0.clone(), jx: z.clone(), jy: z.clone(), jt: z }
    }

    fn special_unitary(&self) -> bool {
        (self.u0.det() - C64::new(1.0, 0.0)).norm() < 1e-10
    }
}

/// J = diag(e^{iax}, e^{-iax}); static, special unitary, with closed-form
/// currents Lx = diag(ia, -ia).
pub struct DiagPhaseField {
    a: f64,
}

impl DiagPhaseField {
    pub fn new(a: f64) -> Self {
        DiagPhaseField { a }
    }
}

impl AnalyticField for DiagPhaseField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, _y: f64, _t: f64) -> CMatrix {
        let p = C64::new(0.0, self.a * x).exp();
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = p;
        m[(1, 1)] = p.conj();
        m
    }

    fn jet(&self, x: f64, y: f64, t: f64) -> FieldJet {
        let j = self.eval(x, y, t);
        let mut jx = CMatrix::zeros(2);
        jx[(0, 0)] = C64::new(0.0, self.a) * j[(0, 0)];
        jx[(1, 1)] = C64::new(0.0, -self.a) * j[(1, 1)];
        FieldJet { j, jx, jy: CMatrix::zeros(2), jt: CMatrix::zeros(2) }
    }

    fn special_unitary(&self) -> bool {
        true
    }
}

/// Scalar profiles j(x, y, t) with closed-form first derivatives.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ScalarSource {
    Constant { value: f64 },
    /// Gaussian lump, time independent; decays far below double precision
    /// within a few widths, which stands in for compact support.
    Bump { amp: f64, x0: f64, y0: f64, width: f64 },
    /// Radiating solution of the 2+1 wave equation: the real part of the
    /// complex-shifted source (r^2 + b^2 - t^2 + 2ibt)^{-1/2}, smooth for
    /// b != 0 and carrying nonzero far-field flux.
    CylindricalPulse { amp: f64, b: f64 },
}

/// Value and first derivatives of a scalar source.
#[derive(Clone, Copy, Debug)]
pub struct ScalarJet {
    pub j: f64,
    pub jx: f64,
    pub jy: f64,
    pub jt: f64,
}

impl ScalarSource {
    pub fn jet(&self, x: f64, y: f64, t: f64) -> ScalarJet {
        match *self {
            ScalarSource::Constant { value } => ScalarJet { j: value, jx: 0.0, jy: 0.0, jt: 0.0 },
            ScalarSource::Bump { amp, x0, y0, width } => {
                let (dx, dy) = (x - x0, y - y0);
                let w2 = width * width;
                let j = amp * (-(dx * dx + dy * dy) / w2).exp();
                ScalarJet {
                    j,
                    jx: -2.0 * dx / w2 * j,
                    jy: -2.0 * dy / w2 * j,
                    jt: 0.0,
                }
            }
            ScalarSource::CylindricalPulse { amp, b } => {
                let g = C64::new(x * x + y * y + b * b - t * t, 2.0 * b * t);
                let g32 = g.powf(-1.5);
                ScalarJet {
                    j: amp * g.powf(-0.5).re,
                    jx: amp * (-x * g32).re,
                    jy: amp * (-y * g32).re,
                    jt: amp * (C64::new(t, -b) * g32).re,
                }
            }
        }
    }
}

/// 1x1 unitary field J = e^{i j(x,y,t)}.
pub struct U1PhaseField {
    pub scalar: ScalarSource,
}

impl U1PhaseField {
    pub fn new(scalar: ScalarSource) -> Self {
        U1PhaseField { scalar }
    }
}

impl AnalyticField for U1PhaseField {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: f64, y: f64, t: f64) -> CMatrix {
        CMatrix::scalar(C64::new(0.0, self.scalar.jet(x, y, t).j).exp())
    }

    fn jet(&self, x: f64, y: f64, t: f64) -> FieldJet {
        let s = self.scalar.jet(x, y, t);
        let j = C64::new(0.0, s.j).exp();
        FieldJet {
            j: CMatrix::scalar(j),
            jx: CMatrix::scalar(C64::new(0.0, s.jx) * j),
            jy: CMatrix::scalar(C64::new(0.0, s.jy) * j),
            jt: CMatrix::scalar(C64::new(0.0, s.jt) * j),
        }
    }
}

/// Smooth SU(2) field exp(i phi sigma_1) with phi = amp x^2 e^{-r^2/w^2}.
/// Unitary and decaying but not a solution of the field equation; serves as
/// the negative control for the residual diagnostics.
pub struct SigmaPhaseField {
    pub amp: f64,
    pub width: f64,
}

impl SigmaPhaseField {
    pub fn new(amp: f64, width: f64) -> Self {
        SigmaPhaseField { amp, width }
    }

    fn phase(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let w2 = self.width * self.width;
        let e = (-(x * x + y * y) / w2).exp();
        let phi = self.amp * x * x * e;
        let phix = self.amp * (2.0 * x - 2.0 * x * x * x / w2) * e;
        let phiy = -2.0 * y / w2 * phi;
        (phi, phix, phiy)
    }
}

impl AnalyticField for SigmaPhaseField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: f64, y: f64, _t: f64) -> CMatrix {
        let (phi, _, _) = self.phase(x, y);
        let (c, s) = (phi.cos(), phi.sin());
        CMatrix::from_rows(
            2,
            &[C64::new(c, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(c, 0.0)],
        )
    }

    fn jet(&self, x: f64, y: f64, t: f64) -> FieldJet {
        let (phi, phix, phiy) = self.phase(x, y);
        let j = self.eval(x, y, t);
        // d_mu J = i phi_mu sigma_1 J
        let d = |pm: f64| {
            let (c, s) = (phi.cos(), phi.sin());
            CMatrix::from_rows(
                2,
                &[
                    C64::new(-s * pm, 0.0),
                    C64::new(0.0, c * pm),
                    C64::new(0.0, c * pm),
                    C64::new(-s * pm, 0.0),
                ],
            )
        };
        FieldJet { j, jx: d(phix), jy: d(phiy), jt: CMatrix::zeros(2) }
    }

    fn special_unitary(&self) -> bool {
        true
    }
}

/// J -> U0 J; currents are untouched, so every diagnostic built from them
/// must be invariant under this wrapper.
pub struct LeftTranslatedField {
    u0: CMatrix,
    inner: Arc<dyn AnalyticField>,
}

impl LeftTranslatedField {
    pub fn new(u0: CMatrix, inner: Arc<dyn AnalyticField>) -> Result<Self> {
        if u0.unitary_defect() > 1e-10 {
            return Err(Error::Config("left translation requires a unitary factor".into()));
        }
        if u0.dim() != inner.dim() {
            return Err(Error::Config("left translation dimension mismatch".into()));
        }
        Ok(LeftTranslatedField { u0, inner })
    }
}

impl AnalyticField for LeftTranslatedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: f64, y: f64, t: f64) -> CMatrix {
        self.u0.mul(&self.inner.eval(x, y, t))
    }

    fn jet(&self, x: f64, y: f64, t: f64) -> FieldJet {
        let j = self.inner.jet(x, y, t);
        FieldJet {
            j: self.u0.mul(&j.j),
            jx: self.u0.mul(&j.jx),
            jy: self.u0.mul(&j.jy),
            jt: self.u0.mul(&j.jt),
        }
    }

    fn unitary(&self) -> bool {
        self.inner.unitary()
    }

    fn special_unitary(&self) -> bool {
        self.inner.special_unitary() && (self.u0.det() - C64::new(1.0, 0.0)).norm() < 1e-10
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ANALYTIC_FD_STEP;

    #[test]
    fn scalar_jets_match_finite_differences() {
        let sources = [
            ScalarSource::Bump { amp: 1.3, x0: 0.5, y0: -0.3, width: 2.0 },
            ScalarSource::CylindricalPulse { amp: 1.0, b: 0.7 },
        ];
        let e = ANALYTIC_FD_STEP;
        for s in sources {
            let (x, y, t) = (0.37, -0.81, 1.21);
            let jet = s.jet(x, y, t);
            let fd = |fa: f64, fb: f64| (fa - fb) / (2.0 * e);
            assert!((jet.jx - fd(s.jet(x + e, y, t).j, s.jet(x - e, y, t).j)).abs() < 1e-6);
            assert!((jet.jy - fd(s.jet(x, y + e, t).j, s.jet(x, y - e, t).j)).abs() < 1e-6);
            assert!((jet.jt - fd(s.jet(x, y, t + e).j, s.jet(x, y, t - e).j)).abs() < 1e-6);
        }
    }

    #[test]
    fn pulse_solves_the_wave_equation() {
        let s = ScalarSource::CylindricalPulse { amp: 1.0, b: 0.7 };
        let (x, y, t) = (0.9, -0.4, 1.3);
        let e = 1e-3;
        let second = |f: &dyn Fn(f64) -> f64| (f(e) - 2.0 * f(0.0) + f(-e)) / (e * e);
        let jtt = second(&|d| s.jet(x, y, t + d).j);
        let jxx = second(&|d| s.jet(x + d, y, t).j);
        let jyy = second(&|d| s.jet(x, y + d, t).j);
        assert!((jtt - jxx - jyy).abs() < 1e-5, "wave residual {}", jtt - jxx - jyy);
    }

    #[test]
    fn sigma_field_jet_consistency() {
        let f = SigmaPhaseField::new(0.8, 3.0);
        let (x, y, t) = (1.1, -0.6, 0.0);
        let jet = f.jet(x, y, t);
        let e = 1e-5;
        let fd = f.eval(x + e, y, t).sub(&f.eval(x - e, y, t)).scale(C64::new(0.5 / e, 0.0));
        assert!(jet.jx.sub(&fd).sup_norm() < 1e-8);
        assert!(f.eval(x, y, t).unitary_defect() < 1e-14);
    }
}
