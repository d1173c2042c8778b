//! Small dense complex matrices.
//!
//! Fields in this model are U(1) or SU(2) valued, so the workhorse sizes are
//! 1x1 and 2x2. Storage is inline up to 2x2 (no heap traffic in the transport
//! and current kernels); larger sizes spill to the heap and stay correct.

use crate::error::{Error, Result};
use num_complex::Complex64;
use smallvec::SmallVec;

pub type C64 = Complex64;

/// Row-major n x n complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: SmallVec<[C64; 4]>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: smallvec::smallvec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), n * n);
        CMatrix {
            n,
            data: SmallVec::from_slice(entries),
        }
    }

    /// 1x1 wrapper, used by the U(1) diagnostics.
    pub fn scalar(v: C64) -> Self {
        CMatrix {
            n: 1,
            data: smallvec::smallvec![v],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let mut out = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus. The field invariants in this crate are stated
    /// in this norm.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[r * n + k] * rhs.data[k * n + c];
                }
                out.data[r * n + c] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// self += s * rhs, without temporaries; the RK4 kernels lean on this.
    pub fn add_scaled_assign(&mut self, s: C64, rhs: &CMatrix) {
        debug_assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += s * *b;
        }
    }

    pub fn commutator(&self, rhs: &CMatrix) -> CMatrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Gauss-Jordan inverse with partial pivoting. 1x1 and 2x2 take closed
    /// forms.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        match n {
            1 => {
                let d = self.data[0];
                if d.norm() < 1e-300 {
                    return Err(Error::Degenerate("1x1 matrix is zero".into()));
                }
                Ok(CMatrix::scalar(d.inv()))
            }
            2 => {
                let (a, b, c, d) = (self.data[0], self.data[1], self.data[2], self.data[3]);
                let det = a * d - b * c;
                let scale = self.sup_norm();
                if det.norm() < 1e-300 * (1.0 + scale * scale) {
                    return Err(Error::Degenerate(format!(
                        "2x2 determinant {:.3e} too small",
                        det.norm()
                    )));
                }
                let inv = det.inv();
                Ok(CMatrix::from_rows(2, &[d * inv, -b * inv, -c * inv, a * inv]))
            }
            _ => self.inverse_gauss(),
        }
    }

    fn inverse_gauss(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let (mut piv, mut best) = (col, a[(col, col)].norm());
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    piv = r;
                    best = v;
                }
            }
            if best < 1e-300 {
                return Err(Error::Degenerate(format!("pivot {col} vanished")));
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(col * n + c, piv * n + c);
                    inv.data.swap(col * n + c, piv * n + c);
                }
            }
            let d = a[(col, col)].inv();
            for c in 0..n {
                a[(col, c)] *= d;
                inv[(col, c)] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.norm() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let av = a[(col, c)];
                    let iv = inv[(col, c)];
                    a[(r, c)] -= f * av;
                    inv[(r, c)] -= f * iv;
                }
            }
        }
        Ok(inv)
    }

    /// sup-norm of (A^dag A - I); zero for unitary matrices.
    pub fn unitary_defect(&self) -> f64 {
        self.conj_transpose().mul(self).sub(&CMatrix::identity(self.n)).sup_norm()
    }

    pub fn det(&self) -> C64 {
        match self.n {
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => {
                // LU with partial pivoting
                let n = self.n;
                let mut a = self.clone();
                let mut det = C64::new(1.0, 0.0);
                for col in 0..n {
                    let (mut piv, mut best) = (col, a[(col, col)].norm());
                    for r in col + 1..n {
                        if a[(r, col)].norm() > best {
                            piv = r;
                            best = a[(r, col)].norm();
                        }
                    }
                    if best == 0.0 {
                        return C64::new(0.0, 0.0);
                    }
                    if piv != col {
                        for c in 0..n {
                            a.data.swap(col * n + c, piv * n + c);
                        }
                        det = -det;
                    }
                    det *= a[(col, col)];
                    let d = a[(col, col)].inv();
                    for r in col + 1..n {
                        let f = a[(r, col)] * d;
                        for c in col..n {
                            let v = a[(col, c)];
                            a[(r, c)] -= f * v;
                        }
                    }
                }
                det
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

/// Nearest unitary in Frobenius norm: the polar factor U = M (M^dag M)^{-1/2}.
///
/// Newton iteration X <- (X + X^{-dag})/2 converges quadratically to the
/// polar factor for nonsingular input; the determinant phase is the input's.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_finite() {
        return Err(Error::Degenerate("non-finite entries".into()));
    }
    let scale = m.sup_norm();
    if scale == 0.0 {
        return Err(Error::Degenerate("zero matrix has no polar factor".into()));
    }
    // effective singularity gate: sigma_min/sigma_max > ~1e-12 is required;
    // cheap proxy via ||M|| * ||M^{-1}||
    let minv = m.inverse()?;
    if m.frobenius_norm() * minv.frobenius_norm() > 1e13 {
        return Err(Error::Degenerate(format!(
            "condition estimate {:.3e} beyond polar range",
            m.frobenius_norm() * minv.frobenius_norm()
        )));
    }
    let mut x = m.clone();
    for _ in 0..60 {
        let xid = x.inverse()?.conj_transpose();
        let mut next = x.add(&xid);
        next = next.scale(C64::new(0.5, 0.0));
        let step = next.sub(&x).sup_norm();
        x = next;
        if step < 1e-15 {
            break;
        }
    }
    if x.unitary_defect() > 1e-12 {
        return Err(Error::Degenerate(format!(
            "polar iteration stalled, defect {:.3e}",
            x.unitary_defect()
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(n: usize, seed: &mut u64) -> CMatrix {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = C64::new(next(), next());
            }
        }
        m
    }

    #[test]
    fn inverse_roundtrip() {
        let mut seed = 7u64;
        for n in [1usize, 2, 3, 4] {
            let m = random_matrix(n, &mut seed).add(&CMatrix::identity(n).scale(C64::new(3.0, 0.0)));
            let prod = m.mul(&m.inverse().unwrap());
            assert!(prod.sub(&CMatrix::identity(n)).sup_norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn polar_of_unitary_is_identity_map() {
        // U = exp(i a sigma_1)-style rotation
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let u = CMatrix::from_rows(
            2,
            &[
                C64::new(c, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, s),
                C64::new(c, 0.0),
            ],
        );
        let p = polar_unitary(&u).unwrap();
        assert!(p.sub(&u).sup_norm() < 1e-14);
    }

    #[test]
    fn polar_of_scaled_identity() {
        let m = CMatrix::identity(2).scale(C64::new(2.0, 0.0));
        let p = polar_unitary(&m).unwrap();
        assert!(p.sub(&CMatrix::identity(2)).sup_norm() < 1e-14);
    }

    #[test]
    fn polar_rejects_singular() {
        let m = CMatrix::from_rows(
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(polar_unitary(&m).is_err());
    }

    #[test]
    fn polar_is_idempotent_and_near() {
        let mut seed = 42u64;
        for _ in 0..20 {
            let u0 = polar_unitary(
                &random_matrix(2, &mut seed).add(&CMatrix::identity(2).scale(C64::new(2.5, 0.0))),
            )
            .unwrap();
            // perturb a unitary by 0.01 and re-project
            let e = random_matrix(2, &mut seed);
            let m = u0.add(&e.scale(C64::new(0.01 / e.sup_norm().max(1e-30), 0.0)));
            let v = polar_unitary(&m).unwrap();
            assert!(v.unitary_defect() <= 1e-12);
            assert!(v.sub(&u0).sup_norm() <= 0.03);
            let v2 = polar_unitary(&v).unwrap();
            assert!(v2.sub(&v).sup_norm() <= 1e-13);
        }
    }
}
