//! Thin safe wrappers over the system LAPACK for the dense kernels the
//! spectral layer needs: nonsymmetric complex eigendecomposition (`zgeev`),
//! log-determinants via LU (`zgetrf`), singular values (`zgesvd`) and linear
//! solves against a factorized basis (`zgetrs`).
//!
//! All wrappers copy into column-major scratch buffers, so callers keep
//! ordinary row-major `ndarray` types.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{CoreError, Result};

// Complex64 is repr(C) with (re, im) layout, matching LAPACK's complex*16.
extern "C" {
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut C64,
        vl: *mut C64,
        ldvl: *const i32,
        vr: *mut C64,
        ldvr: *const i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );

    fn zgetrf_(
        m: *const i32,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        ipiv: *mut i32,
        info: *mut i32,
    );

    fn zgetrs_(
        trans: *const u8,
        n: *const i32,
        nrhs: *const i32,
        a: *const C64,
        lda: *const i32,
        ipiv: *const i32,
        b: *mut C64,
        ldb: *const i32,
        info: *mut i32,
    );

    fn zgecon_(
        norm: *const u8,
        n: *const i32,
        a: *const C64,
        lda: *const i32,
        anorm: *const f64,
        rcond: *mut f64,
        work: *mut C64,
        rwork: *mut f64,
        info: *mut i32,
    );
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let (rows, cols) = a.dim();
    let mut buf = vec![C64::new(0.0, 0.0); rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            buf[i + j * rows] = a[[i, j]];
        }
    }
    buf
}

pub fn one_norm(a: &Array2<C64>) -> f64 {
    let (rows, cols) = a.dim();
    let mut best: f64 = 0.0;
    for j in 0..cols {
        let mut s = 0.0;
        for i in 0..rows {
            s += a[[i, j]].norm();
        }
        best = best.max(s);
    }
    best
}

/// Eigenvalues (and optionally right eigenvectors, as columns) of a general
/// complex matrix.
pub fn eig(a: &Array2<C64>, want_vectors: bool) -> Result<(Vec<C64>, Option<Array2<C64>>)> {
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols, "eig requires a square matrix");
    let n = rows;
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let jobvl = b'N';
    let jobvr = if want_vectors { b'V' } else { b'N' };
    let ldvr = if want_vectors { ni } else { 1 };
    let mut vr = vec![C64::new(0.0, 0.0); if want_vectors { n * n } else { 1 }];
    let mut vl = [C64::new(0.0, 0.0)];
    let ldvl = 1i32;
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0i32;

    // workspace query
    let mut wkopt = [C64::new(0.0, 0.0)];
    let lwork_query = -1i32;
    unsafe {
        zgeev_(
            &jobvl,
            &jobvr,
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &ldvl,
            vr.as_mut_ptr(),
            &ldvr,
            wkopt.as_mut_ptr(),
            &lwork_query,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Lapack { routine: "zgeev (workspace query)", info });
    }
    let lwork = wkopt[0].re as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    unsafe {
        zgeev_(
            &jobvl,
            &jobvr,
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            vl.as_mut_ptr(),
            &ldvl,
            vr.as_mut_ptr(),
            &ldvr,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Eigensolve { info, n, one_norm: one_norm(a) });
    }
    let vectors = if want_vectors {
        let mut v = Array2::<C64>::zeros((n, n));
        for j in 0..n {
            for i in 0..n {
                v[[i, j]] = vr[i + j * n];
            }
        }
        Some(v)
    } else {
        None
    };
    Ok((w, vectors))
}

/// Unit-modulus sign and natural log of |det| via LU factorization.
///
/// Avoids overflow for large matrices where the determinant itself would not
/// fit in an f64.
pub fn sln_det(a: &Array2<C64>) -> Result<(C64, f64)> {
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols, "sln_det requires a square matrix");
    let n = rows;
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgetrf_(&ni, &ni, af.as_mut_ptr(), &ni, ipiv.as_mut_ptr(), &mut info);
    }
    if info < 0 {
        return Err(CoreError::Lapack { routine: "zgetrf", info });
    }
    if info > 0 {
        // exact singularity: a pivot is zero
        return Ok((C64::new(0.0, 0.0), f64::NEG_INFINITY));
    }
    let mut ln_abs = 0.0f64;
    let mut phase = C64::new(1.0, 0.0);
    for i in 0..n {
        let d = af[i + i * n];
        let r = d.norm();
        ln_abs += r.ln();
        phase *= d / r;
        if ipiv[i] != (i as i32 + 1) {
            phase = -phase;
        }
    }
    Ok((phase, ln_abs))
}

/// LU-factorized square matrix for repeated linear solves.
pub struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    ipiv: Vec<i32>,
}

pub fn lu_factorize(a: &Array2<C64>) -> Result<LuFactors> {
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols);
    let n = rows;
    let ni = n as i32;
    let mut lu = to_col_major(a);
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgetrf_(&ni, &ni, lu.as_mut_ptr(), &ni, ipiv.as_mut_ptr(), &mut info);
    }
    if info != 0 {
        return Err(CoreError::Lapack { routine: "zgetrf", info });
    }
    Ok(LuFactors { n, lu, ipiv })
}

impl LuFactors {
    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        assert_eq!(rhs.len(), self.n);
        let ni = self.n as i32;
        let one = 1i32;
        let trans = b'N';
        let mut b = rhs.to_vec();
        let mut info = 0i32;
        unsafe {
            zgetrs_(
                &trans,
                &ni,
                &one,
                self.lu.as_ptr(),
                &ni,
                self.ipiv.as_ptr(),
                b.as_mut_ptr(),
                &ni,
                &mut info,
            );
        }
        if info != 0 {
            return Err(CoreError::Lapack { routine: "zgetrs", info });
        }
        Ok(b)
    }
}

/// Estimated one-norm condition number via LU and `zgecon`.
pub fn one_norm_condition(a: &Array2<C64>) -> Result<f64> {
    let (rows, cols) = a.dim();
    assert_eq!(rows, cols, "condition estimate requires a square matrix");
    let n = rows;
    let ni = n as i32;
    let anorm = one_norm(a);
    let mut lu = to_col_major(a);
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgetrf_(&ni, &ni, lu.as_mut_ptr(), &ni, ipiv.as_mut_ptr(), &mut info);
    }
    if info < 0 {
        return Err(CoreError::Lapack { routine: "zgetrf", info });
    }
    if info > 0 {
        return Ok(f64::INFINITY);
    }
    let norm = b'1';
    let mut rcond = 0.0f64;
    let mut work = vec![C64::new(0.0, 0.0); 2 * n];
    let mut rwork = vec![0.0f64; 2 * n];
    unsafe {
        zgecon_(
            &norm,
            &ni,
            lu.as_ptr(),
            &ni,
            &anorm,
            &mut rcond,
            work.as_mut_ptr(),
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(CoreError::Lapack { routine: "zgecon", info });
    }
    if rcond <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / rcond)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eig_of_diagonal() {
        let a = array![
            [C64::new(2.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 3.0)]
        ];
        let (mut w, _) = eig(&a, false).unwrap();
        w.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((w[0] - C64::new(0.0, 3.0)).norm() < 1e-14);
        assert!((w[1] - C64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvectors_satisfy_definition() {
        let a = array![
            [C64::new(1.0, 0.5), C64::new(0.3, -0.2)],
            [C64::new(0.0, 0.7), C64::new(-1.0, 0.1)]
        ];
        let (w, v) = eig(&a, true).unwrap();
        let v = v.unwrap();
        for j in 0..2 {
            for i in 0..2 {
                let lhs = a[[i, 0]] * v[[0, j]] + a[[i, 1]] * v[[1, j]];
                let rhs = w[j] * v[[i, j]];
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sln_det_matches_direct_product() {
        let a = array![
            [C64::new(1.0, 1.0), C64::new(0.0, 0.0)],
            [C64::new(2.0, 0.0), C64::new(0.0, -3.0)]
        ];
        let (sign, ln) = sln_det(&a).unwrap();
        let det = sign * ln.exp();
        let expect = C64::new(1.0, 1.0) * C64::new(0.0, -3.0);
        assert!((det - expect).norm() < 1e-12);
    }

    #[test]
    fn lu_solve_roundtrip() {
        let a = array![
            [C64::new(3.0, 0.0), C64::new(1.0, -1.0)],
            [C64::new(0.0, 2.0), C64::new(-1.0, 0.5)]
        ];
        let lu = lu_factorize(&a).unwrap();
        let x = [C64::new(1.0, 2.0), C64::new(-0.5, 0.25)];
        let b = [
            a[[0, 0]] * x[0] + a[[0, 1]] * x[1],
            a[[1, 0]] * x[0] + a[[1, 1]] * x[1],
        ];
        let got = lu.solve(&b).unwrap();
        assert!((got[0] - x[0]).norm() < 1e-12);
        assert!((got[1] - x[1]).norm() < 1e-12);
    }
}
