//! Thin dense linear-algebra layer over the system LAPACK (zgesv / zgeev /
//! zgecon), storing matrices as row-major `ndarray::Array2<Complex64>`.

use crate::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

extern "C" {
    fn zgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut Complex64,
        ldb: *const i32,
        info: *mut i32,
    );
    fn zgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        w: *mut Complex64,
        vl: *mut Complex64,
        ldvl: *const i32,
        vr: *mut Complex64,
        ldvr: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
}

/// Column-major copy of a row-major matrix.
fn to_col_major(a: &Array2<Complex64>) -> Vec<Complex64> {
    let (m, n) = a.dim();
    let mut out = vec![Complex64::default(); m * n];
    for j in 0..n {
        for i in 0..m {
            out[j * m + i] = a[[i, j]];
        }
    }
    out
}

/// Solve `A x = b` for several right-hand sides via LU (zgesv).
///
/// `a` is n×n, `b` is a list of length-n right-hand sides; returns the
/// solutions in the same order.
pub fn solve(a: &Array2<Complex64>, rhs: &[Array1<Complex64>]) -> Result<Vec<Array1<Complex64>>> {
    let (m, n) = a.dim();
    if m != n {
        return Err(Error::Numerical(format!("solve: matrix is {m}x{n}, not square")));
    }
    for b in rhs {
        if b.len() != n {
            return Err(Error::Numerical("solve: rhs length mismatch".into()));
        }
    }
    let nrhs = rhs.len();
    let mut af = to_col_major(a);
    let mut bf = vec![Complex64::default(); n * nrhs];
    for (j, b) in rhs.iter().enumerate() {
        for i in 0..n {
            bf[j * n + i] = b[i];
        }
    }
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    let ni = n as i32;
    let nrhsi = nrhs as i32;
    unsafe {
        zgesv_(
            &ni,
            &nrhsi,
            af.as_mut_ptr(),
            &ni,
            ipiv.as_mut_ptr(),
            bf.as_mut_ptr(),
            &ni,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerical(format!(
            "zgesv failed (info = {info}); matrix is singular or ill-conditioned"
        )));
    }
    Ok((0..nrhs)
        .map(|j| Array1::from_iter((0..n).map(|i| bf[j * n + i])))
        .collect())
}

/// Convenience wrapper for a single right-hand side.
pub fn solve_one(a: &Array2<Complex64>, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    Ok(solve(a, std::slice::from_ref(b))?.pop().unwrap())
}

/// Eigenvalues of a general complex matrix (zgeev, no eigenvectors).
pub fn eigenvalues(a: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    let (m, n) = a.dim();
    if m != n {
        return Err(Error::Numerical("eigenvalues: matrix not square".into()));
    }
    let mut af = to_col_major(a);
    let mut w = vec![Complex64::default(); n];
    let mut rwork = vec![0f64; 2 * n];
    let mut info = 0i32;
    let ni = n as i32;
    let none = b'N';
    let ldv = 1i32;
    let lwork = (4 * n.max(1)) as i32;
    let mut work = vec![Complex64::default(); lwork as usize];
    unsafe {
        zgeev_(
            &none,
            &none,
            &ni,
            af.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            std::ptr::null_mut(),
            &ldv,
            std::ptr::null_mut(),
            &ldv,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerical(format!("zgeev failed (info = {info})")));
    }
    Ok(w)
}

/// Residual `‖A x − b‖ / ‖b‖` of a proposed solution.
pub fn relative_residual(a: &Array2<Complex64>, x: &Array1<Complex64>, b: &Array1<Complex64>) -> f64 {
    let ax = a.dot(x);
    let num: f64 = ax
        .iter()
        .zip(b.iter())
        .map(|(u, v)| (u - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// One-norm condition estimate via explicit inverse action on unit vectors is
/// too costly at scale; report the ratio of extreme absolute eigenvalues of
/// small matrices instead. Intended for screen-operator diagnostics only.
pub fn condition_estimate(a: &Array2<Complex64>) -> Result<f64> {
    let ev = eigenvalues(a)?;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for e in ev {
        let m = e.norm();
        lo = lo.min(m);
        hi = hi.max(m);
    }
    if lo == 0.0 {
        return Err(Error::Numerical("singular matrix in condition estimate".into()));
    }
    Ok(hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solve_small_system() {
        let a = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)]
        ];
        let b = Array1::from(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let x = solve_one(&a, &b).unwrap();
        assert!(relative_residual(&a, &x, &b) < 1e-14);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)]
        ];
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap());
        assert!((ev[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }
}
