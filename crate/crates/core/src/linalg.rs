//! Dense complex linear-algebra helpers shared by the solvers.
//!
//! Eigenproblems go to the system LAPACK (`zgeev`); nalgebra supplies the
//! dense matrix type, LU solves and the matrix exponential.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues and right eigenvectors (as unit-norm columns) of a square matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

type Lc = lapack_sys::__BindgenComplex<f64>;

fn as_lapack(p: *mut C64) -> *mut Lc {
    // Complex64 is #[repr(C)] { re, im }, the same layout as the binding type.
    p.cast()
}

/// LAPACK `zgeev` (balancing + Hessenberg QR). nalgebra matrices are
/// column-major, which is what Fortran expects.
fn geev(m: &CMat, vectors: bool, context: &dyn Fn() -> String) -> Result<Eigen> {
    assert!(m.is_square(), "eigendecomposition needs a square matrix");
    let n = m.nrows();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenNoConvergence { context: format!("{} (non-finite input)", context()) });
    }
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let ni = n as i32;
    let mut a = m.clone();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let ldvr = if vectors { ni } else { 1 };
    let mut vr = CMat::zeros(if vectors { n } else { 1 }, if vectors { n } else { 1 });
    let mut vl = [C64::new(0.0, 0.0)];
    let mut rwork = vec![0.0f64; 2 * n];
    let jobvl = b'N' as std::ffi::c_char;
    let jobvr = (if vectors { b'V' } else { b'N' }) as std::ffi::c_char;
    let mut info = 0;

    let mut call = |work: &mut [C64], lwork: i32, info: &mut i32| unsafe {
        lapack_sys::zgeev_(
            &jobvl,
            &jobvr,
            &ni,
            as_lapack(a.as_mut_ptr()),
            &ni,
            as_lapack(w.as_mut_ptr()),
            as_lapack(vl.as_mut_ptr()),
            &1,
            as_lapack(vr.as_mut_ptr()),
            &ldvr,
            as_lapack(work.as_mut_ptr()),
            &lwork,
            rwork.as_mut_ptr(),
            info,
        )
    };
    let mut query = [C64::new(0.0, 0.0)];
    call(&mut query, -1, &mut info);
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![C64::new(0.0, 0.0); lwork];
    call(&mut work, lwork as i32, &mut info);
    if info != 0 {
        return Err(Error::EigenNoConvergence { context: format!("{} (zgeev info = {info})", context()) });
    }
    Ok(Eigen { values: w, vectors: if vectors { vr } else { CMat::zeros(0, 0) } })
}

/// All eigenvalues of `m`.
pub fn eigenvalues(m: &CMat, context: &dyn Fn() -> String) -> Result<Vec<C64>> {
    Ok(geev(m, false, context)?.values)
}

/// Full eigendecomposition; eigenvectors are unit-norm columns.
pub fn eig(m: &CMat, context: &dyn Fn() -> String) -> Result<Eigen> {
    geev(m, true, context)
}

/// Rescales `v` to unit norm and rotates its global phase so that the
/// largest-magnitude component is real and positive.
pub fn fix_phase(v: &mut CVec) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    let (imax, _) = v.iter().enumerate().fold((0, -1.0), |(bi, bm), (i, z)| {
        if z.norm() > bm {
            (i, z.norm())
        } else {
            (bi, bm)
        }
    });
    let pivot = v[imax];
    let phase = pivot.conj() / pivot.norm();
    *v *= phase / norm;
}

/// Greedy nearest-neighbour pairing of two multisets of complex numbers.
///
/// Returns the largest distance within the pairing, or `f64::INFINITY` when
/// the multisets differ in size. Candidates are searched in order of real
/// part so the cost stays near `n log n` for well-separated data.
pub fn pairing_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let mut sorted_b: Vec<C64> = b.to_vec();
    sorted_b.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut order_a: Vec<C64> = a.to_vec();
    order_a.sort_by(|x, y| x.norm().total_cmp(&y.norm()));

    let n = sorted_b.len();
    // Skip pointers over consumed entries: right[i] is the first unused index >= i
    // (n when none), left[i] is one past the last unused index <= i-1 (0 when none).
    let mut right: Vec<usize> = (0..=n).collect();
    let mut left: Vec<usize> = (0..=n).collect();

    fn find(p: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while p[root] != root {
            root = p[root];
        }
        let mut cur = i;
        while p[cur] != root {
            let next = p[cur];
            p[cur] = root;
            cur = next;
        }
        root
    }

    let mut worst: f64 = 0.0;
    for z in order_a {
        let pos = sorted_b.partition_point(|w| w.re < z.re);
        let mut best = f64::INFINITY;
        let mut best_idx = usize::MAX;

        let mut i = find(&mut right, pos);
        while i < n {
            let w = sorted_b[i];
            if w.re - z.re > best {
                break;
            }
            let d = (w - z).norm();
            if d < best {
                best = d;
                best_idx = i;
            }
            i = find(&mut right, i + 1);
        }
        // left[] stores indices shifted by one so that 0 means "nothing left".
        let mut j = find(&mut left, pos);
        while j > 0 {
            let w = sorted_b[j - 1];
            if z.re - w.re > best {
                break;
            }
            let d = (w - z).norm();
            if d < best {
                best = d;
                best_idx = j - 1;
            }
            j = find(&mut left, j - 1);
        }

        debug_assert!(best_idx != usize::MAX);
        right[best_idx] = best_idx + 1;
        left[best_idx + 1] = best_idx;
        worst = worst.max(best);
    }
    worst
}

/// `(e^{σt} − 1)/σ`, continuous at `σ = 0`.
pub fn phi1(sigma: C64, t: f64) -> C64 {
    let x = sigma * t;
    if x.norm() < 1e-5 {
        // Taylor series: t (1 + x/2 + x²/6 + x³/24)
        C64::new(t, 0.0) * (C64::new(1.0, 0.0) + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    } else {
        (x.exp() - C64::new(1.0, 0.0)) / sigma
    }
}
