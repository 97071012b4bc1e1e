//! Fixed-size dense helpers for the small matrices that show up in curvature
//! work (4×4 Ricci, 6×6 curvature operators, 3×3 Weyl blocks).

use crate::scalar::Real;

pub type Mat<T, const N: usize> = [[T; N]; N];

pub fn zeros<T: Real, const N: usize>() -> Mat<T, N> {
    [[T::zero(); N]; N]
}

pub fn identity<T: Real, const N: usize>() -> Mat<T, N> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn trace<T: Real, const N: usize>(m: &Mat<T, N>) -> T {
    (0..N).map(|i| m[i][i]).fold(T::zero(), |a, b| a + b)
}

pub fn frobenius_sq<T: Real, const N: usize>(m: &Mat<T, N>) -> T {
    m.iter().flat_map(|row| row.iter()).fold(T::zero(), |acc, &x| acc + x * x)
}

pub fn max_abs<T: Real, const N: usize>(m: &Mat<T, N>) -> T {
    m.iter().flat_map(|row| row.iter()).fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eigenvalues<T: Real, const N: usize>(m: &Mat<T, N>) -> [T; N] {
    let mut a = *m;
    let scale = frobenius_sq(&a).sqrt();
    let eps = T::epsilon();
    if scale > T::zero() {
        for _sweep in 0..64 {
            let mut off = T::zero();
            for (p, row) in a.iter().enumerate() {
                for &x in row.iter().skip(p + 1) {
                    off = off + x * x;
                }
            }
            if off.sqrt() <= eps * eps.sqrt() * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a[p][q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = (t * t + T::one()).sqrt().recip();
                    let s = t * c;
                    for k in 0..N {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
    }
    let mut ev = [T::zero(); N];
    for (i, e) in ev.iter_mut().enumerate() {
        *e = a[i][i];
    }
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Maximum of a concave function on `[lo, hi]` by golden-section search.
pub fn golden_max<T: Real>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
