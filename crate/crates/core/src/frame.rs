//! Orthonormal-frame curvature data in dimension four.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `R[a][b][c][d] = g(R(E_a, E_b) E_c, E_d)` with
//!   `R(X, Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_[X,Y]`, so the sectional curvature of
//!   the plane `E_a ∧ E_b` is `R[a][b][b][a]`.
//! * Two-form basis `e01, e02, e03, e23, e31, e12`. The curvature operator is
//!   `𝓡[(ab)][(cd)] = R[a][b][d][c]`; its diagonal holds coordinate-plane
//!   sectional curvatures and it equals `(s/12)·I` on the unit round sphere.
//! * Orientation `e0 ∧ e1 ∧ e2 ∧ e3`, so `*e0i = ejk` for cyclic `(i, j, k)`
//!   and `Λ± = span{(e0i ± ejk)/√2}`.
//! * `|W±|²` is the squared Frobenius norm of `W±` as an endomorphism of
//!   `Λ±`; `|r̊|²` is the squared Frobenius norm of the trace-free Ricci
//!   matrix. With these norms the integrands
//!   `(2|W₊|² + s²/24 − |r̊|²/2)/4π²` and `(|W₊|² − |W₋|²)/12π²` integrate to
//!   `2χ + 3τ` and `τ` (locked by the round `S⁴` and `S² × S²` tests).
//!
//! Sectional extremes use Thorpe's trick: for a decomposable unit 2-form
//! `⟨*ω, ω⟩ = 0`, so `K ≥ λ_min(𝓡 + μ*)` for every `μ`, and in dimension four
//! the bound is attained at the optimal `μ`. `λ_min(𝓡 + μ*)` is concave in
//! `μ`, so a golden-section search finds that optimum; the maximum is
//! symmetric.

use serde::{Deserialize, Serialize};

use crate::linalg::{frobenius_sq, golden_max, max_abs, sym_eigenvalues, trace, zeros, Mat};
use crate::scalar::Real;

pub type Riemann4<T> = [[[[T; 4]; 4]; 4]; 4];

/// Index pairs of the two-form basis.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureFrame<T> {
    pub riemann: Mat<T, 6>,
    pub ricci: Mat<T, 4>,
    pub scalar: T,
    pub w_plus_norm2: T,
    pub w_minus_norm2: T,
    pub ricci_traceless_norm2: T,
    pub sec_min: T,
    pub sec_max: T,
}

/// The `Λ+ ⊕ Λ−` blocks of a curvature operator.
#[derive(Clone, Copy, Debug)]
pub struct HodgeBlocks<T> {
    pub a: Mat<T, 3>,
    pub b: Mat<T, 3>,
    pub c: Mat<T, 3>,
}

fn pair_sign(a: usize, b: usize) -> Option<(usize, bool)> {
    PAIRS.iter().enumerate().find_map(|(i, &(p, q))| {
        if (p, q) == (a, b) {
            Some((i, true))
        } else if (q, p) == (a, b) {
            Some((i, false))
        } else {
            None
        }
    })
}

/// Curvature operator from the full tensor.
pub fn curvature_operator<T: Real>(r: &Riemann4<T>) -> Mat<T, 6> {
    let mut op = zeros();
    for (i, &(a, b)) in PAIRS.iter().enumerate() {
        for (j, &(c, d)) in PAIRS.iter().enumerate() {
            op[i][j] = r[a][b][d][c];
        }
    }
    op
}

/// Full tensor from a curvature operator (inverse of [`curvature_operator`]).
pub fn riemann_from_operator<T: Real>(op: &Mat<T, 6>) -> Riemann4<T> {
    let mut r = [[[[T::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let Some((i, sab)) = pair_sign(a, b) else { continue };
            for c in 0..4 {
                for d in 0..4 {
                    let Some((j, sdc)) = pair_sign(d, c) else { continue };
                    let v = op[i][j];
                    r[a][b][c][d] = if sab == sdc { v } else { -v };
                }
            }
        }
    }
    r
}

pub fn ricci_from_riemann<T: Real>(r: &Riemann4<T>) -> Mat<T, 4> {
    let mut ric = zeros();
    for b in 0..4 {
        for c in 0..4 {
            ric[b][c] = (0..4).map(|a| r[a][b][c][a]).fold(T::zero(), |x, y| x + y);
        }
    }
    ric
}

pub fn hodge_blocks<T: Real>(op: &Mat<T, 6>) -> HodgeBlocks<T> {
    let half = T::lit(0.5);
    let mut a = zeros();
    let mut b = zeros();
    let mut c = zeros();
    for i in 0..3 {
        for j in 0..3 {
            let (p, q, pp, qq) = (op[i][j], op[i][j + 3], op[i + 3][j], op[i + 3][j + 3]);
            a[i][j] = half * (p + q + pp + qq);
            b[i][j] = half * (p - q + pp - qq);
            c[i][j] = half * (p - q - pp + qq);
        }
    }
    HodgeBlocks { a, b, c }
}

fn traceless_sq<T: Real, const N: usize>(m: &Mat<T, N>) -> T {
    let mut m = *m;
    let t = trace(&m) / T::from_usize_lossy(N);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = row[i] - t;
    }
    frobenius_sq(&m)
}

fn shifted<T: Real>(blocks: &HodgeBlocks<T>, mu: T) -> Mat<T, 6> {
    let mut m = zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = blocks.a[i][j];
            m[i][j + 3] = blocks.b[i][j];
            m[i + 3][j] = blocks.b[j][i];
            m[i + 3][j + 3] = blocks.c[i][j];
        }
        m[i][i] = m[i][i] + mu;
        m[i + 3][i + 3] = m[i + 3][i + 3] - mu;
    }
    m
}

/// `(min, max)` of the sectional curvature over all 2-planes.
pub fn sectional_extremes<T: Real>(op: &Mat<T, 6>) -> (T, T) {
    let blocks = hodge_blocks(op);
    let norm = frobenius_sq(op).sqrt();
    if norm == T::zero() {
        return (T::zero(), T::zero());
    }
    let span = T::lit(2.0) * norm + T::one();
    // the value error at a kinked maximum is linear in the bracket width
    let tol = T::lit(8.0) * T::epsilon() * span;
    let (_, lo) = golden_max(-span, span, tol, |mu| sym_eigenvalues(&shifted(&blocks, mu))[0]);
    let (_, neg_hi) = golden_max(-span, span, tol, |mu| -sym_eigenvalues(&shifted(&blocks, mu))[5]);
    (lo, -neg_hi)
}

/// Sectional curvature of the plane spanned by two (not necessarily
/// orthonormal) vectors.
pub fn sectional<T: Real>(r: &Riemann4<T>, x: &[T; 4], y: &[T; 4]) -> T {
    let mut num = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    num = num + r[a][b][c][d] * x[a] * y[b] * y[c] * x[d];
                }
            }
        }
    }
    let dot = |u: &[T; 4], v: &[T; 4]| (0..4).map(|i| u[i] * v[i]).fold(T::zero(), |p, q| p + q);
    let area2 = dot(x, x) * dot(y, y) - dot(x, y) * dot(x, y);
    num / area2
}

impl<T: Real> CurvatureFrame<T> {
    pub fn from_riemann(r: &Riemann4<T>) -> Self {
        let riemann = curvature_operator(r);
        let ricci = ricci_from_riemann(r);
        let scalar = trace(&ricci);
        let blocks = hodge_blocks(&riemann);
        let (sec_min, sec_max) = sectional_extremes(&riemann);
        Self {
            riemann,
            ricci,
            scalar,
            w_plus_norm2: traceless_sq(&blocks.a),
            w_minus_norm2: traceless_sq(&blocks.c),
            ricci_traceless_norm2: traceless_sq(&ricci),
            sec_min,
            sec_max,
        }
    }

    pub fn flat() -> Self {
        Self::from_riemann(&[[[[T::zero(); 4]; 4]; 4]; 4])
    }

    /// Ricci matrix recovered by contracting the curvature operator.
    pub fn ricci_from_operator(&self) -> Mat<T, 4> {
        ricci_from_riemann(&riemann_from_operator(&self.riemann))
    }

    pub fn max_abs_ricci(&self) -> T {
        max_abs(&self.ricci)
    }

    pub fn riemann_norm(&self) -> T {
        frobenius_sq(&self.riemann).sqrt()
    }

    pub fn hodge_blocks(&self) -> HodgeBlocks<T> {
        hodge_blocks(&self.riemann)
    }

    /// Same frame with the orientation reversed (swaps `W₊` and `W₋`).
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        std::mem::swap(&mut r.w_plus_norm2, &mut r.w_minus_norm2);
        r
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> CurvatureFrame<U> {
        let mut riemann = zeros();
        for i in 0..6 {
            for j in 0..6 {
                riemann[i][j] = f(self.riemann[i][j]);
            }
        }
        let mut ricci = zeros();
        for i in 0..4 {
            for j in 0..4 {
                ricci[i][j] = f(self.ricci[i][j]);
            }
        }
        CurvatureFrame {
            riemann,
            ricci,
            scalar: f(self.scalar),
            w_plus_norm2: f(self.w_plus_norm2),
            w_minus_norm2: f(self.w_minus_norm2),
            ricci_traceless_norm2: f(self.ricci_traceless_norm2),
            sec_min: f(self.sec_min),
            sec_max: f(self.sec_max),
        }
    }
}
