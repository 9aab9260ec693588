//! Fixed-size linear algebra on ℝ² and ℝ²ˣ².
//!
//! Everything here is closed form: the SVD of a 2×2 matrix is read off the
//! eigen-angle of `MᵀM`, so results are deterministic and bit-reproducible.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{check_tol, Result};

/// Default relative rank tolerance: `σᵢ` counts when `σᵢ > tol · max(1, σ₁)`.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };
    pub const E1: Vec2 = Vec2 { x: 1.0, y: 0.0 };
    pub const E2: Vec2 = Vec2 { x: 0.0, y: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// The unit vector `(cos a, sin a)`.
    #[inline]
    pub fn from_angle(a: f64) -> Self {
        Vec2::new(libm::cos(a), libm::sin(a))
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Euclidean 2D cross product `self.x * other.y - self.y * other.x`.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Outer product `self ⊗ other = self · otherᵀ`.
    #[inline]
    pub fn outer(self, other: Vec2) -> Mat2 {
        Mat2::from_cols(self * other.x, self * other.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// A 2×2 matrix stored by columns. For a gradient `Du`, column `j` is the
/// partial derivative along the `j`-th coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub cols: [Vec2; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { cols: [Vec2::ZERO, Vec2::ZERO] };
    pub const IDENTITY: Mat2 = Mat2 { cols: [Vec2::E1, Vec2::E2] };

    #[inline]
    pub const fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat2 { cols: [c0, c1] }
    }

    /// Builds a matrix from row-major entries `[[a, b], [c, d]]`.
    #[inline]
    pub const fn from_rows(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::from_cols(Vec2::new(a, c), Vec2::new(b, d))
    }

    /// Entry at row `r`, column `c`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let col = self.cols[c];
        if r == 0 {
            col.x
        } else {
            col.y
        }
    }

    #[inline]
    pub fn col(&self, c: usize) -> Vec2 {
        self.cols[c]
    }

    #[inline]
    pub fn transpose(&self) -> Mat2 {
        Mat2::from_rows(self.cols[0].x, self.cols[0].y, self.cols[1].x, self.cols[1].y)
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        self.cols[0] * v.x + self.cols[1] * v.y
    }

    #[inline]
    pub fn mul_mat(&self, rhs: &Mat2) -> Mat2 {
        Mat2::from_cols(self.mul_vec(rhs.cols[0]), self.mul_vec(rhs.cols[1]))
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::from_cols(self.cols[0] * s, self.cols[1] * s)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.cols[0].cross(self.cols[1])
    }

    #[inline]
    pub fn frobenius_sq(&self) -> f64 {
        self.cols[0].norm_sq() + self.cols[1].norm_sq()
    }

    #[inline]
    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.frobenius_sq())
    }

    pub fn is_finite(&self) -> bool {
        self.cols[0].is_finite() && self.cols[1].is_finite()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::from_cols(self.cols[0] + rhs.cols[0], self.cols[1] + rhs.cols[1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::from_cols(self.cols[0] - rhs.cols[0], self.cols[1] - rhs.cols[1])
    }
}

/// Singular value decomposition `M = σ₁ u₁v₁ᵀ + σ₂ u₂v₂ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Svd2 {
    pub sigma1: f64,
    pub sigma2: f64,
    pub u1: Vec2,
    pub u2: Vec2,
    pub v1: Vec2,
    pub v2: Vec2,
}

impl Svd2 {
    pub fn reconstruct(&self) -> Mat2 {
        self.u1.outer(self.v1).scale(self.sigma1) + self.u2.outer(self.v2).scale(self.sigma2)
    }

    /// Number of singular values above `tol · max(1, σ₁)`.
    pub fn rank(&self, tol: f64) -> u8 {
        let thr = tol * self.sigma1.max(1.0);
        (self.sigma1 > thr) as u8 + (self.sigma2 > thr) as u8
    }

    /// Scale-aware rank indicator `σ₂ / max(1, σ₁)`; zero exactly when the
    /// matrix is rank deficient.
    pub fn indicator(&self) -> f64 {
        self.sigma2 / self.sigma1.max(1.0)
    }
}

fn canonical_sign(u: &mut Vec2, v: &mut Vec2) {
    if u.x < 0.0 || (u.x == 0.0 && u.y < 0.0) {
        *u = -*u;
        *v = -*v;
    }
}

/// Closed-form SVD of a 2×2 matrix.
///
/// Right singular vectors come from the eigen-angle of `MᵀM`; the left ones
/// are the normalized images. Each `uᵢ` has a nonnegative first nonzero
/// component. The zero matrix maps to `σ₁ = σ₂ = 0` with canonical bases.
pub fn svd2(m: &Mat2) -> Svd2 {
    let [c0, c1] = m.cols;
    let a = c0.norm_sq();
    let b = c0.dot(c1);
    let d = c1.norm_sq();
    if a + d == 0.0 {
        return Svd2 { sigma1: 0.0, sigma2: 0.0, u1: Vec2::E1, u2: Vec2::E2, v1: Vec2::E1, v2: Vec2::E2 };
    }

    let theta = 0.5 * libm::atan2(2.0 * b, a - d);
    let mut v1 = Vec2::from_angle(theta);
    let mut v2 = v1.perp();
    let w1 = m.mul_vec(v1);
    let w2 = m.mul_vec(v2);

    let (mut w1, mut w2) = (w1, w2);
    if w2.norm_sq() > w1.norm_sq() {
        core::mem::swap(&mut w1, &mut w2);
        core::mem::swap(&mut v1, &mut v2);
    }
    let sigma1 = w1.norm();
    let mut u1 = w1 * (1.0 / sigma1);
    // M v₂ is orthogonal to M v₁; measure it along u₁⊥ so a vanishing σ₂
    // still yields an orthonormal left basis.
    let s = u1.perp().dot(w2);
    let mut u2 = if s < 0.0 { -u1.perp() } else { u1.perp() };
    let sigma2 = s.abs();

    canonical_sign(&mut u1, &mut v1);
    canonical_sign(&mut u2, &mut v2);
    Svd2 { sigma1, sigma2, u1, u2, v1, v2 }
}

/// Numerical rank with relative tolerance: counts `σᵢ > tol · max(1, σ₁)`.
pub fn rank_eps(m: &Mat2, tol: f64) -> Result<u8> {
    check_tol(tol)?;
    Ok(svd2(m).rank(tol))
}

/// Orthogonal projection onto the nullspace of `Mᵀ`, i.e. onto the
/// orthogonal complement of the range of `M`.
pub fn nullspace_projection(m: &Mat2, tol: f64) -> Result<Mat2> {
    check_tol(tol)?;
    Ok(projection_from_svd(&svd2(m), tol))
}

pub(crate) fn projection_from_svd(svd: &Svd2, tol: f64) -> Mat2 {
    match svd.rank(tol) {
        2 => Mat2::ZERO,
        1 => svd.u2.outer(svd.u2),
        _ => Mat2::IDENTITY,
    }
}
