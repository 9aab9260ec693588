//! The ∞-Laplacian `Δ∞u = (Du ⊗ Du + |Du|² [Du]⊥ ⊗ I) : D²u`, in index form
//! and in the closed form for separated maps, plus finite-difference jets and
//! the sup-gradient energy.

use alloc::vec::Vec;

use crate::error::{check_tol, Error, Result};
use crate::linalg2::{nullspace_projection, Mat2, Vec2};
use crate::maps::{lerp, CurveJet, Jet2, SeparatedMap};

/// `Δ∞u` at a point together with its two constituents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residual {
    pub value: Vec2,
    /// `Dᵢu_α Dⱼu_β D²ᵢⱼu_β`.
    pub tangential_part: Vec2,
    /// `|Du|² [Du]⊥_αβ D²ᵢᵢu_β`.
    pub normal_part: Vec2,
}

/// Evaluates the full ∞-Laplacian on a jet. `tol` is the relative rank
/// tolerance used for `[Du]⊥`.
pub fn infinity_laplacian(jet: &Jet2, tol: f64) -> Result<Residual> {
    check_tol(tol)?;
    let du = &jet.du;
    let mut tangential = [0.0f64; 2];
    for (alpha, out) in tangential.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let h = jet.hess(i, j);
                for beta in 0..2 {
                    let d2 = if beta == 0 { h.x } else { h.y };
                    acc += du.get(alpha, i) * du.get(beta, j) * d2;
                }
            }
        }
        *out = acc;
    }
    let tangential_part = Vec2::new(tangential[0], tangential[1]);
    let proj = nullspace_projection(du, tol)?;
    let normal_part = proj.mul_vec(jet.hxx + jet.hyy) * du.frobenius_sq();
    Ok(Residual { value: tangential_part + normal_part, tangential_part, normal_part })
}

const UNIT_SPEED_TOL: f64 = 1e-12;

/// Closed form `2 [(f', g')]⊥ (f'' + g'')` for `u = f(x) + g(y)` with
/// unit-speed `f` and `g`.
pub fn infinity_laplacian_separated(fjet: &CurveJet, gjet: &CurveJet, tol: f64) -> Result<Vec2> {
    check_tol(tol)?;
    let (nf, ng) = (fjet.vel.norm(), gjet.vel.norm());
    if (nf - 1.0).abs() > UNIT_SPEED_TOL || (ng - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(Error::NotUnitSpeed { norm_f: nf, norm_g: ng });
    }
    let proj = nullspace_projection(&Mat2::from_cols(fjet.vel, gjet.vel), tol)?;
    Ok(proj.mul_vec(fjet.acc + gjet.acc) * 2.0)
}

/// Central-difference jet on the 9-point stencil around `(x, y)`.
pub fn numerical_jet<F>(mut eval: F, x: f64, y: f64, h: f64) -> Result<Jet2>
where
    F: FnMut(f64, f64) -> Result<Vec2>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidStep(h));
    }
    let c = eval(x, y)?;
    let e = eval(x + h, y)?;
    let w = eval(x - h, y)?;
    let n = eval(x, y + h)?;
    let s = eval(x, y - h)?;
    let ne = eval(x + h, y + h)?;
    let nw = eval(x - h, y + h)?;
    let se = eval(x + h, y - h)?;
    let sw = eval(x - h, y - h)?;
    let inv2h = 0.5 / h;
    let invh2 = 1.0 / (h * h);
    Ok(Jet2 {
        u: c,
        du: Mat2::from_cols((e - w) * inv2h, (n - s) * inv2h),
        hxx: (e - c * 2.0 + w) * invh2,
        hyy: (n - c * 2.0 + s) * invh2,
        hxy: (ne - nw - se + sw) * (0.25 * invh2),
    })
}

/// A rectangular grid of `nx × ny` nodes including the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { xmin, xmax, ymin, ymax, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// Square grid `[lo, hi]²` with `n × n` nodes.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        GridSpec::new(lo, hi, lo, hi, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite"));
        }
        if self.xmax <= self.xmin || self.ymax <= self.ymin {
            return Err(Error::InvalidGrid("need xmax > xmin and ymax > ymin"));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid("need at least two nodes per axis"));
        }
        Ok(())
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        lerp(self.xmin, self.xmax, i, self.nx)
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        lerp(self.ymin, self.ymax, j, self.ny)
    }

    pub fn hx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.ymax - self.ymin) / (self.ny - 1) as f64
    }

    /// `max(h_x, h_y)`.
    pub fn h(&self) -> f64 {
        self.hx().max(self.hy())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major node index, `x` varying fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Grid of `n × n` nodes (or the given counts) on the same rectangle.
    pub fn with_resolution(&self, nx: usize, ny: usize) -> GridSpec {
        GridSpec { nx, ny, ..*self }
    }
}

/// Curve jets of a separated map along the grid axes. Since
/// `u(xᵢ, yⱼ) = f(xᵢ) + g(yⱼ)`, a full grid needs only `nx + ny` curve
/// evaluations.
#[derive(Debug, Clone)]
pub struct GridJets {
    pub grid: GridSpec,
    pub fx: Vec<CurveJet>,
    pub gy: Vec<CurveJet>,
}

impl GridJets {
    pub fn new(map: &SeparatedMap, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let fx = (0..grid.nx).map(|i| map.fjet(grid.x(i))).collect::<Result<Vec<_>>>()?;
        let gy = (0..grid.ny).map(|j| map.gjet(grid.y(j))).collect::<Result<Vec<_>>>()?;
        Ok(GridJets { grid: *grid, fx, gy })
    }

    #[inline]
    pub fn jet(&self, i: usize, j: usize) -> Jet2 {
        Jet2::from_separated(&self.fx[i], &self.gy[j])
    }
}

/// Grid estimate of `E∞(u) = sup |Du|` with the Frobenius norm.
pub fn e_infinity_estimate(map: &SeparatedMap, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let mut sup = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let ((fv, _), (gv, _)) = map.tangents(grid.x(i), grid.y(j))?;
            sup = sup.max(Mat2::from_cols(fv, gv).frobenius());
        }
    }
    Ok(sup)
}
