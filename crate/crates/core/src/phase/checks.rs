//! Structural checks on the rank-1 set and the interface of separated maps.

use alloc::vec::Vec;

use super::InterfaceGraph;
use crate::error::{check_tol, Result};
use crate::linalg2::{nullspace_projection, Mat2, Vec2};
use crate::maps::SeparatedMap;

/// A smooth interface piece counts as diagonal when its fitted slope is
/// within this distance of `±1`.
pub const DIAGONAL_SLOPE_TOL: f64 = 0.1;
/// A piece counts as affine when `|f''|` and `|g''|` stay below this along it.
pub const FLAT_CURVATURE_TOL: f64 = 1e-8;
/// Threshold on the second derivatives inside the rank-1 phase.
pub const AFFINE_TOL: f64 = 1e-12;
/// Consecutive vertices per local slope fit.
const FIT_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineReport {
    pub samples: usize,
    /// Largest `|Hxx| + |Hyy| + |Hxy|` over the samples.
    pub max_second: f64,
    pub vacuous: bool,
    pub passes: bool,
}

/// Second derivatives of `u` at points of the rank-1 phase; they must vanish
/// because `u` is affine on each component.
pub fn check_prop2_affine(map: &SeparatedMap, samples: &[(f64, f64)]) -> Result<AffineReport> {
    let mut max_second = 0.0f64;
    for &(x, y) in samples {
        let ((_, fa), (_, ga)) = map.tangents(x, y)?;
        // Hxy vanishes identically for separated maps.
        max_second = max_second.max(fa.norm() + ga.norm());
    }
    let vacuous = samples.is_empty();
    Ok(AffineReport { samples: samples.len(), max_second, vacuous, passes: vacuous || max_second <= AFFINE_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank1Report {
    pub samples: usize,
    /// Worst `min(|f' - g'|, |f' + g'|)`.
    pub worst_tangent: f64,
    /// Worst `|f'' + g''|`.
    pub worst_curvature: f64,
    pub worst_point: Option<(f64, f64)>,
    pub eps: f64,
    pub passes: bool,
}

/// On the closed rank-1 set of a solution, `f'(x) = ±g'(y)` and
/// `f''(x) = -g''(y)`; reports the worst violation over `samples`.
pub fn check_rank1_characterization(map: &SeparatedMap, samples: &[(f64, f64)], eps: f64) -> Result<Rank1Report> {
    check_tol(eps)?;
    let mut r = Rank1Report {
        samples: samples.len(),
        worst_tangent: 0.0,
        worst_curvature: 0.0,
        worst_point: None,
        eps,
        passes: true,
    };
    let mut worst = 0.0f64;
    for &(x, y) in samples {
        let ((fv, fa), (gv, ga)) = map.tangents(x, y)?;
        let tangent = (fv - gv).norm().min((fv + gv).norm());
        let curvature = (fa + ga).norm();
        r.worst_tangent = r.worst_tangent.max(tangent);
        r.worst_curvature = r.worst_curvature.max(curvature);
        if tangent.max(curvature) > worst || r.worst_point.is_none() {
            worst = tangent.max(curvature);
            r.worst_point = Some((x, y));
        }
    }
    r.passes = r.worst_tangent <= eps && r.worst_curvature <= eps;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyBranch {
    /// Slope `±1` along the whole piece.
    Diagonal,
    /// `f'' = g'' = 0` along the piece.
    Affine,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceReport {
    pub polyline: usize,
    pub first: usize,
    pub last: usize,
    pub vertices: usize,
    /// Total-least-squares slope of the whole piece (infinite when vertical).
    pub slope: f64,
    pub max_curvature: f64,
    pub branch: DichotomyBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub pieces: Vec<PieceReport>,
    /// Pieces with fewer than three vertices.
    pub skipped: usize,
    pub passes: bool,
}

fn tls_slope(points: &[Vec2]) -> f64 {
    let n = points.len() as f64;
    let mut mean = Vec2::ZERO;
    for &p in points {
        mean += p;
    }
    let mean = mean * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let phi = 0.5 * libm::atan2(2.0 * sxy, sxx - syy);
    let (s, c) = (libm::sin(phi), libm::cos(phi));
    if c.abs() < 1e-15 {
        f64::INFINITY
    } else {
        s / c
    }
}

/// Each corner- and junction-free interface piece must either run along a
/// diagonal `x = ±y + c` or carry vanishing curvature of both curves, the
/// discrete form of `(a'(x) ± 1) g''(a(x)) = 0`.
pub fn check_prop2_dichotomy(ifg: &InterfaceGraph, map: &SeparatedMap) -> Result<DichotomyReport> {
    let mut report = DichotomyReport { pieces: Vec::new(), skipped: 0, passes: true };
    for (p, first, last) in ifg.smooth_pieces() {
        let pts = &ifg.polylines[p].points[first..=last];
        if pts.len() < 3 {
            report.skipped += 1;
            continue;
        }
        let window = FIT_WINDOW.min(pts.len());
        let slopes: Vec<f64> = pts.windows(window).map(tls_slope).collect();
        let diagonal =
            [1.0, -1.0].iter().any(|&target| slopes.iter().all(|s| (s - target).abs() <= DIAGONAL_SLOPE_TOL));

        let mut max_curvature = 0.0f64;
        for q in pts {
            let ((_, fa), (_, ga)) = map.tangents(q.x, q.y)?;
            max_curvature = max_curvature.max(fa.norm()).max(ga.norm());
        }
        let branch = if diagonal {
            DichotomyBranch::Diagonal
        } else if max_curvature <= FLAT_CURVATURE_TOL {
            DichotomyBranch::Affine
        } else {
            DichotomyBranch::Fails
        };
        report.passes &= branch != DichotomyBranch::Fails;
        report.pieces.push(PieceReport {
            polyline: p,
            first,
            last,
            vertices: pts.len(),
            slope: tls_slope(pts),
            max_curvature,
            branch,
        });
    }
    Ok(report)
}

fn projection_at(map: &SeparatedMap, p: Vec2, tol: f64) -> Result<Mat2> {
    let ((fv, _), (gv, _)) = map.tangents(p.x, p.y)?;
    nullspace_projection(&Mat2::from_cols(fv, gv), tol)
}

/// Size of the jump of `[Du]⊥` at `p` along `normal`: the largest Frobenius
/// distance among the projections at `p - δn`, `p` and `p + δn`.
///
/// On a crack of the rank-2 phase both sides carry `P = 0` while `p` itself
/// carries a rank-1 projector, so the one-sided differences are included.
pub fn projection_jump(map: &SeparatedMap, p: Vec2, normal: Vec2, delta: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let n = normal * (1.0 / normal.norm());
    let minus = projection_at(map, p - n * delta, tol)?;
    let center = projection_at(map, p, tol)?;
    let plus = projection_at(map, p + n * delta, tol)?;
    Ok((plus - minus).frobenius().max((plus - center).frobenius()).max((center - minus).frobenius()))
}
