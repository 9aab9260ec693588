//! Exact phase sets of the explicit solutions, as point predicates.

use alloc::vec;
use alloc::vec::Vec;

use super::{PhaseLabel, PhaseMap};
use crate::linalg2::Vec2;

/// Which explicit solution the oracle describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticCase {
    /// `K` flat on `(-∞, 0]`, increasing after: Ω₁ is the open third quadrant.
    A,
    /// `K` flat on `[-1, 1]`, increasing outside: Ω₁ is the open square.
    B,
    /// `K` strictly increasing everywhere (e.g. `K(t) = t` near the origin):
    /// Σ is the diagonal, Ω₁ is empty.
    Diagonal,
}

impl AnalyticCase {
    /// Expected triple-junction locations.
    pub fn junctions(self) -> Vec<Vec2> {
        match self {
            AnalyticCase::A => vec![Vec2::ZERO],
            AnalyticCase::B => vec![Vec2::new(1.0, 1.0), Vec2::new(-1.0, -1.0)],
            AnalyticCase::Diagonal => Vec::new(),
        }
    }

    /// Expected corner locations.
    pub fn corners(self) -> Vec<Vec2> {
        match self {
            AnalyticCase::B => vec![Vec2::new(1.0, -1.0), Vec2::new(-1.0, 1.0)],
            _ => Vec::new(),
        }
    }

    /// Σ as a union of segments and rays.
    pub fn sigma(self) -> Vec<SigmaPiece> {
        let inf = f64::INFINITY;
        let diag = Vec2::new(1.0, 1.0);
        match self {
            AnalyticCase::A => vec![
                SigmaPiece::new(Vec2::ZERO, -Vec2::E1, inf),
                SigmaPiece::new(Vec2::ZERO, -Vec2::E2, inf),
                SigmaPiece::new(Vec2::ZERO, diag, inf),
            ],
            AnalyticCase::B => {
                let (ll, lr, ur, ul) =
                    (Vec2::new(-1.0, -1.0), Vec2::new(1.0, -1.0), Vec2::new(1.0, 1.0), Vec2::new(-1.0, 1.0));
                vec![
                    SigmaPiece::new(ll, Vec2::E1, 2.0),
                    SigmaPiece::new(lr, Vec2::E2, 2.0),
                    SigmaPiece::new(ur, -Vec2::E1, 2.0),
                    SigmaPiece::new(ul, -Vec2::E2, 2.0),
                    SigmaPiece::new(ur, diag, inf),
                    SigmaPiece::new(ll, -diag, inf),
                ]
            }
            AnalyticCase::Diagonal => {
                vec![SigmaPiece::new(Vec2::ZERO, diag, inf), SigmaPiece::new(Vec2::ZERO, -diag, inf)]
            }
        }
    }

    /// L∞ distance from `(x, y)` to Σ.
    pub fn sigma_distance(self, x: f64, y: f64) -> f64 {
        let q = Vec2::new(x, y);
        self.sigma().iter().map(|p| p.linf_distance(q)).fold(f64::INFINITY, f64::min)
    }
}

/// `{start + s·dir : 0 ≤ s ≤ len}`; `len` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPiece {
    pub start: Vec2,
    pub dir: Vec2,
    pub len: f64,
}

impl SigmaPiece {
    pub fn new(start: Vec2, dir: Vec2, len: f64) -> Self {
        SigmaPiece { start, dir, len }
    }

    /// Exact L∞ distance: the distance along the piece is convex and
    /// piecewise linear in `s`, so its minimum sits at a kink or an end.
    pub fn linf_distance(&self, q: Vec2) -> f64 {
        let d = q - self.start;
        let u = self.dir;
        let at = |s: f64| (d.x - s * u.x).abs().max((d.y - s * u.y).abs());
        let mut candidates: Vec<f64> = vec![0.0];
        if self.len.is_finite() {
            candidates.push(self.len);
        }
        let ratios = [(d.x, u.x), (d.y, u.y), (d.x - d.y, u.x - u.y), (d.x + d.y, u.x + u.y)];
        candidates.extend(ratios.iter().filter(|r| r.1 != 0.0).map(|r| r.0 / r.1));
        candidates.into_iter().map(|s| at(s.clamp(0.0, self.len))).fold(f64::INFINITY, f64::min)
    }
}

/// Exact membership in the phase sets of the explicit solutions, using the
/// defining inequalities directly.
pub fn analytic_phase_oracle(case: AnalyticCase, x: f64, y: f64) -> PhaseLabel {
    match case {
        AnalyticCase::A => {
            if x < 0.0 && y < 0.0 {
                PhaseLabel::OneDim
            } else if (x == 0.0 && y <= 0.0) || (y == 0.0 && x <= 0.0) || (x == y && x >= 0.0) {
                PhaseLabel::InterfaceBand
            } else {
                PhaseLabel::TwoDim
            }
        }
        AnalyticCase::B => {
            let inside = |t: f64| -1.0 < t && t < 1.0;
            let closed = |t: f64| (-1.0..=1.0).contains(&t);
            if inside(x) && inside(y) {
                PhaseLabel::OneDim
            } else if (x.abs() == 1.0 && closed(y)) || (y.abs() == 1.0 && closed(x)) || (x == y && y.abs() >= 1.0) {
                PhaseLabel::InterfaceBand
            } else {
                PhaseLabel::TwoDim
            }
        }
        AnalyticCase::Diagonal => {
            if x == y {
                PhaseLabel::InterfaceBand
            } else {
                PhaseLabel::TwoDim
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementReport {
    /// Nodes farther than `margin` from Σ.
    pub compared: usize,
    pub mismatches: usize,
    pub margin: f64,
    /// First mismatching node, if any.
    pub first_mismatch: Option<(f64, f64)>,
}

/// Compares a phase map with the oracle at every node farther than
/// `2·max(hx, hy)` from Σ.
pub fn oracle_agreement(pm: &PhaseMap, case: AnalyticCase) -> AgreementReport {
    let g = &pm.grid;
    let margin = 2.0 * g.h();
    let mut report = AgreementReport { compared: 0, mismatches: 0, margin, first_mismatch: None };
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = (g.x(i), g.y(j));
            if case.sigma_distance(x, y) <= margin {
                continue;
            }
            report.compared += 1;
            if pm.label(i, j) != analytic_phase_oracle(case, x, y) {
                report.mismatches += 1;
                report.first_mismatch.get_or_insert((x, y));
            }
        }
    }
    report
}
