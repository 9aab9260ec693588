//! Turning-angle profiles, the unit-speed curves they generate, and
//! separated-variables maps `u(x, y) = f(x) + g(y)` with exact jets.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::ops::Neg;

use crate::error::{check_tol, Error, Result};
use crate::linalg2::{Mat2, Vec2};
use crate::quadrature;

/// Default absolute tolerance for curve positions.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// One Hermite knot of a tabulated profile: `(t, K(t), K'(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub k: f64,
    pub dk: f64,
}

/// A profile given by knots and interpolated with cubic Hermite pieces,
/// so `K` and `K'` are continuous at every knot.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    knots: Vec<Knot>,
}

impl TabulatedProfile {
    pub fn new(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidProfile("tabulated profile needs at least two knots"));
        }
        if knots.iter().any(|k| !(k.t.is_finite() && k.k.is_finite() && k.dk.is_finite())) {
            return Err(Error::InvalidProfile("tabulated knots must be finite"));
        }
        if knots.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidProfile("tabulated knots must be strictly increasing in t"));
        }
        Ok(TabulatedProfile { knots })
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0].t, self.knots[self.knots.len() - 1].t)
    }

    fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&t) {
            return Err(Error::Extrapolation { t, lo, hi });
        }
        let idx = self.knots.partition_point(|k| k.t <= t).clamp(1, self.knots.len() - 1);
        let (k0, k1) = (self.knots[idx - 1], self.knots[idx]);
        let dt = k1.t - k0.t;
        let s = (t - k0.t) / dt;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let k = h00 * k0.k + h10 * dt * k0.dk + h01 * k1.k + h11 * dt * k1.dk;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let dk = (d00 * k0.k + d01 * k1.k) / dt + d10 * k0.dk + d11 * k1.dk;
        Ok((k, dk))
    }
}

/// The turning-angle function `K` of a curve, `f'(t) = (cos K(t), sin K(t))`.
#[derive(Debug, Clone, PartialEq)]
pub enum KProfile {
    /// `K ≡ 0`: a straight line.
    Zero,
    /// Flat on `(-∞, 0]`, `K(t) = 1 - (t² + 1)⁻¹` on `(0, ∞)`.
    ExampleA,
    /// Flat on `[-1, 1]`, increasing outside with limits `±1`.
    ExampleB,
    /// `K(t) = slope · t`.
    Linear {
        slope: f64,
    },
    Tabulated(TabulatedProfile),
}

impl KProfile {
    /// Returns `(K(t), K'(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        Ok(match self {
            KProfile::Zero => (0.0, 0.0),
            KProfile::ExampleA => {
                if t > 0.0 {
                    rational_bump(t)
                } else {
                    (0.0, 0.0)
                }
            }
            KProfile::ExampleB => {
                if t > 1.0 {
                    rational_bump(t - 1.0)
                } else if t < -1.0 {
                    let (k, dk) = rational_bump(t + 1.0);
                    (-k, -dk)
                } else {
                    (0.0, 0.0)
                }
            }
            KProfile::Linear { slope } => (slope * t, *slope),
            KProfile::Tabulated(tab) => return tab.eval(t),
        })
    }

    /// Points where the piecewise formula changes; `K` is only C¹ there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            KProfile::Zero | KProfile::Linear { .. } => Vec::new(),
            KProfile::ExampleA => alloc::vec![0.0],
            KProfile::ExampleB => alloc::vec![-1.0, 1.0],
            KProfile::Tabulated(tab) => tab.knots.iter().map(|k| k.t).collect(),
        }
    }

    /// Parameter range on which the profile is defined (`None` for all of ℝ).
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            KProfile::Tabulated(tab) => Some(tab.domain()),
            _ => None,
        }
    }
}

/// `s ↦ (1 - (s² + 1)⁻¹, 2s (s² + 1)⁻²)` written without cancellation.
fn rational_bump(s: f64) -> (f64, f64) {
    let q = s * s + 1.0;
    (s * s / q, 2.0 * s / (q * q))
}

/// Evaluates `(K(t), K'(t))`.
pub fn k_eval(profile: &KProfile, t: f64) -> Result<(f64, f64)> {
    profile.eval(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupKReport {
    pub max_abs: f64,
    pub argmax: f64,
    /// `max_abs < π/2`.
    pub ok: bool,
}

/// Samples `|K|` at `samples` evenly spaced points of `[lo, hi]` (clipped to
/// the profile's domain) and reports the maximum against `π/2`.
pub fn sup_k_check(profile: &KProfile, lo: f64, hi: f64, samples: usize) -> SupKReport {
    let (lo, hi) = match profile.domain() {
        Some((dlo, dhi)) => (lo.max(dlo), hi.min(dhi)),
        None => (lo, hi),
    };
    let samples = samples.max(2);
    let mut report = SupKReport { max_abs: 0.0, argmax: lo, ok: true };
    for i in 0..samples {
        let t = lerp(lo, hi, i, samples);
        if let Ok((k, _)) = profile.eval(t) {
            if k.abs() > report.max_abs {
                report.max_abs = k.abs();
                report.argmax = t;
            }
        }
    }
    report.ok = report.max_abs < FRAC_PI_2;
    report
}

pub(crate) fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        return hi;
    }
    lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
}

/// Position, tangent and curvature vector of a curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveJet {
    pub pos: Vec2,
    pub vel: Vec2,
    pub acc: Vec2,
}

impl Neg for CurveJet {
    type Output = CurveJet;
    fn neg(self) -> CurveJet {
        CurveJet { pos: -self.pos, vel: -self.vel, acc: -self.acc }
    }
}

/// The unit-speed curve `f(t) = ∫₀ᵗ (cos K, sin K) ds`.
///
/// Positions are tabulated at anchors (integers, profile breakpoints and the
/// interval ends) when the curve is built; an evaluation integrates only the
/// smooth stretch between the nearest anchor and `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    profile: KProfile,
    lo: f64,
    hi: f64,
    tol: f64,
    anchors: Vec<(f64, Vec2)>,
}

impl PlanarCurve {
    pub fn new(profile: KProfile, lo: f64, hi: f64) -> Result<Self> {
        Self::with_tolerance(profile, lo, hi, DEFAULT_QUAD_TOL)
    }

    pub fn with_tolerance(profile: KProfile, lo: f64, hi: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidProfile("curve interval must be finite with lo <= hi"));
        }
        let span_lo = lo.min(0.0);
        let span_hi = hi.max(0.0);
        if let Some((dlo, dhi)) = profile.domain() {
            if span_lo < dlo || span_hi > dhi {
                let t = if span_lo < dlo { span_lo } else { span_hi };
                return Err(Error::Extrapolation { t, lo: dlo, hi: dhi });
            }
        }

        let mut ts: Vec<f64> = Vec::new();
        ts.extend([span_lo, 0.0, span_hi]);
        let mut n = libm::ceil(span_lo);
        while n <= span_hi {
            ts.push(n);
            n += 1.0;
        }
        ts.extend(profile.breakpoints().into_iter().filter(|b| (span_lo..=span_hi).contains(b)));
        ts.sort_by(f64::total_cmp);
        ts.dedup();

        let mut curve = PlanarCurve { profile, lo, hi, tol, anchors: Vec::with_capacity(ts.len()) };
        let seg_tol = tol / (ts.len() as f64 + 1.0);
        let origin = ts.partition_point(|&t| t < 0.0);
        let mut pos = alloc::vec![Vec2::ZERO; ts.len()];
        for k in origin + 1..ts.len() {
            pos[k] = pos[k - 1] + curve.integrate(ts[k - 1], ts[k], seg_tol)?;
        }
        for k in (0..origin).rev() {
            pos[k] = pos[k + 1] - curve.integrate(ts[k], ts[k + 1], seg_tol)?;
        }
        curve.anchors = ts.into_iter().zip(pos).collect();
        Ok(curve)
    }

    pub fn profile(&self) -> &KProfile {
        &self.profile
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<Vec2> {
        // Round-off floor: the Kronrod–Gauss gap cannot drop below a few ulps of the panel.
        let tol = tol.max(64.0 * f64::EPSILON * (b - a).abs());
        let (v, _) = quadrature::integrate(|s| Ok(Vec2::from_angle(self.profile.eval(s)?.0)), a, b, tol)?;
        Ok(v)
    }

    /// `f'(t)` and `f''(t)`, both in closed form.
    pub fn tangent(&self, t: f64) -> Result<(Vec2, Vec2)> {
        let (k, dk) = self.profile.eval(t)?;
        let vel = Vec2::from_angle(k);
        Ok((vel, vel.perp() * dk))
    }

    /// `(f(t), f'(t), f''(t))`.
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        if !(self.lo..=self.hi).contains(&t) {
            return Err(Error::OutOfDomain { t, lo: self.lo, hi: self.hi });
        }
        let (vel, acc) = self.tangent(t)?;
        let idx = self.anchors.partition_point(|a| a.0 <= t);
        let below = self.anchors[idx.saturating_sub(1)];
        let anchor = match self.anchors.get(idx) {
            Some(&above) if above.0 - t < t - below.0 => above,
            _ => below,
        };
        let seg_tol = self.tol / (self.anchors.len() as f64 + 1.0);
        let pos = anchor.1 + self.integrate(anchor.0, t, seg_tol)?;
        Ok(CurveJet { pos, vel, acc })
    }

    pub fn eval(&self, t: f64) -> Result<Vec2> {
        Ok(self.jet(t)?.pos)
    }
}

/// Evaluates `(f(t), f'(t), f''(t))` of a curve.
pub fn curve_jet(curve: &PlanarCurve, t: f64) -> Result<CurveJet> {
    curve.jet(t)
}

/// Second-order jet of a planar map at a point. `hxy` serves both mixed
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub u: Vec2,
    pub du: Mat2,
    pub hxx: Vec2,
    pub hxy: Vec2,
    pub hyy: Vec2,
}

impl Jet2 {
    /// `D²ᵢⱼu` as a vector over components.
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> Vec2 {
        match (i, j) {
            (0, 0) => self.hxx,
            (1, 1) => self.hyy,
            _ => self.hxy,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite()
            && self.du.is_finite()
            && self.hxx.is_finite()
            && self.hxy.is_finite()
            && self.hyy.is_finite()
    }

    /// Assembles the jet of `f(x) + g(y)` from the two curve jets.
    pub fn from_separated(fj: &CurveJet, gj: &CurveJet) -> Jet2 {
        Jet2 { u: fj.pos + gj.pos, du: Mat2::from_cols(fj.vel, gj.vel), hxx: fj.acc, hxy: Vec2::ZERO, hyy: gj.acc }
    }
}

/// How the second curve enters a separated map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GSign {
    /// `u = f(x) + g(y)` with an independent curve `g`.
    PlusG,
    /// `g = -f`, so `u(x, y) = f(x) - f(y) = ∫ᵧˣ e^{iK}`.
    MinusF,
}

/// A separated-variables map `u(x, y) = f(x) + g(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedMap {
    f: PlanarCurve,
    g: PlanarCurve,
    sign: GSign,
}

impl SeparatedMap {
    /// `u(x, y) = f(x) - f(y)`.
    pub fn minus_f(f: PlanarCurve) -> Self {
        SeparatedMap { g: f.clone(), f, sign: GSign::MinusF }
    }

    pub fn plus_g(f: PlanarCurve, g: PlanarCurve) -> Self {
        SeparatedMap { f, g, sign: GSign::PlusG }
    }

    pub fn sign(&self) -> GSign {
        self.sign
    }

    pub fn fcurve(&self) -> &PlanarCurve {
        &self.f
    }

    pub fn gcurve(&self) -> &PlanarCurve {
        &self.g
    }

    pub fn fjet(&self, x: f64) -> Result<CurveJet> {
        self.f.jet(x)
    }

    /// Jet of the second summand `g`, with the sign applied.
    pub fn gjet(&self, y: f64) -> Result<CurveJet> {
        let j = self.g.jet(y)?;
        Ok(match self.sign {
            GSign::PlusG => j,
            GSign::MinusF => -j,
        })
    }

    /// `(f'(x), f''(x))` and `(g'(y), g''(y))` without the quadrature.
    pub fn tangents(&self, x: f64, y: f64) -> Result<((Vec2, Vec2), (Vec2, Vec2))> {
        let fx = self.f.tangent(x)?;
        let (gv, ga) = self.g.tangent(y)?;
        let gy = match self.sign {
            GSign::PlusG => (gv, ga),
            GSign::MinusF => (-gv, -ga),
        };
        Ok((fx, gy))
    }

    pub fn jet(&self, x: f64, y: f64) -> Result<Jet2> {
        Ok(Jet2::from_separated(&self.fjet(x)?, &self.gjet(y)?))
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Vec2> {
        Ok(self.f.eval(x)? + self.gjet(y)?.pos)
    }

    /// Whether the closed square of half-width `radius` around `(x, y)` meets
    /// a profile breakpoint in either variable.
    pub fn near_breakpoint(&self, x: f64, y: f64, radius: f64) -> bool {
        let hits = |c: &PlanarCurve, s: f64| c.profile().breakpoints().iter().any(|b| (b - s).abs() <= radius);
        hits(&self.f, x) || hits(&self.g, y)
    }
}

/// Jet of a separated map at `(x, y)`.
pub fn map_jet(map: &SeparatedMap, x: f64, y: f64) -> Result<Jet2> {
    map.jet(x, y)
}
