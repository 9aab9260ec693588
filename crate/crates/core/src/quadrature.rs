//! Globally adaptive 7/15-point Gauss–Kronrod quadrature for ℝ²-valued integrands.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg2::Vec2;

// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper bound on the number of panels kept alive by [`integrate`].
pub const MAX_PANELS: usize = 4096;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Vec2,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Vec2>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    if !(kronrod.is_finite() && gauss.is_finite()) {
        return Err(Error::QuadratureNotConverged { requested: 0.0, achieved: f64::INFINITY });
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).max_abs();
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` (max-norm of the
/// Kronrod–Gauss difference, summed over panels). The worst panel is
/// bisected until the budget is met.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(Vec2, f64)>
where
    F: FnMut(f64) -> Result<Vec2>,
{
    if a == b {
        return Ok((Vec2::ZERO, 0.0));
    }
    let mut panels: Vec<Panel> = Vec::new();
    panels.push(gk15(&mut f, a, b)?);
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged { requested: tol, achieved: total_err });
        }
        let worst =
            panels.iter().enumerate().max_by(|l, r| l.1.error.total_cmp(&r.1.error)).map(|(i, _)| i).unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid == p.a || mid == p.b {
            return Err(Error::QuadratureNotConverged { requested: tol, achieved: total_err });
        }
        panels.push(gk15(&mut f, p.a, mid)?);
        panels.push(gk15(&mut f, mid, p.b)?);
    }
    // Sum in left-to-right order so the result does not depend on bisection history.
    panels.sort_by(|l, r| l.a.total_cmp(&r.a));
    let mut value = Vec2::ZERO;
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    Ok((value, error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|t| Ok(Vec2::new(t * t * t, 1.0)), -1.0, 2.0, 1e-13).unwrap();
        assert!((v.x - 15.0 / 4.0).abs() < 1e-14);
        assert!((v.y - 3.0).abs() < 1e-14);
    }

    #[test]
    fn unit_circle_arc() {
        let (v, err) = integrate(|t| Ok(Vec2::from_angle(t)), 0.0, 5.0, 1e-13).unwrap();
        assert!(err <= 1e-13);
        assert!((v.x - libm::sin(5.0)).abs() < 1e-13);
        assert!((v.y - (1.0 - libm::cos(5.0))).abs() < 1e-13);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let (fwd, _) = integrate(|t| Ok(Vec2::from_angle(t)), 0.0, 1.0, 1e-13).unwrap();
        let (bwd, _) = integrate(|t| Ok(Vec2::from_angle(t)), 1.0, 0.0, 1e-13).unwrap();
        assert!((fwd + bwd).max_abs() < 1e-15);
    }

    #[test]
    fn kink_needs_many_panels_but_converges() {
        let (v, _) = integrate(|t| Ok(Vec2::new(t.abs(), 0.0)), -1.0, 0.7, 1e-12).unwrap();
        assert!((v.x - (0.5 + 0.245)).abs() < 1e-12);
    }

    #[test]
    fn impossible_tolerance_reports_achieved() {
        let err = integrate(|t| Ok(Vec2::new(1.0 / libm::sqrt(t.abs()), 0.0)), -1.0, 1.1, 1e-300).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
        let err = integrate(|t| Ok(Vec2::new(1.0 / t, 0.0)), -1.0, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let err = integrate(|_| Err(Error::InvalidProfile("boom")), 0.0, 1.0, 1e-12).unwrap_err();
        assert_eq!(err, Error::InvalidProfile("boom"));
    }
}
