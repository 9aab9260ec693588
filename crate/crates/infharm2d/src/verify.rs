//! The `verify` check sequence.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;

use infharm2d_core::maps::sup_k_check;
use infharm2d_core::operator::{e_infinity_estimate, numerical_jet};
use infharm2d_core::phase::{
    check_prop2_affine, check_prop2_dichotomy, check_rank1_characterization, extract_interface, oracle_agreement,
    projection_jump, AnalyticCase,
};
use infharm2d_core::{
    GSign, GridSpec, InterfaceGraph, KProfile, PhaseLabel, PhaseMap, PlanarCurve, SeparatedMap, Vec2,
};

use crate::config::{Expectation, NegativeSpec, RunConfig};
use crate::error::CliError;
use crate::eval;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
pub const JUMP_DELTAS: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const JUMP_TOL: f64 = 1e-2;
pub const INTERIOR_JUMP_TOL: f64 = 1e-10;
pub const NEGATIVE_FLOOR: f64 = 1e-2;
pub const ORACLE_EPS: f64 = 1e-8;
pub const E_INF_TOL: f64 = 1e-14;
/// Below this the finite-difference error is rounding only.
const FD_EXACT: f64 = 1e-11;
const SUP_K_SAMPLES: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: Option<f64>,
    /// Printable bound, e.g. `<= 1.0e-10`.
    pub threshold: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, measured: f64, threshold: String, pass: bool) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Check { name, measured: Some(measured), threshold, status, detail: String::new() }
    }

    fn at_most(name: &'static str, measured: f64, bound: f64) -> Self {
        Check::new(name, measured, format!("<= {bound:.1e}"), measured <= bound)
    }

    fn at_least(name: &'static str, measured: f64, bound: f64) -> Self {
        Check::new(name, measured, format!(">= {bound:.1e}"), measured >= bound)
    }

    fn skip(name: &'static str, why: &str) -> Self {
        Check { name, measured: None, threshold: "-".into(), status: Status::Skip, detail: why.into() }
    }

    fn failed(name: &'static str, err: CliError) -> Self {
        Check { name, measured: None, threshold: "-".into(), status: Status::Fail, detail: err.to_string() }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let measured = self.measured.map_or_else(|| "-".to_string(), |m| format!("{m:.6e}"));
        write!(f, "{status}  {:<22} measured {measured:<14} threshold {}", self.name, self.threshold)?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }
}

/// Deterministic probe points on a 5×5 lattice inside the grid, dropping
/// those whose stencil of half-width `reach` meets a profile breakpoint.
pub fn fd_probe_points(map: &SeparatedMap, grid: &GridSpec, reach: f64) -> Vec<(f64, f64)> {
    const FRACTIONS: [f64; 5] = [0.2, 0.35, 0.5, 0.65, 0.8];
    let mut out = Vec::new();
    for fy in FRACTIONS {
        for fx in FRACTIONS {
            let x = grid.xmin + fx * (grid.xmax - grid.xmin);
            let y = grid.ymin + fy * (grid.ymax - grid.ymin);
            if !map.near_breakpoint(x, y, reach) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Largest jet error (gradient and Hessian, max-norm) over `points` for
/// each step in `hs`.
pub fn fd_errors(map: &SeparatedMap, points: &[(f64, f64)], hs: &[f64]) -> Result<Vec<f64>, CliError> {
    let mut errors = Vec::with_capacity(hs.len());
    for &h in hs {
        let mut worst = 0.0f64;
        for &(x, y) in points {
            let exact = map.jet(x, y)?;
            let fd = numerical_jet(|a, b| map.eval(a, b), x, y, h)?;
            let du = (fd.du.col(0) - exact.du.col(0)).max_abs().max((fd.du.col(1) - exact.du.col(1)).max_abs());
            let hess =
                (fd.hxx - exact.hxx).max_abs().max((fd.hxy - exact.hxy).max_abs()).max((fd.hyy - exact.hyy).max_abs());
            worst = worst.max(du).max(hess);
        }
        errors.push(worst);
    }
    Ok(errors)
}

/// Observed orders `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`.
pub fn convergence_orders(errors: &[f64], hs: &[f64]) -> Vec<f64> {
    errors.windows(2).zip(hs.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect()
}

/// Points of the analytic Σ inside the grid rectangle plus interior nodes of
/// the rank-1 phase.
pub fn oracle_rank1_samples(case: AnalyticCase, pm: &PhaseMap) -> Vec<(f64, f64)> {
    let g = &pm.grid;
    let inside = |p: Vec2| (g.xmin..=g.xmax).contains(&p.x) && (g.ymin..=g.ymax).contains(&p.y);
    let reach =
        (g.xmax - g.xmin).max(g.ymax - g.ymin) + g.xmax.abs().max(g.xmin.abs()) + g.ymax.abs().max(g.ymin.abs());
    let mut out = Vec::new();
    for piece in case.sigma() {
        let len = piece.len.min(reach);
        for k in 0..=64 {
            let p = piece.start + piece.dir * (len * k as f64 / 64.0);
            if inside(p) {
                out.push((p.x, p.y));
            }
        }
    }
    for (i, j) in pm.interior_nodes(PhaseLabel::OneDim, 1) {
        out.push((g.x(i), g.y(j)));
    }
    out
}

/// `C·h` bound for grid samples: band nodes sit within about one diagonal
/// step of Σ, where the rank-1 relations hold exactly.
pub fn grid_rank1_eps(map: &SeparatedMap, h: f64) -> Result<f64, CliError> {
    let mut lip = 0.0f64;
    for curve in [map.fcurve(), map.gcurve()] {
        let (lo, hi) = curve.interval();
        let n = 2001;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..n {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let (_, dk) = curve.profile().eval(t.min(hi))?;
            let mut l = dk.abs();
            if let Some((pt, pdk)) = prev {
                l = l.max(((dk - pdk) / (t - pt)).abs() + dk * dk);
            }
            lip = lip.max(l);
            prev = Some((t, dk));
        }
    }
    Ok((4.0 * SQRT_2 * lip * h).max(ORACLE_EPS))
}

/// Probe point on a diagonal branch of Σ that lies inside the grid.
fn crack_probe(case: AnalyticCase, grid: &GridSpec) -> Option<Vec2> {
    let (a, b) = (grid.xmin.max(grid.ymin), grid.xmax.min(grid.ymax));
    let (lo, hi) = match case {
        AnalyticCase::A => (a.max(0.0), b),
        AnalyticCase::B => (a.max(1.0), b),
        AnalyticCase::Diagonal => (a + 0.5 * (b - a), b),
    };
    (hi > lo).then(|| {
        let d = 0.5 * (lo + hi);
        Vec2::new(d, d)
    })
}

/// Up to `count` nodes spread over the interior of each phase.
pub fn interior_probes(pm: &PhaseMap, margin: usize, count: usize) -> Vec<Vec2> {
    let mut out = Vec::new();
    for label in [PhaseLabel::TwoDim, PhaseLabel::OneDim] {
        let nodes = pm.interior_nodes(label, margin);
        if nodes.is_empty() {
            continue;
        }
        let picks = count.min(nodes.len());
        let stride = (nodes.len() - 1) / picks.saturating_sub(1).max(1);
        for k in 0..picks {
            let (i, j) = nodes[k * stride];
            out.push(Vec2::new(pm.grid.x(i), pm.grid.y(j)));
        }
    }
    out
}

/// Grid-max residual of the `PlusG` map `f(x) + f(y)` built on the
/// `ExampleA` curve, which is not ∞-harmonic.
pub fn negative_control_floor(neg: &NegativeSpec, tol: f64) -> Result<f64, CliError> {
    let pad = 0.1 * (neg.hi - neg.lo);
    let f = PlanarCurve::new(KProfile::ExampleA, neg.lo - pad, neg.hi + pad)?;
    let map = SeparatedMap::plus_g(f.clone(), f);
    let grid = GridSpec::square(neg.lo, neg.hi, neg.n)?;
    Ok(eval::residual_stats(&map, &grid, tol)?.max_index)
}

/// Whether junction and corner counts and positions match the oracle to
/// within `2h`.
pub fn geometry_matches(ig: &InterfaceGraph, case: AnalyticCase, grid: &GridSpec) -> (bool, String) {
    let r = 2.0 * grid.h();
    let inside = |p: &Vec2| (grid.xmin..=grid.xmax).contains(&p.x) && (grid.ymin..=grid.ymax).contains(&p.y);
    let want_j: Vec<Vec2> = case.junctions().into_iter().filter(inside).collect();
    let want_c: Vec<Vec2> = case.corners().into_iter().filter(inside).collect();
    let got_j: Vec<Vec2> = ig.junctions.iter().filter(|j| j.degree == 3).map(|j| j.pos).collect();
    let got_c: Vec<Vec2> = ig.corners.iter().map(|c| c.pos).collect();
    let matched = |want: &[Vec2], got: &[Vec2]| {
        want.len() == got.len() && want.iter().all(|w| got.iter().filter(|g| (**g - *w).max_abs() <= r).count() == 1)
    };
    let ok = matched(&want_j, &got_j) && matched(&want_c, &got_c) && ig.junctions.len() == got_j.len();
    (
        ok,
        format!(
            "{} junctions, {} corners; expected {}, {}",
            ig.junctions.len(),
            got_c.len(),
            want_j.len(),
            want_c.len()
        ),
    )
}

fn or_fail(name: &'static str, r: Result<Check, CliError>) -> Check {
    r.unwrap_or_else(|e| Check::failed(name, e))
}

/// Runs every check in order; a check that cannot be evaluated is a FAIL.
pub fn run(cfg: &RunConfig, map: &SeparatedMap) -> Report {
    let mut checks = Vec::new();
    let grid = &cfg.grid;
    let solution = cfg.expect == Expectation::Solution;

    let mut worst_k = 0.0f64;
    for curve in [map.fcurve(), map.gcurve()] {
        let (lo, hi) = curve.interval();
        worst_k = worst_k.max(sup_k_check(curve.profile(), lo, hi, SUP_K_SAMPLES).max_abs);
    }
    checks.push(Check::new("sup_k", worst_k, format!("< {FRAC_PI_2:.6e}"), worst_k < FRAC_PI_2));

    match eval::residual_stats(map, grid, cfg.tol_rank) {
        Ok(s) if solution => {
            let at = format!("worst at ({:.4}, {:.4})", s.argmax.0, s.argmax.1);
            checks.push(Check::at_most("residual_index_form", s.max_index, RESIDUAL_TOL).with(at));
            checks.push(Check::at_most("residual_closed_form", s.max_separated, RESIDUAL_TOL));
            checks.push(Check::at_most("form_agreement", s.max_form_diff, RESIDUAL_TOL));
        }
        Ok(s) => {
            checks.push(Check::at_least("residual_floor", s.max_index, NEGATIVE_FLOOR).with("map is not a solution"));
            checks.push(Check::at_most("form_agreement", s.max_form_diff, RESIDUAL_TOL));
        }
        Err(e) => checks.push(Check::failed("residual", e)),
    }

    checks.push(or_fail("fd_convergence", fd_check(cfg, map)));

    let pm = match eval::phase_map(map, grid, cfg.tol_rank) {
        Ok(pm) => pm,
        Err(e) => {
            checks.push(Check::failed("phase_map", e));
            return Report { checks };
        }
    };
    let ig = extract_interface(&pm, &cfg.interface);

    checks.push(match cfg.oracle {
        Some(case) => {
            let r = oracle_agreement(&pm, case);
            let mut c = Check::at_most("oracle_agreement", r.mismatches as f64, 0.0)
                .with(format!("{} nodes compared beyond {:.3e} of sigma", r.compared, r.margin));
            if let Some((x, y)) = r.first_mismatch {
                c.detail = format!("{}; first mismatch at ({x}, {y})", c.detail);
            }
            c
        }
        None => Check::skip("oracle_agreement", "no analytic oracle for this map"),
    });

    let omega1: Vec<(f64, f64)> =
        pm.interior_nodes(PhaseLabel::OneDim, 1).into_iter().map(|(i, j)| (grid.x(i), grid.y(j))).collect();
    checks.push(or_fail(
        "affine_on_omega1",
        check_prop2_affine(map, &omega1).map_err(CliError::from).map(|r| {
            let c = Check::at_most("affine_on_omega1", r.max_second, infharm2d_core::phase::AFFINE_TOL);
            if r.vacuous {
                c.with("rank-1 phase has no interior nodes")
            } else {
                c.with(format!("{} samples", r.samples))
            }
        }),
    ));

    if solution {
        checks.push(or_fail("rank1_relations", rank1_check(cfg, map, &pm)));
        checks.push(or_fail(
            "dichotomy",
            check_prop2_dichotomy(&ig, map).map_err(CliError::from).map(|r| {
                let failing =
                    r.pieces.iter().filter(|p| p.branch == infharm2d_core::phase::DichotomyBranch::Fails).count();
                Check::at_most("dichotomy", failing as f64, 0.0).with(format!(
                    "{} smooth pieces, {} too short to fit",
                    r.pieces.len(),
                    r.skipped
                ))
            }),
        ));
    } else {
        checks.push(Check::skip("rank1_relations", "only holds for solutions"));
        checks.push(Check::skip("dichotomy", "only holds for solutions"));
    }

    match cfg.oracle.and_then(|case| crack_probe(case, grid)) {
        Some(p) => checks.push(or_fail("jump_across_sigma", crack_check(map, p, cfg.tol_rank))),
        None => checks.push(Check::skip("jump_across_sigma", "no diagonal branch of sigma inside the grid")),
    }
    checks.push(or_fail("jump_in_interiors", interior_jump_check(map, &pm, cfg.tol_rank)));

    checks.push(or_fail(
        "negative_control",
        negative_control_floor(&cfg.negative, cfg.tol_rank)
            .map(|v| Check::at_least("negative_control", v, NEGATIVE_FLOOR)),
    ));

    if let Some(case) = cfg.oracle {
        let (ok, detail) = geometry_matches(&ig, case, grid);
        checks.push(
            Check::new("junctions_corners", ig.junctions.len() as f64 + ig.corners.len() as f64, "oracle".into(), ok)
                .with(detail),
        );
    }
    if map.sign() == GSign::MinusF {
        checks.push(or_fail(
            "e_infinity",
            e_infinity_estimate(map, grid)
                .map_err(CliError::from)
                .map(|e| Check::at_most("e_infinity", (e - SQRT_2).abs(), E_INF_TOL).with(format!("estimate {e:.17}"))),
        ));
    }
    Report { checks }
}

fn fd_check(cfg: &RunConfig, map: &SeparatedMap) -> Result<Check, CliError> {
    let h = cfg.fd_step;
    let hs = [h, h / 2.0, h / 4.0];
    let points = fd_probe_points(map, &cfg.grid, 2.0 * h);
    if points.is_empty() {
        return Ok(Check::skip("fd_convergence", "every probe point is near a breakpoint"));
    }
    let errors = fd_errors(map, &points, &hs)?;
    let range = format!("in [{}, {}]", ORDER_RANGE.0, ORDER_RANGE.1);
    if errors[0] <= FD_EXACT {
        return Ok(Check::new("fd_convergence", errors[0], range, true).with("map is exact under the stencil"));
    }
    let orders = convergence_orders(&errors, &hs);
    let worst = orders.iter().copied().fold(2.0f64, |w, o| if (o - 2.0).abs() > (w - 2.0).abs() { o } else { w });
    let ok = orders.iter().all(|o| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(o));
    Ok(Check::new("fd_convergence", worst, range, ok).with(format!(
        "{} points, errors {:.3e} {:.3e} {:.3e}",
        points.len(),
        errors[0],
        errors[1],
        errors[2]
    )))
}

fn rank1_check(cfg: &RunConfig, map: &SeparatedMap, pm: &PhaseMap) -> Result<Check, CliError> {
    let (samples, eps, source) = match cfg.oracle {
        Some(case) => (oracle_rank1_samples(case, pm), ORACLE_EPS, "oracle"),
        None => (
            pm.nodes_with(&[PhaseLabel::OneDim, PhaseLabel::InterfaceBand]),
            grid_rank1_eps(map, cfg.grid.h())?,
            "grid",
        ),
    };
    let r = check_rank1_characterization(map, &samples, eps)?;
    let worst = r.worst_tangent.max(r.worst_curvature);
    Ok(Check::at_most("rank1_relations", worst, eps).with(format!("{} {source} samples", r.samples)))
}

fn crack_check(map: &SeparatedMap, p: Vec2, tol: f64) -> Result<Check, CliError> {
    let n = Vec2::new(1.0, -1.0);
    let mut worst = 0.0f64;
    let mut jumps = Vec::new();
    for delta in JUMP_DELTAS {
        let j = projection_jump(map, p, n, delta, tol)?;
        worst = worst.max((j - 1.0).abs());
        jumps.push(format!("{j:.6}"));
    }
    Ok(Check::at_most("jump_across_sigma", worst, JUMP_TOL).with(format!(
        "|jump - 1| at ({:.4}, {:.4}); jumps {}",
        p.x,
        p.y,
        jumps.join(" ")
    )))
}

fn interior_jump_check(map: &SeparatedMap, pm: &PhaseMap, tol: f64) -> Result<Check, CliError> {
    let probes = interior_probes(pm, 3, 5);
    if probes.is_empty() {
        return Ok(Check::skip("jump_in_interiors", "no phase interiors on this grid"));
    }
    let mut worst = 0.0f64;
    for p in &probes {
        for n in [Vec2::E1, Vec2::E2, Vec2::new(1.0, -1.0)] {
            worst = worst.max(projection_jump(map, *p, n, 1e-3, tol)?);
        }
    }
    Ok(Check::at_most("jump_in_interiors", worst, INTERIOR_JUMP_TOL).with(format!("{} probes", probes.len())))
}
