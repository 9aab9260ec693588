use infharm2d_core::operator::{infinity_laplacian, infinity_laplacian_separated};
use infharm2d_core::{GridJets, GridSpec, KProfile, Knot, PlanarCurve, SeparatedMap, TabulatedProfile};

fn max_residuals(map: &SeparatedMap, grid: &GridSpec) -> (f64, f64) {
    let jets = GridJets::new(map, grid).unwrap();
    let (mut index, mut diff) = (0.0f64, 0.0f64);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let a = infinity_laplacian(&jets.jet(i, j), 1e-8).unwrap().value;
            let b = infinity_laplacian_separated(&jets.fx[i], &jets.gy[j], 1e-8).unwrap();
            index = index.max(a.norm());
            diff = diff.max((a - b).norm());
        }
    }
    (index, diff)
}

#[test]
fn explicit_solutions_are_infinity_harmonic() {
    let grid = GridSpec::square(-3.0, 3.0, 121).unwrap();
    for p in [KProfile::ExampleA, KProfile::ExampleB, KProfile::Zero, KProfile::Linear { slope: 0.4 }] {
        let m = SeparatedMap::minus_f(PlanarCurve::new(p.clone(), -3.0, 3.0).unwrap());
        let (index, diff) = max_residuals(&m, &grid);
        assert!(index <= 1e-10 && diff <= 1e-10, "{p:?}: {index:e} {diff:e}");
    }
}

#[test]
fn tabulated_profile_solution() {
    // Smoothstep turning angle, flat outside [-1, 1].
    let knots: Vec<Knot> = (0..=24)
        .map(|k| {
            let t = -3.0 + 0.25 * k as f64;
            let s = ((t + 1.0) / 2.0).clamp(0.0, 1.0);
            let inside = (-1.0..=1.0).contains(&t);
            Knot {
                t,
                k: 0.6 * (s * s * (3.0 - 2.0 * s) - 0.5),
                dk: if inside { 0.6 * 3.0 * s * (1.0 - s) } else { 0.0 },
            }
        })
        .collect();
    let p = KProfile::Tabulated(TabulatedProfile::new(knots).unwrap());
    let m = SeparatedMap::minus_f(PlanarCurve::new(p, -3.0, 3.0).unwrap());
    let (index, diff) = max_residuals(&m, &GridSpec::square(-3.0, 3.0, 81).unwrap());
    assert!(index <= 1e-10 && diff <= 1e-10, "{index:e} {diff:e}");
}

#[test]
fn plus_g_copy_is_not_a_solution() {
    let f = PlanarCurve::new(KProfile::ExampleA, 0.0, 2.5).unwrap();
    let m = SeparatedMap::plus_g(f.clone(), f);
    let grid = GridSpec::square(0.5, 2.0, 61).unwrap();
    let jets = GridJets::new(&m, &grid).unwrap();
    // Off the diagonal the map has rank 2 and the residual vanishes; on it,
    // |Δ∞u| = 4 K'(x).
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let r = infinity_laplacian(&jets.jet(i, j), 1e-8).unwrap().value;
            if i == j {
                let x = grid.x(i);
                let dk = 2.0 * x / (x * x + 1.0).powi(2);
                assert!((r.norm() - 4.0 * dk).abs() <= 1e-12, "{x}: {r:?}");
            } else {
                assert!(r.norm() <= 1e-12, "{r:?}");
            }
        }
    }
}
