//! Flat `section.key = value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use infharm2d_core::maps::DEFAULT_QUAD_TOL;
use infharm2d_core::phase::{AnalyticCase, InterfaceOptions};
use infharm2d_core::{GSign, GridSpec, KProfile, Knot, PlanarCurve, SeparatedMap, TabulatedProfile};

use crate::error::CliError;

const KNOWN_KEYS: &[&str] = &[
    "k.kind",
    "k.slope",
    "k.knots_file",
    "map.sign",
    "g.kind",
    "g.slope",
    "g.knots_file",
    "grid.xmin",
    "grid.xmax",
    "grid.ymin",
    "grid.ymax",
    "grid.nx",
    "grid.ny",
    "tol.rank",
    "tol.quad",
    "tol.fd_step",
    "output.dir",
    "verify.oracle",
    "verify.expect",
    "verify.negative_min",
    "verify.negative_max",
    "verify.negative_n",
    "interface.corner_deg",
    "interface.collinear_deg",
    "interface.junction_radius",
    "interface.simplify_tol",
];

pub const DEFAULT_FD_STEP: f64 = 1e-2;

/// Whether `verify` should certify a solution or confirm a non-solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Solution,
    NonSolution,
}

/// Grid of the built-in `PlusG` negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub profile: KProfile,
    pub sign: GSign,
    /// Profile of `g` for `plus_g` maps.
    pub g_profile: KProfile,
    pub grid: GridSpec,
    pub tol_rank: f64,
    pub tol_quad: f64,
    pub fd_step: f64,
    pub out_dir: PathBuf,
    pub oracle: Option<AnalyticCase>,
    pub expect: Expectation,
    pub negative: NegativeSpec,
    pub interface: InterfaceOptions,
}

/// Raw key/value pairs with the directory used to resolve relative paths.
struct Table {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl Table {
    fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Syntax {
                    line: n + 1,
                    msg: format!("expected `section.key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Syntax { line: n + 1, msg: format!("unknown key `{key}`") });
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Syntax { line: n + 1, msg: format!("duplicate key `{key}`") });
            }
        }
        Ok(Table { values, base: base.to_path_buf() })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key).ok_or_else(|| CliError::config(key, "missing required key"))
    }

    fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
        v.parse().map_err(|_| CliError::config(key, format!("cannot parse `{v}`")))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            Some(v) => Self::parse_value(key, v)?,
            None => default,
        };
        if !v.is_finite() {
            return Err(CliError::config(key, "must be finite"));
        }
        Ok(v)
    }

    fn f64_req(&self, key: &str) -> Result<f64, CliError> {
        self.required(key)?;
        self.f64_or(key, 0.0)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.f64_or(key, default)?;
        if v <= 0.0 {
            return Err(CliError::config(key, "must be > 0"));
        }
        Ok(v)
    }

    fn usize_req(&self, key: &str) -> Result<usize, CliError> {
        Self::parse_value(key, self.required(key)?)
    }

    fn profile(&self, section: &str) -> Result<KProfile, CliError> {
        let kind_key = format!("{section}.kind");
        let slope_key = format!("{section}.slope");
        let knots_key = format!("{section}.knots_file");
        Ok(match self.required(&kind_key)? {
            "example_a" => KProfile::ExampleA,
            "example_b" => KProfile::ExampleB,
            "zero" => KProfile::Zero,
            "linear" => KProfile::Linear { slope: self.f64_req(&slope_key)? },
            "tabulated" => {
                let rel = self.required(&knots_key)?;
                let path = self.base.join(rel);
                let knots = read_knots(&path).map_err(|e| match e {
                    CliError::Format { msg, .. } => CliError::config(&knots_key, msg),
                    other => other,
                })?;
                let tab = TabulatedProfile::new(knots).map_err(|e| CliError::config(&knots_key, e.to_string()))?;
                KProfile::Tabulated(tab)
            }
            other => return Err(CliError::config(&kind_key, format!("unknown profile `{other}`"))),
        })
    }
}

/// Reads `t,K,Kprime` rows; a non-numeric first row is taken as a header.
pub fn read_knots(path: &Path) -> Result<Vec<Knot>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut knots = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 3 => knots.push(Knot { t: v[0], k: v[1], dk: v[2] }),
            None if knots.is_empty() && n == 0 => continue,
            _ => {
                return Err(CliError::Format {
                    path: path.to_path_buf(),
                    msg: format!("line {}: expected `t,K,Kprime`", n + 1),
                })
            }
        }
    }
    Ok(knots)
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &[(&str, String)]) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, overrides)
    }

    /// `overrides` replace (or supply) keys after the text is read.
    pub fn parse(text: &str, base: &Path, overrides: &[(&str, String)]) -> Result<Self, CliError> {
        let mut t = Table::parse(text, base)?;
        for (key, value) in overrides {
            t.values.insert(key.to_string(), value.clone());
        }

        let profile = t.profile("k")?;
        let sign = match t.raw("map.sign").unwrap_or("minus_f") {
            "minus_f" => GSign::MinusF,
            "plus_g" => GSign::PlusG,
            other => return Err(CliError::config("map.sign", format!("expected minus_f or plus_g, got `{other}`"))),
        };
        let g_profile = if t.raw("g.kind").is_some() { t.profile("g")? } else { profile.clone() };

        let (nx, ny) = (t.usize_req("grid.nx")?, t.usize_req("grid.ny")?);
        let grid = GridSpec::new(
            t.f64_req("grid.xmin")?,
            t.f64_req("grid.xmax")?,
            t.f64_req("grid.ymin")?,
            t.f64_req("grid.ymax")?,
            nx,
            ny,
        )
        .map_err(|e| CliError::config("grid", e.to_string()))?;

        let default_oracle = match (&profile, sign) {
            (KProfile::ExampleA, GSign::MinusF) => "a",
            (KProfile::ExampleB, GSign::MinusF) => "b",
            (KProfile::Linear { slope }, GSign::MinusF) if *slope != 0.0 => "diagonal",
            _ => "none",
        };
        let oracle = match t.raw("verify.oracle").unwrap_or(default_oracle) {
            "a" => Some(AnalyticCase::A),
            "b" => Some(AnalyticCase::B),
            "diagonal" => Some(AnalyticCase::Diagonal),
            "none" => None,
            other => return Err(CliError::config("verify.oracle", format!("unknown oracle `{other}`"))),
        };
        let expect = match t.raw("verify.expect").unwrap_or("solution") {
            "solution" => Expectation::Solution,
            "non_solution" => Expectation::NonSolution,
            other => return Err(CliError::config("verify.expect", format!("unknown expectation `{other}`"))),
        };
        let negative = NegativeSpec {
            lo: t.f64_or("verify.negative_min", 0.5)?,
            hi: t.f64_or("verify.negative_max", 2.0)?,
            n: match t.raw("verify.negative_n") {
                Some(v) => Table::parse_value("verify.negative_n", v)?,
                None => 61,
            },
        };
        if negative.lo >= negative.hi || negative.n < 2 {
            return Err(CliError::config("verify.negative_n", "negative-control grid needs min < max and n >= 2"));
        }
        let d = InterfaceOptions::default();
        let interface = InterfaceOptions {
            corner_deg: t.positive("interface.corner_deg", d.corner_deg)?,
            collinear_deg: t.positive("interface.collinear_deg", d.collinear_deg)?,
            junction_radius: t.positive("interface.junction_radius", d.junction_radius)?,
            simplify_tol: t.positive("interface.simplify_tol", d.simplify_tol)?,
        };

        Ok(RunConfig {
            profile,
            sign,
            g_profile,
            grid,
            tol_rank: t.positive("tol.rank", infharm2d_core::linalg2::DEFAULT_RANK_TOL)?,
            tol_quad: t.positive("tol.quad", DEFAULT_QUAD_TOL)?,
            fd_step: t.positive("tol.fd_step", DEFAULT_FD_STEP)?,
            out_dir: PathBuf::from(t.raw("output.dir").unwrap_or("out")),
            oracle,
            expect,
            negative,
            interface,
        })
    }

    /// Parameter interval the curves must cover: the grid extents widened by
    /// the finite-difference reach, clipped to a tabulated profile's knots.
    pub fn curve_interval(&self, profile: &KProfile, xs: (f64, f64)) -> (f64, f64) {
        let reach = 4.0 * self.fd_step;
        let (mut lo, mut hi) = (xs.0 - reach, xs.1 + reach);
        if let Some((dlo, dhi)) = profile.domain() {
            lo = lo.max(dlo.min(xs.0));
            hi = hi.min(dhi.max(xs.1));
        }
        (lo, hi)
    }

    pub fn build_map(&self) -> Result<SeparatedMap, CliError> {
        let g = &self.grid;
        let curve = |p: &KProfile, key: &str, span: (f64, f64)| {
            let (lo, hi) = self.curve_interval(p, span);
            PlanarCurve::with_tolerance(p.clone(), lo, hi, self.tol_quad)
                .map_err(|e| CliError::config(key, e.to_string()))
        };
        Ok(match self.sign {
            GSign::MinusF => {
                let span = (g.xmin.min(g.ymin), g.xmax.max(g.ymax));
                SeparatedMap::minus_f(curve(&self.profile, "k.kind", span)?)
            }
            GSign::PlusG => SeparatedMap::plus_g(
                curve(&self.profile, "k.kind", (g.xmin, g.xmax))?,
                curve(&self.g_profile, "g.kind", (g.ymin, g.ymax))?,
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE_A: &str = "
# case A
k.kind = example_a
grid.xmin = -3
grid.xmax = 3
grid.ymin = -3
grid.ymax = 3   # trailing comment
grid.nx = 241
grid.ny = 241
";

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(text, Path::new("."), &[])
    }

    #[test]
    fn defaults() {
        let c = parse(CASE_A).unwrap();
        assert_eq!(c.profile, KProfile::ExampleA);
        assert_eq!(c.sign, GSign::MinusF);
        assert_eq!(c.grid, GridSpec::square(-3.0, 3.0, 241).unwrap());
        assert_eq!((c.tol_rank, c.tol_quad, c.fd_step), (1e-8, 1e-12, 1e-2));
        assert_eq!(c.oracle, Some(AnalyticCase::A));
        assert_eq!(c.expect, Expectation::Solution);
        assert_eq!(c.negative, NegativeSpec { lo: 0.5, hi: 2.0, n: 61 });
        assert_eq!(c.interface, InterfaceOptions::default());
        assert_eq!(c.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn missing_grid_nx_names_the_key() {
        let text = CASE_A.replace("grid.nx = 241", "");
        let msg = parse(&text).unwrap_err().to_string();
        assert!(msg.contains("grid.nx"), "{msg}");
        // An override can supply it.
        let c = RunConfig::parse(&text, Path::new("."), &[("grid.nx", "11".into())]).unwrap();
        assert_eq!(c.grid.nx, 11);
    }

    #[test]
    fn rejects_bad_input() {
        for (edit, key) in [
            (("k.kind = example_a", "k.kind = example_c"), "k.kind"),
            (("grid.nx = 241", "grid.nx = many"), "grid.nx"),
            (("grid.nx = 241", "grid.nx = 1"), "grid"),
            (("grid.ny = 241", "grid.ny = 241\ntol.rank = -1"), "tol.rank"),
            (("grid.ny = 241", "grid.ny = 241\ntol.fd_step = nan"), "tol.fd_step"),
            (("grid.ny = 241", "grid.ny = 241\nmap.sign = times"), "map.sign"),
            (("k.kind = example_a", "k.kind = linear"), "k.slope"),
        ] {
            let msg = parse(&CASE_A.replace(edit.0, edit.1)).unwrap_err().to_string();
            assert!(msg.contains(key), "{key}: {msg}");
        }
        let err = parse(&format!("{CASE_A}\ngrid.typo = 3")).unwrap_err();
        assert!(matches!(err, CliError::Syntax { line: 11, .. }), "{err}");
        assert!(matches!(parse(&format!("{CASE_A}\ngrid.nx = 3")).unwrap_err(), CliError::Syntax { .. }));
        assert!(matches!(parse("just words").unwrap_err(), CliError::Syntax { line: 1, .. }));
    }

    #[test]
    fn oracle_defaults_follow_the_profile() {
        let with = |k: &str| parse(&CASE_A.replace("k.kind = example_a", k)).unwrap().oracle;
        assert_eq!(with("k.kind = example_b"), Some(AnalyticCase::B));
        assert_eq!(with("k.kind = linear\nk.slope = 1"), Some(AnalyticCase::Diagonal));
        assert_eq!(with("k.kind = zero"), None);
        assert_eq!(with("k.kind = example_a\nmap.sign = plus_g"), None);
    }

    #[test]
    fn tabulated_profile_from_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("k.csv"), "t,K,Kprime\n-4,-0.5,0.1\n0,0,0.2\n4,0.5,0.1\n").unwrap();
        let text = CASE_A.replace("k.kind = example_a", "k.kind = tabulated\nk.knots_file = k.csv");
        let c = RunConfig::parse(&text, dir.path(), &[]).unwrap();
        let KProfile::Tabulated(tab) = &c.profile else { panic!() };
        assert_eq!(tab.knots().len(), 3);
        assert_eq!(c.curve_interval(&c.profile, (-3.0, 3.0)), (-3.04, 3.04));
        assert!(c.build_map().is_ok());

        fs::write(dir.path().join("k.csv"), "-4,-0.5,0.1\n0,0\n").unwrap();
        let msg = RunConfig::parse(&text, dir.path(), &[]).unwrap_err().to_string();
        assert!(msg.contains("k.knots_file") && msg.contains("line 2"), "{msg}");

        let missing = text.replace("k.csv", "nope.csv");
        assert!(matches!(RunConfig::parse(&missing, dir.path(), &[]).unwrap_err(), CliError::Io { .. }));
    }
}
