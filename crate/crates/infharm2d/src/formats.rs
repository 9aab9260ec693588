//! CSV, PPM and plain-text report formats.

use std::io::{self, BufRead, Write};

use infharm2d_core::{GridSpec, InterfaceGraph, PhaseLabel, PhaseMap};

use crate::eval::FieldRow;

pub const FIELD_HEADER: &str = "x,y,u1,u2,du11,du21,du12,du22,res1,res2,rank_indicator";
pub const PHASE_HEADER: &str = "x,y,label,indicator";
pub const INTERFACE_HEADER: &str = "piece,vertex,x,y,simplified";

/// 17 significant digits, enough to read back the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `du{α}{i}` is `∂u_α/∂x_i`.
pub fn write_field_csv<W: Write>(mut w: W, rows: &[FieldRow]) -> io::Result<()> {
    writeln!(w, "{FIELD_HEADER}")?;
    for r in rows {
        let d = &r.du;
        let vals = [
            r.x,
            r.y,
            r.u.x,
            r.u.y,
            d.get(0, 0),
            d.get(1, 0),
            d.get(0, 1),
            d.get(1, 1),
            r.residual.x,
            r.residual.y,
            r.rank_indicator,
        ];
        let line: Vec<String> = vals.iter().map(|&v| num(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_phase_csv<W: Write>(mut w: W, pm: &PhaseMap) -> io::Result<()> {
    writeln!(w, "{PHASE_HEADER}")?;
    let g = &pm.grid;
    for j in 0..g.ny {
        for i in 0..g.nx {
            writeln!(w, "{},{},{},{}", num(g.x(i)), num(g.y(j)), pm.label(i, j).as_str(), num(pm.indicator(i, j)))?;
        }
    }
    w.flush()
}

/// Rebuilds a phase map from its CSV dump. The grid is recovered from the
/// first and last coordinates; every row is checked against it.
pub fn read_phase_csv<R: BufRead>(r: R, tol: f64) -> Result<PhaseMap, String> {
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == PHASE_HEADER => {}
        _ => return Err(format!("missing header `{PHASE_HEADER}`")),
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut labels = Vec::new();
    let mut indicator = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let row = n + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(format!("line {row}: expected 4 fields"));
        }
        let p = |s: &str| s.parse::<f64>().map_err(|_| format!("line {row}: bad number `{s}`"));
        xs.push(p(f[0])?);
        ys.push(p(f[1])?);
        labels.push(PhaseLabel::parse(f[2]).ok_or_else(|| format!("line {row}: unknown label `{}`", f[2]))?);
        indicator.push(p(f[3])?);
    }
    if ys.is_empty() {
        return Err("no data rows".into());
    }
    let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
    if ys.len() % nx != 0 {
        return Err(format!("{} rows do not form rows of {nx} nodes", ys.len()));
    }
    let ny = ys.len() / nx;
    let (last_x, last_y) = (xs[nx - 1], ys[ys.len() - 1]);
    let grid = GridSpec::new(xs[0], last_x, ys[0], last_y, nx, ny).map_err(|e| e.to_string())?;
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            if xs[k] != grid.x(i) || ys[k] != grid.y(j) {
                return Err(format!("line {}: node ({i}, {j}) is off the grid", k + 2));
            }
        }
    }
    PhaseMap::from_parts(grid, tol, labels, indicator).map_err(|e| e.to_string())
}

pub fn label_color(label: PhaseLabel) -> [u8; 3] {
    match label {
        PhaseLabel::TwoDim => [255, 255, 255],
        PhaseLabel::OneDim => [96, 96, 96],
        PhaseLabel::InterfaceBand => [0, 0, 0],
    }
}

/// Binary P6 image with one pixel per node, `ymax` on the top row.
pub fn write_ppm<W: Write>(mut w: W, pm: &PhaseMap) -> io::Result<()> {
    let g = &pm.grid;
    write!(w, "P6\n{} {}\n255\n", g.nx, g.ny)?;
    let mut buf = Vec::with_capacity(3 * g.len());
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            buf.extend_from_slice(&label_color(pm.label(i, j)));
        }
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn write_interface_csv<W: Write>(mut w: W, ig: &InterfaceGraph) -> io::Result<()> {
    writeln!(w, "{INTERFACE_HEADER}")?;
    for (piece, p) in ig.polylines.iter().enumerate() {
        let mut kept = p.kept.iter().peekable();
        for (v, q) in p.points.iter().enumerate() {
            let simplified = kept.next_if(|&&k| k == v).is_some();
            writeln!(w, "{piece},{v},{},{},{}", num(q.x), num(q.y), u8::from(simplified))?;
        }
    }
    w.flush()
}

/// `junction x y degree` and `corner x y angle_deg` lines.
pub fn write_interface_report<W: Write>(mut w: W, ig: &InterfaceGraph) -> io::Result<()> {
    for j in &ig.junctions {
        writeln!(w, "junction {} {} {}", num(j.pos.x), num(j.pos.y), j.degree)?;
    }
    for c in &ig.corners {
        writeln!(w, "corner {} {} {}", num(c.pos.x), num(c.pos.y), num(c.angle_deg))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use infharm2d_core::phase::{build_phase_map, extract_interface, InterfaceOptions};
    use infharm2d_core::{KProfile, PlanarCurve, SeparatedMap};

    fn case_b(n: usize) -> PhaseMap {
        let m = SeparatedMap::minus_f(PlanarCurve::new(KProfile::ExampleB, -3.0, 3.0).unwrap());
        build_phase_map(&m, &GridSpec::square(-3.0, 3.0, n).unwrap(), 1e-8).unwrap()
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, f64::MAX, 2.0f64.sqrt(), -0.0, 5e-324] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn phase_csv_round_trip() {
        let pm = case_b(41);
        let mut buf = Vec::new();
        write_phase_csv(&mut buf, &pm).unwrap();
        let back = read_phase_csv(&buf[..], pm.tol).unwrap();
        assert_eq!(back, pm);
    }

    #[test]
    fn phase_csv_rejects_garbage() {
        assert!(read_phase_csv(&b"x,y\n"[..], 1e-8).is_err());
        assert!(read_phase_csv(&b"x,y,label,indicator\n"[..], 1e-8).is_err());
        let bad = b"x,y,label,indicator\n0,0,two_dim,1\n1,0,sideways,1\n";
        assert!(read_phase_csv(&bad[..], 1e-8).unwrap_err().contains("sideways"));
        let ragged = b"x,y,label,indicator\n0,0,two_dim,1\n1,0,two_dim,1\n0,1,two_dim,1\n";
        assert!(read_phase_csv(&ragged[..], 1e-8).is_err());
    }

    #[test]
    fn ppm_layout() {
        let pm = case_b(9);
        let mut buf = Vec::new();
        write_ppm(&mut buf, &pm).unwrap();
        let header = b"P6\n9 9\n255\n";
        assert_eq!(&buf[..header.len()], header);
        let px = |k: usize| &buf[header.len() + 3 * k..header.len() + 3 * k + 3];
        assert_eq!(buf.len() - header.len(), 3 * 81);
        // Centre node (0, 0) is inside the flat square.
        assert_eq!(px(40), &[96, 96, 96]);
        // Top-left pixel is (-3, 3), rank 2; top-right is (3, 3) on the diagonal ray.
        assert_eq!(px(0), &[255, 255, 255]);
        assert_eq!(px(8), &[0, 0, 0]);
        // Bottom row holds ymin.
        assert_eq!(px(72), &label_color(pm.label(0, 0)));
    }

    #[test]
    fn interface_outputs() {
        let pm = case_b(121);
        let ig = extract_interface(&pm, &InterfaceOptions::default());
        let mut csv = Vec::new();
        write_interface_csv(&mut csv, &ig).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        let rows = csv.lines().count() - 1;
        assert_eq!(rows, ig.polylines.iter().map(|p| p.points.len()).sum::<usize>());
        let kept = csv.lines().skip(1).filter(|l| l.ends_with(",1")).count();
        assert_eq!(kept, ig.polylines.iter().map(|p| p.kept.len()).sum::<usize>());

        let mut report = Vec::new();
        write_interface_report(&mut report, &ig).unwrap();
        let report = String::from_utf8(report).unwrap();
        assert_eq!(report.lines().filter(|l| l.starts_with("junction ")).count(), 2);
        assert_eq!(report.lines().filter(|l| l.starts_with("corner ")).count(), 2);
        for l in report.lines() {
            assert_eq!(l.split(' ').count(), 4, "{l}");
        }
    }
}
