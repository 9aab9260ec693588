use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use infharm2d_core::phase::extract_interface;
use infharm2d_core::PhaseLabel;

use crate::config::RunConfig;
use crate::error::{CliError, EXIT_FAIL, EXIT_PASS};
use crate::{eval, formats, verify};

#[derive(Debug, Parser)]
#[command(name = "infharm2d", version, about = "Explicit 2D infinity-harmonic maps: fields, phases, interfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample u, Du, the residual and the rank indicator on the grid
    Field(Options),
    /// Classify grid nodes into phases; writes a PPM image and a CSV dump
    Phase(Options),
    /// Trace the interface; writes polylines and a junction/corner report
    Interface(Options),
    /// Run the verification checks and report PASS/FAIL
    Verify(Options),
}

#[derive(Debug, clap::Args)]
pub struct Options {
    /// Run configuration file
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid nodes along x (overrides grid.nx)
    #[arg(long)]
    pub nx: Option<usize>,
    /// Grid nodes along y (overrides grid.ny)
    #[arg(long)]
    pub ny: Option<usize>,
    /// Relative rank tolerance (overrides tol.rank)
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Finite-difference step (overrides tol.fd_step)
    #[arg(long)]
    pub fd_step: Option<f64>,
}

impl Options {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut overrides = Vec::new();
        if let Some(n) = self.nx {
            overrides.push(("grid.nx", n.to_string()));
        }
        if let Some(n) = self.ny {
            overrides.push(("grid.ny", n.to_string()));
        }
        if let Some(t) = self.tol_rank {
            overrides.push(("tol.rank", format!("{t:e}")));
        }
        if let Some(h) = self.fd_step {
            overrides.push(("tol.fd_step", format!("{h:e}")));
        }
        let mut cfg = RunConfig::load(&self.config, &overrides)?;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn write_file<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    body(&mut w).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn cmd_field(cfg: &RunConfig, out: &mut (dyn Write + Send)) -> Result<u8, CliError> {
    let map = cfg.build_map()?;
    let rows = eval::field_rows(&map, &cfg.grid, cfg.tol_rank)?;
    let path = write_file(&cfg.out_dir, "field.csv", |w| formats::write_field_csv(w, &rows))?;
    let _ = writeln!(out, "wrote {} ({} rows)", path.display(), rows.len());
    Ok(EXIT_PASS)
}

pub fn cmd_phase(cfg: &RunConfig, out: &mut (dyn Write + Send)) -> Result<u8, CliError> {
    let map = cfg.build_map()?;
    let pm = eval::phase_map(&map, &cfg.grid, cfg.tol_rank)?;
    let ppm = write_file(&cfg.out_dir, "phase.ppm", |w| formats::write_ppm(w, &pm))?;
    let csv = write_file(&cfg.out_dir, "phase.csv", |w| formats::write_phase_csv(w, &pm))?;
    let _ = writeln!(out, "wrote {} and {}", ppm.display(), csv.display());
    for label in [PhaseLabel::TwoDim, PhaseLabel::OneDim, PhaseLabel::InterfaceBand] {
        let _ = writeln!(out, "{} {}", label.as_str(), pm.count(label));
    }
    Ok(EXIT_PASS)
}

pub fn cmd_interface(cfg: &RunConfig, out: &mut (dyn Write + Send)) -> Result<u8, CliError> {
    let map = cfg.build_map()?;
    let pm = eval::phase_map(&map, &cfg.grid, cfg.tol_rank)?;
    let ig = extract_interface(&pm, &cfg.interface);
    let csv = write_file(&cfg.out_dir, "interface.csv", |w| formats::write_interface_csv(w, &ig))?;
    let report = write_file(&cfg.out_dir, "interface_report.txt", |w| formats::write_interface_report(w, &ig))?;
    let _ = writeln!(out, "wrote {} and {}", csv.display(), report.display());
    let _ = formats::write_interface_report(&mut *out, &ig);
    Ok(EXIT_PASS)
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut (dyn Write + Send)) -> Result<u8, CliError> {
    let map = cfg.build_map()?;
    let report = verify::run(cfg, &map);
    for c in &report.checks {
        let _ = writeln!(out, "{c}");
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "verify: {verdict} ({} checks, {} failed)", report.checks.len(), report.failures());
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { EXIT_PASS } else { crate::error::EXIT_USAGE };
        }
    };
    let result = eval::thread_pool().and_then(|pool| {
        pool.install(|| match &cli.command {
            Command::Field(o) => cmd_field(&o.load()?, out),
            Command::Phase(o) => cmd_phase(&o.load()?, out),
            Command::Interface(o) => cmd_interface(&o.load()?, out),
            Command::Verify(o) => cmd_verify(&o.load()?, out),
        })
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "infharm2d: {e}");
            e.exit_code()
        }
    }
}
