//! Phase decomposition of a planar map into the rank-2 phase, the rank-1
//! phase and the interface between them, with analytic oracles, interface
//! graphs and the structural checks that go with them.

use alloc::vec::Vec;

use crate::error::{check_tol, Error, Result};
use crate::linalg2::svd2;
use crate::maps::{Jet2, SeparatedMap};
use crate::operator::{GridJets, GridSpec};

mod checks;
mod interface;
mod oracle;

pub use checks::{
    check_prop2_affine, check_prop2_dichotomy, check_rank1_characterization, projection_jump, AffineReport,
    DichotomyBranch, DichotomyReport, PieceReport, Rank1Report, AFFINE_TOL, DIAGONAL_SLOPE_TOL, FLAT_CURVATURE_TOL,
};
pub use interface::{extract_interface, Corner, GraphNode, InterfaceGraph, InterfaceOptions, Junction, Polyline};
pub use oracle::{analytic_phase_oracle, oracle_agreement, AgreementReport, AnalyticCase, SigmaPiece};

/// Phase of a single grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseLabel {
    /// `rank Du = 2`.
    TwoDim,
    /// `rank Du ≤ 1` throughout a neighbourhood.
    OneDim,
    /// On (or within the hysteresis band of) the boundary of the rank-2 phase.
    InterfaceBand,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::TwoDim => "two_dim",
            PhaseLabel::OneDim => "one_dim",
            PhaseLabel::InterfaceBand => "interface",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "two_dim" => Some(PhaseLabel::TwoDim),
            "one_dim" => Some(PhaseLabel::OneDim),
            "interface" => Some(PhaseLabel::InterfaceBand),
            _ => None,
        }
    }
}

/// Pointwise classification from the jet alone.
///
/// The indicator is `σ₂ / max(1, σ₁)` of `Du`. Above `2·tol` the node is
/// rank 2, below `tol/2` rank 1; in between it is left in the band.
pub fn classify_point(jet: &Jet2, tol: f64) -> Result<(PhaseLabel, f64)> {
    check_tol(tol)?;
    let svd = svd2(&jet.du);
    let indicator = svd.indicator();
    let label = if svd.rank(tol) == 2 && indicator > 2.0 * tol {
        PhaseLabel::TwoDim
    } else if indicator < 0.5 * tol {
        PhaseLabel::OneDim
    } else {
        PhaseLabel::InterfaceBand
    };
    Ok((label, indicator))
}

/// Pointwise data for one node before neighbourhood post-processing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub label: PhaseLabel,
    pub indicator: f64,
    /// `det Du`; its sign flips across rank-1 cracks inside the rank-2 phase.
    pub det: f64,
}

pub fn sample_node(jet: &Jet2, tol: f64) -> Result<NodeSample> {
    let (label, indicator) = classify_point(jet, tol)?;
    Ok(NodeSample { label, indicator, det: jet.du.det() })
}

/// Labels and rank indicators on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub grid: GridSpec,
    pub tol: f64,
    labels: Vec<PhaseLabel>,
    indicator: Vec<f64>,
}

const NEIGHBORS4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl PhaseMap {
    /// Assembles a phase map from already final labels (e.g. read back from disk).
    pub fn from_parts(grid: GridSpec, tol: f64, labels: Vec<PhaseLabel>, indicator: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        check_tol(tol)?;
        if labels.len() != grid.len() || indicator.len() != grid.len() {
            return Err(Error::InvalidGrid("label and indicator arrays must have nx*ny entries"));
        }
        Ok(PhaseMap { grid, tol, labels, indicator })
    }

    /// Builds the phase map from pointwise samples (row-major, `x` fastest).
    ///
    /// Σ is the discrete boundary of the rank-2 phase: a non-rank-2 node with
    /// a rank-2 4-neighbour joins the band, and so does the lower-indicator
    /// node of any 4-adjacent rank-2 pair whose determinants have opposite
    /// signs (a rank-1 crack passing between grid nodes).
    pub fn from_pointwise(grid: GridSpec, tol: f64, samples: &[NodeSample]) -> Result<Self> {
        let labels = samples.iter().map(|s| s.label).collect();
        let indicator = samples.iter().map(|s| s.indicator).collect();
        let mut pm = PhaseMap::from_parts(grid, tol, labels, indicator)?;
        let pointwise = pm.labels.clone();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let k = grid.index(i, j);
                match pointwise[k] {
                    PhaseLabel::OneDim => {
                        if pm.neighbors4(i, j).any(|(a, b)| pointwise[grid.index(a, b)] == PhaseLabel::TwoDim) {
                            pm.labels[k] = PhaseLabel::InterfaceBand;
                        }
                    }
                    PhaseLabel::TwoDim => {
                        for (a, b) in [(i + 1, j), (i, j + 1)] {
                            if a >= grid.nx || b >= grid.ny {
                                continue;
                            }
                            let m = grid.index(a, b);
                            if pointwise[m] != PhaseLabel::TwoDim || samples[k].det * samples[m].det >= 0.0 {
                                continue;
                            }
                            let lower = if samples[m].indicator < samples[k].indicator { m } else { k };
                            pm.labels[lower] = PhaseLabel::InterfaceBand;
                        }
                    }
                    PhaseLabel::InterfaceBand => {}
                }
            }
        }
        Ok(pm)
    }

    #[inline]
    pub fn label(&self, i: usize, j: usize) -> PhaseLabel {
        self.labels[self.grid.index(i, j)]
    }

    #[inline]
    pub fn indicator(&self, i: usize, j: usize) -> f64 {
        self.indicator[self.grid.index(i, j)]
    }

    pub fn labels(&self) -> &[PhaseLabel] {
        &self.labels
    }

    pub fn indicators(&self) -> &[f64] {
        &self.indicator
    }

    pub fn count(&self, label: PhaseLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub(crate) fn neighbors4(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        NEIGHBORS4.iter().filter_map(move |&(di, dj)| self.offset(i, j, di, dj))
    }

    pub(crate) fn offset(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<(usize, usize)> {
        let a = i.checked_add_signed(di)?;
        let b = j.checked_add_signed(dj)?;
        (a < self.grid.nx && b < self.grid.ny).then_some((a, b))
    }

    /// Nodes with `label` whose whole `(2·margin + 1)²` neighbourhood carries
    /// the same label and lies inside the grid.
    pub fn interior_nodes(&self, label: PhaseLabel, margin: usize) -> Vec<(usize, usize)> {
        let g = &self.grid;
        let mut out = Vec::new();
        if g.nx <= 2 * margin || g.ny <= 2 * margin {
            return out;
        }
        for j in margin..g.ny - margin {
            for i in margin..g.nx - margin {
                if self.label(i, j) != label {
                    continue;
                }
                let uniform =
                    (j - margin..=j + margin).all(|b| (i - margin..=i + margin).all(|a| self.label(a, b) == label));
                if uniform {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Coordinates of every node carrying one of `labels`.
    pub fn nodes_with(&self, labels: &[PhaseLabel]) -> Vec<(f64, f64)> {
        let g = &self.grid;
        let mut out = Vec::new();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if labels.contains(&self.label(i, j)) {
                    out.push((g.x(i), g.y(j)));
                }
            }
        }
        out
    }
}

/// Classifies every node of `grid` for a separated map.
pub fn build_phase_map(map: &SeparatedMap, grid: &GridSpec, tol: f64) -> Result<PhaseMap> {
    check_tol(tol)?;
    let jets = GridJets::new(map, grid)?;
    let mut samples = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            samples.push(sample_node(&jets.jet(i, j), tol)?);
        }
    }
    PhaseMap::from_pointwise(*grid, tol, &samples)
}
