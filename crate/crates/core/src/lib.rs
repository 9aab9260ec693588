//! Numerical construction and certification of explicit planar ∞-harmonic
//! maps `u(x, y) = f(x) + g(y)` built from unit-speed curves.
//!
//! The crate is `no_std` (with `alloc`): closed-form 2×2 linear algebra,
//! turning-angle profiles and their curves, the ∞-Laplacian, phase
//! classification and interface-graph extraction. File formats and the
//! command line live in the `infharm2d` crate.
#![no_std]

extern crate alloc;

mod error;
pub mod linalg2;
pub mod maps;
pub mod operator;
pub mod phase;
mod quadrature;

pub use error::{Error, Result};
pub use linalg2::{Mat2, Svd2, Vec2};
pub use maps::{CurveJet, GSign, Jet2, KProfile, Knot, PlanarCurve, SeparatedMap, TabulatedProfile};
pub use operator::{GridJets, GridSpec, Residual};
pub use phase::{InterfaceGraph, PhaseLabel, PhaseMap};
