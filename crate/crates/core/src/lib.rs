//! Pre-Schwarzian and Schwarzian derivatives of pluriharmonic maps
//! `f = h + conj(g)` on domains in C^n, with the matrix calculus around them
//! and independent numerical oracles.

pub mod affine;
pub mod error;
pub mod holomap;
pub mod lincomplex;
pub mod mapfile;
pub mod oracles;
pub mod plurimap;
pub mod verify;

pub use error::{Error, Result};
pub use holomap::{HoloMap, Jet2, MobiusMap, PolyMap};
pub use lincomplex::{BilinearOp, CMatrix, CVector, C64};
pub use plurimap::{PluriJet, PluriMap};
