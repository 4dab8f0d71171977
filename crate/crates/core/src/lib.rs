//! Exact Chern-character computations on the blow-up of P² at m collinear
//! points.
//!
//! Everything works at the level of numerical data: divisor classes,
//! Chern characters, line-bundle cohomology, resolutions of prioritary
//! sheaves, exceptional characters obtained by mutation, existence checks for
//! stable sheaves and the nef cone of the Hilbert scheme of points.

pub mod cache;
pub mod characters;
pub mod cohomology;
pub mod error;
pub mod exceptional;
pub mod existence;
pub mod hilbert;
pub mod lp;
pub mod par;
pub mod picard;
pub mod prioritary;
pub mod rational;

pub use characters::{ChernCharacter, Polarization, ReducedHilbertPoly, SlopeDisc};
pub use error::{Error, Result};
pub use par::Execution;
pub use picard::DivisorClass;
pub use rational::Q;
