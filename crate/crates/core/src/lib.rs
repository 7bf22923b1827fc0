//! Phase-space quantum mechanics toolkit.
//!
//! Two independent formulations live side by side: the Weyl-Wigner-Moyal
//! picture (quasiprobability fields on a (q,p) grid with a spectral star
//! product) and the Segal-Bargmann picture (holomorphic coefficient vectors
//! with ladder-operator actions), plus Aharonov-Bohm interference scenarios
//! executed in both and checked against closed forms.

pub mod ab;
pub mod bargmann;
pub mod consts;
pub mod error;
pub mod evolve;
pub mod fft;
pub mod grid;
pub mod oscbasis;
pub mod poly;
pub mod run;
pub mod special;
pub mod star;
pub mod states;
pub mod wigner;

pub use consts::PhysicalConstants;
pub use error::{Error, Result};
pub use grid::{PhaseGrid, PlaneGrid};
