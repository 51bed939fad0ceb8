//! Discrete Littlewood-Paley, Morrey and Triebel-Lizorkin-Morrey machinery on
//! periodic grids, with numerical checks of the associated inequalities.

pub mod error;
pub mod grid;
pub mod interp;
pub mod io;
pub mod lp;
pub mod maximal;
pub mod morrey;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod smoothness;
pub mod suites;
mod windows;

pub use error::{Error, Result};
pub use grid::{
    forward_transform, inverse_transform, random_bandlimited, GridFunction, GridSpec,
    SpectralFunction,
};
pub use lp::{BumpProfile, Flavor, LpFamily};
pub use morrey::{morrey_norm, morrey_norm_vector, BallSampler, LebesguePair, WindowShape};
