//! Numerical laboratory for the bipartite wave propagator exp(it(Dx - Dy)).
//!
//! The crate evolves bipartite wave functions spectrally on a periodic box,
//! measures mixed space-time Lebesgue norms, checks dispersive-decay and
//! space-time integrability quotients at desk scale, and solves the
//! associated nonlinear equation by Picard iteration on the Duhamel formula
//! and by split-step spectral stepping.

pub mod error;
pub mod exponents;
mod fft;
pub mod lattice;
pub mod nls;
pub mod norms;
pub mod profiles;
pub mod propagator;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{
    from_spectral, make_grid, sample, to_spectral, BipartiteField, GridSpec, SpectralField,
};
pub use norms::{Exponent, MixedNormSpec, Trajectory};
pub use propagator::{propagate, propagate_kernel, rescale, PropagationTime};

pub use num_complex::Complex64;
