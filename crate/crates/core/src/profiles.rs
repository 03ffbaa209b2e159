//! Named initial-data profiles shared by the experiment runner and tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fft;
use crate::lattice::{sample, BipartiteField, GridSpec};

/// Initial-data families addressable from config files.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// exp(-(|x|^2 + |y|^2) / (2 w^2))
    Gaussian { width: f64 },
    /// exp(-|x|^2/2) exp(-|y|^2/2), the width-1 product Gaussian.
    ProductGaussian,
    /// exp(i xi0 x_1) exp(-(|x|^2 + |y|^2)/2), modulated along the first
    /// x-axis.
    PlaneModulated { xi0: f64 },
    /// Unit-norm field with uniform random Fourier coefficients on bins
    /// |k| <= cutoff per axis; deterministic in the seed.
    RandomBandlimited { cutoff: usize },
}

impl Profile {
    pub fn realize(&self, grid: GridSpec, seed: u64) -> Result<BipartiteField> {
        match self {
            Profile::Gaussian { width } => gaussian(grid, *width),
            Profile::ProductGaussian => gaussian(grid, 1.0),
            Profile::PlaneModulated { xi0 } => {
                if !xi0.is_finite() {
                    return Err(Error::BadTime(*xi0));
                }
                let xi0 = *xi0;
                sample(grid, move |x, y| {
                    let r2: f64 = x.iter().chain(y.iter()).map(|v| v * v).sum();
                    Complex64::cis(xi0 * x[0]) * (-0.5 * r2).exp()
                })
            }
            Profile::RandomBandlimited { cutoff } => Ok(random_bandlimited(grid, *cutoff, seed)),
        }
    }
}

/// Isotropic Gaussian of the given width on both factors.
pub fn gaussian(grid: GridSpec, width: f64) -> Result<BipartiteField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::BadScale(width));
    }
    let inv_two_w2 = 0.5 / (width * width);
    sample(grid, move |x, y| {
        let r2: f64 = x.iter().chain(y.iter()).map(|v| v * v).sum();
        Complex64::new((-inv_two_w2 * r2).exp(), 0.0)
    })
}

/// Unit-L^2 random field supported on low Fourier bins. The coefficient
/// layout is filled in a fixed index order, so a fixed seed gives a
/// bit-identical field.
pub fn random_bandlimited(grid: GridSpec, cutoff: usize, seed: u64) -> BipartiteField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pts = grid.points_per_axis();
    let cutoff = cutoff.min(n_pts / 2 - 1).max(1);
    let axes = grid.axis_count();
    let mut coeffs = vec![Complex64::default(); grid.total_samples()];
    let low = |m: usize| m <= cutoff || m >= n_pts - cutoff;
    let mut idx = vec![0usize; axes];
    for (flat, slot) in coeffs.iter_mut().enumerate() {
        crate::lattice::unravel(flat, n_pts, &mut idx);
        if idx.iter().all(|&m| low(m)) {
            *slot = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    fft::fft_nd(&mut coeffs, &grid.shape(), true);
    let field = BipartiteField::from_values_unchecked(grid, coeffs);
    let norm = field.l2_norm();
    field.scaled(Complex64::new(1.0 / norm, 0.0))
}
