//! Mixed Lebesgue norms L^{r1}_x L^{r2}_y, first-order Sobolev norms in y,
//! space-time L^q_t norms over trajectories, and the one-dimensional
//! fractional-integral convolution.
//!
//! Quadrature is plain node sums with weight h^n per node and factor,
//! consistent with the FFT's implicit periodicity; r = infinity is realized
//! as the grid maximum. Time integrals use left-endpoint Riemann sums over
//! the uniform time grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::lattice::{BipartiteField, GridSpec};

/// A Lebesgue exponent in [1, infinity].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinity;

    pub fn new(r: f64) -> Result<Self> {
        if r.is_infinite() && r > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::BadExponent(r));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent pair for the iterated norm: inner `r2` over y, outer `r1` over x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormSpec {
    pub r1: Exponent,
    pub r2: Exponent,
}

impl MixedNormSpec {
    pub fn new(r1: Exponent, r2: Exponent) -> Self {
        Self { r1, r2 }
    }
}

fn p_norm(values: impl Iterator<Item = f64>, weight: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => values.fold(0.0, f64::max),
        Exponent::Finite(p) => {
            if p == 2.0 {
                let sum: f64 = values.map(|v| v * v).sum();
                (weight * sum).sqrt()
            } else if p == 1.0 {
                let sum: f64 = values.sum();
                weight * sum
            } else {
                let sum: f64 = values.map(|v| v.powf(p)).sum();
                (weight * sum).powf(1.0 / p)
            }
        }
    }
}

/// Inner y-norms of every x-slice. Slices are contiguous because the x-axes
/// are outermost in the sample layout.
fn y_norms(field: &BipartiteField, r2: Exponent) -> Vec<f64> {
    let grid = field.grid();
    let y_count = grid.points_per_axis().pow(grid.n() as u32);
    let w = grid.factor_cell_volume();
    field
        .values()
        .chunks_exact(y_count)
        .map(|slice| p_norm(slice.iter().map(|v| v.norm()), w, r2))
        .collect()
}

/// Iterated mixed norm: ( sum_x h^n ( sum_y h^n |f|^{r2} )^{r1/r2} )^{1/r1},
/// with maxima replacing sums for infinite exponents.
pub fn mixed_norm(field: &BipartiteField, spec: &MixedNormSpec) -> f64 {
    let inner = y_norms(field, spec.r2);
    p_norm(inner.into_iter(), field.grid().factor_cell_volume(), spec.r1)
}

/// Pointwise magnitude of the y-gradient, computed spectrally by
/// multiplication with i*xi' on each y-axis.
pub fn y_gradient_magnitude(field: &BipartiteField) -> BipartiteField {
    let grid = *field.grid();
    let shape = grid.shape();
    let n = grid.n();
    let n_pts = grid.points_per_axis();
    let freqs: Vec<f64> = (0..n_pts).map(|m| grid.frequency(m)).collect();
    let mut mag_sq = vec![0.0f64; field.values().len()];
    for axis in n..2 * n {
        let mut values = field.values().to_vec();
        fft::fft_single_axis(&mut values, &shape, axis, false);
        let stride: usize = shape[axis + 1..].iter().product();
        let norm = 1.0 / n_pts as f64;
        for (flat, v) in values.iter_mut().enumerate() {
            let m = (flat / stride) % n_pts;
            *v *= Complex64::new(0.0, freqs[m] * norm);
        }
        fft::fft_single_axis(&mut values, &shape, axis, true);
        for (acc, v) in mag_sq.iter_mut().zip(&values) {
            *acc += v.norm_sqr();
        }
    }
    let values = mag_sq.into_iter().map(|m| Complex64::new(m.sqrt(), 0.0)).collect();
    BipartiteField::from_values_unchecked(grid, values)
}

/// The y-factor of the Sobolev norm, aggregated over x by the grid supremum:
/// sup_x ( ||f(x,.)||_{r2} + ||grad_y f(x,.)||_{r2} ), the gradient term
/// present only at order 1. Order 0 reduces to the plain y-Lebesgue factor.
pub fn sobolev_y_norm(field: &BipartiteField, r2: Exponent, order: u32) -> Result<f64> {
    if order > 1 {
        return Err(Error::BadSobolevOrder(order));
    }
    let base = y_norms(field, r2);
    if order == 0 {
        return Ok(base.into_iter().fold(0.0, f64::max));
    }
    let grad = y_norms(&y_gradient_magnitude(field), r2);
    Ok(base
        .into_iter()
        .zip(grad)
        .map(|(a, b)| a + b)
        .fold(0.0, f64::max))
}

/// Full mixed Sobolev norm L^{r1}_x W^{order,r2}_y in the sum convention:
/// mixed norm of the field plus (at order 1) the mixed norm of the y-gradient
/// magnitude.
pub fn mixed_sobolev_norm(
    field: &BipartiteField,
    spec: &MixedNormSpec,
    order: u32,
) -> Result<f64> {
    if order > 1 {
        return Err(Error::BadSobolevOrder(order));
    }
    let mut total = mixed_norm(field, spec);
    if order == 1 {
        total += mixed_norm(&y_gradient_magnitude(field), spec);
    }
    Ok(total)
}

/// A time-indexed sequence of fields on a shared grid with uniform spacing.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<BipartiteField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<BipartiteField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::BadTrajectory("no time samples"));
        }
        if times.len() != fields.len() {
            return Err(Error::BadTrajectory("times and fields differ in length"));
        }
        let grid = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::BadTrajectory("fields do not share a grid"));
        }
        if times.len() >= 2 {
            let dt = times[1] - times[0];
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::BadTrajectory("times must be strictly increasing"));
            }
            for k in 1..times.len() - 1 {
                let step = times[k + 1] - times[k];
                if (step - dt).abs() > 1e-12 * dt.abs().max(times[k].abs()) {
                    return Err(Error::BadTrajectory("time grid is not uniform"));
                }
            }
        }
        Ok(Self { times, fields })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[BipartiteField] {
        &self.fields
    }

    pub fn grid(&self) -> &GridSpec {
        self.fields[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Uniform step, zero for a single snapshot.
    pub fn dt(&self) -> f64 {
        if self.times.len() >= 2 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }
}

/// Space-time norm ( sum_t dt * mixed_norm(f_t)^q )^{1/q} with a
/// left-endpoint Riemann sum over the uniform grid; for q = infinity, the
/// maximum of the per-time mixed norms over every sample.
pub fn spacetime_norm(traj: &Trajectory, q: Exponent, spec: &MixedNormSpec) -> Result<f64> {
    match q {
        Exponent::Infinity => Ok(traj
            .fields()
            .iter()
            .map(|f| mixed_norm(f, spec))
            .fold(0.0, f64::max)),
        Exponent::Finite(q) => {
            if traj.len() < 2 {
                return Err(Error::BadTrajectory(
                    "finite-q time integral needs at least 2 samples",
                ));
            }
            let dt = traj.dt();
            let sum: f64 = traj.fields()[..traj.len() - 1]
                .iter()
                .map(|f| mixed_norm(f, spec).powf(q))
                .sum();
            Ok((dt * sum).powf(1.0 / q))
        }
    }
}

/// CSV rows of the per-time mixed norms: columns t, norm, r1, r2 with six
/// significant digits.
pub fn mixed_norm_series_csv(traj: &Trajectory, spec: &MixedNormSpec) -> String {
    let mut out = String::from("t,norm,r1,r2\n");
    for (t, f) in traj.times().iter().zip(traj.fields()) {
        let norm = mixed_norm(f, spec);
        out.push_str(&format!("{:.5e},{:.5e},{},{}\n", t, norm, spec.r1, spec.r2));
    }
    out
}

/// Convolution of a compactly supported sampled function with |t|^(-alpha).
///
/// Samples are cell centers with spacing `dt`; the kernel is integrated
/// exactly over each cell against the piecewise-constant representation of
/// `g`, so the singular cell needs no regularization:
/// integral of |u|^(-alpha) du = sign(u) |u|^(1-alpha) / (1-alpha).
pub fn hls_convolve(g: &[f64], dt: f64, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadHlsAlpha(alpha));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::BadTrajectory("sample spacing must be positive"));
    }
    let m = g.len();
    let anti = |u: f64| u.signum() * u.abs().powf(1.0 - alpha) / (1.0 - alpha);
    // weight for index difference d = i - j, shifted by m-1
    let weights: Vec<f64> = (-(m as i64 - 1)..=(m as i64 - 1))
        .map(|d| {
            let center = d as f64 * dt;
            anti(center + 0.5 * dt) - anti(center - 0.5 * dt)
        })
        .collect();
    Ok((0..m)
        .map(|i| {
            g.iter()
                .enumerate()
                .map(|(j, gj)| gj * weights[(i as i64 - j as i64 + m as i64 - 1) as usize])
                .sum()
        })
        .collect())
}

/// Riemann L^p norm of a sampled signal on its cell-centered grid.
pub fn lp_norm_time(values: &[f64], dt: f64, p: Exponent) -> f64 {
    p_norm(values.iter().map(|v| v.abs()), dt, p)
}
