//! Evolution under the bipartite multiplier exp(-it(|xi|^2 - |xi'|^2)),
//! an independent kernel-quadrature oracle, and the parabolic rescaling map.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::lattice::{BipartiteField, GridSpec};

/// Validated finite evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationTime(pub(crate) f64);

impl PropagationTime {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::BadTime(t));
        }
        Ok(Self(t))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Applies the wave propagator for time `t`: each Fourier coefficient is
/// multiplied by exp(-it(|xi|^2 - |xi'|^2)). Unitary on L^2.
pub fn propagate(field: &BipartiteField, t: PropagationTime) -> BipartiteField {
    let grid = *field.grid();
    let t = t.get();
    if t == 0.0 {
        return field.clone();
    }
    let mut values = field.values().to_vec();
    let shape = grid.shape();
    fft::fft_nd(&mut values, &shape, false);
    let freq_sq = grid.frequency_sq_table();
    apply_multiplier(&mut values, &grid, |omega| Complex64::cis(-t * omega), &freq_sq);
    fft::fft_nd(&mut values, &shape, true);
    let norm = 1.0 / grid.total_samples() as f64;
    for v in &mut values {
        *v *= norm;
    }
    BipartiteField::from_values_unchecked(grid, values)
}

/// Convenience wrapper validating `t` on the way in.
pub fn propagate_at(field: &BipartiteField, t: f64) -> Result<BipartiteField> {
    Ok(propagate(field, PropagationTime::new(t)?))
}

fn apply_multiplier(
    values: &mut [Complex64],
    grid: &GridSpec,
    f: impl Fn(f64) -> Complex64,
    freq_sq: &[f64],
) {
    let n_pts = grid.points_per_axis();
    match grid.n() {
        1 => {
            for mx in 0..n_pts {
                for my in 0..n_pts {
                    let omega = freq_sq[mx] - freq_sq[my];
                    values[mx * n_pts + my] *= f(omega);
                }
            }
        }
        2 => {
            let mut flat = 0usize;
            for mx0 in 0..n_pts {
                for mx1 in 0..n_pts {
                    let x_part = freq_sq[mx0] + freq_sq[mx1];
                    for my0 in 0..n_pts {
                        let xy_part = x_part - freq_sq[my0];
                        for f1 in freq_sq.iter().take(n_pts) {
                            values[flat] *= f(xy_part - f1);
                            flat += 1;
                        }
                    }
                }
            }
        }
        _ => unreachable!("GridSpec enforces n in {{1, 2}}"),
    }
}

/// One-factor Schroedinger kernel K_t(z) = (4 pi i t)^(-n/2) exp(i|z|^2/(4t))
/// evaluated for a scalar separation `z` (the kernel factorizes over axes).
/// The amplitude uses the principal branch,
/// (4 pi i t)^(-1/2) = (4 pi |t|)^(-1/2) exp(-i pi sign(t) / 4) per axis.
fn kernel_1d(t: f64, z: f64) -> Complex64 {
    let amp = (4.0 * std::f64::consts::PI * t.abs()).powf(-0.5);
    let branch = -std::f64::consts::FRAC_PI_4 * t.signum();
    amp * Complex64::cis(branch + z * z / (4.0 * t))
}

/// |K_t(x)| for the full n-dimensional kernel: (4 pi |t|)^(-n/2), independent
/// of x.
pub fn kernel_modulus(grid: &GridSpec, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::KernelSingularTime);
    }
    if !t.is_finite() {
        return Err(Error::BadTime(t));
    }
    Ok((4.0 * std::f64::consts::PI * t.abs()).powf(-0.5 * grid.n() as f64))
}

/// Oversampling factor for the kernel quadrature. The chirp in the kernel
/// carries local frequency |x - x'| / (2|t|); quadrature at the raw grid
/// spacing aliases it once that exceeds pi/h, planting ghost images at
/// |x| ~ 2|t| pi/h. Sampling the integrand on an 8x finer line (the data is
/// band-limited, so its trigonometric interpolant is exact for grid data)
/// moves the first alias well outside the box for the coarse-grid settings
/// this oracle is meant for.
const KERNEL_OVERSAMPLE: usize = 8;

/// Independent oracle for [`propagate`]: evaluates
/// `K_{-t} *_y (K_t *_x G)` by direct quadrature with uniform weights over
/// the box. The kernel factorizes over axes, so the n-dimensional
/// convolution is applied one axis at a time; each line is oversampled 8x
/// before the sum. Intended for coarse grids with data
/// that decays below roundoff at the box boundary.
pub fn propagate_kernel(field: &BipartiteField, t: PropagationTime) -> Result<BipartiteField> {
    let t = t.get();
    if t == 0.0 {
        return Err(Error::KernelSingularTime);
    }
    let grid = *field.grid();
    let n = grid.n();
    let n_pts = grid.points_per_axis();
    let fine_pts = n_pts * KERNEL_OVERSAMPLE;
    let fine_h = grid.spacing() / KERNEL_OVERSAMPLE as f64;
    let shape = grid.shape();

    // kernel weight by fine-index difference d = 4i - j in
    // [-(fine_pts - 1), fine_pts - 1]
    let table = |time: f64| -> Vec<Complex64> {
        (-(fine_pts as i64 - 1)..=(fine_pts as i64 - 1))
            .map(|d| kernel_1d(time, d as f64 * fine_h) * fine_h)
            .collect()
    };
    let k_fwd = table(t);
    let k_bwd = table(-t);

    let mut values = field.values().to_vec();
    for axis in 0..2 * n {
        let k = if axis < n { &k_fwd } else { &k_bwd };
        let mut lines = fft::gather_lines(&values, &shape, axis);
        lines.par_chunks_mut(n_pts).for_each(|line| {
            let fine = oversample_line(line, KERNEL_OVERSAMPLE);
            for (i, out) in line.iter_mut().enumerate() {
                let offset = (i * KERNEL_OVERSAMPLE) as i64 + fine_pts as i64 - 1;
                let mut acc = Complex64::default();
                for (j, g) in fine.iter().enumerate() {
                    acc += k[(offset - j as i64) as usize] * g;
                }
                *out = acc;
            }
        });
        fft::scatter_lines(&lines, &shape, axis, &mut values);
    }
    BipartiteField::new(grid, values)
}

/// Samples the trigonometric interpolant of a grid line on a `factor`-times
/// finer grid by zero-padding its spectrum; bin N/2 keeps its place at
/// frequency index -N/2, matching the grid's frequency convention.
fn oversample_line(line: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = line.len();
    let fine = n * factor;
    let mut spectrum = line.to_vec();
    fft::fft_nd(&mut spectrum, &[n], false);
    let mut padded = vec![Complex64::default(); fine];
    for (m, c) in spectrum.into_iter().enumerate() {
        let k = if m < n / 2 { m as i64 } else { m as i64 - n as i64 };
        padded[k.rem_euclid(fine as i64) as usize] = c;
    }
    fft::fft_nd(&mut padded, &[fine], true);
    let scale = 1.0 / n as f64;
    for v in &mut padded {
        *v *= scale;
    }
    padded
}

/// Parabolic rescaling f_lambda(x, y) = f(lambda x, lambda y): the sample
/// values are reused verbatim on a box shrunk by 1/lambda, so the scaling
/// identities hold exactly in the grid's own arithmetic.
pub fn rescale(field: &BipartiteField, lambda: f64) -> Result<BipartiteField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::BadScale(lambda));
    }
    let old = field.grid();
    let new_grid = GridSpec::new(old.n(), old.points_per_axis(), old.half_length() / lambda)?;
    Ok(BipartiteField::from_values_unchecked(new_grid, field.values().to_vec()))
}
