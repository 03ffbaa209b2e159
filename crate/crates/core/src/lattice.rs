//! Discrete representation of bipartite wave functions on a periodic box.
//!
//! A field lives on `[-L, L)^n x [-L, L)^n` sampled with `N` points per axis,
//! stored row-major with the x-axes outermost. Frequencies follow the angular
//! convention `xi_k = pi k / L` for `k in [-N/2, N/2)`, and the spectral
//! transform is normalized so that the discrete Plancherel identity
//! `||f_hat||_2 = ||f||_2` holds exactly (up to rounding).

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;

const MAGIC: &[u8; 5] = b"BPWF1";

/// Periodic truncation of R^n x R^n: dimension per factor, points per axis and
/// box half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    points_per_axis: usize,
    half_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, points_per_axis: usize, half_length: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::UnsupportedDimension(n));
        }
        if points_per_axis < 4 || !points_per_axis.is_power_of_two() {
            return Err(Error::BadPointCount(points_per_axis));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::BadHalfLength(half_length));
        }
        Ok(Self { n, points_per_axis, half_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Grid spacing h = 2L/N, identical on every axis.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    /// Number of axes of the sample array (x-axes then y-axes).
    pub fn axis_count(&self) -> usize {
        2 * self.n
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.axis_count()]
    }

    /// Total sample count N^(2n).
    pub fn total_samples(&self) -> usize {
        self.points_per_axis.pow(self.axis_count() as u32)
    }

    /// Quadrature weight per node for integrals over the full box, h^(2n).
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.axis_count() as i32)
    }

    /// Quadrature weight per node for integrals over one factor, h^n.
    pub fn factor_cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Coordinate of node `idx` on any axis: -L + idx*h.
    pub fn coordinate(&self, idx: usize) -> f64 {
        -self.half_length + idx as f64 * self.spacing()
    }

    /// Angular frequency attached to DFT bin `m`: pi*k/L with the signed index
    /// k = m for m < N/2 and k = m - N otherwise.
    pub fn frequency(&self, m: usize) -> f64 {
        let n = self.points_per_axis;
        let k = if m < n / 2 { m as i64 } else { m as i64 - n as i64 };
        std::f64::consts::PI * k as f64 / self.half_length
    }

    /// Largest resolved frequency magnitude, pi*N/(2L).
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::PI * (self.points_per_axis / 2) as f64 / self.half_length
    }

    /// Per-axis table of squared frequencies indexed by DFT bin.
    pub fn frequency_sq_table(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|m| self.frequency(m).powi(2)).collect()
    }

    fn grids_match(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && self.points_per_axis == other.points_per_axis
            && self.half_length == other.half_length
    }
}

/// Constructs a grid, validating the `GridSpec` invariants.
pub fn make_grid(n: usize, points_per_axis: usize, half_length: f64) -> Result<GridSpec> {
    GridSpec::new(n, points_per_axis, half_length)
}

/// A bipartite wave function sampled on a grid. Immutable after construction;
/// every operation that changes values returns a new field.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl BipartiteField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total_samples() {
            return Err(Error::LengthMismatch { got: values.len(), want: grid.total_samples() });
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zero(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.total_samples()] }
    }

    /// Internal constructor for values produced by our own arithmetic; skips
    /// the finiteness scan.
    pub(crate) fn from_values_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.total_samples());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// L^2 norm with box quadrature weights, (h^(2n) sum |f|^2)^(1/2).
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.grid.cell_volume() * sum).sqrt()
    }

    /// L^2 inner product <f, g> = h^(2n) sum f conj(g).
    pub fn inner(&self, other: &BipartiteField) -> Result<Complex64> {
        if !self.grid.grids_match(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let sum: Complex64 =
            self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// f + c * g on a shared grid.
    pub fn add_scaled(&self, c: Complex64, other: &BipartiteField) -> Result<Self> {
        if !self.grid.grids_match(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Largest |f| over the shell of nodes within `2h` of the box boundary on
    /// any axis, relative to the overall maximum. The wrap-around guard in the
    /// decay harness watches this quantity.
    pub fn boundary_amplitude_fraction(&self) -> f64 {
        let n_pts = self.grid.points_per_axis;
        let axes = self.grid.axis_count();
        let sup = self.max_abs();
        if sup == 0.0 {
            return 0.0;
        }
        let near = |idx: usize| idx < 2 || idx + 2 >= n_pts;
        let mut boundary_max = 0.0f64;
        let mut coords = vec![0usize; axes];
        for (flat, v) in self.values.iter().enumerate() {
            unravel(flat, n_pts, &mut coords);
            if coords.iter().any(|&c| near(c)) {
                boundary_max = boundary_max.max(v.norm());
            }
        }
        boundary_max / sup
    }

    /// Writes the binary field file format:
    /// magic `BPWF1`, n (u32 LE), points_per_axis (u32 LE), half_length
    /// (f64 LE), then row-major complex samples (x-index outer, y-index
    /// inner) as interleaved little-endian doubles.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.n as u32).to_le_bytes())?;
        w.write_all(&(self.grid.points_per_axis as u32).to_le_bytes())?;
        w.write_all(&self.grid.half_length.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn write_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadFieldFile("wrong magic".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let points = u32::from_le_bytes(u32buf) as usize;
        let mut f64buf = [0u8; 8];
        r.read_exact(&mut f64buf)?;
        let half_length = f64::from_le_bytes(f64buf);
        let grid = GridSpec::new(n, points, half_length)
            .map_err(|e| Error::BadFieldFile(e.to_string()))?;
        let mut values = Vec::with_capacity(grid.total_samples());
        for _ in 0..grid.total_samples() {
            r.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            r.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            values.push(Complex64::new(re, im));
        }
        BipartiteField::new(grid, values)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

pub(crate) fn unravel(flat: usize, points: usize, coords: &mut [usize]) {
    let mut rest = flat;
    for slot in coords.iter_mut().rev() {
        *slot = rest % points;
        rest /= points;
    }
}

/// Samples a pointwise function f(x, y) at the grid nodes. `x` and `y` are
/// slices of length n.
pub fn sample<F>(grid: GridSpec, f: F) -> Result<BipartiteField>
where
    F: Fn(&[f64], &[f64]) -> Complex64,
{
    let n = grid.n();
    let points = grid.points_per_axis();
    let coords: Vec<f64> = (0..points).map(|i| grid.coordinate(i)).collect();
    let mut values = Vec::with_capacity(grid.total_samples());
    let mut idx = vec![0usize; grid.axis_count()];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for flat in 0..grid.total_samples() {
        unravel(flat, points, &mut idx);
        for a in 0..n {
            x[a] = coords[idx[a]];
            y[a] = coords[idx[n + a]];
        }
        let v = f(&x, &y);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(flat));
        }
        values.push(v);
    }
    Ok(BipartiteField::from_values_unchecked(grid, values))
}

/// Fourier coefficients of a field in the analysis convention: coefficient at
/// frequency (xi, xi') approximates the continuum transform
/// `integral f(x,y) exp(-i x.xi - i y.xi') dx dy`. Stored in DFT bin order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient at the signed frequency multi-index (k, k'), each entry in
    /// [-N/2, N/2).
    pub fn coefficient(&self, k: &[i64], k_prime: &[i64]) -> Complex64 {
        let n = self.grid.n();
        let points = self.grid.points_per_axis() as i64;
        assert_eq!(k.len(), n);
        assert_eq!(k_prime.len(), n);
        let mut flat = 0usize;
        for idx in k.iter().chain(k_prime.iter()) {
            debug_assert!(*idx >= -points / 2 && *idx < points / 2);
            let m = idx.rem_euclid(points) as usize;
            flat = flat * points as usize + m;
        }
        self.coefficients[flat]
    }

    /// L^2 norm under the Plancherel weight (2L)^(-2n) per coefficient;
    /// equals the spatial L^2 norm exactly.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coefficients.iter().map(|c| c.norm_sqr()).sum();
        let w = (2.0 * self.grid.half_length()).powi(-(self.grid.axis_count() as i32));
        (sum * w).sqrt()
    }
}

/// Forward transform into the analysis convention. The DFT output is scaled
/// by h^(2n) and carries the phase (-1)^(sum of bins) that accounts for the
/// box starting at -L rather than 0.
pub fn to_spectral(field: &BipartiteField) -> SpectralField {
    let grid = *field.grid();
    let mut coefficients = field.values().to_vec();
    fft::fft_nd(&mut coefficients, &grid.shape(), false);
    let scale = grid.cell_volume();
    apply_center_phase(&mut coefficients, &grid, scale);
    SpectralField { grid, coefficients }
}

/// Inverse of [`to_spectral`]; exact round-trip up to rounding.
pub fn from_spectral(spectral: &SpectralField) -> BipartiteField {
    let grid = spectral.grid;
    let mut values = spectral.coefficients.clone();
    let scale = (2.0 * grid.half_length()).powi(-(grid.axis_count() as i32));
    apply_center_phase(&mut values, &grid, scale);
    fft::fft_nd(&mut values, &grid.shape(), true);
    BipartiteField::from_values_unchecked(grid, values)
}

fn apply_center_phase(values: &mut [Complex64], grid: &GridSpec, scale: f64) {
    let points = grid.points_per_axis();
    let axes = grid.axis_count();
    let mut coords = vec![0usize; axes];
    for (flat, v) in values.iter_mut().enumerate() {
        unravel(flat, points, &mut coords);
        let parity = coords.iter().sum::<usize>() % 2;
        let sign = if parity == 0 { scale } else { -scale };
        *v *= sign;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn make_grid_examples() {
        let g = make_grid(1, 64, 16.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.total_samples(), 4096);

        let g = make_grid(2, 32, 8.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.total_samples(), 1 << 20);

        assert!(matches!(make_grid(3, 64, 16.0), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(make_grid(1, 48, 16.0), Err(Error::BadPointCount(48))));
        assert!(matches!(make_grid(1, 2, 16.0), Err(Error::BadPointCount(2))));
        assert!(matches!(make_grid(1, 64, 0.0), Err(Error::BadHalfLength(_))));
        assert!(matches!(make_grid(1, 64, -3.0), Err(Error::BadHalfLength(_))));
    }

    #[test]
    fn sample_constant_and_gaussian() {
        let g = make_grid(1, 16, 8.0).unwrap();
        let ones = sample(g, |_, _| c(1.0, 0.0)).unwrap();
        assert!(ones.values().iter().all(|v| *v == c(1.0, 0.0)));

        let gauss = sample(g, |x, y| {
            c((-0.5 * (x[0] * x[0] + y[0] * y[0])).exp(), 0.0)
        })
        .unwrap();
        // origin node is at index N/2 on each axis
        let origin = (8 * 16 + 8) as usize;
        assert!((gauss.values()[origin] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sample_odd_function_sums_to_zero() {
        let g = make_grid(1, 64, 16.0).unwrap();
        let f = sample(g, |x, y| c(x[0] * (-x[0] * x[0] - y[0] * y[0]).exp(), 0.0)).unwrap();
        let total: C64 = f.values().iter().sum();
        let abs_total: f64 = f.values().iter().map(|v| v.norm()).sum();
        assert!(total.norm() <= 1e-12 * abs_total);
    }

    #[test]
    fn sample_rejects_non_finite() {
        let g = make_grid(1, 8, 4.0).unwrap();
        let r = sample(g, |x, _| c(1.0 / x[0], 0.0)); // infinite at x=0 node
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let g = make_grid(1, 16, 8.0).unwrap();
        let mut values = vec![C64::default(); g.total_samples()];
        let origin = 8 * 16 + 8;
        values[origin] = c(1.0, 0.0);
        let f = BipartiteField::new(g, values).unwrap();
        let s = to_spectral(&f);
        let expected = g.cell_volume();
        for coeff in s.coefficients() {
            assert!((coeff - c(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn plane_wave_has_single_coefficient() {
        let g = make_grid(1, 32, 8.0).unwrap();
        let k0 = 3i64;
        let xi0 = std::f64::consts::PI * k0 as f64 / g.half_length();
        let f = sample(g, |x, _| C64::cis(xi0 * x[0])).unwrap();
        let s = to_spectral(&f);
        let peak = s.coefficient(&[k0], &[0]);
        assert!((peak.norm() - (2.0 * g.half_length()).powi(2)).abs() < 1e-9);
        let points = g.points_per_axis() as i64;
        for mx in 0..points {
            for my in 0..points {
                let kx = if mx < points / 2 { mx } else { mx - points };
                let ky = if my < points / 2 { my } else { my - points };
                if (kx, ky) != (k0, 0) {
                    assert!(s.coefficient(&[kx], &[ky]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn round_trip_identity() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let f = sample(g, |x, y| {
            c((x[0] * 0.3).sin() * (y[0] * 0.7).cos(), (x[0] - y[0]).cos())
        })
        .unwrap();
        let back = from_spectral(&to_spectral(&f));
        let num: f64 = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(num <= 1e-12 * den);
    }

    #[test]
    fn plancherel_and_linearity_n2() {
        let g = make_grid(2, 8, 4.0).unwrap();
        let f = sample(g, |x, y| {
            c(
                (-0.4 * (x[0] * x[0] + x[1] * x[1] + y[0] * y[0] + y[1] * y[1])).exp(),
                (x[0] * y[1] * 0.2).sin(),
            )
        })
        .unwrap();
        let s = to_spectral(&f);
        assert!((s.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());

        let h = sample(g, |x, y| c((x[1] + y[0]).cos(), 0.3)).unwrap();
        let combo = f.add_scaled(c(2.0, -1.0), &h).unwrap();
        let lhs = to_spectral(&combo);
        let sf = to_spectral(&f);
        let sh = to_spectral(&h);
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..lhs.coefficients().len() {
            let rhs = sf.coefficients()[i] + c(2.0, -1.0) * sh.coefficients()[i];
            err += (lhs.coefficients()[i] - rhs).norm_sqr();
            scale += rhs.norm_sqr();
        }
        assert!(err.sqrt() <= 1e-12 * scale.sqrt());
    }

    #[test]
    fn separable_sampling_is_outer_product() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let gf = |t: f64| (-0.3 * t * t).exp();
        let hf = |t: f64| (0.5 * t).cos();
        let f = sample(g, |x, y| c(gf(x[0]) * hf(y[0]), 0.0)).unwrap();
        let n = g.points_per_axis();
        let gs: Vec<f64> = (0..n).map(|i| gf(g.coordinate(i))).collect();
        let hs: Vec<f64> = (0..n).map(|i| hf(g.coordinate(i))).collect();
        for i in 0..n {
            for j in 0..n {
                assert!((f.values()[i * n + j].re - gs[i] * hs[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn field_file_round_trip() {
        let g = make_grid(1, 16, 8.0).unwrap();
        let f = sample(g, |x, y| c((x[0] * 0.2).sin(), (y[0] * 0.1).cos())).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..5], b"BPWF1");
        let back = BipartiteField::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn field_file_rejects_garbage() {
        let r = BipartiteField::read_from(&b"NOTBW"[..]);
        assert!(matches!(r, Err(Error::BadFieldFile(_))));
    }

    /// Freezes the wire format byte for byte: header layout, little-endian
    /// encodings, row-major x-outer ordering and re/im interleaving.
    #[test]
    fn field_file_golden_bytes() {
        let g = make_grid(1, 4, 8.0).unwrap();
        // values v(i, j) = (i + 10 j) + i*(−j) make the ordering visible
        let values: Vec<C64> = (0..16)
            .map(|flat| {
                let (i, j) = (flat / 4, flat % 4);
                c(i as f64 + 10.0 * j as f64, -(j as f64))
            })
            .collect();
        let f = BipartiteField::new(g, values.clone()).unwrap();
        let mut got = Vec::new();
        f.write_to(&mut got).unwrap();

        let mut expected = Vec::new();
        expected.extend_from_slice(b"BPWF1");
        expected.extend_from_slice(&1u32.to_le_bytes());
        expected.extend_from_slice(&4u32.to_le_bytes());
        expected.extend_from_slice(&8.0f64.to_le_bytes());
        for v in &values {
            expected.extend_from_slice(&v.re.to_le_bytes());
            expected.extend_from_slice(&v.im.to_le_bytes());
        }
        assert_eq!(got, expected);
        assert_eq!(got.len(), 5 + 4 + 4 + 8 + 16 * 16);
    }
}
