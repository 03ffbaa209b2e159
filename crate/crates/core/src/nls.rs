//! Local-in-time solver for i u_t + (Dx - Dy) u = +/- |u|^alpha u by Picard
//! iteration on the Duhamel formula, with an independent split-step spectral
//! integrator and contraction/conservation diagnostics.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{require_admissible, res_constraints, ExponentTriple};
use crate::fft;
use crate::lattice::{BipartiteField, GridSpec};
use crate::norms::{mixed_norm, mixed_sobolev_norm, Exponent, MixedNormSpec, Trajectory};
use crate::profiles;
use crate::propagator::{propagate, PropagationTime};
use crate::verify::strichartz_ratio;

/// Sign of the nonlinear term. `Off` disables the nonlinearity entirely and
/// exists for the linear cross-checks the diagnostics rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Defocusing,
    Focusing,
    Off,
}

impl Sign {
    pub fn factor(&self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
            Sign::Off => 0.0,
        }
    }
}

/// The initial-value problem for the nonlinear bipartite equation.
#[derive(Debug, Clone)]
pub struct NlsProblem {
    pub initial: BipartiteField,
    pub alpha: f64,
    pub sign: Sign,
    pub horizon: f64,
}

impl NlsProblem {
    pub fn new(initial: BipartiteField, alpha: f64, sign: Sign, horizon: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::BadAlpha(alpha));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::BadHorizon(horizon));
        }
        Ok(Self { initial, alpha, sign, horizon })
    }

    pub fn grid(&self) -> &GridSpec {
        self.initial.grid()
    }

    fn with_horizon(&self, horizon: f64) -> Self {
        Self { horizon, ..self.clone() }
    }
}

/// F(u) = sign * |u|^alpha u, with 0^alpha := 0.
fn nonlinear_term(values: &[Complex64], alpha: f64, sign: Sign) -> Vec<Complex64> {
    let s = sign.factor();
    if s == 0.0 {
        return vec![Complex64::default(); values.len()];
    }
    if alpha == 2.0 {
        values.iter().map(|v| s * v.norm_sqr() * v).collect()
    } else {
        values.iter().map(|v| s * v.norm().powf(alpha) * v).collect()
    }
}

/// Per-iteration entry of the Picard distance ledger.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PicardState {
    pub iteration: usize,
    /// d(u_k, u_{k-1}) in the solver metric.
    pub distance: f64,
    /// distance divided by the previous distance, from the second entry on.
    pub ratio: Option<f64>,
}

/// The solver metric d(u, v) = sup_t ||u - v||_2 + ||u - v||_{L^q_t L^{r1}_x L^{r2}_y}
/// over the shared uniform time grid.
pub fn picard_distance(u: &Trajectory, v: &Trajectory, triple: &ExponentTriple) -> Result<f64> {
    if u.len() != v.len() || u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let spec = MixedNormSpec::new(triple.r1(), triple.r2());
    let mut sup_l2: f64 = 0.0;
    let mut mixed = Vec::with_capacity(u.len());
    for (a, b) in u.fields().iter().zip(v.fields()) {
        let diff = a.add_scaled(Complex64::new(-1.0, 0.0), b)?;
        sup_l2 = sup_l2.max(diff.l2_norm());
        mixed.push(mixed_norm(&diff, &spec));
    }
    let dt = u.dt();
    let st = match triple.q() {
        Exponent::Infinity => mixed.iter().cloned().fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let sum: f64 = mixed[..mixed.len().saturating_sub(1)]
                .iter()
                .map(|m| m.powf(q))
                .sum();
            (dt * sum).powf(1.0 / q)
        }
    };
    Ok(sup_l2 + st)
}

/// One application of the Duhamel map
/// Phi(u)(t) = e^{it(Dx-Dy)} f - i int_0^t e^{i(t-s)(Dx-Dy)} F(u(s)) ds,
/// with trapezoidal quadrature in s and the propagator applied exactly per
/// node. The time integral is accumulated as a prefix sum of back-propagated
/// forcing terms in Fourier space, so the whole map costs O(steps)
/// transforms.
pub fn duhamel_map(
    problem: &NlsProblem,
    u: &Trajectory,
    triple: &ExponentTriple,
) -> Result<Trajectory> {
    let grid = *problem.grid();
    if u.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    require_admissible(grid.n() as u32, triple)?;
    let times = u.times();
    let t_end = *times.last().unwrap();
    if times[0].abs() > 1e-9 * problem.horizon
        || (t_end - problem.horizon).abs() > 1e-9 * problem.horizon
    {
        return Err(Error::TimeRangeMismatch(0.0, problem.horizon));
    }
    let shape = grid.shape();
    let total = grid.total_samples();
    let inv_total = 1.0 / total as f64;
    let freq_sq = grid.frequency_sq_table();
    let omega = multiplier_table(&grid, &freq_sq);

    let mut initial_hat = problem.initial.values().to_vec();
    fft::fft_nd(&mut initial_hat, &shape, false);

    // running trapezoid prefix sum of e^{+is(Dx-Dy)}-back-propagated forcing
    let mut prefix = vec![Complex64::default(); total];
    let mut prev_back: Option<Vec<Complex64>> = None;
    let dt = u.dt();
    let mut out_fields = Vec::with_capacity(u.len());
    for (k, field) in u.fields().iter().enumerate() {
        let t = times[k];
        let mut forcing = nonlinear_term(field.values(), problem.alpha, problem.sign);
        fft::fft_nd(&mut forcing, &shape, false);
        for (v, &w) in forcing.iter_mut().zip(&omega) {
            *v *= Complex64::cis(t * w);
        }
        if let Some(prev) = prev_back.take() {
            for ((acc, a), b) in prefix.iter_mut().zip(prev).zip(&forcing) {
                *acc += 0.5 * dt * (a + b);
            }
        }
        // Phi(u)(t) = e^{it(Dx-Dy)} (f_hat - i * prefix)
        let mut out = vec![Complex64::default(); total];
        for i in 0..total {
            let coeff = initial_hat[i] - Complex64::i() * prefix[i];
            out[i] = coeff * Complex64::cis(-t * omega[i]) * inv_total;
        }
        fft::fft_nd(&mut out, &shape, true);
        out_fields.push(BipartiteField::new(grid, out).map_err(|_| Error::Overflow {
            last_valid_time: t,
        })?);
        prev_back = Some(forcing);
    }
    Trajectory::new(times.to_vec(), out_fields)
}

fn multiplier_table(grid: &GridSpec, freq_sq: &[f64]) -> Vec<f64> {
    let n_pts = grid.points_per_axis();
    let mut omega = vec![0.0f64; grid.total_samples()];
    match grid.n() {
        1 => {
            for mx in 0..n_pts {
                for my in 0..n_pts {
                    omega[mx * n_pts + my] = freq_sq[mx] - freq_sq[my];
                }
            }
        }
        2 => {
            let mut flat = 0usize;
            for mx0 in 0..n_pts {
                for mx1 in 0..n_pts {
                    let xs = freq_sq[mx0] + freq_sq[mx1];
                    for my0 in 0..n_pts {
                        let part = xs - freq_sq[my0];
                        for f1 in freq_sq.iter().take(n_pts) {
                            omega[flat] = part - f1;
                            flat += 1;
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    omega
}

/// Picard iteration u_{k+1} = Phi(u_k) starting from the free evolution.
/// Stops when the metric distance drops below `tol`; reports non-contraction
/// when the distances grow for three consecutive iterations.
pub fn picard_solve(
    problem: &NlsProblem,
    triple: &ExponentTriple,
    steps: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Trajectory, Vec<PicardState>)> {
    let grid = *problem.grid();
    require_admissible(grid.n() as u32, triple)?;
    if steps == 0 {
        return Err(Error::BadStepCount);
    }
    let n = grid.n() as f64;
    if 2.0 + problem.alpha - n * problem.alpha <= 0.0 {
        return Err(Error::OutOfRegime);
    }
    let dt = problem.horizon / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let fields = times
        .iter()
        .map(|&t| Ok(propagate(&problem.initial, PropagationTime::new(t)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut current = Trajectory::new(times, fields)?;

    let mut ledger: Vec<PicardState> = Vec::new();
    let mut growth_streak = 0usize;
    for iteration in 1..=max_iter {
        let next = duhamel_map(problem, &current, triple)?;
        let distance = picard_distance(&next, &current, triple)?;
        if !distance.is_finite() {
            return Err(Error::Overflow { last_valid_time: problem.horizon });
        }
        let ratio = ledger.last().map(|prev| distance / prev.distance);
        ledger.push(PicardState { iteration, distance, ratio });
        current = next;
        if distance < tol {
            return Ok((current, ledger));
        }
        if let Some(r) = ratio {
            if r > 1.0 {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Err(Error::NonContraction { factor: r });
                }
            } else {
                growth_streak = 0;
            }
        }
    }
    Err(Error::MaxIterExceeded(max_iter))
}

/// Strang splitting: half-step nonlinear phase, full spectral linear step,
/// half-step nonlinear phase; second order in the time step. Both sub-steps
/// preserve |u| pointwise or the L^2 norm exactly, so mass is conserved to
/// rounding.
pub fn split_step_solve(problem: &NlsProblem, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::BadStepCount);
    }
    let dt = problem.horizon / steps as f64;
    let half = PropagationTime::new(dt)?;
    let s = problem.sign.factor();
    let alpha = problem.alpha;
    let phase = |field: &BipartiteField, tau: f64| -> BipartiteField {
        if s == 0.0 {
            return field.clone();
        }
        field.map(|v| {
            let amp = if alpha == 2.0 { v.norm_sqr() } else { v.norm().powf(alpha) };
            v * Complex64::cis(-s * tau * amp)
        })
    };
    let mut u = problem.initial.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut fields = Vec::with_capacity(steps + 1);
    times.push(0.0);
    fields.push(u.clone());
    for k in 1..=steps {
        u = phase(&u, 0.5 * dt);
        u = propagate(&u, half);
        u = phase(&u, 0.5 * dt);
        if !u.is_finite() || u.max_abs() > 1e12 {
            return Err(Error::Overflow { last_valid_time: (k - 1) as f64 * dt });
        }
        times.push(k as f64 * dt);
        fields.push(u.clone());
    }
    Trajectory::new(times, fields)
}

/// Everything the horizon-proposal run measures.
#[derive(Debug, Clone, Serialize)]
pub struct WellposednessReport {
    /// Largest space-time quotient observed over the calibration family.
    pub calibrated_c: f64,
    /// Data norm used for the ball radius (L^2 for n = 1, L^2_x H^1_y
    /// otherwise).
    pub data_norm: f64,
    /// sup-in-time L^2_x H^1_y norm of the initial data.
    pub data_l2h1: f64,
    /// Ball radius A = 2 C ||f||.
    pub ball_radius: f64,
    /// (2 + alpha - n alpha) / 2.
    pub gap_exponent: f64,
    /// Horizon solving C T^gap A^alpha = 1/2.
    pub proposed_horizon: f64,
    /// Exact verdicts of the exponent-range constraints for (n, alpha, triple).
    pub res_clauses: Vec<(String, bool)>,
    pub contraction_ledger: Vec<PicardState>,
    /// Largest consecutive-distance ratio in the ledger.
    pub measured_contraction: Option<f64>,
    /// d(Phi(u*), u*) at the converged trajectory.
    pub final_residual: f64,
    /// sup-in-time L^2_x H^1_y norm of the solution.
    pub sup_l2h1: f64,
    pub steps: usize,
}

/// Number of time intervals the report uses for its Picard run.
pub const REPORT_STEPS: usize = 256;

/// Calibrates the constant from measured space-time quotients, proposes a
/// horizon from the ball condition with A = 2C||f||, runs the Picard solver
/// over it, and reports the contraction diagnostics.
pub fn wellposedness_report(
    problem: &NlsProblem,
    triple: &ExponentTriple,
) -> Result<WellposednessReport> {
    let grid = *problem.grid();
    let n = grid.n() as f64;
    require_admissible(grid.n() as u32, triple)?;
    let gap = 0.5 * (2.0 + problem.alpha - n * problem.alpha);
    if gap <= 0.0 {
        return Err(Error::OutOfRegime);
    }

    // calibration family: Gaussians of a few widths, quotients over a unit
    // window
    let mut c = 0.0f64;
    for width in [0.5, 1.0, 2.0] {
        let probe = profiles::gaussian(grid, width)?;
        c = c.max(strichartz_ratio(&probe, triple, 1.0, 64)?);
    }

    let sobolev_spec =
        MixedNormSpec::new(Exponent::new(2.0).unwrap(), Exponent::new(2.0).unwrap());
    let data_l2h1 = mixed_sobolev_norm(&problem.initial, &sobolev_spec, 1)?;
    let data_norm = if grid.n() == 1 { problem.initial.l2_norm() } else { data_l2h1 };
    if data_norm == 0.0 {
        return Err(Error::ZeroField);
    }
    let ball_radius = 2.0 * c * data_norm;
    let proposed_horizon = (0.5 / (c * ball_radius.powf(problem.alpha))).powf(1.0 / gap);

    let res = res_constraints(
        grid.n() as u32,
        float_to_rat(problem.alpha),
        triple,
    );
    let res_clauses: Vec<(String, bool)> =
        res.clauses.iter().map(|c| (c.name.to_string(), c.holds)).collect();

    let run_problem = problem.with_horizon(proposed_horizon);
    let tol = 1e-10 * ball_radius.max(1e-30);
    let (solution, ledger) =
        picard_solve(&run_problem, triple, REPORT_STEPS, 40, tol)?;
    let measured_contraction = ledger
        .iter()
        .filter_map(|s| s.ratio)
        .fold(None::<f64>, |acc, r| Some(acc.map_or(r, |a| a.max(r))));
    let refined = duhamel_map(&run_problem, &solution, triple)?;
    let final_residual = picard_distance(&refined, &solution, triple)?;
    let sup_l2h1 = solution
        .fields()
        .iter()
        .map(|f| mixed_sobolev_norm(f, &sobolev_spec, 1))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(WellposednessReport {
        calibrated_c: c,
        data_norm,
        data_l2h1,
        ball_radius,
        gap_exponent: gap,
        proposed_horizon,
        res_clauses,
        contraction_ledger: ledger,
        measured_contraction,
        final_residual,
        sup_l2h1,
        steps: REPORT_STEPS,
    })
}

/// Small-denominator rational approximation for reporting the (res) verdicts
/// of a float alpha; exact for the simple fractions used in configs.
fn float_to_rat(x: f64) -> crate::exponents::Rat {
    for den in 1..=64i64 {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() < 1e-12 && num.abs() < 1e15 {
            return crate::exponents::Rat::new(num as i64, den);
        }
    }
    crate::exponents::Rat::new((x * 720.0).round() as i64, 720)
}
