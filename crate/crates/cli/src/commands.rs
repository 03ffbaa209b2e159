//! The six experiment subcommands. Each one parses its typed config, runs
//! the underlying operations, writes deterministic data files into the
//! output directory and records them in the manifest.

use std::fmt::Write as _;
use std::time::Instant;
use std::path::Path;

use num_complex::Complex64;

use biwave_core::exponents::{beta, is_admissible, rat, region_scan_with};
use biwave_core::nls::{split_step_solve, wellposedness_report, NlsProblem};
use biwave_core::norms::{mixed_norm, mixed_sobolev_norm, Exponent, MixedNormSpec};
use biwave_core::propagator::{propagate, propagate_kernel, rescale, PropagationTime};
use biwave_core::verify::{
    bilinear_quotient_scan, decay_fit, free_trajectory, scale_slope, strichartz_growth_table,
    strichartz_ratio, whitney_decompose,
};

use crate::config::{self, load};
use crate::manifest::RunManifest;
use crate::svg::{Plot, Series};
use crate::{CliError, CommandKind, RunArgs};

pub fn dispatch(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    match args.command {
        CommandKind::Propagate => cmd_propagate(args, manifest),
        CommandKind::Decay => cmd_decay(args, manifest),
        CommandKind::Region => cmd_region(args, manifest),
        CommandKind::Whitney => cmd_whitney(args, manifest),
        CommandKind::Strichartz => cmd_strichartz(args, manifest),
        CommandKind::Solve => cmd_solve(args, manifest),
    }
}

fn parse<T: serde::de::DeserializeOwned>(args: &RunArgs) -> Result<T, CliError> {
    load(&args.config)
}

fn write_text(dir: &Path, name: &str, text: &str, manifest: &mut RunManifest) -> Result<(), CliError> {
    std::fs::write(dir.join(name), text)
        .map_err(|e| CliError::internal(format!("writing {name}: {e}")))?;
    manifest
        .record_output(dir, name)
        .map_err(|e| CliError::internal(format!("hashing {name}: {e}")))
}

fn write_json<T: serde::Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::internal(format!("serializing {name}: {e}")))?;
    write_text(dir, name, &(text + "\n"), manifest)
}

fn cmd_propagate(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::PropagateConfig = parse(args)?;
    let grid = config::grid_of(cfg.n, cfg.points_per_axis, cfg.half_length)?;
    manifest.set_grid(&grid);
    let t_setup = Instant::now();
    let field = cfg.initial.realize(grid, args.seed)?;
    manifest.timing("setup", t_setup);
    let norm0 = field.l2_norm();

    let mut csv = String::from(if cfg.kernel_oracle {
        "t,l2_norm,norm_drift,oracle_rel_linf\n"
    } else {
        "t,l2_norm,norm_drift\n"
    });
    let t_compute = Instant::now();
    {
        for (k, &t) in cfg.times.iter().enumerate() {
            let time = PropagationTime::new(t).map_err(CliError::from_core)?;
            let evolved = propagate(&field, time);
            let name = format!("field_{k:03}.bpwf");
            evolved
                .write_to_path(args.out.join(&name))
                .map_err(CliError::from_core)?;
            manifest
                .record_output(&args.out, &name)
                .map_err(|e| CliError::internal(e.to_string()))?;
            let drift = (evolved.l2_norm() - norm0).abs() / norm0;
            if cfg.kernel_oracle {
                let agreement = if t == 0.0 {
                    0.0
                } else {
                    let oracle = propagate_kernel(&field, time).map_err(CliError::from_core)?;
                    let diff = oracle
                        .values()
                        .iter()
                        .zip(evolved.values())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    diff / evolved.max_abs()
                };
                let _ = writeln!(csv, "{t:.5e},{:.5e},{drift:.5e},{agreement:.5e}", evolved.l2_norm());
            } else {
                let _ = writeln!(csv, "{t:.5e},{:.5e},{drift:.5e}", evolved.l2_norm());
            }
        }
    }
    manifest.timing("compute", t_compute);
    write_text(&args.out, "propagate_norms.csv", &csv, manifest)
}

fn cmd_decay(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::DecayConfig = parse(args)?;
    let grid = config::grid_of(cfg.n, cfg.points_per_axis, cfg.half_length)?;
    manifest.set_grid(&grid);
    let spec = MixedNormSpec::new(config::parse_exponent(&cfg.r1)?, config::parse_exponent(&cfg.r2)?);
    let field = cfg.initial.realize(grid, args.seed)?;
    let t_compute = Instant::now();
    let report = decay_fit(&field, &spec, (cfg.window[0], cfg.window[1]), cfg.samples)
        .map_err(CliError::from_core)?;
    manifest.timing("compute", t_compute);

    let mut csv = String::from("t,norm,r1,r2\n");
    for (t, norm) in &report.curve {
        let _ = writeln!(csv, "{t:.5e},{norm:.5e},{},{}", spec.r1, spec.r2);
    }
    write_text(&args.out, "decay_curve.csv", &csv, manifest)?;
    write_json(&args.out, "decay_report.json", &report, manifest)?;

    let fit_line: Vec<(f64, f64)> = report
        .curve
        .iter()
        .map(|&(t, _)| {
            let log_norm = report.curve[0].1.ln()
                + report.exponent_fitted * (t.ln() - report.curve[0].0.ln());
            (t, log_norm.exp())
        })
        .collect();
    let plot = Plot {
        title: format!(
            "decay fit: slope {:.4} (target {:.4})",
            report.exponent_fitted, report.exponent_target
        ),
        x_label: "t".into(),
        y_label: "mixed norm".into(),
        log_x: true,
        log_y: true,
        scatter: false,
        series: vec![
            Series { label: "measured".into(), points: report.curve.clone(), color: "steelblue" },
            Series { label: "fit".into(), points: fit_line, color: "firebrick" },
        ],
    };
    write_text(&args.out, "decay_loglog.svg", &plot.render(), manifest)
}

fn cmd_region(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::RegionConfig = parse(args)?;
    if cfg.denominator_bound < 2 {
        return Err(CliError::config("denominator_bound must be at least 2"));
    }
    let mut csv = String::from("inv_r1,inv_r2,inv_q,admissible\n");
    let mut admissible_pts = Vec::new();
    let mut rejected_pts = Vec::new();
    let t_compute = Instant::now();
    {
        region_scan_with(cfg.n, cfg.denominator_bound, |p| {
            let t = &p.triple;
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                t.inv_r1(),
                t.inv_r2(),
                t.inv_q(),
                u8::from(p.admissible)
            );
            let xy = (rat_to_f64(t.inv_r1()), rat_to_f64(t.inv_r2()));
            if p.admissible {
                admissible_pts.push(xy);
            } else {
                rejected_pts.push(xy);
            }
        });
    }
    manifest.timing("compute", t_compute);
    write_text(&args.out, "region.csv", &csv, manifest)?;
    let plot = Plot {
        title: format!("admissible (1/r1, 1/r2) for n = {}", cfg.n),
        x_label: "1/r1".into(),
        y_label: "1/r2".into(),
        log_x: false,
        log_y: false,
        scatter: true,
        series: vec![
            Series { label: "admissible".into(), points: admissible_pts, color: "seagreen" },
            Series { label: "not admissible".into(), points: rejected_pts, color: "lightgray" },
        ],
    };
    write_text(&args.out, "region.svg", &plot.render(), manifest)
}

fn rat_to_f64(r: biwave_core::exponents::Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(serde::Serialize)]
struct WhitneyReport {
    squares: usize,
    per_scale_squares: Vec<(i32, usize)>,
    dist_ratio_range: (f64, f64),
    area_covered: f64,
    retarded_area: f64,
    area_gap_bound: f64,
    quotients: Vec<biwave_core::verify::ScaleQuotient>,
    slope: f64,
    beta_target: f64,
}

fn cmd_whitney(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::WhitneyConfig = parse(args)?;
    let grid = config::grid_of(cfg.n, cfg.points_per_axis, cfg.half_length)?;
    manifest.set_grid(&grid);
    let field = cfg.initial.realize(grid, args.seed)?;

    let squares = whitney_decompose((cfg.window[0], cfg.window[1]), (cfg.j_min, cfg.j_max))
        .map_err(CliError::from_core)?;
    let mut squares_csv = String::from("j,i_lo,i_hi,j_lo,j_hi,dist\n");
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = f64::NEG_INFINITY;
    let mut per_scale: std::collections::BTreeMap<i32, usize> = Default::default();
    for sq in &squares {
        let (i_lo, i_hi) = sq.i_interval();
        let (j_lo, j_hi) = sq.j_interval();
        let _ = writeln!(
            squares_csv,
            "{},{i_lo:.5e},{i_hi:.5e},{j_lo:.5e},{j_hi:.5e},{:.5e}",
            sq.scale(),
            sq.dist()
        );
        let ratio = sq.dist() / sq.side();
        ratio_lo = ratio_lo.min(ratio);
        ratio_hi = ratio_hi.max(ratio);
        *per_scale.entry(sq.scale()).or_insert(0) += 1;
    }
    write_text(&args.out, "whitney_squares.csv", &squares_csv, manifest)?;

    // case (a) of the dyadic decay estimate: a = a~ = infinity, with r2
    // fixed to infinity as well (the only choice compatible with the scale
    // hypothesis at n = 1); the dual norms are then L^1 in both factors.
    let dual = MixedNormSpec::new(Exponent::new(1.0).unwrap(), Exponent::new(1.0).unwrap());
    let t_compute = Instant::now();
    let quotients =
        bilinear_quotient_scan(&field, &field, &squares, cfg.nodes_per_interval, &dual)
            .map_err(CliError::from_core)?;
    manifest.timing("compute", t_compute);
    let slope = scale_slope(&quotients);
    let beta_target =
        rat_to_f64(beta(grid.n() as u32, rat(0, 1), rat(0, 1), rat(0, 1)));

    let mut q_csv = String::from("j,mean_quotient,squares\n");
    for q in &quotients {
        let _ = writeln!(q_csv, "{},{:.5e},{}", q.j, q.mean_quotient, q.squares);
    }
    write_text(&args.out, "whitney_quotients.csv", &q_csv, manifest)?;

    let window_span = cfg.window[1] - cfg.window[0];
    let report = WhitneyReport {
        squares: squares.len(),
        per_scale_squares: per_scale.into_iter().collect(),
        dist_ratio_range: (ratio_lo, ratio_hi),
        area_covered: squares.iter().map(|s| s.area()).sum(),
        retarded_area: window_span * window_span / 2.0,
        area_gap_bound: 2.0 * (cfg.j_min as f64).exp2() * window_span,
        quotients: quotients.clone(),
        slope,
        beta_target,
    };
    write_json(&args.out, "whitney_report.json", &report, manifest)?;

    let points: Vec<(f64, f64)> = quotients
        .iter()
        .map(|q| ((q.j as f64).exp2(), q.mean_quotient))
        .collect();
    let plot = Plot {
        title: format!("bilinear quotient vs scale: slope {slope:.3} (target {:.3})", -beta_target),
        x_label: "2^j".into(),
        y_label: "quotient".into(),
        log_x: true,
        log_y: true,
        scatter: false,
        series: vec![Series { label: "per-scale mean".into(), points, color: "steelblue" }],
    };
    write_text(&args.out, "whitney_decay.svg", &plot.render(), manifest)
}

#[derive(serde::Serialize)]
struct StrichartzReport {
    ratios: Vec<(f64, f64, f64)>, // (lambda, horizon, ratio)
    spread: Option<f64>,
    admissible: bool,
    growth_table: Vec<(f64, f64)>, // (horizon, ratio)
}

fn cmd_strichartz(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::StrichartzConfig = parse(args)?;
    let grid = config::grid_of(cfg.n, cfg.points_per_axis, cfg.half_length)?;
    manifest.set_grid(&grid);
    let triple = config::parse_triple(&cfg.triple)?;
    let field = cfg.initial.realize(grid, args.seed)?;
    if cfg.lambdas.is_empty() {
        return Err(CliError::config("lambdas must not be empty"));
    }

    let admissible = is_admissible(grid.n() as u32, &triple).is_admissible();
    let mut rows = Vec::new();
    let mut spread = None;
    let t_compute = Instant::now();
    if admissible {
        for &lam in &cfg.lambdas {
            let probe = rescale(&field, lam).map_err(CliError::from_core)?;
            let horizon = cfg.horizon / (lam * lam);
            let ratio = strichartz_ratio(&probe, &triple, horizon, cfg.steps)
                .map_err(CliError::from_core)?;
            rows.push((lam, horizon, ratio));
        }
        let max = rows.iter().map(|r| r.2).fold(f64::MIN, f64::max);
        let min = rows.iter().map(|r| r.2).fold(f64::MAX, f64::min);
        spread = Some((max - min) / min);
    }
    let growth_table = if cfg.growth_horizons.is_empty() {
        Vec::new()
    } else {
        strichartz_growth_table(&field, &triple, &cfg.growth_horizons, cfg.steps)
            .map_err(CliError::from_core)?
    };
    manifest.timing("compute", t_compute);

    let mut csv = String::from("lambda,horizon,ratio\n");
    for (lam, horizon, ratio) in &rows {
        let _ = writeln!(csv, "{lam:.5e},{horizon:.5e},{ratio:.5e}");
    }
    write_text(&args.out, "strichartz_ratios.csv", &csv, manifest)?;
    if !growth_table.is_empty() {
        let mut csv = String::from("horizon,ratio\n");
        for (horizon, ratio) in &growth_table {
            let _ = writeln!(csv, "{horizon:.5e},{ratio:.5e}");
        }
        write_text(&args.out, "growth_table.csv", &csv, manifest)?;
    }

    // per-time mixed norms of the unscaled trajectory
    let spec = MixedNormSpec::new(triple.r1(), triple.r2());
    let traj = free_trajectory(&field, 0.0, cfg.horizon / cfg.steps as f64, cfg.steps)
        .map_err(CliError::from_core)?;
    write_text(
        &args.out,
        "mixed_norms.csv",
        &biwave_core::norms::mixed_norm_series_csv(&traj, &spec),
        manifest,
    )?;
    let report = StrichartzReport { ratios: rows, spread, admissible, growth_table };
    write_json(&args.out, "strichartz_report.json", &report, manifest)
}

#[derive(serde::Serialize)]
struct SolveReport {
    wellposedness: biwave_core::nls::WellposednessReport,
    split_step_agreement_sup_l2: f64,
    split_step_mass_drift: f64,
    saved_snapshots: usize,
    times: Vec<f64>,
    l2_norms: Vec<f64>,
}

fn cmd_solve(args: &RunArgs, manifest: &mut RunManifest) -> Result<(), CliError> {
    let cfg: config::SolveConfig = parse(args)?;
    let grid = config::grid_of(cfg.n, cfg.points_per_axis, cfg.half_length)?;
    manifest.set_grid(&grid);
    let triple = config::parse_triple(&cfg.triple)?;
    let sign = config::parse_sign(cfg.sign)?;
    if cfg.save_every == 0 {
        return Err(CliError::config("save_every must be at least 1"));
    }
    let initial = cfg.initial.realize(grid, args.seed)?;
    let problem = NlsProblem::new(initial, cfg.alpha, sign, cfg.horizon)
        .map_err(CliError::from_core)?;

    let t_picard = Instant::now();
    let report = wellposedness_report(&problem, &triple).map_err(CliError::from_core)?;
    manifest.timing("picard", t_picard);

    // independent split-step run over the proposed horizon for cross-checks
    let run_problem =
        NlsProblem::new(problem.initial.clone(), cfg.alpha, sign, report.proposed_horizon)
            .map_err(CliError::from_core)?;
    let t_split = Instant::now();
    let (strang, picard) = {
        let strang = split_step_solve(&run_problem, cfg.steps).map_err(CliError::from_core)?;
        let (picard, _) = biwave_core::nls::picard_solve(
            &run_problem,
            &triple,
            cfg.steps,
            40,
            1e-10 * report.ball_radius.max(1e-30),
        )
        .map_err(CliError::from_core)?;
        (strang, picard)
    };
    manifest.timing("split_step", t_split);
    let mut agreement: f64 = 0.0;
    for (a, b) in picard.fields().iter().zip(strang.fields()) {
        let diff = a
            .add_scaled(Complex64::new(-1.0, 0.0), b)
            .map_err(CliError::from_core)?
            .l2_norm();
        agreement = agreement.max(diff);
    }
    let m0 = run_problem.initial.l2_norm();
    let mass_drift = strang
        .fields()
        .iter()
        .map(|f| (f.l2_norm() - m0).abs() / m0)
        .fold(0.0, f64::max);

    let sobolev = MixedNormSpec::new(Exponent::new(2.0).unwrap(), Exponent::new(2.0).unwrap());
    let mut csv = String::from("t,l2_norm,l2h1_norm,mixed_norm\n");
    let metric_spec = MixedNormSpec::new(triple.r1(), triple.r2());
    let mut saved = 0usize;
    let t_write = Instant::now();
    {
        for (k, (t, f)) in picard.times().iter().zip(picard.fields()).enumerate() {
            let l2h1 = mixed_sobolev_norm(f, &sobolev, 1).map_err(CliError::from_core)?;
            let _ = writeln!(
                csv,
                "{t:.5e},{:.5e},{l2h1:.5e},{:.5e}",
                f.l2_norm(),
                mixed_norm(f, &metric_spec)
            );
            if k % cfg.save_every == 0 || k == picard.len() - 1 {
                let name = format!("solution_{k:04}.bpwf");
                f.write_to_path(args.out.join(&name)).map_err(CliError::from_core)?;
                manifest
                    .record_output(&args.out, &name)
                    .map_err(|e| CliError::internal(e.to_string()))?;
                saved += 1;
            }
        }
    }
    manifest.timing("write", t_write);
    write_text(&args.out, "solve_norms.csv", &csv, manifest)?;

    let ledger_points: Vec<(f64, f64)> = report
        .contraction_ledger
        .iter()
        .map(|s| (s.iteration as f64, s.distance))
        .collect();
    let plot = Plot {
        title: format!(
            "Picard contraction: max ratio {:.3}",
            report.measured_contraction.unwrap_or(f64::NAN)
        ),
        x_label: "iteration".into(),
        y_label: "distance".into(),
        log_x: false,
        log_y: true,
        scatter: false,
        series: vec![Series { label: "d(u_k, u_k-1)".into(), points: ledger_points, color: "steelblue" }],
    };
    write_text(&args.out, "solve_contraction.svg", &plot.render(), manifest)?;

    let solve_report = SolveReport {
        wellposedness: report,
        split_step_agreement_sup_l2: agreement,
        split_step_mass_drift: mass_drift,
        saved_snapshots: saved,
        times: picard.times().to_vec(),
        l2_norms: picard.fields().iter().map(|f| f.l2_norm()).collect(),
    };
    write_json(&args.out, "solve_report.json", &solve_report, manifest)
}
