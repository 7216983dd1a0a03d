//! The six subcommands. Each resolves its inputs from the shared
//! configuration, runs the corresponding library routine, writes its
//! outputs (field JSON, CSV tables, a JSON sidecar), and prints a short
//! summary. All outputs are deterministic given (config, seed).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use serde_json::{json, Value};

use rbo_core::{
    bo_soliton, cfl_suggest, derivative, evolve as evolve_field, functional_record,
    gamma_convergence_study, perturb, petviashvili_solve, projected_min_eigenvalue,
    rbo_residual, run_stability_experiment, CoreError, FunctionalRecord, GroundState,
    LinearizedOp, PerturbMode, SolitonSpec, StabilityReport, Verdict, WaveParams,
};

use crate::config::Resolved;
use crate::fields::{read_field, write_field};
use crate::report::{write_csv, write_sidecar, GAMMA_HEADER, SERIES_HEADER, STABILITY_HEADER};
use crate::CliError;

fn functional_json(rec: &FunctionalRecord) -> Value {
    json!({
        "I": rec.i_value,
        "K": rec.k_value,
        "E": rec.e_value,
        "V": rec.v_value,
        "m": rec.m_value,
        "h_half_norm": rec.h_half_norm,
        "x_norm": rec.x_norm,
        "inv_deriv_norm": rec.inv_deriv_norm,
    })
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Bounded => "bounded",
        Verdict::Escaped => "escaped",
    }
}

pub fn ground_state(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    let g = cfg.grid()?;
    let gs = petviashvili_solve(&cfg.params(), &g, &cfg.solver_options())?;

    let field_path = cfg.out_dir.join("ground_state.json");
    write_field(&gs.psi, &field_path)?;
    let results = json!({
        "residual_rel": gs.residual_rel,
        "iterations": gs.iterations,
        "functionals": functional_json(&gs.functionals),
        "field": field_path.display().to_string(),
    });
    let meta_path = cfg.out_dir.join("ground_state_meta.json");
    write_sidecar(&meta_path, "ground-state", r, start.elapsed().as_secs_f64(), &results)?;

    println!(
        "converged in {} iterations, relative residual {:.3e}",
        gs.iterations, gs.residual_rel
    );
    println!("wrote {} and {}", field_path.display(), meta_path.display());
    Ok(())
}

pub fn evolve(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    let p = cfg.params();
    let (u0, origin) = match &cfg.initial {
        Some(path) => (read_field(path)?, path.display().to_string()),
        None => {
            let g = cfg.grid()?;
            let gs = petviashvili_solve(&p, &g, &cfg.solver_options())?;
            let u0 = perturb(&gs.psi, cfg.amp, cfg.seed, PerturbMode::EvenNoise);
            (u0, format!("solved profile + even noise (amp {}, seed {})", cfg.amp, cfg.seed))
        }
    };
    let dt = cfg.dt.unwrap_or_else(|| cfl_suggest(&u0, u0.grid()));
    let traj = evolve_field(&u0, &p, &cfg.evolution_config(dt))?;

    let rows: Vec<String> = traj
        .times
        .iter()
        .zip(&traj.e_series)
        .zip(&traj.v_series)
        .map(|((t, e), v)| format!("{t},{e},{v}"))
        .collect();
    let csv_path = cfg.out_dir.join("evolve_series.csv");
    write_csv(&csv_path, SERIES_HEADER, &rows)?;
    let field_path = cfg.out_dir.join("final_state.json");
    write_field(traj.final_state(), &field_path)?;

    let results = json!({
        "initial_data": origin,
        "dt": dt,
        "snapshots": traj.times.len(),
        "final_time": traj.final_time(),
        "series": csv_path.display().to_string(),
        "final_state": field_path.display().to_string(),
    });
    let meta_path = cfg.out_dir.join("evolve_meta.json");
    write_sidecar(&meta_path, "evolve", r, start.elapsed().as_secs_f64(), &results)?;

    println!(
        "evolved to t = {} with dt = {dt} ({} snapshots)",
        traj.final_time(),
        traj.times.len()
    );
    println!("wrote {}, {}, {}", csv_path.display(), field_path.display(), meta_path.display());
    Ok(())
}

/// Worker-count policy for the ensemble: `RBO_WORKERS` if set, otherwise all
/// available cores, never more than there are members.
fn parse_workers(raw: Option<&str>) -> Result<Option<usize>, CliError> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "RBO_WORKERS must be a positive integer, got `{s}`"
            ))),
        },
    }
}

fn worker_count(members: usize) -> Result<usize, CliError> {
    let env = std::env::var("RBO_WORKERS").ok();
    let n = match parse_workers(env.as_deref())? {
        Some(n) => n,
        None => thread::available_parallelism().map(usize::from).unwrap_or(1),
    };
    Ok(n.min(members).max(1))
}

fn run_ensemble(
    gs: &GroundState,
    r: &Resolved,
    dt: f64,
) -> Result<Vec<StabilityReport>, CliError> {
    let cfg = &r.config;
    let members = cfg.ensemble;
    let workers = worker_count(members)?;
    let run_cfg = cfg.evolution_config(dt);

    // Fan members out over a fixed-size pool; slot i always holds member i,
    // so the output order and bytes never depend on scheduling.
    let slots: Vec<Mutex<Option<Result<StabilityReport, CoreError>>>> =
        (0..members).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= members {
                    break;
                }
                let result = run_stability_experiment(
                    gs,
                    cfg.amp,
                    cfg.seed.wrapping_add(i as u64),
                    cfg.t_horizon,
                    &run_cfg,
                );
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });

    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            slot.into_inner()
                .unwrap()
                .expect("every member index was claimed by a worker")
                .map_err(|e| {
                    eprintln!("stability member {i} (seed {}) failed", cfg.seed.wrapping_add(i as u64));
                    CliError::Numerical(e)
                })
        })
        .collect()
}

pub fn stability(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    let g = cfg.grid()?;
    let gs = petviashvili_solve(&cfg.params(), &g, &cfg.solver_options())?;
    let dt = cfg.dt.unwrap_or_else(|| cfl_suggest(&gs.psi, &g));
    let reports = run_ensemble(&gs, r, dt)?;

    let mut member_meta = Vec::with_capacity(reports.len());
    for (i, report) in reports.iter().enumerate() {
        let csv_name = if reports.len() == 1 {
            "stability.csv".to_string()
        } else {
            format!("stability_{i:03}.csv")
        };
        let csv_path = cfg.out_dir.join(&csv_name);
        let rows: Vec<String> = report
            .times
            .iter()
            .zip(&report.orbital_distances)
            .zip(&report.shifts)
            .zip(&report.e_drifts)
            .zip(&report.v_drifts)
            .map(|((((t, d), z), e), v)| format!("{t},{d},{z},{e},{v}"))
            .collect();
        write_csv(&csv_path, STABILITY_HEADER, &rows)?;

        let sup = report.orbital_distances.iter().copied().fold(0.0f64, f64::max);
        println!(
            "member {i} (seed {}): {}, sup d = {:.3e}, threshold {:.3e}",
            report.seed,
            verdict_str(report.verdict),
            sup,
            report.threshold
        );
        member_meta.push(json!({
            "seed": report.seed,
            "verdict": verdict_str(report.verdict),
            "initial_distance": report.orbital_distances[0],
            "sup_distance": sup,
            "threshold": report.threshold,
            "final_shift": report.shifts.last().copied(),
            "e_drift": report.e_drift,
            "v_drift": report.v_drift,
            "csv": csv_path.display().to_string(),
        }));
    }

    let results = json!({
        "dt": dt,
        "t_horizon": cfg.t_horizon,
        "perturbation_amp": cfg.amp,
        "members": member_meta,
    });
    let meta_path = cfg.out_dir.join("stability_meta.json");
    write_sidecar(&meta_path, "stability", r, start.elapsed().as_secs_f64(), &results)?;
    println!("wrote {}", meta_path.display());
    Ok(())
}

pub fn converge_gamma(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    if cfg.gamma_list.is_empty() {
        return Err(CliError::Config(
            "converge-gamma needs a nonempty `gamma_list` (comma-separated, strictly decreasing)"
                .to_string(),
        ));
    }
    let g = cfg.grid()?;
    let rows =
        gamma_convergence_study(cfg.c, &cfg.gamma_list, &g, &cfg.solver_options())?;

    let lines: Vec<String> = rows
        .iter()
        .map(|row| {
            format!(
                "{},{},{},{},{}",
                row.gamma, row.m_value, row.dist_h12_to_q, row.residual_rel, row.iterations
            )
        })
        .collect();
    let csv_path = cfg.out_dir.join("converge_gamma.csv");
    write_csv(&csv_path, GAMMA_HEADER, &lines)?;

    let results = json!({
        "rows": rows.iter().map(|row| json!({
            "gamma": row.gamma,
            "m": row.m_value,
            "dist_h12": row.dist_h12_to_q,
            "residual": row.residual_rel,
            "iterations": row.iterations,
        })).collect::<Vec<_>>(),
        "csv": csv_path.display().to_string(),
    });
    let meta_path = cfg.out_dir.join("converge_gamma_meta.json");
    write_sidecar(&meta_path, "converge-gamma", r, start.elapsed().as_secs_f64(), &results)?;

    println!("{} continuation rows written to {}", rows.len(), csv_path.display());
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        println!(
            "m: {:.6} at gamma = {} down to {:.6} at gamma = {}",
            first.m_value, first.gamma, last.m_value, last.gamma
        );
    }
    println!("wrote {}", meta_path.display());
    Ok(())
}

pub fn spectrum(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    let g = cfg.grid()?;
    let p = cfg.params();
    let gs = petviashvili_solve(&p, &g, &cfg.solver_options())?;
    let constraints = [gs.psi.clone(), derivative(&gs.psi)];
    let op = LinearizedOp::new(gs.psi.clone(), p);
    let report = projected_min_eigenvalue(&op, &constraints)?;

    let results = json!({
        "constraints": ["psi", "psi_x"],
        "min_eig_projected": report.min_eig_projected,
        "raw_min_eig": report.raw_min_eig,
        "kernel_residual": report.kernel_residual,
        "dc_identity_residual": report.dc_identity_residual,
        "degenerate_projection": report.degenerate_projection,
        "solver": { "residual_rel": gs.residual_rel, "iterations": gs.iterations },
    });
    let meta_path = cfg.out_dir.join("spectrum.json");
    write_sidecar(&meta_path, "spectrum", r, start.elapsed().as_secs_f64(), &results)?;

    println!(
        "projected minimum eigenvalue {:.6} (raw {:.6}, kernel residual {:.3e})",
        report.min_eig_projected, report.raw_min_eig, report.kernel_residual
    );
    println!("wrote {}", meta_path.display());
    Ok(())
}

pub fn soliton_check(r: &Resolved) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &r.config;
    let g = cfg.grid()?;
    // The closed form solves the zero-rotation problem; this check always
    // evaluates there, whatever `gamma` is set to.
    let p = WaveParams { c: cfg.c, gamma: 0.0 };
    let q = bo_soliton(&SolitonSpec { c: cfg.c, center: 0.0 }, &g);
    let residual = rbo_residual(&q, &p)?;
    let functionals = functional_record(&q, &p)?;

    let results = json!({
        "c": cfg.c,
        "gamma": 0.0,
        "residual_norm": residual.norm,
        "residual_rel": residual.relative_norm,
        "functionals": functional_json(&functionals),
    });
    let meta_path = cfg.out_dir.join("soliton_check.json");
    write_sidecar(&meta_path, "soliton-check", r, start.elapsed().as_secs_f64(), &results)?;

    println!(
        "closed-form profile at c = {}: relative residual {:.3e} on n = {}, L = {}",
        cfg.c,
        residual.relative_norm,
        g.len(),
        g.half_length()
    );
    println!(
        "V = {:.6}, K = {:.6}, I = {:.6}, E = {:.6}",
        functionals.v_value, functionals.k_value, functionals.i_value, functionals.e_value
    );
    println!("wrote {}", meta_path.display());
    Ok(())
}
