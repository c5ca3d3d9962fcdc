use std::f64::consts::PI;

use anyhow::{anyhow, Result};
use robin_box::dynamics::{ehrenfest_report, evolve, revival_fidelity, BasisMatrices, EvolvingState};
use robin_box::momentum::{
    expval_pi, expval_pr, expval_pr_squared, momentum_density, momentum_distribution, MomentumExtension,
};
use robin_box::spectrum::{EnergyBasis, Family, Gamma};
use robin_box::uncertainty::{
    commutator_expectation_x_pr, generalized_uncertainty, kinetic_inequality_report, UncertaintyReport,
};
use robin_box::{observables_of, Quadrature, WaveFunction};
use serde_json::{json, Value};

use crate::config::{
    time_grid, Common, EhrenfestArgs, EvolveArgs, FileConfig, MeasureArgs, SpectrumArgs, UncertaintyArgs,
};
use crate::output::{json_num, num, write_csv, write_json};
use crate::state::{build_state, default_packet, parse_state, StateSpec};
use crate::Usage;

fn family_json(f: &Family) -> Value {
    let bc = f.bc();
    let g = |g: Gamma| g.finite().map_or(Value::from("inf"), json_num);
    json!({ "name": f.name(), "gamma_plus": g(bc.plus), "gamma_minus": g(bc.minus) })
}

fn checked_state(text: &str, common: &Common) -> Result<EvolvingState> {
    let spec = parse_state(text)?;
    let state = build_state(&spec, common.cfg, common.family, common.seed)?;
    let n = state.norm_sq();
    if !n.is_finite() || (n - 1.0).abs() > 1e-8 {
        return Err(robin_box::Error::Numeric(format!("state {text} has norm^2 {n}")).into());
    }
    Ok(state)
}

fn state_text(arg: &Option<String>, file: &FileConfig, fallback: Option<StateSpec>) -> Result<String> {
    if let Some(s) = arg.as_ref().or(file.state.as_ref()) {
        return Ok(s.clone());
    }
    match fallback {
        Some(StateSpec::Gaussian { a, kc }) => Ok(format!("gaussian:{a:e},{kc:e}")),
        _ => Err(Usage::new("--state is required").into()),
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

fn spectrum_rows(basis: &EnergyBasis) -> Vec<Vec<String>> {
    basis
        .levels
        .iter()
        .map(|lv| vec![lv.index.to_string(), lv.kind.to_string(), num(lv.energy), num(lv.wavenumber)])
        .collect()
}

pub fn spectrum(common: &Common, args: &SpectrumArgs, file: &FileConfig) -> Result<()> {
    let family = common.family_or_default();
    let levels = args.levels.or(file.levels).unwrap_or(10);
    let basis = family.spectrum(common.cfg, levels)?;
    let out = &common.out_dir;
    write_csv(&out.join("spectrum.csv"), &["l", "kind", "energy", "wavenumber"], spectrum_rows(&basis))?;

    let samples = args.samples.or(file.samples).unwrap_or(201);
    let xs = uniform(-common.cfg.half(), common.cfg.half(), samples);
    if samples > 0 {
        for lv in &basis.levels {
            let rows = xs.iter().map(|&x| vec![num(x), num(lv.mode.value(x)), num(0.0)]);
            write_csv(&out.join(format!("eigenfunctions/level_{:03}.csv", lv.index)), &["x", "re", "im"], rows)?;
        }
    }

    let points = args.sweep_points.or(file.sweep_points).unwrap_or(0);
    if points > 0 {
        let make: fn(f64) -> Family = match family {
            Family::Symmetric(_) => Family::Symmetric,
            Family::Antisymmetric(_) => Family::Antisymmetric,
            other => {
                return Err(Usage::new(format!("sweeps need the symmetric or antisymmetric family, not {}", other.name()))
                    .into())
            }
        };
        let mut rows = Vec::new();
        for j in 1..=points {
            let angle = -0.5 * PI + PI * j as f64 / (points + 1) as f64;
            let gamma = angle.tan() / common.cfg.l;
            let b = make(gamma).spectrum(common.cfg, levels)?;
            for lv in &b.levels {
                rows.push(vec![num(gamma), num(angle), lv.index.to_string(), lv.kind.to_string(), num(lv.energy)]);
            }
        }
        write_csv(&out.join("spectrum_sweep.csv"), &["gamma", "arctan_gL", "l", "kind", "energy"], rows)?;
    }
    Ok(())
}

/// Half-width of a momentum window holding the significant part of `state`.
fn momentum_window(state: &EvolvingState) -> f64 {
    let big = state.coefs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let kmax = state
        .coefs
        .iter()
        .zip(&state.basis.levels)
        .filter(|(c, _)| c.norm() > 1e-8 * big)
        .map(|(_, lv)| lv.wavenumber.abs())
        .fold(0.0, f64::max);
    kmax + 10.0 * PI / state.config().l
}

pub fn measure(common: &Common, args: &MeasureArgs, file: &FileConfig) -> Result<()> {
    let text = state_text(&args.state, file, None)?;
    let state = checked_state(&text, common)?;
    let cfg = common.cfg;
    let q = Quadrature::standard(cfg);
    let ext = MomentumExtension::with_theta(common.theta)?;
    let psi = state.wave();
    let n_max = args.n_max.or(file.n_max).unwrap_or(10_000);
    if n_max < 1 {
        return Err(Usage::new("--n-max must be positive").into());
    }
    let dist = momentum_distribution(&psi, &ext, -n_max, n_max, &q);
    let out = &common.out_dir;
    let rows = (-n_max..=n_max)
        .zip(&dist.probabilities)
        .map(|(n, p)| vec![n.to_string(), num(ext.eigenvalue(n, cfg.l)), num(*p)]);
    write_csv(&out.join("histogram.csv"), &["n", "k_n", "probability"], rows)?;

    let points = args.density_points.or(file.density_points).unwrap_or(2001);
    let width = momentum_window(&state);
    let ks = uniform(-width, width, points);
    let dens = momentum_density(&psi, &ks, &q);
    write_csv(
        &out.join("density.csv"),
        &["k", "density"],
        ks.iter().zip(&dens).map(|(k, d)| vec![num(*k), num(*d)]),
    )?;

    let pr2 = expval_pr_squared(&psi, &ext, &q)?;
    let summary = json!({
        "state": text,
        "family": family_json(&state.basis.family),
        "m": cfg.m,
        "L": cfg.l,
        "theta": ext.theta,
        "n_max": n_max,
        "pR": json_num(expval_pr(&psi, &q)?),
        "pI": json_num(expval_pi(&psi)),
        "pR2": json_num(pr2.value()),
        "tail_exponent": dist.tail_exponent.map_or(Value::Null, json_num),
        "tail_mass": json_num(dist.tail_mass),
        "histogram_sum": json_num(dist.listed_mass()),
    });
    write_json(&out.join("summary.json"), &summary)
}

pub fn evolve_cmd(common: &Common, args: &EvolveArgs, file: &FileConfig) -> Result<()> {
    let cfg = common.cfg;
    let text = state_text(&args.state, file, Some(default_packet(cfg)))?;
    let state = checked_state(&text, common)?;
    let q = Quadrature::standard(cfg);
    let times = time_grid(&args.time, file, cfg.revival_time(), 20)?;
    let xs = uniform(-cfg.half(), cfg.half(), args.snapshot_points.or(file.snapshot_points).unwrap_or(401));
    let width = momentum_window(&state);
    let ks = uniform(-width, width, args.momentum_points.or(file.momentum_points).unwrap_or(401));
    let out = &common.out_dir;
    let mut series = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let now = evolve(&state, t);
        let psi = now.wave();
        let obs = observables_of(&psi, &q)?;
        let (overlap, distance) = revival_fidelity(&state, t, &q)?;
        series.push(vec![
            num(t),
            num(obs.mean_x),
            num(expval_pr(&psi, &q)?),
            num(expval_pi(&psi)),
            num(overlap),
            num(distance),
        ]);
        let rows = xs.iter().map(|&x| {
            let v = psi.value(x);
            vec![num(x), num(v.re), num(v.im), num(v.norm_sqr())]
        });
        write_csv(&out.join(format!("snapshots/{j:03}.csv")), &["x", "re", "im", "density"], rows)?;
        if !ks.is_empty() {
            let dens = momentum_density(&psi, &ks, &q);
            let rows = ks.iter().zip(&dens).map(|(k, d)| vec![num(*k), num(*d)]);
            write_csv(&out.join(format!("momentum/{j:03}.csv")), &["k", "density"], rows)?;
        }
    }
    write_csv(
        &out.join("series.csv"),
        &["t", "mean_x", "pR", "pI", "overlap", "density_distance"],
        series,
    )
}

pub fn ehrenfest(common: &Common, args: &EhrenfestArgs, file: &FileConfig) -> Result<()> {
    let cfg = common.cfg;
    let text = state_text(&args.state, file, Some(default_packet(cfg)))?;
    let state = checked_state(&text, common)?;
    let q = Quadrature::standard(cfg);
    let times = time_grid(&args.time, file, cfg.revival_time(), 19)?;
    let mats = BasisMatrices::new(&state.basis, state.coefs.len(), &q)?;
    let mut rows = Vec::with_capacity(times.len());
    let level = log::max_level();
    for (j, &t) in times.iter().enumerate() {
        // the truncation warning depends only on the coefficients, so show it once
        if j == 1 {
            log::set_max_level(level.min(log::LevelFilter::Error));
        }
        let r = ehrenfest_report(&state, t, None, &q, &mats);
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                log::set_max_level(level);
                return Err(e.into());
            }
        };
        rows.push(vec![
            num(r.t),
            num(r.dx_dt),
            num(r.p_r),
            num(r.residual1),
            num(r.dpr_dt),
            num(r.dpr_dt_fd),
            num(r.force_boundary),
            r.force_boundary_robin.map(num).unwrap_or_default(),
            num(r.minus_dv),
            num(r.residual2),
            num(r.dpi_dt),
            num(r.dpi_dt_bracket),
            num(r.dpi_dt_continuity),
            num(r.continuity_residual),
        ]);
    }
    log::set_max_level(level);
    write_csv(&common.out_dir.join("ehrenfest.csv"), &EHRENFEST_COLUMNS, rows)
}

pub const EHRENFEST_COLUMNS: [&str; 14] = [
    "t",
    "dx_dt",
    "pR",
    "residual1",
    "dpR_dt",
    "dpR_dt_fd",
    "force_boundary",
    "force_boundary_robin",
    "minus_dV",
    "residual2",
    "dpI_dt",
    "dpI_dt_bracket",
    "dpI_dt_continuity",
    "continuity_residual",
];

const REPORT_COLUMNS: [&str; 15] = [
    "delta_x",
    "two_m_T",
    "pR",
    "pR2_term",
    "anticomm",
    "anticomm_imag",
    "cross_term",
    "boundary_block",
    "boundary_term",
    "gamma_terms",
    "pI_sq_term",
    "lhs",
    "rhs",
    "holds",
    "slack",
];

fn report_cells(r: &UncertaintyReport) -> Vec<String> {
    vec![
        num(r.delta_x),
        num(r.two_m_t),
        num(r.p_r),
        num(r.p_r2_term),
        num(r.anticomm),
        num(r.anticomm_imag),
        num(r.cross_term),
        num(r.boundary_block),
        num(r.boundary_term),
        num(r.gamma_terms),
        num(r.p_i_sq_term),
        num(r.lhs),
        num(r.rhs),
        r.holds.to_string(),
        num(r.slack),
    ]
}

pub fn uncertainty(common: &Common, args: &UncertaintyArgs, file: &FileConfig) -> Result<()> {
    let cfg = common.cfg;
    let q = Quadrature::standard(cfg);
    if common.theta != 0.0 {
        log::info!("the kinetic inequality report does not use theta; results for theta != 0 are exploratory");
    }
    let count = args.count.or(file.count).unwrap_or(0);
    let text = args.state.as_ref().or(file.state.as_ref());
    if text.is_none() && count == 0 {
        return Err(Usage::new("give --state, a positive --count, or both").into());
    }
    let mut doc = serde_json::Map::new();
    doc.insert("m".into(), json!(cfg.m));
    doc.insert("L".into(), json!(cfg.l));
    if let Some(text) = text {
        let state = checked_state(text, common)?;
        let psi = state.wave();
        let family = state.basis.family;
        let report = kinetic_inequality_report(&psi, &family.bc(), &q)?;
        let comm = commutator_expectation_x_pr(&psi, &q)?;
        let general = generalized_uncertainty(&psi, &q)?;
        doc.insert("state".into(), json!(text));
        doc.insert("family".into(), family_json(&family));
        doc.insert("report".into(), serde_json::to_value(report)?);
        doc.insert("commutator_x_pR".into(), json!({ "re": comm.re, "im": comm.im }));
        doc.insert("generalized".into(), serde_json::to_value(general)?);
    }
    if count > 0 {
        let modes = args.modes.or(file.modes).unwrap_or(10);
        if modes == 0 {
            return Err(Usage::new("--modes must be positive").into());
        }
        let family = common.family_or_default();
        let basis = family.spectrum(cfg, modes - 1)?;
        let mut rows = Vec::with_capacity(count);
        let mut violations = 0usize;
        let mut min_slack = f64::INFINITY;
        for i in 0..count as u64 {
            let seed = common
                .seed
                .checked_add(i)
                .ok_or_else(|| anyhow!(Usage::new("seed range overflows u64")))?;
            let s = robin_box::random::random_state(&basis, modes, seed)?;
            let r = kinetic_inequality_report(&s.wave(), &family.bc(), &q)?;
            violations += usize::from(!r.holds);
            min_slack = min_slack.min(r.slack);
            let mut row = vec![i.to_string(), seed.to_string()];
            row.extend(report_cells(&r));
            rows.push(row);
        }
        let mut header = vec!["index", "seed"];
        header.extend(REPORT_COLUMNS);
        write_csv(&common.out_dir.join("uncertainty_sweep.csv"), &header, rows)?;
        doc.insert(
            "sweep".into(),
            json!({
                "family": family_json(&family),
                "count": count,
                "modes": modes,
                "first_seed": common.seed,
                "violations": violations,
                "min_slack": json_num(min_slack),
            }),
        );
    }
    write_json(&common.out_dir.join("uncertainty.json"), &Value::Object(doc))
}
