//! The four subcommands.

use crate::config::{position, Format, RunConfig};
use crate::error::CliError;
use crate::output::{sha256_hex, Outputs, Table};
use crate::pins;
use nanoqnd_core::coupling::{
    coupling_map, coupling_summary, cooperativity, faraday_area, input_area, AtomicSpecies, CouplingSummary,
    ModePair, ProbeConfig,
};
use nanoqnd_core::fit::{fit_exponential, fit_powerlaw};
use nanoqnd_core::moments::{
    convergence_report, scan, simulate, write_scan_csv, Mode, ScanAxis, ScanRow, SimParams,
};
use nanoqnd_core::waveguide::{
    load_mode, save_mode, solve_mode_pair, Geometry, GuidedMode, ModeField, Polarization, TransverseGrid,
    CACHE_VERSION,
};
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Modes,
    Coopmap,
    Squeeze,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Coopmap => "coopmap",
            Command::Squeeze => "squeeze",
            Command::Scan => "scan",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub cache_dir: PathBuf,
    pub check: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CacheInfo {
    pub key: String,
    pub hit: bool,
    /// File name and SHA-256 of each cached mode.
    pub files: Vec<(String, String)>,
}

/// What a run produced, for the caller to print.
#[derive(Debug)]
pub struct RunReport {
    pub out: PathBuf,
    pub files: Vec<String>,
}

pub fn execute(cmd: Command, ctx: &Context) -> Result<RunReport, CliError> {
    let mut out = Outputs::new(&ctx.out)?;
    let (details, cache, checks) = match cmd {
        Command::Modes => run_modes(ctx, &mut out)?,
        Command::Coopmap => run_coopmap(ctx, &mut out)?,
        Command::Squeeze => run_squeeze(ctx, &mut out)?,
        Command::Scan => run_scan(ctx, &mut out)?,
    };
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "seed": ctx.config.sim.seed,
        "config": ctx.config,
        "config_text": ctx.config.to_text(),
        "cache": cache,
        "details": details,
        "outputs": out.files.iter().map(|(f, h)| json!({ "file": f, "sha256": h })).collect::<Vec<_>>(),
    });
    out.write_json("manifest.json", &manifest)?;
    if ctx.check {
        let failures = pins::check(cmd, &ctx.config, &checks)?;
        if !failures.is_empty() {
            return Err(CliError::Check(failures));
        }
    }
    Ok(RunReport { out: out.dir, files: out.files.into_iter().map(|(f, _)| f).collect() })
}

/// Quantities a run can be checked against.
#[derive(Debug, Clone, Default)]
pub struct Measured {
    pub n_eff: Option<f64>,
    pub n_g: Option<f64>,
    pub c1: Option<f64>,
    pub peak_db: Option<f64>,
    pub peak_time: Option<f64>,
    pub beta_times_size: Option<f64>,
    pub od_exponent: Option<f64>,
}

type Ran = (Value, CacheInfo, Measured);

fn species(cfg: &RunConfig) -> AtomicSpecies {
    AtomicSpecies { f: cfg.atoms.f, ..AtomicSpecies::cesium_d2() }
}

fn probe(cfg: &RunConfig) -> ProbeConfig {
    ProbeConfig {
        power_w: cfg.probe.power_nw * 1e-9,
        detuning: 2.0 * PI * cfg.probe.detuning_ghz * 1e9,
        wavelength_nm: cfg.probe.wavelength_nm,
    }
}

fn cache_key(geom: &Geometry, wavelength_nm: f64, grid: Option<&TransverseGrid>) -> String {
    let text = format!("{geom:?}|{wavelength_nm:?}|{grid:?}|{CACHE_VERSION}");
    sha256_hex(text.as_bytes())[..16].to_string()
}

/// Loads both polarizations from the cache, solving and caching them when
/// absent or unreadable.
pub fn mode_pair(cfg: &RunConfig, cache_dir: &Path) -> Result<(ModePair, CacheInfo), CliError> {
    let geom = cfg.waveguide.geometry();
    let lam = cfg.probe.wavelength_nm;
    let grid = match geom {
        Geometry::Cylinder { .. } => None,
        Geometry::Rectangle { .. } => Some(
            TransverseGrid::new(cfg.grid.half_extent_nm, cfg.grid.spacing_nm).map_err(CliError::Solver)?,
        ),
    };
    let key = cache_key(&geom, lam, grid.as_ref());
    let names = [format!("{key}_H.nqmode"), format!("{key}_V.nqmode")];
    let paths = names.clone().map(|n| cache_dir.join(n));
    let cached = if paths.iter().all(|p| p.exists()) {
        match (load_mode(&paths[0], Some(&geom)), load_mode(&paths[1], Some(&geom))) {
            (Ok(h), Ok(v)) if h.polarization == Polarization::H && v.polarization == Polarization::V => Some((h, v)),
            (Err(e), _) | (_, Err(e)) => {
                log::warn!("discarding mode cache {key}: {e}");
                None
            }
            _ => {
                log::warn!("discarding mode cache {key}: polarizations swapped");
                None
            }
        }
    } else {
        None
    };
    let hit = cached.is_some();
    let (h, v) = match cached {
        Some(pair) => pair,
        None => {
            log::info!("solving modes for {geom:?}");
            let (h, v) = solve_mode_pair(&geom, lam, grid)?;
            std::fs::create_dir_all(cache_dir)?;
            save_mode(&h, &paths[0])?;
            save_mode(&v, &paths[1])?;
            (h, v)
        }
    };
    let mut files = Vec::new();
    for (n, p) in names.iter().zip(&paths) {
        files.push((n.clone(), sha256_hex(&std::fs::read(p)?)));
    }
    Ok((ModePair::new(h, v)?, CacheInfo { key, hit, files }))
}

fn emit(out: &mut Outputs, cfg: &RunConfig, stem: &str, table: &Table, csv: Option<Vec<u8>>) -> Result<(), CliError> {
    for f in &cfg.output.formats {
        match f {
            Format::Csv => out.write(&format!("{stem}.csv"), &csv.clone().unwrap_or_else(|| table.to_csv()))?,
            Format::Json => out.write(&format!("{stem}.json"), &table.to_json())?,
        }
    }
    Ok(())
}

fn axis_points(half_width: f64, step: f64) -> Vec<f64> {
    let n = (half_width / step).floor() as i64;
    (-n..=n).map(|k| k as f64 * step).collect()
}

fn run_modes(ctx: &Context, out: &mut Outputs) -> Result<Ran, CliError> {
    let cfg = &ctx.config;
    let (pair, cache) = mode_pair(cfg, &ctx.cache_dir)?;
    let xs = axis_points(cfg.map.half_width_nm, cfg.map.step_nm);
    for mode in [&pair.h, &pair.v] {
        let mut t = Table::new(&[
            "x_nm",
            "y_nm",
            "Re_ux_per_m",
            "Im_ux_per_m",
            "Re_uy_per_m",
            "Im_uy_per_m",
            "Re_uz_per_m",
            "Im_uz_per_m",
        ]);
        for &x in &xs {
            for &y in &xs {
                let u = mode.field_at(x, y);
                t.push(vec![
                    Some(x),
                    Some(y),
                    Some(u[0].re),
                    Some(u[0].im),
                    Some(u[1].re),
                    Some(u[1].im),
                    Some(u[2].re),
                    Some(u[2].im),
                ]);
            }
        }
        emit(out, cfg, &format!("mode_{:?}", mode.polarization), &t, None)?;
    }
    let describe = |m: &GuidedMode| {
        json!({
            "polarization": format!("{:?}", m.polarization),
            "beta_per_m": m.beta,
            "n_eff": m.n_eff(),
            "n_g": m.n_g,
            "norm": m.norm_squared(),
            "representation": match m.field { ModeField::Analytic(_) => "analytic", ModeField::Grid(_) => "grid" },
        })
    };
    let overlap = match (&pair.h.field, &pair.v.field) {
        (ModeField::Grid(a), ModeField::Grid(b)) => Some(a.overlap(b).norm()),
        _ => None,
    };
    let summary = json!({
        "geometry": cfg.waveguide,
        "wavelength_nm": cfg.probe.wavelength_nm,
        "modes": [describe(&pair.h), describe(&pair.v)],
        "hv_overlap_abs": overlap,
    });
    out.write_json("modes_summary.json", &summary)?;
    let measured = Measured { n_eff: Some(pair.h.n_eff()), n_g: Some(pair.h.n_g), ..Default::default() };
    Ok((summary, cache, measured))
}

fn design_summary(pair: &ModePair, cfg: &RunConfig) -> Result<CouplingSummary, CliError> {
    let (x, y) = cfg.atoms.position_nm();
    Ok(coupling_summary(pair, &species(cfg), &probe(cfg), x, y)?)
}

fn run_coopmap(ctx: &Context, out: &mut Outputs) -> Result<Ran, CliError> {
    let cfg = &ctx.config;
    let (pair, cache) = mode_pair(cfg, &ctx.cache_dir)?;
    let sp = species(cfg);
    let xs = axis_points(cfg.map.half_width_nm, cfg.map.step_nm);
    let map = coupling_map(&pair, &sp, &xs, &xs);
    let mut t = Table::new(&["x_nm", "y_nm", "inv_A_Far_per_m2", "inv_A_in_per_m2", "C1"]);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let (a, b, c) = map.get(i, j);
            t.push(vec![Some(x), Some(y), a, b, c]);
        }
    }
    let mut csv = Vec::new();
    map.write_csv(&mut csv)?;
    emit(out, cfg, "coopmap", &t, Some(csv))?;

    let r = cfg.atoms.radial_distance_nm;
    let mut circle = Table::new(&["azimuth_deg", "x_nm", "y_nm", "A_Far_m2", "A_in_m2", "C1"]);
    let mut best = (f64::NEG_INFINITY, 0.0);
    let (mut c_lo, mut a_lo, mut a_hi) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for k in 0..cfg.map.circle_points {
        let az = 360.0 * k as f64 / cfg.map.circle_points as f64;
        let (x, y) = position(r, az);
        let a_far = faraday_area(&pair, x, y)?;
        let a_in = input_area(&pair, x, y)?;
        let c1 = cooperativity(&pair, &sp, x, y)?;
        if c1 > best.0 {
            best = (c1, az);
        }
        c_lo = c_lo.min(c1);
        a_lo = a_lo.min(a_far);
        a_hi = a_hi.max(a_far);
        circle.push(vec![Some(az), Some(x), Some(y), Some(a_far), Some(a_in), Some(c1)]);
    }
    emit(out, cfg, "coopmap_circle", &circle, None)?;
    let design = design_summary(&pair, cfg)?;
    let summary = json!({
        "design": design,
        "circle": {
            "radius_nm": r,
            "points": cfg.map.circle_points,
            "C1_max": best.0,
            "C1_min": c_lo,
            "C1_argmax_azimuth_deg": best.1,
            "A_Far_relative_variation": (a_hi - a_lo) / a_lo,
        },
    });
    out.write_json("coopmap_summary.json", &summary)?;
    Ok((summary, cache, Measured { c1: Some(design.c1), ..Default::default() }))
}

fn sim_params(cfg: &RunConfig, design: &CouplingSummary) -> SimParams {
    SimParams {
        kappa: design.kappa_per_s,
        gamma_op: design.gamma_op_per_s,
        n_atoms: cfg.atoms.number,
        f: cfg.atoms.f,
        dt: cfg.sim.dt,
        t_max: cfg.sim.t_max,
        mode: cfg.sim.mode,
        trajectories: cfg.sim.trajectories,
        seed: cfg.sim.seed,
        stride: cfg.sim.stride,
    }
}

fn integrator(p: &SimParams) -> Value {
    json!({
        "scheme": match p.mode { Mode::Deterministic => "midpoint", Mode::Stochastic => "euler-maruyama" },
        "dt_gamma_op": p.dt,
        "stride": p.stride,
        "trajectories": p.trajectories,
        "stream": "chacha8, stream index = trajectory index",
    })
}

fn run_squeeze(ctx: &Context, out: &mut Outputs) -> Result<Ran, CliError> {
    let cfg = &ctx.config;
    let (pair, cache) = mode_pair(cfg, &ctx.cache_dir)?;
    let design = design_summary(&pair, cfg)?;
    let params = sim_params(cfg, &design);
    let trace = simulate(&params)?;
    let conv = convergence_report(&params)?;
    let mut t = Table::new(&[
        "gamma_op_t",
        "xi2",
        "xi_inv2_dB",
        "Fx_per_NAf",
        "varFz_per_NAf_half",
        "two_body_cov",
    ]);
    let db = trace.xi_inv2_db();
    for k in 0..trace.times.len() {
        t.push(vec![
            Some(trace.times[k]),
            Some(trace.xi2[k]),
            Some(db[k]),
            Some(trace.fx_per_naf[k]),
            Some(trace.var_fz_norm[k]),
            Some(trace.two_body_cov[k]),
        ]);
    }
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    emit(out, cfg, "squeeze_trace", &t, Some(csv))?;
    let peak = trace.peak();
    let k_peak = trace.times.iter().position(|&x| x >= peak.t).unwrap_or(0);
    let spread = trace.xi_inv2_db_spread.as_ref().map(|s| s[k_peak.min(s.len() - 1)]);
    let summary = json!({
        "coupling": design,
        "C1": design.c1,
        "N_A": cfg.atoms.number,
        "peak_dB": peak.value_db,
        "peak_time_gamma_op_t": peak.t,
        "peak_time_s": peak.t / design.gamma_op_per_s,
        "peak_at_boundary": peak.at_boundary,
        "trajectory_spread_at_peak_dB": spread,
        "convergence": conv,
        "integrator": integrator(&params),
    });
    out.write_json("squeeze_summary.json", &summary)?;
    let measured = Measured {
        c1: Some(design.c1),
        peak_db: Some(peak.value_db),
        peak_time: Some(peak.t),
        ..Default::default()
    };
    Ok((summary, cache, measured))
}

fn run_scan(ctx: &Context, out: &mut Outputs) -> Result<Ran, CliError> {
    let cfg = &ctx.config;
    let (pair, cache) = mode_pair(cfg, &ctx.cache_dir)?;
    let design = design_summary(&pair, cfg)?;
    let params = sim_params(cfg, &design);
    let sp = species(cfg);
    let az = cfg.atoms.azimuth_deg;
    let c1_of = |r: f64| {
        let (x, y) = position(r, az);
        cooperativity(&pair, &sp, x, y)
    };
    let rows = scan(&params, cfg.scan.axis, &cfg.scan.values, &c1_of)?;
    let mut t = Table::new(&["axis_value", "C1", "peak_xi_inv2_dB", "peak_time_gamma_op_t"]);
    for r in &rows {
        t.push(vec![Some(r.axis_value), Some(r.c1), Some(r.peak_db), Some(r.peak_time)]);
    }
    let mut csv = Vec::new();
    write_scan_csv(&rows, &mut csv)?;
    emit(out, cfg, "scan", &t, Some(csv))?;
    let fits = scan_fits(cfg, &rows);
    let axis_unit = match cfg.scan.axis {
        ScanAxis::Radius => "nm from the guide axis",
        ScanAxis::AtomNumber => "atoms",
    };
    let summary = json!({
        "axis": cfg.scan.axis,
        "axis_unit": axis_unit,
        "rows": rows,
        "fits": fits.0,
        "integrator": integrator(&params),
    });
    out.write_json("scan_summary.json", &summary)?;
    Ok((summary, cache, fits.1))
}

/// Exponential fit of C₁ against radius and power-law fit of the linear peak
/// ξ⁻² against N·C₁.
fn scan_fits(cfg: &RunConfig, rows: &[ScanRow]) -> (Value, Measured) {
    let mut measured = Measured::default();
    let mut fits = serde_json::Map::new();
    let n_atoms = |r: &ScanRow| match cfg.scan.axis {
        ScanAxis::AtomNumber => r.axis_value,
        ScanAxis::Radius => cfg.atoms.number as f64,
    };
    let od: Vec<f64> = rows.iter().map(|r| n_atoms(r) * r.c1).collect();
    let gain: Vec<f64> = rows.iter().map(|r| 10f64.powf(r.peak_db / 10.0)).collect();
    match fit_powerlaw(&od, &gain) {
        Ok(f) => {
            measured.od_exponent = Some(f.exponent);
            fits.insert("peak_vs_od".into(), json!(f));
        }
        Err(e) => log::warn!("no power-law fit: {e}"),
    }
    if cfg.scan.axis == ScanAxis::Radius {
        let rs: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
        let c1: Vec<f64> = rows.iter().map(|r| r.c1).collect();
        match fit_exponential(&rs, &c1) {
            Ok(f) => {
                let size = cfg.waveguide.size_nm();
                measured.beta_times_size = Some(f.beta * size);
                fits.insert(
                    "c1_vs_radius".into(),
                    json!({ "fit": f, "size_nm": size, "beta_times_size": f.beta * size }),
                );
            }
            Err(e) => log::warn!("no exponential fit: {e}"),
        }
    }
    (Value::Object(fits), measured)
}
