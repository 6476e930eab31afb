//! Regression constants for the built-in presets, checked by `--check`.
//! Values come from `crates/core/examples/pin_constants.rs`.

use crate::config::{preset, Format, MapSection, OutputSection, RunConfig};
use crate::error::{CheckFailure, CliError};
use crate::run::{Command, Measured};

const TOLERANCE: f64 = 1e-6;

struct Pin {
    preset: &'static str,
    values: &'static [(&'static str, f64)],
}

const PINS: &[Pin] = &[
    Pin {
        preset: "nanofiber",
        values: &[
            ("n_eff", 1.1031040276),
            ("n_g", 1.4392095704),
            ("C1", 0.006953836581058737),
            ("peak_dB", 6.602773863892325),
            ("peak_time_gamma_op_t", 0.24229862679511235),
        ],
    },
    Pin {
        preset: "square",
        values: &[
            ("n_eff", 1.3330922381),
            ("n_g", 2.3304232646),
            ("C1", 0.017324184779543575),
            ("peak_dB", 8.920521057361649),
            ("peak_time_gamma_op_t", 0.1843517644915502),
        ],
    },
    Pin {
        preset: "radius-scan-nanofiber",
        values: &[("beta_times_size", 2.1528338579901107), ("od_exponent", 0.5835123733056611)],
    },
    Pin {
        preset: "radius-scan-square",
        values: &[("beta_times_size", 4.8844063050203514), ("od_exponent", 0.5738912970448702)],
    },
];

/// Drops settings that cannot change the pinned quantities.
fn physics(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.output = OutputSection { directory: String::new(), formats: vec![Format::Csv] };
    c.map = MapSection { half_width_nm: 0.0, step_nm: 0.0, circle_points: 0 };
    c.sim.seed = 0;
    c.probe.detuning_ghz = c.probe.detuning_ghz.signum();
    c.probe.power_nw = 1.0;
    c
}

fn measured_value(m: &Measured, name: &str) -> Option<f64> {
    match name {
        "n_eff" => m.n_eff,
        "n_g" => m.n_g,
        "C1" => m.c1,
        "peak_dB" => m.peak_db,
        "peak_time_gamma_op_t" => m.peak_time,
        "beta_times_size" => m.beta_times_size,
        "od_exponent" => m.od_exponent,
        _ => None,
    }
}

pub fn check(cmd: Command, cfg: &RunConfig, measured: &Measured) -> Result<Vec<CheckFailure>, CliError> {
    let target = physics(cfg);
    let pin = PINS
        .iter()
        .find(|p| preset(p.preset).map(|c| physics(&c) == target).unwrap_or(false))
        .ok_or_else(|| no_pins(cmd, "this configuration"))?;
    let mut compared = 0;
    let mut failures = Vec::new();
    for &(name, pinned) in pin.values {
        let Some(value) = measured_value(measured, name) else { continue };
        compared += 1;
        if !(((value - pinned) / pinned).abs() <= TOLERANCE) {
            failures.push(CheckFailure { quantity: name.to_string(), pinned, value, tolerance: TOLERANCE });
        }
    }
    if compared == 0 {
        return Err(no_pins(cmd, pin.preset));
    }
    Ok(failures)
}

fn no_pins(cmd: Command, what: &str) -> CliError {
    let names: Vec<&str> = PINS.iter().map(|p| p.preset).collect();
    CliError::Config(crate::config::ConfigError {
        line: None,
        key: None,
        message: format!(
            "--check: no pinned constants for `{}` with {what} (pinned presets: {})",
            cmd.name(),
            names.join(", ")
        ),
        suggestion: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatch_is_reported() {
        let cfg = preset("nanofiber").unwrap();
        let good = Measured { c1: Some(0.006953836581058737), ..Default::default() };
        assert!(check(Command::Squeeze, &cfg, &good).unwrap().is_empty());
        let bad = Measured { c1: Some(0.007), ..Default::default() };
        let f = check(Command::Squeeze, &cfg, &bad).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].quantity, "C1");
    }

    #[test]
    fn unpinned_configs_are_config_errors() {
        let mut cfg = preset("nanofiber").unwrap();
        cfg.atoms.number = 901;
        let m = Measured { c1: Some(1.0), ..Default::default() };
        assert!(matches!(check(Command::Squeeze, &cfg, &m), Err(CliError::Config(_))));
        let cfg = preset("square").unwrap();
        assert!(matches!(check(Command::Modes, &cfg, &Measured::default()), Err(CliError::Config(_))));
    }

    #[test]
    fn output_settings_do_not_matter() {
        let mut cfg = preset("square").unwrap();
        cfg.output.directory = "elsewhere".into();
        cfg.sim.seed = 11;
        cfg.probe.power_nw = 3.0;
        let m = Measured { n_eff: Some(1.3330922381), ..Default::default() };
        assert!(check(Command::Modes, &cfg, &m).unwrap().is_empty());
    }
}
