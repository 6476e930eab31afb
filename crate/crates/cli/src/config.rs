//! Run configuration.
//!
//! The file format is line-oriented:
//!
//! ```text
//! # comment
//! [section]
//! key = value          # trailing comments are allowed
//! ```
//!
//! Keys must belong to the section they appear in and may appear once. Values
//! are numbers, bare words or comma-separated lists. Anything omitted takes the
//! default for the chosen waveguide, so an empty file describes the nanofiber
//! design point. [`RunConfig::to_text`] writes a fully resolved file that
//! parses back to the same configuration.

use nanoqnd_core::moments::{Mode, ScanAxis};
use nanoqnd_core::waveguide::{Geometry, TransverseGrid};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{message}", location(*.line, .key.as_deref()))]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
    /// Closest valid name for an unknown key or section.
    pub suggestion: Option<String>,
}

fn location(line: Option<usize>, key: Option<&str>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!("line {l}, key `{k}`: "),
        (Some(l), None) => format!("line {l}: "),
        (None, Some(k)) => format!("key `{k}`: "),
        (None, None) => String::new(),
    }
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, key: None, message: message.into(), suggestion: None }
    }

    fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    fn key(mut self, key: &str) -> Self {
        self.key = Some(key.to_string());
        self
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("waveguide", &["kind", "radius_nm", "width_nm", "height_nm", "n_core", "n_clad"]),
    ("probe", &["wavelength_nm", "detuning_GHz", "power_nW"]),
    ("atoms", &["species", "f", "number", "radial_distance_nm", "azimuth_deg"]),
    ("sim", &["dt", "t_max", "mode", "trajectories", "seed", "stride"]),
    ("grid", &["half_extent_nm", "spacing_nm"]),
    ("map", &["half_width_nm", "step_nm", "circle_points"]),
    ("scan", &["axis", "values", "from", "to", "points"]),
    ("output", &["directory", "formats"]),
];

fn nearest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<String> {
    candidates
        .into_iter()
        .map(|c| (strsim::levenshtein(&word.to_lowercase(), &c.to_lowercase()), c))
        .min()
        .filter(|(d, c)| *d <= c.len().max(3) / 2 + 1)
        .map(|(_, c)| c.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveguideKind {
    Nanofiber,
    Rectangle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveguideSection {
    pub kind: WaveguideKind,
    /// Fiber radius; unused for rectangles.
    pub radius_nm: f64,
    pub width_nm: f64,
    pub height_nm: f64,
    pub n_core: f64,
    pub n_clad: f64,
}

impl WaveguideSection {
    pub fn geometry(&self) -> Geometry {
        match self.kind {
            WaveguideKind::Nanofiber => {
                Geometry::Cylinder { radius_nm: self.radius_nm, n_core: self.n_core, n_clad: self.n_clad }
            }
            WaveguideKind::Rectangle => Geometry::Rectangle {
                width_nm: self.width_nm,
                height_nm: self.height_nm,
                n_core: self.n_core,
                n_clad: self.n_clad,
            },
        }
    }

    /// Length used to express radial decay constants: the radius of a fiber,
    /// the width of a rectangle.
    pub fn size_nm(&self) -> f64 {
        match self.kind {
            WaveguideKind::Nanofiber => self.radius_nm,
            WaveguideKind::Rectangle => self.width_nm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSection {
    pub wavelength_nm: f64,
    #[serde(rename = "detuning_GHz")]
    pub detuning_ghz: f64,
    #[serde(rename = "power_nW")]
    pub power_nw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomsSection {
    pub species: String,
    pub f: f64,
    pub number: u64,
    /// Distance from the guide axis.
    pub radial_distance_nm: f64,
    pub azimuth_deg: f64,
}

impl AtomsSection {
    pub fn position_nm(&self) -> (f64, f64) {
        position(self.radial_distance_nm, self.azimuth_deg)
    }
}

pub fn position(r_nm: f64, azimuth_deg: f64) -> (f64, f64) {
    let phi = azimuth_deg.to_radians();
    // exact on the axes, so y-axis atoms sit at x = 0
    let (s, c) = match azimuth_deg.rem_euclid(360.0) {
        a if a == 0.0 => (0.0, 1.0),
        a if a == 90.0 => (1.0, 0.0),
        a if a == 180.0 => (0.0, -1.0),
        a if a == 270.0 => (-1.0, 0.0),
        _ => phi.sin_cos(),
    };
    (r_nm * c, r_nm * s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSection {
    pub dt: f64,
    pub t_max: f64,
    pub mode: Mode,
    pub trajectories: usize,
    pub seed: u64,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSection {
    pub half_extent_nm: f64,
    pub spacing_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapSection {
    pub half_width_nm: f64,
    pub step_nm: f64,
    pub circle_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSection {
    pub axis: ScanAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub directory: String,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub waveguide: WaveguideSection,
    pub probe: ProbeSection,
    pub atoms: AtomsSection,
    pub sim: SimSection,
    pub grid: GridSection,
    pub map: MapSection,
    pub scan: ScanSection,
    pub output: OutputSection,
}

struct Entry {
    value: String,
    line: usize,
}

/// Raw entries keyed by (section, key).
struct Entries(HashMap<(String, String), Entry>);

impl Entries {
    fn lex(text: &str) -> Result<Self, ConfigError> {
        let mut map = HashMap::new();
        let mut section: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new("unterminated section header").at(line))?
                    .trim();
                let Some((known, _)) = SCHEMA.iter().find(|(s, _)| *s == name) else {
                    let mut e = ConfigError::new(format!("unknown section [{name}]")).at(line);
                    e.suggestion = nearest(name, SCHEMA.iter().map(|(s, _)| *s));
                    return Err(e);
                };
                section = Some(known);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("expected `key = value`, found `{content}`")).at(line))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.ok_or_else(|| ConfigError::new("key outside of any section").at(line).key(key))?;
            let keys = SCHEMA.iter().find(|(s, _)| *s == sec).unwrap().1;
            if !keys.contains(&key) {
                let mut e = ConfigError::new(format!("unknown key in [{sec}]")).at(line).key(key);
                e.suggestion = nearest(key, keys.iter().copied());
                if let Some(s) = &e.suggestion {
                    e.message.push_str(&format!("; did you mean `{s}`?"));
                }
                return Err(e);
            }
            if value.is_empty() {
                return Err(ConfigError::new("missing value").at(line).key(key));
            }
            let slot = (sec.to_string(), key.to_string());
            if let Some(prev) = map.get(&slot) {
                let prev: &Entry = prev;
                return Err(ConfigError::new(format!("duplicate key (first set on line {})", prev.line))
                    .at(line)
                    .key(key));
            }
            map.insert(slot, Entry { value: value.to_string(), line });
        }
        Ok(Entries(map))
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.0.get(&(section.to_string(), key.to_string()))
    }

    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let mut e = ConfigError::new(message).key(key);
        e.line = self.get(section, key).map(|e| e.line);
        e
    }

    fn float(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.err(section, key, format!("`{}` is not a finite number", e.value))),
        }
    }

    fn opt_float(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(section, key).map(|_| self.float(section, key, 0.0)).transpose()
    }

    fn uint(&self, section: &str, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<u64>()
                .map_err(|_| self.err(section, key, format!("`{}` is not a non-negative integer", e.value))),
        }
    }

    fn word<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).map(|e| e.value.as_str()).unwrap_or(default)
    }

    fn choice<T: Copy>(&self, section: &str, key: &str, default: T, options: &[(&str, T)]) -> Result<T, ConfigError> {
        let Some(e) = self.get(section, key) else { return Ok(default) };
        options.iter().find(|(n, _)| *n == e.value).map(|(_, v)| *v).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            let mut err = self.err(section, key, format!("`{}` is not one of {}", e.value, names.join(", ")));
            err.suggestion = nearest(&e.value, names);
            err
        })
    }

    fn list(&self, section: &str, key: &str) -> Option<Vec<&str>> {
        self.get(section, key).map(|e| e.value.split(',').map(str::trim).collect())
    }
}

/// Range check: `ok` must hold for the value of `key`.
fn require(ok: bool, entries: &Entries, section: &str, key: &str, what: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(entries.err(section, key, format!("out of range: {what}")))
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<RunConfig, ConfigError> {
    let e = Entries::lex(text)?;

    // waveguide
    let kind = e.choice(
        "waveguide",
        "kind",
        WaveguideKind::Nanofiber,
        &[("nanofiber", WaveguideKind::Nanofiber), ("rectangle", WaveguideKind::Rectangle)],
    )?;
    let misplaced: &[&str] = match kind {
        WaveguideKind::Nanofiber => &["width_nm", "height_nm"],
        WaveguideKind::Rectangle => &["radius_nm"],
    };
    for k in misplaced {
        if e.get("waveguide", k).is_some() {
            return Err(e.err("waveguide", k, format!("does not apply to kind = {}", e.word("waveguide", "kind", ""))));
        }
    }
    let radius_nm = e.float("waveguide", "radius_nm", 225.0)?;
    let width_nm = e.float("waveguide", "width_nm", 300.0)?;
    let height_nm = e.float("waveguide", "height_nm", width_nm)?;
    let default_core = if kind == WaveguideKind::Nanofiber { 1.4469 } else { 2.0 };
    let n_core = e.float("waveguide", "n_core", default_core)?;
    let n_clad = e.float("waveguide", "n_clad", 1.0)?;
    require(radius_nm > 0.0, &e, "waveguide", "radius_nm", "must be positive")?;
    require(width_nm > 0.0, &e, "waveguide", "width_nm", "must be positive")?;
    require(height_nm > 0.0, &e, "waveguide", "height_nm", "must be positive")?;
    require(n_clad >= 1.0, &e, "waveguide", "n_clad", "must be at least 1")?;
    require(n_core > n_clad, &e, "waveguide", "n_core", "must exceed n_clad")?;
    let waveguide = WaveguideSection {
        kind,
        radius_nm: if kind == WaveguideKind::Nanofiber { radius_nm } else { 0.0 },
        width_nm: if kind == WaveguideKind::Rectangle { width_nm } else { 0.0 },
        height_nm: if kind == WaveguideKind::Rectangle { height_nm } else { 0.0 },
        n_core,
        n_clad,
    };
    let geom = waveguide.geometry();

    // probe
    let probe = ProbeSection {
        wavelength_nm: e.float("probe", "wavelength_nm", 852.35)?,
        detuning_ghz: e.float("probe", "detuning_GHz", -4.0)?,
        power_nw: e.float("probe", "power_nW", 1.0)?,
    };
    require(probe.wavelength_nm > 0.0, &e, "probe", "wavelength_nm", "must be positive")?;
    require(probe.detuning_ghz != 0.0, &e, "probe", "detuning_GHz", "must be nonzero")?;
    require(probe.power_nw > 0.0, &e, "probe", "power_nW", "must be positive")?;

    // atoms
    let species = e.word("atoms", "species", "cs_d2");
    if species != "cs_d2" {
        let mut err = e.err("atoms", "species", format!("unknown species `{species}` (available: cs_d2)"));
        err.suggestion = Some("cs_d2".into());
        return Err(err);
    }
    let surface_default = match kind {
        WaveguideKind::Nanofiber => radius_nm + 200.0,
        WaveguideKind::Rectangle => height_nm / 2.0 + 150.0,
    };
    let atoms = AtomsSection {
        species: species.to_string(),
        f: e.float("atoms", "f", 4.0)?,
        number: e.uint("atoms", "number", 2500)?,
        radial_distance_nm: e.float("atoms", "radial_distance_nm", surface_default)?,
        azimuth_deg: e.float("atoms", "azimuth_deg", 90.0)?,
    };
    require(atoms.f >= 2.0 && (2.0 * atoms.f).fract() == 0.0, &e, "atoms", "f", "need a half-integer f >= 2")?;
    require(atoms.number >= 2, &e, "atoms", "number", "need at least 2 atoms")?;
    let (x, y) = atoms.position_nm();
    require(
        atoms.radial_distance_nm > 0.0 && !geom.contains(x, y),
        &e,
        "atoms",
        "radial_distance_nm",
        "atoms must sit outside the core",
    )?;

    // sim
    let sim = SimSection {
        dt: e.float("sim", "dt", 1e-4)?,
        t_max: e.float("sim", "t_max", 1.0)?,
        mode: e.choice(
            "sim",
            "mode",
            Mode::Deterministic,
            &[("deterministic", Mode::Deterministic), ("stochastic", Mode::Stochastic)],
        )?,
        trajectories: e.uint("sim", "trajectories", 1)? as usize,
        seed: e.uint("sim", "seed", 0)?,
        stride: e.uint("sim", "stride", 10)? as usize,
    };
    require(sim.dt > 0.0 && sim.dt <= 1e-3, &e, "sim", "dt", "need 0 < dt <= 1e-3 (units of 1/γ_op)")?;
    require(sim.t_max > sim.dt, &e, "sim", "t_max", "must exceed dt")?;
    require(sim.trajectories >= 1, &e, "sim", "trajectories", "need at least 1")?;
    require(sim.stride >= 1, &e, "sim", "stride", "need at least 1")?;

    // grid
    let default_grid = TransverseGrid::default_for(&geom, probe.wavelength_nm);
    let grid = GridSection {
        half_extent_nm: e.float("grid", "half_extent_nm", default_grid.half_extent_nm)?,
        spacing_nm: e.float("grid", "spacing_nm", default_grid.spacing_nm)?,
    };
    require(grid.spacing_nm > 0.0, &e, "grid", "spacing_nm", "must be positive")?;
    let (hx, hy) = geom.half_size_nm();
    require(
        grid.half_extent_nm > hx.max(hy) && grid.half_extent_nm > grid.spacing_nm,
        &e,
        "grid",
        "half_extent_nm",
        "the window must contain the core",
    )?;

    // map
    let default_half_width = match kind {
        WaveguideKind::Nanofiber => 3.0 * radius_nm,
        WaveguideKind::Rectangle => 2.0 * width_nm.max(height_nm),
    };
    let map = MapSection {
        half_width_nm: e.float("map", "half_width_nm", default_half_width)?,
        step_nm: e.float("map", "step_nm", 10.0)?,
        circle_points: e.uint("map", "circle_points", 360)? as usize,
    };
    require(map.step_nm > 0.0, &e, "map", "step_nm", "must be positive")?;
    require(map.half_width_nm >= map.step_nm, &e, "map", "half_width_nm", "must be at least one step")?;
    require(
        map.half_width_nm / map.step_nm <= 2000.0,
        &e,
        "map",
        "step_nm",
        "at most 2000 steps per half width",
    )?;
    require(map.circle_points >= 8, &e, "map", "circle_points", "need at least 8")?;

    // scan
    let axis = e.choice(
        "scan",
        "axis",
        ScanAxis::Radius,
        &[("radius", ScanAxis::Radius), ("atom_number", ScanAxis::AtomNumber)],
    )?;
    let values = scan_values(&e, axis, &waveguide)?;
    for &v in &values {
        match axis {
            ScanAxis::Radius => {
                let (x, y) = position(v, atoms.azimuth_deg);
                require(v > 0.0 && !geom.contains(x, y), &e, "scan", "values", "radii must lie outside the core")?;
            }
            ScanAxis::AtomNumber => {
                require(v >= 2.0 && v.fract() == 0.0, &e, "scan", "values", "atom numbers must be integers >= 2")?;
            }
        }
    }
    let scan = ScanSection { axis, values };

    // output
    let formats = match e.list("output", "formats") {
        None => vec![Format::Csv, Format::Json],
        Some(items) => {
            let mut out = Vec::new();
            for item in items {
                let f = match item {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => {
                        let mut err = e.err("output", "formats", format!("unknown format `{other}`"));
                        err.suggestion = nearest(other, ["csv", "json"]);
                        return Err(err);
                    }
                };
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            out
        }
    };
    let output = OutputSection { directory: e.word("output", "directory", "nanoqnd-out").to_string(), formats };

    Ok(RunConfig { waveguide, probe, atoms, sim, grid, map, scan, output })
}

fn scan_values(e: &Entries, axis: ScanAxis, wg: &WaveguideSection) -> Result<Vec<f64>, ConfigError> {
    let explicit = e.list("scan", "values");
    let range = [e.opt_float("scan", "from")?, e.opt_float("scan", "to")?];
    let points = e.get("scan", "points").map(|_| e.uint("scan", "points", 0)).transpose()?;
    if explicit.is_some() && (range.iter().any(Option::is_some) || points.is_some()) {
        return Err(e.err("scan", "values", "give either `values` or `from`/`to`/`points`, not both"));
    }
    if let Some(items) = explicit {
        let mut out = Vec::new();
        for item in items {
            out.push(
                item.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| e.err("scan", "values", format!("`{item}` is not a finite number")))?,
            );
        }
        return Ok(out);
    }
    let (from, to) = match axis {
        ScanAxis::Radius => match wg.kind {
            WaveguideKind::Nanofiber => (1.4 * wg.radius_nm, 2.4 * wg.radius_nm),
            WaveguideKind::Rectangle => (0.7 * wg.width_nm, 1.2 * wg.width_nm),
        },
        ScanAxis::AtomNumber => (100.0, 2500.0),
    };
    let from = range[0].unwrap_or(from);
    let to = range[1].unwrap_or(to);
    let n = points.unwrap_or(11) as usize;
    require(n >= 2, e, "scan", "points", "need at least 2")?;
    require(to > from, e, "scan", "to", "must exceed `from`")?;
    let step = (to - from) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let v = from + step * k as f64;
            if axis == ScanAxis::AtomNumber {
                v.round()
            } else {
                v
            }
        })
        .collect())
}

impl RunConfig {
    /// Fully resolved configuration in the file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let w = &self.waveguide;
        s.push_str("[waveguide]\n");
        match w.kind {
            WaveguideKind::Nanofiber => {
                let _ = writeln!(s, "kind = nanofiber\nradius_nm = {}", w.radius_nm);
            }
            WaveguideKind::Rectangle => {
                let _ = writeln!(s, "kind = rectangle\nwidth_nm = {}\nheight_nm = {}", w.width_nm, w.height_nm);
            }
        }
        let _ = writeln!(s, "n_core = {}\nn_clad = {}", w.n_core, w.n_clad);
        let p = &self.probe;
        let _ = writeln!(
            s,
            "\n[probe]\nwavelength_nm = {}\ndetuning_GHz = {}\npower_nW = {}",
            p.wavelength_nm, p.detuning_ghz, p.power_nw
        );
        let a = &self.atoms;
        let _ = writeln!(
            s,
            "\n[atoms]\nspecies = {}\nf = {}\nnumber = {}\nradial_distance_nm = {}\nazimuth_deg = {}",
            a.species, a.f, a.number, a.radial_distance_nm, a.azimuth_deg
        );
        let m = &self.sim;
        let mode = match m.mode {
            Mode::Deterministic => "deterministic",
            Mode::Stochastic => "stochastic",
        };
        let _ = writeln!(
            s,
            "\n[sim]\ndt = {}\nt_max = {}\nmode = {mode}\ntrajectories = {}\nseed = {}\nstride = {}",
            m.dt, m.t_max, m.trajectories, m.seed, m.stride
        );
        let _ = writeln!(
            s,
            "\n[grid]\nhalf_extent_nm = {}\nspacing_nm = {}",
            self.grid.half_extent_nm, self.grid.spacing_nm
        );
        let _ = writeln!(
            s,
            "\n[map]\nhalf_width_nm = {}\nstep_nm = {}\ncircle_points = {}",
            self.map.half_width_nm, self.map.step_nm, self.map.circle_points
        );
        let axis = match self.scan.axis {
            ScanAxis::Radius => "radius",
            ScanAxis::AtomNumber => "atom_number",
        };
        let values: Vec<String> = self.scan.values.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "\n[scan]\naxis = {axis}\nvalues = {}", values.join(", "));
        let formats: Vec<&str> = self.output.formats.iter().map(|f| f.name()).collect();
        let _ = writeln!(
            s,
            "\n[output]\ndirectory = {}\nformats = {}",
            self.output.directory,
            formats.join(", ")
        );
        s
    }
}

/// Built-in configurations.
pub const PRESETS: &[(&str, &str)] = &[
    ("nanofiber", include_str!("../presets/nanofiber.conf")),
    ("square", include_str!("../presets/square.conf")),
    ("radius-scan-nanofiber", include_str!("../presets/radius-scan-nanofiber.conf")),
    ("radius-scan-square", include_str!("../presets/radius-scan-square.conf")),
    ("atom-number-scan", include_str!("../presets/atom-number-scan.conf")),
];

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    match PRESETS.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => parse_str(text),
        None => {
            let mut e = ConfigError::new(format!("unknown preset `{name}`"));
            e.suggestion = nearest(name, PRESETS.iter().map(|(n, _)| *n));
            Err(e)
        }
    }
}
