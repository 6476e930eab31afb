//! Fundamental guided modes of a cylindrical nanofiber and a rectangular
//! dielectric waveguide.
//!
//! Fields are returned in SI units (m⁻¹), normalised so that
//! `∫∫ |u|² dA = 1`. The global phase makes the transverse components real
//! with the dominant one positive at the field maximum, so `u_z` is purely
//! imaginary. Positions are given in nanometres.

mod cache;
mod cylinder;
mod dispersion;
mod eigen;
mod rect;

pub use cache::{load_mode, save_mode, CACHE_VERSION, NORMALIZATION_TAG};
pub use cylinder::{characteristic_residual, solve_cylinder_dispersion, CylinderMode};
pub use dispersion::{group_index, group_index_with, DEFAULT_GROUP_INDEX_STEP};
pub use rect::{rect_propagation_constant, solve_rect_mode, solve_rect_pair, RectOptions};

use crate::consts::{angular_frequency, wavenumber, NM};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Cross-section of the guide. Lengths in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Cylinder { radius_nm: f64, n_core: f64, n_clad: f64 },
    Rectangle { width_nm: f64, height_nm: f64, n_core: f64, n_clad: f64 },
}

impl Geometry {
    pub fn nanofiber(radius_nm: f64, n_core: f64) -> Self {
        Geometry::Cylinder { radius_nm, n_core, n_clad: 1.0 }
    }

    pub fn square(width_nm: f64, n_core: f64) -> Self {
        Geometry::Rectangle { width_nm, height_nm: width_nm, n_core, n_clad: 1.0 }
    }

    pub fn n_core(&self) -> f64 {
        match *self {
            Geometry::Cylinder { n_core, .. } | Geometry::Rectangle { n_core, .. } => n_core,
        }
    }

    pub fn n_clad(&self) -> f64 {
        match *self {
            Geometry::Cylinder { n_clad, .. } | Geometry::Rectangle { n_clad, .. } => n_clad,
        }
    }

    /// Half-widths of the core along x and y, nm.
    pub fn half_size_nm(&self) -> (f64, f64) {
        match *self {
            Geometry::Cylinder { radius_nm, .. } => (radius_nm, radius_nm),
            Geometry::Rectangle { width_nm, height_nm, .. } => (0.5 * width_nm, 0.5 * height_nm),
        }
    }

    /// Distance from the core surface to a point on the +y axis at height `y_nm`.
    pub fn y_from_surface(&self, surface_distance_nm: f64) -> f64 {
        self.half_size_nm().1 + surface_distance_nm
    }

    /// True if the point (nm) lies strictly inside the core.
    pub fn contains(&self, x_nm: f64, y_nm: f64) -> bool {
        match *self {
            Geometry::Cylinder { radius_nm, .. } => x_nm.hypot(y_nm) < radius_nm,
            Geometry::Rectangle { width_nm, height_nm, .. } => {
                x_nm.abs() < 0.5 * width_nm && y_nm.abs() < 0.5 * height_nm
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n_core, n_clad) = (self.n_core(), self.n_clad());
        let lengths_ok = match *self {
            Geometry::Cylinder { radius_nm, .. } => radius_nm > 0.0 && radius_nm.is_finite(),
            Geometry::Rectangle { width_nm, height_nm, .. } => {
                width_nm > 0.0 && height_nm > 0.0 && width_nm.is_finite() && height_nm.is_finite()
            }
        };
        if !lengths_ok {
            return Err(Error::InvalidGeometry(format!("non-positive dimension in {self:?}")));
        }
        if !(n_clad >= 1.0 && n_core > n_clad) {
            return Err(Error::InvalidGeometry(format!(
                "need n_core > n_clad >= 1, got n_core = {n_core}, n_clad = {n_clad}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    /// Quasi-linear along x.
    H,
    /// Quasi-linear along y.
    V,
}

/// Square-cell grid centred on the guide axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseGrid {
    pub half_extent_nm: f64,
    pub spacing_nm: f64,
}

impl TransverseGrid {
    pub fn new(half_extent_nm: f64, spacing_nm: f64) -> Result<Self> {
        let grid = TransverseGrid { half_extent_nm, spacing_nm };
        if !(spacing_nm > 0.0 && half_extent_nm > spacing_nm) {
            return Err(Error::InvalidGrid(format!(
                "spacing {spacing_nm} nm, half extent {half_extent_nm} nm"
            )));
        }
        Ok(grid)
    }

    /// Half-extent 4w (4a for a fiber) and spacing `min(λ/60, core/30)`.
    pub fn default_for(geom: &Geometry, wavelength_nm: f64) -> Self {
        let (hx, hy) = geom.half_size_nm();
        let core = 2.0 * hx.min(hy);
        let half_extent_nm = match geom {
            Geometry::Cylinder { radius_nm, .. } => 4.0 * radius_nm,
            Geometry::Rectangle { .. } => 8.0 * hx.max(hy),
        };
        let target = (wavelength_nm / 60.0).min(core / 30.0);
        let cells = (half_extent_nm / target).ceil() as usize;
        TransverseGrid { half_extent_nm, spacing_nm: half_extent_nm / cells as f64 }
    }

    /// Cells per axis; always even so the axis falls on a cell face.
    pub fn cells(&self) -> usize {
        2 * (self.half_extent_nm / self.spacing_nm).round() as usize
    }

    pub fn points_per_axis(&self) -> usize {
        self.cells()
    }
}

/// Field sampled at cell centres of a uniform grid. Row-major with x the slow
/// index: sample `(i, j)` sits at `(x0 + i·d, y0 + j·d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub spacing_nm: f64,
    pub x0_nm: f64,
    pub y0_nm: f64,
    pub ux: Vec<Complex64>,
    pub uy: Vec<Complex64>,
    pub uz: Vec<Complex64>,
}

impl GridField {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Bilinear interpolation; zero outside the sampled region.
    pub fn sample(&self, x_nm: f64, y_nm: f64) -> [Complex64; 3] {
        let fx = (x_nm - self.x0_nm) / self.spacing_nm;
        let fy = (y_nm - self.y0_nm) / self.spacing_nm;
        let zero = [Complex64::new(0.0, 0.0); 3];
        if !(fx >= 0.0 && fy >= 0.0) {
            return zero;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        if i + 1 >= self.nx || j + 1 >= self.ny {
            return zero;
        }
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let w = [
            (self.idx(i, j), (1.0 - tx) * (1.0 - ty)),
            (self.idx(i + 1, j), tx * (1.0 - ty)),
            (self.idx(i, j + 1), (1.0 - tx) * ty),
            (self.idx(i + 1, j + 1), tx * ty),
        ];
        let mut out = zero;
        for (k, comp) in [&self.ux, &self.uy, &self.uz].into_iter().enumerate() {
            out[k] = w.iter().map(|&(n, c)| comp[n] * c).sum();
        }
        out
    }

    /// Midpoint-rule `∫∫ |u|² dA` in SI units.
    pub fn norm_squared(&self) -> f64 {
        let cell = (self.spacing_nm * NM).powi(2);
        let s: f64 = (0..self.ux.len())
            .map(|n| self.ux[n].norm_sqr() + self.uy[n].norm_sqr() + self.uz[n].norm_sqr())
            .sum();
        s * cell
    }

    /// Midpoint-rule `∫∫ a* · b dA`.
    pub fn overlap(&self, other: &GridField) -> Complex64 {
        let cell = (self.spacing_nm * NM).powi(2);
        let s: Complex64 = (0..self.ux.len())
            .map(|n| {
                self.ux[n].conj() * other.ux[n]
                    + self.uy[n].conj() * other.uy[n]
                    + self.uz[n].conj() * other.uz[n]
            })
            .sum();
        s * cell
    }

    /// The field rotated by +90° about z: `u'(x, y) = R u(y, -x)`.
    /// Requires a square grid symmetric about the origin.
    pub fn rotated_quarter(&self) -> GridField {
        let n = self.nx;
        debug_assert_eq!(self.nx, self.ny);
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                // (x_i, y_j) -> source (y_j, -x_i) = (x_j, y_{n-1-i})
                let src = self.idx(j, n - 1 - i);
                let dst = self.idx(i, j);
                out.ux[dst] = -self.uy[src];
                out.uy[dst] = self.ux[src];
                out.uz[dst] = self.uz[src];
            }
        }
        out
    }
}

/// How a mode's field is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeField {
    Analytic(CylinderMode),
    Grid(GridField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidedMode {
    pub geometry: Geometry,
    pub polarization: Polarization,
    pub wavelength_nm: f64,
    /// Propagation constant, rad/m.
    pub beta: f64,
    pub n_g: f64,
    pub field: ModeField,
}

impl GuidedMode {
    pub fn omega(&self) -> f64 {
        angular_frequency(self.wavelength_nm)
    }

    pub fn n_eff(&self) -> f64 {
        self.beta / wavenumber(self.wavelength_nm)
    }

    /// `(u_x, u_y, u_z)` in m⁻¹ at a transverse position in nm.
    pub fn field_at(&self, x_nm: f64, y_nm: f64) -> [Complex64; 3] {
        match &self.field {
            ModeField::Analytic(m) => m.field(self.polarization, x_nm, y_nm),
            ModeField::Grid(g) => g.sample(x_nm, y_nm),
        }
    }

    /// `∫∫ |u|² dA`, evaluated with the quadrature native to the representation.
    pub fn norm_squared(&self) -> f64 {
        match &self.field {
            ModeField::Analytic(m) => m.norm_squared(),
            ModeField::Grid(g) => g.norm_squared(),
        }
    }
}

/// Solve both polarizations of the fundamental mode. The cylinder is
/// analytic; the rectangle uses the finite-difference solver on `grid` (or
/// the default grid).
pub fn solve_mode_pair(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: Option<TransverseGrid>,
) -> Result<(GuidedMode, GuidedMode)> {
    geom.validate()?;
    match geom {
        Geometry::Cylinder { .. } => {
            let h = CylinderMode::solve(geom, wavelength_nm)?;
            let n_g = group_index(geom, wavelength_nm, None)?;
            let mk = |p| GuidedMode {
                geometry: *geom,
                polarization: p,
                wavelength_nm,
                beta: h.beta,
                n_g,
                field: ModeField::Analytic(h.clone()),
            };
            Ok((mk(Polarization::H), mk(Polarization::V)))
        }
        Geometry::Rectangle { .. } => {
            let grid = grid.unwrap_or_else(|| TransverseGrid::default_for(geom, wavelength_nm));
            solve_rect_pair(geom, wavelength_nm, &grid, &RectOptions::default())
        }
    }
}

pub(crate) fn check_wavelength(wavelength_nm: f64) -> Result<()> {
    if wavelength_nm > 0.0 && wavelength_nm.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "wavelength (nm)", value: wavelength_nm })
    }
}
