//! Full-vector finite-difference modes on a Yee-staggered transverse grid.
//!
//! Unknowns are the transverse magnetic field: `Hx` on horizontal cell edges
//! `(i, j+½)` and `Hy` on vertical edges `(i+½, j)`. The outer boundary is a
//! perfect conductor for `H` (zero Dirichlet). Any geometry is rasterised with
//! area-weighted cell permittivities, so a cylinder can be run through the
//! same solver.
//!
//! The quasi-TE (H) and quasi-TM (V) fundamental modes live in different
//! mirror-symmetry sectors, which are separated by projection during the
//! eigen-iteration.

use super::eigen::{inverse_iteration, Csr, ShiftInvert};
use super::{check_wavelength, dispersion, Geometry, GridField, GuidedMode, ModeField, Polarization, TransverseGrid};
use crate::consts::{wavenumber, NM};
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectOptions {
    pub min_cells_per_side: usize,
    /// Compare against a solve at twice the spacing and fail if the
    /// Richardson error estimate of n_eff exceeds `convergence_tol`.
    pub convergence_check: bool,
    pub convergence_tol: f64,
    /// Relative eigen-residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub group_index_step: f64,
}

impl Default for RectOptions {
    fn default() -> Self {
        RectOptions {
            min_cells_per_side: 30,
            convergence_check: true,
            convergence_tol: 5e-3,
            tol: 1e-10,
            max_iter: 400,
            group_index_step: dispersion::DEFAULT_GROUP_INDEX_STEP,
        }
    }
}

pub(crate) struct Problem {
    n: usize,
    h: f64,
    k0: f64,
    /// Relative permittivity with a one-cell cladding pad, `(n+2)²`.
    ep: Vec<f64>,
    pub a: Csr,
}

impl Problem {
    fn nx_unknowns(&self) -> usize {
        (self.n - 1) * self.n
    }

    fn len(&self) -> usize {
        2 * self.nx_unknowns()
    }

    fn ep(&self, i: usize, j: usize) -> f64 {
        self.ep[i * (self.n + 2) + j]
    }

    fn hx_index(&self, i: isize, j: isize) -> Option<usize> {
        let n = self.n as isize;
        (1..n).contains(&i).then_some(())?;
        (0..n).contains(&j).then_some(())?;
        Some(((i - 1) * n + j) as usize)
    }

    fn hy_index(&self, i: isize, j: isize) -> Option<usize> {
        let n = self.n as isize;
        (0..n).contains(&i).then_some(())?;
        (1..n).contains(&j).then_some(())?;
        Some(self.nx_unknowns() + (i * (n - 1) + j - 1) as usize)
    }

    fn build(geom: &Geometry, wavelength_nm: f64, grid: &TransverseGrid) -> Result<Self> {
        let n = grid.cells();
        let h_nm = 2.0 * grid.half_extent_nm / n as f64;
        let x0 = -grid.half_extent_nm + 0.5 * h_nm;
        let (core2, clad2) = (geom.n_core().powi(2), geom.n_clad().powi(2));
        let mut ep = vec![clad2; (n + 2) * (n + 2)];
        // Area-weighted permittivity from SUB×SUB samples per cell, so a core
        // edge that does not fall on a cell face is still resolved.
        const SUB: usize = 8;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (x0 + i as f64 * h_nm, x0 + j as f64 * h_nm);
                let mut inside = 0;
                for a in 0..SUB {
                    for b in 0..SUB {
                        let dx = ((a as f64 + 0.5) / SUB as f64 - 0.5) * h_nm;
                        let dy = ((b as f64 + 0.5) / SUB as f64 - 0.5) * h_nm;
                        inside += geom.contains(x + dx, y + dy) as usize;
                    }
                }
                let frac = inside as f64 / (SUB * SUB) as f64;
                ep[(i + 1) * (n + 2) + j + 1] = clad2 + (core2 - clad2) * frac;
            }
        }
        let mut p = Problem { n, h: h_nm * NM, k0: wavenumber(wavelength_nm), ep, a: Csr::from_triplets(0, vec![]) };
        p.a = p.assemble();
        Ok(p)
    }

    /// Entries of `β² H = A H`.
    fn assemble(&self) -> Csr {
        let n = self.n as isize;
        let h = self.h;
        let k2 = self.k0 * self.k0;
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(self.len() * 13);
        // εy at Hx(i, j+½): cells (i-1, j), (i, j)
        let epsy = |i: isize, j: isize| 0.5 * (self.ep(i as usize, (j + 1) as usize) + self.ep((i + 1) as usize, (j + 1) as usize));
        // εx at Hy(i+½, j): cells (i, j-1), (i, j)
        let epsx = |i: isize, j: isize| 0.5 * (self.ep((i + 1) as usize, j as usize) + self.ep((i + 1) as usize, (j + 1) as usize));
        // εz at node (i, j)
        let epsz = |i: isize, j: isize| {
            let (i, j) = (i as usize, j as usize);
            0.25 * (self.ep(i, j) + self.ep(i + 1, j) + self.ep(i, j + 1) + self.ep(i + 1, j + 1))
        };
        // (∂x Hy - ∂y Hx) at node (i, j)
        let curl = |i: isize, j: isize| {
            [
                (self.hy_index(i, j), 1.0 / h),
                (self.hy_index(i - 1, j), -1.0 / h),
                (self.hx_index(i, j), -1.0 / h),
                (self.hx_index(i, j - 1), 1.0 / h),
            ]
        };
        // ∇·H at cell centre (i+½, j+½)
        let div = |i: isize, j: isize| {
            [
                (self.hx_index(i + 1, j), 1.0 / h),
                (self.hx_index(i, j), -1.0 / h),
                (self.hy_index(i, j + 1), 1.0 / h),
                (self.hy_index(i, j), -1.0 / h),
            ]
        };
        let mut push = |r: usize, terms: &[(Option<usize>, f64)], scale: f64| {
            for &(c, v) in terms {
                if let Some(c) = c {
                    t.push((r, c, v * scale));
                }
            }
        };
        for i in 1..n {
            for j in 0..n {
                let r = self.hx_index(i, j).unwrap();
                let ey = epsy(i, j);
                push(r, &[(Some(r), 1.0)], ey * k2);
                push(r, &curl(i, j + 1), -ey / (epsz(i, j + 1) * h));
                push(r, &curl(i, j), ey / (epsz(i, j) * h));
                push(r, &div(i, j), 1.0 / h);
                push(r, &div(i - 1, j), -1.0 / h);
            }
        }
        for i in 0..n {
            for j in 1..n {
                let r = self.hy_index(i, j).unwrap();
                let ex = epsx(i, j);
                push(r, &[(Some(r), 1.0)], ex * k2);
                push(r, &curl(i + 1, j), ex / (epsz(i + 1, j) * h));
                push(r, &curl(i, j), -ex / (epsz(i, j) * h));
                push(r, &div(i, j), 1.0 / h);
                push(r, &div(i, j - 1), -1.0 / h);
            }
        }
        Csr::from_triplets(self.len(), t)
    }

    /// Project onto the symmetry sector of `pol`: for H, Hy is even in x and y
    /// and Hx odd in both; for V the roles swap.
    fn project(&self, pol: Polarization, v: &mut [f64]) {
        let n = self.n as isize;
        let (sx, sy) = match pol {
            Polarization::H => (-1.0, 1.0),
            Polarization::V => (1.0, -1.0),
        };
        let src = v.to_vec();
        for i in 1..n {
            for j in 0..n {
                let k = |a, b| src[self.hx_index(a, b).unwrap()];
                let s = k(i, j) + sx * (k(n - i, j) + k(i, n - 1 - j)) + k(n - i, n - 1 - j);
                v[self.hx_index(i, j).unwrap()] = 0.25 * s;
            }
        }
        for i in 0..n {
            for j in 1..n {
                let k = |a, b| src[self.hy_index(a, b).unwrap()];
                let s = k(i, j) + sy * (k(n - 1 - i, j) + k(i, n - j)) + k(n - 1 - i, n - j);
                v[self.hy_index(i, j).unwrap()] = 0.25 * s;
            }
        }
    }

    /// Smooth start vector in the sector of `pol`.
    fn start_vector(&self, pol: Polarization, geom: &Geometry) -> Vec<f64> {
        let n = self.n as isize;
        let (wx, wy) = geom.half_size_nm();
        let (wx, wy) = (2.0 * wx * NM, 2.0 * wy * NM);
        let half = 0.5 * n as f64 * self.h;
        let bump = |x: f64, y: f64| (-(x / wx).powi(2) - (y / wy).powi(2)).exp();
        let mut v = vec![0.0; self.len()];
        for i in 0..n {
            for j in 0..n {
                if let Some(k) = self.hy_index(i, j) {
                    let (x, y) = ((i as f64 + 0.5) * self.h - half, j as f64 * self.h - half);
                    if pol == Polarization::H {
                        v[k] = bump(x, y);
                    }
                }
                if let Some(k) = self.hx_index(i, j) {
                    let (x, y) = (i as f64 * self.h - half, (j as f64 + 0.5) * self.h - half);
                    if pol == Polarization::V {
                        v[k] = bump(x, y);
                    }
                }
            }
        }
        v
    }

    fn solve_sector(
        &self,
        pol: Polarization,
        start: Vec<f64>,
        factors: &mut Vec<ShiftInvert>,
        sigma0: f64,
        opts: &RectOptions,
    ) -> Result<(f64, Vec<f64>)> {
        let project = |v: &mut [f64]| self.project(pol, v);
        // Reuse an existing factorization if one converges quickly.
        for op in factors.iter() {
            if let Ok(p) = inverse_iteration(&self.a, op, &project, start.clone(), opts.tol, 20) {
                return Ok((p.value, p.vector));
            }
        }
        let op = self.a.factor_shifted(sigma0)?;
        let rough = match inverse_iteration(&self.a, &op, &project, start, 1e-5, opts.max_iter) {
            Ok(p) => p,
            Err(e) => return Err(e),
        };
        factors.push(op);
        let op = self.a.factor_shifted(rough.value * (1.0 + 1e-7))?;
        let fine = inverse_iteration(&self.a, &op, &project, rough.vector, opts.tol, opts.max_iter)?;
        log::debug!("{pol:?} sector: β² = {:.12e}, residual {:.1e}", fine.value, fine.residual);
        factors.push(op);
        Ok((fine.value, fine.vector))
    }

    /// Electric field sampled at cell centres from an `H` eigenvector.
    fn fields(&self, beta: f64, v: &[f64]) -> GridField {
        let n = self.n;
        let h = self.h;
        let b2 = beta * beta;
        let ni = n as isize;
        let hx = |i: usize, j: usize| self.hx_index(i as isize, j as isize).map_or(0.0, |k| v[k]);
        let hy = |i: usize, j: usize| self.hy_index(i as isize, j as isize).map_or(0.0, |k| v[k]);
        // divergence at cell centres, zero-padded
        let np = n + 2;
        let mut divp = vec![0.0; np * np];
        for i in 0..n {
            for j in 0..n {
                divp[(i + 1) * np + j + 1] = (hx(i + 1, j) - hx(i, j) + hy(i, j + 1) - hy(i, j)) / h;
            }
        }
        let dp = |i: usize, j: usize| divp[i * np + j];
        let bk = beta * self.k0;
        // Ex, Dx on Hy sites: n × (n+1)
        let mut ex = vec![0.0; n * (n + 1)];
        let mut dx = vec![0.0; n * (n + 1)];
        for i in 0..n {
            for j in 0..=n {
                let e = 0.5 * (self.ep(i + 1, j) + self.ep(i + 1, j + 1));
                let val = (b2 * hy(i, j) - (dp(i + 1, j + 1) - dp(i + 1, j)) / h) / (bk * e);
                ex[i * (n + 1) + j] = val;
                dx[i * (n + 1) + j] = e * val;
            }
        }
        // Ey, Dy on Hx sites: (n+1) × n
        let mut ey = vec![0.0; (n + 1) * n];
        let mut dy = vec![0.0; (n + 1) * n];
        for i in 0..=n {
            for j in 0..n {
                let e = 0.5 * (self.ep(i, j + 1) + self.ep(i + 1, j + 1));
                let val = ((dp(i + 1, j + 1) - dp(i, j + 1)) / h - b2 * hx(i, j)) / (bk * e);
                ey[i * n + j] = val;
                dy[i * n + j] = e * val;
            }
        }
        // Ez/i at nodes: (n+1)²
        let mut ez = vec![0.0; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                let dxp = |a: isize| if (0..ni).contains(&a) { dx[a as usize * (n + 1) + j] } else { 0.0 };
                let dyp = |b: isize| if (0..ni).contains(&b) { dy[i * n + b as usize] } else { 0.0 };
                let (ii, jj) = (i as isize, j as isize);
                let d = (dxp(ii) - dxp(ii - 1)) / h + (dyp(jj) - dyp(jj - 1)) / h;
                let e = 0.25 * (self.ep(i, j) + self.ep(i + 1, j) + self.ep(i, j + 1) + self.ep(i + 1, j + 1));
                ez[i * (n + 1) + j] = d / (beta * e);
            }
        }
        let mut ux = Vec::with_capacity(n * n);
        let mut uy = Vec::with_capacity(n * n);
        let mut uz = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                ux.push(0.5 * (ex[i * (n + 1) + j] + ex[i * (n + 1) + j + 1]));
                uy.push(0.5 * (ey[i * n + j] + ey[(i + 1) * n + j]));
                let z = |a: usize, b: usize| ez[a * (n + 1) + b];
                uz.push(0.25 * (z(i, j) + z(i + 1, j) + z(i, j + 1) + z(i + 1, j + 1)));
            }
        }
        // gauge and unit norm
        let peak = (0..n * n)
            .max_by(|&a, &b| {
                let m = |k: usize| ux[k] * ux[k] + uy[k] * uy[k] + uz[k] * uz[k];
                m(a).total_cmp(&m(b))
            })
            .unwrap_or(0);
        let dominant = if ux[peak].abs() >= uy[peak].abs() { ux[peak] } else { uy[peak] };
        let norm2: f64 = (0..n * n).map(|k| ux[k] * ux[k] + uy[k] * uy[k] + uz[k] * uz[k]).sum::<f64>() * h * h;
        let scale = dominant.signum() / norm2.sqrt();
        let h_nm = h / NM;
        let x0 = -0.5 * n as f64 * h_nm + 0.5 * h_nm;
        GridField {
            nx: n,
            ny: n,
            spacing_nm: h_nm,
            x0_nm: x0,
            y0_nm: x0,
            ux: ux.into_iter().map(|x| Complex64::new(x * scale, 0.0)).collect(),
            uy: uy.into_iter().map(|x| Complex64::new(x * scale, 0.0)).collect(),
            uz: uz.into_iter().map(|x| Complex64::new(0.0, x * scale)).collect(),
        }
    }
}

fn check_resolution(geom: &Geometry, grid: &TransverseGrid, opts: &RectOptions) -> Result<()> {
    let (hx, hy) = geom.half_size_nm();
    let cells = 2.0 * hx.min(hy) / grid.spacing_nm;
    if cells + 1e-9 < opts.min_cells_per_side as f64 {
        return Err(Error::GridTooCoarse(format!(
            "{cells:.1} cells across the core, need at least {}",
            opts.min_cells_per_side
        )));
    }
    // full extent at least four core widths
    if grid.half_extent_nm < 4.0 * hx.max(hy) {
        return Err(Error::InvalidGrid(format!(
            "half extent {} nm is less than twice the core width",
            grid.half_extent_nm
        )));
    }
    Ok(())
}

/// Fundamental eigenvalue `β²` (H sector) and its eigenvector. With `guess`,
/// skips the coarse shift and factors directly near the guessed eigenvalue.
pub(crate) fn solve_beta(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    opts: &RectOptions,
    guess: Option<f64>,
) -> Result<(f64, Vec<f64>)> {
    geom.validate()?;
    check_wavelength(wavelength_nm)?;
    let p = Problem::build(geom, wavelength_nm, grid)?;
    let start = p.start_vector(Polarization::H, geom);
    let mut factors = Vec::new();
    if let Some(g) = guess {
        factors.push(p.a.factor_shifted(g * (1.0 + 1e-6))?);
    }
    let sigma0 = (geom.n_core() * p.k0).powi(2);
    let (lam, v) = p.solve_sector(Polarization::H, start, &mut factors, sigma0, opts)?;
    Ok((beta_from(lam, geom, p.k0)?, v))
}

fn beta_from(lam: f64, geom: &Geometry, k0: f64) -> Result<f64> {
    let beta = lam.max(0.0).sqrt();
    let n_eff = beta / k0;
    if !(n_eff > geom.n_clad() && n_eff < geom.n_core()) {
        return Err(Error::NoGuidedMode { v_number: n_eff });
    }
    Ok(beta)
}

/// Both polarizations on the same grid, with group index.
pub fn solve_rect_pair(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    opts: &RectOptions,
) -> Result<(GuidedMode, GuidedMode)> {
    geom.validate()?;
    check_wavelength(wavelength_nm)?;
    check_resolution(geom, grid, opts)?;
    let p = Problem::build(geom, wavelength_nm, grid)?;
    let sigma0 = (geom.n_core() * p.k0).powi(2);
    let mut factors = Vec::new();
    let (lam_h, vh) = p.solve_sector(Polarization::H, p.start_vector(Polarization::H, geom), &mut factors, sigma0, opts)?;
    let (lam_v, vv) = p.solve_sector(Polarization::V, p.start_vector(Polarization::V, geom), &mut factors, sigma0, opts)?;
    drop(factors);
    let (beta_h, beta_v) = (beta_from(lam_h, geom, p.k0)?, beta_from(lam_v, geom, p.k0)?);
    if opts.convergence_check {
        richardson_check(geom, wavelength_nm, grid, opts, beta_h, lam_h)?;
    }
    let n_g = rect_group_index(geom, wavelength_nm, grid, opts, lam_h)?;
    let mk = |pol, beta, v: &[f64]| GuidedMode {
        geometry: *geom,
        polarization: pol,
        wavelength_nm,
        beta,
        n_g,
        field: ModeField::Grid(p.fields(beta, v)),
    };
    Ok((mk(Polarization::H, beta_h, &vh), mk(Polarization::V, beta_v, &vv)))
}

/// Propagation constant of the quasi-TE mode alone (no fields, no group
/// index, no convergence check), rad/m.
pub fn rect_propagation_constant(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    opts: &RectOptions,
) -> Result<f64> {
    geom.validate()?;
    check_wavelength(wavelength_nm)?;
    check_resolution(geom, grid, opts)?;
    solve_beta(geom, wavelength_nm, grid, opts, None).map(|(b, _)| b)
}

/// One polarization of the fundamental mode.
pub fn solve_rect_mode(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    pol: Polarization,
    opts: &RectOptions,
) -> Result<GuidedMode> {
    let (h, v) = solve_rect_pair(geom, wavelength_nm, grid, opts)?;
    Ok(match pol {
        Polarization::H => h,
        Polarization::V => v,
    })
}

fn rect_group_index(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    opts: &RectOptions,
    lam: f64,
) -> Result<f64> {
    dispersion::group_index_with(
        |l| {
            // β² scales roughly as 1/λ²
            let guess = lam * (wavelength_nm / l).powi(2);
            solve_beta(geom, l, grid, opts, Some(guess)).map(|(b, _)| b)
        },
        wavelength_nm,
        opts.group_index_step,
    )
}

/// Fails with `GridTooCoarse` when `|n(h) - n(2h)| / 3` exceeds the tolerance
/// relative to n(h), the leading error term for a second-order scheme.
fn richardson_check(
    geom: &Geometry,
    wavelength_nm: f64,
    grid: &TransverseGrid,
    opts: &RectOptions,
    beta: f64,
    lam: f64,
) -> Result<()> {
    let coarse = TransverseGrid { half_extent_nm: grid.half_extent_nm, spacing_nm: 2.0 * grid.spacing_nm };
    let (beta_2h, _) = solve_beta(geom, wavelength_nm, &coarse, opts, Some(lam))?;
    let est = ((beta - beta_2h) / 3.0 / beta).abs();
    log::debug!("Richardson error estimate for n_eff: {est:.2e}");
    if est > opts.convergence_tol {
        return Err(Error::GridTooCoarse(format!(
            "estimated relative n_eff error {est:.2e} exceeds {:.1e}",
            opts.convergence_tol
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_maps_are_bijective() {
        let p = Problem::build(&Geometry::square(300.0, 2.0), 852.35, &TransverseGrid::new(600.0, 60.0).unwrap()).unwrap();
        let n = p.n as isize;
        let mut seen = vec![false; p.len()];
        for i in -1..=n {
            for j in -1..=n {
                for k in [p.hx_index(i, j), p.hy_index(i, j)].into_iter().flatten() {
                    assert!(!seen[k]);
                    seen[k] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn projection_is_idempotent() {
        let p = Problem::build(&Geometry::square(300.0, 2.0), 852.35, &TransverseGrid::new(600.0, 60.0).unwrap()).unwrap();
        let mut v: Vec<f64> = (0..p.len()).map(|k| ((k * 7919) % 101) as f64 - 50.0).collect();
        p.project(Polarization::H, &mut v);
        let once = v.clone();
        p.project(Polarization::H, &mut v);
        assert_eq!(once, v);
        p.project(Polarization::V, &mut v);
        assert!(v.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn rejects_coarse_grid() {
        let g = Geometry::square(300.0, 2.0);
        let grid = TransverseGrid::new(1200.0, 20.0).unwrap();
        assert!(matches!(
            solve_rect_pair(&g, 852.35, &grid, &RectOptions::default()),
            Err(Error::GridTooCoarse(_))
        ));
    }
}
