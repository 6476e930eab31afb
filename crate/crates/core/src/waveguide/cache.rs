//! Binary mode cache.
//!
//! Layout (little-endian): magic `NQMODE\0\0`, format version `u32`, geometry
//! record (`u8` kind, four `f64`), polarization `u8`, λ, β, n_eff, n_g (`f64`),
//! representation `u8` (0 analytic, 1 grid), `nx`, `ny` (`u64`), spacing, x0,
//! y0 (`f64`, nm), 8-byte normalization tag, then a SHA-256 of everything
//! else in the file. The payload follows: `nx·ny` row-major `f64` each for
//! Re u_x, Im u_x, Re u_y, Im u_y, Re u_z, Im u_z. Analytic modes carry no
//! payload and are rebuilt from β on load.

use super::{CylinderMode, Geometry, GridField, GuidedMode, ModeField, Polarization};
use crate::{Error, Result};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::path::Path;

const MAGIC: &[u8; 8] = b"NQMODE\0\0";
pub const CACHE_VERSION: u32 = 1;
pub const NORMALIZATION_TAG: &str = "L2UNIT";
const HEADER_LEN: usize = 8 + 4 + 33 + 1 + 32 + 1 + 16 + 24 + 8;
const CHECKSUM_LEN: usize = 32;

fn encode_header(mode: &GuidedMode, out: &mut Vec<u8>) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    let (kind, dims, n_core, n_clad) = match mode.geometry {
        Geometry::Cylinder { radius_nm, n_core, n_clad } => (0u8, [radius_nm, 0.0], n_core, n_clad),
        Geometry::Rectangle { width_nm, height_nm, n_core, n_clad } => (1u8, [width_nm, height_nm], n_core, n_clad),
    };
    out.push(kind);
    for v in [dims[0], dims[1], n_core, n_clad] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(match mode.polarization {
        Polarization::H => 0,
        Polarization::V => 1,
    });
    for v in [mode.wavelength_nm, mode.beta, mode.n_eff(), mode.n_g] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let (repr, nx, ny, d, x0, y0) = match &mode.field {
        ModeField::Analytic(_) => (0u8, 0u64, 0u64, 0.0, 0.0, 0.0),
        ModeField::Grid(g) => (1u8, g.nx as u64, g.ny as u64, g.spacing_nm, g.x0_nm, g.y0_nm),
    };
    out.push(repr);
    out.extend_from_slice(&nx.to_le_bytes());
    out.extend_from_slice(&ny.to_le_bytes());
    for v in [d, x0, y0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut tag = [0u8; 8];
    tag[..NORMALIZATION_TAG.len()].copy_from_slice(NORMALIZATION_TAG.as_bytes());
    out.extend_from_slice(&tag);
}

fn encode_payload(mode: &GuidedMode) -> Vec<u8> {
    let mut out = Vec::new();
    if let ModeField::Grid(g) = &mode.field {
        for comp in [&g.ux, &g.uy, &g.uz] {
            for part in [|c: &Complex64| c.re, |c: &Complex64| c.im] {
                for c in comp.iter() {
                    out.extend_from_slice(&part(c).to_le_bytes());
                }
            }
        }
    }
    out
}

/// Serialise a mode; the file is written to a sibling temporary and renamed.
pub fn save_mode(mode: &GuidedMode, path: &Path) -> Result<()> {
    let mut header = Vec::with_capacity(HEADER_LEN);
    encode_header(mode, &mut header);
    debug_assert_eq!(header.len(), HEADER_LEN);
    let payload = encode_payload(mode);
    let mut hasher = Sha256::new();
    hasher.update(&header);
    hasher.update(&payload);
    let digest = hasher.finalize();
    let mut bytes = header;
    bytes.extend_from_slice(digest.as_slice());
    bytes.extend_from_slice(&payload);
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> &[u8] {
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        s
    }
    fn u8(&mut self) -> u8 {
        self.take(1)[0]
    }
    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take(8).try_into().unwrap())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take(8).try_into().unwrap())
    }
}

/// Load a cached mode. With `expected`, the stored geometry must match exactly.
pub fn load_mode(path: &Path, expected: Option<&Geometry>) -> Result<GuidedMode> {
    let bytes = std::fs::read(path)?;
    let format = |reason: &str| Error::CacheFormat { path: path.to_path_buf(), reason: reason.into() };
    if bytes.len() < HEADER_LEN + CHECKSUM_LEN || &bytes[..8] != MAGIC {
        return Err(format("not a mode cache"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(Error::CacheVersion { path: path.to_path_buf(), found: version, expected: CACHE_VERSION });
    }
    let (header, rest) = bytes.split_at(HEADER_LEN);
    let (stored, payload) = rest.split_at(CHECKSUM_LEN);
    let mut hasher = Sha256::new();
    hasher.update(header);
    hasher.update(payload);
    if hasher.finalize().as_slice() != stored {
        return Err(Error::CacheChecksum(path.to_path_buf()));
    }
    let mut r = Reader { buf: header, pos: 12 };
    let kind = r.u8();
    let (d0, d1, n_core, n_clad) = (r.f64(), r.f64(), r.f64(), r.f64());
    let geometry = match kind {
        0 => Geometry::Cylinder { radius_nm: d0, n_core, n_clad },
        1 => Geometry::Rectangle { width_nm: d0, height_nm: d1, n_core, n_clad },
        _ => return Err(format("unknown geometry kind")),
    };
    if let Some(exp) = expected {
        if *exp != geometry {
            return Err(Error::GeometryMismatch {
                expected: format!("{exp:?}"),
                found: format!("{geometry:?}"),
            });
        }
    }
    let polarization = match r.u8() {
        0 => Polarization::H,
        1 => Polarization::V,
        _ => return Err(format("unknown polarization")),
    };
    let (wavelength_nm, beta, _n_eff, n_g) = (r.f64(), r.f64(), r.f64(), r.f64());
    let repr = r.u8();
    let (nx, ny) = (r.u64() as usize, r.u64() as usize);
    let (spacing_nm, x0_nm, y0_nm) = (r.f64(), r.f64(), r.f64());
    let tag = r.take(8);
    if &tag[..NORMALIZATION_TAG.len()] != NORMALIZATION_TAG.as_bytes() {
        return Err(format("unknown normalization tag"));
    }
    let field = match repr {
        0 => ModeField::Analytic(CylinderMode::from_beta(&geometry, wavelength_nm, beta)?),
        1 => {
            let count = nx.checked_mul(ny).ok_or_else(|| format("grid size overflow"))?;
            if payload.len() != 6 * 8 * count {
                return Err(format("payload length does not match grid"));
            }
            let arr = |k: usize| -> Vec<f64> {
                payload[k * 8 * count..(k + 1) * 8 * count]
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect()
            };
            let cplx = |k: usize| -> Vec<Complex64> {
                arr(2 * k).into_iter().zip(arr(2 * k + 1)).map(|(re, im)| Complex64::new(re, im)).collect()
            };
            ModeField::Grid(GridField { nx, ny, spacing_nm, x0_nm, y0_nm, ux: cplx(0), uy: cplx(1), uz: cplx(2) })
        }
        _ => return Err(format("unknown representation")),
    };
    Ok(GuidedMode { geometry, polarization, wavelength_nm, beta, n_g, field })
}
