//! Normalization constants of the series and integral representations of
//! the fields, with the defining identities kept exact by construction.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::{Error, Result};

fn check_hurst_open_unit(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0 && hurst.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Hurst index must lie in (0, 1), got {hurst}"
        )));
    }
    Ok(())
}

/// c_H = π / (4 H Γ(2H) sin(Hπ)) = ∫_0^∞ (1 − cos t) t^{−1−2H} dt,
/// the one-dimensional cosine-moment normalizer. Defined for H ∈ (0, 1).
pub fn c_h(hurst: f64) -> Result<f64> {
    check_hurst_open_unit(hurst)?;
    Ok(std::f64::consts::PI
        / (4.0 * hurst * gamma(2.0 * hurst) * (hurst * std::f64::consts::PI).sin()))
}

/// The white-noise amplitude a_{H,d}, fixed by a² c_H (2π)^{−d/2} = 1/2 so
/// that the moving-average representation has unit variance coefficient:
/// a = √((2π)^{d/2} / (2 c_H)).
pub fn a_hd(hurst: f64, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let c = c_h(hurst)?;
    Ok(((2.0 * std::f64::consts::PI).powf(dim as f64 / 2.0) / (2.0 * c)).sqrt())
}

/// b_{H,d} = 2^{−H} Γ((d/2 − H)/2) / Γ((d/2 + H)/2), the radial Fourier
/// constant of the isotropic kernel. Has a pole at H = d/2, so it exists
/// only for H < d/2 (always true for d ≥ 2, excludes H ≥ 1/2 for d = 1).
pub fn b_hd(hurst: f64, dim: usize) -> Result<Option<f64>> {
    check_hurst_open_unit(hurst)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let half_d = dim as f64 / 2.0;
    if hurst >= half_d {
        return Ok(None);
    }
    Ok(Some(
        2.0f64.powf(-hurst) * gamma((half_d - hurst) / 2.0) / gamma((half_d + hurst) / 2.0),
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationConstants {
    pub hurst: f64,
    pub dim: usize,
    pub c_h: f64,
    pub a_hd: f64,
    /// None when H ≥ d/2 (pole of the gamma factor).
    pub b_hd: Option<f64>,
}

pub fn representation_constants(hurst: f64, dim: usize) -> Result<RepresentationConstants> {
    Ok(RepresentationConstants {
        hurst,
        dim,
        c_h: c_h(hurst)?,
        a_hd: a_hd(hurst, dim)?,
        b_hd: b_hd(hurst, dim)?,
    })
}
