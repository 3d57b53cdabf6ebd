//! Chi-square goodness of fit of a grey-level histogram against the
//! uniform distribution over 256 levels.

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::image::{Histogram, LEVELS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub chi_square: f64,
    pub p_value: f64,
    pub max_bin_percent: f64,
    pub min_bin_percent: f64,
}

/// Degrees of freedom of the test.
pub const DOF: f64 = (LEVELS - 1) as f64;

pub fn histogram_uniformity(h: &Histogram) -> Result<UniformityReport> {
    if h.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let expected = h.total as f64 / LEVELS as f64;
    let chi_square: f64 = h.bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
    let percents = (0..LEVELS).map(|l| h.percent(l));
    Ok(UniformityReport {
        chi_square,
        p_value: chi_square_sf(chi_square, DOF),
        max_bin_percent: percents.clone().fold(f64::NEG_INFINITY, f64::max),
        min_bin_percent: percents.fold(f64::INFINITY, f64::min),
    })
}

/// Upper-tail probability of a chi-square statistic, `Q(dof/2, x/2)`.
pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(dof / 2.0, x / 2.0)
    }
}
