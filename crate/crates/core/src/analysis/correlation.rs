//! Correlation of adjacent pixels.
//!
//! Uses population moments (divisor N):
//! `r = cov(x, y) / (sqrt(D(x)) * sqrt(D(y)))`.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::rng::RngState;

/// Pair count used by default, matching the published experiment.
pub const DEFAULT_PAIRS: usize = 1200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    #[default]
    Horizontal,
    Vertical,
}

impl FromStr for Adjacency {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" => Ok(Adjacency::Horizontal),
            "vertical" => Ok(Adjacency::Vertical),
            other => Err(format!("unknown direction {other:?} (expected horizontal or vertical)")),
        }
    }
}

/// Grey levels `(x, y)` of adjacent pixel pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationSample {
    pub pairs: Vec<(u8, u8)>,
}

/// Draws `n` pairs uniformly, with replacement, over every valid first
/// pixel position.
pub fn sample_adjacent_pairs(img: &GrayImage, n: usize, seed: u64, dir: Adjacency) -> Result<CorrelationSample> {
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let (w, h) = (img.width(), img.height());
    let (dx, dy) = match dir {
        Adjacency::Horizontal => (1, 0),
        Adjacency::Vertical => (0, 1),
    };
    if w < 1 + dx || h < 1 + dy {
        return Err(Error::SizeMismatch(format!("{w}x{h} image has no {dir:?} neighbours")));
    }
    let mut rng = RngState::new(seed);
    let pairs = (0..n)
        .map(|_| {
            let x = rng.below(w - dx);
            let y = rng.below(h - dy);
            (img.get(x, y), img.get(x + dx, y + dy))
        })
        .collect();
    Ok(CorrelationSample { pairs })
}

pub fn correlation_coefficient(s: &CorrelationSample) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = s.pairs.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    pearson(&pairs)
}

pub fn pearson(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: pairs.len() });
    }
    let n = pairs.len() as f64;
    let ex = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let ey = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let dx = pairs.iter().map(|p| (p.0 - ex).powi(2)).sum::<f64>() / n;
    let dy = pairs.iter().map(|p| (p.1 - ey).powi(2)).sum::<f64>() / n;
    let cov = pairs.iter().map(|p| (p.0 - ex) * (p.1 - ey)).sum::<f64>() / n;
    if dx == 0.0 {
        return Err(Error::DegenerateVariance("x"));
    }
    if dy == 0.0 {
        return Err(Error::DegenerateVariance("y"));
    }
    Ok((cov / (dx.sqrt() * dy.sqrt())).clamp(-1.0, 1.0))
}
