//! CAST-128 and a modified-round-function variant, plus the tools used to
//! compare them: ECB image encryption, avalanche statistics, encryption
//! quality, key sensitivity, histogram uniformity, adjacent-pixel
//! correlation and round-function timing.

pub mod analysis;
pub mod bench;
pub mod cast;
pub mod error;
pub mod image;
pub mod modes;
pub mod report;
pub mod rng;

pub use cast::{Block64, Cast128, MasterKey, RoundKeys, Variant};
pub use error::{Error, Result};
pub use image::{GrayImage, Histogram};
pub use modes::EcbConfig;
