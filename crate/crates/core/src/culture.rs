//! Video-level Hofstede dimensions from group statistics.

use thiserror::Error;

use crate::grouping::{orientation_score, speed_score, GroupSet};
use crate::kinematics::FeatureVector;
use crate::social::SOCIAL_SPACE;

/// Weight of group cohesion in MAS.
pub const SIGMA1: f64 = 0.5;
/// Weight of group speed in IND.
pub const RHO1: f64 = 0.5;
/// Value used for PDI and cohesion when the video has no groups.
pub const NEUTRAL_FALLBACK: f64 = 50.0;

#[derive(Debug, Error, PartialEq)]
pub enum CultureError {
    #[error("{name} = {value} lies outside [0, 100]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("at least one pedestrian is required")]
    NoPedestrians,
}

fn check(name: &'static str, value: f64) -> Result<f64, CultureError> {
    if (0.0..=100.0).contains(&value) {
        Ok(value)
    } else {
        Err(CultureError::OutOfRange { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HofstedeProfile {
    pub idv: f64,
    pub col: f64,
    pub pdi: f64,
    pub lto: f64,
    pub sto: f64,
    pub mas: f64,
    pub ind: f64,
    /// Neutral fallbacks were used because no group was found.
    pub group_fallback: bool,
}

impl HofstedeProfile {
    pub fn named_values(&self) -> [(&'static str, f64); 7] {
        [
            ("IDV", self.idv),
            ("COL", self.col),
            ("PDI", self.pdi),
            ("LTO", self.lto),
            ("STO", self.sto),
            ("MAS", self.mas),
            ("IND", self.ind),
        ]
    }
}

/// Percentages of grouped (COL) and lonely (IDV) pedestrians.
pub fn collectivism_individualism(grouped: usize, total: usize) -> Result<(f64, f64), CultureError> {
    if total == 0 {
        return Err(CultureError::NoPedestrians);
    }
    let col = 100.0 * grouped.min(total) as f64 / total as f64;
    Ok((col, 100.0 - col))
}

/// Mean group distance as a share of the social space; `None` means no groups.
pub fn power_distance(mean_group_distance: Option<f64>) -> f64 {
    match mean_group_distance {
        Some(d) => 100.0 * (d.max(0.0) / SOCIAL_SPACE).min(1.0),
        None => NEUTRAL_FALLBACK,
    }
}

/// `(LTO, STO)` from the orientation score.
pub fn long_term_orientation(orientation: f64) -> Result<(f64, f64), CultureError> {
    let o = check("O", orientation)?;
    let lto = if o >= 50.0 { o } else { 100.0 - o };
    Ok((lto, 100.0 - lto))
}

pub fn masculinity(cohesion: f64, lto: f64) -> Result<f64, CultureError> {
    Ok(SIGMA1 * check("GC", cohesion)? + (1.0 - SIGMA1) * check("LTO", lto)?)
}

pub fn indulgence(speed: f64, col: f64) -> Result<f64, CultureError> {
    Ok(RHO1 * check("S", speed)? + (1.0 - RHO1) * check("COL", col)?)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// All dimensions for one video. Without groups, PDI and cohesion fall back
/// to [`NEUTRAL_FALLBACK`] and the orientation and speed scores are taken
/// over every pedestrian instead of over groups.
pub fn hofstede_profile(groups: &GroupSet, features: &[FeatureVector], fps: f64) -> Result<HofstedeProfile, CultureError> {
    let total = features.len();
    let (col, idv) = collectivism_individualism(groups.grouped_ids.len(), total)?;
    let metrics = || groups.groups.iter().map(|g| &g.metrics);

    let group_fallback = groups.groups.is_empty();
    let pdi = power_distance(mean(metrics().map(|m| m.mean_distance)));
    let cohesion = mean(metrics().map(|m| m.cohesion)).unwrap_or(NEUTRAL_FALLBACK);
    let (orientation, speed) = if group_fallback {
        (
            mean(features.iter().map(|v| orientation_score(v.mean_angular_variation))).unwrap_or(NEUTRAL_FALLBACK),
            mean(features.iter().map(|v| speed_score(v.mean_speed * fps))).unwrap_or(NEUTRAL_FALLBACK),
        )
    } else {
        (
            mean(metrics().map(|m| m.orientation_score)).unwrap_or(NEUTRAL_FALLBACK),
            mean(metrics().map(|m| m.speed_score)).unwrap_or(NEUTRAL_FALLBACK),
        )
    };
    let (lto, sto) = long_term_orientation(orientation.clamp(0.0, 100.0))?;
    Ok(HofstedeProfile {
        idv,
        col,
        pdi,
        lto,
        sto,
        mas: masculinity(cohesion.clamp(0.0, 100.0), lto)?,
        ind: indulgence(speed.clamp(0.0, 100.0), col)?,
        group_fallback,
    })
}
