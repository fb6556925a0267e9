//! Proxemic and social features: pair dissimilarity, collectivity, neighbor
//! counts, interpersonal distance and the socialization classifier.

mod dataset;
mod net;
pub mod scg;

use thiserror::Error;

use crate::geom::{angle_diff_rad, Point};

pub use dataset::{synthesize_socialization_dataset, SocialLabel, SocialSample};
pub use net::{
    initial_params, train_socialization_net, NetFormatError, ScgParams, SocializationNet, TrainingObjective, TrainingReport,
    HIDDEN, INPUTS, OUTPUTS, PARAMS,
};

/// Maximum collectivity of a pair, reached at zero dissimilarity.
pub const GAMMA: f64 = 1.0;
/// Decay constant of the collectivity term.
pub const BETA: f64 = 0.3;
/// Radius of Hall's social space, meters.
pub const SOCIAL_SPACE: f64 = 3.6;
/// Cap on the speed part of the dissimilarity, meters per frame.
pub const MAX_SPEED_DIFF: f64 = 1.2;
/// Stand-in mean distance for a pedestrian alone in the frame, meters.
pub const D_FAR: f64 = 10.0;
pub const SPEED_WEIGHT: f64 = 1.0;
pub const ORIENTATION_WEIGHT: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum SocialError {
    #[error("pedestrian {0} has no defined heading in this frame")]
    UndefinedHeading(u32),
    #[error("training needs at least {min} samples, got {got}")]
    InsufficientSamples { min: usize, got: usize },
    #[error("training diverged: loss became {0}")]
    DivergedTraining(f64),
    #[error("sample count must be at least 1")]
    EmptyDataset,
}

/// What the social features need to know about one pedestrian in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedestrianState {
    pub id: u32,
    pub position: Point,
    /// Meters per frame.
    pub speed: f64,
    /// Radians; `None` when no motion direction is known.
    pub heading: Option<f64>,
}

/// Every pedestrian present in one frame, ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSnapshot {
    pub frame: u32,
    pub states: Vec<PedestrianState>,
}

impl FrameSnapshot {
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.states.binary_search_by_key(&id, |s| s.id).ok()
    }

    fn others(&self, i: usize) -> impl Iterator<Item = &PedestrianState> {
        self.states
            .iter()
            .enumerate()
            .filter(move |(j, _)| *j != i)
            .map(|(_, s)| s)
    }
}

/// Dissimilarity of motion between two pedestrians: capped speed difference
/// (m/frame) plus heading difference (radians, wrapped to [0, pi]).
pub fn pair_dissimilarity(a: &PedestrianState, b: &PedestrianState) -> Result<f64, SocialError> {
    let ha = a.heading.ok_or(SocialError::UndefinedHeading(a.id))?;
    let hb = b.heading.ok_or(SocialError::UndefinedHeading(b.id))?;
    let ds = (a.speed - b.speed).abs().min(MAX_SPEED_DIFF);
    Ok(ds * SPEED_WEIGHT + angle_diff_rad(ha, hb) * ORIENTATION_WEIGHT)
}

pub fn pair_term(dissimilarity: f64) -> f64 {
    GAMMA * (-BETA * dissimilarity * dissimilarity).exp()
}

/// Mean pair term of pedestrian `i` against every co-present pedestrian with
/// a defined heading; 0 when there is nobody to compare against.
pub fn collectivity_at(snapshot: &FrameSnapshot, i: usize) -> f64 {
    let me = &snapshot.states[i];
    let terms: Vec<f64> = snapshot
        .others(i)
        .filter_map(|other| pair_dissimilarity(me, other).ok())
        .map(pair_term)
        .collect();
    if terms.is_empty() {
        0.0
    } else {
        terms.iter().sum::<f64>() / terms.len() as f64
    }
}

/// Number of other pedestrians within the social space (boundary inclusive).
pub fn neighbors_in_social_space(snapshot: &FrameSnapshot, i: usize) -> usize {
    let p = snapshot.states[i].position;
    snapshot
        .others(i)
        .filter(|o| o.position.distance(p) <= SOCIAL_SPACE)
        .count()
}

/// Mean Euclidean distance to the others, `None` when alone.
pub fn mean_distance_to_others(snapshot: &FrameSnapshot, i: usize) -> Option<f64> {
    let p = snapshot.states[i].position;
    let n = snapshot.states.len() - 1;
    (n > 0).then(|| snapshot.others(i).map(|o| o.position.distance(p)).sum::<f64>() / n as f64)
}

/// Social measurements of one pedestrian in one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSocial {
    pub collectivity: f64,
    /// [`D_FAR`] when alone.
    pub mean_distance: f64,
    pub neighbors: usize,
    pub socialization: f64,
    pub isolation: f64,
}

pub fn frame_social(net: &SocializationNet, snapshot: &FrameSnapshot, i: usize) -> FrameSocial {
    let collectivity = collectivity_at(snapshot, i);
    let mean_distance = mean_distance_to_others(snapshot, i).unwrap_or(D_FAR);
    let neighbors = neighbors_in_social_space(snapshot, i);
    let socialization = net.socialization_level(collectivity, mean_distance, neighbors as f64);
    FrameSocial {
        collectivity,
        mean_distance,
        neighbors,
        socialization,
        isolation: 1.0 - socialization,
    }
}

/// Per-pedestrian averages of the per-frame social measurements.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SocialFeatures {
    pub collectivity: f64,
    pub socialization: f64,
    pub isolation: f64,
    pub mean_distance: f64,
    pub mean_neighbors: f64,
}

impl SocialFeatures {
    pub fn from_frames(frames: &[FrameSocial]) -> Self {
        if frames.is_empty() {
            return Self {
                isolation: 1.0,
                mean_distance: D_FAR,
                ..Self::default()
            };
        }
        let n = frames.len() as f64;
        let avg = |f: fn(&FrameSocial) -> f64| frames.iter().map(f).sum::<f64>() / n;
        let socialization = avg(|f| f.socialization);
        Self {
            collectivity: avg(|f| f.collectivity),
            socialization,
            isolation: 1.0 - socialization,
            mean_distance: avg(|f| f.mean_distance),
            mean_neighbors: avg(|f| f.neighbors as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn state(id: u32, x: f64, y: f64, speed: f64, heading: f64) -> PedestrianState {
        PedestrianState {
            id,
            position: Point::new(x, y),
            speed,
            heading: Some(heading),
        }
    }

    fn snap(states: Vec<PedestrianState>) -> FrameSnapshot {
        FrameSnapshot { frame: 0, states }
    }

    #[test]
    fn dissimilarity_examples() {
        let a = state(0, 0.0, 0.0, 0.05, 1.0);
        assert_eq!(pair_dissimilarity(&a, &a).unwrap(), 0.0);

        let b = state(1, 0.0, 0.0, 0.0, 0.0);
        let c = state(2, 0.0, 0.0, 1.2, PI);
        assert_abs_diff_eq!(pair_dissimilarity(&b, &c).unwrap(), 4.34159, epsilon = 1e-5);

        let d = state(3, 0.0, 0.0, 0.5, FRAC_PI_2);
        assert_abs_diff_eq!(pair_dissimilarity(&b, &d).unwrap(), 2.0708, epsilon = 1e-4);

        // speed part saturates at the documented maximum
        let e = state(4, 0.0, 0.0, 5.0, PI);
        assert_abs_diff_eq!(pair_dissimilarity(&b, &e).unwrap(), 1.2 + PI, epsilon = 1e-12);

        let undefined = PedestrianState { heading: None, ..b };
        assert_eq!(pair_dissimilarity(&undefined, &c), Err(SocialError::UndefinedHeading(1)));
    }

    #[test]
    fn collectivity_examples() {
        let s = snap(vec![state(0, 0.0, 0.0, 0.1, 0.0), state(1, 1.0, 0.0, 0.1, 0.0)]);
        assert_eq!(collectivity_at(&s, 0), 1.0);

        let s = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0), state(1, 1.0, 0.0, 1.2, PI)]);
        let expected = (-0.3f64 * 4.34159 * 4.34159).exp();
        assert_abs_diff_eq!(collectivity_at(&s, 0), expected, epsilon = 1e-5);
        assert_abs_diff_eq!(pair_term(4.34), (-5.65068f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(pair_term(4.34), 0.00352, epsilon = 1e-5);

        let alone = snap(vec![state(0, 0.0, 0.0, 0.1, 0.0)]);
        assert_eq!(collectivity_at(&alone, 0), 0.0);
    }

    #[test]
    fn neighbor_counts() {
        let s = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0), state(1, 2.0, 0.0, 0.0, 0.0)]);
        assert_eq!(neighbors_in_social_space(&s, 0), 1);
        assert_eq!(neighbors_in_social_space(&s, 1), 1);

        let s = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0), state(1, 3.6, 0.0, 0.0, 0.0)]);
        assert_eq!(neighbors_in_social_space(&s, 0), 1);

        let alone = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(neighbors_in_social_space(&alone, 0), 0);
    }

    #[test]
    fn mean_distances() {
        let s = snap(vec![
            state(0, 0.0, 0.0, 0.0, 0.0),
            state(1, 2.0, 0.0, 0.0, 0.0),
            state(2, 0.0, 4.0, 0.0, 0.0),
        ]);
        assert_eq!(mean_distance_to_others(&s, 0), Some(3.0));
        let s = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0), state(1, 1.5, 0.0, 0.0, 0.0)]);
        assert_eq!(mean_distance_to_others(&s, 0), Some(1.5));
        let alone = snap(vec![state(0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(mean_distance_to_others(&alone, 0), None);
    }

    proptest! {
        #[test]
        fn pair_term_decreases(a in 0.0..4.5f64, b in 0.0..4.5f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(pair_term(lo) >= pair_term(hi));
            prop_assert!((0.0..=1.0).contains(&pair_term(a)));
        }

        #[test]
        fn collectivity_in_unit_interval(
            peds in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.0..2.0f64, 0.0..6.3f64), 1..30)
        ) {
            let states: Vec<_> = peds
                .iter()
                .enumerate()
                .map(|(k, &(x, y, s, h))| state(k as u32, x, y, s, h))
                .collect();
            let s = snap(states);
            for i in 0..s.states.len() {
                let c = collectivity_at(&s, i);
                prop_assert!((0.0..=1.0).contains(&c));
            }
        }
    }
}
