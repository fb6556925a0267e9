//! Kinematics of every pedestrian, indexed both by track and by frame.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::kinematics::{per_frame_kinematics, KinematicSample, KinematicsError};
use crate::social::{FrameSnapshot, PedestrianState};
use crate::tracking::{TrackingDataset, Unit};

/// The pedestrians present in one frame, by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame {
    pub frame: u32,
    pub pedestrians: Vec<(u32, KinematicSample)>,
}

impl SceneFrame {
    pub fn snapshot(&self) -> FrameSnapshot {
        FrameSnapshot {
            frame: self.frame,
            states: self
                .pedestrians
                .iter()
                .map(|(id, s)| PedestrianState {
                    id: *id,
                    position: s.position,
                    speed: s.speed,
                    heading: Some(s.heading.to_radians()),
                })
                .collect(),
        }
    }

    pub fn get(&self, id: u32) -> Option<&KinematicSample> {
        self.pedestrians
            .binary_search_by_key(&id, |(i, _)| *i)
            .ok()
            .map(|k| &self.pedestrians[k].1)
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub fps: f64,
    pub frame_count: u32,
    pub tracks: BTreeMap<u32, Vec<KinematicSample>>,
    /// Only frames with at least one pedestrian, ascending.
    pub frames: Vec<SceneFrame>,
}

impl Scene {
    /// The dataset is expected in meters.
    pub fn build(dataset: &TrackingDataset, fps: f64) -> Result<Self, KinematicsError> {
        debug_assert_eq!(dataset.unit, Unit::Meters);
        let per_track: Vec<(u32, Vec<KinematicSample>)> = dataset
            .tracks
            .par_iter()
            .map(|(&id, t)| per_frame_kinematics(t, fps).map(|s| (id, s)))
            .collect::<Result<_, _>>()?;
        let tracks: BTreeMap<_, _> = per_track.into_iter().collect();

        let mut by_frame: BTreeMap<u32, Vec<(u32, KinematicSample)>> = BTreeMap::new();
        for (&id, samples) in &tracks {
            for s in samples {
                by_frame.entry(s.frame).or_default().push((id, *s));
            }
        }
        let frames = by_frame
            .into_iter()
            .map(|(frame, pedestrians)| SceneFrame { frame, pedestrians })
            .collect();
        Ok(Self {
            fps,
            frame_count: dataset.frame_count,
            tracks,
            frames,
        })
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.tracks.keys().copied()
    }

    pub fn pedestrian_count(&self) -> usize {
        self.tracks.len()
    }
}
