//! Per-frame motion of each pedestrian and the averaged feature vector.

use thiserror::Error;

use crate::geom::{angle_diff_deg, bearing_deg, Point};
use crate::social::SocialFeatures;
use crate::tracking::PedestrianTrack;

/// Displacements shorter than this (meters) carry no heading information.
pub const EPS_MOVE: f64 = 0.01;
/// Lower bound on angular variation (degrees) wherever it is divided by.
pub const EPS_ALPHA: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("track {id} has {len} point(s), need at least 2")]
    TrackTooShort { id: u32, len: usize },
    #[error("no kinematic samples to summarize")]
    EmptySamples,
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFps(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub frame: u32,
    pub position: Point,
    /// Meters per frame.
    pub speed: f64,
    /// Meters per second.
    pub speed_mps: f64,
    /// Degrees in [0, 360) against (1, 0).
    pub heading: f64,
    /// Heading change against the previous sample, degrees in [0, 180].
    pub angular_variation: f64,
}

/// Averaged per-pedestrian features plus auxiliary statistics used by the
/// personality item equations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub pedestrian_id: u32,
    pub mean_position: Point,
    /// Meters per frame.
    pub mean_speed: f64,
    /// Degrees.
    pub mean_angular_variation: f64,
    pub isolation: f64,
    pub socialization: f64,
    pub collectivity: f64,
    pub path_length: f64,
    pub net_displacement: f64,
    pub speed_std: f64,
    /// Circular standard deviation of heading, degrees, capped at 180.
    pub heading_std: f64,
    pub mean_distance: f64,
    pub mean_neighbors: f64,
}

/// One sample per observed point. The sample at the first point has no
/// displacement of its own and reuses speed and heading of the first step.
///
/// A step shorter than [`EPS_MOVE`] keeps the previous heading and has zero
/// angular variation. A track that never moves gets heading 0.
pub fn per_frame_kinematics(track: &PedestrianTrack, fps: f64) -> Result<Vec<KinematicSample>, KinematicsError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(KinematicsError::InvalidFps(fps));
    }
    let pts = &track.points;
    if pts.len() < 2 {
        return Err(KinematicsError::TrackTooShort {
            id: track.id,
            len: pts.len(),
        });
    }

    let steps: Vec<(f64, Option<f64>)> = pts
        .windows(2)
        .map(|w| {
            let d = Point::new(w[1].x - w[0].x, w[1].y - w[0].y);
            let dist = d.norm();
            let gap = f64::from(w[1].frame - w[0].frame);
            let heading = (dist >= EPS_MOVE).then(|| bearing_deg(d));
            (dist / gap, heading)
        })
        .collect();

    let initial_heading = steps.iter().find_map(|s| s.1).unwrap_or(0.0);
    let mut samples = Vec::with_capacity(pts.len());
    let mut prev_heading = initial_heading;
    for (k, (speed, heading)) in steps.iter().enumerate() {
        let p = pts[k + 1];
        let (h, alpha) = match heading {
            Some(h) if k > 0 => (*h, angle_diff_deg(*h, prev_heading)),
            Some(h) => (*h, 0.0),
            None => (prev_heading, 0.0),
        };
        prev_heading = h;
        samples.push(KinematicSample {
            frame: p.frame,
            position: Point::new(p.x, p.y),
            speed: *speed,
            speed_mps: speed * fps,
            heading: h,
            angular_variation: alpha,
        });
    }

    let first = samples[0];
    samples.insert(
        0,
        KinematicSample {
            frame: pts[0].frame,
            position: Point::new(pts[0].x, pts[0].y),
            angular_variation: 0.0,
            ..first
        },
    );
    Ok(samples)
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        0.0
    } else {
        values.sum::<f64>() / n as f64
    }
}

/// Average the per-frame samples of one pedestrian.
///
/// Position is averaged over every sample, speed over real steps (the
/// back-filled first sample is skipped) and angular variation over samples
/// where a heading change is defined, i.e. from the second step on.
pub fn summarize_track(
    pedestrian_id: u32,
    samples: &[KinematicSample],
    social: &SocialFeatures,
) -> Result<FeatureVector, KinematicsError> {
    if samples.is_empty() {
        return Err(KinematicsError::EmptySamples);
    }
    let n = samples.len() as f64;
    let mean_position = Point::new(
        samples.iter().map(|s| s.position.x).sum::<f64>() / n,
        samples.iter().map(|s| s.position.y).sum::<f64>() / n,
    );

    let steps = samples.get(1..).unwrap_or_default();
    let mean_speed = mean(steps.iter().map(|s| s.speed));
    let mean_angular_variation = mean(samples.get(2..).unwrap_or_default().iter().map(|s| s.angular_variation));
    let speed_std = mean(steps.iter().map(|s| (s.speed - mean_speed).powi(2))).sqrt();

    let heading_std = if steps.is_empty() {
        0.0
    } else {
        let c = mean(steps.iter().map(|s| s.heading.to_radians().cos()));
        let s = mean(steps.iter().map(|s| s.heading.to_radians().sin()));
        let r = c.hypot(s).clamp(f64::MIN_POSITIVE, 1.0);
        (-2.0 * r.ln()).sqrt().to_degrees().min(180.0)
    };

    let path_length: f64 = samples.windows(2).map(|w| w[0].position.distance(w[1].position)).sum();
    let net_displacement = samples[0]
        .position
        .distance(samples[samples.len() - 1].position)
        .min(path_length);

    Ok(FeatureVector {
        pedestrian_id,
        mean_position,
        mean_speed,
        mean_angular_variation,
        isolation: social.isolation,
        socialization: social.socialization,
        collectivity: social.collectivity,
        path_length,
        net_displacement,
        speed_std,
        heading_std,
        mean_distance: social.mean_distance,
        mean_neighbors: social.mean_neighbors,
    })
}
