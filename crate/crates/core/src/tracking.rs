//! Tracking-file reader/writer and pixel to world conversion.
//!
//! A tracking file is a whitespace-separated token stream: a `P-<id>` header
//! opens a pedestrian track and every following `F X Y` triple is one
//! observation of that pedestrian, until the next header.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const TRACKING_FILE: &str = "tracking.txt";
pub const CORRECTED_TRACKING_FILE: &str = "tracking_correction.txt";

#[derive(Debug, Error)]
pub enum TrackingError {
    #[error("line {line}: expected a `P-<id>` header, found `{token}`")]
    MalformedHeader { line: usize, token: String },
    #[error("line {line}: malformed `F X Y` tuple: {reason}")]
    MalformedTuple { line: usize, reason: String },
    #[error("pedestrian id {0} appears more than once")]
    DuplicateId(u32),
    #[error("pedestrian {id} has more than one position at frame {frame}")]
    DuplicateFrameInTrack { id: u32, frame: u32 },
    #[error("dataset is already expressed in meters")]
    AlreadyMeters,
    #[error("pixels-per-meter must be a positive finite number, got {0}")]
    NonPositiveScale(f64),
    #[error("tracking file not found: {}", .0.display())]
    MissingTrackingFile(PathBuf),
    #[error("failed to read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, TrackingError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub frame: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianTrack {
    pub id: u32,
    /// Ordered by strictly increasing frame.
    pub points: Vec<TrackPoint>,
}

impl PedestrianTrack {
    pub fn first_frame(&self) -> Option<u32> {
        self.points.first().map(|p| p.frame)
    }

    pub fn last_frame(&self) -> Option<u32> {
        self.points.last().map(|p| p.frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Pixels,
    Meters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingDataset {
    pub tracks: BTreeMap<u32, PedestrianTrack>,
    pub unit: Unit,
    /// One past the largest frame index seen, 0 when empty.
    pub frame_count: u32,
    /// True when read from the perspective-corrected file.
    pub corrected: bool,
}

impl TrackingDataset {
    pub fn empty(unit: Unit) -> Self {
        Self {
            tracks: BTreeMap::new(),
            unit,
            frame_count: 0,
            corrected: false,
        }
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.tracks.keys().copied()
    }

    fn recompute_frame_count(&mut self) {
        self.frame_count = self
            .tracks
            .values()
            .filter_map(PedestrianTrack::last_frame)
            .max()
            .map_or(0, |f| f + 1);
    }
}

/// Result of parsing: the dataset plus ids of tracks dropped for being too
/// short to carry any motion information.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTracking {
    pub dataset: TrackingDataset,
    pub dropped: Vec<u32>,
}

struct Tokens<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .flat_map(|(n, line)| line.split_whitespace().map(move |t| (n + 1, t))),
        );
        Self { inner: it.peekable() }
    }
}

fn header_id(token: &str) -> Option<std::result::Result<u32, ()>> {
    token
        .strip_prefix("P-")
        .map(|rest| rest.parse::<u32>().map_err(|_| ()))
}

fn parse_frame(line: usize, token: &str) -> Result<u32> {
    token.parse::<u32>().map_err(|_| TrackingError::MalformedTuple {
        line,
        reason: format!("frame `{token}` is not a non-negative integer"),
    })
}

fn parse_coord(line: usize, token: &str) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(TrackingError::MalformedTuple {
            line,
            reason: format!("coordinate `{token}` is not a finite number"),
        }),
    }
}

/// Parse a tracking stream. Coordinates are taken to be in pixels.
pub fn parse_tracking(text: &str) -> Result<ParsedTracking> {
    let mut tokens = Tokens::new(text);
    let mut raw: Vec<(u32, Vec<TrackPoint>)> = Vec::new();

    while let Some((line, token)) = tokens.inner.next() {
        match header_id(token) {
            Some(Ok(id)) => raw.push((id, Vec::new())),
            Some(Err(())) => {
                return Err(TrackingError::MalformedHeader {
                    line,
                    token: token.to_string(),
                })
            }
            None => {
                let Some((_, points)) = raw.last_mut() else {
                    return Err(TrackingError::MalformedHeader {
                        line,
                        token: token.to_string(),
                    });
                };
                let frame = parse_frame(line, token)?;
                let mut coords = [0.0; 2];
                for c in &mut coords {
                    match tokens.inner.peek() {
                        Some(&(l, t)) if header_id(t).is_none() => {
                            *c = parse_coord(l, t)?;
                            tokens.inner.next();
                        }
                        _ => {
                            return Err(TrackingError::MalformedTuple {
                                line,
                                reason: "expected three values `F X Y`".to_string(),
                            })
                        }
                    }
                }
                points.push(TrackPoint {
                    frame,
                    x: coords[0],
                    y: coords[1],
                });
            }
        }
    }

    let mut tracks = BTreeMap::new();
    let mut dropped = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (id, mut points) in raw {
        if !seen.insert(id) {
            return Err(TrackingError::DuplicateId(id));
        }
        points.sort_by_key(|p| p.frame);
        if let Some(w) = points.windows(2).find(|w| w[0].frame == w[1].frame) {
            return Err(TrackingError::DuplicateFrameInTrack {
                id,
                frame: w[0].frame,
            });
        }
        if points.len() < 2 {
            log::warn!("dropping pedestrian P-{id}: {} point(s), need at least 2", points.len());
            dropped.push(id);
            continue;
        }
        tracks.insert(id, PedestrianTrack { id, points });
    }

    let mut dataset = TrackingDataset {
        tracks,
        unit: Unit::Pixels,
        frame_count: 0,
        corrected: false,
    };
    dataset.recompute_frame_count();
    Ok(ParsedTracking { dataset, dropped })
}

/// Serialize in the same format `parse_tracking` reads, tracks by ascending id.
pub fn write_tracking(dataset: &TrackingDataset) -> String {
    let mut out = String::new();
    for track in dataset.tracks.values() {
        let _ = writeln!(out, "P-{}", track.id);
        for p in &track.points {
            let _ = writeln!(out, "{} {:.6} {:.6}", p.frame, p.x, p.y);
        }
    }
    out
}

pub fn to_world_coords(dataset: &TrackingDataset, pixels_per_meter: f64) -> Result<TrackingDataset> {
    if dataset.unit == Unit::Meters {
        return Err(TrackingError::AlreadyMeters);
    }
    if !(pixels_per_meter.is_finite() && pixels_per_meter > 0.0) {
        return Err(TrackingError::NonPositiveScale(pixels_per_meter));
    }
    let tracks = dataset
        .tracks
        .iter()
        .map(|(&id, t)| {
            let points = t
                .points
                .iter()
                .map(|p| TrackPoint {
                    frame: p.frame,
                    x: p.x / pixels_per_meter,
                    y: p.y / pixels_per_meter,
                })
                .collect();
            (id, PedestrianTrack { id, points })
        })
        .collect();
    Ok(TrackingDataset {
        tracks,
        unit: Unit::Meters,
        frame_count: dataset.frame_count,
        corrected: dataset.corrected,
    })
}

/// `000000.jpg`-style frame image name.
pub fn is_frame_image_name(name: &str) -> bool {
    name.len() == 10 && name.ends_with(".jpg") && name[..6].bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputWarning {
    /// Tracking references more frames than there are frame images.
    FrameCountMismatch { tracking_frames: u32, images: usize },
    DroppedShortTracks(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct ResolvedInput {
    /// In meters.
    pub dataset: TrackingDataset,
    /// The dataset as read, before unit conversion.
    pub pixel_dataset: TrackingDataset,
    pub frame_images: usize,
    pub warnings: Vec<InputWarning>,
}

/// Locate and load the tracking file of an input directory, then convert it
/// to meters.
pub fn resolve_input(input_dir: &Path, use_correction: bool, pixels_per_meter: f64) -> Result<ResolvedInput> {
    let name = if use_correction {
        CORRECTED_TRACKING_FILE
    } else {
        TRACKING_FILE
    };
    let path = input_dir.join(name);
    if !path.is_file() {
        return Err(TrackingError::MissingTrackingFile(path));
    }
    let text = fs::read_to_string(&path).map_err(|source| TrackingError::Io {
        path: path.clone(),
        source,
    })?;
    let ParsedTracking { mut dataset, dropped } = parse_tracking(&text)?;
    dataset.corrected = use_correction;

    let frame_images = fs::read_dir(input_dir)
        .map_err(|source| TrackingError::Io {
            path: input_dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_str().is_some_and(is_frame_image_name))
        .count();

    let mut warnings = Vec::new();
    if !dropped.is_empty() {
        warnings.push(InputWarning::DroppedShortTracks(dropped));
    }
    if frame_images > 0 && dataset.frame_count as usize > frame_images {
        log::warn!(
            "tracking references {} frames but only {frame_images} frame images exist",
            dataset.frame_count
        );
        warnings.push(InputWarning::FrameCountMismatch {
            tracking_frames: dataset.frame_count,
            images: frame_images,
        });
    }

    let world = to_world_coords(&dataset, pixels_per_meter)?;
    Ok(ResolvedInput {
        dataset: world,
        pixel_dataset: dataset,
        frame_images,
        warnings,
    })
}
