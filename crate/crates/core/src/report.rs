//! Report files: the per-frame all-features table, per-dimension text
//! summaries, chart series and the overlay table.
//!
//! Every file is written to a temporary sibling and renamed into place, so an
//! interrupted run never leaves a truncated output behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::format::sig6;
use crate::pipeline::{AnalysisConfig, Dimension, Error, OutputKind, VideoSummary};

pub const ALL_FEATURES_HEADER: &str = "frame pedId x y speed speedMps heading angvar collectivity socialization \
isolation neighborCount groupId ocean_O ocean_C ocean_E ocean_A ocean_N emo_fear emo_happiness emo_sadness emo_anger";

pub fn all_features_file_name(video: &str) -> String {
    format!("{video}_all_features_frame.txt")
}

/// Text summary file of a dimension.
pub fn summary_file_name(video: &str, dim: Dimension) -> String {
    let stem = match dim {
        Dimension::Physical => "physical",
        Dimension::Social => "social",
        Dimension::Personal => "personality",
        Dimension::Cultural => "cultural",
    };
    format!("{video}_{stem}.txt")
}

/// Chart series files of a dimension.
pub fn chart_file_names(video: &str, dim: Dimension) -> Vec<String> {
    let stems: &[&str] = match dim {
        Dimension::Physical => &["speed_chart"],
        Dimension::Social => &["collectivity_chart"],
        Dimension::Personal => &["ocean_chart", "emotion_chart"],
        Dimension::Cultural => &["hofstede_chart"],
    };
    stems.iter().map(|s| format!("{video}_{s}.csv")).collect()
}

pub fn overlay_file_name(video: &str) -> String {
    format!("{video}_overlay.csv")
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    let path = dir.join(name);
    let err = |source| Error::Write {
        path: path.clone(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.persist(&path).map_err(|e| err(e.error))?;
    Ok(path)
}

/// Write everything the configuration asks for. Returns the written paths
/// in writing order.
pub fn write_outputs(summary: &VideoSummary, config: &AnalysisConfig) -> Result<Vec<PathBuf>, Error> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Write {
        path: dir.clone(),
        source,
    })?;
    let video = &summary.video_name;
    let mut written = Vec::new();

    if config.all_features {
        let text = all_features_table(summary, config.output_every);
        written.push(write_atomic(dir, &all_features_file_name(video), &text)?);
    }
    for &dim in &config.dimensions {
        if !summary.computed.contains(&dim) {
            continue;
        }
        if config.output_kinds.contains(&OutputKind::Text) {
            let text = text_summary(summary, dim);
            written.push(write_atomic(dir, &summary_file_name(video, dim), &text)?);
        }
        if config.output_kinds.contains(&OutputKind::Chart) {
            for (name, text) in chart_file_names(video, dim).into_iter().zip(chart_series(summary, dim)) {
                written.push(write_atomic(dir, &name, &text)?);
            }
        }
    }
    if config.output_kinds.contains(&OutputKind::Overlay) {
        let text = overlay_table(summary, config.output_every);
        written.push(write_atomic(dir, &overlay_file_name(video), &text)?);
    }
    Ok(written)
}

fn group_id(summary: &VideoSummary, id: u32) -> i64 {
    summary
        .groups
        .as_ref()
        .and_then(|g| g.group_of(id))
        .map_or(-1, |g| g.id as i64)
}

/// One row per sampled observation: every `every`-th frame in which a
/// pedestrian is present, counted from its first appearance.
pub fn all_features_table(summary: &VideoSummary, every: u32) -> String {
    let every = every.max(1) as usize;
    let mut out = String::from(ALL_FEATURES_HEADER);
    out.push('\n');
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for frame in &summary.scene.frames {
        for (id, s) in &frame.pedestrians {
            let k = seen.entry(*id).or_insert(0);
            let index = *k;
            *k += 1;
            if !index.is_multiple_of(every) {
                continue;
            }
            let social = summary.frame_social.as_ref().map(|m| m[id][index]);
            let p = summary.feature_index(*id);
            let ocean = summary.ocean.as_ref().zip(p).map(|(o, p)| o[p].values());
            let emotions = summary.emotions.as_ref().zip(p).map(|(e, p)| e[p].values());

            let _ = write!(out, "{} {}", frame.frame, id);
            for v in [s.position.x, s.position.y, s.speed, s.speed_mps, s.heading, s.angular_variation] {
                let _ = write!(out, " {}", sig6(v));
            }
            let (col, soc, iso, neighbors) =
                social.map_or((0.0, 0.0, 1.0, 0), |f| (f.collectivity, f.socialization, f.isolation, f.neighbors));
            let _ = write!(out, " {} {} {} {neighbors} {}", sig6(col), sig6(soc), sig6(iso), group_id(summary, *id));
            for v in ocean.unwrap_or([0.5; 5]).into_iter().chain(emotions.unwrap_or([0.5; 4])) {
                let _ = write!(out, " {}", sig6(v));
            }
            out.push('\n');
        }
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), sig6)
}

pub fn text_summary(summary: &VideoSummary, dim: Dimension) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "video {}", summary.video_name);
    let _ = writeln!(out, "dimension {dim}");
    let _ = writeln!(out, "frames {}", summary.frame_count);
    let _ = writeln!(out, "pedestrians {}", summary.pedestrian_count);
    match dim {
        Dimension::Physical => {
            out.push_str("\npedId meanSpeedMps meanAngularVariation pathLength netDisplacement\n");
            for v in &summary.features {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {}",
                    v.pedestrian_id,
                    sig6(v.mean_speed * summary.scene.fps),
                    sig6(v.mean_angular_variation),
                    sig6(v.path_length),
                    sig6(v.net_displacement)
                );
            }
        }
        Dimension::Social => {
            if let Some(g) = &summary.group_summary {
                let _ = writeln!(out, "groups {}", g.group_count);
                let _ = writeln!(out, "grouped {}", g.grouped);
                let _ = writeln!(out, "ungrouped {}", g.ungrouped);
                let _ = writeln!(out, "meanGroupSize {}", opt(g.mean_group_size));
                let _ = writeln!(out, "meanCohesion {}", opt(g.mean_cohesion));
                let _ = writeln!(out, "meanArea {}", opt(g.mean_area));
                let _ = writeln!(out, "meanMemberDistance {}", opt(g.mean_member_distance));
            }
            out.push_str("\npedId collectivity socialization isolation meanDistance meanNeighbors groupId\n");
            for v in &summary.features {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    v.pedestrian_id,
                    sig6(v.collectivity),
                    sig6(v.socialization),
                    sig6(v.isolation),
                    sig6(v.mean_distance),
                    sig6(v.mean_neighbors),
                    group_id(summary, v.pedestrian_id)
                );
            }
            if let Some(set) = &summary.groups {
                out.push_str("\ngroupId members cohesion meanArea meanDistance orientation speed\n");
                for g in &set.groups {
                    let members: Vec<String> = g.members.iter().map(u32::to_string).collect();
                    let m = &g.metrics;
                    let _ = writeln!(
                        out,
                        "{} {} {} {} {} {} {}",
                        g.id,
                        members.join(","),
                        sig6(m.cohesion),
                        sig6(m.mean_area),
                        sig6(m.mean_distance),
                        sig6(m.orientation_score),
                        sig6(m.speed_score)
                    );
                }
            }
        }
        Dimension::Personal => {
            out.push_str("\npedId O C E A N fear happiness sadness anger\n");
            if let (Some(ocean), Some(emotions)) = (&summary.ocean, &summary.emotions) {
                for ((v, o), e) in summary.features.iter().zip(ocean).zip(emotions) {
                    let _ = write!(out, "{}", v.pedestrian_id);
                    for x in o.values().into_iter().chain(e.values()) {
                        let _ = write!(out, " {}", sig6(x));
                    }
                    out.push('\n');
                }
            }
        }
        Dimension::Cultural => {
            if let Some(h) = &summary.hofstede {
                out.push('\n');
                for (name, v) in h.named_values() {
                    let _ = writeln!(out, "{name} {}", sig6(v));
                }
                let _ = writeln!(out, "groupFallback {}", h.group_fallback);
            }
        }
    }
    out
}

/// Chart series of a dimension, matching [`chart_file_names`].
pub fn chart_series(summary: &VideoSummary, dim: Dimension) -> Vec<String> {
    match dim {
        Dimension::Physical => vec![speed_series(summary)],
        Dimension::Social => vec![collectivity_series(summary)],
        Dimension::Personal => {
            let mut ocean = String::from("pedId,O,C,E,A,N\n");
            let mut emo = String::from("pedId,fear,happiness,sadness,anger\n");
            if let (Some(o), Some(e)) = (&summary.ocean, &summary.emotions) {
                for ((v, o), e) in summary.features.iter().zip(o).zip(e) {
                    let _ = writeln!(ocean, "{},{}", v.pedestrian_id, join(&o.values()));
                    let _ = writeln!(emo, "{},{}", v.pedestrian_id, join(&e.values()));
                }
            }
            vec![ocean, emo]
        }
        Dimension::Cultural => {
            let mut out = String::from("dimension,value\n");
            if let Some(h) = &summary.hofstede {
                for (name, v) in h.named_values() {
                    let _ = writeln!(out, "{name},{}", sig6(v));
                }
            }
            vec![out]
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(",")
}

/// One row per frame index in `0..frame_count`; frames nobody is in get 0.
fn speed_series(summary: &VideoSummary) -> String {
    let mut out = String::from("frame,meanSpeedMps,pedestrians\n");
    let by_frame: BTreeMap<u32, _> = summary.scene.frames.iter().map(|f| (f.frame, f)).collect();
    for frame in 0..summary.frame_count {
        let (mean, n) = by_frame.get(&frame).map_or((0.0, 0), |f| {
            let n = f.pedestrians.len();
            let sum: f64 = f.pedestrians.iter().map(|(_, s)| s.speed_mps).sum();
            (sum / n as f64, n)
        });
        let _ = writeln!(out, "{frame},{},{n}", sig6(mean));
    }
    out
}

fn collectivity_series(summary: &VideoSummary) -> String {
    let mut out = String::from("frame,meanCollectivity,meanSocialization,pedestrians\n");
    let mut per_frame: BTreeMap<u32, (f64, f64, usize)> = BTreeMap::new();
    if let Some(social) = &summary.frame_social {
        for (id, samples) in &summary.scene.tracks {
            for (s, f) in samples.iter().zip(&social[id]) {
                let e = per_frame.entry(s.frame).or_default();
                e.0 += f.collectivity;
                e.1 += f.socialization;
                e.2 += 1;
            }
        }
    }
    for frame in 0..summary.frame_count {
        let (c, s, n) = per_frame.get(&frame).copied().unwrap_or_default();
        let d = n.max(1) as f64;
        let _ = writeln!(out, "{frame},{},{},{n}", sig6(c / d), sig6(s / d));
    }
    out
}

/// Input pixel coordinates with a group label, sampled like the
/// all-features table.
pub fn overlay_table(summary: &VideoSummary, every: u32) -> String {
    let every = every.max(1) as usize;
    let mut rows: Vec<(u32, u32, f64, f64)> = Vec::new();
    for track in summary.pixel_dataset.tracks.values() {
        for p in track.points.iter().step_by(every) {
            rows.push((p.frame, track.id, p.x, p.y));
        }
    }
    rows.sort_by_key(|r| (r.0, r.1));
    let mut out = String::from("frame,pedId,x_px,y_px,label\n");
    for (frame, id, x, y) in rows {
        let label = match &summary.groups {
            None => String::new(),
            Some(g) => g.group_of(id).map_or_else(|| "alone".to_string(), |g| format!("group{}", g.id)),
        };
        let _ = writeln!(out, "{frame},{id},{x},{y},{label}");
    }
    out
}
