//! Analysis configuration and the end-to-end pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::affect::{emotions_from_ocean, AffectError, EmotionProfile};
use crate::culture::{hofstede_profile, CultureError, HofstedeProfile};
use crate::grouping::{detect_groups, GroupLinkParams, GroupSet, GroupingError};
use crate::kinematics::{summarize_track, FeatureVector, KinematicsError};
use crate::psyche::{ocean_profiles, ItemRegistry, OceanProfile, PsycheError};
use crate::scene::Scene;
use crate::social::{
    frame_social, synthesize_socialization_dataset, FrameSocial, NetFormatError, ScgParams, SocialError,
    SocialFeatures, SocializationNet, TrainingReport,
};
use crate::tracking::{resolve_input, InputWarning, TrackingDataset, TrackingError};

pub const DEFAULT_TRAINING_SAMPLES: usize = 16_000;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Input(#[from] TrackingError),
    #[error("no pedestrian tracks to analyze")]
    EmptyDataset,
    #[error("failed to read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    NetFile {
        path: PathBuf,
        #[source]
        source: NetFormatError,
    },
    #[error("{}: {source}", path.display())]
    ItemsFile {
        path: PathBuf,
        #[source]
        source: PsycheError,
    },
    #[error("failed to write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Social(#[from] SocialError),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Psyche(#[from] PsycheError),
    #[error(transparent)]
    Affect(#[from] AffectError),
    #[error(transparent)]
    Culture(#[from] CultureError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// 1 for input errors, 2 for configuration errors, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::EmptyDataset | Error::Read { .. } | Error::NetFile { .. } => 1,
            Error::Config(_) | Error::ItemsFile { .. } => 2,
            _ => 3,
        }
    }
}

/// Analysis dimensions: I physical, II social, III personal/emotional,
/// IV cultural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Physical,
    Social,
    Personal,
    Cultural,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Physical,
        Dimension::Social,
        Dimension::Personal,
        Dimension::Cultural,
    ];

    pub fn numeral(self) -> &'static str {
        match self {
            Dimension::Physical => "I",
            Dimension::Social => "II",
            Dimension::Personal => "III",
            Dimension::Cultural => "IV",
        }
    }

    /// Dimensions that must be computed for this one.
    pub fn requires(self) -> &'static [Dimension] {
        match self {
            Dimension::Physical => &[],
            Dimension::Social => &[Dimension::Physical],
            Dimension::Personal => &[Dimension::Physical, Dimension::Social],
            Dimension::Cultural => &[Dimension::Physical, Dimension::Social],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.numeral())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" | "PHYSICAL" => Ok(Dimension::Physical),
            "II" | "2" | "SOCIAL" => Ok(Dimension::Social),
            "III" | "3" | "PERSONAL" | "EMOTIONAL" => Ok(Dimension::Personal),
            "IV" | "4" | "CULTURAL" => Ok(Dimension::Cultural),
            _ => Err(format!("unknown dimension `{s}` (I, II, III, IV)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputKind {
    Text,
    Chart,
    Overlay,
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "txt" | "text" => Ok(OutputKind::Text),
            "chart" => Ok(OutputKind::Chart),
            "overlay" => Ok(OutputKind::Overlay),
            _ => Err(format!("unknown output kind `{s}` (txt, chart, overlay)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub video_name: String,
    pub fps: f64,
    pub pixels_per_meter: f64,
    pub dimensions: BTreeSet<Dimension>,
    /// Write every N-th observation of each pedestrian.
    pub output_every: u32,
    pub all_features: bool,
    pub output_kinds: BTreeSet<OutputKind>,
    pub use_correction: bool,
    pub items_file: Option<PathBuf>,
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Pretrained socialization net; trained from synthetic data otherwise.
    pub net_file: Option<PathBuf>,
    pub training_samples: usize,
    pub training_epochs: usize,
}

impl AnalysisConfig {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>, video_name: &str) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            video_name: video_name.to_string(),
            fps: 25.0,
            pixels_per_meter: 1.0,
            dimensions: Dimension::ALL.into_iter().collect(),
            output_every: 1,
            all_features: false,
            output_kinds: [OutputKind::Text, OutputKind::Chart].into_iter().collect(),
            use_correction: false,
            items_file: None,
            seed: ScgParams::default().seed,
            threads: None,
            net_file: None,
            training_samples: DEFAULT_TRAINING_SAMPLES,
            training_epochs: ScgParams::default().max_epochs,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if self.dimensions.is_empty() {
            return bad("select at least one dimension".into());
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        if !(self.pixels_per_meter.is_finite() && self.pixels_per_meter > 0.0) {
            return bad(format!("pixels per meter must be positive, got {}", self.pixels_per_meter));
        }
        if self.output_every == 0 {
            return bad("output frequency must be at least 1".into());
        }
        if self.video_name.is_empty() || self.video_name.contains(['/', '\\']) {
            return bad(format!("`{}` is not a usable video name", self.video_name));
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1".into());
        }
        if self.net_file.is_none() && self.training_epochs == 0 {
            return bad("training needs at least one epoch".into());
        }
        Ok(())
    }

    /// Selected dimensions plus everything they depend on. Writing the
    /// all-features table needs every dimension.
    pub fn computed_dimensions(&self) -> BTreeSet<Dimension> {
        if self.all_features {
            return Dimension::ALL.into_iter().collect();
        }
        self.dimensions
            .iter()
            .flat_map(|d| d.requires().iter().copied().chain([*d]))
            .collect()
    }

    fn scg_params(&self) -> ScgParams {
        ScgParams {
            max_epochs: self.training_epochs,
            seed: self.seed,
            ..ScgParams::default()
        }
    }
}

/// Aggregate group statistics; means are `None` without groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group_count: usize,
    pub grouped: usize,
    pub ungrouped: usize,
    pub mean_group_size: Option<f64>,
    pub mean_cohesion: Option<f64>,
    pub mean_area: Option<f64>,
    pub mean_member_distance: Option<f64>,
}

impl GroupSummary {
    pub fn from_groups(set: &GroupSet) -> Self {
        let n = set.groups.len();
        let mean = |f: &dyn Fn(&crate::grouping::Group) -> f64| {
            (n > 0).then(|| set.groups.iter().map(f).sum::<f64>() / n as f64)
        };
        Self {
            group_count: n,
            grouped: set.grouped_ids.len(),
            ungrouped: set.ungrouped_ids.len(),
            mean_group_size: mean(&|g| g.members.len() as f64),
            mean_cohesion: mean(&|g| g.metrics.cohesion),
            mean_area: mean(&|g| g.metrics.mean_area),
            mean_member_distance: mean(&|g| g.metrics.mean_distance),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VideoSummary {
    pub video_name: String,
    pub frame_count: u32,
    pub pedestrian_count: usize,
    pub computed: BTreeSet<Dimension>,
    pub scene: Scene,
    /// Input coordinates, for overlays.
    pub pixel_dataset: TrackingDataset,
    /// Per pedestrian, aligned with `scene.tracks`.
    pub frame_social: Option<BTreeMap<u32, Vec<FrameSocial>>>,
    /// Ascending pedestrian id.
    pub features: Vec<FeatureVector>,
    pub groups: Option<GroupSet>,
    pub group_summary: Option<GroupSummary>,
    /// Same order as `features`.
    pub ocean: Option<Vec<OceanProfile>>,
    pub emotions: Option<Vec<EmotionProfile>>,
    pub hofstede: Option<HofstedeProfile>,
    pub training: Option<TrainingReport>,
    pub warnings: Vec<InputWarning>,
}

impl VideoSummary {
    pub fn group_count(&self) -> usize {
        self.groups.as_ref().map_or(0, |g| g.groups.len())
    }

    pub fn feature_index(&self, id: u32) -> Option<usize> {
        self.features.binary_search_by_key(&id, |v| v.pedestrian_id).ok()
    }
}

/// Load `config.net_file`, or train on synthetic data.
pub fn obtain_net(config: &AnalysisConfig) -> Result<(SocializationNet, Option<TrainingReport>), Error> {
    match &config.net_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
                path: path.clone(),
                source,
            })?;
            let net = SocializationNet::from_text(&text).map_err(|source| Error::NetFile {
                path: path.clone(),
                source,
            })?;
            Ok((net, None))
        }
        None => {
            let samples = synthesize_socialization_dataset(config.training_samples, config.seed)?;
            let (net, report) = crate::social::train_socialization_net(&samples, &config.scg_params())?;
            Ok((net, Some(report)))
        }
    }
}

fn load_registry(path: Option<&Path>) -> Result<ItemRegistry, Error> {
    let Some(path) = path else {
        return Ok(ItemRegistry::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ItemRegistry::parse(&text).map_err(|source| Error::ItemsFile {
        path: path.to_path_buf(),
        source,
    })
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))
}

/// Validate, resolve the input, obtain the socialization net when needed and
/// run every stage the selected dimensions require.
pub fn run_pipeline(config: &AnalysisConfig) -> Result<VideoSummary, Error> {
    config.validate()?;
    let registry = load_registry(config.items_file.as_deref())?;
    let pool = thread_pool(config.threads)?;
    pool.install(|| {
        let needs_net = config.computed_dimensions().contains(&Dimension::Social);
        let (net, training) = if needs_net {
            let (net, report) = obtain_net(config)?;
            (Some(net), report)
        } else {
            (None, None)
        };
        let mut summary = analyze(config, &registry, net.as_ref())?;
        summary.training = training;
        Ok(summary)
    })
}

/// [`run_pipeline`] with a given net, which is used whenever social
/// features are needed.
pub fn run_pipeline_with_net(config: &AnalysisConfig, net: &SocializationNet) -> Result<VideoSummary, Error> {
    config.validate()?;
    let registry = load_registry(config.items_file.as_deref())?;
    thread_pool(config.threads)?.install(|| analyze(config, &registry, Some(net)))
}

fn analyze(
    config: &AnalysisConfig,
    registry: &ItemRegistry,
    net: Option<&SocializationNet>,
) -> Result<VideoSummary, Error> {
    let computed = config.computed_dimensions();
    let input = resolve_input(&config.input_dir, config.use_correction, config.pixels_per_meter)?;
    if input.dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let scene = Scene::build(&input.dataset, config.fps)?;

    let social = computed.contains(&Dimension::Social);
    let frame_social = match (social, net) {
        (true, Some(net)) => Some(social_per_pedestrian(&scene, net)),
        (true, None) => return Err(Error::Config("social features need a socialization net".into())),
        _ => None,
    };

    let features: Vec<FeatureVector> = scene
        .tracks
        .par_iter()
        .map(|(&id, samples)| {
            let social = frame_social
                .as_ref()
                .map(|m| SocialFeatures::from_frames(&m[&id]))
                .unwrap_or_default();
            summarize_track(id, samples, &social)
        })
        .collect::<Result<_, _>>()?;

    let groups = if social {
        Some(detect_groups(&scene, &GroupLinkParams::default())?)
    } else {
        None
    };

    let (ocean, emotions) = if computed.contains(&Dimension::Personal) {
        let ocean = ocean_profiles(registry, &features)?;
        let emotions = ocean.iter().map(emotions_from_ocean).collect::<Result<Vec<_>, _>>()?;
        (Some(ocean), Some(emotions))
    } else {
        (None, None)
    };

    let hofstede = match (&groups, computed.contains(&Dimension::Cultural)) {
        (Some(g), true) => Some(hofstede_profile(g, &features, config.fps)?),
        _ => None,
    };

    Ok(VideoSummary {
        video_name: config.video_name.clone(),
        frame_count: scene.frame_count,
        pedestrian_count: scene.pedestrian_count(),
        computed,
        group_summary: groups.as_ref().map(GroupSummary::from_groups),
        scene,
        pixel_dataset: input.pixel_dataset,
        frame_social,
        features,
        groups,
        ocean,
        emotions,
        hofstede,
        training: None,
        warnings: input.warnings,
    })
}

fn social_per_pedestrian(scene: &Scene, net: &SocializationNet) -> BTreeMap<u32, Vec<FrameSocial>> {
    let per_frame: Vec<Vec<(u32, FrameSocial)>> = scene
        .frames
        .par_iter()
        .map(|frame| {
            let snapshot = frame.snapshot();
            (0..snapshot.states.len())
                .map(|i| (snapshot.states[i].id, frame_social(net, &snapshot, i)))
                .collect()
        })
        .collect();
    let mut out: BTreeMap<u32, Vec<FrameSocial>> = BTreeMap::new();
    for frame in per_frame {
        for (id, s) in frame {
            out.entry(id).or_default().push(s);
        }
    }
    out
}
