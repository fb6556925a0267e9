//! Python bindings: tracking files, synthetic scenarios, the socialization
//! net, personality/emotion/culture mappings and the full analysis.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use crowdmind::affect;
use crowdmind::culture;
use crowdmind::psyche::{Factor, OceanProfile as CoreOcean};
use crowdmind::social;
use crowdmind::synth::{self, ScenarioKind, ScenarioSpec};
use crowdmind::tracking;
use crowdmind::{AnalysisConfig, Dimension, OutputKind};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Pedestrian tracks as read from a tracking file.
#[pyclass(module = "crowdmind_py", skip_from_py_object)]
#[derive(Clone)]
struct TrackingDataset {
    inner: tracking::TrackingDataset,
}

#[pymethods]
impl TrackingDataset {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let parsed = tracking::parse_tracking(text).map_err(value_err)?;
        Ok(Self { inner: parsed.dataset })
    }

    fn to_text(&self) -> String {
        tracking::write_tracking(&self.inner)
    }

    fn ids(&self) -> Vec<u32> {
        self.inner.ids().collect()
    }

    /// `(frame, x, y)` tuples of one pedestrian.
    fn points(&self, id: u32) -> PyResult<Vec<(u32, f64, f64)>> {
        let track = self
            .inner
            .tracks
            .get(&id)
            .ok_or_else(|| value_err(format!("no pedestrian {id}")))?;
        Ok(track.points.iter().map(|p| (p.frame, p.x, p.y)).collect())
    }

    #[getter]
    fn frame_count(&self) -> u32 {
        self.inner.frame_count
    }

    fn to_meters(&self, pixels_per_meter: f64) -> PyResult<Self> {
        let inner = tracking::to_world_coords(&self.inner, pixels_per_meter).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Generate a scenario: `kind` is grouped-walk, lone-walkers or corridor.
/// Returns the pixel dataset and the ground-truth CSV text.
#[pyfunction]
#[pyo3(signature = (kind, seed=1, noise=None, frames=None, groups=None, group_size=None, loners=None, base_speed=None))]
#[allow(clippy::too_many_arguments)]
fn generate_scenario(
    kind: &str,
    seed: u64,
    noise: Option<f64>,
    frames: Option<u32>,
    groups: Option<usize>,
    group_size: Option<usize>,
    loners: Option<usize>,
    base_speed: Option<f64>,
) -> PyResult<(TrackingDataset, String)> {
    let kind: ScenarioKind = kind.parse().map_err(value_err)?;
    let d = ScenarioSpec::new(kind);
    let spec = ScenarioSpec {
        seed,
        position_noise: noise.unwrap_or(d.position_noise),
        frames: frames.unwrap_or(d.frames),
        group_count: groups.unwrap_or(d.group_count),
        group_size: group_size.unwrap_or(d.group_size),
        loner_count: loners.unwrap_or(d.loner_count),
        base_speed: base_speed.unwrap_or(d.base_speed),
        ..d
    };
    let (inner, truth) = synth::generate(&spec).map_err(value_err)?;
    Ok((TrackingDataset { inner }, truth.to_csv()))
}

#[pyclass(module = "crowdmind_py", skip_from_py_object)]
#[derive(Clone)]
struct SocializationNet {
    inner: social::SocializationNet,
}

#[pymethods]
impl SocializationNet {
    /// Train on synthetic samples; returns the net and a report dict.
    #[staticmethod]
    #[pyo3(signature = (samples=16000, seed=42, epochs=1000))]
    fn train(samples: usize, seed: u64, epochs: usize) -> PyResult<(Self, BTreeMap<String, f64>)> {
        let data = social::synthesize_socialization_dataset(samples, seed).map_err(value_err)?;
        let params = social::ScgParams {
            max_epochs: epochs,
            seed,
            ..social::ScgParams::default()
        };
        let (inner, report) = social::train_socialization_net(&data, &params).map_err(value_err)?;
        let info = BTreeMap::from([
            ("epochs".to_string(), report.epochs as f64),
            ("final_loss".to_string(), report.final_loss),
            ("train_accuracy".to_string(), report.train_accuracy),
            ("validation_accuracy".to_string(), report.validation_accuracy),
            ("validation_reference_accuracy".to_string(), report.validation_reference_accuracy),
        ]);
        Ok((Self { inner }, info))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = social::SocializationNet::from_text(text).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn socialization_level(&self, collectivity: f64, mean_distance: f64, neighbors: f64) -> f64 {
        self.inner.socialization_level(collectivity, mean_distance, neighbors)
    }
}

#[pyclass(module = "crowdmind_py", skip_from_py_object, get_all, set_all)]
#[derive(Clone)]
struct OceanProfile {
    openness: f64,
    conscientiousness: f64,
    extraversion: f64,
    agreeableness: f64,
    neuroticism: f64,
}

#[pymethods]
impl OceanProfile {
    #[new]
    #[pyo3(signature = (openness=0.5, conscientiousness=0.5, extraversion=0.5, agreeableness=0.5, neuroticism=0.5))]
    fn new(openness: f64, conscientiousness: f64, extraversion: f64, agreeableness: f64, neuroticism: f64) -> Self {
        Self {
            openness,
            conscientiousness,
            extraversion,
            agreeableness,
            neuroticism,
        }
    }

    /// Fear, happiness, sadness and anger in [0, 1].
    fn emotions(&self) -> PyResult<BTreeMap<String, f64>> {
        let mut core = CoreOcean::default();
        for (f, v) in Factor::ALL.into_iter().zip([
            self.openness,
            self.conscientiousness,
            self.extraversion,
            self.agreeableness,
            self.neuroticism,
        ]) {
            core.set(f, v);
        }
        let e = affect::emotions_from_ocean(&core).map_err(value_err)?;
        Ok(affect::Emotion::ALL
            .into_iter()
            .map(|em| (em.name().to_string(), e.get(em)))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "OceanProfile(O={}, C={}, E={}, A={}, N={})",
            self.openness, self.conscientiousness, self.extraversion, self.agreeableness, self.neuroticism
        )
    }
}

/// `gamma * exp(-beta * d^2)` for a pair dissimilarity `d`.
#[pyfunction]
fn pair_term(dissimilarity: f64) -> f64 {
    social::pair_term(dissimilarity)
}

/// `(LTO, STO)` from an orientation score in [0, 100].
#[pyfunction]
fn long_term_orientation(orientation: f64) -> PyResult<(f64, f64)> {
    culture::long_term_orientation(orientation).map_err(value_err)
}

/// `(COL, IDV)` percentages.
#[pyfunction]
fn collectivism_individualism(grouped: usize, total: usize) -> PyResult<(f64, f64)> {
    culture::collectivism_individualism(grouped, total).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (mean_group_distance=None))]
fn power_distance(mean_group_distance: Option<f64>) -> f64 {
    culture::power_distance(mean_group_distance)
}

/// Run the analysis and write reports. Returns counts, the Hofstede
/// dimensions (when computed) and the written paths.
#[pyfunction]
#[pyo3(signature = (
    input_dir, output_dir, video_name, fps, pixels_per_meter,
    dims=None, every=1, all_features=false, outputs=None, seed=42, threads=None,
    net=None, train_samples=16000, train_epochs=1000
))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    py: Python<'_>,
    input_dir: PathBuf,
    output_dir: PathBuf,
    video_name: &str,
    fps: f64,
    pixels_per_meter: f64,
    dims: Option<Vec<String>>,
    every: u32,
    all_features: bool,
    outputs: Option<Vec<String>>,
    seed: u64,
    threads: Option<usize>,
    net: Option<PathBuf>,
    train_samples: usize,
    train_epochs: usize,
) -> PyResult<Py<PyAny>> {
    let mut config = AnalysisConfig {
        fps,
        pixels_per_meter,
        output_every: every,
        all_features,
        seed,
        threads,
        net_file: net,
        training_samples: train_samples,
        training_epochs: train_epochs,
        ..AnalysisConfig::new(input_dir, output_dir, video_name)
    };
    if let Some(dims) = dims {
        config.dimensions = dims
            .iter()
            .map(|d| d.parse::<Dimension>())
            .collect::<Result<_, _>>()
            .map_err(value_err)?;
    }
    if let Some(outputs) = outputs {
        config.output_kinds = outputs
            .iter()
            .map(|d| d.parse::<OutputKind>())
            .collect::<Result<_, _>>()
            .map_err(value_err)?;
    }
    let (summary, written) = py
        .detach(|| {
            let summary = crowdmind::run_pipeline(&config)?;
            let written = crowdmind::write_outputs(&summary, &config)?;
            Ok::<_, crowdmind::Error>((summary, written))
        })
        .map_err(|e| match e.exit_code() {
            1 => PyIOError::new_err(e.to_string()),
            _ => value_err(e),
        })?;

    let out = pyo3::types::PyDict::new(py);
    out.set_item("frames", summary.frame_count)?;
    out.set_item("pedestrians", summary.pedestrian_count)?;
    out.set_item("groups", summary.group_count())?;
    if let Some(h) = &summary.hofstede {
        let dims: BTreeMap<&str, f64> = h.named_values().into_iter().collect();
        out.set_item("hofstede", dims)?;
        out.set_item("group_fallback", h.group_fallback)?;
    }
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    out.set_item("files", files)?;
    Ok(out.into_any().unbind())
}

#[pymodule]
pub fn crowdmind_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TrackingDataset>()?;
    m.add_class::<SocializationNet>()?;
    m.add_class::<OceanProfile>()?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(pair_term, m)?)?;
    m.add_function(wrap_pyfunction!(long_term_orientation, m)?)?;
    m.add_function(wrap_pyfunction!(collectivism_individualism, m)?)?;
    m.add_function(wrap_pyfunction!(power_distance, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
