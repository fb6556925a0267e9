//! The 3-10-2 socialization classifier: tanh hidden layer, softmax output,
//! cross-entropy loss, trained full-batch with SCG.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::scg::{self, Objective, ScgOptions, StopReason};
use super::{SocialError, SocialSample};

pub const INPUTS: usize = 3;
pub const HIDDEN: usize = 10;
pub const OUTPUTS: usize = 2;

const W1: usize = 0;
const B1: usize = W1 + HIDDEN * INPUTS;
const W2: usize = B1 + HIDDEN;
const B2: usize = W2 + OUTPUTS * HIDDEN;
/// Total number of weights and biases.
pub const PARAMS: usize = B2 + OUTPUTS;

const TRAIN_FRACTION: f64 = 0.7;
const MIN_SAMPLES: usize = 100;
const HEADER: &str = "# socialization-net v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScgParams {
    pub max_epochs: usize,
    pub sigma0: f64,
    pub lambda_init: f64,
    pub target_loss: f64,
    pub seed: u64,
}

impl Default for ScgParams {
    fn default() -> Self {
        Self {
            max_epochs: 1000,
            sigma0: 1e-4,
            lambda_init: 1e-6,
            target_loss: 0.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub epochs: usize,
    pub final_loss: f64,
    pub loss_history: Vec<f64>,
    pub train_accuracy: f64,
    /// Against the observed (noisy) validation labels.
    pub validation_accuracy: f64,
    /// Against the noise-free labelling rule.
    pub validation_reference_accuracy: f64,
    pub train_size: usize,
    pub validation_size: usize,
}

/// Forward pass on already standardized inputs; returns the hidden
/// activations and the output logits.
fn forward(params: &[f64], x: &[f64; INPUTS]) -> ([f64; HIDDEN], [f64; OUTPUTS]) {
    let mut hidden = [0.0; HIDDEN];
    for (h, out) in hidden.iter_mut().enumerate() {
        let row = &params[W1 + h * INPUTS..W1 + (h + 1) * INPUTS];
        let z: f64 = params[B1 + h] + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        *out = z.tanh();
    }
    let mut logits = [0.0; OUTPUTS];
    for (o, out) in logits.iter_mut().enumerate() {
        let row = &params[W2 + o * HIDDEN..W2 + (o + 1) * HIDDEN];
        *out = params[B2 + o] + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>();
    }
    (hidden, logits)
}

fn softmax(logits: &[f64; OUTPUTS]) -> [f64; OUTPUTS] {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = logits.map(|z| (z - m).exp());
    let s: f64 = e.iter().sum();
    e.map(|v| v / s)
}

fn log_sum_exp(logits: &[f64; OUTPUTS]) -> f64 {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln()
}

/// Mean cross-entropy of the network over a labelled, standardized set.
#[derive(Debug, Clone)]
pub struct TrainingObjective {
    inputs: Vec<[f64; INPUTS]>,
    classes: Vec<usize>,
}

impl TrainingObjective {
    pub fn new(inputs: Vec<[f64; INPUTS]>, classes: Vec<usize>) -> Self {
        assert_eq!(inputs.len(), classes.len());
        assert!(classes.iter().all(|&c| c < OUTPUTS));
        Self { inputs, classes }
    }
}

impl Objective for TrainingObjective {
    fn dim(&self) -> usize {
        PARAMS
    }

    fn value(&self, w: &[f64]) -> f64 {
        let total: f64 = self
            .inputs
            .iter()
            .zip(&self.classes)
            .map(|(x, &c)| {
                let (_, logits) = forward(w, x);
                log_sum_exp(&logits) - logits[c]
            })
            .sum();
        total / self.inputs.len() as f64
    }

    fn value_and_gradient(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        grad.fill(0.0);
        let mut total = 0.0;
        for (x, &c) in self.inputs.iter().zip(&self.classes) {
            let (hidden, logits) = forward(w, x);
            total += log_sum_exp(&logits) - logits[c];

            let mut dz = softmax(&logits);
            dz[c] -= 1.0;
            for o in 0..OUTPUTS {
                grad[B2 + o] += dz[o];
                for h in 0..HIDDEN {
                    grad[W2 + o * HIDDEN + h] += dz[o] * hidden[h];
                }
            }
            for h in 0..HIDDEN {
                let back: f64 = (0..OUTPUTS).map(|o| w[W2 + o * HIDDEN + h] * dz[o]).sum();
                let dh = back * (1.0 - hidden[h] * hidden[h]);
                grad[B1 + h] += dh;
                for i in 0..INPUTS {
                    grad[W1 + h * INPUTS + i] += dh * x[i];
                }
            }
        }
        let n = self.inputs.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        total / n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocializationNet {
    params: Vec<f64>,
    input_mean: [f64; INPUTS],
    input_std: [f64; INPUTS],
}

impl SocializationNet {
    pub fn from_parts(params: Vec<f64>, input_mean: [f64; INPUTS], input_std: [f64; INPUTS]) -> Self {
        assert_eq!(params.len(), PARAMS);
        Self {
            params,
            input_mean,
            input_std,
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn input_mean(&self) -> [f64; INPUTS] {
        self.input_mean
    }

    pub fn input_std(&self) -> [f64; INPUTS] {
        self.input_std
    }

    pub fn standardize(&self, raw: [f64; INPUTS]) -> [f64; INPUTS] {
        let mut out = raw;
        for i in 0..INPUTS {
            out[i] = (raw[i] - self.input_mean[i]) / self.input_std[i];
        }
        out
    }

    /// Class probabilities `[social, non-social]` for raw inputs.
    pub fn probabilities(&self, collectivity: f64, mean_distance: f64, neighbors: f64) -> [f64; OUTPUTS] {
        let x = self.standardize([collectivity, mean_distance, neighbors]);
        softmax(&forward(&self.params, &x).1)
    }

    /// Probability of the social class, kept strictly inside (0, 1).
    pub fn socialization_level(&self, collectivity: f64, mean_distance: f64, neighbors: f64) -> f64 {
        let p = self.probabilities(collectivity, mean_distance, neighbors)[0];
        p.clamp(f64::EPSILON, 1.0 - f64::EPSILON)
    }

    pub fn predict(&self, sample: &SocialSample) -> usize {
        let [a, b, c] = sample.inputs();
        let p = self.probabilities(a, b, c);
        if p[0] >= p[1] {
            0
        } else {
            1
        }
    }

    /// Plain-text form: header, layer sizes, activations, input statistics
    /// and row-major weights, all numbers with 9 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |vals: &[f64]| vals.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "layers {INPUTS} {HIDDEN} {OUTPUTS}");
        let _ = writeln!(out, "activations tanh softmax");
        let _ = writeln!(out, "input_mean {}", list(&self.input_mean));
        let _ = writeln!(out, "input_std {}", list(&self.input_std));
        let _ = writeln!(out, "w1 {}", list(&self.params[W1..B1]));
        let _ = writeln!(out, "b1 {}", list(&self.params[B1..W2]));
        let _ = writeln!(out, "w2 {}", list(&self.params[W2..B2]));
        let _ = writeln!(out, "b2 {}", list(&self.params[B2..PARAMS]));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, NetFormatError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(HEADER) {
            return Err(NetFormatError::BadHeader);
        }
        let mut next = |name: &str| -> Result<Vec<&str>, NetFormatError> {
            let mut toks = lines
                .next()
                .ok_or_else(|| NetFormatError::Missing(name.to_string()))?
                .split_whitespace();
            if toks.next() != Some(name) {
                return Err(NetFormatError::Missing(name.to_string()));
            }
            Ok(toks.collect())
        };
        let numbers = |name: &str, toks: Vec<&str>, len: usize| -> Result<Vec<f64>, NetFormatError> {
            let vals = toks
                .iter()
                .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| NetFormatError::BadNumber(name.to_string()))?;
            if vals.len() != len {
                return Err(NetFormatError::WrongLength {
                    field: name.to_string(),
                    expected: len,
                    got: vals.len(),
                });
            }
            Ok(vals)
        };

        let layers = next("layers")?;
        let expected = [INPUTS.to_string(), HIDDEN.to_string(), OUTPUTS.to_string()];
        if layers != expected {
            return Err(NetFormatError::Unsupported(format!("layer sizes {}", layers.join(" "))));
        }
        let activations = next("activations")?;
        if activations != ["tanh", "softmax"] {
            return Err(NetFormatError::Unsupported(format!("activations {}", activations.join(" "))));
        }
        let mean = numbers("input_mean", next("input_mean")?, INPUTS)?;
        let std = numbers("input_std", next("input_std")?, INPUTS)?;
        if std.iter().any(|s| *s <= 0.0) {
            return Err(NetFormatError::Unsupported("non-positive input_std".into()));
        }
        let mut params = numbers("w1", next("w1")?, HIDDEN * INPUTS)?;
        params.extend(numbers("b1", next("b1")?, HIDDEN)?);
        params.extend(numbers("w2", next("w2")?, OUTPUTS * HIDDEN)?);
        params.extend(numbers("b2", next("b2")?, OUTPUTS)?);
        Ok(Self::from_parts(
            params,
            [mean[0], mean[1], mean[2]],
            [std[0], std[1], std[2]],
        ))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NetFormatError {
    #[error("missing `{HEADER}` header")]
    BadHeader,
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("field `{0}` holds a value that is not a number")]
    BadNumber(String),
    #[error("field `{field}` should have {expected} values, got {got}")]
    WrongLength { field: String, expected: usize, got: usize },
    #[error("unsupported network: {0}")]
    Unsupported(String),
}

/// Glorot-uniform weights, zero biases.
pub fn initial_params(rng: &mut impl Rng) -> Vec<f64> {
    let mut p = vec![0.0; PARAMS];
    let a1 = (6.0 / (INPUTS + HIDDEN) as f64).sqrt();
    let a2 = (6.0 / (HIDDEN + OUTPUTS) as f64).sqrt();
    for w in &mut p[W1..B1] {
        *w = rng.random_range(-a1..a1);
    }
    for w in &mut p[W2..B2] {
        *w = rng.random_range(-a2..a2);
    }
    p
}

fn accuracy(net: &SocializationNet, samples: &[&SocialSample], reference: bool) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let correct = samples
        .iter()
        .filter(|s| {
            let label = if reference { s.reference_label } else { s.label };
            net.predict(s) == label.class_index()
        })
        .count();
    correct as f64 / samples.len() as f64
}

/// Shuffle with the seed, train on the first 70% and validate on the rest.
pub fn train_socialization_net(
    samples: &[SocialSample],
    params: &ScgParams,
) -> Result<(SocializationNet, TrainingReport), SocialError> {
    if samples.len() < MIN_SAMPLES {
        return Err(SocialError::InsufficientSamples {
            min: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng);
    let n_train = (samples.len() as f64 * TRAIN_FRACTION).round() as usize;
    let train: Vec<&SocialSample> = order[..n_train].iter().map(|&i| &samples[i]).collect();
    let valid: Vec<&SocialSample> = order[n_train..].iter().map(|&i| &samples[i]).collect();

    let mut mean = [0.0; INPUTS];
    let mut std = [0.0; INPUTS];
    for s in &train {
        for (m, x) in mean.iter_mut().zip(s.inputs()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n_train as f64);
    for s in &train {
        for ((v, x), m) in std.iter_mut().zip(s.inputs()).zip(&mean) {
            *v += (x - m).powi(2);
        }
    }
    for v in &mut std {
        *v = (*v / n_train as f64).sqrt();
        if *v == 0.0 {
            *v = 1.0;
        }
    }

    let mut net = SocializationNet::from_parts(initial_params(&mut rng), mean, std);
    let objective = TrainingObjective::new(
        train.iter().map(|s| net.standardize(s.inputs())).collect(),
        train.iter().map(|s| s.label.class_index()).collect(),
    );
    let outcome = scg::minimize(
        &objective,
        net.params(),
        &ScgOptions {
            max_iterations: params.max_epochs,
            sigma0: params.sigma0,
            lambda_init: params.lambda_init,
            target: params.target_loss,
            ..ScgOptions::default()
        },
    );
    if outcome.stop == StopReason::NonFinite || !outcome.loss.is_finite() {
        return Err(SocialError::DivergedTraining(outcome.loss));
    }
    net.params = outcome.weights;

    let report = TrainingReport {
        epochs: outcome.iterations,
        final_loss: outcome.loss,
        train_accuracy: accuracy(&net, &train, false),
        validation_accuracy: accuracy(&net, &valid, false),
        validation_reference_accuracy: accuracy(&net, &valid, true),
        loss_history: outcome.history,
        train_size: train.len(),
        validation_size: valid.len(),
    };
    log::info!(
        "socialization net: {} epochs, loss {:.4}, validation accuracy {:.4} (reference {:.4})",
        report.epochs,
        report.final_loss,
        report.validation_accuracy,
        report.validation_reference_accuracy
    );
    Ok((net, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::social::synthesize_socialization_dataset;

    fn small_net(seed: u64) -> SocializationNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SocializationNet::from_parts(initial_params(&mut rng), [0.5, 5.0, 5.0], [0.3, 2.9, 3.2])
    }

    #[test]
    fn parameter_layout() {
        assert_eq!(PARAMS, 62);
    }

    #[test]
    fn init_is_never_all_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = initial_params(&mut rng);
        assert!(p[W1..B1].iter().all(|w| *w != 0.0));
        // hidden units start out distinct, so symmetry is broken
        let rows: Vec<&[f64]> = p[W1..B1].chunks(INPUTS).collect();
        assert!(rows.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let net = small_net(3);
        for &(a, b, c) in &[(0.0, 0.0, 0.0), (1.0, 10.0, 10.0), (0.3, 100.0, -4.0)] {
            let p = net.probabilities(a, b, c);
            assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
            let s = net.socialization_level(a, b, c);
            assert_eq!(s + (1.0 - s), 1.0);
            assert!(s > 0.0 && s < 1.0);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let samples = synthesize_socialization_dataset(64, 5).unwrap();
        let net = small_net(11);
        let obj = TrainingObjective::new(
            samples.iter().map(|s| net.standardize(s.inputs())).collect(),
            samples.iter().map(|s| s.label.class_index()).collect(),
        );
        let w = net.params().to_vec();
        let mut g = vec![0.0; PARAMS];
        obj.value_and_gradient(&w, &mut g);
        let h = 1e-5;
        for k in 0..PARAMS {
            let mut plus = w.clone();
            let mut minus = w.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (obj.value(&plus) - obj.value(&minus)) / (2.0 * h);
            let rel = (fd - g[k]).abs() / fd.abs().max(g[k].abs()).max(1e-6);
            assert!(rel < 1e-4, "param {k}: analytic {} fd {fd}", g[k]);
        }
    }

    #[test]
    fn text_round_trip() {
        let net = small_net(9);
        let back = SocializationNet::from_text(&net.to_text()).unwrap();
        for (a, b) in net.params().iter().zip(back.params()) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
        }
        assert_eq!(back.to_text(), net.to_text());
    }

    #[test]
    fn text_errors() {
        assert_eq!(SocializationNet::from_text("hello"), Err(NetFormatError::BadHeader));
        let text = small_net(1).to_text().replace("layers 3 10 2", "layers 3 5 2");
        assert!(matches!(SocializationNet::from_text(&text), Err(NetFormatError::Unsupported(_))));
        let text = small_net(1).to_text().replace("tanh", "relu");
        assert!(matches!(SocializationNet::from_text(&text), Err(NetFormatError::Unsupported(_))));
        let text: String = small_net(1).to_text().lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(SocializationNet::from_text(&text), Err(NetFormatError::Missing(_))));
    }

    #[test]
    fn too_few_samples() {
        let s = synthesize_socialization_dataset(50, 1).unwrap();
        assert_eq!(
            train_socialization_net(&s, &ScgParams::default()).unwrap_err(),
            SocialError::InsufficientSamples { min: 100, got: 50 }
        );
    }

    #[test]
    fn training_learns_rule_regions() {
        let s = synthesize_socialization_dataset(4000, 2).unwrap();
        let (net, report) = train_socialization_net(
            &s,
            &ScgParams {
                max_epochs: 400,
                ..ScgParams::default()
            },
        )
        .unwrap();
        assert!(report.loss_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(net.socialization_level(0.95, 0.8, 4.0) > 0.5);
        assert!(net.socialization_level(0.05, 9.5, 0.0) < 0.5);
    }

    #[test]
    fn training_is_deterministic() {
        let s = synthesize_socialization_dataset(500, 4).unwrap();
        let p = ScgParams {
            max_epochs: 50,
            ..ScgParams::default()
        };
        let (a, _) = train_socialization_net(&s, &p).unwrap();
        let (b, _) = train_socialization_net(&s, &p).unwrap();
        assert_eq!(a.params(), b.params());
    }
}
