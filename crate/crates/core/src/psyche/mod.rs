//! Big-Five (OCEAN) scores from trajectory features.
//!
//! Each questionnaire item is emulated by an equation over the pedestrian's
//! feature vector. Raw item scores are min-max normalized across the video
//! onto the 1..5 Likert scale, averaged per factor and rescaled to [0, 1].
//!
//! The built-in registry has two items per factor. Only `C1` (speed plus the
//! inverse of angular variation, for "have clear goals, work to them in an
//! orderly way") comes from the published item set; the other nine are
//! stand-ins that follow each factor's meaning. A full item table can be
//! loaded from a registry file instead.

mod expr;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::kinematics::FeatureVector;

pub use expr::{Expr, ExprError, Feature, DIVISION_FLOOR};

pub const LIKERT_MIN: f64 = 1.0;
pub const LIKERT_MAX: f64 = 5.0;
pub const LIKERT_NEUTRAL: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum PsycheError {
    #[error("factor {0} has no registered items")]
    EmptyFactor(Factor),
    #[error("registry line {line}: {reason}")]
    BadRegistryLine { line: usize, reason: String },
    #[error("registry line {line}: {source}")]
    BadExpression {
        line: usize,
        #[source]
        source: ExprError,
    },
    #[error("duplicate item id `{0}`")]
    DuplicateItem(String),
    #[error("unknown pedestrian {0}")]
    UnknownPedestrian(u32),
    #[error("no pedestrians to score")]
    NoPedestrians,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Openness,
    Conscientiousness,
    Extraversion,
    Agreeableness,
    Neuroticism,
}

impl Factor {
    pub const ALL: [Factor; 5] = [
        Factor::Openness,
        Factor::Conscientiousness,
        Factor::Extraversion,
        Factor::Agreeableness,
        Factor::Neuroticism,
    ];

    pub fn letter(self) -> char {
        match self {
            Factor::Openness => 'O',
            Factor::Conscientiousness => 'C',
            Factor::Extraversion => 'E',
            Factor::Agreeableness => 'A',
            Factor::Neuroticism => 'N',
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Factor::ALL
            .into_iter()
            .find(|f| s.len() == 1 && s.starts_with(f.letter()))
            .ok_or_else(|| format!("unknown factor `{s}` (expected one of O, C, E, A, N)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemEquation {
    pub id: String,
    pub factor: Factor,
    pub expr: Expr,
    pub description: String,
}

impl ItemEquation {
    pub fn new(id: &str, factor: Factor, expression: &str) -> Result<Self, ExprError> {
        Ok(Self {
            id: id.to_string(),
            factor,
            expr: Expr::parse(expression)?,
            description: expression.to_string(),
        })
    }
}

/// Raw score of one item; never NaN or infinite.
pub fn eval_item(item: &ItemEquation, v: &FeatureVector) -> f64 {
    let raw = item.expr.eval(v);
    if raw.is_nan() {
        0.0
    } else {
        raw.clamp(f64::MIN, f64::MAX)
    }
}

/// Min-max map onto [1, 5]; a constant column maps to 3.
pub fn normalize_likert(raws: &[f64]) -> Vec<f64> {
    let lo = raws.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 || !span.is_finite() {
        return vec![LIKERT_NEUTRAL; raws.len()];
    }
    raws.iter()
        .map(|r| (LIKERT_MIN + (LIKERT_MAX - LIKERT_MIN) * (r - lo) / span).clamp(LIKERT_MIN, LIKERT_MAX))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OceanProfile {
    pub openness: f64,
    pub conscientiousness: f64,
    pub extraversion: f64,
    pub agreeableness: f64,
    pub neuroticism: f64,
}

impl OceanProfile {
    pub const NEUTRAL: OceanProfile = OceanProfile {
        openness: 0.5,
        conscientiousness: 0.5,
        extraversion: 0.5,
        agreeableness: 0.5,
        neuroticism: 0.5,
    };

    pub fn get(&self, f: Factor) -> f64 {
        match f {
            Factor::Openness => self.openness,
            Factor::Conscientiousness => self.conscientiousness,
            Factor::Extraversion => self.extraversion,
            Factor::Agreeableness => self.agreeableness,
            Factor::Neuroticism => self.neuroticism,
        }
    }

    pub fn set(&mut self, f: Factor, value: f64) {
        match f {
            Factor::Openness => self.openness = value,
            Factor::Conscientiousness => self.conscientiousness = value,
            Factor::Extraversion => self.extraversion = value,
            Factor::Agreeableness => self.agreeableness = value,
            Factor::Neuroticism => self.neuroticism = value,
        }
    }

    /// In O, C, E, A, N order.
    pub fn values(&self) -> [f64; 5] {
        Factor::ALL.map(|f| self.get(f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemRegistry {
    items: Vec<ItemEquation>,
}

const DEFAULT_ITEMS: [(&str, Factor, &str); 10] = [
    ("C1", Factor::Conscientiousness, "s + 1 / alpha"),
    ("C2", Factor::Conscientiousness, "net_displacement / max(path_length, 1e-9)"),
    ("E1", Factor::Extraversion, "soc"),
    ("E2", Factor::Extraversion, "mean_neighbors"),
    ("A1", Factor::Agreeableness, "col"),
    ("A2", Factor::Agreeableness, "1 / (1 + mean_distance)"),
    ("N1", Factor::Neuroticism, "iso"),
    ("N2", Factor::Neuroticism, "speed_std"),
    ("O1", Factor::Openness, "path_length / max(0.01, net_displacement)"),
    ("O2", Factor::Openness, "heading_std"),
];

impl Default for ItemRegistry {
    fn default() -> Self {
        let items = DEFAULT_ITEMS
            .iter()
            .map(|(id, f, e)| ItemEquation::new(id, *f, e).expect("built-in item expressions parse"))
            .collect();
        Self { items }
    }
}

impl ItemRegistry {
    /// Fails with [`PsycheError::EmptyFactor`] unless every factor has an item.
    pub fn new(items: Vec<ItemEquation>) -> Result<Self, PsycheError> {
        let mut seen = std::collections::BTreeSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(PsycheError::DuplicateItem(item.id.clone()));
            }
        }
        let reg = Self { items };
        reg.validate()?;
        Ok(reg)
    }

    pub fn validate(&self) -> Result<(), PsycheError> {
        for f in Factor::ALL {
            if !self.items.iter().any(|i| i.factor == f) {
                return Err(PsycheError::EmptyFactor(f));
            }
        }
        Ok(())
    }

    pub fn items(&self) -> &[ItemEquation] {
        &self.items
    }

    /// One `id;factor;expression` per line; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self, PsycheError> {
        let mut items = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.splitn(3, ';').map(str::trim).collect();
            let [id, factor, expression] = fields[..] else {
                return Err(PsycheError::BadRegistryLine {
                    line: n + 1,
                    reason: "expected `id;factor;expression`".into(),
                });
            };
            if id.is_empty() {
                return Err(PsycheError::BadRegistryLine {
                    line: n + 1,
                    reason: "empty item id".into(),
                });
            }
            let factor = factor
                .parse::<Factor>()
                .map_err(|reason| PsycheError::BadRegistryLine { line: n + 1, reason })?;
            let item = ItemEquation::new(id, factor, expression)
                .map_err(|source| PsycheError::BadExpression { line: n + 1, source })?;
            items.push(item);
        }
        Self::new(items)
    }

    pub fn to_text(&self) -> String {
        self.items
            .iter()
            .map(|i| format!("{};{};{}\n", i.id, i.factor, i.description))
            .collect()
    }
}

/// Likert-normalized answers, `answers[item][pedestrian]`.
pub fn likert_answers(registry: &ItemRegistry, features: &[FeatureVector]) -> Vec<Vec<f64>> {
    registry
        .items()
        .par_iter()
        .map(|item| {
            let raws: Vec<f64> = features.iter().map(|v| eval_item(item, v)).collect();
            normalize_likert(&raws)
        })
        .collect()
}

/// Factor score from the Likert answers of its items.
fn factor_score(likerts: &[f64]) -> f64 {
    let mean = likerts.iter().sum::<f64>() / likerts.len() as f64;
    ((mean - LIKERT_MIN) / (LIKERT_MAX - LIKERT_MIN)).clamp(0.0, 1.0)
}

/// Profiles for every pedestrian, in the order of `features`.
pub fn ocean_profiles(registry: &ItemRegistry, features: &[FeatureVector]) -> Result<Vec<OceanProfile>, PsycheError> {
    registry.validate()?;
    let answers = likert_answers(registry, features);
    Ok((0..features.len())
        .map(|p| {
            let mut profile = OceanProfile::default();
            for f in Factor::ALL {
                let likerts: Vec<f64> = registry
                    .items()
                    .iter()
                    .zip(&answers)
                    .filter(|(item, _)| item.factor == f)
                    .map(|(_, col)| col[p])
                    .collect();
                profile.set(f, factor_score(&likerts));
            }
            profile
        })
        .collect())
}

/// Profile of one pedestrian, normalized against everyone in `features`.
pub fn ocean_profile(
    pedestrian_id: u32,
    registry: &ItemRegistry,
    features: &[FeatureVector],
) -> Result<OceanProfile, PsycheError> {
    if features.is_empty() {
        return Err(PsycheError::NoPedestrians);
    }
    let idx = features
        .iter()
        .position(|v| v.pedestrian_id == pedestrian_id)
        .ok_or(PsycheError::UnknownPedestrian(pedestrian_id))?;
    Ok(ocean_profiles(registry, features)?[idx])
}
