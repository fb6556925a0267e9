//! OCC emotions (fear, happiness, sadness, anger) from an OCEAN profile.
//!
//! Each factor selects its `+` row when its value is at least 0.5 and its
//! `-` row otherwise, with intensity `2 |value - 0.5|`. An emotion's raw
//! score is the intensity-weighted sum of the selected table entries, mapped
//! to [0, 1] by `0.5 + raw / (2 K)` where `K` is the largest magnitude the
//! raw sum can reach for that emotion.

use thiserror::Error;

use crate::psyche::{Factor, OceanProfile};

#[derive(Debug, Error, PartialEq)]
pub enum AffectError {
    #[error("factor value {0} lies outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emotion {
    Fear,
    Happiness,
    Sadness,
    Anger,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [Emotion::Fear, Emotion::Happiness, Emotion::Sadness, Emotion::Anger];

    fn column(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Fear => "fear",
            Emotion::Happiness => "happiness",
            Emotion::Sadness => "sadness",
            Emotion::Anger => "anger",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// Rows O+, O-, C+, C-, E+, E-, A+, A-, N+, N-; columns fear, happiness,
/// sadness, anger.
pub const EMOTION_TABLE: [[i8; 4]; 10] = [
    [0, 0, 0, -1],
    [0, 0, 0, 1],
    [-1, 0, 0, 0],
    [1, 0, 0, 0],
    [-1, 1, -1, -1],
    [1, 0, 0, 0],
    [0, 0, 0, -1],
    [0, 0, 0, 1],
    [1, -1, 1, 1],
    [-1, 1, -1, -1],
];

fn row_index(factor: Factor, sign: Sign) -> usize {
    let base = match factor {
        Factor::Openness => 0,
        Factor::Conscientiousness => 2,
        Factor::Extraversion => 4,
        Factor::Agreeableness => 6,
        Factor::Neuroticism => 8,
    };
    base + usize::from(sign == Sign::Negative)
}

pub fn table_entry(factor: Factor, sign: Sign, emotion: Emotion) -> i8 {
    EMOTION_TABLE[row_index(factor, sign)][emotion.column()]
}

/// Which row a factor value selects, and how strongly.
pub fn factor_contribution(value: f64) -> Result<(Sign, f64), AffectError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(AffectError::OutOfRange(value));
    }
    let sign = if value >= 0.5 { Sign::Positive } else { Sign::Negative };
    Ok((sign, 2.0 * (value - 0.5).abs()))
}

/// Largest attainable |raw score| for an emotion. Since every factor picks
/// one of its two rows at an intensity in [0, 1], the extremes are reached at
/// full intensity with the best row per factor.
pub fn emotion_bound(emotion: Emotion) -> f64 {
    let col = emotion.column();
    let (mut max, mut min) = (0i32, 0i32);
    for pair in EMOTION_TABLE.chunks(2) {
        let (a, b) = (i32::from(pair[0][col]), i32::from(pair[1][col]));
        max += a.max(b).max(0);
        min += a.min(b).min(0);
    }
    f64::from(max.max(-min))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmotionProfile {
    pub fear: f64,
    pub happiness: f64,
    pub sadness: f64,
    pub anger: f64,
}

impl EmotionProfile {
    pub fn get(&self, e: Emotion) -> f64 {
        match e {
            Emotion::Fear => self.fear,
            Emotion::Happiness => self.happiness,
            Emotion::Sadness => self.sadness,
            Emotion::Anger => self.anger,
        }
    }

    fn set(&mut self, e: Emotion, v: f64) {
        match e {
            Emotion::Fear => self.fear = v,
            Emotion::Happiness => self.happiness = v,
            Emotion::Sadness => self.sadness = v,
            Emotion::Anger => self.anger = v,
        }
    }

    /// Fear, happiness, sadness, anger.
    pub fn values(&self) -> [f64; 4] {
        Emotion::ALL.map(|e| self.get(e))
    }
}

/// Signed raw sums before normalization.
pub fn raw_emotion_scores(profile: &OceanProfile) -> Result<[f64; 4], AffectError> {
    let mut raw = [0.0; 4];
    for f in Factor::ALL {
        let (sign, intensity) = factor_contribution(profile.get(f))?;
        for e in Emotion::ALL {
            raw[e.column()] += f64::from(table_entry(f, sign, e)) * intensity;
        }
    }
    Ok(raw)
}

pub fn emotions_from_ocean(profile: &OceanProfile) -> Result<EmotionProfile, AffectError> {
    let raw = raw_emotion_scores(profile)?;
    let mut out = EmotionProfile::default();
    for e in Emotion::ALL {
        let score = 0.5 + raw[e.column()] / (2.0 * emotion_bound(e));
        out.set(e, score.clamp(0.0, 1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn contributions() {
        assert_eq!(factor_contribution(0.5), Ok((Sign::Positive, 0.0)));
        let (s, i) = factor_contribution(0.9).unwrap();
        assert_eq!(s, Sign::Positive);
        assert_abs_diff_eq!(i, 0.8, epsilon = 1e-15);
        assert_eq!(factor_contribution(0.0), Ok((Sign::Negative, 1.0)));
        assert_eq!(factor_contribution(1.1), Err(AffectError::OutOfRange(1.1)));
        assert!(factor_contribution(f64::NAN).is_err());
    }

    /// Brute force over every row choice at full intensity.
    fn enumerated_bound(e: Emotion) -> f64 {
        let mut best = 0i32;
        for mask in 0..32u32 {
            let mut sum = 0i32;
            for (k, f) in Factor::ALL.into_iter().enumerate() {
                let sign = if mask & (1 << k) == 0 { Sign::Positive } else { Sign::Negative };
                sum += i32::from(table_entry(f, sign, e));
            }
            best = best.max(sum.abs());
        }
        f64::from(best)
    }

    #[test]
    fn bounds() {
        assert_eq!(emotion_bound(Emotion::Fear), 3.0);
        assert_eq!(emotion_bound(Emotion::Happiness), 2.0);
        assert_eq!(emotion_bound(Emotion::Sadness), 2.0);
        assert_eq!(emotion_bound(Emotion::Anger), 4.0);
        for e in Emotion::ALL {
            assert_eq!(emotion_bound(e), enumerated_bound(e));
        }
    }

    #[test]
    fn neutral_profile() {
        let p = emotions_from_ocean(&OceanProfile::NEUTRAL).unwrap();
        assert_eq!(p.values(), [0.5; 4]);
    }

    #[test]
    fn high_extraversion() {
        let mut o = OceanProfile::NEUTRAL;
        o.extraversion = 0.9;
        let p = emotions_from_ocean(&o).unwrap();
        assert_abs_diff_eq!(p.happiness, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(p.anger, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.fear, 0.5 - 0.8 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.sadness, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn extremes_reach_the_ends() {
        // O-, C+, E+, A-, N- : happiness = 2/2
        let o = OceanProfile {
            openness: 0.0,
            conscientiousness: 1.0,
            extraversion: 1.0,
            agreeableness: 0.0,
            neuroticism: 0.0,
        };
        let p = emotions_from_ocean(&o).unwrap();
        assert_eq!(p.happiness, 1.0);
        assert_eq!(p.sadness, 0.0);
    }

    proptest! {
        #[test]
        fn scores_in_unit_interval(v in prop::array::uniform5(0.0..=1.0f64)) {
            let o = OceanProfile {
                openness: v[0],
                conscientiousness: v[1],
                extraversion: v[2],
                agreeableness: v[3],
                neuroticism: v[4],
            };
            for x in emotions_from_ocean(&o).unwrap().values() {
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }

        #[test]
        fn neuroticism_antisymmetry(t in 0.0001..=0.5f64) {
            let mut up = OceanProfile::NEUTRAL;
            up.neuroticism = 0.5 + t;
            let mut down = OceanProfile::NEUTRAL;
            down.neuroticism = 0.5 - t;
            let a = raw_emotion_scores(&up).unwrap();
            let b = raw_emotion_scores(&down).unwrap();
            for k in 0..4 {
                prop_assert!((a[k] + b[k]).abs() < 1e-12);
            }
        }
    }
}
