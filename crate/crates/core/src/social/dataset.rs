use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SocialError, SOCIAL_SPACE};

/// Probability that a synthetic label is flipped.
pub const LABEL_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocialLabel {
    Social,
    NonSocial,
}

impl SocialLabel {
    /// Noise-free labelling rule for the synthetic training set.
    pub fn reference(collectivity: f64, mean_distance: f64, neighbor_count: u32) -> Self {
        if neighbor_count >= 1 && collectivity >= 0.5 && mean_distance <= SOCIAL_SPACE {
            SocialLabel::Social
        } else {
            SocialLabel::NonSocial
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SocialLabel::Social => SocialLabel::NonSocial,
            SocialLabel::NonSocial => SocialLabel::Social,
        }
    }

    /// Output-unit index of the class.
    pub fn class_index(self) -> usize {
        match self {
            SocialLabel::Social => 0,
            SocialLabel::NonSocial => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocialSample {
    pub collectivity: f64,
    pub mean_distance: f64,
    pub neighbor_count: u32,
    /// Observed (possibly noisy) label used for training.
    pub label: SocialLabel,
    /// What the labelling rule says before noise.
    pub reference_label: SocialLabel,
}

impl SocialSample {
    pub fn inputs(&self) -> [f64; 3] {
        [self.collectivity, self.mean_distance, f64::from(self.neighbor_count)]
    }
}

/// Uniform draws of collectivity in [0,1], mean distance in [0,10] m and
/// neighbor count in 0..=10, labelled by [`SocialLabel::reference`] with
/// [`LABEL_NOISE`] of the labels flipped.
pub fn synthesize_socialization_dataset(n: usize, seed: u64) -> Result<Vec<SocialSample>, SocialError> {
    if n == 0 {
        return Err(SocialError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let collectivity = rng.random_range(0.0..=1.0);
            let mean_distance = rng.random_range(0.0..=10.0);
            let neighbor_count = rng.random_range(0..=10u32);
            let reference_label = SocialLabel::reference(collectivity, mean_distance, neighbor_count);
            let label = if rng.random_bool(LABEL_NOISE) {
                reference_label.flipped()
            } else {
                reference_label
            };
            SocialSample {
                collectivity,
                mean_distance,
                neighbor_count,
                label,
                reference_label,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_examples() {
        assert_eq!(SocialLabel::reference(0.9, 1.0, 3), SocialLabel::Social);
        assert_eq!(SocialLabel::reference(0.1, 8.0, 0), SocialLabel::NonSocial);
        assert_eq!(SocialLabel::reference(0.9, 1.0, 0), SocialLabel::NonSocial);
        assert_eq!(SocialLabel::reference(0.5, 3.6, 1), SocialLabel::Social);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = synthesize_socialization_dataset(500, 7).unwrap();
        let b = synthesize_socialization_dataset(500, 7).unwrap();
        let c = synthesize_socialization_dataset(500, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ranges_and_noise_rate() {
        let s = synthesize_socialization_dataset(20_000, 1).unwrap();
        assert!(s.iter().all(|x| (0.0..=1.0).contains(&x.collectivity)
            && (0.0..=10.0).contains(&x.mean_distance)
            && x.neighbor_count <= 10));
        let flipped = s.iter().filter(|x| x.label != x.reference_label).count() as f64 / s.len() as f64;
        assert!((flipped - LABEL_NOISE).abs() < 0.01, "flip rate {flipped}");
    }

    #[test]
    fn zero_samples_rejected() {
        assert_eq!(synthesize_socialization_dataset(0, 1), Err(SocialError::EmptyDataset));
    }
}
