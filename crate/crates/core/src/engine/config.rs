use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::dataset::MAX_ROUND;

/// Size and seed of one simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    /// Trial number written to every output row.
    pub trial: u32,
    pub num_alters: usize,
    pub egos_per_condition: usize,
    pub rounds: u8,
    pub follows_per_ego: usize,
    pub seed: u64,
    pub policy: PolicyParams,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trial: 1,
            num_alters: 6,
            egos_per_condition: 18,
            rounds: 5,
            follows_per_ego: 2,
            seed: 0,
            policy: PolicyParams::default(),
        }
    }
}

impl TrialConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Followers every alter holds after [`init_network`](super::Simulator::init_network)
    /// when the slots divide evenly.
    pub fn initial_followers(&self) -> usize {
        self.egos_per_condition * self.follows_per_ego / self.num_alters.max(1)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |msg: String| Err(EngineError::InvalidConfig(msg));
        if self.num_alters == 0 || !self.num_alters.is_multiple_of(3) {
            return fail(format!(
                "num_alters = {} must be a positive multiple of 3 (three tiers)",
                self.num_alters
            ));
        }
        if self.follows_per_ego == 0 || self.follows_per_ego >= self.num_alters {
            return fail(format!(
                "follows_per_ego = {} must be in 1..{}",
                self.follows_per_ego, self.num_alters
            ));
        }
        if self.egos_per_condition == 0 {
            return fail("egos_per_condition must be positive".into());
        }
        if !(1..=MAX_ROUND).contains(&self.rounds) {
            return fail(format!("rounds = {} must be in 1..={MAX_ROUND}", self.rounds));
        }
        self.policy.validate()
    }
}

/// Parameters of the default agent policy. None of these are estimated from
/// human data; they only shape the synthetic workload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    /// Exponent on `(shown + anchor_bias)` when picking alters to follow.
    pub gamma: f64,
    pub anchor_bias: f64,
    /// Zipf exponent of bin popularity: bin `k` is drawn with weight
    /// `(k + 1)^-zipf_exponent`.
    pub zipf_exponent: f64,
    /// Number of distinct idea bins per round (per prompt object).
    pub bin_universe: usize,
    pub turn1_ideas: usize,
    pub turn2_ideas: usize,
    /// Ideas per alter per round in a synthetic alter script.
    pub alter_ideas: usize,
    /// Bins within this many positions of a stimulus count as adjacent.
    pub adjacency_window: usize,
    /// Extra weight multiplier for bins adjacent to a stimulus.
    pub stimulus_boost: f64,
    /// Standard deviation of rating noise, in rating points.
    pub rating_noise: f64,
    /// Rating shift per unit of relative shown popularity.
    pub rating_anchor: f64,
    /// Probability an ego keeps its current follows for the next round.
    pub stay_probability: f64,
    /// Words used to render synthetic idea text; bin `k` uses entries
    /// `k` and `k + 7` (mod length).
    pub vocabulary: Vec<String>,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            gamma: 1.0,
            anchor_bias: 1.0,
            zipf_exponent: 1.0,
            bin_universe: 40,
            turn1_ideas: 3,
            turn2_ideas: 2,
            alter_ideas: 4,
            adjacency_window: 2,
            stimulus_boost: 4.0,
            rating_noise: 0.6,
            rating_anchor: 0.5,
            stay_probability: 0.2,
            vocabulary: DEFAULT_VOCABULARY.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |msg: &str| Err(EngineError::InvalidConfig(msg.to_string()));
        let finite = [
            self.gamma,
            self.anchor_bias,
            self.zipf_exponent,
            self.stimulus_boost,
            self.rating_noise,
            self.rating_anchor,
            self.stay_probability,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return fail("policy parameters must be finite");
        }
        if self.gamma < 0.0 || self.anchor_bias < 0.0 || self.zipf_exponent < 0.0 {
            return fail("gamma, anchor_bias and zipf_exponent must be non-negative");
        }
        if self.stimulus_boost < 0.0 || self.rating_noise < 0.0 {
            return fail("stimulus_boost and rating_noise must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.stay_probability) {
            return fail("stay_probability must be in [0, 1]");
        }
        if self.turn1_ideas + self.turn2_ideas + self.alter_ideas > self.bin_universe {
            return fail("bin_universe is smaller than the ideas drawn per round");
        }
        if self.vocabulary.is_empty() {
            return fail("vocabulary must not be empty");
        }
        Ok(())
    }
}

const DEFAULT_VOCABULARY: [&str; 24] = [
    "doorstop",
    "paperweight",
    "weapon",
    "planter",
    "bookend",
    "step",
    "hammer",
    "anchor",
    "sculpture",
    "oven",
    "pillow",
    "barrier",
    "bench",
    "grill",
    "trophy",
    "easel",
    "toy",
    "exercise",
    "lamp",
    "shelf",
    "drum",
    "mould",
    "press",
    "game",
];
