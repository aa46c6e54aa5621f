use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::script::BinUniverse;
use super::SimRng;
use crate::engine::config::PolicyParams;

/// What an ego sees when acting in one round.
#[derive(Debug, Clone, Copy)]
pub struct RoundView<'a> {
    pub round: u8,
    pub universe: &'a BinUniverse,
    /// Bin indices of each alter's ideas this round.
    pub alter_bins: &'a [Vec<usize>],
    /// Shown follower counts by alter index; `None` when no signal is shown.
    pub shown: Option<&'a [u64]>,
    pub follows_per_ego: usize,
}

/// Behavior of an ego. Every method receives the round's random stream;
/// the simulator validates what comes back.
pub trait AgentPolicy {
    /// Independent ideas (bin indices).
    fn turn1(&self, view: &RoundView<'_>, rng: &mut SimRng) -> Vec<usize>;

    /// Ideas after seeing `stimuli`, the bins of the followed alters.
    fn turn2(&self, view: &RoundView<'_>, own: &[usize], stimuli: &[usize], rng: &mut SimRng) -> Vec<usize>;

    /// Novelty rating of one alter's ideas on a 1..=5 scale.
    fn rate(&self, view: &RoundView<'_>, alter: usize, rng: &mut SimRng) -> u8;

    /// Alters to follow next round.
    fn choose_follows(&self, view: &RoundView<'_>, current: &[usize], ratings: &[u8], rng: &mut SimRng) -> Vec<usize>;
}

/// Zipf-weighted idea draws, stimulus-adjacent inspiration, rarity-driven
/// ratings with an anchoring shift, and signal-proportional following.
#[derive(Debug, Clone, Default)]
pub struct DefaultPolicy {
    pub params: PolicyParams,
}

impl DefaultPolicy {
    pub fn new(params: PolicyParams) -> Self {
        DefaultPolicy { params }
    }

    fn zipf(&self, k: usize) -> f64 {
        ((k + 1) as f64).powf(-self.params.zipf_exponent)
    }
}

impl AgentPolicy for DefaultPolicy {
    fn turn1(&self, view: &RoundView<'_>, rng: &mut SimRng) -> Vec<usize> {
        let weights: Vec<f64> = (0..view.universe.len()).map(|k| self.zipf(k)).collect();
        let mut picks = weighted_sample(&weights, self.params.turn1_ideas, rng);
        picks.sort_unstable();
        picks
    }

    fn turn2(&self, view: &RoundView<'_>, own: &[usize], stimuli: &[usize], rng: &mut SimRng) -> Vec<usize> {
        let window = self.params.adjacency_window;
        let weights: Vec<f64> = (0..view.universe.len())
            .map(|k| {
                // Egos may not resubmit their own or the stimuli's ideas.
                if own.contains(&k) || stimuli.contains(&k) {
                    return 0.0;
                }
                let adjacent = stimuli.iter().any(|&s| s.abs_diff(k) <= window);
                let boost = if adjacent {
                    1.0 + self.params.stimulus_boost
                } else {
                    1.0
                };
                self.zipf(k) * boost
            })
            .collect();
        let available = weights.iter().filter(|&&w| w > 0.0).count();
        let mut picks = weighted_sample(&weights, self.params.turn2_ideas.min(available), rng);
        picks.sort_unstable();
        picks
    }

    fn rate(&self, view: &RoundView<'_>, alter: usize, rng: &mut SimRng) -> u8 {
        let bins = &view.alter_bins[alter];
        let rarity = if bins.is_empty() {
            0.0
        } else {
            bins.iter().map(|&k| view.universe.rarity(k)).sum::<f64>() / bins.len() as f64
        };
        let mut score = 1.0 + 4.0 * rarity;
        if let Some(shown) = view.shown {
            let mean = shown.iter().sum::<u64>() as f64 / shown.len() as f64;
            if mean > 0.0 {
                score += self.params.rating_anchor * (shown[alter] as f64 / mean - 1.0);
            }
        }
        if self.params.rating_noise > 0.0 {
            let noise = Normal::new(0.0, self.params.rating_noise).expect("validated noise");
            score += noise.sample(rng);
        }
        score.round().clamp(1.0, 5.0) as u8
    }

    fn choose_follows(&self, view: &RoundView<'_>, current: &[usize], ratings: &[u8], rng: &mut SimRng) -> Vec<usize> {
        if rng.random_bool(self.params.stay_probability) {
            return current.to_vec();
        }
        let weights: Vec<f64> = match view.shown {
            Some(shown) => shown
                .iter()
                .map(|&s| (s as f64 + self.params.anchor_bias).powf(self.params.gamma))
                .collect(),
            None => ratings.iter().map(|&r| f64::from(r)).collect(),
        };
        let mut picks = weighted_sample(&weights, view.follows_per_ego, rng);
        picks.sort_unstable();
        picks
    }
}

/// Delegates to `inner` but never changes follows.
#[derive(Debug, Clone, Default)]
pub struct StickyPolicy<P> {
    pub inner: P,
}

impl<P: AgentPolicy> AgentPolicy for StickyPolicy<P> {
    fn turn1(&self, view: &RoundView<'_>, rng: &mut SimRng) -> Vec<usize> {
        self.inner.turn1(view, rng)
    }

    fn turn2(&self, view: &RoundView<'_>, own: &[usize], stimuli: &[usize], rng: &mut SimRng) -> Vec<usize> {
        self.inner.turn2(view, own, stimuli, rng)
    }

    fn rate(&self, view: &RoundView<'_>, alter: usize, rng: &mut SimRng) -> u8 {
        self.inner.rate(view, alter, rng)
    }

    fn choose_follows(&self, _: &RoundView<'_>, current: &[usize], _: &[u8], _: &mut SimRng) -> Vec<usize> {
        current.to_vec()
    }
}

/// Draws `k` distinct indices, each step proportional to the remaining
/// weights. Falls back to uniform choice once all remaining weights are zero.
pub fn weighted_sample<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let mut remaining: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, if w.is_finite() && w > 0.0 { w } else { 0.0 }))
        .collect();
    let mut out = Vec::with_capacity(k);
    while out.len() < k && !remaining.is_empty() {
        let total: f64 = remaining.iter().map(|(_, w)| w).sum();
        let pos = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            remaining
                .iter()
                .position(|&(_, w)| {
                    target -= w;
                    w > 0.0 && target < 0.0
                })
                .unwrap_or_else(|| remaining.iter().rposition(|&(_, w)| w > 0.0).expect("positive total"))
        } else {
            rng.random_range(0..remaining.len())
        };
        out.push(remaining.remove(pos).0);
    }
    out
}
