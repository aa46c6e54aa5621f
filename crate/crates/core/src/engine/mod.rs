//! Seeded simulator of the ego-alter protocol.
//!
//! A trial runs C1 first and records its per-round follower tallies as the
//! [`ReferenceHistory`]. C2 to C4 then run as independent ego populations
//! that see transformations of those recorded counts.
//!
//! Randomness comes from one ChaCha8 stream per (condition, round), derived
//! from the trial seed, so a condition's output never depends on how many
//! draws another condition made.

mod config;
mod policy;
mod script;
mod signals;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{PolicyParams, TrialConfig};
pub use policy::{weighted_sample, AgentPolicy, DefaultPolicy, RoundView, StickyPolicy};
pub use script::{AlterScript, BinUniverse};
pub use signals::{rank_source, signal_transform, ReferenceHistory};

use crate::dataset::{Condition, IdeaRecord, RatingRow, Role, TallyRow};
use crate::netmetrics::{AlterId, FollowerTally, NetError};

pub type SimRng = ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("alter script: {0}")]
    Script(String),
    #[error("policy: {0}")]
    Policy(String),
    #[error("round {0} is not in the reference history")]
    UnknownRound(u8),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Independent generator for stream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn round_stream(condition: Condition, round: u8) -> u64 {
    (condition.index() as u64) << 8 | u64::from(round)
}

/// Balanced round-robin wiring: ego `e` follows alters `(e * k + j) mod n`
/// for `j < k`, so alters share the `egos * k` follow slots evenly.
pub fn init_network(cfg: &TrialConfig) -> Result<Vec<Vec<usize>>, EngineError> {
    cfg.validate()?;
    let (n, k) = (cfg.num_alters, cfg.follows_per_ego);
    Ok((0..cfg.egos_per_condition)
        .map(|e| {
            let mut f: Vec<usize> = (0..k).map(|j| (e * k + j) % n).collect();
            f.sort_unstable();
            f
        })
        .collect())
}

/// Everything that happened in one round of one condition. Alters and bins
/// are indices into the script's alters and the round's [`BinUniverse`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoundState {
    pub round: u8,
    /// Follows in effect during the round, by ego.
    pub follows: Vec<Vec<usize>>,
    /// Shown count per alter; `None` in C1.
    pub shown: Option<Vec<u64>>,
    pub turn1: Vec<Vec<usize>>,
    pub turn2: Vec<Vec<usize>>,
    /// `ratings[ego][alter]` on 1..=5.
    pub ratings: Vec<Vec<u8>>,
    /// Follows chosen at the end of the round; these carry into the next.
    pub next_follows: Vec<Vec<usize>>,
}

impl RoundState {
    /// Followers per alter after the round's follow update.
    pub fn follower_counts(&self, num_alters: usize) -> Vec<u64> {
        let mut counts = vec![0u64; num_alters];
        for f in &self.next_follows {
            for &a in f {
                counts[a] += 1;
            }
        }
        counts
    }
}

fn shown_counts(
    condition: Condition,
    reference: Option<&ReferenceHistory>,
    round: u8,
    alters: &[AlterId],
) -> Result<Option<Vec<u64>>, EngineError> {
    if !condition.shows_signals() {
        return Ok(None);
    }
    let reference =
        reference.ok_or_else(|| EngineError::Script(format!("{condition} needs the C1 reference history")))?;
    let map = signal_transform(condition, reference, round)?;
    alters
        .iter()
        .map(|a| {
            map.get(a)
                .copied()
                .flatten()
                .ok_or_else(|| EngineError::Net(NetError::UnknownAlter(a.to_string())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn check_distinct(what: &str, ego: usize, picks: &[usize], bound: usize) -> Result<(), EngineError> {
    let mut sorted = picks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != picks.len() || picks.iter().any(|&p| p >= bound) {
        return Err(EngineError::Policy(format!(
            "ego {ego}: {what} {picks:?} not distinct indices below {bound}"
        )));
    }
    Ok(())
}

/// One round: turn-1 ideas, stimulus exposure to the followed alters'
/// ideas, turn-2 ideas, ratings of every alter and the follow update.
#[allow(clippy::too_many_arguments)]
pub fn run_round(
    cfg: &TrialConfig,
    script: &AlterScript,
    follows: &[Vec<usize>],
    round: u8,
    condition: Condition,
    reference: Option<&ReferenceHistory>,
    policy: &dyn AgentPolicy,
    rng: &mut SimRng,
) -> Result<RoundState, EngineError> {
    let n = script.alters().len();
    let universe = script.universe(round, &cfg.policy);
    let alter_bins: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            script
                .ideas(round, a)
                .iter()
                .map(|i| universe.index_of(&i.bin).expect("universe holds script bins"))
                .collect()
        })
        .collect();
    let shown = shown_counts(condition, reference, round, script.alters())?;
    let view = RoundView {
        round,
        universe: &universe,
        alter_bins: &alter_bins,
        shown: shown.as_deref(),
        follows_per_ego: cfg.follows_per_ego,
    };

    let egos = follows.len();
    let mut state = RoundState {
        round,
        follows: follows.to_vec(),
        shown: shown.clone(),
        turn1: Vec::with_capacity(egos),
        turn2: Vec::with_capacity(egos),
        ratings: Vec::with_capacity(egos),
        next_follows: Vec::with_capacity(egos),
    };
    for (e, current) in follows.iter().enumerate() {
        let t1 = policy.turn1(&view, rng);
        check_distinct("turn-1 bins", e, &t1, universe.len())?;
        let stimuli: Vec<usize> = current.iter().flat_map(|&a| alter_bins[a].iter().copied()).collect();
        let t2 = policy.turn2(&view, &t1, &stimuli, rng);
        check_distinct("turn-2 bins", e, &t2, universe.len())?;
        let ratings: Vec<u8> = (0..n).map(|a| policy.rate(&view, a, rng)).collect();
        if let Some(r) = ratings.iter().find(|r| !(1..=5).contains(*r)) {
            return Err(EngineError::Policy(format!("ego {e}: rating {r} outside 1..=5")));
        }
        let mut next = policy.choose_follows(&view, current, &ratings, rng);
        if next.len() != cfg.follows_per_ego {
            return Err(EngineError::Policy(format!(
                "ego {e} follows {} alters, expected {}",
                next.len(),
                cfg.follows_per_ego
            )));
        }
        check_distinct("follows", e, &next, n)?;
        next.sort_unstable();
        state.turn1.push(t1);
        state.turn2.push(t2);
        state.ratings.push(ratings);
        state.next_follows.push(next);
    }
    Ok(state)
}

/// All rounds of one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRun {
    pub condition: Condition,
    pub egos: Vec<String>,
    pub states: Vec<RoundState>,
}

impl ConditionRun {
    pub fn tally(&self, alters: &[AlterId], round: u8) -> Result<FollowerTally, NetError> {
        let counts = self.states[round as usize - 1].follower_counts(alters.len());
        FollowerTally::new(alters.iter().cloned().zip(counts))
    }
}

/// Drives whole conditions and trials for one config, script and policy.
pub struct Simulator<'a> {
    pub cfg: &'a TrialConfig,
    pub script: &'a AlterScript,
    pub policy: &'a dyn AgentPolicy,
}

impl<'a> Simulator<'a> {
    pub fn new(
        cfg: &'a TrialConfig,
        script: &'a AlterScript,
        policy: &'a dyn AgentPolicy,
    ) -> Result<Self, EngineError> {
        cfg.validate()?;
        if script.alters().len() != cfg.num_alters || script.rounds() != cfg.rounds {
            return Err(EngineError::Script(format!(
                "script covers {} alters x {} rounds, config needs {} x {}",
                script.alters().len(),
                script.rounds(),
                cfg.num_alters,
                cfg.rounds
            )));
        }
        Ok(Simulator { cfg, script, policy })
    }

    pub fn ego_id(&self, condition: Condition, ego: usize) -> String {
        format!("t{}-{}-e{:02}", self.cfg.trial, condition.label(), ego + 1)
    }

    pub fn run_condition(
        &self,
        condition: Condition,
        reference: Option<&ReferenceHistory>,
    ) -> Result<ConditionRun, EngineError> {
        let mut follows = init_network(self.cfg)?;
        let mut states = Vec::with_capacity(self.cfg.rounds as usize);
        for round in 1..=self.cfg.rounds {
            let mut rng = substream(self.cfg.seed, round_stream(condition, round));
            let state = run_round(
                self.cfg,
                self.script,
                &follows,
                round,
                condition,
                reference,
                self.policy,
                &mut rng,
            )?;
            follows = state.next_follows.clone();
            states.push(state);
        }
        Ok(ConditionRun {
            condition,
            egos: (0..self.cfg.egos_per_condition)
                .map(|e| self.ego_id(condition, e))
                .collect(),
            states,
        })
    }

    /// Runs C1 and freezes its tallies as the reference history.
    pub fn run_reference_phase(&self) -> Result<(ConditionRun, ReferenceHistory), EngineError> {
        let c1 = self.run_condition(Condition::C1, None)?;
        let tallies = (1..=self.cfg.rounds)
            .map(|r| c1.tally(self.script.alters(), r))
            .collect::<Result<Vec<_>, _>>()?;
        let reference = ReferenceHistory::from_tallies(tallies)?;
        Ok((c1, reference))
    }

    pub fn run_trial(&self) -> Result<TrialOutput, EngineError> {
        let (c1, reference) = self.run_reference_phase()?;
        let mut conditions = vec![c1];
        for c in [Condition::C2, Condition::C3, Condition::C4] {
            conditions.push(self.run_condition(c, Some(&reference))?);
        }
        Ok(TrialOutput {
            config: self.cfg.clone(),
            script: self.script.clone(),
            reference,
            conditions,
        })
    }
}

/// A full trial: C1 to C4 in condition order.
#[derive(Debug, Clone)]
pub struct TrialOutput {
    pub config: TrialConfig,
    pub script: AlterScript,
    pub reference: ReferenceHistory,
    pub conditions: Vec<ConditionRun>,
}

impl TrialOutput {
    pub fn condition(&self, condition: Condition) -> &ConditionRun {
        &self.conditions[condition.index()]
    }

    /// Alter ideas (turn 1, no condition) followed by every ego idea.
    pub fn idea_records(&self) -> Vec<IdeaRecord> {
        let trial = self.config.trial;
        let mut out: Vec<IdeaRecord> = Vec::new();
        for round in 1..=self.config.rounds {
            for (a, alter) in self.script.alters().iter().enumerate() {
                for idea in self.script.ideas(round, a) {
                    out.push(IdeaRecord {
                        participant: alter.to_string(),
                        role: Role::Alter,
                        trial,
                        condition: None,
                        round,
                        turn: 1,
                        text: idea.text.clone(),
                        bin: Some(idea.bin.clone()),
                    });
                }
            }
        }
        for run in &self.conditions {
            for state in &run.states {
                let universe = self.script.universe(state.round, &self.config.policy);
                for (e, ego) in run.egos.iter().enumerate() {
                    for (turn, bins) in [(1u8, &state.turn1[e]), (2, &state.turn2[e])] {
                        for &k in bins {
                            out.push(IdeaRecord {
                                participant: ego.clone(),
                                role: Role::Ego,
                                trial,
                                condition: Some(run.condition),
                                round: state.round,
                                turn,
                                text: universe.text(k).to_string(),
                                bin: Some(universe.bin(k).to_string()),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn tally_rows(&self) -> Vec<TallyRow> {
        let alters = self.script.alters();
        let mut out = Vec::new();
        for run in &self.conditions {
            for state in &run.states {
                for (alter, followers) in alters.iter().zip(state.follower_counts(alters.len())) {
                    out.push(TallyRow {
                        trial: self.config.trial,
                        condition: run.condition,
                        round: state.round,
                        alter: alter.to_string(),
                        followers,
                    });
                }
            }
        }
        out
    }

    pub fn rating_rows(&self) -> Vec<RatingRow> {
        let alters = self.script.alters();
        let mut out = Vec::new();
        for run in &self.conditions {
            for state in &run.states {
                for (e, ego) in run.egos.iter().enumerate() {
                    for (alter, &rating) in alters.iter().zip(&state.ratings[e]) {
                        out.push(RatingRow {
                            trial: self.config.trial,
                            condition: run.condition,
                            round: state.round,
                            ego: ego.clone(),
                            alter: alter.to_string(),
                            rating,
                        });
                    }
                }
            }
        }
        out
    }
}
