use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;

use super::{substream, EngineError, SimRng};
use crate::dataset::AlterIdea;
use crate::engine::config::{PolicyParams, TrialConfig};
use crate::engine::policy::weighted_sample;
use crate::netmetrics::AlterId;

/// The finite set of idea bins for one round's prompt, most common first.
#[derive(Debug, Clone)]
pub struct BinUniverse {
    bins: Vec<String>,
    texts: Vec<String>,
    index: HashMap<String, usize>,
}

impl BinUniverse {
    /// `bin_universe` synthetic bins named `r<round>-b<k>`.
    pub fn synthetic(round: u8, params: &PolicyParams) -> Self {
        let vocab = &params.vocabulary;
        let mut u = BinUniverse {
            bins: Vec::new(),
            texts: Vec::new(),
            index: HashMap::new(),
        };
        for k in 0..params.bin_universe {
            let text = format!("{} {}", vocab[k % vocab.len()], vocab[(k + 7) % vocab.len()]);
            u.push(format!("r{round}-b{k:02}"), text);
        }
        u
    }

    fn push(&mut self, bin: String, text: String) -> usize {
        if let Some(&i) = self.index.get(&bin) {
            return i;
        }
        let i = self.bins.len();
        self.index.insert(bin.clone(), i);
        self.bins.push(bin);
        self.texts.push(text);
        i
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bin(&self, k: usize) -> &str {
        &self.bins[k]
    }

    pub fn text(&self, k: usize) -> &str {
        &self.texts[k]
    }

    pub fn index_of(&self, bin: &str) -> Option<usize> {
        self.index.get(bin).copied()
    }

    /// Rarity of bin `k` in `[0, 1]`: 0 for the most common bin.
    pub fn rarity(&self, k: usize) -> f64 {
        if self.len() < 2 {
            0.0
        } else {
            k as f64 / (self.len() - 1) as f64
        }
    }
}

/// Alter ideas for every round, the stimuli shared by all conditions.
#[derive(Debug, Clone)]
pub struct AlterScript {
    alters: Vec<AlterId>,
    /// `[round - 1][alter index]`
    ideas: Vec<Vec<Vec<AlterIdea>>>,
}

impl AlterScript {
    /// Requires exactly `num_alters` alters with at least one idea in each
    /// of the configured rounds.
    pub fn from_ideas(ideas: Vec<AlterIdea>, cfg: &TrialConfig) -> Result<Self, EngineError> {
        let alters: BTreeSet<&str> = ideas.iter().map(|i| i.alter.as_str()).collect();
        if alters.len() != cfg.num_alters {
            return Err(EngineError::Script(format!(
                "script has {} alters, config expects {}",
                alters.len(),
                cfg.num_alters
            )));
        }
        let alters: Vec<AlterId> = alters.into_iter().map(AlterId::from).collect();
        let position: BTreeMap<&str, usize> = alters.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let mut grid = vec![vec![Vec::new(); alters.len()]; cfg.rounds as usize];
        for idea in &ideas {
            if idea.round == 0 || idea.round > cfg.rounds {
                return Err(EngineError::Script(format!(
                    "idea of {} in round {} outside 1..={}",
                    idea.alter, idea.round, cfg.rounds
                )));
            }
            grid[idea.round as usize - 1][position[idea.alter.as_str()]].push(idea.clone());
        }
        for (r, row) in grid.iter().enumerate() {
            for (a, cell) in row.iter().enumerate() {
                if cell.is_empty() {
                    return Err(EngineError::Script(format!(
                        "alter {} has no ideas in round {}",
                        alters[a],
                        r + 1
                    )));
                }
            }
        }
        Ok(AlterScript { alters, ideas: grid })
    }

    /// A seeded script over the synthetic bin universe. Alters differ in
    /// skill: skilled alters draw rarer bins.
    pub fn synthetic(cfg: &TrialConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        let p = &cfg.policy;
        let mut rng: SimRng = substream(cfg.seed, SCRIPT_STREAM);
        let n = cfg.num_alters;
        let mut skills: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1).max(1) as f64).collect();
        skills.shuffle(&mut rng);
        let mut ideas = Vec::new();
        for round in 1..=cfg.rounds {
            let universe = BinUniverse::synthetic(round, p);
            for (a, skill) in skills.iter().enumerate() {
                let exponent = p.zipf_exponent * (1.0 - skill);
                let weights: Vec<f64> = (0..universe.len()).map(|k| ((k + 1) as f64).powf(-exponent)).collect();
                let mut picks = weighted_sample(&weights, p.alter_ideas, &mut rng);
                picks.sort_unstable();
                for k in picks {
                    ideas.push(AlterIdea {
                        alter: format!("a{}", a + 1),
                        round,
                        bin: universe.bin(k).to_string(),
                        text: universe.text(k).to_string(),
                    });
                }
            }
        }
        Self::from_ideas(ideas, cfg)
    }

    /// Alters in id order; position in this slice is the alter index used
    /// throughout the simulator.
    pub fn alters(&self) -> &[AlterId] {
        &self.alters
    }

    pub fn ideas(&self, round: u8, alter: usize) -> &[AlterIdea] {
        &self.ideas[round as usize - 1][alter]
    }

    pub fn rounds(&self) -> u8 {
        self.ideas.len() as u8
    }

    pub fn all_ideas(&self) -> impl Iterator<Item = &AlterIdea> {
        self.ideas.iter().flatten().flatten()
    }

    /// The round's bin universe: synthetic bins followed by any script bins
    /// not already present.
    pub(crate) fn universe(&self, round: u8, params: &PolicyParams) -> BinUniverse {
        let mut u = BinUniverse::synthetic(round, params);
        for cell in &self.ideas[round as usize - 1] {
            for idea in cell {
                u.push(idea.bin.clone(), idea.text.clone());
            }
        }
        u
    }
}

const SCRIPT_STREAM: u64 = 1 << 40;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_script_has_full_shape() {
        let cfg = TrialConfig::default().with_seed(3);
        let s = AlterScript::synthetic(&cfg).unwrap();
        assert_eq!(s.alters().len(), 6);
        assert_eq!(s.rounds(), 5);
        for r in 1..=5 {
            for a in 0..6 {
                assert_eq!(s.ideas(r, a).len(), cfg.policy.alter_ideas);
            }
        }
        let again = AlterScript::synthetic(&cfg).unwrap();
        let bins = |s: &AlterScript| s.all_ideas().map(|i| i.bin.clone()).collect::<Vec<_>>();
        assert_eq!(bins(&s), bins(&again));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let cfg = TrialConfig::default();
        let mut ideas: Vec<AlterIdea> = AlterScript::synthetic(&cfg).unwrap().all_ideas().cloned().collect();
        ideas.retain(|i| !(i.alter == "a3" && i.round == 4));
        assert!(matches!(
            AlterScript::from_ideas(ideas.clone(), &cfg),
            Err(EngineError::Script(_))
        ));
        ideas.retain(|i| i.alter != "a3");
        assert!(matches!(
            AlterScript::from_ideas(ideas, &cfg),
            Err(EngineError::Script(_))
        ));
    }

    #[test]
    fn external_bins_extend_the_universe() {
        let cfg = TrialConfig::default();
        let ideas: Vec<AlterIdea> = (1..=6)
            .flat_map(|a| {
                (1..=5).map(move |r| AlterIdea {
                    alter: format!("x{a}"),
                    round: r,
                    bin: format!("ext-{a}"),
                    text: "brick".into(),
                })
            })
            .collect();
        let s = AlterScript::from_ideas(ideas, &cfg).unwrap();
        let u = s.universe(1, &cfg.policy);
        assert_eq!(u.len(), cfg.policy.bin_universe + 6);
        assert_eq!(u.index_of("ext-1"), Some(cfg.policy.bin_universe));
    }
}
