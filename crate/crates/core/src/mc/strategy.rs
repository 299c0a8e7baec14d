use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::board::CellId;
use crate::error::{GameError, Result};
use crate::exact::{Solver, TieRule};
use crate::game::GameSpec;
use crate::percolation::{estimate_pivotal, PivotalEstimate};
use crate::position::{GamePosition, Player};
use crate::rng;

/// `⌈L⁴ ε⁻² ln(L⁴/ε)⌉`: samples per move for side length `l` and accuracy
/// `epsilon`.
pub fn sample_size_for(l: usize, epsilon: f64) -> Result<u64> {
    if l == 0 {
        return Err(GameError::Domain("side length must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GameError::Domain(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let l4 = (l as f64).powi(4);
    let n = (l4 / (epsilon * epsilon) * (l4 / epsilon).ln()).ceil();
    Ok((n as u64).max(1))
}

/// Parameters of the sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub samples: u64,
    pub tie_rule: TieRule,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(GameError::Domain("need at least one sample per move".into()));
        }
        Ok(Self { samples, tie_rule: TieRule::LowestId, seed })
    }

    /// Sample count from [`sample_size_for`], clamped to `cap`.
    pub fn from_epsilon(l: usize, epsilon: f64, cap: u64, seed: u64) -> Result<Self> {
        Self::new(sample_size_for(l, epsilon)?.min(cap.max(1)), seed)
    }
}

/// Plays the undecided cell most often pivotal over `config.samples` random
/// completions of `position`, drawn with the position's coin bias.
pub fn choose_move_mc(position: &GamePosition, config: &StrategyConfig) -> Result<(CellId, PivotalEstimate)> {
    let mut cells = position.legal_moves();
    if cells.is_empty() {
        return Err(GameError::GameOver);
    }
    let est = estimate_pivotal(position, config.samples, config.seed)?;
    if config.tie_rule == TieRule::HighestId {
        cells.reverse();
    }
    let cell = est.argmax(&cells).expect("nonempty");
    Ok((cell, est))
}

/// A move-selection rule: a deterministic function of the position, the
/// mover and a per-move seed.
pub trait Strategy: Send + Sync {
    fn choose(&self, position: &GamePosition, mover: Player, seed: u64) -> Result<CellId>;
    fn name(&self) -> String;
}

/// Serializable strategy choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategyKind {
    Exact {
        #[serde(default)]
        tie_rule: TieRule,
    },
    MonteCarlo {
        samples: u64,
        #[serde(default)]
        tie_rule: TieRule,
    },
    Random,
}

impl StrategyKind {
    /// Builds the strategy for games of `spec` with coin bias `p`. The exact
    /// strategy solves the start position here.
    pub fn build(&self, spec: &Arc<GameSpec>, p: f64) -> Result<Box<dyn Strategy>> {
        Ok(match *self {
            StrategyKind::Exact { tie_rule } => Box::new(ExactStrategy::new(spec, p, tie_rule)?),
            StrategyKind::MonteCarlo { samples, tie_rule } => {
                let mut config = StrategyConfig::new(samples, 0)?;
                config.tie_rule = tie_rule;
                Box::new(McStrategy(config))
            }
            StrategyKind::Random => Box::new(RandomStrategy),
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = GameError;

    /// `exact`, `random`, `mc` (1000 samples) or `mc:N`.
    fn from_str(s: &str) -> Result<Self> {
        let tie_rule = TieRule::LowestId;
        match s {
            "exact" => Ok(StrategyKind::Exact { tie_rule }),
            "random" => Ok(StrategyKind::Random),
            "mc" => Ok(StrategyKind::MonteCarlo { samples: 1000, tie_rule }),
            _ => {
                let n = s
                    .strip_prefix("mc:")
                    .and_then(|n| n.parse::<u64>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| GameError::Domain(format!("unknown strategy {s:?}")))?;
                Ok(StrategyKind::MonteCarlo { samples: n, tie_rule })
            }
        }
    }
}

/// Optimal play from a table solved once for the start position.
pub struct ExactStrategy {
    solver: Solver<f64>,
    tie_rule: TieRule,
}

impl ExactStrategy {
    pub fn new(spec: &Arc<GameSpec>, p: f64, tie_rule: TieRule) -> Result<Self> {
        let root = GamePosition::new(spec.clone(), p)?;
        Ok(Self { solver: Solver::new(&root, p)?, tie_rule })
    }
}

impl Strategy for ExactStrategy {
    fn choose(&self, position: &GamePosition, mover: Player, _seed: u64) -> Result<CellId> {
        let best = self.solver.optimal_for(position, mover)?;
        Ok(self.tie_rule.pick(&best).expect("optimal set is nonempty"))
    }

    fn name(&self) -> String {
        "exact".into()
    }
}

/// The sampling strategy; the per-move seed replaces `config.seed`.
pub struct McStrategy(pub StrategyConfig);

impl Strategy for McStrategy {
    fn choose(&self, position: &GamePosition, _mover: Player, seed: u64) -> Result<CellId> {
        let config = StrategyConfig { seed, ..self.0 };
        Ok(choose_move_mc(position, &config)?.0)
    }

    fn name(&self) -> String {
        format!("mc:{}", self.0.samples)
    }
}

/// Uniform over the undecided cells.
pub struct RandomStrategy;

impl Strategy for RandomStrategy {
    fn choose(&self, position: &GamePosition, _mover: Player, seed: u64) -> Result<CellId> {
        let cells = position.legal_moves();
        if cells.is_empty() {
            return Err(GameError::GameOver);
        }
        let k = rng::stream(seed, 0).random_range(0..cells.len());
        Ok(cells[k])
    }

    fn name(&self) -> String {
        "random".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_pivotal_probabilities;
    use crate::game::GameKind;

    fn spec(kind: GameKind) -> Arc<GameSpec> {
        Arc::new(GameSpec::without_precoloring(kind).unwrap())
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(sample_size_for(3, 0.1).unwrap(), 54_246);
        assert!(sample_size_for(1, 0.999).unwrap() >= 1);
        assert!(sample_size_for(4, 0.2).unwrap() > sample_size_for(3, 0.2).unwrap());
        assert!(sample_size_for(0, 0.1).is_err());
        assert!(sample_size_for(3, 1.0).is_err());
        assert!(sample_size_for(3, 0.0).is_err());
    }

    #[test]
    fn one_undecided_cell() {
        let s = spec(GameKind::Hex { rows: 2, cols: 2 });
        let pos =
            GamePosition::from_owners(s, 0.5, vec![Some(Player::I), None, Some(Player::II), Some(Player::I)]).unwrap();
        let (cell, est) = choose_move_mc(&pos, &StrategyConfig::new(50, 3).unwrap()).unwrap();
        assert_eq!(cell, 1);
        assert_eq!(est.counts[1], 50);
    }

    #[test]
    fn game_over_is_an_error() {
        let s = spec(GameKind::Hex { rows: 1, cols: 1 });
        let pos = GamePosition::new(s, 0.5).unwrap().apply_move(0, Player::I).unwrap();
        assert_eq!(choose_move_mc(&pos, &StrategyConfig::new(5, 0).unwrap()).unwrap_err(), GameError::GameOver);
    }

    #[test]
    fn majority_leaves_are_half_pivotal() {
        let pos = GamePosition::new(spec(GameKind::RecursiveMajority { h: 1 }), 0.5).unwrap();
        let n = 20_000u64;
        let (_, est) = choose_move_mc(&pos, &StrategyConfig::new(n, 9).unwrap()).unwrap();
        let sigma = (n as f64 * 0.25).sqrt();
        for c in 0..3 {
            assert!((est.counts[c] as f64 - n as f64 / 2.0).abs() < 3.0 * sigma, "{:?}", est.counts);
        }
    }

    #[test]
    fn hex3_choice_is_near_best() {
        let pos = GamePosition::new(spec(GameKind::Hex { rows: 3, cols: 3 }), 0.5).unwrap();
        let exact: Vec<f64> = exact_pivotal_probabilities(&pos, 0.5).unwrap();
        let best = exact.iter().cloned().fold(0.0, f64::max);
        let (cell, est) = choose_move_mc(&pos, &StrategyConfig::new(100_000, 11).unwrap()).unwrap();
        assert!(best - exact[cell] <= 0.01);
        for c in 0..9 {
            assert!((est.estimate(c) - exact[c]).abs() < 3.0 * est.stderr(c).max(1e-3));
        }
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(
            "mc:500".parse::<StrategyKind>().unwrap(),
            StrategyKind::MonteCarlo { samples: 500, tie_rule: TieRule::LowestId }
        );
        assert!("mc:0".parse::<StrategyKind>().is_err());
        assert!("greedy".parse::<StrategyKind>().is_err());
    }
}
