//! Index-addressed Monte Carlo over random completions.

use serde::{Deserialize, Serialize};

use crate::board::{BoardGraph, CellId};
use crate::error::{GameError, Result};
use crate::game::{GameKind, GameSpec};
use crate::par;
use crate::percolation::crossing::{black_wins, has_crossing};
use crate::percolation::pivotal::PivotalFinder;
use crate::percolation::Configuration;
use crate::position::{GamePosition, Player};
use crate::rng::{self, domain};

/// Fills the undecided cells of a fixed position from index-addressed
/// streams.
#[derive(Debug, Clone)]
pub struct Completer {
    base: Vec<bool>,
    undecided: Vec<CellId>,
    draws: Vec<bool>,
    p: f64,
    seed: u64,
}

impl Completer {
    pub fn new(owners: &[Option<Player>], p: f64, seed: u64) -> Self {
        let undecided: Vec<CellId> = (0..owners.len()).filter(|&c| owners[c].is_none()).collect();
        Self {
            base: owners.iter().map(|o| *o == Some(Player::I)).collect(),
            draws: vec![false; undecided.len()],
            undecided,
            p,
            seed: rng::derive_seed(seed, domain::COMPLETION, 0),
        }
    }

    pub fn for_position(position: &GamePosition, seed: u64) -> Self {
        Self::new(position.owners(), position.p(), seed)
    }

    pub fn undecided(&self) -> &[CellId] {
        &self.undecided
    }

    /// Writes completion `index` into `out`.
    pub fn fill(&mut self, index: u64, out: &mut Vec<bool>) {
        out.clear();
        out.extend_from_slice(&self.base);
        let mut stream = rng::stream(self.seed, index);
        rng::fill_bernoulli(&mut stream, self.p, &mut self.draws);
        for (&c, &d) in self.undecided.iter().zip(&self.draws) {
            out[c] = d;
        }
    }
}

/// Completion `index` of `position`: chosen cells keep their owner, every
/// undecided cell goes to player I with probability `p`.
pub fn sample_completion(position: &GamePosition, seed: u64, index: u64) -> Configuration {
    let mut out = Vec::new();
    Completer::for_position(position, seed).fill(index, &mut out);
    Configuration::new(out)
}

/// Fraction of `samples` full Bernoulli(`p`) configurations with a player-I
/// crossing, with its binomial standard error.
pub fn crossing_probability_mc(board: &BoardGraph, p: f64, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(GameError::Domain("need at least one sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GameError::Domain(format!("bias {p} outside [0, 1]")));
    }
    black_wins(board, &vec![false; board.n()])?;
    let owners = vec![None; board.n()];
    let hits = par::fold_indices(
        samples,
        || (0u64, Completer::new(&owners, p, seed), Vec::new()),
        |(hits, mut completer, mut buf), i| {
            completer.fill(i, &mut buf);
            let win = black_wins(board, &buf).expect("crossing board");
            (hits + u64::from(win), completer, buf)
        },
        |a, b| (a.0 + b.0, a.1, a.2),
    )
    .0;
    let est = hits as f64 / samples as f64;
    Ok((est, (est * (1.0 - est) / samples as f64).sqrt()))
}

/// Mean and standard error of the shortest player-I crossing over those of
/// `samples` Bernoulli(`p`) configurations that have one, with the number of
/// such configurations.
pub fn shortest_crossing_mc(board: &BoardGraph, p: f64, samples: u64, seed: u64) -> Result<(f64, f64, u64)> {
    if samples == 0 {
        return Err(GameError::Domain("need at least one sample".into()));
    }
    has_crossing(board, &vec![false; board.n()], false)?;
    let owners = vec![None; board.n()];
    let (count, sum, sq, _, _) = par::fold_indices(
        samples,
        || (0u64, 0u64, 0u64, Completer::new(&owners, p, seed), Vec::new()),
        |(count, sum, sq, mut completer, mut buf), i| {
            completer.fill(i, &mut buf);
            let r = has_crossing(board, &buf, true).expect("crossing board");
            match r.shortest_black_crossing_length {
                Some(len) => {
                    let len = len as u64;
                    (count + 1, sum + len, sq + len * len, completer, buf)
                }
                None => (count, sum, sq, completer, buf),
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3, a.4),
    );
    if count == 0 {
        return Err(GameError::Degenerate("no sampled configuration has a crossing".into()));
    }
    let mean = sum as f64 / count as f64;
    let var = if count > 1 { (sq as f64 - count as f64 * mean * mean) / (count - 1) as f64 } else { 0.0 };
    Ok((mean, (var.max(0.0) / count as f64).sqrt(), count))
}

/// Pivotal-set search for any monotone win-or-lose game: the articulation
/// routine on crossing boards, flip-and-recompute elsewhere.
#[derive(Debug, Clone)]
pub enum PivotSearch<'a> {
    Fast(PivotalFinder<'a>),
    Flip { spec: &'a GameSpec, scratch: Vec<bool> },
}

impl<'a> PivotSearch<'a> {
    pub fn new(spec: &'a GameSpec) -> Result<Self> {
        if !(spec.is_monotone() && spec.is_win_or_lose()) {
            return Err(GameError::UnsupportedGame(format!(
                "pivotality needs a monotone win-or-lose game, not {}",
                spec.kind().name()
            )));
        }
        Ok(match spec.kind() {
            GameKind::Hex { .. } | GameKind::Bridgit { .. } | GameKind::Switching { .. } => {
                PivotSearch::Fast(PivotalFinder::new(spec.board())?)
            }
            _ => PivotSearch::Flip { spec, scratch: Vec::new() },
        })
    }

    /// Pivotal items of `colors` among `candidates` (ascending), into `out`.
    pub fn find(&mut self, colors: &[bool], candidates: &[CellId], out: &mut Vec<CellId>) {
        match self {
            PivotSearch::Fast(finder) => {
                finder.find(colors, out);
                if candidates.len() != colors.len() {
                    out.retain(|c| candidates.binary_search(c).is_ok());
                }
            }
            PivotSearch::Flip { spec, scratch } => {
                out.clear();
                scratch.clear();
                scratch.extend_from_slice(colors);
                let base = spec.i_wins(scratch);
                for &c in candidates {
                    scratch[c] = !scratch[c];
                    if spec.i_wins(scratch) != base {
                        out.push(c);
                    }
                    scratch[c] = !scratch[c];
                }
            }
        }
    }
}

/// Per-cell pivotality counts over `samples` completions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotalEstimate {
    pub counts: Vec<u64>,
    pub samples: u64,
    pub p: f64,
    pub seed: u64,
}

impl PivotalEstimate {
    pub fn estimate(&self, cell: CellId) -> f64 {
        self.counts[cell] as f64 / self.samples as f64
    }

    pub fn estimates(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|c| self.estimate(c)).collect()
    }

    pub fn stderr(&self, cell: CellId) -> f64 {
        let e = self.estimate(cell);
        (e * (1.0 - e) / self.samples as f64).sqrt()
    }

    /// Highest count among `cells`; ties go to the first in the given order.
    pub fn argmax(&self, cells: &[CellId]) -> Option<CellId> {
        let mut best: Option<CellId> = None;
        for &c in cells {
            if best.is_none_or(|b| self.counts[c] > self.counts[b]) {
                best = Some(c);
            }
        }
        best
    }
}

/// Counts, for every undecided cell, how many of `samples` random completions
/// of `position` make it pivotal. Decided cells get count 0.
pub fn estimate_pivotal(position: &GamePosition, samples: u64, seed: u64) -> Result<PivotalEstimate> {
    if samples == 0 {
        return Err(GameError::Domain("need at least one sample".into()));
    }
    let spec = position.spec();
    PivotSearch::new(spec)?;
    let n = position.n();
    let completer = Completer::for_position(position, seed);
    let candidates = completer.undecided().to_vec();
    let counts = par::fold_indices(
        samples,
        || {
            let search = PivotSearch::new(spec).expect("checked above");
            (vec![0u64; n], completer.clone(), search, Vec::new(), Vec::new())
        },
        |(mut counts, mut completer, mut search, mut colors, mut out), i| {
            completer.fill(i, &mut colors);
            search.find(&colors, &candidates, &mut out);
            for &c in &out {
                counts[c] += 1;
            }
            (counts, completer, search, colors, out)
        },
        |a, b| (par::add_counts(a.0, b.0), a.1, a.2, a.3, a.4),
    )
    .0;
    Ok(PivotalEstimate { counts, samples, p: position.p(), seed })
}
