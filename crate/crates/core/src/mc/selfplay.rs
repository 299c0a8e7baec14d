use std::sync::Arc;

use crate::error::{GameError, Result};
use crate::game::{GameKind, GameSpec};
use crate::mc::record::{touches, GameRecord};
use crate::mc::strategy::Strategy;
use crate::par;
use crate::position::{GamePosition, Outcome, Player};
use crate::rng::{self, domain};

/// The size parameter recorded for a game: side length, depth or `None`.
pub fn size_parameter(kind: &GameKind) -> Option<usize> {
    match kind {
        GameKind::Hex { rows, .. } | GameKind::Surround { rows, .. } => Some(*rows),
        GameKind::Bridgit { size } => Some(*size),
        GameKind::RecursiveMajority { h } | GameKind::AndOr { h } => Some(*h),
        GameKind::Switching { profile } => Some(profile.len()),
        GameKind::TicTacToe => Some(3),
        GameKind::TeamCaptains { .. } => None,
    }
}

/// Plays one game. Toss `t` is `rng::coin(seed, t, p)` and the mover's
/// strategy gets `derive_seed(seed, MOVE, t)`. With `stop_early`, monotone
/// win-or-lose games end as soon as the winner is determined; otherwise play
/// continues until the board is full.
pub fn selfplay(
    spec: &Arc<GameSpec>,
    strategy_i: &dyn Strategy,
    strategy_ii: &dyn Strategy,
    p: f64,
    seed: u64,
    stop_early: bool,
) -> Result<GameRecord> {
    let mut pos = GamePosition::new(spec.clone(), p)?;
    let mut record = GameRecord::new(spec.kind().name(), size_parameter(spec.kind()), p, seed);
    let decisive = spec.is_monotone() && spec.is_win_or_lose();
    let mut played = vec![false; spec.n()];
    let mut outcome = if decisive { pos.winner_determined()? } else { Outcome::undetermined() };
    let mut determined_at = outcome.winner.map(|_| 0);
    let mut t = 0u64;
    while !pos.is_full() && !(stop_early && determined_at.is_some()) {
        let mover = Player::from_coin(rng::coin(seed, t, p));
        let strategy = if mover == Player::I { strategy_i } else { strategy_ii };
        let cell = strategy.choose(&pos, mover, rng::derive_seed(seed, domain::MOVE, t))?;
        if cell >= spec.n() || pos.owner(cell).is_some() {
            return Err(GameError::FaultingStrategy {
                side: mover,
                reason: format!("{} chose cell {cell}, which is not undecided", strategy.name()),
            });
        }
        record.push(mover, cell, touches(spec, &played, cell));
        played[cell] = true;
        pos = pos.apply_move(cell, mover)?;
        t += 1;
        if decisive && determined_at.is_none() {
            outcome = pos.winner_determined()?;
            if outcome.is_determined() {
                determined_at = Some(record.moves.len());
            }
        }
    }
    if decisive {
        record.winner = outcome.winner;
        record.value = outcome.winner.map(|w| f64::from(w.sign()));
        record.length = determined_at.unwrap_or(record.moves.len());
    } else {
        record.value = Some(spec.eval(&pos.membership()));
    }
    Ok(record)
}

/// `games` independent games; game `g` uses seed `derive_seed(seed, GAME, g)`.
pub fn selfplay_batch(
    spec: &Arc<GameSpec>,
    strategy_i: &dyn Strategy,
    strategy_ii: &dyn Strategy,
    p: f64,
    seed: u64,
    games: usize,
    stop_early: bool,
) -> Result<Vec<GameRecord>> {
    par::map_indices(games, |g| {
        selfplay(spec, strategy_i, strategy_ii, p, rng::derive_seed(seed, domain::GAME, g as u64), stop_early)
    })
    .into_iter()
    .collect()
}
