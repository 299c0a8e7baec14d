use serde::{Deserialize, Serialize};

use crate::board::CellId;
use crate::error::{GameError, Result};
use crate::game::GameSpec;
use crate::position::{GamePosition, Outcome, Player};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub turn: usize,
    /// Winner of the coin toss, who made the move.
    pub coin: Player,
    pub cell: CellId,
}

/// One played game. Serialized as a single JSON line in records files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game: String,
    /// Board size parameter (side length, depth), when the game has one.
    #[serde(rename = "L")]
    pub size: Option<usize>,
    pub p: f64,
    pub seed: u64,
    pub moves: Vec<MoveRecord>,
    pub winner: Option<Player>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub length: usize,
    pub connected_throughout: bool,
    #[serde(rename = "disconnected_moves")]
    pub disconnected_move_count: usize,
}

impl GameRecord {
    pub fn new(game: &str, size: Option<usize>, p: f64, seed: u64) -> Self {
        Self {
            game: game.to_string(),
            size,
            p,
            seed,
            moves: Vec::new(),
            winner: None,
            value: None,
            length: 0,
            connected_throughout: true,
            disconnected_move_count: 0,
        }
    }

    /// Appends a move; `touches_earlier` says whether the cell is adjacent to
    /// some previously played cell.
    pub fn push(&mut self, coin: Player, cell: CellId, touches_earlier: bool) {
        if !self.moves.is_empty() && !touches_earlier {
            self.disconnected_move_count += 1;
            self.connected_throughout = false;
        }
        self.moves.push(MoveRecord { turn: self.moves.len(), coin, cell });
        self.length = self.moves.len();
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Replays the moves of `record` from the start position of `spec` and
/// returns the final outcome: the winner for win-or-lose games, the payoff
/// when the board is full otherwise.
pub fn replay(spec: &std::sync::Arc<GameSpec>, record: &GameRecord) -> Result<Outcome> {
    let mut pos = GamePosition::new(spec.clone(), record.p)?;
    for (t, m) in record.moves.iter().enumerate() {
        if m.turn != t {
            return Err(GameError::Domain(format!("move {t} is labelled turn {}", m.turn)));
        }
        pos = pos.apply_move(m.cell, m.coin)?;
    }
    if spec.is_monotone() && spec.is_win_or_lose() {
        let mut out = pos.winner_determined()?;
        out.determined_at_turn = out.winner.map(|_| record.moves.len());
        Ok(out)
    } else if pos.is_full() {
        let value = spec.eval(&pos.membership());
        Ok(Outcome { winner: None, value: Some(value), determined_at_turn: Some(record.moves.len()) })
    } else {
        Ok(Outcome::undetermined())
    }
}

/// Whether `cell` is adjacent to any cell marked in `played`.
pub fn touches(spec: &GameSpec, played: &[bool], cell: CellId) -> bool {
    spec.board().adjacency[cell].iter().any(|&w| played[w])
}
