use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::board::CellId;
use crate::error::{GameError, Result};
use crate::game::GameSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }

    /// +1 for player I, -1 for player II.
    pub fn sign(self) -> i32 {
        match self {
            Player::I => 1,
            Player::II => -1,
        }
    }

    pub fn from_coin(i_wins: bool) -> Player {
        if i_wins {
            Player::I
        } else {
            Player::II
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

impl std::str::FromStr for Player {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Player::I),
            "II" | "ii" | "2" => Ok(Player::II),
            other => Err(GameError::Domain(format!("unknown player {other:?}"))),
        }
    }
}

/// How the mover of each turn is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TurnMode {
    /// An independent coin with bias `p` toward player I.
    IidCoin,
    /// Cards drawn without replacement from a deck of `n/2` cards per player.
    BalancedDeck,
}

/// Result of a game or of a determination check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// `None` while undetermined.
    pub winner: Option<Player>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determined_at_turn: Option<usize>,
}

impl Outcome {
    pub fn undetermined() -> Self {
        Outcome { winner: None, value: None, determined_at_turn: None }
    }

    pub fn won_by(player: Player) -> Self {
        Outcome { winner: Some(player), value: Some(f64::from(player.sign())), determined_at_turn: None }
    }

    pub fn is_determined(&self) -> bool {
        self.winner.is_some()
    }
}

/// A game position: the disjoint sets chosen so far plus the turn rule.
/// Positions are values; applying a move yields a new position.
#[derive(Debug, Clone)]
pub struct GamePosition {
    spec: Arc<GameSpec>,
    cells: Vec<Option<Player>>,
    p: f64,
    turn_mode: TurnMode,
}

impl PartialEq for GamePosition {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec)
            && self.cells == other.cells
            && self.p == other.p
            && self.turn_mode == other.turn_mode
    }
}

impl GamePosition {
    /// Start position with the precolored cells already assigned.
    pub fn new(spec: Arc<GameSpec>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GameError::Domain(format!("coin bias {p} outside [0, 1]")));
        }
        let mut cells = vec![None; spec.n()];
        for &(cell, owner) in spec.precolored() {
            cells[cell] = Some(owner);
        }
        Ok(Self { spec, cells, p, turn_mode: TurnMode::IidCoin })
    }

    /// Start position for the card-deck turn order. Requires an even board.
    pub fn balanced(spec: Arc<GameSpec>) -> Result<Self> {
        if spec.n() % 2 != 0 {
            return Err(GameError::Domain(format!("balanced deck needs an even board, got n = {}", spec.n())));
        }
        let mut pos = Self::new(spec, 0.5)?;
        pos.turn_mode = TurnMode::BalancedDeck;
        let (a, b) = pos.remaining_cards();
        if a < 0 || b < 0 {
            return Err(GameError::PrecolorConflict("precoloring exceeds half the board for one side".into()));
        }
        Ok(pos)
    }

    /// Position with the given owners; precolored cells must agree.
    pub fn from_owners(spec: Arc<GameSpec>, p: f64, owners: Vec<Option<Player>>) -> Result<Self> {
        if owners.len() != spec.n() {
            return Err(GameError::Domain(format!("expected {} cells, got {}", spec.n(), owners.len())));
        }
        for &(cell, owner) in spec.precolored() {
            if owners[cell] != Some(owner) {
                return Err(GameError::PrecolorConflict(format!("cell {cell} is precolored {owner}")));
            }
        }
        let mut pos = Self::new(spec, p)?;
        pos.cells = owners;
        Ok(pos)
    }

    pub fn spec(&self) -> &Arc<GameSpec> {
        &self.spec
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn turn_mode(&self) -> TurnMode {
        self.turn_mode
    }

    pub fn owner(&self, cell: CellId) -> Option<Player> {
        self.cells[cell]
    }

    pub fn owners(&self) -> &[Option<Player>] {
        &self.cells
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn t1(&self) -> Vec<CellId> {
        self.owned_by(Player::I)
    }

    pub fn t2(&self) -> Vec<CellId> {
        self.owned_by(Player::II)
    }

    fn owned_by(&self, player: Player) -> Vec<CellId> {
        (0..self.n()).filter(|&c| self.cells[c] == Some(player)).collect()
    }

    /// Undecided cells in ascending id order.
    pub fn legal_moves(&self) -> Vec<CellId> {
        (0..self.n()).filter(|&c| self.cells[c].is_none()).collect()
    }

    pub fn undecided_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// Membership vector of player I's cells.
    pub fn membership(&self) -> Vec<bool> {
        self.cells.iter().map(|c| *c == Some(Player::I)).collect()
    }

    /// Membership vector of player I's cells plus every undecided cell.
    pub fn membership_with_undecided(&self) -> Vec<bool> {
        self.cells.iter().map(|c| *c != Some(Player::II)).collect()
    }

    /// Cards left in the deck for (I, II); meaningful in balanced-deck mode.
    pub fn remaining_cards(&self) -> (i64, i64) {
        let half = (self.n() / 2) as i64;
        let t1 = self.cells.iter().filter(|c| **c == Some(Player::I)).count() as i64;
        let t2 = self.cells.iter().filter(|c| **c == Some(Player::II)).count() as i64;
        (half - t1, half - t2)
    }

    pub fn apply_move(&self, cell: CellId, player: Player) -> Result<GamePosition> {
        match self.cells.get(cell) {
            None => Err(GameError::IllegalMove(format!("cell {cell} is out of range (n = {})", self.n()))),
            Some(Some(owner)) => Err(GameError::IllegalMove(format!("cell {cell} is already taken by {owner}"))),
            Some(None) => {
                if self.turn_mode == TurnMode::BalancedDeck {
                    let (a, b) = self.remaining_cards();
                    let left = if player == Player::I { a } else { b };
                    if left <= 0 {
                        return Err(GameError::IllegalMove(format!("player {player} has no cards left")));
                    }
                }
                let mut next = self.clone();
                next.cells[cell] = Some(player);
                Ok(next)
            }
        }
    }

    /// Checks the winner of a monotone win-or-lose game.
    pub fn winner_determined(&self) -> Result<Outcome> {
        self.spec.winner_determined(&self.cells)
    }
}
