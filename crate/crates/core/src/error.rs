use thiserror::Error;

use crate::position::Player;

/// Errors raised by board construction, game mechanics, solvers and samplers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid board size: {0}")]
    Sizing(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("position contradicts the precoloring: {0}")]
    PrecolorConflict(String),

    #[error("state space too large: {requested} undecided cells exceeds the limit of {limit}")]
    Capacity { limit: usize, requested: usize },

    #[error("operation not supported for this game: {0}")]
    UnsupportedGame(String),

    #[error("payoff is not generic: {0}")]
    GenericityViolation(String),

    #[error("game is over: no undecided cells remain")]
    GameOver,

    #[error("strategy for player {side} returned an illegal move: {reason}")]
    FaultingStrategy { side: Player, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate function: {0}")]
    Degenerate(String),
}

impl GameError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            GameError::Capacity { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
