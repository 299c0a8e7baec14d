//! Random-turn selection games.
//!
//! Boards and payoffs ([`board`], [`game`]), positions ([`position`]),
//! percolation sampling and pivotality ([`percolation`]), the exact solver
//! ([`exact`]), the sampling strategy and self-play ([`mc`]), tree-game
//! recursions and simulators ([`tree`]) and influence bounds ([`influence`]).

pub mod board;
pub mod error;
pub mod exact;
pub mod game;
pub mod influence;
pub mod mc;
pub mod par;
pub mod percolation;
pub mod position;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod surround;
pub mod tree;
pub mod union_find;

pub use board::{BoardGraph, BoardKind, CellId};
pub use error::{GameError, Result};
pub use game::{GameKind, GameSpec};
pub use position::{GamePosition, Outcome, Player, TurnMode};
pub use scalar::{Exact, Scalar};
