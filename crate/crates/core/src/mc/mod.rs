//! The sampling strategy, strategy objects and self-play.

mod record;
mod selfplay;
mod strategy;

pub use record::{replay, touches, GameRecord, MoveRecord};
pub use selfplay::{selfplay, selfplay_batch, size_parameter};
pub use strategy::{
    choose_move_mc, sample_size_for, ExactStrategy, McStrategy, RandomStrategy, Strategy, StrategyConfig, StrategyKind,
};
