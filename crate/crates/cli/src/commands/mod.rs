pub mod heatmap;
pub mod influence;
pub mod scaling;
pub mod selfplay;
pub mod solve;
pub mod tree;
