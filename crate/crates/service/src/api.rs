//! Wire types.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

use randturn::{GameError, Player};

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateGame {
    #[serde(default = "default_game")]
    pub game: String,
    #[serde(rename = "L", alias = "size")]
    pub size: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(alias = "human_side", default = "default_side")]
    pub human_side: Player,
    #[serde(alias = "engine_samples")]
    pub engine_samples: Option<u64>,
    pub seed: Option<u64>,
}

fn default_game() -> String {
    "hex".into()
}

fn default_p() -> f64 {
    0.5
}

fn default_side() -> Player {
    Player::I
}

/// A cell as `[row, col]` or as a raw id.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum CellRef {
    Coords([usize; 2]),
    Id(usize),
}

#[derive(Debug, Clone, Deserialize)]
pub struct PostMove {
    pub cell: CellRef,
    /// Number of moves already played when the client decided; a stale value
    /// is rejected so that repeated submissions cannot both land.
    pub turn: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    AwaitingHuman,
    EngineThinking,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellView {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub owner: Option<Player>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoardView {
    #[serde(rename = "L")]
    pub size: usize,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<CellView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Toss {
    pub index: usize,
    pub winner: Player,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveBy {
    Human,
    Engine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveView {
    pub turn: usize,
    pub coin: Player,
    pub id: usize,
    pub cell: [usize; 2],
    pub by: MoveBy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnView {
    /// Moves played so far; the value to echo in a move request.
    pub number: usize,
    /// Winner of the pending toss, absent once the game is over.
    pub mover: Option<Player>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Goals {
    #[serde(rename = "I")]
    pub one: String,
    #[serde(rename = "II")]
    pub two: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub id: String,
    pub game: String,
    pub board: BoardView,
    pub to_win: Goals,
    pub p: f64,
    pub human_side: Player,
    pub engine_samples: u64,
    pub seed: u64,
    pub turn: TurnView,
    /// Tosses made while handling the request that produced this snapshot.
    pub last_tosses: Vec<Toss>,
    pub moves: Vec<MoveView>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner: Option<Player>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resigned: Option<Player>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameSummary {
    pub id: String,
    pub game: String,
    #[serde(rename = "L")]
    pub size: usize,
    pub status: Status,
    pub human_side: Player,
    pub moves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Heatmap {
    pub id: String,
    pub turn: usize,
    pub samples: u64,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<HeatCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    pub fn bad_size(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-size", message)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }

    pub fn illegal_move(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "illegal-move", message)
    }

    pub fn not_your_turn(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "not-your-turn", message)
    }

    pub fn game_over() -> Self {
        Self::new(StatusCode::CONFLICT, "game-over", "the game is finished")
    }

    pub fn no_such_game(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "no-such-game", format!("no game with id {id:?}"))
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Sizing(_) => ApiError::bad_size(e.to_string()),
            GameError::IllegalMove(_) | GameError::FaultingStrategy { .. } => ApiError::illegal_move(e.to_string()),
            GameError::GameOver => ApiError::game_over(),
            GameError::Domain(_) => ApiError::bad_request(e.to_string()),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { code: self.code.to_string(), message: self.message })).into_response()
    }
}
