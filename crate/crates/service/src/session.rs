//! One live game: the position, the coin, the engine and the history.

use std::sync::Arc;

use randturn::mc::{choose_move_mc, GameRecord, StrategyConfig};
use randturn::percolation::estimate_pivotal;
use randturn::rng::{self, domain};
use randturn::{CellId, GameKind, GamePosition, GameSpec, Player};

use crate::api::{
    ApiError, BoardView, CellRef, CellView, CreateGame, Goals, HeatCell, Heatmap, MoveBy, MoveView, Snapshot, Status,
    Toss, TurnView,
};

/// Largest side length accepted for new games.
pub const MAX_SIZE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub default_samples: u64,
    pub max_samples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { default_samples: 2000, max_samples: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    spec: Arc<GameSpec>,
    size: usize,
    human: Player,
    engine: StrategyConfig,
    p: f64,
    seed: u64,
    position: GamePosition,
    record: GameRecord,
    played: Vec<bool>,
    by: Vec<MoveBy>,
    mover: Option<Player>,
    last_tosses: Vec<Toss>,
    status: Status,
    winner: Option<Player>,
    resigned: Option<Player>,
    heatmap: Option<Heatmap>,
}

impl Session {
    /// Validates the request, tosses the first coin and lets the engine play
    /// while it keeps winning tosses.
    pub fn create(id: String, req: &CreateGame, seed: u64, limits: &Limits) -> Result<Self, ApiError> {
        if req.size == 0 || req.size > MAX_SIZE {
            return Err(ApiError::bad_size(format!("L must be in 1..={MAX_SIZE}, got {}", req.size)));
        }
        let kind = match req.game.as_str() {
            "hex" => GameKind::Hex { rows: req.size, cols: req.size },
            "bridgit" => GameKind::Bridgit { size: req.size },
            other => return Err(ApiError::bad_request(format!("unsupported game {other:?}; use hex or bridgit"))),
        };
        if !(0.0..=1.0).contains(&req.p) {
            return Err(ApiError::bad_request(format!("p = {} is outside [0, 1]", req.p)));
        }
        let samples = req.engine_samples.unwrap_or(limits.default_samples);
        if samples == 0 || samples > limits.max_samples {
            return Err(ApiError::bad_request(format!(
                "engineSamples must be in 1..={}, got {samples}",
                limits.max_samples
            )));
        }
        let spec = Arc::new(GameSpec::without_precoloring(kind)?);
        let position = GamePosition::new(spec.clone(), req.p)?;
        let n = spec.n();
        let mut session = Session {
            id,
            record: GameRecord::new(spec.kind().name(), Some(req.size), req.p, seed),
            spec,
            size: req.size,
            human: req.human_side,
            engine: StrategyConfig::new(samples, seed)?,
            p: req.p,
            seed,
            position,
            played: vec![false; n],
            by: Vec::new(),
            mover: None,
            last_tosses: Vec::new(),
            status: Status::AwaitingHuman,
            winner: None,
            resigned: None,
            heatmap: None,
        };
        session.advance()?;
        Ok(session)
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn record(&self) -> &GameRecord {
        &self.record
    }

    pub fn spec(&self) -> &Arc<GameSpec> {
        &self.spec
    }

    fn turn(&self) -> usize {
        self.record.moves.len()
    }

    fn resolve(&self, cell: CellRef) -> Result<CellId, ApiError> {
        let board = self.spec.board();
        let id = match cell {
            CellRef::Coords([r, c]) => board.cell_at(r, c),
            CellRef::Id(id) => (id < board.n()).then_some(id),
        };
        id.ok_or_else(|| ApiError::illegal_move(format!("{cell:?} is not a cell of this board")))
    }

    pub fn check_turn(&self, turn: Option<usize>) -> Result<(), ApiError> {
        if self.status == Status::Finished {
            return Err(ApiError::game_over());
        }
        if self.mover != Some(self.human) {
            return Err(ApiError::not_your_turn("the engine is to move"));
        }
        match turn {
            Some(t) if t != self.turn() => {
                Err(ApiError::not_your_turn(format!("move was for turn {t} but the game is at turn {}", self.turn())))
            }
            _ => Ok(()),
        }
    }

    /// Applies the human move and continues the game.
    pub fn human_move(&mut self, cell: CellRef, turn: Option<usize>) -> Result<(), ApiError> {
        self.check_turn(turn)?;
        let id = self.resolve(cell)?;
        if self.position.owner(id).is_some() {
            return Err(ApiError::illegal_move(format!("cell {id} is already taken")));
        }
        self.last_tosses.clear();
        self.play(id, self.human, MoveBy::Human)?;
        self.advance()
    }

    pub fn resign(&mut self) -> Result<(), ApiError> {
        if self.status == Status::Finished {
            return Err(ApiError::game_over());
        }
        self.last_tosses.clear();
        self.resigned = Some(self.human);
        self.finish(Some(self.human.other()));
        Ok(())
    }

    fn play(&mut self, cell: CellId, player: Player, by: MoveBy) -> Result<(), ApiError> {
        let touches = randturn::mc::touches(&self.spec, &self.played, cell);
        self.position = self.position.apply_move(cell, player)?;
        self.record.push(player, cell, touches);
        self.played[cell] = true;
        self.by.push(by);
        self.mover = None;
        self.heatmap = None;
        Ok(())
    }

    fn finish(&mut self, winner: Option<Player>) {
        self.status = Status::Finished;
        self.winner = winner;
        self.record.winner = winner;
        self.record.value = winner.map(|w| f64::from(w.sign()));
        self.mover = None;
    }

    /// Tosses coins, playing engine moves, until the human must move or the
    /// winner is known. Toss `t` and the engine's seed at `t` follow the
    /// self-play conventions, so a finished game replays as self-play.
    fn advance(&mut self) -> Result<(), ApiError> {
        loop {
            let outcome = self.position.winner_determined()?;
            if outcome.is_determined() {
                self.finish(outcome.winner);
                return Ok(());
            }
            let t = self.turn();
            let mover = Player::from_coin(rng::coin(self.seed, t as u64, self.p));
            self.last_tosses.push(Toss { index: t, winner: mover });
            self.mover = Some(mover);
            if mover == self.human {
                self.status = Status::AwaitingHuman;
                return Ok(());
            }
            let config = StrategyConfig { seed: rng::derive_seed(self.seed, domain::MOVE, t as u64), ..self.engine };
            let (cell, _) = choose_move_mc(&self.position, &config)?;
            self.play(cell, mover, MoveBy::Engine)?;
        }
    }

    /// Pivotality estimates for the current position, cached until the next
    /// move.
    pub fn heatmap(&mut self) -> Result<Heatmap, ApiError> {
        if let Some(h) = &self.heatmap {
            return Ok(h.clone());
        }
        let board = self.spec.board();
        let (rows, cols) = board.dims().expect("lattice board");
        let cells = if self.position.undecided_count() == 0 {
            (0..board.n()).map(|id| self.heat_cell(id, 0.0, 0.0)).collect()
        } else {
            let est = estimate_pivotal(&self.position, self.engine.samples, self.seed)?;
            (0..board.n()).map(|id| self.heat_cell(id, est.estimate(id), est.stderr(id))).collect()
        };
        let h = Heatmap {
            id: self.id.clone(),
            turn: self.turn(),
            samples: self.engine.samples,
            seed: self.seed,
            rows,
            cols,
            cells,
        };
        self.heatmap = Some(h.clone());
        Ok(h)
    }

    fn heat_cell(&self, id: CellId, value: f64, stderr: f64) -> HeatCell {
        let [row, col] = self.spec.board().coords(id).expect("lattice cell");
        HeatCell { id, row, col, value, stderr }
    }

    pub fn snapshot(&self) -> Snapshot {
        let board = self.spec.board();
        let (rows, cols) = board.dims().expect("lattice board");
        let coords = |id: CellId| board.coords(id).expect("lattice cell");
        let cells = (0..board.n())
            .map(|id| {
                let [row, col] = coords(id);
                CellView { id, row, col, owner: self.position.owner(id) }
            })
            .collect();
        let moves = self
            .record
            .moves
            .iter()
            .zip(&self.by)
            .map(|(m, by)| MoveView { turn: m.turn, coin: m.coin, id: m.cell, cell: coords(m.cell), by: by.clone() })
            .collect();
        let to_win = match self.spec.kind() {
            GameKind::Bridgit { .. } => Goals {
                one: "join the left and right ends with your bridges".into(),
                two: "cut every left-right route".into(),
            },
            _ => Goals {
                one: "connect the top row to the bottom row".into(),
                two: "connect the left column to the right column".into(),
            },
        };
        Snapshot {
            id: self.id.clone(),
            game: self.spec.kind().name().to_string(),
            board: BoardView { size: self.size, rows, cols, cells },
            to_win,
            p: self.p,
            human_side: self.human,
            engine_samples: self.engine.samples,
            seed: self.seed,
            turn: TurnView { number: self.turn(), mover: self.mover },
            last_tosses: self.last_tosses.clone(),
            moves,
            status: self.status,
            winner: self.winner,
            resigned: self.resigned,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(size: usize, human: Player, seed: u64) -> CreateGame {
        CreateGame { game: "hex".into(), size, p: 0.5, human_side: human, engine_samples: Some(200), seed: Some(seed) }
    }

    #[test]
    fn engine_plays_until_human_wins_a_toss() {
        for seed in 0..20 {
            let s = Session::create("g".into(), &request(4, Player::I, seed), seed, &Limits::default()).unwrap();
            let snap = s.snapshot();
            assert!(snap.moves.iter().all(|m| m.by == MoveBy::Engine && m.coin == Player::II));
            if snap.status == Status::Finished {
                assert_eq!(snap.last_tosses.len(), snap.moves.len());
                assert_eq!(snap.winner, Some(Player::II));
            } else {
                assert_eq!(snap.last_tosses.len(), snap.moves.len() + 1);
                assert_eq!(snap.turn.mover, Some(Player::I));
            }
        }
    }

    #[test]
    fn rejects_taken_cells_without_change() {
        let mut s = Session::create("g".into(), &request(3, Player::II, 1), 1, &Limits::default()).unwrap();
        while s.status() != Status::Finished {
            let before = s.snapshot();
            if let Some(m) = before.moves.first() {
                let err = s.human_move(CellRef::Id(m.id), None).unwrap_err();
                assert_eq!(err.code, "illegal-move");
                assert_eq!(s.snapshot(), before);
            }
            let free = before.board.cells.iter().find(|c| c.owner.is_none()).unwrap().id;
            s.human_move(CellRef::Id(free), Some(before.turn.number)).unwrap();
        }
        assert!(s.snapshot().winner.is_some());
        assert_eq!(s.human_move(CellRef::Id(0), None).unwrap_err().code, "game-over");
    }

    #[test]
    fn stale_turns_are_refused() {
        let mut s = Session::create("g".into(), &request(5, Player::I, 3), 3, &Limits::default()).unwrap();
        let t = s.snapshot().turn.number;
        assert_eq!(s.human_move(CellRef::Coords([2, 2]), Some(t + 1)).unwrap_err().code, "not-your-turn");
        s.human_move(CellRef::Coords([2, 2]), Some(t)).unwrap();
    }

    #[test]
    fn bad_sizes() {
        let err = Session::create("g".into(), &request(0, Player::I, 0), 0, &Limits::default()).unwrap_err();
        assert_eq!(err.code, "bad-size");
    }
}
