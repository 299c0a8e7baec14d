//! Game variants and their payoff functions.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::board::{BoardGraph, BoardKind, CellId, TreeItems};
use crate::error::{GameError, Result};
use crate::percolation::crossing;
use crate::position::{Outcome, Player};
use crate::rng;
use crate::scalar::{exact_int, parse_exact, Exact};
use crate::surround;

/// Serializable description of a game variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum GameKind {
    Hex {
        rows: usize,
        cols: usize,
    },
    Bridgit {
        size: usize,
    },
    Surround {
        rows: usize,
        cols: usize,
        /// Also score surrounded cells that already had the surrounding color.
        #[serde(default)]
        count_unchanged: bool,
    },
    TicTacToe,
    /// `table[mask]` is the payoff when player I holds exactly the free
    /// (non-precolored) cells in `mask`; bit `k` is the `k`-th free cell in
    /// ascending id order. Entries are rationals written as `"a/b"`.
    TeamCaptains {
        n: usize,
        table: Vec<String>,
    },
    RecursiveMajority {
        h: usize,
    },
    AndOr {
        h: usize,
    },
    /// Shannon switching game on a tree: root to leaves through player-I edges.
    Switching {
        profile: Vec<usize>,
    },
}

impl GameKind {
    pub fn name(&self) -> &'static str {
        match self {
            GameKind::Hex { .. } => "hex",
            GameKind::Bridgit { .. } => "bridgit",
            GameKind::Surround { .. } => "surround",
            GameKind::TicTacToe => "tic-tac-toe",
            GameKind::TeamCaptains { .. } => "team-captains",
            GameKind::RecursiveMajority { .. } => "recursive-majority",
            GameKind::AndOr { .. } => "and-or",
            GameKind::Switching { .. } => "switching",
        }
    }

    fn board_kind(&self) -> BoardKind {
        match self {
            GameKind::Hex { rows, cols } | GameKind::Surround { rows, cols, .. } => {
                BoardKind::HexLozenge { rows: *rows, cols: *cols }
            }
            GameKind::Bridgit { size } => BoardKind::Bridgit { size: *size },
            GameKind::TicTacToe => BoardKind::Grid3x3,
            GameKind::TeamCaptains { n, .. } => BoardKind::Generic { n: *n },
            GameKind::RecursiveMajority { h } => BoardKind::Tree { profile: vec![3; *h], items: TreeItems::Leaves },
            GameKind::AndOr { h } => BoardKind::Tree { profile: vec![2; *h], items: TreeItems::Leaves },
            GameKind::Switching { profile } => BoardKind::Tree { profile: profile.clone(), items: TreeItems::Edges },
        }
    }

    /// Monotone win-or-lose games: crossings, switching, AND-OR, majority.
    pub fn is_monotone_win_or_lose(&self) -> bool {
        matches!(
            self,
            GameKind::Hex { .. }
                | GameKind::Bridgit { .. }
                | GameKind::Switching { .. }
                | GameKind::AndOr { .. }
                | GameKind::RecursiveMajority { .. }
        )
    }
}

/// Precolored cell entry: `[id, "I"]`, or `[id, "I", [row, col]]` on lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PrecolorEntry {
    cell: CellId,
    owner: Player,
    coords: Option<[usize; 2]>,
}

impl Serialize for PrecolorEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.coords {
            Some(rc) => (self.cell, self.owner, rc).serialize(s),
            None => (self.cell, self.owner).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for PrecolorEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            WithCoords(CellId, Player, [usize; 2]),
            Plain(CellId, Player),
        }
        match Repr::deserialize(d).map_err(|_| D::Error::custom("precolored entry must be [cell, \"I\"|\"II\"]"))? {
            Repr::WithCoords(cell, owner, rc) => Ok(PrecolorEntry { cell, owner, coords: Some(rc) }),
            Repr::Plain(cell, owner) => Ok(PrecolorEntry { cell, owner, coords: None }),
        }
    }
}

/// JSON form of a game: `{kind, params, precolored: [[cell, "I"|"II"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameDescriptor {
    #[serde(flatten)]
    pub game: GameKind,
    #[serde(default)]
    precolored: Vec<PrecolorEntry>,
}

/// A game variant with its board, payoff and precolored cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    kind: GameKind,
    board: BoardGraph,
    precolored: Vec<(CellId, Player)>,
    /// Cells not precolored, ascending.
    free: Vec<CellId>,
    table: Vec<Exact>,
    monotone: bool,
    win_or_lose: bool,
}

pub const TIC_TAC_TOE_LINES: [[usize; 3]; 8] =
    [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

impl GameSpec {
    pub fn new(kind: GameKind, precolored: Vec<(CellId, Player)>) -> Result<Self> {
        let board = BoardGraph::build(kind.board_kind())?;
        let n = board.n();
        let mut precolored = precolored;
        precolored.sort_unstable();
        for w in precolored.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GameError::PrecolorConflict(format!("cell {} precolored twice", w[0].0)));
            }
        }
        if let Some(&(cell, _)) = precolored.iter().find(|(c, _)| *c >= n) {
            return Err(GameError::PrecolorConflict(format!("precolored cell {cell} out of range (n = {n})")));
        }
        let free: Vec<CellId> = (0..n).filter(|c| precolored.binary_search_by_key(c, |e| e.0).is_err()).collect();
        let table = match &kind {
            GameKind::TeamCaptains { table, .. } => {
                if free.len() >= 31 || table.len() != 1usize << free.len() {
                    return Err(GameError::Sizing(format!(
                        "team-captains table needs 2^{} entries, got {}",
                        free.len(),
                        table.len()
                    )));
                }
                table
                    .iter()
                    .map(|t| parse_exact(t).ok_or_else(|| GameError::Domain(format!("bad table entry {t:?}"))))
                    .collect::<Result<Vec<_>>>()?
            }
            _ => Vec::new(),
        };
        let mwl = kind.is_monotone_win_or_lose();
        Ok(Self { kind, board, precolored, free, table, monotone: mwl, win_or_lose: mwl })
    }

    pub fn without_precoloring(kind: GameKind) -> Result<Self> {
        Self::new(kind, Vec::new())
    }

    /// Team Captains with a seeded table of random rationals in [0, 1) with
    /// denominator 2^40. Such tables have no ties among the sums the solver
    /// compares, in practice.
    pub fn team_captains_random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(GameError::Sizing(format!("random team-captains tables support 1..=20 players, got {n}")));
        }
        let mut rng = rng::stream(rng::derive_seed(seed, rng::domain::TABLE, n as u64), 0);
        use rand::RngCore;
        let table = (0..1usize << n).map(|_| format!("{}/{}", rng.next_u64() >> 24, 1u64 << 40)).collect();
        Self::new(GameKind::TeamCaptains { n, table }, Vec::new())
    }

    /// Team Captains from explicit exact values.
    pub fn team_captains(values: &[Exact]) -> Result<Self> {
        let n = values.len().trailing_zeros() as usize;
        if !values.len().is_power_of_two() {
            return Err(GameError::Sizing(format!("table length {} is not a power of two", values.len())));
        }
        Self::new(GameKind::TeamCaptains { n, table: values.iter().map(|v| v.to_string()).collect() }, Vec::new())
    }

    pub fn from_descriptor(desc: GameDescriptor) -> Result<Self> {
        let spec = Self::new(desc.game, desc.precolored.iter().map(|e| (e.cell, e.owner)).collect())?;
        for e in &desc.precolored {
            if let Some(rc) = e.coords {
                if spec.board.coords(e.cell) != Some(rc) {
                    return Err(GameError::PrecolorConflict(format!(
                        "cell {} does not sit at [{}, {}]",
                        e.cell, rc[0], rc[1]
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn descriptor(&self) -> GameDescriptor {
        GameDescriptor {
            game: self.kind.clone(),
            precolored: self
                .precolored
                .iter()
                .map(|&(cell, owner)| PrecolorEntry { cell, owner, coords: self.board.coords(cell) })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: GameDescriptor =
            serde_json::from_str(text).map_err(|e| GameError::Domain(format!("bad game description: {e}")))?;
        Self::from_descriptor(desc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.descriptor()).expect("descriptor serializes")
    }

    pub fn kind(&self) -> &GameKind {
        &self.kind
    }

    pub fn board(&self) -> &BoardGraph {
        &self.board
    }

    pub fn n(&self) -> usize {
        self.board.n()
    }

    pub fn precolored(&self) -> &[(CellId, Player)] {
        &self.precolored
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_win_or_lose(&self) -> bool {
        self.win_or_lose
    }

    /// Rejects `s1` unless it has the board's length and respects the
    /// precoloring.
    pub fn check_subset(&self, s1: &[bool]) -> Result<()> {
        if s1.len() != self.n() {
            return Err(GameError::Domain(format!("subset has length {}, board has {}", s1.len(), self.n())));
        }
        for &(cell, owner) in &self.precolored {
            if s1[cell] != (owner == Player::I) {
                return Err(GameError::PrecolorConflict(format!("cell {cell} is precolored {owner}")));
            }
        }
        Ok(())
    }

    /// `f(s1)` for a membership vector of player I's final set.
    pub fn payoff(&self, s1: &[bool]) -> Result<f64> {
        self.check_subset(s1)?;
        Ok(self.eval(s1))
    }

    /// Unchecked payoff.
    pub fn eval(&self, s1: &[bool]) -> f64 {
        match &self.kind {
            GameKind::TeamCaptains { .. } => crate::scalar::exact_to_f64(&self.table[self.table_index(s1)]),
            _ => self.eval_integer(s1) as f64,
        }
    }

    /// Unchecked payoff as an exact rational.
    pub fn eval_exact(&self, s1: &[bool]) -> Exact {
        match &self.kind {
            GameKind::TeamCaptains { .. } => self.table[self.table_index(s1)].clone(),
            _ => exact_int(self.eval_integer(s1)),
        }
    }

    /// Whether player I wins; only meaningful for win-or-lose games.
    pub fn i_wins(&self, s1: &[bool]) -> bool {
        match &self.kind {
            GameKind::Hex { .. } => crossing::site_black_crossing(&self.board, s1),
            GameKind::Bridgit { .. } | GameKind::Switching { .. } => crossing::bond_black_crossing(&self.board, s1),
            GameKind::AndOr { h } => and_or_root(s1, *h),
            GameKind::RecursiveMajority { h } => majority_root(s1, *h),
            _ => self.eval(s1) > 0.0,
        }
    }

    fn table_index(&self, s1: &[bool]) -> usize {
        self.free.iter().enumerate().filter(|(_, &c)| s1[c]).fold(0usize, |m, (k, _)| m | (1 << k))
    }

    fn eval_integer(&self, s1: &[bool]) -> i64 {
        let sign = |b: bool| if b { 1 } else { -1 };
        match &self.kind {
            GameKind::Surround { count_unchanged, .. } => {
                surround::surround_payoff(&self.board, s1, *count_unchanged).expect("surround board is a hex lattice")
            }
            GameKind::TicTacToe => TIC_TAC_TOE_LINES
                .iter()
                .map(|line| {
                    if line.iter().all(|&c| s1[c]) {
                        1
                    } else if line.iter().all(|&c| !s1[c]) {
                        -1
                    } else {
                        0
                    }
                })
                .sum(),
            GameKind::TeamCaptains { .. } => unreachable!("team captains payoffs are rational"),
            _ => sign(self.i_wins(s1)),
        }
    }

    /// Determination check for monotone win-or-lose games: I has won iff
    /// `f(t1) = +1`, II has won iff `f(t1 ∪ undecided) = -1`.
    pub fn winner_determined(&self, cells: &[Option<Player>]) -> Result<Outcome> {
        if !(self.monotone && self.win_or_lose) {
            return Err(GameError::UnsupportedGame(format!("{} is not a monotone win-or-lose game", self.kind.name())));
        }
        let low: Vec<bool> = cells.iter().map(|c| *c == Some(Player::I)).collect();
        if self.i_wins(&low) {
            return Ok(Outcome::won_by(Player::I));
        }
        let high: Vec<bool> = cells.iter().map(|c| *c != Some(Player::II)).collect();
        if !self.i_wins(&high) {
            return Ok(Outcome::won_by(Player::II));
        }
        Ok(Outcome::undetermined())
    }
}

/// AND-OR tree of depth `h` over `2^h` leaves: level `k` is AND for even `k`.
pub fn and_or_root(leaves: &[bool], h: usize) -> bool {
    let mut level: Vec<bool> = leaves.to_vec();
    for k in (0..h).rev() {
        level = level.chunks(2).map(|pair| if k % 2 == 0 { pair[0] && pair[1] } else { pair[0] || pair[1] }).collect();
    }
    level[0]
}

/// Recursive three-fold majority over `3^h` leaves.
pub fn majority_root(leaves: &[bool], h: usize) -> bool {
    let mut level: Vec<bool> = leaves.to_vec();
    for _ in 0..h {
        level = level.chunks(3).map(|t| t.iter().filter(|&&b| b).count() >= 2).collect();
    }
    level[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GameKind) -> GameSpec {
        GameSpec::without_precoloring(kind).unwrap()
    }

    #[test]
    fn tic_tac_toe_all_ones() {
        let s = spec(GameKind::TicTacToe);
        assert_eq!(s.payoff(&[true; 9]).unwrap(), 8.0);
        assert_eq!(s.payoff(&[false; 9]).unwrap(), -8.0);
    }

    #[test]
    fn and_or_all_true() {
        let s = spec(GameKind::AndOr { h: 2 });
        assert_eq!(s.payoff(&[true; 4]).unwrap(), 1.0);
        // Left OR false forces the AND root false.
        assert_eq!(s.payoff(&[false, false, true, true]).unwrap(), -1.0);
        assert_eq!(s.payoff(&[true, false, false, true]).unwrap(), 1.0);
    }

    #[test]
    fn hex_two_path_check() {
        let s = spec(GameKind::Hex { rows: 2, cols: 2 });
        let b = s.board();
        let mut s1 = vec![false; 4];
        s1[b.cell_at(0, 0).unwrap()] = true;
        s1[b.cell_at(1, 0).unwrap()] = true;
        assert_eq!(s.payoff(&s1).unwrap(), 1.0);
        // Independent path check: (0,0) is on the first row, (1,0) on the last,
        // and the neighbor rule lists (1,0) as adjacent to (0,0).
        assert!(b.adjacency[b.cell_at(0, 0).unwrap()].contains(&b.cell_at(1, 0).unwrap()));
    }

    #[test]
    fn precoloring_enforced() {
        let s = GameSpec::new(GameKind::Hex { rows: 2, cols: 2 }, vec![(0, Player::I)]).unwrap();
        assert!(matches!(s.payoff(&[false; 4]), Err(GameError::PrecolorConflict(_))));
        assert!(GameSpec::new(GameKind::Hex { rows: 2, cols: 2 }, vec![(9, Player::I)]).is_err());
        assert!(GameSpec::new(GameKind::Hex { rows: 2, cols: 2 }, vec![(1, Player::I), (1, Player::II)]).is_err());
    }

    #[test]
    fn flags_follow_kind() {
        assert!(spec(GameKind::Hex { rows: 2, cols: 2 }).is_monotone());
        assert!(spec(GameKind::RecursiveMajority { h: 1 }).is_win_or_lose());
        assert!(!spec(GameKind::TicTacToe).is_monotone());
        assert!(!spec(GameKind::Surround { rows: 3, cols: 3, count_unchanged: false }).is_win_or_lose());
    }

    #[test]
    fn team_captains_table_size() {
        let table = vec!["1".to_string(); 4];
        assert!(GameSpec::new(GameKind::TeamCaptains { n: 2, table: table.clone() }, vec![]).is_ok());
        assert!(GameSpec::new(GameKind::TeamCaptains { n: 3, table: table.clone() }, vec![]).is_err());
        // One precolored cell leaves 2^(3-1) entries.
        assert!(GameSpec::new(GameKind::TeamCaptains { n: 3, table }, vec![(0, Player::I)]).is_ok());
    }

    #[test]
    fn winner_determined_cases() {
        let hex = spec(GameKind::Hex { rows: 2, cols: 2 });
        let mut cells = vec![None; 4];
        assert_eq!(hex.winner_determined(&cells).unwrap().winner, None);
        cells[0] = Some(Player::I);
        cells[2] = Some(Player::I);
        assert_eq!(hex.winner_determined(&cells).unwrap().winner, Some(Player::I));

        let andor = spec(GameKind::AndOr { h: 2 });
        let cells = vec![Some(Player::II), Some(Player::II), None, None];
        assert_eq!(andor.winner_determined(&cells).unwrap().winner, Some(Player::II));

        let ttt = spec(GameKind::TicTacToe);
        assert!(matches!(ttt.winner_determined(&[None; 9]), Err(GameError::UnsupportedGame(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = GameSpec::new(GameKind::Hex { rows: 3, cols: 3 }, vec![(4, Player::I), (0, Player::II)]).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"kind\":\"hex\""));
        assert!(text.contains("[0,\"II\",[0,0]]"));
        assert_eq!(GameSpec::from_json(&text).unwrap(), s);
        let ttt = GameSpec::from_json(r#"{"kind":"tic-tac-toe"}"#).unwrap();
        assert_eq!(ttt.n(), 9);
        let plain = GameSpec::from_json(r#"{"kind":"and-or","params":{"h":2},"precolored":[[1,"I"]]}"#).unwrap();
        assert_eq!(plain.precolored(), &[(1, Player::I)]);
        assert!(
            GameSpec::from_json(r#"{"kind":"hex","params":{"rows":2,"cols":2},"precolored":[[0,"I",[1,1]]]}"#).is_err()
        );
    }

    #[test]
    fn majority_root_counts() {
        assert!(majority_root(&[true, true, false], 1));
        assert!(!majority_root(&[true, false, false], 1));
    }
}
