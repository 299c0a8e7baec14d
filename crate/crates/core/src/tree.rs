//! Tree games: AND-OR win probabilities and lengths, switching-game series,
//! enhanced binary trees, and simulators that play the optimal strategies
//! given by the structure of these games.
//!
//! Tree edges and leaves are numbered breadth first: the item leading into
//! vertex `idx` at depth `d` has id `first(d) + idx`, children of a vertex
//! numbered left to right. The simulators never build the tree, so very
//! large trees are fine.

use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::board::CellId;
use crate::error::{GameError, Result};
use crate::exact::TieRule;
use crate::game::GameKind;
use crate::mc::GameRecord;
use crate::par;
use crate::position::Player;
use crate::rng::{self, domain};
use crate::scalar::{exact_int, exact_ratio, Exact, Scalar};

/// `(3 - √5) / 2`, the leaf bias at which the AND-OR recursion is stationary.
pub fn andor_critical_p() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// The golden ratio `(1 + √5) / 2`.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeGame {
    AndOr,
    Switching,
    RecursiveMajority,
}

/// A tree game with `profile[d]` children under every vertex at depth `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub game: TreeGame,
    pub profile: Vec<usize>,
}

impl TreeSpec {
    pub fn and_or(h: usize) -> Self {
        Self { game: TreeGame::AndOr, profile: vec![2; h] }
    }

    pub fn recursive_majority(h: usize) -> Self {
        Self { game: TreeGame::RecursiveMajority, profile: vec![3; h] }
    }

    pub fn switching(b: usize, h: usize) -> Self {
        Self { game: TreeGame::Switching, profile: vec![b; h] }
    }

    pub fn depth(&self) -> usize {
        self.profile.len()
    }

    /// The same game for the generic engine and the exact solver.
    pub fn game_kind(&self) -> GameKind {
        match self.game {
            TreeGame::AndOr => GameKind::AndOr { h: self.depth() },
            TreeGame::RecursiveMajority => GameKind::RecursiveMajority { h: self.depth() },
            TreeGame::Switching => GameKind::Switching { profile: self.profile.clone() },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.profile.contains(&0) {
            return Err(GameError::Sizing("tree arities must be positive".into()));
        }
        match self.game {
            TreeGame::AndOr if self.profile.iter().any(|&b| b != 2) => {
                Err(GameError::Sizing("AND-OR trees are binary".into()))
            }
            TreeGame::RecursiveMajority if self.profile.iter().any(|&b| b != 3) => {
                Err(GameError::Sizing("recursive majority trees are ternary".into()))
            }
            TreeGame::Switching if self.profile.is_empty() => {
                Err(GameError::Sizing("switching tree needs depth at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Root degree `⌊h · log 2 / 2⌋` of the enhanced binary tree, with the
/// logarithm taken in `log_base`.
pub fn enhanced_root_degree(h: usize, log_base: f64) -> usize {
    (h as f64 * 2f64.log(log_base) / 2.0).floor() as usize
}

/// Switching tree whose root has `⌊h ln 2 / 2⌋` children, each heading a
/// complete binary tree with `h - 1` levels.
pub fn enhanced_binary_tree(h: usize) -> Result<TreeSpec> {
    enhanced_binary_tree_with_base(h, std::f64::consts::E)
}

pub fn enhanced_binary_tree_with_base(h: usize, log_base: f64) -> Result<TreeSpec> {
    if h < 2 {
        return Err(GameError::Sizing(format!("enhanced binary tree needs h >= 2, got {h}")));
    }
    let k = enhanced_root_degree(h, log_base);
    if k == 0 {
        return Err(GameError::Sizing(format!("enhanced binary tree of depth {h} has no root children")));
    }
    let mut profile = vec![k];
    profile.extend(std::iter::repeat_n(2, h - 1));
    Ok(TreeSpec { game: TreeGame::Switching, profile })
}

/// Sequences indexed by level (AND-OR) or depth (switching).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionSeries {
    pub p: f64,
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
}

/// `q_k` for levels `k = 0..=h` of a depth-`h` AND-OR tree with leaves true
/// with probability `p`: `q_h = p`, `q_k = q_{k+1}^2` for even `k` and
/// `2 q_{k+1} - q_{k+1}^2` for odd `k`.
pub fn andor_levels<S: Scalar>(h: usize, p: S) -> Vec<S> {
    let mut q = vec![S::zero(); h + 1];
    q[h] = p;
    for k in (0..h).rev() {
        let c = q[k + 1].clone();
        q[k] = if k % 2 == 0 { c.clone() * c } else { S::from_ratio(2, 1) * c.clone() - c.clone() * c };
    }
    q
}

pub fn andor_true_probability<S: Scalar>(h: usize, p: S) -> S {
    andor_levels(h, p).swap_remove(0)
}

pub fn andor_series(h: usize, p: f64) -> RecursionSeries {
    RecursionSeries { p, q: andor_levels(h, p), mu: None, nu: None }
}

/// Fixed points in `[0, 1]` of `q ↦ (2q - q²)²`, ascending.
pub fn andor_fixed_points() -> [f64; 3] {
    [0.0, andor_critical_p(), 1.0]
}

/// Expected optimal game length `φ^h` at the critical bias; `h` must be even.
pub fn andor_expected_length(h: usize) -> Result<f64> {
    if h % 2 != 0 {
        return Err(GameError::Domain(format!("the length formula holds for even depth, got {h}")));
    }
    Ok(golden_ratio().powi(h as i32))
}

/// Expected number of labelled children of a labelled vertex.
pub fn andor_branching_factor(p: f64) -> f64 {
    2.0 - p
}

/// Complete ternary switching tree: `q` (Cut wins), `mu` (explored edges
/// given Cut wins) and `nu` (explored edges given Short wins) for depths
/// `0..=h`.
pub fn switching_series(h: usize) -> RecursionSeries {
    let (mut q, mut mu, mut nu) = (vec![0f64; h + 1], vec![0f64; h + 1], vec![0f64; h + 1]);
    for d in 0..h {
        let (qh, m, v) = (q[d], mu[d], nu[d]);
        q[d + 1] = ((1.0 + qh) / 2.0).powi(3);
        mu[d + 1] = 3.0 + 3.0 * qh / (1.0 + qh) * m;
        let den = 1.0 - qh.powi(3);
        let (q2, q3) = (qh * qh, qh.powi(3));
        nu[d + 1] = v + (1.0 + qh + q2 - 3.0 * q3) / den + (qh + q2 - 2.0 * q3) / den * m;
    }
    RecursionSeries { p: 0.5, q, mu: Some(mu), nu: Some(nu) }
}

/// Exact `q_0..=q_h` of the ternary switching series.
pub fn switching_q_exact(h: usize) -> Vec<Exact> {
    let mut q = vec![exact_int(0)];
    let half = exact_ratio(1, 2);
    for d in 0..h {
        let x = (exact_int(1) + q[d].clone()) * half.clone();
        q.push(x.clone() * x.clone() * x);
    }
    q
}

/// `√5 - 2`, the limit of the ternary Cut-win probability.
pub fn switching_q_limit() -> f64 {
    5f64.sqrt() - 2.0
}

/// Probability that the root connects to some leaf when every edge is open
/// with probability `p`, by dynamic programming from the leaves up.
pub fn switching_win_probability<S: Scalar>(profile: &[usize], p: S) -> S {
    let mut c = S::one();
    for &b in profile.iter().rev() {
        let closed = S::one() - p.clone() * c;
        let all_closed = (0..b).fold(S::one(), |acc, _| acc * closed.clone());
        c = S::one() - all_closed;
    }
    c
}

/// Breadth-first item numbering of a tree with a given arity profile.
#[derive(Debug, Clone)]
pub struct TreeIndex {
    profile: Vec<usize>,
    /// `first[d]`: id of the first item entering depth `d` (`d >= 1`).
    first: Vec<u64>,
}

impl TreeIndex {
    pub fn new(profile: &[usize]) -> Result<Self> {
        let mut first = vec![0u64, 0];
        let mut size = 1u64;
        for &b in profile {
            size = size.checked_mul(b as u64).ok_or_else(|| GameError::Sizing("tree is too large".into()))?;
            let next =
                first.last().unwrap().checked_add(size).ok_or_else(|| GameError::Sizing("tree is too large".into()))?;
            first.push(next);
        }
        first.pop();
        Ok(Self { profile: profile.to_vec(), first })
    }

    pub fn depth(&self) -> usize {
        self.profile.len()
    }

    pub fn id(&self, depth: usize, idx: u64) -> CellId {
        (self.first[depth] + idx) as CellId
    }

    /// `(depth, idx)` of an item id.
    pub fn locate(&self, id: CellId) -> (usize, u64) {
        let id = id as u64;
        let d = self.first[1..].partition_point(|&f| f <= id);
        (d, id - self.first[d])
    }

    /// Item entering the parent vertex, or `None` at the root.
    pub fn parent(&self, id: CellId) -> Option<CellId> {
        let (d, idx) = self.locate(id);
        (d >= 2).then(|| self.id(d - 1, idx / self.profile[d - 1] as u64))
    }

    pub fn children(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        let (d, idx) = self.locate(id);
        let b = if d < self.depth() { self.profile[d] as u64 } else { 0 };
        (0..b).map(move |j| self.id(d + 1, idx * b + j))
    }

    pub fn siblings(&self, id: CellId) -> impl Iterator<Item = CellId> + '_ {
        let (d, idx) = self.locate(id);
        let b = self.profile[d - 1] as u64;
        let base = idx - idx % b;
        (base..base + b).map(move |j| self.id(d, j)).filter(move |&s| s != id)
    }
}

/// Plays one game on `spec` following the optimal strategy read off the
/// tree structure. `coin(t)` is true when player I wins toss `t`.
pub fn play_tree_game(spec: &TreeSpec, tie_rule: TieRule, mut coin: impl FnMut(usize) -> bool) -> Result<GameRecord> {
    spec.validate()?;
    match spec.game {
        TreeGame::AndOr => Ok(play_and_or(spec.depth(), tie_rule, &mut coin)),
        TreeGame::Switching => play_switching(&spec.profile, tie_rule, &mut coin),
        TreeGame::RecursiveMajority => Err(GameError::UnsupportedGame(
            "no structural strategy is known for recursive majority; use self-play".into(),
        )),
    }
}

/// AND-OR: descend from the root through undetermined vertices, taking the
/// first undetermined child in the planar order (last for
/// [`TieRule::HighestId`]). Player I sets the leaf true, player II false.
fn play_and_or(h: usize, tie_rule: TieRule, coin: &mut dyn FnMut(usize) -> bool) -> GameRecord {
    let mut vals: Vec<Vec<Option<bool>>> = (0..=h).map(|k| vec![None; 1 << k]).collect();
    let mut record = GameRecord::new("and-or", Some(h), f64::NAN, 0);
    let mut turn = 0;
    while vals[0][0].is_none() {
        let mut idx = 0usize;
        for level in 0..h {
            let (a, b) = (2 * idx, 2 * idx + 1);
            let (first, second) = if tie_rule == TieRule::LowestId { (a, b) } else { (b, a) };
            idx = if vals[level + 1][first].is_none() { first } else { second };
        }
        let mover = Player::from_coin(coin(turn));
        turn += 1;
        let touches = h > 0 && vals[h][idx ^ 1].is_some();
        vals[h][idx] = Some(mover == Player::I);
        record.push(mover, idx, touches);
        for level in (0..h).rev() {
            idx /= 2;
            let (l, r) = (vals[level + 1][2 * idx], vals[level + 1][2 * idx + 1]);
            vals[level][idx] = if level % 2 == 0 {
                match (l, r) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                }
            } else {
                match (l, r) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                }
            };
        }
    }
    record.winner = vals[0][0].map(Player::from_coin);
    record
}

/// Switching: among undecided edges hanging off Short's root component, play
/// the deepest; ties by id.
fn play_switching(profile: &[usize], tie_rule: TieRule, coin: &mut dyn FnMut(usize) -> bool) -> Result<GameRecord> {
    let index = TreeIndex::new(profile)?;
    let h = profile.len();
    let order = |id: CellId| -> i64 {
        if tie_rule == TieRule::LowestId {
            -(id as i64)
        } else {
            id as i64
        }
    };
    let mut frontier: BinaryHeap<(usize, i64, CellId)> = BinaryHeap::new();
    for j in 0..profile[0] as u64 {
        let id = index.id(1, j);
        frontier.push((1, order(id), id));
    }
    let mut played: HashSet<CellId> = HashSet::new();
    let mut record = GameRecord::new("switching", Some(h), f64::NAN, 0);
    let mut turn = 0;
    let winner = loop {
        let Some((d, _, e)) = frontier.pop() else {
            break Player::II;
        };
        let mover = Player::from_coin(coin(turn));
        turn += 1;
        let touches = index.parent(e).is_some_and(|p| played.contains(&p))
            || index.siblings(e).any(|s| played.contains(&s))
            || index.children(e).any(|c| played.contains(&c));
        played.insert(e);
        record.push(mover, e, touches);
        if mover == Player::I {
            if d == h {
                break Player::I;
            }
            for c in index.children(e) {
                frontier.push((d + 1, order(c), c));
            }
        }
    };
    record.winner = Some(winner);
    Ok(record)
}

/// Simulates game `g = 0..games` with tosses from `rng::coin` under
/// `derive_seed(seed, GAME, g)`.
pub fn simulate_optimal_tree_game(spec: &TreeSpec, p: f64, seed: u64, tie_rule: TieRule) -> Result<GameRecord> {
    let mut record = play_tree_game(spec, tie_rule, |t| rng::coin(seed, t as u64, p))?;
    record.p = p;
    record.seed = seed;
    Ok(record)
}

pub fn simulate_batch(spec: &TreeSpec, p: f64, seed: u64, games: usize, tie_rule: TieRule) -> Result<Vec<GameRecord>> {
    spec.validate()?;
    TreeIndex::new(&spec.profile)?;
    par::map_indices(games, |g| {
        simulate_optimal_tree_game(spec, p, rng::derive_seed(seed, domain::GAME, g as u64), tie_rule)
    })
    .into_iter()
    .collect()
}

/// Locality check for an AND-OR record: once a move falls below an
/// undetermined vertex `v`, every later move stays below `v` until `v` is
/// determined. Returns the number of violating moves.
pub fn andor_locality_violations(h: usize, record: &GameRecord) -> usize {
    let mut leaves: Vec<Option<bool>> = vec![None; 1 << h];
    let mut violations = 0;
    for (t, m) in record.moves.iter().enumerate() {
        leaves[m.cell] = Some(m.coin == Player::I);
        let Some(next) = record.moves.get(t + 1) else {
            break;
        };
        for level in 0..h {
            let v = m.cell >> (h - level);
            if !node_determined(&leaves, h, level, v) && next.cell >> (h - level) != v {
                violations += 1;
                break;
            }
        }
    }
    violations
}

/// A vertex is determined when filling its undecided leaves all true and all
/// false gives the same value.
fn node_determined(leaves: &[Option<bool>], h: usize, level: usize, idx: usize) -> bool {
    fn eval(leaves: &[Option<bool>], h: usize, level: usize, idx: usize, fill: bool) -> bool {
        if level == h {
            return leaves[idx].unwrap_or(fill);
        }
        let (a, b) = (eval(leaves, h, level + 1, 2 * idx, fill), eval(leaves, h, level + 1, 2 * idx + 1, fill));
        if level % 2 == 0 {
            a && b
        } else {
            a || b
        }
    }
    eval(leaves, h, level, idx, true) == eval(leaves, h, level, idx, false)
}

/// Structure check for a switching record: Short's edges stay connected to
/// the root, and every Cut edge shares a vertex with a shorted edge or the
/// root when played. Returns the number of violating moves.
pub fn switching_structure_violations(profile: &[usize], record: &GameRecord) -> Result<usize> {
    let index = TreeIndex::new(profile)?;
    let mut shorted: HashSet<CellId> = HashSet::new();
    let mut violations = 0;
    for m in &record.moves {
        let at_root = index.locate(m.cell).0 == 1;
        let parent_shorted = index.parent(m.cell).is_some_and(|p| shorted.contains(&p));
        let ok = match m.coin {
            Player::I => at_root || parent_shorted,
            Player::II => {
                at_root
                    || parent_shorted
                    || index.siblings(m.cell).any(|s| shorted.contains(&s))
                    || index.children(m.cell).any(|c| shorted.contains(&c))
            }
        };
        if !ok {
            violations += 1;
        }
        if m.coin == Player::I {
            shorted.insert(m.cell);
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn andor_small_values() {
        assert_eq!(andor_true_probability(0, exact_ratio(1, 3)), exact_ratio(1, 3));
        assert_eq!(andor_true_probability(2, exact_ratio(1, 2)), exact_ratio(9, 16));
        let p = andor_critical_p();
        assert!((andor_true_probability(2, p) - p).abs() < 1e-15);
    }

    #[test]
    fn fixed_points_are_fixed() {
        for q in andor_fixed_points() {
            let step = (2.0 * q - q * q).powi(2);
            assert!((step - q).abs() < 1e-12);
        }
        assert!((andor_fixed_points()[1] - 0.3819660113).abs() < 1e-9);
    }

    #[test]
    fn golden_lengths() {
        assert_eq!(andor_expected_length(0).unwrap(), 1.0);
        assert!((andor_expected_length(2).unwrap() - 2.6180339887).abs() < 1e-9);
        assert!((andor_expected_length(4).unwrap() - 6.8541019662).abs() < 1e-9);
        assert!(andor_expected_length(3).is_err());
    }

    #[test]
    fn switching_first_terms() {
        let s = switching_series(1);
        assert_eq!(s.q[1], 0.125);
        assert_eq!(s.mu.as_ref().unwrap()[1], 3.0);
        assert_eq!(s.nu.as_ref().unwrap()[1], 1.0);
        let q = switching_q_exact(2);
        assert_eq!(q[1], exact_ratio(1, 8));
        assert_eq!(q[2], exact_ratio(729, 4096));
    }

    #[test]
    fn dp_matches_series() {
        let s = switching_series(20);
        for h in 0..=20 {
            let dp = switching_win_probability(&vec![3; h], 0.5);
            assert!((1.0 - s.q[h] - dp).abs() < 1e-12);
        }
        assert_eq!(switching_win_probability(&[3], exact_ratio(1, 2)), exact_ratio(7, 8));
    }

    #[test]
    fn enhanced_degrees() {
        assert_eq!(enhanced_binary_tree(10).unwrap().profile[0], 3);
        let t = enhanced_binary_tree(100).unwrap();
        assert_eq!(t.profile[0], 34);
        assert_eq!(t.depth(), 100);
        assert!(enhanced_binary_tree(2).is_err());
        assert_eq!(enhanced_root_degree(10, 2.0), 5);
    }

    #[test]
    fn index_round_trips() {
        let idx = TreeIndex::new(&[3, 2, 2]).unwrap();
        assert_eq!(idx.locate(0), (1, 0));
        assert_eq!(idx.locate(3), (2, 0));
        assert_eq!(idx.locate(9), (3, 0));
        assert_eq!(idx.parent(4), Some(0));
        assert_eq!(idx.parent(11), Some(4));
        assert_eq!(idx.children(1).collect::<Vec<_>>(), vec![5, 6]);
        assert_eq!(idx.siblings(1).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn index_agrees_with_board() {
        let board = crate::board::BoardGraph::build(crate::board::BoardKind::Tree {
            profile: vec![2, 3, 2],
            items: crate::board::TreeItems::Edges,
        })
        .unwrap();
        let index = TreeIndex::new(&[2, 3, 2]).unwrap();
        for cell in &board.cells {
            let path = cell.tree_path.as_ref().unwrap();
            let (d, _) = index.locate(cell.id);
            assert_eq!(d, path.len());
        }
        for e in 0..board.n() {
            let mut expect: Vec<usize> = index.siblings(e).chain(index.children(e)).chain(index.parent(e)).collect();
            if index.locate(e).0 == 1 {
                expect = index.siblings(e).chain(index.children(e)).collect();
            }
            expect.sort_unstable();
            let (d, _) = index.locate(e);
            if d < 3 {
                assert_eq!(board.adjacency[e], expect, "edge {e}");
            }
        }
    }

    #[test]
    fn single_leaf_game() {
        let r = play_tree_game(&TreeSpec::and_or(0), TieRule::LowestId, |_| false).unwrap();
        assert_eq!(r.length, 1);
        assert_eq!(r.winner, Some(Player::II));
    }

    #[test]
    fn ternary_depth_one_sequences() {
        // Cut wins only when it wins all three tosses; Short stops the game at
        // its first toss.
        let spec = TreeSpec::switching(3, 1);
        let mut explored_short = Vec::new();
        for coins in 0u32..8 {
            let r = play_tree_game(&spec, TieRule::LowestId, |t| coins >> t & 1 == 1).unwrap();
            assert!(r.length <= 3);
            assert_eq!(r.winner == Some(Player::II), coins == 0);
            if r.winner == Some(Player::I) {
                explored_short.push(r.length);
            }
        }
        // Weighted by probability 2^-length of each distinct game.
        let weighted: f64 = [1usize, 2, 3].iter().map(|&l| l as f64 * 0.5f64.powi(l as i32)).sum();
        assert!((weighted / (7.0 / 8.0) - 11.0 / 7.0).abs() < 1e-12);
        assert_eq!(explored_short.iter().filter(|&&l| l == 1).count(), 4);
    }

    #[test]
    fn simulated_invariants() {
        for g in 0..500u64 {
            let r = simulate_optimal_tree_game(&TreeSpec::and_or(4), andor_critical_p(), g, TieRule::LowestId).unwrap();
            assert_eq!(andor_locality_violations(4, &r), 0);
            let r = simulate_optimal_tree_game(&TreeSpec::switching(3, 4), 0.5, g, TieRule::HighestId).unwrap();
            assert_eq!(switching_structure_violations(&[3; 4], &r).unwrap(), 0);
        }
    }

    #[test]
    fn locality_checker_flags_jumps() {
        let mut r = GameRecord::new("and-or", Some(2), 0.5, 0);
        r.push(Player::II, 0, false);
        r.push(Player::I, 2, false);
        assert_eq!(andor_locality_violations(2, &r), 1);
    }

    #[test]
    fn huge_enhanced_tree_simulates() {
        let spec = enhanced_binary_tree(32).unwrap();
        let r = simulate_optimal_tree_game(&spec, 0.5, 1, TieRule::LowestId).unwrap();
        assert!(r.length >= 1);
        assert_eq!(switching_structure_violations(&spec.profile, &r).unwrap(), 0);
    }
}
