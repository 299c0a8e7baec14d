//! Exact backward induction over positions.
//!
//! A [`Solver`] covers every position reachable from a root position. The
//! undecided cells at the root are the solver's free cells; a position below
//! the root is keyed by one base-3 digit per free cell (0 undecided, 1 player
//! I, 2 player II). Claiming a cell only increases the key, so one sweep over
//! keys in descending order fills the whole value table, after which the
//! solver is read-only.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::board::CellId;
use crate::error::{GameError, Result};
use crate::game::GameSpec;
use crate::par;
use crate::percolation::PivotSearch;
use crate::position::{GamePosition, Player, TurnMode};
use crate::scalar::{exact_ratio, Exact, Scalar};

/// Default cap on undecided cells at the root (the table has 3^k entries).
pub const DEFAULT_STATE_LIMIT: usize = 13;
/// Cap on undecided cells for completion enumeration.
pub const ENUMERATION_LIMIT: usize = 25;

/// Deterministic choice among equally good moves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    LowestId,
    HighestId,
}

impl TieRule {
    pub fn pick(self, cells: &[CellId]) -> Option<CellId> {
        match self {
            TieRule::LowestId => cells.iter().copied().min(),
            TieRule::HighestId => cells.iter().copied().max(),
        }
    }
}

impl std::str::FromStr for TieRule {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-id" | "lowest" => Ok(TieRule::LowestId),
            "highest-id" | "highest" => Ok(TieRule::HighestId),
            other => Err(GameError::Domain(format!("unknown tie rule {other:?}"))),
        }
    }
}

/// Optimal moves at a position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSet {
    /// Player I's optimal moves, ascending.
    pub cells: Vec<CellId>,
    /// Player II's optimal moves, ascending.
    pub cells_ii: Vec<CellId>,
    /// Whether both players share the same optimal set.
    pub shared: bool,
}

#[derive(Debug, Clone)]
pub struct Solver<S> {
    spec: Arc<GameSpec>,
    root: Vec<Option<Player>>,
    free: Vec<CellId>,
    pow3: Vec<u32>,
    p: S,
    mode: TurnMode,
    /// Player I's and II's cards left at the root (balanced deck only).
    cards: (usize, usize),
    values: Vec<S>,
}

fn check_capacity(k: usize, limit: usize) -> Result<()> {
    if k > limit {
        return Err(GameError::Capacity { limit, requested: k });
    }
    Ok(())
}

impl<S: Scalar> Solver<S> {
    /// Solver for the coin-toss game from `position`, where player I wins each
    /// toss with probability `p`.
    pub fn new(position: &GamePosition, p: S) -> Result<Self> {
        Self::with_limit(position, p, DEFAULT_STATE_LIMIT)
    }

    pub fn with_limit(position: &GamePosition, p: S, limit: usize) -> Result<Self> {
        if p < S::zero() || p > S::one() {
            return Err(GameError::Domain(format!("coin bias {p:?} outside [0, 1]")));
        }
        Self::build(position, p, TurnMode::IidCoin, limit)
    }

    /// Solver for the card-deck turn order from a balanced position.
    pub fn balanced(position: &GamePosition) -> Result<Self> {
        if position.turn_mode() != TurnMode::BalancedDeck {
            return Err(GameError::Domain("position is not in balanced-deck mode".into()));
        }
        Self::build(position, S::from_ratio(1, 2), TurnMode::BalancedDeck, 12)
    }

    fn build(position: &GamePosition, p: S, mode: TurnMode, limit: usize) -> Result<Self> {
        let free = position.legal_moves();
        let k = free.len();
        check_capacity(k, limit)?;
        let pow3: Vec<u32> = (0..=k).map(|i| 3u32.pow(i as u32)).collect();
        let spec = position.spec().clone();
        // Payoff of every final allocation of the free cells.
        let base = position.membership();
        let table: Vec<S> = par::map_indices(1 << k, |mask| {
            let mut s1 = base.clone();
            for (i, &c) in free.iter().enumerate() {
                s1[c] = mask >> i & 1 == 1;
            }
            S::from_exact(&spec.eval_exact(&s1))
        });
        let (a, b) = position.remaining_cards();
        let cards = (a.max(0) as usize, b.max(0) as usize);
        let mut solver =
            Self { spec, root: position.owners().to_vec(), free, pow3, p, mode, cards, values: Vec::new() };
        solver.fill(&table);
        Ok(solver)
    }

    fn fill(&mut self, table: &[S]) {
        let k = self.free.len();
        let size = self.pow3[k] as usize;
        let mut values = vec![S::zero(); size];
        let one_minus_p = S::one() - self.p.clone();
        for key in (0..size).rev() {
            let (mut mask, mut n1, mut n2, mut rest) = (0usize, 0usize, 0usize, key);
            let mut open = false;
            for i in 0..k {
                match rest % 3 {
                    0 => open = true,
                    1 => {
                        mask |= 1 << i;
                        n1 += 1;
                    }
                    _ => n2 += 1,
                }
                rest /= 3;
            }
            if !open {
                values[key] = table[mask].clone();
                continue;
            }
            let mut best: Option<S> = None;
            let mut worst: Option<S> = None;
            let mut rest = key;
            for i in 0..k {
                if rest % 3 == 0 {
                    let up = &values[key + self.pow3[i] as usize];
                    let down = &values[key + 2 * self.pow3[i] as usize];
                    if best.as_ref().is_none_or(|b| up > b) {
                        best = Some(up.clone());
                    }
                    if worst.as_ref().is_none_or(|w| down < w) {
                        worst = Some(down.clone());
                    }
                }
                rest /= 3;
            }
            let (best, worst) = (best.expect("open cell"), worst.expect("open cell"));
            values[key] = match self.mode {
                TurnMode::IidCoin => self.p.clone() * best + one_minus_p.clone() * worst,
                TurnMode::BalancedDeck => {
                    let a = self.cards.0 as i64 - n1 as i64;
                    let b = self.cards.1 as i64 - n2 as i64;
                    if a <= 0 && b <= 0 {
                        S::zero()
                    } else if a <= 0 {
                        worst
                    } else if b <= 0 {
                        best
                    } else {
                        let pa = S::from_ratio(a, a + b);
                        pa.clone() * best + (S::one() - pa) * worst
                    }
                }
            };
        }
        self.values = values;
    }

    pub fn spec(&self) -> &Arc<GameSpec> {
        &self.spec
    }

    /// Free cells of the root position, ascending.
    pub fn free_cells(&self) -> &[CellId] {
        &self.free
    }

    fn key_of(&self, owners: &[Option<Player>]) -> Result<usize> {
        if owners.len() != self.root.len() {
            return Err(GameError::Domain("position belongs to a different board".into()));
        }
        for (c, (&r, &o)) in self.root.iter().zip(owners).enumerate() {
            if r.is_some() && r != o {
                return Err(GameError::Domain(format!("position does not extend the solver root at cell {c}")));
            }
        }
        Ok(self
            .free
            .iter()
            .enumerate()
            .map(|(i, &c)| match owners[c] {
                None => 0,
                Some(Player::I) => self.pow3[i] as usize,
                Some(Player::II) => 2 * self.pow3[i] as usize,
            })
            .sum())
    }

    pub fn root_value(&self) -> S {
        self.values[0].clone()
    }

    /// `E(t1, t2)` for a position extending the root.
    pub fn value(&self, position: &GamePosition) -> Result<S> {
        Ok(self.values[self.key_of(position.owners())?].clone())
    }

    /// Value after `player` claims each undecided cell, in cell order.
    pub fn move_values(&self, position: &GamePosition, player: Player) -> Result<Vec<(CellId, S)>> {
        let key = self.key_of(position.owners())?;
        let digit = if player == Player::I { 1 } else { 2 };
        Ok(self
            .free
            .iter()
            .enumerate()
            .filter(|(_, &c)| position.owner(c).is_none())
            .map(|(i, &c)| (c, self.values[key + digit * self.pow3[i] as usize].clone()))
            .collect())
    }

    /// Cells maximizing (player I) or minimizing (player II) the value after
    /// the move; ties use exact equality or the float tolerance.
    pub fn optimal_for(&self, position: &GamePosition, player: Player) -> Result<Vec<CellId>> {
        let vals = self.move_values(position, player)?;
        if vals.is_empty() {
            return Err(GameError::GameOver);
        }
        let better = |a: &S, b: &S| if player == Player::I { a > b } else { a < b };
        let mut best = vals[0].1.clone();
        for (_, v) in &vals {
            if better(v, &best) {
                best = v.clone();
            }
        }
        Ok(vals.iter().filter(|(_, v)| v.ties(&best)).map(|(c, _)| *c).collect())
    }

    pub fn optimal_moves(&self, position: &GamePosition) -> Result<MoveSet> {
        let cells = self.optimal_for(position, Player::I)?;
        let cells_ii = self.optimal_for(position, Player::II)?;
        let shared = cells == cells_ii;
        Ok(MoveSet { cells, cells_ii, shared })
    }

    /// Expected number of turns until the winner is determined when both
    /// players pick optimal moves with `tie_rule`. The coin bias is the
    /// solver's.
    pub fn expected_length(&self, position: &GamePosition, tie_rule: TieRule) -> Result<S> {
        if !(self.spec.is_monotone() && self.spec.is_win_or_lose()) {
            return Err(GameError::UnsupportedGame(format!(
                "{} is not a monotone win-or-lose game",
                self.spec.kind().name()
            )));
        }
        if self.mode != TurnMode::IidCoin {
            return Err(GameError::UnsupportedGame("game length is defined for coin turns".into()));
        }
        let mut memo = HashMap::new();
        self.length_rec(position, tie_rule, &mut memo)
    }

    fn length_rec(&self, pos: &GamePosition, tie_rule: TieRule, memo: &mut HashMap<usize, S>) -> Result<S> {
        let key = self.key_of(pos.owners())?;
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let value = if pos.winner_determined()?.is_determined() {
            S::zero()
        } else {
            let c1 = tie_rule.pick(&self.optimal_for(pos, Player::I)?).expect("undecided cells remain");
            let c2 = tie_rule.pick(&self.optimal_for(pos, Player::II)?).expect("undecided cells remain");
            let l1 = self.length_rec(&pos.apply_move(c1, Player::I)?, tie_rule, memo)?;
            let l2 = self.length_rec(&pos.apply_move(c2, Player::II)?, tie_rule, memo)?;
            S::one() + self.p.clone() * l1 + (S::one() - self.p.clone()) * l2
        };
        memo.insert(key, value.clone());
        Ok(value)
    }
}

/// `E` at `position` with coin bias `p`.
pub fn exact_value<S: Scalar>(position: &GamePosition, p: S) -> Result<S> {
    Ok(Solver::new(position, p)?.root_value())
}

pub fn optimal_moves<S: Scalar>(position: &GamePosition, p: S) -> Result<MoveSet> {
    Solver::new(position, p)?.optimal_moves(position)
}

/// Expected game length from the empty position of `spec`.
pub fn expected_game_length_exact<S: Scalar>(spec: &Arc<GameSpec>, p: S, tie_rule: TieRule) -> Result<S> {
    let pos = GamePosition::new(spec.clone(), p.to_f64())?;
    Solver::new(&pos, p)?.expected_length(&pos, tie_rule)
}

/// Value of the card-deck game from the empty position. Requires even `n`.
pub fn exact_value_balanced<S: Scalar>(spec: &Arc<GameSpec>) -> Result<S> {
    let pos = GamePosition::balanced(spec.clone())?;
    Ok(Solver::<S>::balanced(&pos)?.root_value())
}

/// Mean of `f` over all subsets of the undecided cells, each cell in player
/// I's set with probability `p`: the independent formula that the solver's
/// root value must match.
pub fn biased_mean<S: Scalar>(position: &GamePosition, p: S) -> Result<S> {
    let free = position.legal_moves();
    check_capacity(free.len(), ENUMERATION_LIMIT)?;
    let k = free.len();
    let spec = position.spec();
    let base = position.membership();
    // Sum f per subset size, then weight by p^j (1-p)^(k-j).
    let mut by_size: Vec<Exact> = vec![Exact::from_integer(0.into()); k + 1];
    let mut s1 = base.clone();
    for mask in 0u64..1 << k {
        for (i, &c) in free.iter().enumerate() {
            s1[c] = mask >> i & 1 == 1;
        }
        by_size[mask.count_ones() as usize] += spec.eval_exact(&s1);
    }
    Ok(weigh(&by_size.iter().map(S::from_exact).collect::<Vec<_>>(), &p))
}

/// `Σ_j w[j] p^j (1-p)^(k-j)` with `k = w.len() - 1`.
fn weigh<S: Scalar>(w: &[S], p: &S) -> S {
    let k = w.len() - 1;
    let q = S::one() - p.clone();
    let pow = |x: &S, e: usize| (0..e).fold(S::one(), |acc, _| acc * x.clone());
    w.iter().enumerate().fold(S::zero(), |acc, (j, wj)| acc + wj.clone() * pow(p, j) * pow(&q, k - j))
}

/// For every cell, the probability that it is pivotal when the undecided
/// cells are filled independently with bias `p`. Decided cells get the
/// probability computed over the same completions.
pub fn exact_pivotal_probabilities<S: Scalar>(position: &GamePosition, p: S) -> Result<Vec<S>> {
    let free = position.legal_moves();
    let k = free.len();
    check_capacity(k, ENUMERATION_LIMIT)?;
    let spec = position.spec();
    let n = position.n();
    let base = position.membership();
    let all: Vec<CellId> = (0..n).collect();
    let wol = spec.is_monotone() && spec.is_win_or_lose();
    if wol {
        PivotSearch::new(spec)?;
    }
    // counts[c * (k + 1) + j]: completions with j free cells owned by I in
    // which c is pivotal.
    let counts = par::fold_indices(
        1u64 << k,
        || (vec![0u64; n * (k + 1)], Vec::new(), Vec::new(), wol.then(|| PivotSearch::new(spec).expect("checked"))),
        |(mut counts, mut s1, mut out, mut search), mask| {
            s1.clear();
            s1.extend_from_slice(&base);
            for (i, &c) in free.iter().enumerate() {
                s1[c] = mask >> i & 1 == 1;
            }
            let j = mask.count_ones() as usize;
            match search.as_mut() {
                Some(search) => search.find(&s1, &all, &mut out),
                None => {
                    out.clear();
                    let f0 = spec.eval_exact(&s1);
                    for c in 0..n {
                        s1[c] = !s1[c];
                        if spec.eval_exact(&s1) != f0 {
                            out.push(c);
                        }
                        s1[c] = !s1[c];
                    }
                }
            }
            for &c in &out {
                counts[c * (k + 1) + j] += 1;
            }
            (counts, s1, out, search)
        },
        |a, b| (par::add_counts(a.0, b.0), a.1, a.2, a.3),
    )
    .0;
    Ok((0..n)
        .map(|c| {
            let w: Vec<S> =
                counts[c * (k + 1)..(c + 1) * (k + 1)].iter().map(|&x| S::from_ratio(x as i64, 1)).collect();
            weigh(&w, &p)
        })
        .collect())
}

/// Probability that `cell` is pivotal over random completions of the other
/// undecided cells.
pub fn exact_pivotal_probability<S: Scalar>(position: &GamePosition, cell: CellId, p: S) -> Result<S> {
    if cell >= position.n() || position.owner(cell).is_some() {
        return Err(GameError::IllegalMove(format!("cell {cell} is not undecided")));
    }
    Ok(exact_pivotal_probabilities(position, p)?.swap_remove(cell))
}

/// Distribution of player I's final set over the `2^n` equally likely coin
/// sequences at `p = 1/2`, both players playing the optimal move, played to
/// the end. Keys are bit masks over cell ids. Fails with a genericity
/// violation when an optimal move is not unique.
pub fn final_set_distribution(spec: &Arc<GameSpec>) -> Result<BTreeMap<u64, Exact>> {
    let root = GamePosition::new(spec.clone(), 0.5)?;
    let k = root.undecided_count();
    check_capacity(k, DEFAULT_STATE_LIMIT)?;
    let solver = Solver::<Exact>::new(&root, exact_ratio(1, 2))?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for coins in 0u64..1 << k {
        let mut pos = root.clone();
        for t in 0..k {
            let mover = Player::from_coin(coins >> t & 1 == 1);
            let moves = solver.optimal_moves(&pos)?;
            let own = if mover == Player::I { &moves.cells } else { &moves.cells_ii };
            if own.len() != 1 || !moves.shared {
                return Err(GameError::GenericityViolation(format!(
                    "{} optimal moves for player {mover} after {t} turns",
                    own.len()
                )));
            }
            pos = pos.apply_move(own[0], mover)?;
        }
        let mask = pos.t1().iter().fold(0u64, |m, &c| m | 1 << c);
        *counts.entry(mask).or_default() += 1;
    }
    let total = 1i64 << k;
    Ok(counts.into_iter().map(|(m, c)| (m, exact_ratio(c as i64, total))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameKind;
    use crate::scalar::exact_int;

    fn spec(kind: GameKind) -> Arc<GameSpec> {
        Arc::new(GameSpec::without_precoloring(kind).unwrap())
    }

    fn empty(spec: &Arc<GameSpec>) -> GamePosition {
        GamePosition::new(spec.clone(), 0.5).unwrap()
    }

    fn half() -> Exact {
        exact_ratio(1, 2)
    }

    #[test]
    fn one_cell_hex() {
        let s = spec(GameKind::Hex { rows: 1, cols: 1 });
        let pos = empty(&s);
        assert_eq!(exact_value(&pos, half()).unwrap(), exact_int(0));
        assert_eq!(optimal_moves(&pos, half()).unwrap().cells, vec![0]);
        assert_eq!(exact_pivotal_probability(&pos, 0, half()).unwrap(), exact_int(1));
        assert_eq!(expected_game_length_exact(&s, 0.5, TieRule::LowestId).unwrap(), 1.0);
    }

    #[test]
    fn and_or_depth_two_value() {
        let s = spec(GameKind::AndOr { h: 2 });
        // 9 of 16 labelings make the root true.
        assert_eq!(exact_value(&empty(&s), half()).unwrap(), exact_ratio(1, 8));
    }

    #[test]
    fn majority_pivotality_and_length() {
        let s = spec(GameKind::RecursiveMajority { h: 1 });
        let pos = empty(&s);
        for leaf in 0..3 {
            assert_eq!(exact_pivotal_probability(&pos, leaf, half()).unwrap(), half());
        }
        assert_eq!(expected_game_length_exact(&s, half(), TieRule::LowestId).unwrap(), exact_ratio(5, 2));
    }

    #[test]
    fn capacity_is_enforced() {
        let s = spec(GameKind::Hex { rows: 4, cols: 4 });
        match exact_value(&empty(&s), 0.5f64) {
            Err(GameError::Capacity { limit, requested }) => {
                assert_eq!((limit, requested), (13, 16))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn balanced_two_cells() {
        let table = [exact_int(5), exact_ratio(1, 3), exact_ratio(7, 2), exact_int(-4)];
        let s = Arc::new(GameSpec::team_captains(&table).unwrap());
        // Final sets are exactly {0} and {1}.
        let expect = (table[1].clone() + table[2].clone()) / exact_int(2);
        assert_eq!(exact_value_balanced::<Exact>(&s).unwrap(), expect);
        assert!(exact_value_balanced::<Exact>(&Arc::new(GameSpec::team_captains_random(3, 0).unwrap())).is_err());
    }

    #[test]
    fn biased_value_of_one_cell() {
        let s = spec(GameKind::Hex { rows: 1, cols: 1 });
        let p = exact_ratio(1, 3);
        assert_eq!(exact_value(&empty(&s), p.clone()).unwrap(), exact_ratio(-1, 3));
        assert_eq!(biased_mean(&empty(&s), p).unwrap(), exact_ratio(-1, 3));
    }

    #[test]
    fn solver_matches_positions_below_root() {
        let s = spec(GameKind::Hex { rows: 2, cols: 2 });
        let root = empty(&s);
        let solver = Solver::new(&root, half()).unwrap();
        let pos = root.apply_move(0, Player::I).unwrap().apply_move(3, Player::II).unwrap();
        let sub = Solver::new(&pos, half()).unwrap();
        assert_eq!(solver.value(&pos).unwrap(), sub.root_value());
        let other = GamePosition::new(spec(GameKind::Hex { rows: 1, cols: 1 }), 0.5).unwrap();
        assert!(solver.value(&other).is_err());
    }

    #[test]
    fn final_sets_one_cell() {
        let s = Arc::new(GameSpec::team_captains(&[exact_int(0), exact_int(1)]).unwrap());
        let dist = final_set_distribution(&s).unwrap();
        assert_eq!(dist, BTreeMap::from([(0, half()), (1, half())]));
    }

    #[test]
    fn ties_reported_as_violation() {
        let s = Arc::new(GameSpec::team_captains(&vec![exact_int(1); 4]).unwrap());
        assert!(matches!(final_set_distribution(&s), Err(GameError::GenericityViolation(_))));
    }

    #[test]
    fn parsing_tie_rules() {
        assert_eq!("lowest-id".parse::<TieRule>().unwrap(), TieRule::LowestId);
        assert_eq!(TieRule::HighestId.pick(&[2, 5, 1]), Some(5));
    }
}
