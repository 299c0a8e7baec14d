//! Pivotal items of crossing configurations.
//!
//! If player I has a crossing, the pivotal items are the player-I items every
//! crossing passes through: cut vertices (site boards) or bridges (bond
//! boards) between the two terminals, found in one depth-first search with
//! low-points. Otherwise they are the player-II items touching both the
//! source-side and the sink-side black clusters.

use crate::board::{BoardGraph, BondGraph, CellId, SiteTerminals};
use crate::error::{GameError, Result};
use crate::percolation::crossing::{black_wins, crossing_of, Crossing};

/// Reusable buffers for repeated pivotal-set queries on one board.
#[derive(Debug, Clone)]
pub struct PivotalFinder<'a> {
    board: &'a BoardGraph,
    near: Vec<bool>,
    far: Vec<bool>,
    disc: Vec<u32>,
    low: Vec<u32>,
    has_t: Vec<bool>,
    stack: Vec<(usize, usize, usize)>,
    mark: Vec<bool>,
}

const NONE: usize = usize::MAX;

impl<'a> PivotalFinder<'a> {
    pub fn new(board: &'a BoardGraph) -> Result<Self> {
        let vertices = match crossing_of(board)? {
            Crossing::Site(_) => board.n() + 2,
            Crossing::Bond(bond) => bond.vertices,
        };
        let (mut near, mut far) = (vec![false; board.n()], vec![false; board.n()]);
        if let Crossing::Site(t) = crossing_of(board)? {
            for &c in &t.black_near {
                near[c] = true;
            }
            for &c in &t.black_far {
                far[c] = true;
            }
        }
        Ok(Self {
            board,
            near,
            far,
            disc: vec![0; vertices],
            low: vec![0; vertices],
            has_t: vec![false; vertices],
            stack: Vec::new(),
            mark: vec![false; vertices.max(board.n())],
        })
    }

    pub fn board(&self) -> &'a BoardGraph {
        self.board
    }

    /// Writes the pivotal items of `colors` into `out` in ascending order.
    /// Returns whether player I has a crossing.
    pub fn find(&mut self, colors: &[bool], out: &mut Vec<CellId>) -> bool {
        out.clear();
        self.disc.fill(0);
        self.has_t.fill(false);
        let board = self.board;
        let black = match crossing_of(board).expect("checked in new") {
            Crossing::Site(t) => self.site(t, colors, out),
            Crossing::Bond(bond) => self.bond(bond, colors, out),
        };
        out.sort_unstable();
        black
    }

    /// Neighbor `k` of vertex `v` in the black site graph with virtual
    /// source `n` and sink `n + 1`; `Some(None)` is a skipped candidate.
    fn site_neighbor(&self, t: &SiteTerminals, colors: &[bool], v: usize, k: usize) -> Option<Option<usize>> {
        let n = self.board.n();
        if v == n || v == n + 1 {
            let group = if v == n { &t.black_near } else { &t.black_far };
            return group.get(k).map(|&c| colors[c].then_some(c));
        }
        let adj = &self.board.adjacency[v];
        if k < adj.len() {
            let w = adj[k];
            return Some(colors[w].then_some(w));
        }
        match k - adj.len() {
            0 => Some(self.near[v].then_some(n)),
            1 => Some(self.far[v].then_some(n + 1)),
            _ => None,
        }
    }

    fn site(&mut self, t: &SiteTerminals, colors: &[bool], out: &mut Vec<CellId>) -> bool {
        let n = self.board.n();
        let (s, sink) = (n, n + 1);
        let mut time = 1;
        self.disc[s] = time;
        self.low[s] = time;
        self.stack.clear();
        self.stack.push((s, NONE, 0));
        while let Some(top) = self.stack.last_mut() {
            let (v, _, idx) = *top;
            top.2 += 1;
            match self.site_neighbor(t, colors, v, idx) {
                Some(Some(w)) => {
                    if self.disc[w] == 0 {
                        time += 1;
                        self.disc[w] = time;
                        self.low[w] = time;
                        self.has_t[w] = w == sink;
                        self.stack.push((w, NONE, 0));
                    } else {
                        self.low[v] = self.low[v].min(self.disc[w]);
                    }
                }
                Some(None) => {}
                None => {
                    self.stack.pop();
                    if let Some(&(u, _, _)) = self.stack.last() {
                        self.low[u] = self.low[u].min(self.low[v]);
                        if self.has_t[v] {
                            self.has_t[u] = true;
                            if u < n && self.low[v] >= self.disc[u] {
                                out.push(u);
                            }
                        }
                    }
                }
            }
        }
        if self.disc[sink] != 0 {
            return true;
        }
        // No crossing: white cells touching both black sides.
        let from_source: Vec<bool> = (0..n).map(|c| self.disc[c] != 0).collect();
        self.mark[..n].fill(false);
        let mut stack: Vec<usize> = t.black_far.iter().copied().filter(|&c| colors[c]).collect();
        for &c in &stack {
            self.mark[c] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &self.board.adjacency[v] {
                if colors[w] && !self.mark[w] {
                    self.mark[w] = true;
                    stack.push(w);
                }
            }
        }
        for c in (0..n).filter(|&c| !colors[c]) {
            let adj = &self.board.adjacency[c];
            let touches_source = self.near[c] || adj.iter().any(|&w| from_source[w]);
            let touches_sink = self.far[c] || adj.iter().any(|&w| self.mark[w]);
            if touches_source && touches_sink {
                out.push(c);
            }
        }
        false
    }

    fn bond(&mut self, bond: &BondGraph, colors: &[bool], out: &mut Vec<CellId>) -> bool {
        let mut time = 1;
        self.disc[bond.source] = time;
        self.low[bond.source] = time;
        self.stack.clear();
        self.stack.push((bond.source, NONE, 0));
        while let Some(top) = self.stack.last_mut() {
            let (v, parent_edge, idx) = *top;
            top.2 += 1;
            match bond.incident[v].get(idx) {
                Some(&e) => {
                    if !colors[e] || e == parent_edge {
                        continue;
                    }
                    let w = bond.other_end(e, v);
                    if self.disc[w] == 0 {
                        time += 1;
                        self.disc[w] = time;
                        self.low[w] = time;
                        self.has_t[w] = w == bond.sink;
                        self.stack.push((w, e, 0));
                    } else {
                        self.low[v] = self.low[v].min(self.disc[w]);
                    }
                }
                None => {
                    self.stack.pop();
                    if let Some(&(u, _, _)) = self.stack.last() {
                        self.low[u] = self.low[u].min(self.low[v]);
                        if self.has_t[v] {
                            self.has_t[u] = true;
                            if self.low[v] > self.disc[u] {
                                out.push(parent_edge);
                            }
                        }
                    }
                }
            }
        }
        if self.disc[bond.sink] != 0 {
            return true;
        }
        let sink_side = crate::percolation::crossing::bond_reach(bond, colors, bond.sink);
        for (e, &(a, b)) in bond.edges.iter().enumerate() {
            if colors[e] {
                continue;
            }
            let (da, db) = (self.disc[a] != 0, self.disc[b] != 0);
            if (da && sink_side[b]) || (db && sink_side[a]) {
                out.push(e);
            }
        }
        false
    }
}

/// Items whose flip changes the winner of the crossing game.
pub fn pivotal_sites(board: &BoardGraph, colors: &[bool]) -> Result<Vec<CellId>> {
    check_len(board, colors)?;
    let mut finder = PivotalFinder::new(board)?;
    let mut out = Vec::new();
    finder.find(colors, &mut out);
    Ok(out)
}

/// Flip-and-recompute reference for [`pivotal_sites`].
pub fn pivotal_sites_oracle(board: &BoardGraph, colors: &[bool]) -> Result<Vec<CellId>> {
    check_len(board, colors)?;
    let base = black_wins(board, colors)?;
    let mut flipped = colors.to_vec();
    let mut out = Vec::new();
    for c in 0..board.n() {
        flipped[c] = !flipped[c];
        if black_wins(board, &flipped)? != base {
            out.push(c);
        }
        flipped[c] = !flipped[c];
    }
    Ok(out)
}

fn check_len(board: &BoardGraph, colors: &[bool]) -> Result<()> {
    if colors.len() != board.n() {
        return Err(GameError::Domain(format!("configuration has {} items, board has {}", colors.len(), board.n())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BoardKind, TreeItems};
    use crate::rng;
    use proptest::prelude::*;

    fn exhaustive(board: &BoardGraph) {
        let n = board.n();
        let mut finder = PivotalFinder::new(board).unwrap();
        let mut out = Vec::new();
        for mask in 0u64..1 << n {
            let colors: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
            finder.find(&colors, &mut out);
            assert_eq!(out, pivotal_sites_oracle(board, &colors).unwrap(), "{:?} mask {mask:b}", board.kind);
        }
    }

    #[test]
    fn one_cell_always_pivotal() {
        let b = BoardGraph::hex(1, 1).unwrap();
        assert_eq!(pivotal_sites(&b, &[true]).unwrap(), vec![0]);
        assert_eq!(pivotal_sites(&b, &[false]).unwrap(), vec![0]);
    }

    #[test]
    fn two_by_two_all_black() {
        let b = BoardGraph::hex(2, 2).unwrap();
        let expect = pivotal_sites_oracle(&b, &[true; 4]).unwrap();
        assert_eq!(pivotal_sites(&b, &[true; 4]).unwrap(), expect);
    }

    #[test]
    fn exhaustive_small_boards() {
        for (r, c) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 1), (3, 3), (4, 4)] {
            exhaustive(&BoardGraph::hex(r, c).unwrap());
        }
        for size in 1..=3 {
            exhaustive(&BoardGraph::build(BoardKind::Bridgit { size }).unwrap());
        }
        for profile in [vec![3], vec![3, 3], vec![2, 2, 2], vec![1, 3]] {
            exhaustive(&BoardGraph::build(BoardKind::Tree { profile, items: TreeItems::Edges }).unwrap());
        }
    }

    #[test]
    fn transposed_swap_duality() {
        let b = BoardGraph::hex(5, 5).unwrap();
        for i in 0..200u64 {
            let mut bits = vec![false; 25];
            rng::fill_bernoulli(&mut rng::stream(11, i), 0.5, &mut bits);
            let mut dual = vec![false; 25];
            for r in 0..5 {
                for c in 0..5 {
                    dual[c * 5 + r] = !bits[r * 5 + c];
                }
            }
            let a = pivotal_sites(&b, &bits).unwrap();
            let mut d: Vec<usize> = pivotal_sites(&b, &dual).unwrap().iter().map(|&x| (x % 5) * 5 + x / 5).collect();
            d.sort_unstable();
            assert_eq!(a, d);
        }
    }

    proptest! {
        #[test]
        fn agrees_with_oracle_on_hex(bits in proptest::collection::vec(any::<bool>(), 48)) {
            let b = BoardGraph::hex(6, 8).unwrap();
            prop_assert_eq!(pivotal_sites(&b, &bits).unwrap(), pivotal_sites_oracle(&b, &bits).unwrap());
        }

        #[test]
        fn agrees_with_oracle_on_bridgit(bits in proptest::collection::vec(any::<bool>(), 41)) {
            let b = BoardGraph::build(BoardKind::Bridgit { size: 5 }).unwrap();
            prop_assert_eq!(pivotal_sites(&b, &bits).unwrap(), pivotal_sites_oracle(&b, &bits).unwrap());
        }
    }
}
