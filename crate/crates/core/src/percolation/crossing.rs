//! Crossing detection on site boards (hex) and bond boards (Bridg-It, trees).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::board::{BoardGraph, BondGraph, SiteTerminals};
use crate::error::{GameError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub black_crossing: bool,
    pub white_crossing: bool,
    /// Cells (site boards) or edges (bond boards) on a shortest black crossing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortest_black_crossing_length: Option<usize>,
}

/// Terminal structure a crossing game is scored against.
pub enum Crossing<'a> {
    Site(&'a SiteTerminals),
    Bond(&'a BondGraph),
}

pub fn crossing_of(board: &BoardGraph) -> Result<Crossing<'_>> {
    if let Some(site) = &board.terminals.site {
        Ok(Crossing::Site(site))
    } else if let Some(bond) = &board.terminals.bond {
        Ok(Crossing::Bond(bond))
    } else {
        Err(GameError::UnsupportedGame(format!("board {:?} has no crossing terminals", board.kind)))
    }
}

/// Whether cells with `colors[c] == side` join `from` to `to` on a site board.
fn site_path(board: &BoardGraph, colors: &[bool], side: bool, from: &[usize], to: &[usize]) -> bool {
    let n = board.n();
    let mut target = vec![false; n];
    for &c in to {
        target[c] = colors[c] == side;
    }
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    for &c in from {
        if colors[c] == side && !seen[c] {
            seen[c] = true;
            stack.push(c);
        }
    }
    while let Some(v) = stack.pop() {
        if target[v] {
            return true;
        }
        for &w in &board.adjacency[v] {
            if colors[w] == side && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Player I (black) joins the first row to the last row through black cells.
pub fn site_black_crossing(board: &BoardGraph, colors: &[bool]) -> bool {
    let t = board.terminals.site.as_ref().expect("site board");
    site_path(board, colors, true, &t.black_near, &t.black_far)
}

pub fn site_white_crossing(board: &BoardGraph, colors: &[bool]) -> bool {
    let t = board.terminals.site.as_ref().expect("site board");
    site_path(board, colors, false, &t.white_near, &t.white_far)
}

/// Vertices reachable from `start` through edges with `present[e]`.
pub(crate) fn bond_reach(bond: &BondGraph, present: &[bool], start: usize) -> Vec<bool> {
    let mut seen = vec![false; bond.vertices];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &e in &bond.incident[v] {
            if present[e] {
                let w = bond.other_end(e, v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    seen
}

/// Player I (Short) joins the source vertex to the sink through claimed edges.
pub fn bond_black_crossing(board: &BoardGraph, colors: &[bool]) -> bool {
    let bond = board.terminals.bond.as_ref().expect("bond board");
    bond_reach(bond, colors, bond.source)[bond.sink]
}

/// Player I wins the crossing game on `board`.
pub fn black_wins(board: &BoardGraph, colors: &[bool]) -> Result<bool> {
    match crossing_of(board)? {
        Crossing::Site(_) => Ok(site_black_crossing(board, colors)),
        Crossing::Bond(_) => Ok(bond_black_crossing(board, colors)),
    }
}

fn site_shortest(board: &BoardGraph, t: &SiteTerminals, colors: &[bool]) -> Option<usize> {
    let n = board.n();
    let mut dist = vec![usize::MAX; n];
    let mut far = vec![false; n];
    for &c in &t.black_far {
        far[c] = true;
    }
    let mut queue = VecDeque::new();
    for &c in &t.black_near {
        if colors[c] && dist[c] == usize::MAX {
            dist[c] = 1;
            queue.push_back(c);
        }
    }
    while let Some(v) = queue.pop_front() {
        if far[v] {
            return Some(dist[v]);
        }
        for &w in &board.adjacency[v] {
            if colors[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

fn bond_shortest(bond: &BondGraph, colors: &[bool]) -> Option<usize> {
    let mut dist = vec![usize::MAX; bond.vertices];
    dist[bond.source] = 0;
    let mut queue = VecDeque::from([bond.source]);
    while let Some(v) = queue.pop_front() {
        if v == bond.sink {
            return Some(dist[v]);
        }
        for &e in &bond.incident[v] {
            let w = bond.other_end(e, v);
            if colors[e] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Crossings of both colors. On bond boards player II (Cut) wins exactly when
/// no black crossing exists.
pub fn has_crossing(board: &BoardGraph, colors: &[bool], shortest: bool) -> Result<CrossingResult> {
    if colors.len() != board.n() {
        return Err(GameError::Domain(format!("configuration has {} items, board has {}", colors.len(), board.n())));
    }
    match crossing_of(board)? {
        Crossing::Site(t) => {
            let black = site_path(board, colors, true, &t.black_near, &t.black_far);
            Ok(CrossingResult {
                black_crossing: black,
                white_crossing: site_path(board, colors, false, &t.white_near, &t.white_far),
                shortest_black_crossing_length: if shortest && black { site_shortest(board, t, colors) } else { None },
            })
        }
        Crossing::Bond(bond) => {
            let black = bond_reach(bond, colors, bond.source)[bond.sink];
            Ok(CrossingResult {
                black_crossing: black,
                white_crossing: !black,
                shortest_black_crossing_length: if shortest && black { bond_shortest(bond, colors) } else { None },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BoardKind;

    #[test]
    fn all_black_two_by_two() {
        let b = BoardGraph::hex(2, 2).unwrap();
        let r = has_crossing(&b, &[true; 4], true).unwrap();
        assert!(r.black_crossing && !r.white_crossing);
        assert_eq!(r.shortest_black_crossing_length, Some(2));
    }

    #[test]
    fn two_by_two_enumeration_is_determined() {
        let b = BoardGraph::hex(2, 2).unwrap();
        for mask in 0..16u32 {
            let colors: Vec<bool> = (0..4).map(|k| mask >> k & 1 == 1).collect();
            let r = has_crossing(&b, &colors, false).unwrap();
            assert!(r.black_crossing ^ r.white_crossing, "mask {mask:04b}");
        }
    }

    #[test]
    fn wheatstone_bridge_cut_condition() {
        // Size 2: source -h00- a -h01- sink, source -h10- b -h11- sink, a -v- b.
        let b = BoardGraph::build(BoardKind::Bridgit { size: 2 }).unwrap();
        let bond = b.terminals.bond.as_ref().unwrap();
        assert_eq!(bond.edges.len(), 5);
        for mask in 0..32u32 {
            let on: Vec<bool> = (0..5).map(|k| mask >> k & 1 == 1).collect();
            // Short connects iff one of the four source-sink routes is fully claimed.
            let routes: [&[usize]; 4] = [&[0, 1], &[2, 3], &[0, 4, 3], &[2, 4, 1]];
            let expect = routes.iter().any(|r| r.iter().all(|&e| on[e]));
            assert_eq!(bond_black_crossing(&b, &on), expect, "mask {mask:05b}");
        }
    }

    #[test]
    fn single_edge_bridgit() {
        let b = BoardGraph::build(BoardKind::Bridgit { size: 1 }).unwrap();
        assert!(bond_black_crossing(&b, &[true]));
        let r = has_crossing(&b, &[false], true).unwrap();
        assert!(r.white_crossing && r.shortest_black_crossing_length.is_none());
    }

    #[test]
    fn boards_without_terminals_rejected() {
        let b = BoardGraph::build(BoardKind::Grid3x3).unwrap();
        assert!(matches!(has_crossing(&b, &[true; 9], false), Err(GameError::UnsupportedGame(_))));
    }
}
