//! Surround scoring on hex lattices.
//!
//! Clusters nest: a cluster not touching the boundary is enclosed by exactly
//! one cluster of the other color. The outermost enclosing cluster of a cell
//! is the boundary cluster at the top of that chain. We find it with a 0-1
//! breadth-first search from the boundary cells where stepping between cells
//! of different color costs 1: a cell's distance is its nesting depth, and the
//! boundary cluster it hangs off is inherited along shortest paths.

use std::collections::VecDeque;

use crate::board::BoardGraph;
use crate::error::{GameError, Result};

/// Per-cell result of the nesting search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    /// Color (true = player I) of the outermost cluster containing or
    /// enclosing each cell.
    pub outer_color: Vec<bool>,
    /// Nesting depth; 0 for cells in clusters touching the boundary.
    pub depth: Vec<u32>,
}

fn require_lattice(board: &BoardGraph, colors: &[bool]) -> Result<()> {
    if !board.is_hex() {
        return Err(GameError::UnsupportedGame("surround needs a hex lattice board".into()));
    }
    if colors.len() != board.n() {
        return Err(GameError::Domain(format!("configuration has {} cells, board has {}", colors.len(), board.n())));
    }
    Ok(())
}

pub fn enclosure(board: &BoardGraph, colors: &[bool]) -> Result<Enclosure> {
    require_lattice(board, colors)?;
    let n = board.n();
    let mut depth = vec![u32::MAX; n];
    let mut outer_color = colors.to_vec();
    let mut queue = VecDeque::with_capacity(n);
    for id in 0..n {
        if board.on_boundary(id) {
            depth[id] = 0;
            queue.push_back(id);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = depth[v];
        for &w in &board.adjacency[v] {
            let step = u32::from(colors[v] != colors[w]);
            if d + step < depth[w] {
                depth[w] = d + step;
                outer_color[w] = outer_color[v];
                if step == 0 {
                    queue.push_front(w);
                } else {
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(Enclosure { outer_color, depth })
}

/// Recolors every enclosed cell with the color of its outermost enclosing
/// cluster.
pub fn surround_recolor(board: &BoardGraph, colors: &[bool]) -> Result<Vec<bool>> {
    Ok(enclosure(board, colors)?.outer_color)
}

/// Cells recolored to player I minus cells recolored to player II. With
/// `count_unchanged`, enclosed cells that keep their color count as well.
pub fn surround_payoff(board: &BoardGraph, colors: &[bool], count_unchanged: bool) -> Result<i64> {
    let enc = enclosure(board, colors)?;
    Ok((0..board.n())
        .filter(|&c| enc.depth[c] > 0 && (count_unchanged || enc.outer_color[c] != colors[c]))
        .map(|c| if enc.outer_color[c] { 1 } else { -1 })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent check: a non-boundary cell is enclosed by color X when no
    /// path of non-X cells joins it to the boundary.
    fn enclosed_by(board: &BoardGraph, colors: &[bool], cell: usize, x: bool) -> bool {
        if colors[cell] == x {
            return false;
        }
        let mut seen = vec![false; board.n()];
        let mut stack = vec![cell];
        seen[cell] = true;
        while let Some(v) = stack.pop() {
            if board.on_boundary(v) {
                return false;
            }
            for &w in &board.adjacency[v] {
                if !seen[w] && colors[w] != x {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        true
    }

    #[test]
    fn all_black_scores_zero() {
        let b = BoardGraph::hex(5, 5).unwrap();
        assert_eq!(surround_payoff(&b, &[true; 25], false).unwrap(), 0);
    }

    #[test]
    fn two_by_two_never_scores() {
        let b = BoardGraph::hex(2, 2).unwrap();
        for mask in 0..16u32 {
            let colors: Vec<bool> = (0..4).map(|k| mask >> k & 1 == 1).collect();
            assert_eq!(surround_payoff(&b, &colors, false).unwrap(), 0);
            assert_eq!(surround_payoff(&b, &colors, true).unwrap(), 0);
        }
    }

    #[test]
    fn ring_captures_center() {
        let b = BoardGraph::hex(3, 3).unwrap();
        let center = b.cell_at(1, 1).unwrap();
        let mut colors = vec![false; 9];
        for &w in &b.adjacency[center] {
            colors[w] = true;
        }
        assert_eq!(b.adjacency[center].len(), 6);
        assert!(enclosed_by(&b, &colors, center, true));
        assert_eq!(surround_payoff(&b, &colors, false).unwrap(), 1);
    }

    #[test]
    fn nested_rings_use_outermost() {
        // Black background, white ring, black ring, white center.
        let b = BoardGraph::hex(7, 7).unwrap();
        let center = b.cell_at(3, 3).unwrap();
        let mut colors = vec![true; 49];
        let ring1: Vec<usize> = b.adjacency[center].clone();
        let mut ring2 = Vec::new();
        for &c in &ring1 {
            for &w in &b.adjacency[c] {
                if w != center && !ring1.contains(&w) && !ring2.contains(&w) {
                    ring2.push(w);
                }
            }
        }
        colors[center] = false;
        for &c in &ring2 {
            colors[c] = false;
        }
        let recolored = surround_recolor(&b, &colors).unwrap();
        assert!(recolored.iter().all(|&c| c));
        assert_eq!(ring2.len(), 12);
        assert_eq!(surround_payoff(&b, &colors, false).unwrap(), 13);
        assert_eq!(surround_payoff(&b, &colors, true).unwrap(), 19);
    }

    #[test]
    fn rejects_non_lattice() {
        let b = BoardGraph::build(crate::board::BoardKind::Grid3x3).unwrap();
        assert!(surround_payoff(&b, &[true; 9], false).is_err());
    }

    proptest! {
        #[test]
        fn recolor_is_idempotent(bits in proptest::collection::vec(any::<bool>(), 36)) {
            let b = BoardGraph::hex(6, 6).unwrap();
            let once = surround_recolor(&b, &bits).unwrap();
            let twice = surround_recolor(&b, &once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn recolored_cells_are_enclosed(bits in proptest::collection::vec(any::<bool>(), 36)) {
            let b = BoardGraph::hex(6, 6).unwrap();
            let out = surround_recolor(&b, &bits).unwrap();
            for c in 0..36 {
                if out[c] != bits[c] {
                    prop_assert!(enclosed_by(&b, &bits, c, out[c]));
                }
            }
        }
    }
}
