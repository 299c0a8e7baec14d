//! Boards: the finite ground set of playable items, their adjacency, and the
//! boundary structure that crossing and switching games are scored against.
//!
//! Hex lozenges use coordinates `(row, col)`. Cell `(i, j)` touches
//! `(i±1, j)`, `(i, j±1)`, `(i+1, j-1)` and `(i-1, j+1)`. Player I (black)
//! joins row 0 to the last row; player II (white) joins column 0 to the last
//! column.
//!
//! Bridg-It and tree switching boards are bond boards: the playable items are
//! the edges of an underlying vertex graph, and a player-I crossing is a path of
//! player-I edges from the source vertex to the sink vertex.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

pub type CellId = usize;

/// Largest ground set an explicit board may have.
pub const MAX_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: CellId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_path: Option<Vec<u32>>,
}

/// Which items of a tree are playable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeItems {
    Edges,
    Leaves,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoardKind {
    HexLozenge {
        rows: usize,
        cols: usize,
    },
    Bridgit {
        size: usize,
    },
    Grid3x3,
    /// `profile[d]` is the number of children of every vertex at depth `d`.
    Tree {
        profile: Vec<usize>,
        items: TreeItems,
    },
    Generic {
        n: usize,
    },
}

/// Boundary groups of a site-crossing board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteTerminals {
    pub black_near: Vec<CellId>,
    pub black_far: Vec<CellId>,
    pub white_near: Vec<CellId>,
    pub white_far: Vec<CellId>,
}

/// Vertex graph underlying a bond board. Item `e` is the edge `edges[e]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub source: usize,
    pub sink: usize,
    /// For each vertex, the incident item ids.
    pub incident: Vec<Vec<CellId>>,
}

impl BondGraph {
    fn new(vertices: usize, edges: Vec<(usize, usize)>, source: usize, sink: usize) -> Self {
        let mut incident = vec![Vec::new(); vertices];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }
        Self { vertices, edges, source, sink, incident }
    }

    pub fn other_end(&self, edge: CellId, vertex: usize) -> usize {
        let (u, v) = self.edges[edge];
        if u == vertex {
            v
        } else {
            u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminals {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<SiteTerminals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond: Option<BondGraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardGraph {
    pub kind: BoardKind,
    pub cells: Vec<Cell>,
    pub adjacency: Vec<Vec<CellId>>,
    pub terminals: Terminals,
}

fn sizing<T>(msg: impl Into<String>) -> Result<T> {
    Err(GameError::Sizing(msg.into()))
}

impl BoardGraph {
    /// Builds a board. Identical input always yields identical ids and
    /// adjacency.
    pub fn build(kind: BoardKind) -> Result<Self> {
        match &kind {
            BoardKind::HexLozenge { rows, cols } => hex_lozenge(*rows, *cols),
            BoardKind::Bridgit { size } => bridgit(*size),
            BoardKind::Grid3x3 => Ok(grid3x3()),
            BoardKind::Tree { profile, items } => tree(profile, *items),
            BoardKind::Generic { n } => generic(*n),
        }
    }

    pub fn hex(rows: usize, cols: usize) -> Result<Self> {
        Self::build(BoardKind::HexLozenge { rows, cols })
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    /// Rows and columns of a lattice board.
    pub fn dims(&self) -> Option<(usize, usize)> {
        match self.kind {
            BoardKind::HexLozenge { rows, cols } => Some((rows, cols)),
            BoardKind::Grid3x3 => Some((3, 3)),
            BoardKind::Bridgit { size } => Some((2 * size - 1, 2 * size)),
            _ => None,
        }
    }

    pub fn is_hex(&self) -> bool {
        matches!(self.kind, BoardKind::HexLozenge { .. })
    }

    pub fn coords(&self, id: CellId) -> Option<[usize; 2]> {
        self.cells.get(id).and_then(|c| c.coords)
    }

    /// Looks up a lattice cell by coordinates.
    pub fn cell_at(&self, row: usize, col: usize) -> Option<CellId> {
        match self.kind {
            BoardKind::HexLozenge { rows, cols } => (row < rows && col < cols).then_some(row * cols + col),
            BoardKind::Grid3x3 => (row < 3 && col < 3).then_some(row * 3 + col),
            _ => self.cells.iter().find(|c| c.coords == Some([row, col])).map(|c| c.id),
        }
    }

    /// Cells touching the outer boundary of a lattice board.
    pub fn on_boundary(&self, id: CellId) -> bool {
        match (self.dims(), self.coords(id)) {
            (Some((rows, cols)), Some([r, c])) => r == 0 || c == 0 || r + 1 == rows || c + 1 == cols,
            _ => true,
        }
    }

    /// Image of a cell under the 180° rotation of a lattice board.
    pub fn rotate_180(&self, id: CellId) -> Option<CellId> {
        let (rows, cols) = self.dims()?;
        let [r, c] = self.coords(id)?;
        self.cell_at(rows - 1 - r, cols - 1 - c)
    }

    /// Whether `set` (as a membership vector) is connected in the adjacency.
    /// The empty set counts as connected.
    pub fn is_connected(&self, set: &[bool]) -> bool {
        let Some(start) = set.iter().position(|&b| b) else {
            return true;
        };
        let mut seen = vec![false; self.n()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(c) = stack.pop() {
            for &d in &self.adjacency[c] {
                if set[d] && !seen[d] {
                    seen[d] = true;
                    reached += 1;
                    stack.push(d);
                }
            }
        }
        reached == set.iter().filter(|&&b| b).count()
    }
}

fn hex_lozenge(rows: usize, cols: usize) -> Result<BoardGraph> {
    if rows == 0 || cols == 0 {
        return sizing(format!("hex board needs positive dimensions, got {rows}x{cols}"));
    }
    let n = rows.checked_mul(cols).filter(|&n| n <= MAX_CELLS);
    let Some(n) = n else {
        return sizing(format!("hex board {rows}x{cols} is too large"));
    };
    let id = |r: usize, c: usize| r * cols + c;
    let mut cells = Vec::with_capacity(n);
    let mut adjacency = Vec::with_capacity(n);
    for r in 0..rows {
        for c in 0..cols {
            cells.push(Cell { id: id(r, c), coords: Some([r, c]), tree_path: None });
            let (r, c) = (r as isize, c as isize);
            let mut nbrs = Vec::with_capacity(6);
            for (dr, dc) in [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)] {
                let (nr, nc) = (r + dr, c + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
                    nbrs.push(id(nr as usize, nc as usize));
                }
            }
            nbrs.sort_unstable();
            adjacency.push(nbrs);
        }
    }
    let site = SiteTerminals {
        black_near: (0..cols).map(|c| id(0, c)).collect(),
        black_far: (0..cols).map(|c| id(rows - 1, c)).collect(),
        white_near: (0..rows).map(|r| id(r, 0)).collect(),
        white_far: (0..rows).map(|r| id(r, cols - 1)).collect(),
    };
    Ok(BoardGraph {
        kind: BoardKind::HexLozenge { rows, cols },
        cells,
        adjacency,
        terminals: Terminals { site: Some(site), bond: None },
    })
}

/// Bridg-It: vertices form `size + 1` columns by `size` rows; column 0 is
/// merged into the source and column `size` into the sink.
fn bridgit(size: usize) -> Result<BoardGraph> {
    if size == 0 || size > 1024 {
        return sizing(format!("bridgit size must be in 1..=1024, got {size}"));
    }
    let l = size;
    // Vertex ids: 0 = source, 1 = sink, interior (x in 1..l, y) afterwards.
    let vertex = |x: usize, y: usize| -> usize {
        if x == 0 {
            0
        } else if x == l {
            1
        } else {
            2 + (x - 1) * l + y
        }
    };
    let vertices = 2 + (l - 1) * l;
    let mut edges = Vec::new();
    let mut cells = Vec::new();
    for y in 0..l {
        for x in 0..l {
            cells.push(Cell { id: edges.len(), coords: Some([2 * y, 2 * x + 1]), tree_path: None });
            edges.push((vertex(x, y), vertex(x + 1, y)));
        }
    }
    for x in 1..l {
        for y in 0..l - 1 {
            cells.push(Cell { id: edges.len(), coords: Some([2 * y + 1, 2 * x]), tree_path: None });
            edges.push((vertex(x, y), vertex(x, y + 1)));
        }
    }
    let bond = BondGraph::new(vertices, edges, 0, 1);
    let adjacency = bond_adjacency(&bond, &[0, 1]);
    Ok(BoardGraph {
        kind: BoardKind::Bridgit { size },
        cells,
        adjacency,
        terminals: Terminals { site: None, bond: Some(bond) },
    })
}

/// Items sharing an endpoint are adjacent, except through `merged` vertices.
fn bond_adjacency(bond: &BondGraph, merged: &[usize]) -> Vec<Vec<CellId>> {
    let mut adjacency = vec![Vec::new(); bond.edges.len()];
    for (v, inc) in bond.incident.iter().enumerate() {
        if merged.contains(&v) {
            continue;
        }
        for &a in inc {
            for &b in inc {
                if a != b {
                    adjacency[a].push(b);
                }
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    adjacency
}

fn grid3x3() -> BoardGraph {
    let mut cells = Vec::new();
    let mut adjacency = Vec::new();
    for r in 0..3usize {
        for c in 0..3usize {
            cells.push(Cell { id: r * 3 + c, coords: Some([r, c]), tree_path: None });
            let mut nbrs = Vec::new();
            if r > 0 {
                nbrs.push((r - 1) * 3 + c);
            }
            if c > 0 {
                nbrs.push(r * 3 + c - 1);
            }
            if c < 2 {
                nbrs.push(r * 3 + c + 1);
            }
            if r < 2 {
                nbrs.push((r + 1) * 3 + c);
            }
            adjacency.push(nbrs);
        }
    }
    BoardGraph { kind: BoardKind::Grid3x3, cells, adjacency, terminals: Terminals { site: None, bond: None } }
}

fn generic(n: usize) -> Result<BoardGraph> {
    if n == 0 || n > MAX_CELLS {
        return sizing(format!("generic board needs 1..={MAX_CELLS} items, got {n}"));
    }
    Ok(BoardGraph {
        kind: BoardKind::Generic { n },
        cells: (0..n).map(|id| Cell { id, coords: None, tree_path: None }).collect(),
        adjacency: vec![Vec::new(); n],
        terminals: Terminals { site: None, bond: None },
    })
}

/// Number of vertices on each level of a tree with the given arity profile.
pub fn level_sizes(profile: &[usize]) -> Option<Vec<usize>> {
    let mut sizes = vec![1usize];
    for &b in profile {
        let next = sizes.last()?.checked_mul(b)?;
        sizes.push(next);
    }
    Some(sizes)
}

fn tree(profile: &[usize], items: TreeItems) -> Result<BoardGraph> {
    if profile.contains(&0) {
        return sizing("tree arities must be positive");
    }
    let sizes = level_sizes(profile).ok_or_else(|| GameError::Sizing("tree is too large".into()))?;
    let h = profile.len();
    let vertices: usize = sizes.iter().try_fold(0usize, |acc, &s| acc.checked_add(s)).unwrap_or(usize::MAX);
    if vertices > MAX_CELLS {
        return sizing(format!("tree with {vertices} vertices is too large"));
    }
    // Vertex numbering: level by level, planar order within a level.
    let mut offsets = vec![0usize];
    for s in &sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let path_of = |level: usize, mut idx: usize| -> Vec<u32> {
        let mut path = vec![0u32; level];
        for d in (0..level).rev() {
            path[d] = (idx % profile[d]) as u32;
            idx /= profile[d];
        }
        path
    };
    match items {
        TreeItems::Edges => {
            if h == 0 {
                return sizing("switching tree needs depth at least 1");
            }
            // Leaves are merged into a single sink vertex.
            let sink = offsets[h];
            let total_vertices = sink + 1;
            let mut edges = Vec::new();
            let mut cells = Vec::new();
            for level in 1..=h {
                for idx in 0..sizes[level] {
                    let parent = offsets[level - 1] + idx / profile[level - 1];
                    let child = if level == h { sink } else { offsets[level] + idx };
                    cells.push(Cell { id: edges.len(), coords: None, tree_path: Some(path_of(level, idx)) });
                    edges.push((parent, child));
                }
            }
            debug_assert_eq!(edges.len(), vertices - 1);
            let bond = BondGraph::new(total_vertices, edges, 0, sink);
            let adjacency = bond_adjacency(&bond, &[sink]);
            Ok(BoardGraph {
                kind: BoardKind::Tree { profile: profile.to_vec(), items },
                cells,
                adjacency,
                terminals: Terminals { site: None, bond: Some(bond) },
            })
        }
        TreeItems::Leaves => {
            let leaves = sizes[h];
            let last = if h == 0 { 1 } else { profile[h - 1] };
            let cells =
                (0..leaves).map(|idx| Cell { id: idx, coords: None, tree_path: Some(path_of(h, idx)) }).collect();
            let adjacency = (0..leaves)
                .map(|idx| {
                    let base = idx - idx % last;
                    (base..base + last).filter(|&j| j != idx).collect()
                })
                .collect();
            Ok(BoardGraph {
                kind: BoardKind::Tree { profile: profile.to_vec(), items },
                cells,
                adjacency,
                terminals: Terminals { site: None, bond: None },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_one_cell_touches_all_sides() {
        let b = BoardGraph::hex(1, 1).unwrap();
        assert_eq!(b.n(), 1);
        assert!(b.adjacency[0].is_empty());
        let t = b.terminals.site.as_ref().unwrap();
        for group in [&t.black_near, &t.black_far, &t.white_near, &t.white_far] {
            assert_eq!(group, &vec![0]);
        }
    }

    #[test]
    fn hex_two_neighbor_rule() {
        let b = BoardGraph::hex(2, 2).unwrap();
        assert_eq!(b.n(), 4);
        let at = |r, c| b.cell_at(r, c).unwrap();
        let mut n00 = b.adjacency[at(0, 0)].clone();
        n00.sort();
        assert_eq!(n00, vec![at(0, 1), at(1, 0)]);
        let mut n10 = b.adjacency[at(1, 0)].clone();
        n10.sort();
        let mut expect = vec![at(0, 0), at(1, 1), at(0, 1)];
        expect.sort();
        assert_eq!(n10, expect);
    }

    #[test]
    fn adjacency_symmetric_and_irreflexive() {
        let boards = [
            BoardGraph::hex(4, 7).unwrap(),
            BoardGraph::build(BoardKind::Bridgit { size: 4 }).unwrap(),
            BoardGraph::build(BoardKind::Grid3x3).unwrap(),
            BoardGraph::build(BoardKind::Tree { profile: vec![3, 3], items: TreeItems::Edges }).unwrap(),
            BoardGraph::build(BoardKind::Tree { profile: vec![2, 2, 2], items: TreeItems::Leaves }).unwrap(),
        ];
        for b in &boards {
            for (i, c) in b.cells.iter().enumerate() {
                assert_eq!(c.id, i);
            }
            for (a, nbrs) in b.adjacency.iter().enumerate() {
                for &x in nbrs {
                    assert_ne!(a, x);
                    assert!(b.adjacency[x].contains(&a), "{:?}", b.kind);
                }
            }
        }
    }

    #[test]
    fn ternary_tree_counts() {
        let b = BoardGraph::build(BoardKind::Tree { profile: vec![3, 3], items: TreeItems::Edges }).unwrap();
        assert_eq!(b.n(), 12);
        let bond = b.terminals.bond.as_ref().unwrap();
        let leaf_edges = bond.incident[bond.sink].len();
        assert_eq!(leaf_edges, 9);
        assert_eq!(bond.incident[bond.source].len(), 3);
    }

    #[test]
    fn bridgit_shapes() {
        let b1 = BoardGraph::build(BoardKind::Bridgit { size: 1 }).unwrap();
        assert_eq!(b1.n(), 1);
        let b2 = BoardGraph::build(BoardKind::Bridgit { size: 2 }).unwrap();
        // Wheatstone bridge: four horizontal edges and one interior vertical.
        assert_eq!(b2.n(), 5);
        let b5 = BoardGraph::build(BoardKind::Bridgit { size: 5 }).unwrap();
        assert_eq!(b5.n(), 25 + 16);
    }

    #[test]
    fn sizing_errors() {
        assert!(matches!(BoardGraph::hex(0, 3), Err(GameError::Sizing(_))));
        assert!(matches!(BoardGraph::hex(usize::MAX, 2), Err(GameError::Sizing(_))));
        assert!(BoardGraph::build(BoardKind::Generic { n: 0 }).is_err());
        assert!(BoardGraph::build(BoardKind::Tree { profile: vec![2; 40], items: TreeItems::Leaves }).is_err());
    }

    #[test]
    fn deterministic_build() {
        let a = BoardGraph::hex(5, 5).unwrap();
        let b = BoardGraph::hex(5, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rotation_is_an_involution() {
        let b = BoardGraph::hex(3, 5).unwrap();
        for id in 0..b.n() {
            assert_eq!(b.rotate_180(b.rotate_180(id).unwrap()), Some(id));
        }
    }
}
