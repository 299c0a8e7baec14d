use std::fmt::Write;
use std::sync::Arc;

use randturn::exact::{exact_pivotal_probabilities, ENUMERATION_LIMIT};
use randturn::percolation::estimate_pivotal;
use randturn::{BoardGraph, CellId, GamePosition, GameSpec, Result};
use serde::Serialize;

use crate::output::fmt6;

/// Boards up to this many undecided cells also get enumerated probabilities.
const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatCell {
    pub id: CellId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
    pub value: f64,
    pub stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub game: String,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub cells: Vec<HeatCell>,
    pub argmax: CellId,
    /// Argmax set of the enumerated probabilities, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_argmax: Option<Vec<CellId>>,
    /// Largest |v(c) − v(rot c)| in units of the combined standard error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_max_z: Option<f64>,
}

pub fn run(spec: &Arc<GameSpec>, p: f64, samples: u64, seed: u64) -> Result<Heatmap> {
    let pos = GamePosition::new(spec.clone(), p)?;
    let est = estimate_pivotal(&pos, samples, seed)?;
    let free = pos.legal_moves();
    let board = spec.board();
    let exact = if free.len() <= EXACT_LIMIT.min(ENUMERATION_LIMIT) && spec.is_monotone() && spec.is_win_or_lose() {
        Some(exact_pivotal_probabilities::<f64>(&pos, p)?)
    } else {
        None
    };
    let exact_argmax = exact.as_ref().and_then(|e| {
        let best = free.iter().map(|&c| e[c]).fold(f64::NEG_INFINITY, f64::max);
        let set: Vec<CellId> = free.iter().copied().filter(|&c| (e[c] - best).abs() < 1e-12).collect();
        (!set.is_empty()).then_some(set)
    });
    let cells: Vec<HeatCell> = (0..spec.n())
        .map(|id| {
            let rc = board.coords(id);
            HeatCell {
                id,
                row: rc.map(|[r, _]| r),
                col: rc.map(|[_, c]| c),
                value: est.estimate(id),
                stderr: est.stderr(id),
                exact: exact.as_ref().map(|e| e[id]),
            }
        })
        .collect();
    let rotation_max_z = board.dims().map(|_| {
        (0..spec.n())
            .filter_map(|c| board.rotate_180(c).map(|d| (c, d)))
            .map(|(c, d)| {
                let se = (est.stderr(c).powi(2) + est.stderr(d).powi(2)).sqrt();
                let diff = (est.estimate(c) - est.estimate(d)).abs();
                if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    });
    let (rows, cols) = board.dims().unzip();
    Ok(Heatmap {
        game: spec.kind().name().to_string(),
        rows,
        cols,
        p,
        samples,
        seed,
        cells,
        argmax: est.argmax(&free).ok_or(randturn::GameError::GameOver)?,
        exact_argmax,
        rotation_max_z,
    })
}

/// `row,col,value` on lattices, `id,value` elsewhere.
pub fn csv(h: &Heatmap) -> String {
    let lattice = h.cells.iter().all(|c| c.row.is_some());
    let mut s = String::from(if lattice { "row,col,value\n" } else { "id,value\n" });
    for c in &h.cells {
        match (c.row, c.col) {
            (Some(r), Some(col)) if lattice => writeln!(s, "{r},{col},{}", fmt6(c.value)),
            _ => writeln!(s, "{},{}", c.id, fmt6(c.value)),
        }
        .unwrap();
    }
    s
}

fn shade(v: f64) -> String {
    let t = v.clamp(0.0, 1.0);
    let g = (255.0 * (1.0 - t)).round() as u8;
    let b = (255.0 * (1.0 - 0.8 * t)).round() as u8;
    format!("#ff{g:02x}{b:02x}")
}

/// Standalone SVG: hexagons for hex lozenges, squares for other lattices
/// and a strip for everything else. Shading is relative to the maximum.
pub fn svg(h: &Heatmap, board: &BoardGraph) -> String {
    let max = h.cells.iter().map(|c| c.value).fold(0.0, f64::max);
    let rel = |v: f64| if max > 0.0 { v / max } else { 0.0 };
    let r = 20.0;
    let w = 3f64.sqrt() * r;
    let mut shapes = String::new();
    let (mut width, mut height) = (0f64, 0f64);
    for c in &h.cells {
        let fill = shade(rel(c.value));
        let stroke = if c.id == h.argmax { "#000000\" stroke-width=\"2.5" } else { "#888888\" stroke-width=\"1" };
        let title = format!("<title>{} {}</title>", c.id, fmt6(c.value));
        match (board.is_hex(), c.row, c.col) {
            (true, Some(row), Some(col)) => {
                let cx = w * (col as f64 + row as f64 / 2.0) + w / 2.0 + 2.0;
                let cy = 1.5 * r * row as f64 + r + 2.0;
                let pts: Vec<String> = (0..6)
                    .map(|k| {
                        let a = std::f64::consts::PI / 3.0 * k as f64 + std::f64::consts::PI / 6.0;
                        format!("{:.2},{:.2}", cx + r * a.cos(), cy + r * a.sin())
                    })
                    .collect();
                writeln!(
                    shapes,
                    "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\">{title}</polygon>",
                    pts.join(" ")
                )
                .unwrap();
                width = width.max(cx + w / 2.0 + 2.0);
                height = height.max(cy + r + 2.0);
            }
            (_, row, col) => {
                let (x, y) = match (row, col) {
                    (Some(row), Some(col)) => (col as f64 * 2.0 * r, row as f64 * 2.0 * r),
                    _ => (c.id as f64 * 2.0 * r, 0.0),
                };
                writeln!(
                    shapes,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\" stroke=\"{stroke}\">{title}</rect>",
                    x + 2.0,
                    y + 2.0,
                    2.0 * r,
                    2.0 * r
                )
                .unwrap();
                width = width.max(x + 2.0 * r + 4.0);
                height = height.max(y + 2.0 * r + 4.0);
            }
        }
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n{shapes}</svg>\n",
        width.ceil(),
        height.ceil(),
        width,
        height
    )
}

pub fn text(h: &Heatmap) -> String {
    let mut s = String::new();
    if let Some(rows) = h.rows {
        for r in 0..rows {
            let mut line: Vec<&HeatCell> = h.cells.iter().filter(|c| c.row == Some(r)).collect();
            line.sort_by_key(|c| c.col);
            s += &" ".repeat(r * 3);
            s += &line.iter().map(|c| format!("{:.3}", c.value)).collect::<Vec<_>>().join(" ");
            s.push('\n');
        }
    }
    let cell = &h.cells[h.argmax];
    match (cell.row, cell.col) {
        (Some(r), Some(c)) => s += &format!("argmax {} ({r},{c}) {}\n", h.argmax, fmt6(cell.value)),
        _ => s += &format!("argmax {} {}\n", h.argmax, fmt6(cell.value)),
    }
    if let Some(a) = &h.exact_argmax {
        s += &format!("exact argmax {a:?}\n");
    }
    if let Some(z) = h.rotation_max_z {
        s += &format!("rotation max z {z:.3}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use randturn::GameKind;

    #[test]
    fn hex3_center() {
        let spec = Arc::new(GameSpec::without_precoloring(GameKind::Hex { rows: 3, cols: 3 }).unwrap());
        let h = run(&spec, 0.5, 20_000, 0).unwrap();
        assert_eq!(h.argmax, 4);
        assert_eq!(h.exact_argmax, Some(vec![4]));
        let text = csv(&h);
        assert!(text.starts_with("row,col,value\n"));
        assert_eq!(text.lines().count(), 10);
        assert!(svg(&h, spec.board()).matches("<polygon").count() == 9);
    }

    #[test]
    fn rows_without_coordinates() {
        let spec = Arc::new(GameSpec::without_precoloring(GameKind::AndOr { h: 2 }).unwrap());
        let h = run(&spec, 0.5, 1000, 0).unwrap();
        assert!(csv(&h).starts_with("id,value\n"));
        assert!(svg(&h, spec.board()).contains("<rect x="));
        assert!(h.rotation_max_z.is_none());
    }
}
