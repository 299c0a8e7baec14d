use std::sync::Arc;

use randturn::exact::{self, Solver, TieRule};
use randturn::{CellId, Exact, GamePosition, GameSpec, Result, Scalar};
use serde::Serialize;

use crate::args::Bias;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub game: serde_json::Value,
    pub free_cells: usize,
    pub p: String,
    pub turns: &'static str,
    pub arithmetic: &'static str,
    pub value: String,
    pub value_float: f64,
    pub optimal_moves_i: Vec<CellId>,
    pub optimal_moves_ii: Vec<CellId>,
    pub shared: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_length: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_length_float: Option<f64>,
    /// Mean of the payoff over random final sets, next to the value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_of_payoff: Option<String>,
    pub mean_check: &'static str,
    /// Cells of highest pivotal probability at the start position.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pivotal_argmax: Option<Vec<CellId>>,
    pub pivotal_check: &'static str,
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(spec: &Arc<GameSpec>, p: &Bias, float: bool, balanced: bool, tie_rule: TieRule) -> Result<SolveReport> {
    if balanced {
        let pos = GamePosition::balanced(spec.clone())?;
        return if float {
            solve_with(spec, &pos, Solver::<f64>::balanced(&pos)?, p, true, tie_rule, |v| format!("{v:.12}"))
        } else {
            solve_with(spec, &pos, Solver::<Exact>::balanced(&pos)?, p, true, tie_rule, |v| v.to_string())
        };
    }
    let pos = GamePosition::new(spec.clone(), p.float)?;
    if float {
        solve_with(spec, &pos, Solver::new(&pos, p.float)?, p, false, tie_rule, |v| format!("{v:.12}"))
    } else {
        solve_with(spec, &pos, Solver::new(&pos, p.exact.clone())?, p, false, tie_rule, |v| v.to_string())
    }
}

fn solve_with<S: Scalar>(
    spec: &Arc<GameSpec>,
    pos: &GamePosition,
    solver: Solver<S>,
    p: &Bias,
    balanced: bool,
    tie_rule: TieRule,
    show: impl Fn(&S) -> String,
) -> Result<SolveReport> {
    let value = solver.root_value();
    let moves = solver.optimal_moves(pos)?;
    let decisive = spec.is_monotone() && spec.is_win_or_lose();
    let length = if decisive && !balanced { Some(solver.expected_length(pos, tie_rule)?) } else { None };
    let p_s = if S::is_exact() { S::from_exact(&p.exact) } else { S::from_f64(p.float) };

    let (mean, mean_check) = if balanced || pos.legal_moves().len() > exact::ENUMERATION_LIMIT {
        (None, "n/a")
    } else {
        let mean = exact::biased_mean(pos, p_s.clone())?;
        let ok = if S::is_exact() { mean == value } else { mean.ties(&value) };
        (Some(mean), verdict(ok))
    };

    let (pivotal_argmax, pivotal_check) = if decisive && !balanced && !pos.legal_moves().is_empty() {
        let probs = exact::exact_pivotal_probabilities(pos, p_s)?;
        let free = pos.legal_moves();
        let best = free.iter().map(|&c| probs[c].clone()).reduce(|a, b| if b > a { b } else { a }).expect("nonempty");
        let argmax: Vec<CellId> = free.iter().copied().filter(|&c| probs[c].ties(&best)).collect();
        let ok = argmax == moves.cells && argmax == moves.cells_ii;
        (Some(argmax), verdict(ok))
    } else {
        (None, "n/a")
    };

    Ok(SolveReport {
        game: serde_json::from_str(&spec.to_json()).expect("spec json"),
        free_cells: pos.legal_moves().len(),
        p: if balanced { "balanced".into() } else { p.exact.to_string() },
        turns: if balanced { "balanced-deck" } else { "coin" },
        arithmetic: if S::is_exact() { "exact" } else { "float" },
        value: show(&value),
        value_float: value.to_f64(),
        optimal_moves_i: moves.cells,
        optimal_moves_ii: moves.cells_ii,
        shared: moves.shared,
        expected_length: length.as_ref().map(&show),
        expected_length_float: length.as_ref().map(|l| l.to_f64()),
        mean_of_payoff: mean.as_ref().map(&show),
        mean_check,
        pivotal_argmax,
        pivotal_check,
    })
}

pub fn text(r: &SolveReport, spec: &GameSpec) -> String {
    let cells = |ids: &[CellId]| {
        ids.iter()
            .map(|&c| match spec.board().coords(c) {
                Some([row, col]) => format!("{c}({row},{col})"),
                None => c.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = format!("game        {} ({} free cells)\n", spec.kind().name(), r.free_cells);
    s += &format!("p           {}\n", r.p);
    s += &format!("value       {} (~{:.9})\n", r.value, r.value_float);
    s += &format!("moves I     {}\n", cells(&r.optimal_moves_i));
    s += &format!("moves II    {}\n", cells(&r.optimal_moves_ii));
    if let (Some(l), Some(f)) = (&r.expected_length, r.expected_length_float) {
        s += &format!("length      {l} (~{f:.9})\n");
    }
    s += &format!("mean of f   {} {}\n", r.mean_of_payoff.as_deref().unwrap_or("-"), r.mean_check);
    if let Some(a) = &r.pivotal_argmax {
        s += &format!("pivotal max {} {}\n", cells(a), r.pivotal_check);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use randturn::GameKind;

    fn spec(kind: GameKind) -> Arc<GameSpec> {
        Arc::new(GameSpec::without_precoloring(kind).unwrap())
    }

    #[test]
    fn hex3_is_fair() {
        let r =
            run(&spec(GameKind::Hex { rows: 3, cols: 3 }), &Bias::default(), false, false, TieRule::LowestId).unwrap();
        assert_eq!(r.value, "0");
        assert_eq!(r.mean_check, "PASS");
        assert_eq!(r.pivotal_check, "PASS");
        assert_eq!(r.optimal_moves_i, vec![4]);
    }

    #[test]
    fn majority_length() {
        let r = run(&spec(GameKind::RecursiveMajority { h: 1 }), &Bias::default(), false, false, TieRule::LowestId)
            .unwrap();
        assert_eq!(r.expected_length.as_deref(), Some("5/2"));
    }

    #[test]
    fn float_and_exact_agree() {
        let s = spec(GameKind::TicTacToe);
        let p: Bias = "1/3".parse().unwrap();
        let e = run(&s, &p, false, false, TieRule::LowestId).unwrap();
        let f = run(&s, &p, true, false, TieRule::LowestId).unwrap();
        assert!((e.value_float - f.value_float).abs() < 1e-12);
        assert_eq!(e.optimal_moves_i, f.optimal_moves_i);
        assert_eq!(f.mean_check, "PASS");
    }

    #[test]
    fn balanced_skips_the_mean() {
        let r =
            run(&spec(GameKind::Hex { rows: 2, cols: 2 }), &Bias::default(), false, true, TieRule::LowestId).unwrap();
        assert_eq!(r.mean_check, "n/a");
        assert_eq!(r.turns, "balanced-deck");
    }
}
