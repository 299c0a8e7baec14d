//! Influences of items on the payoff and the two lower bounds on expected
//! game length derived from them.
//!
//! `I_i` is the probability that flipping item `i` changes `f` when every
//! free item is independently player I's with probability `p`. Precolored
//! items have influence 0.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::exact::{exact_pivotal_probabilities, ENUMERATION_LIMIT};
use crate::game::{GameKind, GameSpec};
use crate::par;
use crate::percolation::{Completer, PivotSearch};
use crate::position::GamePosition;
use crate::tree::{andor_levels, switching_win_probability};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InfluenceMethod {
    ExactEnumeration,
    TreeClosedForm,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceVector {
    pub values: Vec<f64>,
    /// Standard errors; all zero for exact methods.
    pub stderr: Vec<f64>,
    pub p: f64,
    pub method: InfluenceMethod,
}

impl InfluenceVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// `item,influence,stderr` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("item,influence,stderr\n");
        for (i, (v, s)) in self.values.iter().zip(&self.stderr).enumerate() {
            out.push_str(&format!("{i},{v},{s}\n"));
        }
        out
    }
}

fn check_bias(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GameError::Domain(format!("bias {p} outside [0, 1]")))
    }
}

/// Exact influences: level recursions for unprecolored tree games (any
/// depth), enumeration of the free items otherwise.
pub fn influence_exact(spec: &Arc<GameSpec>, p: f64) -> Result<InfluenceVector> {
    check_bias(p)?;
    let n = spec.n();
    if spec.precolored().is_empty() {
        if let Some(by_depth) = tree_influence_by_depth(spec.kind(), p) {
            let values =
                spec.board().cells.iter().map(|c| by_depth[c.tree_path.as_ref().map_or(0, Vec::len)]).collect();
            return Ok(InfluenceVector { values, stderr: vec![0.0; n], p, method: InfluenceMethod::TreeClosedForm });
        }
    }
    let pos = GamePosition::new(spec.clone(), p)?;
    let mut values: Vec<f64> = exact_pivotal_probabilities(&pos, p)?;
    for &(c, _) in spec.precolored() {
        values[c] = 0.0;
    }
    Ok(InfluenceVector { values, stderr: vec![0.0; n], p, method: InfluenceMethod::ExactEnumeration })
}

/// Influence of an item at depth `d` (index `d` of the result) of a tree
/// game, or `None` for other games.
pub fn tree_influence_by_depth(kind: &GameKind, p: f64) -> Option<Vec<f64>> {
    match kind {
        GameKind::AndOr { h } => {
            let q = andor_levels(*h, p);
            // The sibling at level k must not absorb its parent's operation.
            let leaf = (1..=*h).map(|k| if (k - 1) % 2 == 0 { q[k] } else { 1.0 - q[k] }).product();
            let mut out = vec![0.0; h + 1];
            out[*h] = leaf;
            Some(out)
        }
        GameKind::RecursiveMajority { h } => {
            let mut r = vec![p; h + 1];
            for k in (0..*h).rev() {
                r[k] = 3.0 * r[k + 1].powi(2) - 2.0 * r[k + 1].powi(3);
            }
            let leaf = (1..=*h).map(|k| 2.0 * r[k] * (1.0 - r[k])).product();
            let mut out = vec![0.0; h + 1];
            out[*h] = leaf;
            Some(out)
        }
        GameKind::Switching { profile } => {
            let h = profile.len();
            // c[d]: a vertex at depth d reaches the leaves.
            let c: Vec<f64> = (0..=h).map(|d| switching_win_probability(&profile[d..], p)).collect();
            let mut out = vec![0.0; h + 1];
            for d in 1..=h {
                let blocked: f64 = (0..d).map(|j| (1.0 - p * c[j + 1]).powi(profile[j] as i32 - 1)).product();
                out[d] = c[d] * p.powi(d as i32 - 1) * blocked;
            }
            Some(out)
        }
        _ => None,
    }
}

/// Flip-test frequencies over `samples` random assignments of the free
/// items.
pub fn influence_mc(spec: &Arc<GameSpec>, p: f64, samples: u64, seed: u64) -> Result<InfluenceVector> {
    check_bias(p)?;
    if samples == 0 {
        return Err(GameError::Domain("need at least one sample".into()));
    }
    let pos = GamePosition::new(spec.clone(), p)?;
    let n = spec.n();
    let completer = Completer::for_position(&pos, seed);
    let free = completer.undecided().to_vec();
    let wol = spec.is_monotone() && spec.is_win_or_lose();
    let counts = par::fold_indices(
        samples,
        || {
            let search = if wol { PivotSearch::new(spec).ok() } else { None };
            (vec![0u64; n], completer.clone(), search, Vec::new(), Vec::new())
        },
        |(mut counts, mut completer, mut search, mut colors, mut out), i| {
            completer.fill(i, &mut colors);
            match search.as_mut() {
                Some(s) => s.find(&colors, &free, &mut out),
                None => {
                    out.clear();
                    let f0 = spec.eval(&colors);
                    for &c in &free {
                        colors[c] = !colors[c];
                        if spec.eval(&colors) != f0 {
                            out.push(c);
                        }
                        colors[c] = !colors[c];
                    }
                }
            }
            for &c in &out {
                counts[c] += 1;
            }
            (counts, completer, search, colors, out)
        },
        |a, b| (par::add_counts(a.0, b.0), a.1, a.2, a.3, a.4),
    )
    .0;
    let values: Vec<f64> = counts.iter().map(|&k| k as f64 / samples as f64).collect();
    let stderr = values.iter().map(|v| (v * (1.0 - v) / samples as f64).sqrt()).collect();
    Ok(InfluenceVector { values, stderr, p, method: InfluenceMethod::MonteCarlo { samples, seed } })
}

/// `Var[f]` under the `p`-biased measure on the free items. Tree games use
/// their win probabilities; other games enumerate.
pub fn variance(spec: &Arc<GameSpec>, p: f64) -> Result<f64> {
    check_bias(p)?;
    if spec.precolored().is_empty() {
        let win = match spec.kind() {
            GameKind::AndOr { h } => Some(andor_levels(*h, p)[0]),
            GameKind::Switching { profile } => Some(switching_win_probability(profile, p)),
            GameKind::RecursiveMajority { h } => Some((0..*h).fold(p, |r, _| 3.0 * r * r - 2.0 * r * r * r)),
            _ => None,
        };
        if let Some(q) = win {
            return Ok(4.0 * q * (1.0 - q));
        }
    }
    let pos = GamePosition::new(spec.clone(), p)?;
    let free = pos.legal_moves();
    let k = free.len();
    if k > ENUMERATION_LIMIT {
        return Err(GameError::Capacity { limit: ENUMERATION_LIMIT, requested: k });
    }
    let base = pos.membership();
    // Sums of f and f^2 grouped by the number of free items owned by I.
    let (s1, s2, _) = par::fold_indices(
        1u64 << k,
        || (vec![0.0f64; k + 1], vec![0.0f64; k + 1], base.clone()),
        |(mut s1, mut s2, mut x), mask| {
            for (i, &c) in free.iter().enumerate() {
                x[c] = mask >> i & 1 == 1;
            }
            let f = spec.eval(&x);
            let j = mask.count_ones() as usize;
            s1[j] += f;
            s2[j] += f * f;
            (s1, s2, x)
        },
        |a, b| {
            let add = |mut u: Vec<f64>, v: Vec<f64>| {
                u.iter_mut().zip(v).for_each(|(x, y)| *x += y);
                u
            };
            (add(a.0, b.0), add(a.1, b.1), a.2)
        },
    );
    let weight = |j: usize| p.powi(j as i32) * (1.0 - p).powi((k - j) as i32);
    let mean: f64 = (0..=k).map(|j| s1[j] * weight(j)).sum();
    let second: f64 = (0..=k).map(|j| s2[j] * weight(j)).sum();
    Ok((second - mean * mean).max(0.0))
}

/// `Var[f]` in the unit-variance item encoding: `Var[f] / (4p(1-p))`.
pub fn normalized_variance(spec: &Arc<GameSpec>, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(GameError::Domain(format!("bias {p} must lie strictly between 0 and 1")));
    }
    Ok(variance(spec, p)? / (4.0 * p * (1.0 - p)))
}

/// `(Σ_i I_i)²`.
pub fn os_lower_bound(influences: &InfluenceVector) -> f64 {
    influences.total().powi(2)
}

/// `Var / max_i I_i` with `variance` in the unit-variance encoding (see
/// [`normalized_variance`]).
pub fn osss_lower_bound(influences: &InfluenceVector, variance: f64) -> Result<f64> {
    let max = influences.max();
    if max <= 0.0 {
        return Err(GameError::Degenerate("every item has zero influence".into()));
    }
    Ok(variance / max)
}
