use randturn::exact::TieRule;
use randturn::mc::GameRecord;
use randturn::rng::derive_seed;
use randturn::stats::{log_log_fit, summarize, LinearFit, Summary};
use randturn::tree::{self, TreeSpec};
use randturn::{Player, Result};
use serde::Serialize;

use crate::args::TreeKind;
use crate::output::{fmt6, fmt_opt};

const SIM_DOMAIN: u64 = 0x7472_6565;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub h: usize,
    /// Root true probability (AND-OR, by level) or Cut-win probability.
    pub q: f64,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    /// Probability that player I (Short, or the root being true) wins.
    pub win_prob: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub h: usize,
    pub games: usize,
    pub length: Summary,
    pub i_win_rate: f64,
    pub mean_length_i_wins: Option<f64>,
    pub mean_length_ii_wins: Option<f64>,
    /// φ^h for AND-OR at even depth.
    pub reference: Option<f64>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeReport {
    pub kind: String,
    pub p: f64,
    pub series: Vec<SeriesRow>,
    pub fixed_points: Vec<f64>,
    pub simulated: Vec<SimRow>,
    /// Slope of log mean length against log h over the simulated depths.
    pub length_fit: Option<LinearFit>,
}

pub struct TreeRun {
    pub kind: TreeKind,
    pub h: usize,
    pub b: usize,
    pub p: Option<f64>,
    pub simulate: Vec<usize>,
    pub games: usize,
    pub tie_rule: TieRule,
    pub seed: u64,
}

fn kind_name(kind: TreeKind) -> &'static str {
    match kind {
        TreeKind::Andor => "and-or",
        TreeKind::Switching => "switching",
        TreeKind::Enhanced => "enhanced",
    }
}

impl TreeRun {
    fn tree_at(&self, h: usize) -> Result<TreeSpec> {
        match self.kind {
            TreeKind::Andor => Ok(TreeSpec::and_or(h)),
            TreeKind::Switching => Ok(TreeSpec::switching(self.b, h)),
            TreeKind::Enhanced => tree::enhanced_binary_tree(h),
        }
    }

    pub fn run(&self) -> Result<TreeReport> {
        let p = match self.kind {
            TreeKind::Andor => self.p.unwrap_or_else(tree::andor_critical_p),
            _ => self.p.unwrap_or(0.5),
        };
        let (series, fixed_points) = match self.kind {
            TreeKind::Andor => {
                let rows = (0..=self.h)
                    .map(|h| {
                        let q = tree::andor_true_probability(h, p);
                        SeriesRow { h, q, mu: None, nu: None, win_prob: q, root_degree: None }
                    })
                    .collect::<Vec<_>>();
                (rows, tree::andor_fixed_points().to_vec())
            }
            TreeKind::Switching if self.b == 3 && p == 0.5 => {
                let s = tree::switching_series(self.h);
                let (mu, nu) = (s.mu.unwrap_or_default(), s.nu.unwrap_or_default());
                let rows = (0..=self.h)
                    .map(|h| SeriesRow {
                        h,
                        q: s.q[h],
                        mu: mu.get(h).copied(),
                        nu: nu.get(h).copied(),
                        win_prob: 1.0 - s.q[h],
                        root_degree: None,
                    })
                    .collect();
                (rows, vec![tree::switching_q_limit(), 1.0 - tree::switching_q_limit()])
            }
            TreeKind::Switching => {
                let rows = (0..=self.h)
                    .map(|h| {
                        let w = tree::switching_win_probability(&vec![self.b; h], p);
                        SeriesRow { h, q: 1.0 - w, mu: None, nu: None, win_prob: w, root_degree: None }
                    })
                    .collect();
                (rows, Vec::new())
            }
            TreeKind::Enhanced => {
                let rows = (2..=self.h)
                    .filter_map(|h| tree::enhanced_binary_tree(h).ok().map(|t| (h, t)))
                    .map(|(h, t)| {
                        let w = tree::switching_win_probability(&t.profile, p);
                        SeriesRow { h, q: 1.0 - w, mu: None, nu: None, win_prob: w, root_degree: Some(t.profile[0]) }
                    })
                    .collect();
                (rows, Vec::new())
            }
        };
        let simulated = self.simulate.iter().map(|&h| self.simulate_depth(h, p)).collect::<Result<Vec<_>>>()?;
        let length_fit = (simulated.len() >= 2)
            .then(|| {
                let xs: Vec<f64> = simulated.iter().map(|s| s.h as f64).collect();
                let ys: Vec<f64> = simulated.iter().map(|s| s.length.mean).collect();
                log_log_fit(&xs, &ys).ok()
            })
            .flatten();
        Ok(TreeReport { kind: kind_name(self.kind).into(), p, series, fixed_points, simulated, length_fit })
    }

    fn simulate_depth(&self, h: usize, p: f64) -> Result<SimRow> {
        let spec = self.tree_at(h)?;
        let records =
            tree::simulate_batch(&spec, p, derive_seed(self.seed, SIM_DOMAIN, h as u64), self.games, self.tie_rule)?;
        let violations: usize = match self.kind {
            TreeKind::Andor => records.iter().map(|r| tree::andor_locality_violations(h, r)).sum(),
            _ => records
                .iter()
                .map(|r| tree::switching_structure_violations(&spec.profile, r))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum(),
        };
        let mean_where = |w: Player| {
            let v: Vec<f64> = records.iter().filter(|r| r.winner == Some(w)).map(|r| r.length as f64).collect();
            (!v.is_empty()).then(|| summarize(&v).mean)
        };
        let lengths: Vec<f64> = records.iter().map(|r: &GameRecord| r.length as f64).collect();
        let wins = records.iter().filter(|r| r.winner == Some(Player::I)).count();
        Ok(SimRow {
            h,
            games: records.len(),
            length: summarize(&lengths),
            i_win_rate: wins as f64 / records.len().max(1) as f64,
            mean_length_i_wins: mean_where(Player::I),
            mean_length_ii_wins: mean_where(Player::II),
            reference: match self.kind {
                TreeKind::Andor => tree::andor_expected_length(h).ok(),
                _ => None,
            },
            violations,
        })
    }
}

pub fn series_csv(r: &TreeReport) -> String {
    let enhanced = r.series.iter().any(|s| s.root_degree.is_some());
    let mut s = String::from(if enhanced { "h,root_degree,q,win_prob\n" } else { "h,q,mu,nu,win_prob\n" });
    for row in &r.series {
        if enhanced {
            s += &format!("{},{},{},{}\n", row.h, row.root_degree.unwrap_or(0), fmt6(row.q), fmt6(row.win_prob));
        } else {
            s += &format!("{},{},{},{},{}\n", row.h, fmt6(row.q), fmt_opt(row.mu), fmt_opt(row.nu), fmt6(row.win_prob));
        }
    }
    s
}

pub fn fixed_points_csv(r: &TreeReport) -> String {
    let mut s = String::from("fixed_point\n");
    for f in &r.fixed_points {
        s += &format!("{}\n", fmt6(*f));
    }
    s
}

pub fn sim_csv(r: &TreeReport) -> String {
    let mut s = String::from(
        "h,games,mean_length,stderr,i_win_rate,mean_length_i_wins,mean_length_ii_wins,reference,violations\n",
    );
    for row in &r.simulated {
        s += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.h,
            row.games,
            fmt6(row.length.mean),
            fmt6(row.length.stderr),
            fmt6(row.i_win_rate),
            fmt_opt(row.mean_length_i_wins),
            fmt_opt(row.mean_length_ii_wins),
            fmt_opt(row.reference),
            row.violations
        );
    }
    s
}

pub fn text(r: &TreeReport) -> String {
    let mut s = format!("{} tree, p = {}\n", r.kind, fmt6(r.p));
    s += &series_csv(r);
    if !r.fixed_points.is_empty() {
        s += &format!("fixed points {}\n", r.fixed_points.iter().map(|f| fmt6(*f)).collect::<Vec<_>>().join(" "));
    }
    if !r.simulated.is_empty() {
        s += &sim_csv(r);
    }
    if let Some(f) = &r.length_fit {
        s += &format!("length exponent {:.4}\n", f.slope);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(kind: TreeKind, h: usize, simulate: Vec<usize>) -> TreeRun {
        TreeRun { kind, h, b: 3, p: None, simulate, games: 2000, tie_rule: TieRule::LowestId, seed: 0 }
    }

    #[test]
    fn ternary_series_converges() {
        let r = plan(TreeKind::Switching, 20, vec![]).run().unwrap();
        assert_eq!(r.series.len(), 21);
        assert!((r.series[20].q - tree::switching_q_limit()).abs() < 1e-5);
        assert_eq!(r.series[1].q, 0.125);
        assert!(series_csv(&r).starts_with("h,q,mu,nu,win_prob\n0,0.000000,0.000000,0.000000,1.000000\n"));
    }

    #[test]
    fn andor_fixed_point_row() {
        let r = plan(TreeKind::Andor, 4, vec![2]).run().unwrap();
        assert!(fixed_points_csv(&r).contains("\n0.381966\n"));
        let sim = &r.simulated[0];
        assert_eq!(sim.violations, 0);
        let phi2 = tree::golden_ratio().powi(2);
        assert!((sim.length.mean - phi2).abs() < 4.0 * sim.length.stderr);
    }

    #[test]
    fn enhanced_rows() {
        let r = plan(TreeKind::Enhanced, 10, vec![]).run().unwrap();
        assert_eq!(r.series.first().unwrap().h, 3);
        assert_eq!(r.series.last().unwrap().root_degree, Some(3));
        assert!(series_csv(&r).starts_with("h,root_degree,q,win_prob\n"));
    }
}
