use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use randturn::exact::TieRule;
use randturn::mc::{sample_size_for, StrategyKind};
use randturn::percolation::shortest_crossing_mc;
use randturn::rng::derive_seed;
use randturn::stats::{log_log_fit, LinearFit};
use randturn::{GameError, GameKind, GameSpec, Result};
use serde::Serialize;

use super::selfplay::{Aggregates, Selfplay};
use crate::output::{fmt6, fmt_opt};

const SIZE_DOMAIN: u64 = 0x7369_7a65;
const CROSSING_DOMAIN: u64 = 0x6372_6f73;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    #[serde(rename = "L")]
    pub size: usize,
    pub samples: Option<u64>,
    pub games: usize,
    pub mean_length: f64,
    pub stderr: Option<f64>,
    pub i_win_rate: Option<f64>,
    pub disconnected_fraction: Option<f64>,
    pub shortest_crossing_mean: Option<f64>,
    pub shortest_crossing_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub source: &'static str,
    pub rows: Vec<ScalingRow>,
    /// Slope of log mean length against log L.
    pub fit: Option<LinearFit>,
    /// Set when the fit could not be made.
    pub degenerate: Option<String>,
    /// Mean length at the largest L exceeds its shortest-crossing mean.
    pub exceeds_shortest_crossing: Option<bool>,
    pub truncated: bool,
}

pub struct Scaling {
    pub sizes: Vec<usize>,
    pub games: usize,
    pub epsilon: f64,
    pub samples_cap: u64,
    pub crossing_samples: u64,
    pub seed: u64,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(GameError::Domain(format!("need at least three distinct board sizes, got {sizes:?}")));
    }
    Ok(())
}

impl Scaling {
    pub fn run(&self, stop: &AtomicBool, mut progress: impl FnMut(&ScalingRow)) -> Result<ScalingReport> {
        check_sizes(&self.sizes)?;
        let mut rows = Vec::new();
        let mut truncated = false;
        for &l in &self.sizes {
            let spec = Arc::new(GameSpec::without_precoloring(GameKind::Hex { rows: l, cols: l })?);
            let samples = sample_size_for(l, self.epsilon)?.min(self.samples_cap.max(1));
            let strategy = StrategyKind::MonteCarlo { samples, tie_rule: TieRule::LowestId };
            let plan = Selfplay {
                spec: &spec,
                p: 0.5,
                games: self.games,
                strategy_i: strategy,
                strategy_ii: strategy,
                stop_early: true,
                seed: derive_seed(self.seed, SIZE_DOMAIN, l as u64),
            };
            let (records, cut) = plan.run::<GameError>(stop, |_| Ok(()))?;
            truncated |= cut;
            if records.is_empty() {
                break;
            }
            let a = Aggregates::from_records(&records);
            let (sc, sc_se, _) = shortest_crossing_mc(
                spec.board(),
                0.5,
                self.crossing_samples,
                derive_seed(self.seed, CROSSING_DOMAIN, l as u64),
            )?;
            let row = ScalingRow {
                size: l,
                samples: Some(samples),
                games: records.len(),
                mean_length: a.length.mean,
                stderr: Some(a.length.stderr),
                i_win_rate: a.i_win_rate.map(|w| w.mean),
                disconnected_fraction: Some(a.disconnected_fraction),
                shortest_crossing_mean: Some(sc),
                shortest_crossing_stderr: Some(sc_se),
            };
            progress(&row);
            rows.push(row);
            if cut {
                break;
            }
        }
        Ok(finish("selfplay", rows, truncated))
    }
}

/// Fits lengths read from a CSV with columns `L` and `mean_length`.
pub fn from_csv(text: &str) -> Result<ScalingReport> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').map(str::trim).collect();
    let col = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| GameError::Domain(format!("input has no {name} column")))
    };
    let (li, mi) = (col("L")?, col("mean_length")?);
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |i: usize| fields.get(i).copied().unwrap_or_default();
        let size = get(li).parse().map_err(|_| GameError::Domain(format!("bad L in {line:?}")))?;
        let mean_length = get(mi).parse().map_err(|_| GameError::Domain(format!("bad mean_length in {line:?}")))?;
        rows.push(ScalingRow {
            size,
            samples: None,
            games: 0,
            mean_length,
            stderr: None,
            i_win_rate: None,
            disconnected_fraction: None,
            shortest_crossing_mean: None,
            shortest_crossing_stderr: None,
        });
    }
    check_sizes(&rows.iter().map(|r| r.size).collect::<Vec<_>>())?;
    Ok(finish("input", rows, false))
}

fn finish(source: &'static str, rows: Vec<ScalingRow>, truncated: bool) -> ScalingReport {
    let xs: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_length).collect();
    let (fit, degenerate) = match log_log_fit(&xs, &ys) {
        Ok(f) if rows.len() >= 3 => (Some(f), None),
        Ok(_) => (None, Some("fewer than three sizes completed".to_string())),
        Err(e) => (None, Some(e.to_string())),
    };
    let exceeds_shortest_crossing =
        rows.iter().max_by_key(|r| r.size).and_then(|r| r.shortest_crossing_mean.map(|s| r.mean_length > s));
    ScalingReport { source, rows, fit, degenerate, exceeds_shortest_crossing, truncated }
}

pub fn csv(r: &ScalingReport) -> String {
    let mut s = String::from(
        "L,samples,games,mean_length,stderr,i_win_rate,disconnected_fraction,shortest_crossing_mean,shortest_crossing_stderr\n",
    );
    for row in &r.rows {
        s += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.size,
            row.samples.map(|n| n.to_string()).unwrap_or_default(),
            row.games,
            fmt6(row.mean_length),
            fmt_opt(row.stderr),
            fmt_opt(row.i_win_rate),
            fmt_opt(row.disconnected_fraction),
            fmt_opt(row.shortest_crossing_mean),
            fmt_opt(row.shortest_crossing_stderr),
        );
    }
    s
}

pub fn text(r: &ScalingReport) -> String {
    let mut s = csv(r);
    match (&r.fit, &r.degenerate) {
        (Some(f), _) => {
            let se = f.slope_stderr.map(|e| format!(" ± {e:.6}")).unwrap_or_default();
            s += &format!("exponent {:.6}{se} (r² {:.4})\n", f.slope, f.r_squared);
        }
        (None, Some(why)) => s += &format!("degenerate fit: {why}\n"),
        (None, None) => {}
    }
    if let Some(b) = r.exceeds_shortest_crossing {
        s += &format!("mean length above shortest crossing at largest L: {b}\n");
    }
    if r.truncated {
        s += "truncated\n";
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(power: f64) -> String {
        let mut s = String::from("L,mean_length\n");
        for l in [5, 7, 9, 11, 13] {
            s += &format!("{l},{}\n", (l as f64).powf(power));
        }
        s
    }

    #[test]
    fn fit_identity() {
        let r = from_csv(&synthetic(1.5)).unwrap();
        assert!((r.fit.unwrap().slope - 1.5).abs() < 1e-6);
        let r = from_csv(&synthetic(2.0)).unwrap();
        assert!((r.fit.unwrap().slope - 2.0).abs() < 1e-6);
    }

    proptest::proptest! {
        #[test]
        fn fit_recovers_any_power(power in 0.3f64..3.0, scale in 0.1f64..20.0) {
            let mut s = String::from("L,mean_length\n");
            for l in [3, 6, 10, 15] {
                s += &format!("{l},{}\n", scale * (l as f64).powf(power));
            }
            let fit = from_csv(&s).unwrap().fit.unwrap();
            proptest::prop_assert!((fit.slope - power).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_sizes() {
        assert!(from_csv("L,mean_length\n5,10\n7,20\n").is_err());
        assert!(from_csv("L,mean_length\n5,10\n5,11\n7,20\n").is_err());
        assert!(from_csv("L,len\n5,10\n").is_err());
    }

    #[test]
    fn degenerate_lengths_are_flagged() {
        let r = from_csv("L,mean_length\n5,0\n7,1\n9,2\n").unwrap();
        assert!(r.fit.is_none());
        assert!(r.degenerate.is_some());
    }

    #[test]
    fn small_boards() {
        let plan =
            Scaling { sizes: vec![2, 3, 4], games: 8, epsilon: 0.1, samples_cap: 50, crossing_samples: 200, seed: 1 };
        let r = plan.run(&AtomicBool::new(false), |_| {}).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.fit.is_some());
        assert!(r.rows.iter().all(|row| row.mean_length >= row.size as f64));
    }
}
