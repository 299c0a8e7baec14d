use std::sync::Arc;

use randturn::exact::{expected_game_length_exact, TieRule};
use randturn::influence::{self, InfluenceVector};
use randturn::{GameError, GameKind, GameSpec, Result};
use serde::Serialize;

use crate::args::InfluenceMethodArg;
use crate::output::fmt6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport {
    pub game: String,
    pub influences: InfluenceVector,
    pub total: f64,
    pub max: f64,
    pub variance: f64,
    pub normalized_variance: f64,
    /// `(Σ I)²`.
    pub os_bound: f64,
    /// Normalized variance over the largest influence.
    pub osss_bound: Option<f64>,
    /// Expected optimal game length, when the solver can reach it.
    pub exact_length: Option<f64>,
    pub bounds_hold: Option<bool>,
}

/// Default bias: the critical one for AND-OR, 1/2 otherwise.
pub fn default_p(kind: &GameKind) -> f64 {
    match kind {
        GameKind::AndOr { .. } => randturn::tree::andor_critical_p(),
        _ => 0.5,
    }
}

pub fn run(
    spec: &Arc<GameSpec>,
    p: f64,
    method: InfluenceMethodArg,
    samples: u64,
    seed: u64,
) -> Result<InfluenceReport> {
    let influences = match method {
        InfluenceMethodArg::Exact => influence::influence_exact(spec, p)?,
        InfluenceMethodArg::Mc => influence::influence_mc(spec, p, samples, seed)?,
    };
    let variance = influence::variance(spec, p)?;
    let normalized_variance = influence::normalized_variance(spec, p)?;
    let os_bound = influence::os_lower_bound(&influences);
    let osss_bound = match influence::osss_lower_bound(&influences, normalized_variance) {
        Ok(b) => Some(b),
        Err(GameError::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let exact_length = if spec.is_monotone() && spec.is_win_or_lose() {
        match expected_game_length_exact::<f64>(spec, p, TieRule::LowestId) {
            Ok(l) => Some(l),
            Err(GameError::Capacity { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let slack = 1e-9;
    let bounds_hold = exact_length.map(|l| os_bound <= l + slack && osss_bound.is_none_or(|b| b <= l + slack));
    Ok(InfluenceReport {
        game: spec.kind().name().to_string(),
        total: influences.total(),
        max: influences.max(),
        influences,
        variance,
        normalized_variance,
        os_bound,
        osss_bound,
        exact_length,
        bounds_hold,
    })
}

pub fn csv(r: &InfluenceReport) -> String {
    let mut s = String::from("item,influence,stderr\n");
    for (i, (v, e)) in r.influences.values.iter().zip(&r.influences.stderr).enumerate() {
        s += &format!("{i},{},{}\n", fmt6(*v), fmt6(*e));
    }
    s
}

pub fn text(r: &InfluenceReport) -> String {
    let mut s = format!("{} at p = {}\n", r.game, fmt6(r.influences.p));
    s += &format!("sum of influences  {:.9}\n", r.total);
    s += &format!("max influence      {:.9}\n", r.max);
    s += &format!("variance           {:.9} (normalized {:.9})\n", r.variance, r.normalized_variance);
    s += &format!("O-S bound          {:.9}\n", r.os_bound);
    match r.osss_bound {
        Some(b) => s += &format!("OSSS bound         {b:.9}\n"),
        None => s += "OSSS bound         - (no influential item)\n",
    }
    if let Some(l) = r.exact_length {
        s += &format!("exact length       {l:.9}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use randturn::tree::golden_ratio;

    #[test]
    fn andor_tight() {
        let spec = Arc::new(GameSpec::without_precoloring(GameKind::AndOr { h: 2 }).unwrap());
        let r = run(&spec, default_p(spec.kind()), InfluenceMethodArg::Exact, 0, 0).unwrap();
        let phi2 = golden_ratio().powi(2);
        assert!((r.osss_bound.unwrap() - phi2).abs() < 1e-9);
        assert!((r.exact_length.unwrap() - phi2).abs() < 1e-9);
        assert_eq!(r.bounds_hold, Some(true));
    }

    #[test]
    fn majority_bounds() {
        let spec = Arc::new(GameSpec::without_precoloring(GameKind::RecursiveMajority { h: 1 }).unwrap());
        let r = run(&spec, 0.5, InfluenceMethodArg::Exact, 0, 0).unwrap();
        assert!((r.osss_bound.unwrap() - 2.0).abs() < 1e-12);
        assert!((r.exact_length.unwrap() - 2.5).abs() < 1e-12);
        assert!(csv(&r).starts_with("item,influence,stderr\n0,0.500000,0.000000\n"));
    }
}
