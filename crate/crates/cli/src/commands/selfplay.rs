use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use randturn::mc::{self, GameRecord, StrategyKind};
use randturn::rng::{self, domain};
use randturn::stats::{summarize, Summary};
use randturn::{par, GameError, GameSpec, Player, Result};
use serde::{Deserialize, Serialize};

/// Games per parallel chunk; interrupts are honoured between chunks.
const CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfplayConfig {
    pub game: serde_json::Value,
    pub p: f64,
    pub games: usize,
    pub strategy_i: StrategyKind,
    pub strategy_ii: StrategyKind,
    pub stop_early: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSummary {
    pub index: usize,
    pub seed: u64,
    pub length: usize,
    pub moves: usize,
    pub winner: Option<Player>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub disconnected_moves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub completed: usize,
    pub length: Summary,
    /// Fraction of games won by player I, over games with a winner.
    pub i_win_rate: Option<Summary>,
    pub value: Summary,
    /// Fraction of tosses won by player I.
    pub i_toss_rate: f64,
    pub tosses: usize,
    /// Fraction of games with at least one move not touching earlier moves.
    pub disconnected_fraction: f64,
}

impl Aggregates {
    pub fn from_records(records: &[GameRecord]) -> Self {
        let lengths: Vec<f64> = records.iter().map(|r| r.length as f64).collect();
        let wins: Vec<f64> =
            records.iter().filter_map(|r| r.winner).map(|w| if w == Player::I { 1.0 } else { 0.0 }).collect();
        let values: Vec<f64> = records.iter().filter_map(|r| r.value).collect();
        let tosses: usize = records.iter().map(|r| r.moves.len()).sum();
        let i_tosses = records.iter().flat_map(|r| &r.moves).filter(|m| m.coin == Player::I).count();
        let disconnected = records.iter().filter(|r| !r.connected_throughout).count();
        let n = records.len().max(1) as f64;
        Aggregates {
            completed: records.len(),
            length: summarize(&lengths),
            i_win_rate: (!wins.is_empty()).then(|| summarize(&wins)),
            value: summarize(&values),
            i_toss_rate: if tosses == 0 { f64::NAN } else { i_tosses as f64 / tosses as f64 },
            tosses,
            disconnected_fraction: disconnected as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfplayReport {
    pub config: SelfplayConfig,
    pub truncated: bool,
    pub aggregates: Aggregates,
    pub games: Vec<GameSummary>,
}

/// Last line of a records file cut short by an interrupt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationMarker {
    pub truncated: bool,
    pub completed: usize,
    pub requested: usize,
}

pub struct Selfplay<'a> {
    pub spec: &'a Arc<GameSpec>,
    pub p: f64,
    pub games: usize,
    pub strategy_i: StrategyKind,
    pub strategy_ii: StrategyKind,
    pub stop_early: bool,
    pub seed: u64,
}

impl Selfplay<'_> {
    pub fn config(&self) -> SelfplayConfig {
        SelfplayConfig {
            game: serde_json::from_str(&self.spec.to_json()).expect("spec json"),
            p: self.p,
            games: self.games,
            strategy_i: self.strategy_i,
            strategy_ii: self.strategy_ii,
            stop_early: self.stop_early,
        }
    }

    /// Plays the games in index order, handing each finished chunk to
    /// `sink`. Returns early, with `truncated` set, once `stop` is raised.
    pub fn run<E: From<GameError>>(
        &self,
        stop: &AtomicBool,
        mut sink: impl FnMut(&[GameRecord]) -> std::result::Result<(), E>,
    ) -> std::result::Result<(Vec<GameRecord>, bool), E> {
        let s1 = self.strategy_i.build(self.spec, self.p)?;
        let s2 = self.strategy_ii.build(self.spec, self.p)?;
        let mut records = Vec::with_capacity(self.games);
        let mut start = 0;
        while start < self.games {
            if stop.load(Ordering::SeqCst) {
                return Ok((records, true));
            }
            let len = CHUNK.min(self.games - start);
            let chunk: Vec<GameRecord> = par::map_indices(len, |i| {
                let seed = rng::derive_seed(self.seed, domain::GAME, (start + i) as u64);
                mc::selfplay(self.spec, s1.as_ref(), s2.as_ref(), self.p, seed, self.stop_early)
            })
            .into_iter()
            .collect::<Result<_>>()?;
            sink(&chunk)?;
            records.extend(chunk);
            start += len;
        }
        Ok((records, false))
    }

    pub fn report(&self, records: &[GameRecord], truncated: bool) -> SelfplayReport {
        SelfplayReport {
            config: self.config(),
            truncated,
            aggregates: Aggregates::from_records(records),
            games: records
                .iter()
                .enumerate()
                .map(|(index, r)| GameSummary {
                    index,
                    seed: r.seed,
                    length: r.length,
                    moves: r.moves.len(),
                    winner: r.winner,
                    value: r.value,
                    disconnected_moves: r.disconnected_move_count,
                })
                .collect(),
        }
    }
}

/// Parses a records file: one game per line, optionally ending with a
/// truncation marker.
pub fn read_records(text: &str) -> Result<(Vec<GameRecord>, Option<TruncationMarker>)> {
    let mut records = Vec::new();
    let mut marker = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        if marker.is_some() {
            return Err(GameError::Domain(format!("line {}: records after the truncation marker", i + 1)));
        }
        if let Ok(m) = serde_json::from_str::<TruncationMarker>(line) {
            marker = Some(m);
            continue;
        }
        records.push(
            serde_json::from_str(line).map_err(|e| GameError::Domain(format!("line {}: bad record: {e}", i + 1)))?,
        );
    }
    Ok((records, marker))
}

pub fn text(r: &SelfplayReport) -> String {
    let a = &r.aggregates;
    let mut s = format!("games        {}{}\n", a.completed, if r.truncated { " (truncated)" } else { "" });
    s += &format!("mean length  {:.4} ± {:.4}\n", a.length.mean, a.length.stderr);
    if let Some(w) = &a.i_win_rate {
        s += &format!("I win rate   {:.4} ± {:.4}\n", w.mean, w.stderr);
    }
    if a.value.count > 0 {
        s += &format!("mean value   {:.4} ± {:.4}\n", a.value.mean, a.value.stderr);
    }
    s += &format!("I toss rate  {:.4} over {} tosses\n", a.i_toss_rate, a.tosses);
    s += &format!("disconnected {:.4} of games\n", a.disconnected_fraction);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use randturn::GameKind;

    fn hex(l: usize) -> Arc<GameSpec> {
        Arc::new(GameSpec::without_precoloring(GameKind::Hex { rows: l, cols: l }).unwrap())
    }

    fn plan(spec: &Arc<GameSpec>, games: usize) -> Selfplay<'_> {
        Selfplay {
            spec,
            p: 0.5,
            games,
            strategy_i: StrategyKind::Random,
            strategy_ii: StrategyKind::Random,
            stop_early: true,
            seed: 3,
        }
    }

    #[test]
    fn single_cell_board() {
        let spec = hex(1);
        let (records, truncated) = plan(&spec, 100).run::<GameError>(&AtomicBool::new(false), |_| Ok(())).unwrap();
        assert!(!truncated);
        let a = Aggregates::from_records(&records);
        assert_eq!(a.length.mean, 1.0);
        assert_eq!(a.i_win_rate.unwrap().mean, a.i_toss_rate);
    }

    #[test]
    fn stop_flag_truncates_between_chunks() {
        let spec = hex(2);
        let stop = AtomicBool::new(false);
        let mut chunks = 0;
        let (records, truncated) = plan(&spec, 200)
            .run::<GameError>(&stop, |_| {
                chunks += 1;
                stop.store(true, Ordering::SeqCst);
                Ok(())
            })
            .unwrap();
        assert!(truncated);
        assert_eq!(chunks, 1);
        assert_eq!(records.len(), CHUNK);
    }

    #[test]
    fn records_file_round_trip() {
        let spec = hex(3);
        let (records, _) = plan(&spec, 5).run::<GameError>(&AtomicBool::new(false), |_| Ok(())).unwrap();
        let mut text: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
        let marker = TruncationMarker { truncated: true, completed: 5, requested: 9 };
        text += &serde_json::to_string(&marker).unwrap();
        let (back, m) = read_records(&text).unwrap();
        assert_eq!(back, records);
        assert_eq!(m, Some(marker));
        for r in &back {
            assert_eq!(mc::replay(&spec, r).unwrap().winner, r.winner);
        }
    }
}
