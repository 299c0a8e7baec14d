use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randturn::exact::TieRule;
use randturn::mc::StrategyKind;
use randturn::scalar::parse_exact;
use randturn::tree;
use randturn::{Exact, GameError, GameKind, GameSpec, Player, Result};

#[derive(Debug, Parser)]
#[command(name = "randturn", version, about = "Random-turn selection games: solver, self-play and experiments")]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact value, optimal first moves and expected length.
    Solve(SolveArgs),
    /// Seeded self-play games with a records file.
    Selfplay(SelfplayArgs),
    /// Growth exponent of the mean game length over board sizes.
    Scaling(ScalingArgs),
    /// First-move pivotality estimates as CSV and SVG.
    Heatmap(HeatmapArgs),
    /// Tree-game recursions, fixed points and simulated lengths.
    Tree(TreeArgs),
    /// Influences and the query-complexity lower bounds.
    Influence(InfluenceArgs),
    /// HTTP service for human-vs-engine games.
    Serve(ServeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Selfplay(_) => "selfplay",
            Command::Scaling(_) => "scaling",
            Command::Heatmap(_) => "heatmap",
            Command::Tree(_) => "tree",
            Command::Influence(_) => "influence",
            Command::Serve(_) => "serve",
        }
    }
}

/// A coin bias kept both as an exact rational and as a float.
#[derive(Debug, Clone, PartialEq)]
pub struct Bias {
    pub text: String,
    pub exact: Exact,
    pub float: f64,
}

impl std::str::FromStr for Bias {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let exact = parse_exact(s).ok_or_else(|| format!("{s:?} is not a number or a fraction a/b"))?;
        let float = randturn::Scalar::to_f64(&exact);
        if !(0.0..=1.0).contains(&float) {
            return Err(format!("bias {s} is outside [0, 1]"));
        }
        Ok(Bias { text: s.to_string(), exact, float })
    }
}

impl Default for Bias {
    fn default() -> Self {
        "1/2".parse().unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameName {
    Hex,
    Bridgit,
    Surround,
    #[value(alias = "tictactoe")]
    TicTacToe,
    #[value(alias = "captains")]
    TeamCaptains,
    #[value(alias = "majority")]
    RecursiveMajority,
    #[value(alias = "and-or")]
    Andor,
    Switching,
}

/// Which game to play; `--L` for lattices, `--h` for trees.
#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    #[arg(long, value_enum, default_value = "hex")]
    pub game: GameName,
    /// Side length (hex, surround, bridgit).
    #[arg(long = "L", visible_alias = "size")]
    pub size: Option<usize>,
    /// Rows and columns for non-square hex or surround boards.
    #[arg(long, requires = "cols")]
    pub rows: Option<usize>,
    #[arg(long, requires = "rows")]
    pub cols: Option<usize>,
    /// Tree depth.
    #[arg(long)]
    pub h: Option<usize>,
    /// Branching factor of a switching tree.
    #[arg(long, default_value_t = 3)]
    pub b: usize,
    /// Switching tree with explicit child counts per level, e.g. 3,2.
    #[arg(long, value_delimiter = ',')]
    pub profile: Option<Vec<usize>>,
    /// Switching on the enhanced binary tree of depth h.
    #[arg(long)]
    pub enhanced: bool,
    /// Team-captains player count (random table).
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed of the random team-captains table (default: --seed).
    #[arg(long)]
    pub table_seed: Option<u64>,
    /// Surround: also score cells that already had the surrounding color.
    #[arg(long)]
    pub count_unchanged: bool,
    /// Precolored cells as id:I or id:II, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub precolor: Vec<String>,
    /// Full game description as JSON (overrides the other game flags).
    #[arg(long)]
    pub spec_json: Option<String>,
}

impl GameArgs {
    pub fn hex(l: usize) -> Self {
        GameArgs {
            game: GameName::Hex,
            size: Some(l),
            rows: None,
            cols: None,
            h: None,
            b: 3,
            profile: None,
            enhanced: false,
            n: None,
            table_seed: None,
            count_unchanged: false,
            precolor: Vec::new(),
            spec_json: None,
        }
    }

    fn dims(&self) -> Result<(usize, usize)> {
        match (self.rows, self.cols, self.size) {
            (Some(r), Some(c), _) => Ok((r, c)),
            (_, _, Some(l)) => Ok((l, l)),
            _ => Err(GameError::Domain("this game needs --L or --rows/--cols".into())),
        }
    }

    fn depth(&self) -> Result<usize> {
        self.h.ok_or_else(|| GameError::Domain("this game needs --h".into()))
    }

    pub fn kind(&self, seed: u64) -> Result<GameKind> {
        Ok(match self.game {
            GameName::Hex => {
                let (rows, cols) = self.dims()?;
                GameKind::Hex { rows, cols }
            }
            GameName::Surround => {
                let (rows, cols) = self.dims()?;
                GameKind::Surround { rows, cols, count_unchanged: self.count_unchanged }
            }
            GameName::Bridgit => {
                GameKind::Bridgit { size: self.size.ok_or_else(|| GameError::Domain("bridgit needs --L".into()))? }
            }
            GameName::TicTacToe => GameKind::TicTacToe,
            GameName::TeamCaptains => {
                let n = self.n.ok_or_else(|| GameError::Domain("team-captains needs --n".into()))?;
                return Ok(GameSpec::team_captains_random(n, self.table_seed.unwrap_or(seed))?.kind().clone());
            }
            GameName::RecursiveMajority => GameKind::RecursiveMajority { h: self.depth()? },
            GameName::Andor => GameKind::AndOr { h: self.depth()? },
            GameName::Switching => {
                if let Some(profile) = &self.profile {
                    GameKind::Switching { profile: profile.clone() }
                } else if self.enhanced {
                    tree::enhanced_binary_tree(self.depth()?)?.game_kind()
                } else {
                    GameKind::Switching { profile: vec![self.b; self.depth()?] }
                }
            }
        })
    }

    pub fn spec(&self, seed: u64) -> Result<Arc<GameSpec>> {
        if let Some(json) = &self.spec_json {
            return Ok(Arc::new(GameSpec::from_json(json)?));
        }
        let precolored = self.precolor.iter().map(|s| parse_precolor(s)).collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(GameSpec::new(self.kind(seed)?, precolored)?))
    }
}

fn parse_precolor(s: &str) -> Result<(usize, Player)> {
    let bad = || GameError::Domain(format!("precolored cell {s:?} must look like 4:I or 7:II"));
    let (id, owner) = s.split_once(':').ok_or_else(bad)?;
    let owner = match owner.trim() {
        "I" | "1" => Player::I,
        "II" | "2" => Player::II,
        _ => return Err(bad()),
    };
    Ok((id.trim().parse().map_err(|_| bad())?, owner))
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Coin bias: a fraction such as 1/3 or a decimal.
    #[arg(long, default_value = "1/2")]
    pub p: Bias,
    /// Solve in floating point instead of exact rationals.
    #[arg(long)]
    pub float: bool,
    /// Card-deck turn order (equal numbers of turns) instead of coins.
    #[arg(long)]
    pub balanced: bool,
    #[arg(long, default_value = "lowest-id")]
    pub tie_rule: TieRule,
}

#[derive(Debug, Clone, Args)]
pub struct SelfplayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "1/2")]
    pub p: Bias,
    #[arg(long, default_value_t = 100)]
    pub games: usize,
    /// exact, random, mc or mc:N.
    #[arg(long, default_value = "mc")]
    pub strategy_i: StrategyKind,
    #[arg(long, default_value = "mc")]
    pub strategy_ii: StrategyKind,
    /// Keep playing after the winner is known.
    #[arg(long)]
    pub no_stop_early: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Board sizes, at least three.
    #[arg(long, value_delimiter = ',', default_value = "5,7,9,11,13")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub games: usize,
    /// Accuracy target that sets the sample count per move.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Cap on samples per move.
    #[arg(long, default_value_t = 1000)]
    pub samples_cap: u64,
    /// Samples for the shortest-crossing comparison.
    #[arg(long, default_value_t = 2000)]
    pub crossing_samples: u64,
    /// Fit a CSV with columns L,mean_length instead of playing games.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "1/2")]
    pub p: Bias,
    /// Number of random completions.
    #[arg(long = "samples", visible_alias = "N", default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeKind {
    #[value(alias = "and-or")]
    Andor,
    Switching,
    Enhanced,
}

#[derive(Debug, Clone, Args)]
pub struct TreeArgs {
    #[arg(value_enum)]
    pub kind: TreeKind,
    /// Series depth.
    #[arg(long, default_value_t = 20)]
    pub h: usize,
    /// Switching branching factor.
    #[arg(long, default_value_t = 3)]
    pub b: usize,
    /// Leaf bias for AND-OR (default: the fixed point).
    #[arg(long)]
    pub p: Option<f64>,
    /// Depths at which to simulate optimal play.
    #[arg(long, value_delimiter = ',')]
    pub simulate: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub games: usize,
    #[arg(long, default_value = "lowest-id")]
    pub tie_rule: TieRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfluenceMethodArg {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct InfluenceArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Item bias (default: 1/2, or the fixed point for AND-OR).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: InfluenceMethodArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Directory with the browser bundle.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// Append finished games to this JSON-lines file.
    #[arg(long)]
    pub record_log: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub default_samples: u64,
    #[arg(long, default_value_t = 200_000)]
    pub max_samples: u64,
}
