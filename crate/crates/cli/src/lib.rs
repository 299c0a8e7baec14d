//! The `randturn` command line: solver reports, self-play batches, scaling
//! fits, heatmaps, tree series, influence bounds and the game server.

pub mod args;
pub mod commands;
pub mod output;

use std::io::Write;
use std::sync::atomic::AtomicBool;

use randturn::mc::GameRecord;
use serde::Serialize;

use args::{Cli, Command};
use commands::selfplay::{Selfplay, TruncationMarker};
use commands::{heatmap, influence, scaling, selfplay, solve, tree};
use output::{io_error, Envelope, LineWriter, Output};
pub use output::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

struct Ctx<'a> {
    command: &'static str,
    invocation: &'a [String],
    seed: u64,
    json: bool,
    out: Output,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn envelope<T: Serialize>(&self, body: T) -> Envelope<T> {
        Envelope {
            command: self.command.to_string(),
            version: VERSION.to_string(),
            invocation: self.invocation.to_vec(),
            seed: self.seed,
            body,
        }
    }

    /// Writes `name` under `--out` and prints the text or JSON form.
    fn report<T: Serialize>(&mut self, name: &str, body: T, text: String) -> CliResult<()> {
        let env = self.envelope(body);
        self.out.write_json(name, &env)?;
        let shown =
            if self.json { serde_json::to_string_pretty(&env).expect("report serializes") + "\n" } else { text };
        self.stdout.write_all(shown.as_bytes()).map_err(io_error("<stdout>".as_ref()))?;
        Ok(())
    }
}

/// Runs one parsed command. `invocation` is echoed into every report;
/// raising `stop` ends long batches early with their partial results.
pub fn run(cli: Cli, invocation: &[String], stop: &AtomicBool, stdout: &mut dyn Write) -> CliResult<()> {
    if let Some(n) = cli.threads {
        randturn::par::set_threads(n).map_err(CliError::Args)?;
    }
    let seed = cli.seed;
    let mut ctx = Ctx {
        command: cli.command.name(),
        invocation,
        seed,
        json: cli.json,
        out: Output::new(cli.out.clone())?,
        stdout,
    };
    match cli.command {
        Command::Solve(a) => {
            let spec = a.game.spec(seed)?;
            let r = solve::run(&spec, &a.p, a.float, a.balanced, a.tie_rule)?;
            let text = solve::text(&r, &spec);
            ctx.report("solve.json", r, text)
        }
        Command::Selfplay(a) => {
            let spec = a.game.spec(seed)?;
            let plan = Selfplay {
                spec: &spec,
                p: a.p.float,
                games: a.games,
                strategy_i: a.strategy_i,
                strategy_ii: a.strategy_ii,
                stop_early: !a.no_stop_early,
                seed,
            };
            let mut lines = LineWriter::create(ctx.out.path("records.jsonl"))?;
            let (records, truncated) = plan.run::<CliError>(stop, |chunk: &[GameRecord]| {
                for r in chunk {
                    lines.line(&r.to_json_line())?;
                }
                lines.flush()
            })?;
            if truncated {
                let marker = TruncationMarker { truncated: true, completed: records.len(), requested: a.games };
                lines.line(&serde_json::to_string(&marker).expect("marker serializes"))?;
                lines.flush()?;
                eprintln!("interrupted after {} of {} games", records.len(), a.games);
            }
            let r = plan.report(&records, truncated);
            let text = selfplay::text(&r);
            ctx.report("report.json", r, text)
        }
        Command::Scaling(a) => {
            let r = match &a.input {
                Some(path) => scaling::from_csv(&std::fs::read_to_string(path).map_err(io_error(path))?)?,
                None => scaling::Scaling {
                    sizes: a.sizes.clone(),
                    games: a.games,
                    epsilon: a.epsilon,
                    samples_cap: a.samples_cap,
                    crossing_samples: a.crossing_samples,
                    seed,
                }
                .run(stop, |row| eprintln!("L={} mean length {:.3}", row.size, row.mean_length))?,
            };
            ctx.out.write("scaling.csv", &scaling::csv(&r))?;
            let text = scaling::text(&r);
            ctx.report("report.json", r, text)
        }
        Command::Heatmap(a) => {
            let spec = a.game.spec(seed)?;
            let h = heatmap::run(&spec, a.p.float, a.samples, seed)?;
            ctx.out.write("heatmap.csv", &heatmap::csv(&h))?;
            ctx.out.write("heatmap.svg", &heatmap::svg(&h, spec.board()))?;
            let text = heatmap::text(&h);
            ctx.report("heatmap.json", h, text)
        }
        Command::Tree(a) => {
            let r = tree::TreeRun {
                kind: a.kind,
                h: a.h,
                b: a.b,
                p: a.p,
                simulate: a.simulate.clone(),
                games: a.games,
                tie_rule: a.tie_rule,
                seed,
            }
            .run()?;
            ctx.out.write("series.csv", &tree::series_csv(&r))?;
            if !r.fixed_points.is_empty() {
                ctx.out.write("fixed_points.csv", &tree::fixed_points_csv(&r))?;
            }
            if !r.simulated.is_empty() {
                ctx.out.write("simulated.csv", &tree::sim_csv(&r))?;
            }
            let text = tree::text(&r);
            ctx.report("report.json", r, text)
        }
        Command::Influence(a) => {
            let spec = a.game.spec(seed)?;
            let p = a.p.unwrap_or_else(|| influence::default_p(spec.kind()));
            let r = influence::run(&spec, p, a.method, a.samples, seed)?;
            ctx.out.write("influence.csv", &influence::csv(&r))?;
            let text = influence::text(&r);
            ctx.report("report.json", r, text)
        }
        Command::Serve(a) => {
            let config = randturn_service::ServiceConfig {
                limits: randturn_service::session::Limits {
                    default_samples: a.default_samples,
                    max_samples: a.max_samples,
                },
                static_dir: a.static_dir,
                record_log: a.record_log,
                seed,
            };
            let rt = tokio::runtime::Runtime::new().map_err(io_error("<runtime>".as_ref()))?;
            rt.block_on(randturn_service::serve(a.addr, config)).map_err(io_error("<server>".as_ref()))
        }
    }
}
