mod inputs;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rulerlab::closure::{
    closure_to_depth, density_probe, format_stats, Budget, Configuration, OpSet, ProbeOutcome,
};
use rulerlab::game::{play, Outcome, Rules, ScriptStrategy, DEFAULT_MAX_MOVES};
use rulerlab::geometry::HPoint;
use rulerlab::lab::{
    defeat_strategy_on, find_test_divergence, rational_plane_derivability, transform_trace,
    unit_circle_config, Derivability,
};
use rulerlab::lang::{check, Severity};
use rulerlab::numbers::{Rational, Tower};

use inputs::AdversaryChoice;

/// Exact straightedge and compass constructions, adversarial
/// construction games and their impossibility demonstrations.
#[derive(Parser, Debug)]
#[command(name = "rulerlab", version)]
struct Cli {
    /// Object budget for closures and searches.
    #[arg(long, global = true, env = "RULERLAB_MAX_OBJECTS", default_value_t = Budget::default().max_objects)]
    max_objects: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a script.
    Check {
        script: PathBuf,
        /// Configuration the givens bind to, for type checking.
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Play a script against an adversary.
    Play {
        script: PathBuf,
        /// `rational` or `pullback:u,t`.
        #[arg(long, default_value = "rational")]
        adversary: AdversaryChoice,
        /// Object whose construction wins the game, e.g. `0, 0`.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_MOVES)]
        max_moves: usize,
        /// Write the trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        compass: bool,
        /// Starting configuration (default: the unit circle).
        #[arg(long)]
        initial: Option<PathBuf>,
    },
    /// Closure of a configuration to a fixed depth.
    Closure {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Comma-separated: join, meet, line-conic, conic-conic, compass,
        /// straightedge, all, affine.
        #[arg(long, default_value = "all")]
        ops: String,
        /// Write per-depth object counts here instead of stdout.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Write the closed configuration here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the closure for a point near a target.
    Probe {
        config: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "1/1000")]
        eps: String,
        #[arg(long, default_value = "join,meet")]
        ops: String,
    },
    /// Re-execute a trace; succeeds iff the result is byte-identical.
    Replay { trace: PathBuf },
    /// Replay a straightedge trace under a circle-preserving map.
    Transform {
        trace: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        t: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the first test of a script whose value changes under a map.
    Diverge {
        script: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        t: String,
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_MOVES)]
        max_moves: usize,
    },
    /// Derive a rational point from four rational points by joins and meets.
    Derive {
        #[arg(num_args = 4, required = true)]
        points: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
    },
    /// Draw a configuration or the final configuration of a trace.
    Render {
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 53)]
        precision: u32,
    },
}

#[derive(Debug)]
pub enum Fail {
    Usage(String),
    Domain(String),
}

impl Fail {
    pub fn message(&self) -> &str {
        match self {
            Fail::Usage(m) | Fail::Domain(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> Fail {
    Fail::Domain(e.to_string())
}

fn ops(s: &str) -> Result<OpSet, Fail> {
    OpSet::parse(s).map_err(Fail::Usage)
}

fn initial_or_circle(path: &Option<PathBuf>) -> Result<Configuration, Fail> {
    match path {
        Some(p) => inputs::load_config(p),
        None => Ok(unit_circle_config()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Fail> {
    let budget = Budget {
        max_objects: cli.max_objects,
    };
    match cli.command {
        Command::Check { script, initial } => {
            let src = inputs::read(&script)?;
            let ast = match rulerlab::lang::parse(&src) {
                Ok(ast) => ast,
                Err(errs) => {
                    for e in errs {
                        println!("{}: {e}", script.display());
                    }
                    return Ok(ExitCode::FAILURE);
                }
            };
            let cfg = initial.as_deref().map(inputs::load_config).transpose()?;
            let diags = check(&ast, cfg.as_ref());
            for d in &diags {
                println!("{}: {d}", script.display());
            }
            let failed = diags.iter().any(|d| d.severity == Severity::Error);
            Ok(if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Play {
            script,
            adversary,
            target,
            max_moves,
            trace,
            compass,
            initial,
        } => {
            let ast = inputs::load_script(&script)?;
            let initial = initial_or_circle(&initial)?;
            let errors: Vec<String> = check(&ast, Some(&initial))
                .into_iter()
                .filter(|d| d.severity == Severity::Error)
                .map(|d| format!("{}: {d}", script.display()))
                .collect();
            if !errors.is_empty() {
                return Err(Fail::Domain(errors.join("\n")));
            }
            let tower = initial.tower().clone();
            let target = target.map(|t| inputs::object(&t, &tower)).transpose()?;
            let played = match (&adversary, &target) {
                (AdversaryChoice::Pullback { u, t }, Some(goal)) if !compass => {
                    let (u, t) = (inputs::number(u, &tower)?, inputs::number(t, &tower)?);
                    let report = defeat_strategy_on(&ast, &initial, goal, &u, &t, max_moves)
                        .map_err(domain)?;
                    print!("{report}");
                    report.trace
                }
                _ => {
                    let mut adv = adversary.build(&tower)?;
                    let rules = Rules { compass, max_moves };
                    let tr = play(
                        &mut ScriptStrategy::new(&ast),
                        adv.as_mut(),
                        &initial,
                        target.as_ref(),
                        rules,
                    );
                    println!("adversary: {}", tr.adversary);
                    println!("outcome: {}", tr.outcome);
                    println!(
                        "verdict: {}",
                        if tr.outcome.is_won() {
                            "won"
                        } else {
                            "not won"
                        }
                    );
                    println!("moves: {}", tr.moves().count());
                    tr
                }
            };
            if let Some(path) = trace {
                inputs::write(&path, &played.to_text())?;
            }
            Ok(match played.outcome {
                Outcome::Aborted(_) => ExitCode::FAILURE,
                _ => ExitCode::SUCCESS,
            })
        }

        Command::Closure {
            config,
            depth,
            ops: flags,
            stats,
            out,
        } => {
            let cfg = inputs::load_config(&config)?;
            let (closed, rows) =
                closure_to_depth(&cfg, depth, &ops(&flags)?, &budget).map_err(domain)?;
            let table = format_stats(&rows);
            match stats {
                Some(path) => inputs::write(&path, &table)?,
                None => print!("{table}"),
            }
            if let Some(path) = out {
                inputs::write(&path, &closed.to_text())?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Probe {
            config,
            target,
            eps,
            ops: flags,
        } => {
            let cfg = inputs::load_config(&config)?;
            let target = inputs::point(&target, cfg.tower())?;
            let eps: Rational = inputs::number(&eps, cfg.tower())?
                .as_rational()
                .cloned()
                .ok_or_else(|| Fail::Usage("eps must be rational".into()))?;
            match density_probe(&cfg, &target, &eps, &ops(&flags)?, &budget).map_err(domain)? {
                ProbeOutcome::Found(w) => {
                    let (x, y) = w.point.to_affine_f64().unwrap_or((f64::NAN, f64::NAN));
                    println!("found: {}  ~ ({x:.6}, {y:.6})", w.point);
                    println!("depth: {}", w.depth);
                    println!("objects: {}", w.config.len());
                }
                ProbeOutcome::NotFound {
                    fixed_point,
                    objects,
                } => {
                    let why = if fixed_point {
                        "closure is a fixed point"
                    } else {
                        "budget exhausted"
                    };
                    println!("not found: {why} ({objects} objects)");
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Replay { trace } => {
            let (text, tr) = inputs::load_trace(&trace)?;
            let again = tr.replay().to_text();
            match text.lines().zip(again.lines()).position(|(a, b)| a != b) {
                None if text == again => {
                    println!("replay: identical ({} events)", tr.events.len());
                    Ok(ExitCode::SUCCESS)
                }
                at => {
                    let line =
                        at.unwrap_or_else(|| text.lines().count().min(again.lines().count())) + 1;
                    println!("replay: differs at line {line}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }

        Command::Transform { trace, u, t, out } => {
            let (_, tr) = inputs::load_trace(&trace)?;
            let map = inputs::circle_map(tr.initial.tower(), &u, &t)?;
            let image = transform_trace(&tr, &map).map_err(domain)?;
            match out {
                Some(path) => {
                    inputs::write(&path, &image.to_text())?;
                    println!("map: {map}");
                    println!("events: {}", image.events.len());
                    println!("outcome: {}", image.outcome);
                }
                None => print!("{}", image.to_text()),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Diverge {
            script,
            u,
            t,
            initial,
            max_moves,
        } => {
            let ast = inputs::load_script(&script)?;
            if ast.tests().is_empty() {
                return Err(Fail::Domain(format!(
                    "{}: the script has no tests",
                    script.display()
                )));
            }
            let initial = initial_or_circle(&initial)?;
            let map = inputs::circle_map(initial.tower(), &u, &t)?;
            let mut adv = AdversaryChoice::Rational.build(initial.tower())?;
            match find_test_divergence(&ast, &initial, &map, adv.as_mut(), max_moves)
                .map_err(domain)?
            {
                Some(d) => print!("{d}"),
                None => println!("no divergence"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Derive {
            points,
            target,
            max_depth,
        } => {
            let tower = Tower::new();
            let seeds: Vec<HPoint> = points
                .iter()
                .map(|p| inputs::point(p, &tower))
                .collect::<Result<_, _>>()?;
            let seeds: [HPoint; 4] = seeds.try_into().expect("clap enforces four points");
            let target = inputs::point(&target, &tower)?;
            match rational_plane_derivability(&seeds, &target, max_depth, &budget)
                .map_err(domain)?
            {
                Derivability::Found(d) => {
                    println!("found at depth {}", d.depth);
                    print!("{}", d.chain_text());
                }
                Derivability::NotFound {
                    fixed_point,
                    depth,
                    objects,
                } => {
                    let why = if fixed_point {
                        "closure is a fixed point"
                    } else {
                        "search limit reached"
                    };
                    println!("not found: {why} at depth {depth} ({objects} objects)");
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Render {
            input,
            svg,
            precision,
        } => {
            if precision == 0 {
                return Err(Fail::Usage("precision must be positive".into()));
            }
            let text = inputs::read(&input)?;
            let (cfg, marked) = if text.trim_start().starts_with("rulerlab-trace") {
                let (_, tr) = inputs::load_trace(&input)?;
                let answers = tr.answers().into_iter().map(Into::into).collect();
                (tr.final_config, answers)
            } else {
                (inputs::load_config(&input)?, Vec::new())
            };
            inputs::write(&svg, &render::svg(&cfg, &marked, precision))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(fail) => {
            eprintln!("error: {}", fail.message());
            ExitCode::from(match fail {
                Fail::Usage(_) => 2,
                Fail::Domain(_) => 1,
            })
        }
    }
}
