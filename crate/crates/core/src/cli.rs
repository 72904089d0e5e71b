//! Batch entry point: `cayley <command> <subcommand> [flags]`.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 usage
//! error, 3 cap exceeded. Every failure prints one line starting `ERROR:`.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::automata::{classify_growth, count_by_length, Dfa};
use crate::foquery::{build_heisenberg_relations, decide_sentence, eval_formula, Formula};
use crate::measurement::{
    almost_all_stats, dehn_lower_bound, measure_h, measure_h_sampled, measure_s, superadditivity_check, FunctionClass,
    MeasureOptions, MeasurementSeries,
};
use crate::metrics::largest_ball;
use crate::par::Exec;
use crate::representations::{verify_rep, CayleyRep, RepSpec, VerifyOptions};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "cayley", version, about = "Cayley automatic representations: build, verify, measure")]
struct Cli {
    /// JSON file with default values for the flags below
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Common {
    /// representation: built-in name, JSON spec file, or bundle directory
    #[arg(long, global = true)]
    rep: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    #[serde(alias = "cap_words")]
    cap_words: Option<u128>,
    #[arg(long, global = true)]
    #[serde(alias = "cap_ball")]
    cap_ball: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads (1 = sequential); results do not depend on it
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    format: Option<Format>,
}

impl Common {
    /// Flags win over the config file.
    fn overlay(self, file: Common) -> Common {
        Common {
            rep: self.rep.or(file.rep),
            n: self.n.or(file.n),
            k: self.k.or(file.k),
            cap_words: self.cap_words.or(file.cap_words),
            cap_ball: self.cap_ball.or(file.cap_ball),
            out: self.out.or(file.out),
            seed: self.seed.or(file.seed),
            workers: self.workers.or(file.workers),
            format: self.format.or(file.format),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build or verify representations
    #[command(subcommand)]
    Rep(RepCmd),
    /// Deviation, fellow-traveler and almost-all measurements
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Regular-language statistics
    #[command(subcommand)]
    Lang(LangCmd),
    /// First-order queries over automatic relations
    #[command(subcommand)]
    Fo(FoCmd),
    /// Cayley-graph balls
    #[command(subcommand)]
    Ball(BallCmd),
    /// Symbolic growth-class rules
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

#[derive(Subcommand, Debug)]
enum RepCmd {
    /// Write the language, multipliers and codec spec to `--out`
    Build,
    /// Check the representation axioms on words of length at most `--k`
    Verify,
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    /// Deviation h(n) between path evaluation and decoding
    H {
        /// sample this many words per length instead of enumerating
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Fellow-traveler function s(n)
    S,
    /// Fraction of the ball with encoding length proportional to distance
    Almostall {
        #[arg(long)]
        lambda1: Option<f64>,
        #[arg(long)]
        lambda2: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum LangCmd {
    /// Growth class and word counts by length (of `--rep`'s language or an automaton file)
    Growth {
        #[arg(long)]
        automaton: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum FoCmd {
    /// Compile a formula to a relation automaton
    Eval {
        #[arg(long)]
        formula: String,
        /// `NAME=automaton.json`, repeatable
        #[arg(long = "bind", value_parser = parse_binding)]
        bindings: Vec<(String, PathBuf)>,
        /// one-track domain automaton
        #[arg(long)]
        domain: Option<PathBuf>,
        /// bind R0, R1, R2, W0, LH, LH1, LH2 from the semidirect ℋ₃ representation (domain LH)
        #[arg(long)]
        heisenberg: bool,
    },
}

#[derive(Subcommand, Debug)]
enum BallCmd {
    /// CSV of `key,distance` for the ball of radius `--n` in `--rep`'s group
    Export,
}

#[derive(Subcommand, Debug)]
enum BoundsCmd {
    /// Lower bound on h implied by a Dehn function
    Dehn {
        #[arg(long)]
        class: String,
    },
    /// Whether f(x) + f(y) <= f(x + y) eventually
    Superadditive {
        #[arg(long)]
        class: String,
    },
}

fn parse_binding(s: &str) -> std::result::Result<(String, PathBuf), String> {
    s.split_once('=').map(|(n, p)| (n.to_string(), PathBuf::from(p))).ok_or_else(|| format!("expected NAME=FILE, got `{s}`"))
}

/// Resolved settings for one run.
struct Run {
    c: Common,
}

impl Run {
    fn rep(&self) -> Result<CayleyRep> {
        let arg = self.c.rep.as_deref().ok_or_else(|| Error::arg("missing --rep"))?;
        load_rep(arg)
    }

    fn need_n(&self) -> Result<usize> {
        self.c.n.ok_or_else(|| Error::arg("missing --n"))
    }

    fn exec(&self) -> Exec {
        Exec::from_workers(self.c.workers.unwrap_or(0))
    }

    fn measure_opts(&self) -> MeasureOptions {
        let d = MeasureOptions::default();
        MeasureOptions {
            cap_words: self.c.cap_words.unwrap_or(d.cap_words),
            cap_ball: self.c.cap_ball.unwrap_or(d.cap_ball),
            ball_radius: d.ball_radius,
            exec: self.exec(),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.c.out {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_series(&self, s: &MeasurementSeries) -> Result<()> {
        match self.c.format.unwrap_or(Format::Csv) {
            Format::Csv => self.emit(&s.to_csv()),
            Format::Json => self.emit(&(s.to_json()? + "\n")),
        }
    }
}

/// Resolves a built-in name, a JSON spec file, or a bundle directory.
pub fn load_rep(arg: &str) -> Result<CayleyRep> {
    let path = Path::new(arg);
    if path.is_dir() {
        CayleyRep::load_bundle(path)
    } else if path.is_file() {
        let spec: RepSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        spec.build()
    } else {
        RepSpec::from_name(arg)?.build()
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Argument(_)
        | Error::Parse(_)
        | Error::UnknownLetter(_)
        | Error::Unsupported(_)
        | Error::FamilyMismatch(_)
        | Error::UnboundRelation(_)
        | Error::ArityMismatch { .. } => 2,
        _ => 1,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            eprintln!("ERROR: usage: {}", one_line(&e.kind().to_string()));
            return 2;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ERROR: {}", one_line(&e.to_string()));
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => serde_json::from_str::<Common>(&std::fs::read_to_string(p)?)
            .map_err(|e| Error::arg(format!("config file: {e}")))?,
        None => Common::default(),
    };
    let run = Run { c: cli.common.overlay(file) };
    if let Some(0) = run.c.cap_ball {
        return Err(Error::arg("--cap-ball must be positive"));
    }
    if let Some(0) = run.c.cap_words {
        return Err(Error::arg("--cap-words must be positive"));
    }
    let workers = run.c.workers.unwrap_or(0);
    Exec::with_workers(workers, move || execute(&run, cli.command))
}

fn execute(run: &Run, command: Command) -> Result<i32> {
    match command {
        Command::Rep(RepCmd::Build) => {
            let rep = run.rep()?;
            let out = run.c.out.as_ref().ok_or_else(|| Error::arg("rep build needs --out DIR"))?;
            rep.save_bundle(out)?;
            println!("wrote {} ({} multipliers) to {}", rep.name(), rep.multipliers().len(), out.display());
            Ok(0)
        }
        Command::Rep(RepCmd::Verify) => {
            let rep = run.rep()?;
            let mut opts = VerifyOptions::new(run.c.k.ok_or_else(|| Error::arg("missing --k"))?);
            opts.exec = run.exec();
            if let Some(c) = run.c.cap_words {
                opts.cap_words = c;
            }
            if let Some(c) = run.c.cap_ball {
                opts.cap_ball = c;
            }
            let report = verify_rep(&rep, &opts)?;
            run.emit(&(serde_json::to_string_pretty(&report)? + "\n"))?;
            if report.passed {
                Ok(0)
            } else {
                eprintln!("ERROR: verification failed: {}", one_line(report.counterexample.as_deref().unwrap_or("unknown")));
                Ok(1)
            }
        }
        Command::Measure(m) => {
            let rep = run.rep()?;
            let n = run.need_n()?;
            let opts = run.measure_opts();
            let series = match m {
                MeasureCmd::H { sample: Some(k) } => measure_h_sampled(&rep, n, k, run.c.seed.unwrap_or(0), &opts)?,
                MeasureCmd::H { sample: None } => measure_h(&rep, n, &opts)?,
                MeasureCmd::S => measure_s(&rep, n, &opts)?,
                MeasureCmd::Almostall { lambda1, lambda2 } => almost_all_stats(&rep, n, lambda1, lambda2, &opts)?,
            };
            run.emit_series(&series)?;
            Ok(0)
        }
        Command::Lang(LangCmd::Growth { automaton }) => {
            let dfa = match automaton {
                Some(p) => Dfa::load(&p)?,
                None => run.rep()?.language().clone(),
            };
            let n = run.c.n.unwrap_or(14);
            let class = classify_growth(&dfa);
            let counts = count_by_length(&dfa, n);
            match run.c.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = format!("# growth: {class}\nlength,count\n");
                    for (i, c) in counts.iter().enumerate() {
                        s += &format!("{i},{c}\n");
                    }
                    run.emit(&s)?;
                }
                Format::Json => {
                    let v = serde_json::json!({ "growth": class, "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>() });
                    run.emit(&(serde_json::to_string_pretty(&v)? + "\n"))?;
                }
            }
            Ok(0)
        }
        Command::Fo(FoCmd::Eval { formula, bindings, domain, heisenberg }) => {
            let phi = Formula::parse(&formula)?;
            let mut env: HashMap<String, Dfa> = HashMap::new();
            let mut dom = None;
            if heisenberg {
                let rel = build_heisenberg_relations(&RepSpec::Heisenberg {}.build()?)?;
                dom = Some(rel.l_h.clone());
                env = rel.env();
            }
            for (name, path) in bindings {
                env.insert(name, Dfa::load(&path)?);
            }
            if let Some(p) = domain {
                dom = Some(Dfa::load(&p)?);
            }
            let dom = dom.ok_or_else(|| Error::arg("fo eval needs --domain FILE or --heisenberg"))?;
            // relations from files carry their own alphabet objects
            let dom_alpha = dom.alphabet().clone();
            for d in env.values_mut() {
                if d.alphabet().symbols() != dom_alpha.symbols() {
                    return Err(Error::AlphabetMismatch("bound relations must share the domain's alphabet".into()));
                }
                *d = d.with_alphabet(dom_alpha.clone())?;
            }
            if phi.free_vars().is_empty() {
                let holds = decide_sentence(&phi, &env, &dom)?;
                run.emit(&(serde_json::to_string_pretty(&serde_json::json!({ "sentence": true, "holds": holds }))? + "\n"))?;
                return Ok(0);
            }
            let rel = eval_formula(&phi, &env, &dom)?;
            let json = crate::automata::AutomatonJson::from_dfa(&rel.automaton);
            let v = serde_json::json!({ "vars": rel.vars, "states": rel.automaton.state_count(), "automaton": json });
            run.emit(&(serde_json::to_string_pretty(&v)? + "\n"))?;
            Ok(0)
        }
        Command::Ball(BallCmd::Export) => {
            let rep = run.rep()?;
            let n = run.need_n()?;
            let cap = run.c.cap_ball.unwrap_or(MeasureOptions::default().cap_ball);
            let group = rep.group();
            let b = largest_ball(group, n, cap, run.exec());
            if b.radius() < n {
                return Err(Error::CapExceeded { what: format!("ball of radius {n}"), needed: cap as u128 + 1, cap: cap as u128 });
            }
            let mut s = String::from("key,distance\n");
            for (g, d) in b.elements() {
                s += &format!("\"{}\",{d}\n", group.key(g));
            }
            run.emit(&s)?;
            Ok(0)
        }
        Command::Bounds(BoundsCmd::Dehn { class }) => {
            let c: FunctionClass = class.parse()?;
            run.emit(&format!("{}\n", dehn_lower_bound(c)?))?;
            Ok(0)
        }
        Command::Bounds(BoundsCmd::Superadditive { class }) => {
            let c: FunctionClass = class.parse()?;
            run.emit(&(serde_json::to_string(&superadditivity_check(c))? + "\n"))?;
            Ok(0)
        }
    }
}
