//! `lfpoly` command-line front end.
//!
//! Input labels on the command line are 1-based (`pd:1;1`, `--k 1`), as in
//! the usual notation for Bell scenarios; files and library calls are
//! 0-based.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use lfpoly::models::{ch_row, ld_vertices, lf_vertices, ns_vertices, pd_vertices, sw_vertices, PdSpec};
use lfpoly::polytope::{facet_enum, parse_representation, vertex_enum, MembershipResult, Representation};
use lfpoly::quantum::{ch_demo_setup, reversal_error, QuantumSetup};
use lfpoly::rational::{format_rational, to_f64};
use lfpoly::verify::{verify_lf_gap, verify_quantum_violation, verify_theorem5, verify_woodhead, ScaleGuard};
use lfpoly::{evaluate_inequality, Behaviour, Error, HPolytope, Scenario, VPolytope};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_MALFORMED: u8 = 3;
const EXIT_SCALE: u8 = 4;

#[derive(Parser)]
#[command(name = "lfpoly", version, about = "Exact correlation polytopes for Bell and sequential Wigner's-friend scenarios")]
struct Cli {
    /// Worker threads for polytope computations.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Homogeneous scenario `MA,NA,MB,NB`.
    #[arg(long)]
    scenario: Option<String>,
    /// Outcome count per Alice input, e.g. `2,3`.
    #[arg(long)]
    alice_outcomes: Option<String>,
    /// Outcome count per Bob input.
    #[arg(long)]
    bob_outcomes: Option<String>,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// `ld`, `ns`, `pd:IX;IY` (1-based input lists), `lf` or `sw:R`.
    #[arg(long)]
    family: Option<String>,
    /// Read the polytope from a V- or H-representation file instead.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print counts and extremal CH values to standard error.
    #[arg(long)]
    summary: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the V-representation of a polytope family.
    Vertices {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Emit the H-representation (facets and hull equalities).
    Facets {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Decide membership of a behaviour, with a certificate.
    Member {
        #[command(flatten)]
        family: FamilyArgs,
        /// Behaviour file.
        #[arg(long)]
        point: PathBuf,
    },
    /// Evaluate inequality rows (from an H-representation, or the CH row)
    /// on a behaviour.
    Eval {
        /// Behaviour file.
        #[arg(long)]
        point: PathBuf,
        /// H-representation whose inequality rows are evaluated.
        #[arg(long)]
        hrep: Option<PathBuf>,
    },
    /// Quantum behaviours: `ch-demo`, or `born --setup FILE`.
    Quantum {
        action: String,
        #[arg(long)]
        setup: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Simulate the sequential friend/reversal protocol from a setup file.
    Sequential {
        #[arg(long)]
        setup: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a claim: `theorem5`, `woodhead`, `lf-gap` or `quantum`.
    Verify {
        claim: String,
        /// Rounds for `theorem5`.
        #[arg(long = "R", alias = "rounds", default_value_t = 1)]
        rounds: usize,
        /// Bob outcome counts for `theorem5`.
        #[arg(long, default_value = "2,2")]
        bob: String,
        /// Friend and final alphabet size for `theorem5`.
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        /// Scenario for `woodhead`.
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Alice's non-deterministic input for `woodhead` (1-based).
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Bob's deterministic inputs for `woodhead` (1-based, comma separated).
        #[arg(long, default_value = "")]
        iy: String,
        /// Inputs per party for `lf-gap`.
        #[arg(long = "M", default_value_t = 2)]
        m: usize,
        /// Directory for the witness file.
        #[arg(long, default_value = ".")]
        witness_dir: PathBuf,
    },
    /// Convert between V- and H-representations.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ScaleGuard(_) => EXIT_SCALE,
            Error::Parse { .. } | Error::InvalidScenario(_) | Error::Bounds(_) | Error::Shape { .. } => EXIT_MALFORMED,
            _ => EXIT_FAILURE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn malformed(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_MALFORMED,
        msg: msg.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        msg: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = Result<T, Failure>;

fn parse_list(s: &str, what: &str) -> CliResult<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| malformed(format!("bad {what} list {s:?}"))))
        .collect()
}

/// 1-based labels to 0-based.
fn parse_labels(s: &str, what: &str) -> CliResult<Vec<usize>> {
    parse_list(s, what)?
        .into_iter()
        .map(|v| v.checked_sub(1).ok_or_else(|| malformed(format!("{what} labels start at 1"))))
        .collect()
}

impl ScenarioArgs {
    fn resolve(&self) -> CliResult<Scenario> {
        match (&self.scenario, &self.alice_outcomes, &self.bob_outcomes) {
            (Some(spec), None, None) => {
                let v = parse_list(spec, "scenario")?;
                let [ma, na, mb, nb] = v[..] else {
                    return Err(malformed(format!("scenario must be MA,NA,MB,NB, got {spec:?}")));
                };
                Ok(Scenario::homogeneous(ma, na, mb, nb)?)
            }
            (None, Some(a), Some(b)) => Ok(Scenario::new(parse_list(a, "alice outcome")?, parse_list(b, "bob outcome")?)?),
            _ => Err(malformed("give either --scenario or both --alice-outcomes and --bob-outcomes")),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl FamilyArgs {
    fn build(&self, guard: &ScaleGuard) -> CliResult<Representation> {
        if let Some(path) = &self.input {
            return Ok(parse_representation(&read(path)?)?);
        }
        let family = self.family.as_deref().ok_or_else(|| malformed("give --family or --input"))?;
        let v = if let Some(r) = family.strip_prefix("sw:") {
            let rounds: usize = r.parse().map_err(|_| malformed(format!("bad round count in {family:?}")))?;
            let alice = match &self.scenario.alice_outcomes {
                Some(a) => parse_list(a, "alice outcome")?,
                None => vec![2; rounds + 1],
            };
            if alice.len() != rounds + 1 {
                return Err(malformed(format!("sw:{rounds} needs {} Alice alphabets", rounds + 1)));
            }
            let bob = match &self.scenario.bob_outcomes {
                Some(b) => parse_list(b, "bob outcome")?,
                None => vec![2, 2],
            };
            let s = Scenario::new(alice.clone(), bob.clone())?;
            guard.check_scenario(&s)?;
            sw_vertices(&alice[..rounds], alice[rounds], &bob)?.polytope
        } else {
            let s = self.scenario.resolve()?;
            guard.check_scenario(&s)?;
            match family {
                "ld" => ld_vertices(&s),
                "ns" => ns_vertices(&s)?,
                "lf" => lf_vertices(&s)?,
                _ => {
                    let Some((ix, iy)) = family.strip_prefix("pd:").and_then(|r| r.split_once(';')) else {
                        return Err(malformed(format!("unknown family {family:?}")));
                    };
                    let spec = PdSpec::new(s, parse_labels(ix, "input")?, parse_labels(iy, "input")?)?;
                    pd_vertices(&spec)?
                }
            }
        };
        guard.check_vertices("the result", v.len() as u128)?;
        Ok(Representation::V(v))
    }

    fn vertices(&self, guard: &ScaleGuard) -> CliResult<VPolytope> {
        Ok(match self.build(guard)? {
            Representation::V(v) => v,
            Representation::H(h) => vertex_enum(&h)?,
        })
    }

    fn facets(&self, guard: &ScaleGuard) -> CliResult<HPolytope> {
        Ok(match self.build(guard)? {
            Representation::V(v) => facet_enum(&v)?,
            Representation::H(h) => facet_enum(&vertex_enum(&h)?)?,
        })
    }

    fn chsh_shaped(&self) -> Option<Scenario> {
        self.scenario.resolve().ok().filter(|s| ch_row(s).is_ok())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let guard = ScaleGuard::from_env();
    match cli.command {
        Command::Vertices { family, output } => {
            let v = family.vertices(&guard)?;
            emit(output.out.as_deref(), &v.to_text())?;
            if output.summary {
                eprintln!("vertices: {}", v.len());
                if let Some(s) = family.chsh_shaped() {
                    let row = ch_row(&s)?;
                    let max = v.vertices().iter().map(|p| -row.eval(p)).max();
                    if let Some(max) = max {
                        eprintln!("max CH value over vertices: {}", format_rational(&max));
                    }
                }
            }
        }
        Command::Facets { family, output } => {
            let h = family.facets(&guard)?;
            emit(output.out.as_deref(), &h.to_text())?;
            if output.summary {
                eprintln!("facets: {}", h.inequalities.len());
                eprintln!("hull equalities: {}", h.equalities.len());
            }
        }
        Command::Member { family, point } => {
            let v = family.vertices(&guard)?;
            let p = Behaviour::from_text(&read(&point)?)?;
            match lfpoly::membership(p.coords(), &v)? {
                MembershipResult::Inside { weights } => {
                    println!("INSIDE");
                    for (i, w) in weights.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
                        println!("weight {i} {}", format_rational(w));
                    }
                }
                MembershipResult::Outside { separator } => {
                    println!("OUTSIDE");
                    println!("separator {separator}");
                    println!("value {}", format_rational(&separator.eval(p.coords())));
                }
            }
        }
        Command::Eval { point, hrep } => {
            let p = Behaviour::from_text(&read(&point)?)?;
            let rows = match hrep {
                Some(path) => match parse_representation(&read(&path)?)? {
                    Representation::H(h) => h.inequalities,
                    Representation::V(_) => return Err(malformed("--hrep must be an H-representation")),
                },
                None => vec![ch_row(p.scenario())?],
            };
            for (i, r) in rows.iter().enumerate() {
                let v = evaluate_inequality(r, &p)?;
                println!("row {i} {} ({:.12})", format_rational(&v), to_f64(&v));
            }
        }
        Command::Quantum { action, setup, out } => match action.as_str() {
            "ch-demo" => {
                let (psi, a, b) = ch_demo_setup();
                let q = lfpoly::born_behaviour(&psi, &a, &b)?;
                let value = -evaluate_inequality(&ch_row(q.exact.scenario())?, &q.exact)?;
                println!("CH value {:.12} ({})", to_f64(&value), format_rational(&value));
                println!("expected (sqrt(2)-1)/2 = {:.12}", (2f64.sqrt() - 1.0) / 2.0);
                if let Some(p) = out {
                    emit(Some(&p), &q.exact.to_text())?;
                }
            }
            "born" => {
                let path = setup.ok_or_else(|| malformed("quantum born needs --setup"))?;
                let q = QuantumSetup::parse(&read(&path)?)?.born()?;
                emit(out.as_deref(), &q.exact.to_text())?;
            }
            other => {
                return Err(Failure {
                    code: EXIT_USAGE,
                    msg: format!("unknown quantum action {other:?} (expected ch-demo or born)"),
                })
            }
        },
        Command::Sequential { setup, out } => {
            let proto = QuantumSetup::parse(&read(&setup)?)?.protocol()?;
            let q = lfpoly::sequential_behaviour(&proto)?;
            emit(out.as_deref(), &q.exact.to_text())?;
            eprintln!("max reversal error {:.3e}", reversal_error(&proto)?);
        }
        Command::Verify {
            claim,
            rounds,
            bob,
            alphabet,
            scenario,
            k,
            iy,
            m,
            witness_dir,
        } => {
            let report = match claim.as_str() {
                "theorem5" => verify_theorem5(rounds, &parse_list(&bob, "bob outcome")?, alphabet, alphabet, &guard)?,
                "woodhead" => {
                    let s = if scenario.scenario.is_none() && scenario.alice_outcomes.is_none() {
                        Scenario::chsh()
                    } else {
                        scenario.resolve()?
                    };
                    let k = k.checked_sub(1).ok_or_else(|| malformed("--k labels start at 1"))?;
                    verify_woodhead(&s, k, &parse_labels(&iy, "input")?, &guard)?
                }
                "lf-gap" => verify_lf_gap(m, &guard)?,
                "quantum" => verify_quantum_violation()?,
                other => {
                    return Err(Failure {
                        code: EXIT_USAGE,
                        msg: format!("unknown claim {other:?} (expected theorem5, woodhead, lf-gap or quantum)"),
                    })
                }
            };
            let file = witness_dir.join(format!("{}.witness.txt", report.claim));
            fs::write(&file, report.to_text()).map_err(|e| io_failure(&file, e))?;
            println!("{}", report.summary_line(&file.display().to_string()));
            eprintln!("wall time {:.2?}", report.elapsed);
            if !report.passed() {
                return Err(Failure {
                    code: EXIT_FAILURE,
                    msg: format!("claim {} failed", report.claim),
                });
            }
        }
        Command::Convert { input, out } => {
            let text = match parse_representation(&read(&input)?)? {
                Representation::V(v) => facet_enum(&v)?.to_text(),
                Representation::H(h) => vertex_enum(&h)?.to_text(),
            };
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
