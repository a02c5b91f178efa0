use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;
use tautrel::bclass::{class_B, enumerate_acceptable, enumerate_shapes, pushforward_sides, WeightVector};
use tautrel::expr::{parse_bracket, Expression, ExpressionJson, RationalJson};
use tautrel::reduce::{
    certificate_json, eliminate_all_psi, pair_with_psi_monomials, prove_zero, ReduceError, SpanBudget, Verdict,
    ZeroCertificate,
};

const PROVED: u8 = 0;
const FAILED: u8 = 1;
const UNDECIDED: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tautrel",
    version,
    about = "Exact computations with psi-decorated boundary classes"
)]
struct Cli {
    /// Worker threads. The engine is single-threaded; results never depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Maximum number of WDVV relations generated by a span test.
    #[arg(long, global = true, env = "TAUTREL_BUDGET", default_value_t = SpanBudget::default().max_relations)]
    budget: usize,

    /// Contraction rounds when generating WDVV relations.
    #[arg(long, global = true, default_value_t = SpanBudget::default().rounds)]
    rounds: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Stage {
    Raw,
    PsiFree,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Psi,
    ZeroTest,
    Pair,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the class B^m_{g,d}.
    ComputeB {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = Stage::Raw)]
        stage: Stage,
    },
    /// Try to prove B^m_{g,d} = 0.
    Verify {
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Compare both sides of the pushforward formula for forgetting l frozen legs.
    CheckPushforward {
        #[arg(long)]
        g: u32,
        /// Number of regular legs; defaults to the length of d.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        d: WeightVector,
    },
    /// List acceptable tree shapes, and their extra-leg assignments for a weight vector.
    Enumerate {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, value_name = "D")]
        with_extras: Option<WeightVector>,
    },
    /// Run one reduction stage on a bracket expression read from FILE or stdin.
    Reduce {
        #[arg(value_name = "FILE", default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value_t = Mode::ZeroTest)]
        mode: Mode,
    },
}

/// (g, m, d) given either positionally (`1 2 2,1`) or by flags.
#[derive(Args, Debug)]
struct ClassArgs {
    #[arg(value_name = "G", required_unless_present = "g")]
    pos_g: Option<u32>,
    #[arg(value_name = "M", required_unless_present = "m")]
    pos_m: Option<u32>,
    #[arg(value_name = "D", required_unless_present = "d")]
    pos_d: Option<WeightVector>,
    #[arg(long, conflicts_with = "pos_g")]
    g: Option<u32>,
    #[arg(long, conflicts_with = "pos_m")]
    m: Option<u32>,
    #[arg(long, conflicts_with = "pos_d")]
    d: Option<WeightVector>,
}

impl ClassArgs {
    fn resolve(&self) -> (u32, u32, WeightVector) {
        let g = self.g.or(self.pos_g).expect("clap enforces G");
        let m = self.m.or(self.pos_m).expect("clap enforces M");
        let d = self.d.clone().or_else(|| self.pos_d.clone()).expect("clap enforces D");
        (g, m, d)
    }
}

struct Outcome {
    code: u8,
    text: String,
    inputs: Value,
    outcome: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = SpanBudget {
        rounds: cli.rounds,
        max_relations: cli.budget,
    };
    let start = Instant::now();
    let result = run(&cli, &budget);
    let timing_ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(out) => {
            if cli.format == Format::Json {
                let report = json!({
                    "schema": 1,
                    "command": command_name(&cli.command),
                    "inputs": out.inputs,
                    "outcome": out.outcome,
                    "timing_ms": timing_ms,
                    "budget": {"rounds": budget.rounds, "max_relations": budget.max_relations},
                });
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(FAILED)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::ComputeB { .. } => "compute-b",
        Command::Verify { .. } => "verify",
        Command::CheckPushforward { .. } => "check-pushforward",
        Command::Enumerate { .. } => "enumerate",
        Command::Reduce { .. } => "reduce",
    }
}

fn run(cli: &Cli, budget: &SpanBudget) -> Result<Outcome> {
    match &cli.command {
        Command::ComputeB { class, stage } => compute_b(class, *stage, cli.format),
        Command::Verify { class } => verify(class, budget),
        Command::CheckPushforward { g, n, m, l, d } => check_pushforward(*g, *n, *m, *l, d, budget),
        Command::Enumerate { g, n, m, with_extras } => enumerate(*g, *n, *m, with_extras.as_ref()),
        Command::Reduce { input, mode } => reduce(input, *mode, cli.format, budget),
    }
}

fn class_inputs(g: u32, m: u32, d: &WeightVector) -> Value {
    json!({"g": g, "m": m, "n": d.n(), "d": d.as_slice()})
}

fn render(e: &Expression, format: Format) -> String {
    match format {
        Format::Latex => e.render_latex(),
        _ => e.render_bracket(),
    }
}

fn expression_outcome(e: &Expression) -> Value {
    json!({
        "terms": e.len(),
        "degree": e.degree(),
        "expression": ExpressionJson::from(e),
    })
}

fn compute_b(class: &ClassArgs, stage: Stage, format: Format) -> Result<Outcome> {
    let (g, m, d) = class.resolve();
    if stage == Stage::PsiFree && g > 1 {
        bail!("--stage psi-free needs genus 0 or 1, got {g}");
    }
    let mut e = class_B(g, m, &d)?;
    if stage == Stage::PsiFree {
        e = eliminate_all_psi(&e)?;
    }
    let mut inputs = class_inputs(g, m, &d);
    inputs["stage"] = json!(match stage {
        Stage::Raw => "raw",
        Stage::PsiFree => "psi-free",
    });
    Ok(Outcome {
        code: PROVED,
        text: render(&e, format),
        inputs,
        outcome: expression_outcome(&e),
    })
}

fn verdict_outcome(v: &Verdict) -> (u8, Value) {
    let status = if v.is_zero() {
        "zero"
    } else if v.is_nonzero() {
        "nonzero"
    } else {
        "unknown"
    };
    let mut out = json!({"status": status, "reason": v.label()});
    match v {
        Verdict::Certified { certificate, basis, .. } => {
            out["relations_generated"] = json!(basis.len());
            out["certificate"] = json!(certificate_json(certificate, basis));
        }
        Verdict::NonZero { exponents, value } => {
            out["witness"] = json!({"exponents": exponents, "value": RationalJson::from(value)});
        }
        Verdict::Unknown {
            psi_free,
            rounds,
            relations,
        } => {
            out["rounds"] = json!(rounds);
            out["relations_generated"] = json!(relations);
            out["psi_free_terms"] = json!(psi_free.len());
        }
        Verdict::Empty | Verdict::ZeroIntegral => {}
    }
    (if v.is_zero() { PROVED } else { UNDECIDED }, out)
}

fn verdict_text(what: &str, v: &Verdict) -> String {
    match v {
        Verdict::Certified {
            certificate: ZeroCertificate::Zero(c),
            basis,
            ..
        } => format!("{what}: {} ({} of {} relations used)", v.label(), c.len(), basis.len()),
        Verdict::NonZero { exponents, value } => {
            format!("{what}: nonzero (pairing with psi exponents {exponents:?} gives {value})")
        }
        Verdict::Unknown { relations, rounds, .. } => {
            format!("{what}: unknown after {rounds} rounds and {relations} relations")
        }
        _ => format!("{what}: {}", v.label()),
    }
}

/// Budget overflow is an undecided outcome, not a failure of the run.
fn decide(e: &Expression, budget: &SpanBudget, what: &str) -> Result<(u8, String, Value)> {
    match prove_zero(e, budget) {
        Ok(v) => {
            let (code, outcome) = verdict_outcome(&v);
            Ok((code, verdict_text(what, &v), outcome))
        }
        Err(ReduceError::RelationOverflow(n)) => {
            eprintln!("budget exceeded: more than {n} relations needed");
            Ok((
                UNDECIDED,
                format!("{what}: budget exceeded (more than {n} relations)"),
                json!({"status": "budget-exceeded", "max_relations": n}),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(class: &ClassArgs, budget: &SpanBudget) -> Result<Outcome> {
    let (g, m, d) = class.resolve();
    let bound = 2 * g as i64 + m as i64 - 1;
    if (d.total() as i64) < bound {
        eprintln!("warning: |d| = {} is below 2g + m - 1 = {bound}", d.total());
    }
    let e = class_B(g, m, &d)?;
    let what = format!("B^{m}_{{{g},{d}}}");
    let (code, text, outcome) = decide(&e, budget, &what)?;
    Ok(Outcome {
        code,
        text,
        inputs: class_inputs(g, m, &d),
        outcome,
    })
}

fn check_pushforward(
    g: u32,
    n: Option<usize>,
    m: u32,
    l: u32,
    d: &WeightVector,
    budget: &SpanBudget,
) -> Result<Outcome> {
    if let Some(n) = n {
        if n != d.n() {
            bail!("--n {n} does not match d = ({d})");
        }
    }
    if l == 0 {
        bail!("--l must be positive");
    }
    let (lhs, rhs) = pushforward_sides(g, m, l, d)?;
    let mut inputs = class_inputs(g, m, d);
    inputs["l"] = json!(l);
    let sides = json!({"lhs_terms": lhs.len(), "rhs_terms": rhs.len()});
    if lhs == rhs {
        return Ok(Outcome {
            code: PROVED,
            text: format!("equal term for term ({} terms)", lhs.len()),
            inputs,
            outcome: json!({"equal": true, "exact": true, "sides": sides}),
        });
    }
    let diff = lhs.sub(&rhs)?;
    let (code, text, verdict) = decide(&diff, budget, "difference")?;
    Ok(Outcome {
        code,
        text,
        inputs,
        outcome: json!({"equal": code == PROVED, "exact": false, "sides": sides, "difference": verdict}),
    })
}

fn enumerate(g: u32, n: u32, m: u32, d: Option<&WeightVector>) -> Result<Outcome> {
    if let Some(d) = d {
        if d.n() != n as usize {
            bail!("--with-extras needs {n} weights, got ({d})");
        }
    }
    let shapes = enumerate_shapes(g, n, m)?;
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut total_assignments = 0;
    let mut contributing = 0;
    for (i, s) in shapes.iter().enumerate() {
        let mut row = json!({
            "shape": s.render(),
            "vertices": s.num_vertices(),
            "edges": s.num_edges(),
        });
        lines.push(format!("{:>3}  {}", i + 1, s.render()));
        if let Some(d) = d {
            let assignments = enumerate_acceptable(s, d);
            total_assignments += assignments.len();
            contributing += usize::from(!assignments.is_empty());
            let ps: Vec<Value> = assignments
                .iter()
                .map(|p| {
                    json!(p
                        .entries()
                        .into_iter()
                        .map(|(v, pv)| json!({"vertex": v, "p": pv}))
                        .collect::<Vec<_>>())
                })
                .collect();
            for p in &assignments {
                let cells: Vec<String> = p.entries().iter().map(|(v, pv)| format!("p({v})={pv}")).collect();
                lines.push(format!(
                    "       {}",
                    if cells.is_empty() { "-".into() } else { cells.join(" ") }
                ));
            }
            row["assignments"] = json!(ps);
        }
        rows.push(row);
    }
    let mut summary = format!("{} shapes", shapes.len());
    if d.is_some() {
        summary.push_str(&format!(
            ", {contributing} with acceptable assignments, {total_assignments} assignments in all"
        ));
    }
    lines.push(summary);
    let mut outcome = json!({"count": shapes.len(), "shapes": rows});
    let mut inputs = json!({"g": g, "n": n, "m": m});
    if let Some(d) = d {
        outcome["assignments"] = json!(total_assignments);
        outcome["contributing"] = json!(contributing);
        inputs["d"] = json!(d.as_slice());
    }
    Ok(Outcome {
        code: PROVED,
        text: lines.join("\n"),
        inputs,
        outcome,
    })
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn reduce(input: &str, mode: Mode, format: Format, budget: &SpanBudget) -> Result<Outcome> {
    let text = read_input(input)?;
    let e = parse_bracket(&text).with_context(|| format!("parsing {input}"))?;
    let inputs = json!({"source": input, "expression": e.render_bracket(), "ambient": e.ambient().to_string()});
    match mode {
        Mode::Psi => {
            let r = eliminate_all_psi(&e)?;
            Ok(Outcome {
                code: PROVED,
                text: render(&r, format),
                inputs,
                outcome: expression_outcome(&r),
            })
        }
        Mode::ZeroTest => {
            let (code, text, outcome) = decide(&e, budget, "expression")?;
            Ok(Outcome {
                code,
                text,
                inputs,
                outcome,
            })
        }
        Mode::Pair => {
            let pairs = pair_with_psi_monomials(&e)?;
            let labels: Vec<String> = e.ambient().labels().iter().map(|l| l.to_string()).collect();
            let mut lines = vec![format!("{}  value", labels.join(" "))];
            for (exps, v) in &pairs {
                let cells: Vec<String> = exps
                    .iter()
                    .zip(&labels)
                    .map(|(x, l)| format!("{x:>w$}", w = l.len()))
                    .collect();
                lines.push(format!("{}  {v}", cells.join(" ")));
            }
            let all_zero = pairs.iter().all(|(_, v)| num_is_zero(v));
            let rows: Vec<Value> = pairs
                .iter()
                .map(|(x, v)| json!({"exponents": x, "value": RationalJson::from(v)}))
                .collect();
            Ok(Outcome {
                code: PROVED,
                text: lines.join("\n"),
                inputs,
                outcome: json!({"labels": labels, "pairings": rows, "all_zero": all_zero}),
            })
        }
    }
}

fn num_is_zero(r: &tautrel::expr::Rational) -> bool {
    r.numer().bits() == 0
}
