use std::fs;
use std::io::{Read, Write};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use adasync::aeps::{aeps_to_pda, normalize_distinct_pushes};
use adasync::aps::{aps_emptiness, extract_run, Aps, RunNode};
use adasync::decide::{decide, DecideOptions, Decision, Solver};
use adasync::format::{parse_document, print_aeps, print_aps, print_instance, print_pda, Document, ProblemHeader};
use adasync::oracle::{bounded_decide, Bounded, Bounds};
use adasync::random::{random_aeps, random_aps, random_pda, random_subset, rng};
use adasync::reductions::{reduce, ProblemInstance, ReductionTag};
use adasync::sparse::{sparse_empty, SparseOptions};
use adasync::witness::{deserialize_tree, serialize_tree, to_dot, StrategyTree};
use adasync::{Pda, StateId};

/// Adaptive synchronisation for pushdown automata with an observable stack.
///
/// Exit status: 0 = YES, 1 = NO, 2 = error.
#[derive(Parser)]
#[command(name = "adasync", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the instance in FILE (pda, aeps or aps document).
    Decide(DecideArgs),
    /// Apply one reduction gadget and print the reduced instance with its name map.
    Reduce(ReduceArgs),
    /// Translate an AEPS document into a Special-Sync PDA instance.
    AepsToPda { file: String },
    /// Decide by brute-force search within explicit bounds.
    Oracle(OracleArgs),
    /// Check a witness tree against the instance in FILE (0 = valid, 1 = not).
    CheckWitness {
        file: String,
        witness: String,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Report whether the (completed) PDA in FILE is deterministic (0 = yes, 1 = no).
    IsDeterministic { file: String },
    /// Print a random instance.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct WitnessOut {
    /// Write the witness tree here (YES answers only).
    #[arg(long, value_name = "PATH")]
    witness: Option<String>,
    /// Write the witness as Graphviz DOT instead of tree text.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct DecideArgs {
    file: String,
    /// Override the problem variant from the header.
    #[arg(long)]
    variant: Option<String>,
    #[command(flatten)]
    out: WitnessOut,
    /// Leaf bound for the sparse search.
    #[arg(long)]
    k: Option<usize>,
    /// Bound on subset states and product automaton states.
    #[arg(long)]
    state_budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    solver: SolverArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Sparse,
    Saturation,
}

#[derive(Args)]
struct ReduceArgs {
    file: String,
    #[arg(long)]
    variant: Option<String>,
    /// Gadget to apply, e.g. `given-to-super`.
    #[arg(long, conflicts_with = "to")]
    gadget: Option<String>,
    /// Target variant; picks the gadget between the two.
    #[arg(long)]
    to: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    file: String,
    #[arg(long)]
    variant: Option<String>,
    #[command(flatten)]
    out: WitnessOut,
    #[arg(long, default_value_t = 8)]
    stack_bound: usize,
    #[arg(long, default_value_t = 64)]
    depth_bound: usize,
    #[arg(long, default_value_t = 200_000)]
    node_budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pda,
    Aps,
    Aeps,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Kind::Pda)]
    kind: Kind,
    #[arg(long, default_value_t = 4)]
    states: usize,
    /// Only for `--kind pda`.
    #[arg(long)]
    deterministic: bool,
}

/// Writes to stdout; a closed pipe (`adasync reduce .. | head`) ends the
/// process quietly instead of panicking.
fn emit(s: &str) {
    if let Err(e) = std::io::stdout().write_all(s.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(2);
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(&(format!($($t)*) + "\n")) };
}

fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {path}"))
}

fn load(path: &str) -> Result<Document> {
    parse_document(&read(path)?).with_context(|| format!("in {path}"))
}

fn load_instance(path: &str, variant: Option<&str>) -> Result<ProblemInstance> {
    instance_of(path, load(path)?, variant)
}

fn instance_of(path: &str, doc: Document, variant: Option<&str>) -> Result<ProblemInstance> {
    match doc {
        Document::Pda(d) => Ok(d.instance(variant)?),
        Document::Aeps(a) => {
            if variant.is_some() {
                bail!("--variant does not apply to AEPS documents");
            }
            Ok(aeps_to_pda(&normalize_distinct_pushes(&a))?.instance)
        }
        Document::Aps(_) => bail!("{path} is an APS document; expected a PDA or AEPS"),
    }
}

fn yes_no(b: bool) -> ExitCode {
    ExitCode::from(if b { 0 } else { 1 })
}

fn write_witness(out: &WitnessOut, pda: &Pda, tree: &StrategyTree) -> Result<()> {
    if let Some(path) = &out.witness {
        let text = if out.dot { to_dot(pda, tree) } else { serialize_tree(pda, tree) };
        fs::write(path, text).with_context(|| format!("cannot write {path}"))?;
    }
    Ok(())
}

fn report(inst: &ProblemInstance, d: &Decision) {
    outln!("answer: {}", if d.answer { "YES" } else { "NO" });
    outln!("variant: {}", inst.variant.name());
    for t in &d.trace {
        outln!(
            "reduction: {} -> {} ({} states, {} inputs, {} stack symbols)",
            t.tag,
            t.to,
            t.states,
            t.inputs,
            t.syms
        );
    }
    outln!("solver: {}", d.solver.name());
    outln!("aps-states: {}", d.aps_states);
    if let Some(w) = &d.witness {
        outln!("witness: {} nodes, {} leaves, depth {}", w.node_count(), w.leaf_count(), w.depth());
    }
    if let Some(e) = &d.pull_back_error {
        outln!("witness: unavailable ({e})");
    }
}

fn cmd_decide(a: &DecideArgs) -> Result<ExitCode> {
    let opts = DecideOptions {
        solver: match a.solver {
            SolverArg::Auto => Solver::Auto,
            SolverArg::Sparse => Solver::Sparse,
            SolverArg::Saturation => Solver::Saturation,
        },
        k: a.k,
        state_budget: a.state_budget,
    };
    let t0 = Instant::now();
    let doc = load(&a.file)?;
    if let Document::Aps(aps) = &doc {
        return decide_aps(aps, a);
    }
    let inst = instance_of(&a.file, doc, a.variant.as_deref())?;
    let d = decide(&inst, &opts)?;
    report(&inst, &d);
    if let Some(w) = &d.witness {
        write_witness(&a.out, &inst.pda.complete(), w)?;
    }
    eprintln!("time: {:.3}s", t0.elapsed().as_secs_f64());
    Ok(yes_no(d.answer))
}

fn show_run(aps: &Aps, n: &RunNode, depth: usize, out: &mut String) {
    out.push_str(&format!("{:w$}({}, {})", "", aps.state_name(n.state), aps.show_word(&n.stack), w = 2 * depth));
    if let Some(r) = n.rule {
        out.push_str(&format!(" rule {r}"));
    }
    out.push('\n');
    for c in &n.children {
        show_run(aps, c, depth + 1, out);
    }
}

fn decide_aps(aps: &Aps, a: &DecideArgs) -> Result<ExitCode> {
    let t0 = Instant::now();
    let (accepted, run, solver) = match a.k {
        Some(k) => {
            let r = sparse_empty(
                aps,
                k,
                &SparseOptions {
                    state_budget: a.state_budget,
                    k: Some(k),
                },
            )?;
            (r.accepted, r.run, "sparse")
        }
        None => {
            let sat = aps_emptiness(aps);
            (sat.accepted, extract_run(aps, &sat), "saturation")
        }
    };
    outln!("answer: {}", if accepted { "YES" } else { "NO" });
    outln!("solver: {solver}");
    if let Some(run) = &run {
        outln!("run: {} nodes, {} leaves", run.node_count(), run.leaf_count());
        if let Some(path) = &a.out.witness {
            let mut s = String::new();
            show_run(aps, &run.root, 0, &mut s);
            fs::write(path, s).with_context(|| format!("cannot write {path}"))?;
        }
    }
    eprintln!("time: {:.3}s", t0.elapsed().as_secs_f64());
    Ok(yes_no(accepted))
}

fn cmd_reduce(a: &ReduceArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.file, a.variant.as_deref())?;
    let from = inst.variant.name();
    let tag = match (&a.gadget, &a.to) {
        (Some(g), _) => *ReductionTag::ALL
            .iter()
            .find(|t| t.name() == g)
            .with_context(|| format!("unknown gadget `{g}`; expected one of {}", ReductionTag::ALL.map(|t| t.name()).join(", ")))?,
        (None, Some(to)) => ReductionTag::between(from, to).with_context(|| format!("no gadget from `{from}` to `{to}`"))?,
        (None, None) => bail!("give --gadget or --to"),
    };
    let out = reduce(tag, &inst)?;
    out!("{}", print_instance(&out.instance));
    outln!("");
    for line in out.name_map().lines() {
        if line.starts_with('#') {
            outln!("{line}");
        } else {
            outln!("# {line}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_aeps_to_pda(file: &str) -> Result<ExitCode> {
    let Document::Aeps(a) = load(file)? else {
        bail!("{file} is not an AEPS document");
    };
    let n = normalize_distinct_pushes(&a);
    if n != a {
        outln!("# normalised to distinct pushes: {} states, {} stack symbols", n.states.len(), n.stack.len());
    }
    let red = aeps_to_pda(&n)?;
    out!("{}", print_instance(&red.instance));
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(a: &OracleArgs) -> Result<ExitCode> {
    let t0 = Instant::now();
    let inst = load_instance(&a.file, a.variant.as_deref())?;
    let bounds = Bounds::new(a.stack_bound, a.depth_bound, a.node_budget)?;
    let res = bounded_decide(&inst, &bounds)?;
    let yes = res.is_yes();
    outln!("answer: {}", if yes { "YES" } else { "NO within bounds" });
    outln!("variant: {}", inst.variant.name());
    outln!("bounds: stack {}, depth {}, nodes {}", a.stack_bound, a.depth_bound, a.node_budget);
    if let Bounded::Yes(t) = &res {
        outln!("witness: {} nodes, {} leaves, depth {}", t.node_count(), t.leaf_count(), t.depth());
        write_witness(&a.out, &inst.pda.complete(), t)?;
    }
    eprintln!("time: {:.3}s", t0.elapsed().as_secs_f64());
    Ok(yes_no(yes))
}

fn cmd_check_witness(file: &str, witness: &str, variant: Option<&str>) -> Result<ExitCode> {
    let inst = load_instance(file, variant)?;
    let pda = inst.pda.complete();
    let tree = deserialize_tree(&pda, &read(witness)?).with_context(|| format!("in {witness}"))?;
    let inst = ProblemInstance { pda, ..inst };
    match inst.check(&tree) {
        Ok(()) => {
            outln!("witness: OK ({} nodes, {} leaves)", tree.node_count(), tree.leaf_count());
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            outln!("witness: REJECTED: {v}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_is_deterministic(file: &str) -> Result<ExitCode> {
    let pda = match load(file)? {
        Document::Pda(d) => d.pda,
        Document::Aeps(a) => aeps_to_pda(&normalize_distinct_pushes(&a))?.instance.pda,
        Document::Aps(_) => bail!("{file} is an APS document"),
    };
    let det = pda.complete().is_deterministic();
    outln!("deterministic: {det}");
    Ok(yes_no(det))
}

fn cmd_generate(a: &GenerateArgs) -> Result<ExitCode> {
    let mut r = rng(a.seed);
    let n = a.states.max(1);
    match a.kind {
        Kind::Pda => {
            let p = random_pda(&mut r, n, 2, 3, a.deterministic);
            let init = random_subset(&mut r, p.num_states());
            let h = ProblemHeader {
                variant: "special".into(),
                init: Some(init),
                target: Some(StateId::from_index(p.num_states() - 1)),
                gamma: None,
            };
            out!("{}", print_pda(&p, Some(&h)));
        }
        Kind::Aps => out!("{}", print_aps(&random_aps(&mut r, n, 3, 2 * n, 3))),
        Kind::Aeps => out!("{}", print_aeps(&random_aeps(&mut r, n, 2, 3, 2 * n, true))),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Decide(a) => cmd_decide(a),
        Cmd::Reduce(a) => cmd_reduce(a),
        Cmd::AepsToPda { file } => cmd_aeps_to_pda(file),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::CheckWitness { file, witness, variant } => cmd_check_witness(file, witness, variant.as_deref()),
        Cmd::IsDeterministic { file } => cmd_is_deterministic(file),
        Cmd::Generate(a) => cmd_generate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
