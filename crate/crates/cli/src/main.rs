//! `maltsev`: command-line front end for finite algebras, Maltsev chains and
//! congruence identities.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use maltsev_core::algebra::FiniteAlgebra;
use maltsev_core::condition::{verify_condition, Family, TERNARY_FAMILIES};
use maltsev_core::constructions::{
    baker_plus_instances, make_b_of_ad, make_base, make_reduct, variety_preset, witness_instance_with,
    BaseKind, CounterexampleInstance, Recipe, WitnessKind,
};
use maltsev_core::free::{build_free_algebra_on, Limits};
use maltsev_core::io::{
    algebra_json, chain_json, load_algebra, load_chain, load_instance, save_algebra, save_instance, Cache,
};
use maltsev_core::level::{check_theorem_bounds, level_report_cached, Budgets, Status};
use maltsev_core::relation::{all_congruences, Partition};
use maltsev_core::relexpr::{check_inclusion, parse_identity, Binding, Inclusion};
use maltsev_core::reproduce::{run_reproduce, ReproduceSpec, Target};
use maltsev_core::transform::{apply_transform, Rule};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// Output goes through these so a closed pipe ends the process quietly.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "maltsev", version, about = "Finite algebras, Maltsev chains and congruence identities")]
struct Cli {
    /// Wall-clock budget per search, in milliseconds.
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Largest chain length searched.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Skip the free-algebra cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or display an algebra file.
    #[command(subcommand)]
    Alg(AlgCommand),
    /// Build an algebra, a variety's generators or a counterexample bundle.
    Construct(ConstructArgs),
    /// Minimal levels of the named Maltsev conditions.
    Levels(LevelsArgs),
    /// Check a congruence identity under given bindings, or a saved instance.
    Check(CheckArgs),
    /// Search all congruence assignments for a failure of an identity.
    Search(SearchArgs),
    /// Build the free algebra on k generators.
    Free(FreeArgs),
    /// Apply a chain transformation.
    Transform(TransformArgs),
    /// Verify a chain's equations in the generators.
    Verify(VerifyArgs),
    /// Recompute a table row or witness and compare with the expected values.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand)]
enum AlgCommand {
    Validate { file: PathBuf },
    Show { file: PathBuf },
}

/// Generator algebras: files, or a variety preset like `a:4`.
#[derive(Args)]
struct Generators {
    files: Vec<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
}

impl Generators {
    fn load(&self) -> Result<Vec<FiniteAlgebra>> {
        let mut out = Vec::new();
        if let Some(p) = &self.preset {
            let (v, n) = p.split_once(':').ok_or_else(|| anyhow!("preset must look like a:4"))?;
            let v = single_char(v)?;
            out.extend(variety_preset(v, n.parse().context("preset n")?)?);
        }
        for f in &self.files {
            out.push(load(f)?);
        }
        if out.is_empty() {
            bail!("no generator algebras given");
        }
        Ok(out)
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// bak, ba, lin, ain, lin-mid, ain-mid, ain-star, b-of-ad, preset:V,
    /// or instance:KIND (baker-plus, baker-plus-2, baker-plus-3, induction-a, induction-b).
    #[arg(long)]
    recipe: String,
    /// chain:K, bool2 or bool4.
    #[arg(long)]
    base: Option<String>,
    /// Number of operations plus one (reducts), or the variety index (presets, instances).
    #[arg(long)]
    n: Option<usize>,
    /// Index of the distinguished operation for lin and ain.
    #[arg(long)]
    i: Option<usize>,
    /// Four component files for b-of-ad, comma separated.
    #[arg(long, value_delimiter = ',')]
    components: Vec<PathBuf>,
    /// Element a of the fourth component for b-of-ad.
    #[arg(long)]
    a: Option<usize>,
    /// Element d of the fourth component for b-of-ad.
    #[arg(long)]
    d: Option<usize>,
    /// Restrict instances to the subalgebra generated by their named elements.
    #[arg(long)]
    compact: bool,
    /// Output file (algebras) or directory (presets, instances); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LevelsArgs {
    #[command(flatten)]
    gens: Generators,
    /// Families to compute, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    families: Vec<String>,
    /// Skip the Day chain search in F(4); Day levels then come from transformations.
    #[arg(long)]
    no_day_search: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance bundle directory.
    #[arg(long, conflicts_with_all = ["algebra", "identity"])]
    instance: Option<PathBuf>,
    #[arg(long)]
    algebra: Option<PathBuf>,
    #[arg(long)]
    identity: Option<String>,
    /// `a=0,1/2,3`: blocks separated by `/`, unlisted elements are singletons.
    #[arg(long = "bind")]
    binds: Vec<String>,
}

#[derive(Args)]
struct SearchArgs {
    algebra: PathBuf,
    #[arg(long)]
    identity: String,
    /// Stop enumerating congruences beyond this many.
    #[arg(long, default_value_t = 4096)]
    max_congruences: usize,
    /// Stop after this many assignments.
    #[arg(long, default_value_t = 10_000_000)]
    max_assignments: u64,
}

#[derive(Args)]
struct FreeArgs {
    #[command(flatten)]
    gens: Generators,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = maltsev_core::free::F3_CAP)]
    max_elements: usize,
    /// Print the term of every element.
    #[arg(long)]
    terms: bool,
}

#[derive(Args)]
struct TransformArgs {
    /// Rule name, e.g. day_from_jonsson or specularize-odd.
    #[arg(long)]
    rule: String,
    /// Input chain JSON.
    chain: PathBuf,
    /// Verify the output in these generators.
    #[command(flatten)]
    gens: Generators,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    chain: PathBuf,
    #[command(flatten)]
    gens: Generators,
}

#[derive(Args)]
struct ReproduceArgs {
    /// sumup-row:V:N, buh-witness:F:N, baker-plus, polin or transform-suite.
    target: String,
    #[arg(long)]
    json: bool,
}

fn single_char(s: &str) -> Result<char> {
    let mut cs = s.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => Ok(c),
        _ => bail!("expected a single letter, got {s}"),
    }
}

fn load(path: &Path) -> Result<FiniteAlgebra> {
    let (alg, warnings) = load_algebra(path)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(alg)
}

fn budgets(cli: &Cli) -> Budgets {
    let mut b = Budgets::default();
    if let Some(n) = cli.max_n {
        b.max_n = n;
    }
    b.budget_ms = cli.budget_ms;
    b
}

fn cache(cli: &Cli) -> Option<Cache> {
    if cli.no_cache {
        None
    } else {
        Cache::from_env()
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| p.display().to_string()),
        None => {
            say!("{text}");
            Ok(())
        }
    }
}

fn alg_show(alg: &FiniteAlgebra) -> String {
    let mut s = format!("{} (size {})\n", alg.name, alg.size);
    if let Some(l) = &alg.labels {
        s.push_str(&format!("labels: {}\n", l.join(" ")));
    }
    for op in &alg.operations {
        s.push_str(&format!("{}/{}\n", op.name, op.arity));
        if op.arity == 0 {
            s.push_str(&format!("  = {}\n", op.table[0]));
            continue;
        }
        let n = alg.size;
        let rows = op.table.len() / n;
        let mut args = vec![0usize; op.arity - 1];
        for r in 0..rows {
            maltsev_core::algebra::decode_into(r, n, &mut args);
            let head: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            let vals: Vec<String> = op.table[r * n..(r + 1) * n].iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("  ({}) {}\n", head.join(","), vals.join(" ")));
        }
    }
    s
}

fn recipe(args: &ConstructArgs, name: &str) -> Result<Recipe> {
    let n = args.n.ok_or_else(|| anyhow!("--n is required for {name}"))?;
    let i = || args.i.ok_or_else(|| anyhow!("--i is required for {name}"));
    Ok(match name {
        "bak" => Recipe::Bak { n },
        "ba" => Recipe::Ba { n },
        "lin" => Recipe::Lin { i: i()?, n },
        "ain" => Recipe::Ain { i: i()?, n },
        "lin-mid" => Recipe::LinMid { n },
        "ain-mid" => Recipe::AinMid { n },
        "ain-star" => Recipe::AinStar { i: i()?, n },
        _ => bail!("unknown recipe {name}"),
    })
}

fn instance(args: &ConstructArgs, kind: &str) -> Result<CounterexampleInstance> {
    let compact = Some(args.compact);
    Ok(match kind {
        "baker-plus" | "baker-plus-2" | "baker-plus-3" => {
            let idx = match kind {
                "baker-plus" => 0,
                "baker-plus-2" => 1,
                _ => 2,
            };
            let inst = baker_plus_instances()?.swap_remove(idx);
            if args.compact {
                inst.compact()?
            } else {
                inst
            }
        }
        "induction-a" | "induction-b" => {
            let n = args.n.ok_or_else(|| anyhow!("--n is required for {kind}"))?;
            let family = kind.chars().last().expect("nonempty");
            witness_instance_with(&WitnessKind::Induction { family, n }, compact)?
        }
        _ => bail!("unknown instance {kind}"),
    })
}

fn construct(args: &ConstructArgs) -> Result<u8> {
    let out = args.out.as_deref();
    if let Some(v) = args.recipe.strip_prefix("preset:") {
        let n = args.n.ok_or_else(|| anyhow!("--n is required for presets"))?;
        let gens = variety_preset(single_char(v)?, n)?;
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                for (k, g) in gens.iter().enumerate() {
                    save_algebra(g, &dir.join(format!("g{}.json", k + 1)))?;
                }
            }
            None => say!("{}", serde_json::to_string_pretty(&gens)?),
        }
        return Ok(0);
    }
    if let Some(kind) = args.recipe.strip_prefix("instance:") {
        let inst = instance(args, kind)?;
        let dir = out.ok_or_else(|| anyhow!("instances need --out DIR"))?;
        save_instance(&inst, dir)?;
        say!("{} ({} elements) -> {}", inst.name, inst.algebra.size, dir.display());
        return Ok(0);
    }
    let alg = if args.recipe == "b-of-ad" {
        if args.components.len() != 4 {
            bail!("b-of-ad needs four --components");
        }
        let comps = args.components.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
        let a = args.a.ok_or_else(|| anyhow!("--a is required"))?;
        let d = args.d.ok_or_else(|| anyhow!("--d is required"))?;
        make_b_of_ad(&comps, [0, 0, 0], a, d)?.algebra
    } else {
        let base = args.base.as_deref().ok_or_else(|| anyhow!("--base is required"))?;
        make_reduct(&recipe(args, &args.recipe)?, &make_base(BaseKind::parse(base)?)?)?
    };
    write_out(out, &algebra_json(&alg))?;
    Ok(0)
}

fn levels(cli: &Cli, args: &LevelsArgs) -> Result<u8> {
    let gens = args.gens.load()?;
    let families: Vec<Family> = if args.families.is_empty() {
        TERNARY_FAMILIES
            .iter()
            .copied()
            .chain([Family::Modular, Family::ReversedModular])
            .collect()
    } else {
        args.families.iter().map(|f| Family::parse(f)).collect::<Result<_, _>>()?
    };
    let mut b = budgets(cli);
    b.day_search = !args.no_day_search;
    let report = level_report_cached(&gens, &families, &b, &[], cache(cli).as_ref())?;
    if args.json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        if let Some(s) = report.free3_size {
            say!("|F(3)| = {s}");
        }
        if let Some(s) = report.free4_size {
            say!("|F(4) restricted| = {s}");
        }
        for f in &families {
            let e = report.get(*f).expect("requested family");
            let value = match (e.status, e.value) {
                (Status::Exact, Some(v)) => v.to_string(),
                (Status::LowerBound, Some(v)) => format!(">= {v}"),
                (Status::UpperBound, Some(v)) => format!("<= {v}"),
                _ => "timeout".into(),
            };
            say!("{:<28} {:<8} {}", f.name(), value, e.witness.join(", "));
        }
        let (violations, _) = check_theorem_bounds(&report);
        for v in &violations {
            say!("theorem bound violated: {v}");
        }
    }
    let timeout = report.levels.values().any(|e| e.status == Status::Timeout);
    Ok(if timeout { EXIT_TIMEOUT } else { 0 })
}

fn parse_bind(spec: &str, size: usize) -> Result<(char, Partition)> {
    let (name, blocks) = spec.split_once('=').ok_or_else(|| anyhow!("binding must look like a=0,1/2,3"))?;
    let blocks = blocks
        .split('/')
        .filter(|b| !b.trim().is_empty())
        .map(|b| b.split(',').map(|v| v.trim().parse::<usize>().context("block element")).collect())
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let mut blocks = blocks;
    let listed: std::collections::HashSet<usize> = blocks.iter().flatten().copied().collect();
    blocks.extend((0..size).filter(|e| !listed.contains(e)).map(|e| vec![e]));
    Ok((single_char(name.trim())?, Partition::from_blocks(size, &blocks)?))
}

fn check(args: &CheckArgs) -> Result<u8> {
    if let Some(dir) = &args.instance {
        let inst = load_instance(dir)?;
        let c = inst.check()?;
        let (p, q) = inst.expected;
        say!("{}: {}", inst.name, inst.identity);
        say!("bindings are congruences: {}", c.congruences);
        say!("pair ({p}, {q}): in lhs {}, in rhs {}", c.pair_in_lhs, c.pair_in_rhs);
        say!("inclusion: {:?}", c.inclusion);
        return Ok(if c.fails_as_expected() { 0 } else { EXIT_MISMATCH });
    }
    let alg = load(args.algebra.as_deref().ok_or_else(|| anyhow!("--algebra or --instance is required"))?)?;
    let identity = parse_identity(args.identity.as_deref().ok_or_else(|| anyhow!("--identity is required"))?)?;
    let mut binding = Binding::new();
    for b in &args.binds {
        let (c, p) = parse_bind(b, alg.size)?;
        if !p.is_congruence(&alg) {
            eprintln!("warning: {c} is not a congruence");
        }
        binding.insert(c, p.to_relation());
    }
    match check_inclusion(&identity, &binding, &alg)? {
        Inclusion::Holds => {
            say!("holds");
            Ok(0)
        }
        Inclusion::Fails(p, q) => {
            say!("fails at ({p}, {q})");
            Ok(EXIT_MISMATCH)
        }
    }
}

fn search(args: &SearchArgs) -> Result<u8> {
    let alg = load(&args.algebra)?;
    let identity = parse_identity(&args.identity)?;
    let cons = all_congruences(&alg, args.max_congruences)?;
    let vars = identity.vars();
    let k = vars.len();
    say!("{} congruences, {} variables", cons.len(), k);
    let total = (cons.len() as u64).checked_pow(k as u32);
    if total.map_or(true, |t| t > args.max_assignments) {
        bail!("{}^{k} assignments exceed --max-assignments", cons.len());
    }
    let mut idx = vec![0usize; k];
    loop {
        let binding: Binding = vars.iter().zip(&idx).map(|(&v, &i)| (v, cons[i].to_relation())).collect();
        if let Inclusion::Fails(p, q) = check_inclusion(&identity, &binding, &alg)? {
            say!("counterexample at ({p}, {q})");
            for (&v, &i) in vars.iter().zip(&idx) {
                say!("  {v} = {:?}", cons[i].blocks());
            }
            return Ok(EXIT_MISMATCH);
        }
        // odometer over congruence indices
        let mut pos = k;
        loop {
            if pos == 0 {
                say!("holds for every assignment");
                return Ok(0);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cons.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn free(cli: &Cli, args: &FreeArgs) -> Result<u8> {
    let gens = args.gens.load()?;
    let mut limits = Limits::elements(args.max_elements);
    limits.deadline = cli.budget_ms.map(|ms| std::time::Instant::now() + std::time::Duration::from_millis(ms));
    let f = build_free_algebra_on(&gens, args.k, |_| true, limits)?;
    say!("|F({})| = {}{}", args.k, f.len(), if f.complete { "" } else { " (incomplete)" });
    if args.terms {
        for i in 0..f.len() {
            say!("{i}: {}", f.term(i));
        }
    }
    Ok(if f.complete { 0 } else { EXIT_TIMEOUT })
}

fn transform(args: &TransformArgs) -> Result<u8> {
    let chain = load_chain(&args.chain)?;
    let out = apply_transform(Rule::parse(&args.rule)?, &chain)?;
    write_out(args.out.as_deref(), &serde_json::to_string_pretty(&chain_json(&out))?)?;
    if args.gens.files.is_empty() && args.gens.preset.is_none() {
        return Ok(0);
    }
    match verify_condition(&out, &args.gens.load()?)? {
        None => {
            eprintln!("verified");
            Ok(0)
        }
        Some(f) => {
            eprintln!("{f}");
            Ok(EXIT_MISMATCH)
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<u8> {
    let chain = load_chain(&args.chain)?;
    match verify_condition(&chain, &args.gens.load()?)? {
        None => {
            say!("{}: all equations hold", chain.condition.tag());
            Ok(0)
        }
        Some(f) => {
            say!("{f}");
            Ok(EXIT_MISMATCH)
        }
    }
}

fn reproduce(cli: &Cli, args: &ReproduceArgs) -> Result<u8> {
    let spec = ReproduceSpec {
        target: Target::parse(&args.target)?,
        budgets: budgets(cli),
    };
    let report = run_reproduce(&spec, cache(cli).as_ref())?;
    if args.json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        say_raw!("{}", report.render());
    }
    Ok(report.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Alg(AlgCommand::Validate { file }) => {
            let alg = load(file)?;
            let sig: Vec<String> = alg.signature().iter().map(|(n, a)| format!("{n}/{a}")).collect();
            say!("ok: {} (size {}; {})", alg.name, alg.size, sig.join(", "));
            Ok(0)
        }
        Command::Alg(AlgCommand::Show { file }) => {
            say_raw!("{}", alg_show(&load(file)?));
            Ok(0)
        }
        Command::Construct(a) => construct(a),
        Command::Levels(a) => levels(cli, a),
        Command::Check(a) => check(a),
        Command::Search(a) => search(a),
        Command::Free(a) => free(cli, a),
        Command::Transform(a) => transform(a),
        Command::Verify(a) => verify(a),
        Command::Reproduce(a) => reproduce(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
