//! `vlcost`: batch front end for cost-capacity, smooth-entropy, coding and
//! bound computations.
//!
//! Every subcommand prints `key=value` lines on stdout. Sequences use indexed
//! keys such as `h_rate[3]=...`; `--table` switches to aligned columns.
//! Exit status is 0 on success, 1 on bad input or a failed check, and 2 when
//! the instance is out of reach (support blowup, exact solver budget,
//! interval precision).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vlcost::bounds::{
    bound_report, cost_rate_relation_check, rate_report, second_order_sequence, DEFAULT_GAMMA,
};
use vlcost::cost_model::DEFAULT_REGULARITY_TOL;
use vlcost::cost_model::{context_label, parse_cost_table, parse_digits, DEFAULT_SOLVER_TOL};
use vlcost::oracle::{check_sandwich, random_instance};
use vlcost::sfe_coder::{
    average_cost_rate, build_code_for, build_dominant_set, error_probability, transcode,
    transcode_guarantee, write_codebook, Codebook, DominantStrategy, Ordering,
};
use vlcost::smooth_entropy::{
    appendix_report, rate_sequence, smooth_entropy_exact, smooth_entropy_greedy,
};
use vlcost::source_model::{parse_distribution, DEFAULT_MAX_SUPPORT};
use vlcost::{CostFunction, Distribution, IidSource, MethodHint, Quantity};

#[derive(Parser, Debug)]
#[command(
    name = "vlcost",
    version,
    about = "Prefix coding with regular symbol costs"
)]
struct Cli {
    /// Print aligned tables instead of key=value lines.
    #[arg(long, global = true)]
    table: bool,
    /// Report rates and entropies in bits instead of base-K units.
    #[arg(long, global = true)]
    bits: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the cost capacity of a cost table.
    Alpha {
        #[arg(long)]
        cost: PathBuf,
        /// Regularity tolerance on the per-context roots.
        #[arg(long, default_value_t = DEFAULT_REGULARITY_TOL)]
        tol: f64,
    },
    /// Report per-context roots and whether the table is regular.
    ValidateCost {
        #[arg(long)]
        cost: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REGULARITY_TOL)]
        tol: f64,
    },
    /// Entropy and varentropy of a distribution or its n-blocks.
    Entropy {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Smooth entropy of a distribution or its n-blocks.
    Smooth {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, ignore_case = true)]
        quantity: QuantityArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Smooth entropies and cost rates for block lengths 1..=n-max.
    RateSeq {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n_max: usize,
    },
    /// Converse and achievability bounds on the optimal cost rate.
    Bounds {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Build the escape-word code and summarize it.
    BuildCode {
        #[command(flatten)]
        code: CodeArgs,
        /// Write the codebook dump to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode one (block) symbol.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        symbol: String,
    },
    /// Decode one codeword given as a digit string.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        word: String,
    },
    /// Re-lay a code for a second cost table, keeping its dominant set.
    Transcode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        to_cost: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First- and second-order rates of a memoryless source.
    SecondOrder {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Also print the finite-n second-order term for n = 1..=n-max.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Check that alpha_c times the rate does not depend on the cost table.
    RelationCheck {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        cost2: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Randomized check of converse <= optimum <= constructed <= achievability.
    SandwichTest {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Normalized smooth entropy of n-blocks against its limit.
    AppendixReport {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Args, Debug)]
struct Instance {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    cost: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, value_enum, default_value_t = StrategyArg::GreedyDrop)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = OrderingArg::Canonical)]
    ordering: OrderingArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum QuantityArg {
    G,
    H,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Auto,
    Brute,
    Bnb,
    Greedy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    GreedyDrop,
    GOptimal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrderingArg {
    Canonical,
    Probability,
}

#[derive(Debug)]
enum CliError {
    Core(vlcost::Error),
    Input(String),
    /// A check ran to completion and failed; its report was already printed.
    CheckFailed(String),
}

impl From<vlcost::Error> for CliError {
    fn from(e: vlcost::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_infeasible() => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Scalar lines followed by an optional indexed table.
#[derive(Default)]
struct Report {
    scalars: Vec<(String, String)>,
    index: String,
    columns: Vec<String>,
    rows: Vec<(String, Vec<String>)>,
}

impl Report {
    fn put(&mut self, key: &str, value: impl ToString) {
        self.scalars.push((key.to_string(), value.to_string()));
    }

    fn num(&mut self, key: &str, value: f64) {
        self.put(key, fmt_f(value));
    }

    fn columns(&mut self, index: &str, cols: &[&str]) {
        self.index = index.to_string();
        self.columns = cols.iter().map(|c| c.to_string()).collect();
    }

    fn row(&mut self, idx: impl ToString, values: Vec<String>) {
        self.rows.push((idx.to_string(), values));
    }

    fn render(&self, table: bool) -> String {
        let mut out = String::new();
        if table {
            let w = self.scalars.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.scalars {
                let _ = writeln!(out, "{k:<w$}  {v}");
            }
            if !self.columns.is_empty() {
                if !self.scalars.is_empty() {
                    out.push('\n');
                }
                let mut header = vec![self.index.clone()];
                header.extend(self.columns.iter().cloned());
                let cells: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|(i, vs)| {
                        std::iter::once(i.clone())
                            .chain(vs.iter().cloned())
                            .collect()
                    })
                    .collect();
                let widths: Vec<usize> = (0..header.len())
                    .map(|c| {
                        cells
                            .iter()
                            .map(|r| r[c].len())
                            .chain(std::iter::once(header[c].len()))
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                for line in std::iter::once(&header).chain(cells.iter()) {
                    let parts: Vec<String> = line
                        .iter()
                        .zip(&widths)
                        .map(|(s, &w)| format!("{s:>w$}"))
                        .collect();
                    let _ = writeln!(out, "{}", parts.join("  "));
                }
            }
        } else {
            for (k, v) in &self.scalars {
                let _ = writeln!(out, "{k}={v}");
            }
            for (i, vs) in &self.rows {
                for (c, v) in self.columns.iter().zip(vs) {
                    let _ = writeln!(out, "{c}[{i}]={v}");
                }
            }
        }
        out
    }
}

/// Shortest round-trip representation, so `2.0` prints as `2.0`.
fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: vlcost::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        vlcost::Error::Parse { .. } => CliError::Input(format!("{}: {e}", path.display())),
        other => CliError::Core(other),
    })
}

fn load_dist(path: &Path) -> CliResult<Distribution> {
    let text = read_file(path)?;
    in_file(path, parse_distribution(&text))
}

fn load_cost(path: &Path, tol: f64) -> CliResult<CostFunction> {
    let text = read_file(path)?;
    let table = in_file(path, parse_cost_table(&text))?;
    Ok(table.solve(DEFAULT_SOLVER_TOL, tol)?)
}

fn check_epsilon(name: &str, v: f64) -> CliResult<()> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "--{name} must lie in [0, 1), got {v}"
        )))
    }
}

fn check_n(name: &str, n: usize) -> CliResult<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(CliError::Input(format!("--{name} must be at least 1")))
    }
}

fn block(d: &Distribution, n: usize) -> CliResult<Distribution> {
    check_n("n", n)?;
    if n == 1 {
        return Ok(d.clone());
    }
    Ok(IidSource::new(d.clone()).block_distribution(n, DEFAULT_MAX_SUPPORT)?)
}

/// Unit conversion for information quantities.
struct Units {
    scale: f64,
}

impl Units {
    fn new(bits: bool, k: usize) -> Self {
        Self {
            scale: if bits { (k as f64).log2() } else { 1.0 },
        }
    }

    fn rate(&self, x: f64) -> String {
        fmt_f(x * self.scale)
    }

    fn squared(&self, x: f64) -> String {
        fmt_f(x * self.scale * self.scale)
    }

    fn label(&self) -> &'static str {
        if self.scale == 1.0 {
            "base-K"
        } else {
            "bits"
        }
    }
}

fn word_digits(w: &[vlcost::Symbol]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

struct BuiltCode {
    dist: Distribution,
    cost: CostFunction,
    code: Codebook,
}

fn build(args: &CodeArgs) -> CliResult<BuiltCode> {
    let inst = &args.inst;
    check_epsilon("epsilon", inst.epsilon)?;
    let single = load_dist(&inst.dist)?;
    let cost = load_cost(&inst.cost, DEFAULT_REGULARITY_TOL)?;
    let dist = block(&single, inst.n)?;
    let strategy = match args.strategy {
        StrategyArg::GreedyDrop => DominantStrategy::GreedyDrop,
        StrategyArg::GOptimal => DominantStrategy::GOptimal,
    };
    let ordering = match args.ordering {
        OrderingArg::Canonical => Ordering::Canonical,
        OrderingArg::Probability => Ordering::ProbabilityDescending,
    };
    let ds = build_dominant_set(&dist, inst.epsilon, strategy)?;
    let code = build_code_for(&dist, &cost, ds, ordering)?;
    Ok(BuiltCode { dist, cost, code })
}

fn summarize(r: &mut Report, b: &BuiltCode, n: usize, u: &Units) -> CliResult<()> {
    let cb = &b.code;
    r.put("support", b.dist.len());
    r.put("members", cb.dominant().len());
    r.num("alpha_c", b.cost.alpha());
    r.put("escape", word_digits(cb.escape_word()));
    r.put("representative", b.dist.label(cb.representative()));
    r.num("error_probability", error_probability(cb));
    r.put(
        "average_cost_rate",
        u.rate(average_cost_rate(cb, &b.dist, n)?),
    );
    r.num("kraft_sum", cb.kraft_sum()?);
    Ok(())
}

fn run(cli: &Cli) -> CliResult<Report> {
    let mut r = Report::default();
    match &cli.command {
        Command::Alpha { cost, tol } => {
            let cf = load_cost(cost, *tol)?;
            r.num("alpha_c", cf.alpha());
            r.put("k", cf.k());
            r.put("depth", cf.depth());
            r.num("c_min", cf.c_min());
            r.num("c_max", cf.c_max());
        }
        Command::ValidateCost { cost, tol } => {
            let text = read_file(cost)?;
            let table = in_file(cost, parse_cost_table(&text))?;
            let rep = table.validate_regularity(*tol);
            r.put("regular", rep.regular);
            r.num("min_root", rep.min_root);
            r.num("max_root", rep.max_root);
            r.num("spread", rep.max_root - rep.min_root);
            r.columns("context", &["root"]);
            for root in &rep.roots {
                r.row(context_label(&root.context), vec![fmt_f(root.root)]);
            }
            if !rep.regular {
                print!("{}", r.render(cli.table));
                return Err(CliError::CheckFailed(format!(
                    "cost table is not regular within tolerance {tol}"
                )));
            }
        }
        Command::Entropy { dist, n } => {
            let d = block(&load_dist(dist)?, *n)?;
            let u = Units::new(cli.bits, d.base());
            r.put("units", u.label());
            r.put("n", n);
            r.put("support", d.len());
            r.put("entropy", u.rate(d.entropy()));
            r.put("entropy_rate", u.rate(d.entropy() / *n as f64));
            r.put("varentropy", u.squared(d.varentropy()));
        }
        Command::Smooth {
            dist,
            delta,
            quantity,
            method,
            n,
        } => {
            check_epsilon("delta", *delta)?;
            let d = block(&load_dist(dist)?, *n)?;
            let u = Units::new(cli.bits, d.base());
            let q = match quantity {
                QuantityArg::G => Quantity::G,
                QuantityArg::H => Quantity::H,
            };
            let res = match method {
                MethodArg::Auto => smooth_entropy_exact(&d, *delta, q, MethodHint::Auto)?,
                MethodArg::Brute => smooth_entropy_exact(&d, *delta, q, MethodHint::BruteForce)?,
                MethodArg::Bnb => smooth_entropy_exact(&d, *delta, q, MethodHint::TypeClassBnb)?,
                MethodArg::Greedy => smooth_entropy_greedy(&d, *delta, q)?,
            };
            r.put("units", u.label());
            r.put("value", u.rate(res.value));
            r.put("rate", u.rate(res.value / *n as f64));
            r.num("set_mass", res.set_mass);
            r.put("set_size", res.achieving_set.len());
            r.put("method", res.method.name());
            let labels: Vec<&str> = res.achieving_set.iter().map(|&i| d.label(i)).collect();
            r.put("set", labels.join(","));
        }
        Command::RateSeq {
            dist,
            cost,
            delta,
            n_max,
        } => {
            check_epsilon("delta", *delta)?;
            check_n("n-max", *n_max)?;
            let s = IidSource::new(load_dist(dist)?);
            let cf = load_cost(cost, DEFAULT_REGULARITY_TOL)?;
            let u = Units::new(cli.bits, cf.k());
            r.put("units", u.label());
            r.num("alpha_c", cf.alpha());
            r.columns(
                "n",
                &["h", "g", "h_rate", "g_rate", "h_cost_rate", "g_cost_rate"],
            );
            for rec in rate_sequence(&s, &cf, *delta, *n_max)? {
                r.row(
                    rec.n,
                    [
                        rec.h,
                        rec.g,
                        rec.h_rate,
                        rec.g_rate,
                        rec.h_cost_rate,
                        rec.g_cost_rate,
                    ]
                    .iter()
                    .map(|&x| u.rate(x))
                    .collect(),
                );
            }
        }
        Command::Bounds { inst, gamma } => {
            check_epsilon("epsilon", inst.epsilon)?;
            if !(gamma.is_finite() && *gamma > 0.0) {
                return Err(CliError::Input("--gamma must be positive".into()));
            }
            let single = load_dist(&inst.dist)?;
            let cf = load_cost(&inst.cost, DEFAULT_REGULARITY_TOL)?;
            let dn = block(&single, inst.n)?;
            let s = IidSource::new(single);
            let rep = bound_report(&dn, &cf, inst.epsilon, inst.n, *gamma, Some(&s))?;
            let u = Units::new(cli.bits, cf.k());
            r.put("units", u.label());
            r.put("n", rep.n);
            r.num("epsilon", rep.epsilon);
            r.num("gamma", rep.gamma);
            r.num("alpha_c", rep.alpha);
            r.put("g_value", u.rate(rep.g_value));
            r.put("h_value", u.rate(rep.h_value));
            r.put("converse", u.rate(rep.converse));
            r.put("achievability", u.rate(rep.achievability));
            if let Some(f) = rep.first_order {
                r.put("first_order", u.rate(f));
            }
            if let Some(l) = rep.second_order {
                r.put("second_order", u.rate(l));
            }
        }
        Command::BuildCode { code, out } => {
            let b = build(code)?;
            let u = Units::new(cli.bits, b.cost.k());
            r.put("units", u.label());
            summarize(&mut r, &b, code.inst.n, &u)?;
            r.columns("symbol", &["word", "cost"]);
            for (a, (w, c)) in b
                .code
                .assignments()
                .iter()
                .zip(b.code.words().iter().zip(b.code.per_word_cost()))
            {
                r.row(b.dist.label(a.member), vec![word_digits(w), fmt_f(*c)]);
            }
            if let Some(path) = out {
                fs::write(path, write_codebook(&b.code, &b.dist))
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Encode { code, symbol } => {
            let b = build(code)?;
            let x = b.dist.index_of(symbol)?;
            let w = b.code.encode(x)?;
            r.put("symbol", symbol);
            r.put("word", word_digits(w));
            r.num("cost", b.code.cost_of(x)?);
            r.put("member", b.code.dominant().contains(x));
        }
        Command::Decode { code, word } => {
            let b = build(code)?;
            let w = parse_digits(word, b.cost.k())
                .map_err(|m| CliError::Input(format!("--word: {m}")))?;
            let x = b.code.decode(&w)?;
            r.put("word", word);
            r.put("symbol", b.dist.label(x));
            r.put("escape", w == b.code.escape_word());
        }
        Command::Transcode { code, to_cost, out } => {
            let b = build(code)?;
            let cf2 = load_cost(to_cost, DEFAULT_REGULARITY_TOL)?;
            let cb2 = transcode(&b.code, &cf2)?;
            let n = code.inst.n;
            let u = Units::new(cli.bits, cf2.k());
            r.put("units", u.label());
            r.num("alpha_c_from", b.cost.alpha());
            r.num("alpha_c_to", cf2.alpha());
            r.put("members", cb2.dominant().len());
            r.put("dominant_preserved", cb2.dominant() == b.code.dominant());
            r.num("error_probability", error_probability(&cb2));
            r.put(
                "average_cost_rate_from",
                u.rate(average_cost_rate(&b.code, &b.dist, n)?),
            );
            r.put(
                "average_cost_rate_to",
                u.rate(average_cost_rate(&cb2, &b.dist, n)?),
            );
            r.put("guarantee", transcode_guarantee(&cb2)?);
            if let Some(path) = out {
                fs::write(path, write_codebook(&cb2, &b.dist))
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
        }
        Command::SecondOrder {
            dist,
            cost,
            epsilon,
            n_max,
        } => {
            check_epsilon("epsilon", *epsilon)?;
            let s = IidSource::new(load_dist(dist)?);
            let cf = load_cost(cost, DEFAULT_REGULARITY_TOL)?;
            let rep = rate_report(&s, &cf, *epsilon)?;
            let u = Units::new(cli.bits, cf.k());
            r.put("units", u.label());
            r.num("epsilon", rep.epsilon);
            r.put("k", rep.k);
            r.num("alpha_c", rep.alpha);
            r.put("entropy", u.rate(rep.entropy));
            r.put("varentropy", u.squared(rep.varentropy));
            r.put("first_order", u.rate(rep.first_order));
            r.put("second_order", u.rate(rep.second_order));
            if let Some(n_max) = n_max {
                check_n("n-max", *n_max)?;
                r.columns("n", &["second_order"]);
                for (n, v) in second_order_sequence(&s, &cf, *epsilon, *n_max)? {
                    r.row(n, vec![u.rate(v)]);
                }
            }
        }
        Command::RelationCheck {
            dist,
            cost,
            cost2,
            epsilon,
        } => {
            check_epsilon("epsilon", *epsilon)?;
            let s = IidSource::new(load_dist(dist)?);
            let a = rate_report(&s, &load_cost(cost, DEFAULT_REGULARITY_TOL)?, *epsilon)?;
            let b = rate_report(&s, &load_cost(cost2, DEFAULT_REGULARITY_TOL)?, *epsilon)?;
            let chk = cost_rate_relation_check(&a, &b)?;
            r.num("alpha_c_1", a.alpha);
            r.num("alpha_c_2", b.alpha);
            r.num("first_order_1", a.first_order);
            r.num("first_order_2", b.first_order);
            r.num("scaled_first_order_1", a.alpha * a.first_order);
            r.num("scaled_first_order_2", b.alpha * b.first_order);
            r.num("first_order_diff", chk.first_order_diff);
            r.num("second_order_diff", chk.second_order_diff);
            r.put("holds", chk.holds);
            if !chk.holds {
                print!("{}", r.render(cli.table));
                return Err(CliError::CheckFailed("relation does not hold".into()));
            }
        }
        Command::SandwichTest {
            seed,
            trials,
            gamma,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            r.put("seed", seed);
            r.put("trials", trials);
            r.num("gamma", *gamma);
            r.columns(
                "trial",
                &[
                    "k",
                    "support",
                    "n",
                    "epsilon",
                    "converse",
                    "oracle",
                    "sfe",
                    "achievability",
                    "holds",
                ],
            );
            let mut violations = 0usize;
            for t in 0..*trials {
                let inst = random_instance(&mut rng)?;
                let rep =
                    check_sandwich(&inst.distribution, &inst.cost, inst.epsilon, *gamma, inst.n)?;
                if !rep.holds {
                    violations += 1;
                }
                r.row(
                    t,
                    vec![
                        inst.cost.k().to_string(),
                        inst.distribution.len().to_string(),
                        inst.n.to_string(),
                        fmt_f(inst.epsilon),
                        fmt_f(rep.converse),
                        fmt_f(rep.oracle),
                        fmt_f(rep.sfe),
                        fmt_f(rep.achievability),
                        rep.holds.to_string(),
                    ],
                );
            }
            r.put("violations", violations);
            if violations > 0 {
                print!("{}", r.render(cli.table));
                return Err(CliError::CheckFailed(format!(
                    "{violations} sandwich violations"
                )));
            }
        }
        Command::AppendixReport { dist, delta, n_max } => {
            check_epsilon("delta", *delta)?;
            check_n("n-max", *n_max)?;
            let s = IidSource::new(load_dist(dist)?);
            let u = Units::new(cli.bits, s.single_letter().base());
            let rep = appendix_report(&s, *delta, *n_max)?;
            r.put("units", u.label());
            r.num("delta", rep.delta);
            r.put("entropy", u.rate(rep.entropy));
            r.put("target", u.rate(rep.target));
            r.columns("n", &["rate"]);
            for (n, v) in rep.sequence {
                r.row(n, vec![u.rate(v)]);
            }
        }
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.table));
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Input(m) | CliError::CheckFailed(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
