//! `massforms`: command-line access to the exact mass formula engine.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 a wild prime needed a
//! dataset that was not supplied.

use clap::{Args, Parser, Subcommand, ValueEnum};
use massforms_core::{
    assemble, bounds, bounds_with_override, builtin, builtin_names, count_frobenius_pairs,
    embedded, embedded_names, is_universal, lattice_rank, parse_dataset, parse_group_file,
    parse_weight_file, solve, support_forms, tame_formula, total_mass, weights_from_forms,
    BoundSource, DatasetKind, Error, FiniteGroup, PositivityOutcome, Rat, SearchBounds,
    WeightFunction, WildDataset,
};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "massforms", version, about = "Masses and mass formulas of local Galois maps into a finite group, in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    /// Prose mirroring the usual display notation.
    Human,
    /// Stable `key=value` lines; every rational printed as `num/den`.
    Structured,
}

#[derive(Args)]
struct Common {
    /// Built-in group name, or path to a file of permutation generators.
    #[arg(long)]
    group: String,

    #[arg(long, value_enum, default_value = "human")]
    output: OutputMode,
}

#[derive(Args)]
struct WeightsOpt {
    /// Weight file (`H = {..} ; H' = {..} ; w = value` lines). Omitted
    /// means the zero weight function.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct DataOpt {
    /// A dataset per wild prime: `builtin:NAME` or a file path. Repeatable.
    #[arg(long = "data")]
    data: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a group's tame mass formula and the linear forms behind it.
    TameFormula {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weights: WeightsOpt,
    },
    /// Total mass at one prime (wild primes need --data).
    Mass {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weights: WeightsOpt,
        #[command(flatten)]
        data: DataOpt,
        #[arg(long)]
        prime: u64,
    },
    /// Does the tame formula give the right mass at every wild prime?
    CheckUniversal {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weights: WeightsOpt,
        #[command(flatten)]
        data: DataOpt,
    },
    /// Enumerate all exponent vectors solving every wild-prime equation.
    Search {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataOpt,
        /// Uniform per-variable bound override (default: 2t-2 per equation).
        #[arg(long)]
        bound: Option<u64>,
        /// Also admit zero exponents (default searches L >= 1).
        #[arg(long)]
        allow_zero: bool,
        /// Denominator bound for the per-solution weight recovery stage.
        #[arg(long, default_value_t = 1)]
        denom_bound: u64,
        /// Worker threads for the search tree.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Solve for weight functions hitting given tame form values.
    WeightsFromForms {
        #[command(flatten)]
        common: Common,
        /// Comma-separated target values, one per nontrivial cyclic class.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        targets: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        denom_bound: u64,
        /// Also search for an entrywise nonnegative solution.
        #[arg(long)]
        positive: bool,
    },
    /// Rank and elementary divisors of the tame form lattice, with optional
    /// wild support rows.
    LatticeRank {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataOpt,
    },
    /// Brute-force Frobenius-pair counts against the closed-form
    /// coefficients, across tame primes.
    OracleVerify {
        /// Restrict to one group (default: every built-in of order <= 16).
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 50)]
        max_prime: u64,
        #[arg(long, value_enum, default_value = "human")]
        output: OutputMode,
    },
    /// List or print the embedded datasets.
    Datasets {
        #[command(subcommand)]
        action: DatasetsAction,
    },
}

#[derive(Subcommand)]
enum DatasetsAction {
    List,
    Show { name: String },
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn load_group(spec: &str) -> Result<FiniteGroup, Error> {
    if builtin_names().contains(&spec) {
        return builtin(spec);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| {
        Error::InvalidData(format!(
            "`{spec}` is not a built-in group ({}) and reading it as a file failed: {e}",
            builtin_names().join(", ")
        ))
    })?;
    parse_group_file(&text)
}

fn load_weights(group: &FiniteGroup, opt: &WeightsOpt) -> Result<WeightFunction, Error> {
    let pairs = group.maximal_pairs();
    match &opt.weights {
        None => Ok(WeightFunction::zero(pairs.len())),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))?;
            parse_weight_file(group, &pairs, &text)
        }
    }
}

fn load_datasets(group: &FiniteGroup, opt: &DataOpt) -> Result<Vec<WildDataset>, Error> {
    let mut out = Vec::new();
    for spec in &opt.data {
        // Embedded sources are re-parsed against the group in hand, so a
        // mismatched group fails on labels instead of aliasing by index.
        let text = if let Some(name) = spec.strip_prefix("builtin:") {
            embedded(name)?.source
        } else {
            std::fs::read_to_string(spec)
                .map_err(|e| Error::InvalidData(format!("cannot read {spec}: {e}")))?
        };
        out.push(parse_dataset(group, &text)?);
    }
    Ok(out)
}

fn group_tag(group: &FiniteGroup) -> String {
    match group.name() {
        Some(n) => n.to_string(),
        None => format!("<order {}>", group.order()),
    }
}

fn cmd_tame_formula(common: &Common, wopt: &WeightsOpt) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let formula = tame_formula(&g);
    let pairs = g.maximal_pairs();
    match common.output {
        OutputMode::Human => {
            println!("{formula}");
            println!("group: {} (order {})", group_tag(&g), g.order());
            for row in formula.nontrivial_rows() {
                println!(
                    "L[{}] = {}  (coefficient {})",
                    row.class.name,
                    row.exponent.render(&g, &pairs),
                    row.coeff
                );
            }
            if wopt.weights.is_some() {
                let w = load_weights(&g, wopt)?;
                let values: Vec<String> = formula
                    .form_values(&w)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                println!("L values: ({})", values.join(","));
                println!("specialized: {}", formula.to_mass_formula().specialize(Some(&w))?);
            }
        }
        OutputMode::Structured => {
            println!("command=tame-formula");
            println!("group={}", group_tag(&g));
            println!("order={}", g.order());
            println!("formula={formula}");
            for row in formula.nontrivial_rows() {
                println!(
                    "class.{}.coeff={}",
                    row.class.name, row.coeff
                );
                println!(
                    "class.{}.form={}",
                    row.class.name,
                    row.exponent.render(&g, &pairs)
                );
            }
            if wopt.weights.is_some() {
                let w = load_weights(&g, wopt)?;
                let values: Vec<String> =
                    formula.form_values(&w).iter().map(rat_str).collect();
                println!("values={}", values.join(","));
            }
        }
    }
    Ok(())
}

fn cmd_mass(common: &Common, wopt: &WeightsOpt, dopt: &DataOpt, prime: u64) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let w = load_weights(&g, wopt)?;
    let datasets = load_datasets(&g, dopt)?;
    let ds = datasets.iter().find(|d| d.prime == prime);
    let mass = total_mass(&g, prime, &w, ds)?;
    match common.output {
        OutputMode::Human => println!("mass at {prime} = {mass}"),
        OutputMode::Structured => {
            println!("command=mass");
            println!("group={}", group_tag(&g));
            println!("prime={prime}");
            println!("mass={}", rat_str(&mass));
        }
    }
    Ok(())
}

fn cmd_check_universal(common: &Common, wopt: &WeightsOpt, dopt: &DataOpt) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let w = load_weights(&g, wopt)?;
    let datasets = load_datasets(&g, dopt)?;
    let report = is_universal(&g, &w, &datasets)?;
    match common.output {
        OutputMode::Human => {
            let parts: Vec<String> = report
                .checks
                .iter()
                .map(|c| {
                    if c.equal {
                        format!("f({}) = {} = mass", c.prime, c.formula_value)
                    } else {
                        format!("f({}) = {}, mass = {}", c.prime, c.formula_value, c.mass)
                    }
                })
                .collect();
            println!(
                "UNIVERSAL: {} ({})",
                if report.universal { "yes" } else { "no" },
                parts.join("; ")
            );
        }
        OutputMode::Structured => {
            println!("command=check-universal");
            println!("group={}", group_tag(&g));
            for c in &report.checks {
                println!(
                    "prime.{}.formula={}",
                    c.prime,
                    rat_str(&c.formula_value)
                );
                println!("prime.{}.mass={}", c.prime, rat_str(&c.mass));
                println!(
                    "prime.{}.equal={}",
                    c.prime,
                    if c.equal { "yes" } else { "no" }
                );
            }
            println!(
                "universal={}",
                if report.universal { "yes" } else { "no" }
            );
        }
    }
    Ok(())
}

fn bound_note(b: &SearchBounds) -> String {
    let mut s = match b.source {
        BoundSource::Default => format!("default 2t-2 with t = {}", b.t),
        BoundSource::Override(v) => format!("override {v}"),
    };
    if b.heuristic {
        s.push_str("; heuristic, the order is not a prime power");
    }
    s
}

fn cmd_search(
    common: &Common,
    dopt: &DataOpt,
    bound_override: Option<u64>,
    allow_zero: bool,
    denom_bound: u64,
    jobs: usize,
) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let datasets = load_datasets(&g, dopt)?;
    let eqs = assemble(&g, &datasets)?;
    let b: Vec<SearchBounds> = eqs
        .iter()
        .map(|e| match bound_override {
            Some(v) => bounds_with_override(e, v),
            None => bounds(e),
        })
        .collect();
    let set = solve(&eqs, &b, !allow_zero, jobs.max(1))?;
    let recover = |sol: &[u64]| -> Result<String, Error> {
        let targets: Vec<i64> = sol.iter().map(|&v| v as i64).collect();
        let rec = weights_from_forms(&g, &targets, denom_bound, true)?;
        Ok(match (&rec.particular, &rec.nonnegative) {
            (None, _) => format!("weights: infeasible over denominators dividing {denom_bound}"),
            (Some(_), PositivityOutcome::Feasible(_)) => format!(
                "weights: feasible over denominators dividing {denom_bound} (nonnegative point exists; kernel dimension {})",
                rec.kernel.len()
            ),
            (Some(_), _) => format!(
                "weights: feasible over denominators dividing {denom_bound} (no nonnegative point; kernel dimension {})",
                rec.kernel.len()
            ),
        })
    };
    match common.output {
        OutputMode::Human => {
            for eq in &eqs {
                println!("equation at {}: {}", eq.prime, eq.render());
            }
            for (eq, b) in eqs.iter().zip(&b) {
                println!("bound at {}: {:?} ({})", eq.prime, b.per_var, bound_note(b));
            }
            println!(
                "solutions over ({}) with L >= {}: {}",
                eqs[0].var_names.join(","),
                if allow_zero { 0 } else { 1 },
                set.solutions.len()
            );
            for sol in &set.solutions {
                let nums: Vec<String> = sol.iter().map(|v| v.to_string()).collect();
                println!("({})", nums.join(","));
                println!("  {}", recover(sol)?);
            }
            println!("nodes visited: {}", set.nodes);
        }
        OutputMode::Structured => {
            println!("command=search");
            println!("group={}", group_tag(&g));
            for eq in &eqs {
                println!("equation.{}={}", eq.prime, eq.render());
            }
            println!("vars={}", eqs[0].var_names.join(","));
            let bstr: Vec<String> = set.bound_used.iter().map(|v| v.to_string()).collect();
            println!("bound={}", bstr.join(","));
            println!(
                "bound_source={}",
                match b[0].source {
                    BoundSource::Default => "default".to_string(),
                    BoundSource::Override(v) => format!("override:{v}"),
                }
            );
            println!("heuristic={}", if b[0].heuristic { "yes" } else { "no" });
            println!("positivity={}", if allow_zero { "no" } else { "yes" });
            println!("solutions={}", set.solutions.len());
            for (i, sol) in set.solutions.iter().enumerate() {
                let nums: Vec<String> = sol.iter().map(|v| v.to_string()).collect();
                println!("solution.{}={}", i + 1, nums.join(","));
                println!("recovery.{}={}", i + 1, recover(sol)?);
            }
            println!("nodes={}", set.nodes);
        }
    }
    Ok(())
}

fn render_weights(g: &FiniteGroup, w: &WeightFunction) -> String {
    let pairs = g.maximal_pairs();
    let mut out = String::new();
    for (i, pair) in pairs.iter().enumerate() {
        let _ = write!(out, "w({}) = {}; ", g.pair_string(pair), w.get(i));
    }
    out.trim_end_matches("; ").to_string()
}

fn cmd_weights_from_forms(
    common: &Common,
    targets: &[i64],
    denom_bound: u64,
    positive: bool,
) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let rec = weights_from_forms(&g, targets, denom_bound, positive)?;
    match common.output {
        OutputMode::Human => {
            let tstr: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
            println!("targets: ({})", tstr.join(","));
            println!("denominator bound: {denom_bound}");
            match &rec.particular {
                None => println!("feasible: no"),
                Some(w) => {
                    println!("feasible: yes");
                    println!("particular: {}", render_weights(&g, w));
                    println!("kernel dimension: {}", rec.kernel.len());
                    for k in &rec.kernel {
                        println!("kernel: {}", render_weights(&g, k));
                    }
                }
            }
            match &rec.nonnegative {
                PositivityOutcome::NotRequested => {}
                PositivityOutcome::Infeasible => println!("nonnegative: none exists"),
                PositivityOutcome::Feasible(w) => {
                    println!("nonnegative: {}", render_weights(&g, w))
                }
            }
        }
        OutputMode::Structured => {
            println!("command=weights-from-forms");
            println!("group={}", group_tag(&g));
            let tstr: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
            println!("targets={}", tstr.join(","));
            println!("denom_bound={denom_bound}");
            match &rec.particular {
                None => println!("feasible=no"),
                Some(w) => {
                    println!("feasible=yes");
                    let vals: Vec<String> = w.values().iter().map(rat_str).collect();
                    println!("particular={}", vals.join(","));
                    println!("kernel_dim={}", rec.kernel.len());
                    for (i, k) in rec.kernel.iter().enumerate() {
                        let vals: Vec<String> = k.values().iter().map(rat_str).collect();
                        println!("kernel.{}={}", i + 1, vals.join(","));
                    }
                }
            }
            match &rec.nonnegative {
                PositivityOutcome::NotRequested => {}
                PositivityOutcome::Infeasible => println!("nonnegative=none"),
                PositivityOutcome::Feasible(w) => {
                    let vals: Vec<String> = w.values().iter().map(rat_str).collect();
                    println!("nonnegative={}", vals.join(","));
                }
            }
        }
    }
    Ok(())
}

fn cmd_lattice_rank(common: &Common, dopt: &DataOpt) -> Result<(), Error> {
    let g = load_group(&common.group)?;
    let datasets = load_datasets(&g, dopt)?;
    let mut extra = Vec::new();
    for ds in &datasets {
        match &ds.kind {
            DatasetKind::Support(s) => extra.extend(support_forms(&g, s)?),
            _ => {
                return Err(Error::InvalidData(
                    "lattice-rank takes support datasets only; other kinds carry masses, not bare forms"
                        .into(),
                ))
            }
        }
    }
    let report = lattice_rank(&g, &extra);
    let divisors: Vec<String> = report.divisors.iter().map(|d| d.to_string()).collect();
    match common.output {
        OutputMode::Human => {
            println!("weight variables: {}", report.weight_vars);
            println!(
                "rows: {} ({} tame + {} extra)",
                report.rows,
                report.rows - extra.len(),
                extra.len()
            );
            println!("rank: {}", report.rank);
            println!("elementary divisors: {}", divisors.join(","));
        }
        OutputMode::Structured => {
            println!("command=lattice-rank");
            println!("group={}", group_tag(&g));
            println!("weight_vars={}", report.weight_vars);
            println!("rows={}", report.rows);
            println!("rank={}", report.rank);
            println!("divisors={}", divisors.join(","));
        }
    }
    Ok(())
}

fn cmd_oracle_verify(
    group: Option<&str>,
    max_prime: u64,
    output: OutputMode,
) -> Result<(), Error> {
    let groups: Vec<FiniteGroup> = match group {
        Some(spec) => vec![load_group(spec)?],
        None => builtin_names()
            .iter()
            .map(|n| builtin(n))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|g| g.order() <= 16)
            .collect(),
    };
    let primes: Vec<u64> = (2..max_prime)
        .filter(|&p| (2..p).all(|d| d * d > p || p % d != 0))
        .collect();
    let mut checks = 0u64;
    for g in &groups {
        let formula = tame_formula(g);
        for &p in primes.iter().filter(|&&p| !(g.order() as u64).is_multiple_of(p)) {
            for row in &formula.rows {
                let count = count_frobenius_pairs(g, p, &row.class)?;
                let sigma = row.coeff.eval(p)?;
                if count != sigma * g.order() as u64 {
                    println!(
                        "MISMATCH: {} at {p}, class {}: counted {count}, coefficient gives {}",
                        group_tag(g),
                        row.class.name,
                        sigma * g.order() as u64
                    );
                    return Err(Error::InvalidData(
                        "oracle disagreement; see the mismatch line above".into(),
                    ));
                }
                checks += 1;
            }
        }
    }
    match output {
        OutputMode::Human => println!(
            "verified {checks} class counts across {} groups and {} primes: all match",
            groups.len(),
            primes.len()
        ),
        OutputMode::Structured => {
            println!("command=oracle-verify");
            println!("groups={}", groups.len());
            println!("checks={checks}");
            println!("result=match");
        }
    }
    Ok(())
}

fn cmd_datasets(action: &DatasetsAction) -> Result<(), Error> {
    match action {
        DatasetsAction::List => {
            for name in embedded_names() {
                let ds = embedded(name)?;
                let kind = match ds.kind {
                    DatasetKind::Filtration(_) => "filtration",
                    DatasetKind::Profile(_) => "profile",
                    DatasetKind::Support(_) => "support",
                };
                println!(
                    "{name}\tgroup {}\tprime {}\tkind {kind}",
                    ds.group_name, ds.prime
                );
            }
        }
        DatasetsAction::Show { name } => {
            let ds = embedded(name)?;
            print!("{}", ds.source);
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::TameFormula { common, weights } => cmd_tame_formula(common, weights),
        Command::Mass {
            common,
            weights,
            data,
            prime,
        } => cmd_mass(common, weights, data, *prime),
        Command::CheckUniversal {
            common,
            weights,
            data,
        } => cmd_check_universal(common, weights, data),
        Command::Search {
            common,
            data,
            bound,
            allow_zero,
            denom_bound,
            jobs,
        } => cmd_search(common, data, *bound, *allow_zero, *denom_bound, *jobs),
        Command::WeightsFromForms {
            common,
            targets,
            denom_bound,
            positive,
        } => cmd_weights_from_forms(common, targets, *denom_bound, *positive),
        Command::LatticeRank { common, data } => cmd_lattice_rank(common, data),
        Command::OracleVerify {
            group,
            max_prime,
            output,
        } => cmd_oracle_verify(group.as_deref(), *max_prime, *output),
        Command::Datasets { action } => cmd_datasets(action),
    }
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (`massforms ... | head`) like other
    // line-oriented tools instead of panicking in println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::DataRequired { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
