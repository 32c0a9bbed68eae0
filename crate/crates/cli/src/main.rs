//! `ordapprox` command-line front end.
//!
//! Exit status: 0 on success, 1 on a validation or precondition failure,
//! 2 on an I/O or parse error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use ordapprox::io::{self, FamilyDoc, FormatError};
use ordapprox::rational::{self, Rational};
use ordapprox::verify::{run_suite, SuiteConfig};
use ordapprox::{
    certify, funcspace, ApproxReport, ConeExpr, ConstructError, Constructor, ElementSet, Family,
    GroundFunction, Poset, RampProvider,
};

#[derive(Parser)]
#[command(
    name = "ordapprox",
    version,
    about = "Certified approximation of isotone functions on finite posets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a poset file and check it is a partial order.
    Validate { poset: PathBuf },
    /// Write the family of principal upset indicators.
    GenUpsets {
        poset: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check whether a family generates the order of a poset.
    CheckGenerates { poset: PathBuf, family: PathBuf },
    /// Build a function that is 0 on one set and 1 on another.
    Separate {
        poset: PathBuf,
        family: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        zero_on: Vec<usize>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        one_on: Vec<usize>,
        #[arg(long, default_value = "pl")]
        provider: RampProvider,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximate a target function to within eps, or with n levels.
    #[command(group(ArgGroup::new("accuracy").required(true).args(["eps", "n"])))]
    Approximate {
        poset: PathBuf,
        family: PathBuf,
        target: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        eps: Option<Rational>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "pl")]
        provider: RampProvider,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replay an expression or report file against a family.
    Replay {
        poset: PathBuf,
        family: PathBuf,
        file: PathBuf,
    },
    /// Run the randomized verification suite and print its JSON report.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 30)]
        max_size: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        n_list: Vec<usize>,
        #[arg(long, default_value = "pl")]
        provider: RampProvider,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } | FormatError::Json { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<funcspace::FuncError> for Failure {
    fn from(e: funcspace::FuncError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { poset } => cmd_validate(&poset),
        Command::GenUpsets { poset, output } => cmd_gen_upsets(&poset, &output),
        Command::CheckGenerates { poset, family } => cmd_check_generates(&poset, &family),
        Command::Separate {
            poset,
            family,
            zero_on,
            one_on,
            provider,
            output,
        } => cmd_separate(
            &poset,
            &family,
            &zero_on,
            &one_on,
            provider,
            output.as_deref(),
        ),
        Command::Approximate {
            poset,
            family,
            target,
            eps,
            n,
            provider,
            output,
        } => cmd_approximate(
            &poset,
            &family,
            &target,
            eps,
            n,
            provider,
            output.as_deref(),
        ),
        Command::Replay {
            poset,
            family,
            file,
        } => cmd_replay(&poset, &family, &file),
        Command::Verify {
            seed,
            trials,
            max_size,
            n_list,
            provider,
            output,
        } => {
            let cfg = SuiteConfig {
                seed,
                trials,
                max_poset_size: max_size,
                n_values: n_list,
                provider,
                ..SuiteConfig::default()
            };
            cmd_verify(&cfg, output.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_pair(poset: &Path, family: &Path) -> Result<(Poset, Family), Failure> {
    let p = io::load_poset(poset)?;
    let s = io::load_family(family, &p)?;
    Ok((p, s))
}

fn cmd_validate(poset: &Path) -> CmdResult {
    let p = io::load_poset(poset)?;
    println!(
        "ok: {} elements, {} related pairs",
        p.len(),
        p.relation_size()
    );
    Ok(())
}

fn cmd_gen_upsets(poset: &Path, output: &Path) -> CmdResult {
    let p = io::load_poset(poset)?;
    let s = funcspace::upset_generators(&p);
    io::write_json(
        output,
        &FamilyDoc::from_family(poset.display().to_string(), &s),
    )?;
    println!("wrote {} upset indicators to {}", s.len(), output.display());
    Ok(())
}

fn cmd_check_generates(poset: &Path, family: &Path) -> CmdResult {
    let (p, s) = load_pair(poset, family)?;
    match funcspace::generates(&p, &s)? {
        None => {
            println!("true");
            Ok(())
        }
        Some(w) => {
            println!("false");
            println!(
                "witness: {} ⋠ {} but every member has f({}) <= f({})",
                p.label(w.a),
                p.label(w.b),
                p.label(w.a),
                p.label(w.b)
            );
            Err(Failure::Invalid(format!(
                "family does not generate the order: {w}"
            )))
        }
    }
}

fn print_table(p: &Poset, values: &GroundFunction) {
    for (m, v) in values.values().iter().enumerate() {
        println!("  {}\t{}", p.label(m), rational::format(v));
    }
}

fn cmd_separate(
    poset: &Path,
    family: &Path,
    zero_on: &[usize],
    one_on: &[usize],
    provider: RampProvider,
    output: Option<&Path>,
) -> CmdResult {
    let (p, s) = load_pair(poset, family)?;
    let k_set: ElementSet = zero_on.iter().copied().collect();
    let l_set: ElementSet = one_on.iter().copied().collect();
    let ctor = Constructor::new(&p, &s, provider)?;
    let sep = ctor.separate_sets(&k_set, &l_set)?;
    certify(&p, &s, &sep.result.expr, &sep.result.values)
        .map_err(|e| Failure::Invalid(format!("certificate replay failed: {e}")))?;
    if let Some(out) = output {
        io::write_json(out, &sep.result.expr)?;
    }
    println!(
        "separator: k = {:?}, l = {}, certificate nodes = {}",
        sep.stages.iter().map(|st| st.k()).collect::<Vec<_>>(),
        sep.l(),
        sep.result.expr.node_count()
    );
    print_table(&p, &sep.result.values);
    Ok(())
}

fn cmd_approximate(
    poset: &Path,
    family: &Path,
    target: &Path,
    eps: Option<Rational>,
    n: Option<usize>,
    provider: RampProvider,
    output: Option<&Path>,
) -> CmdResult {
    let (p, s) = load_pair(poset, family)?;
    let f = io::load_function(target, &p)?;
    let ctor = Constructor::new(&p, &s, provider)?;
    let report = match (eps, n) {
        (Some(eps), _) => ctor.approximate(&f, &eps)?,
        (None, Some(n)) => ctor.approximate_normalized(&f, n)?,
        (None, None) => unreachable!("clap requires one of --eps and --n"),
    };
    certify(&p, &s, &report.f_expr, &report.f_values)
        .map_err(|e| Failure::Invalid(format!("certificate replay failed: {e}")))?;
    if let Some(out) = output {
        io::write_json(out, &report)?;
    }
    println!("n = {}", report.n);
    println!("bound = {}", rational::format(&report.bound));
    println!("error = {}", rational::format(&report.error));
    println!("certificate nodes = {}", report.f_expr.node_count());
    print_table(&p, &report.f_values);
    Ok(())
}

fn cmd_replay(poset: &Path, family: &Path, file: &Path) -> CmdResult {
    let (p, s) = load_pair(poset, family)?;
    let doc: serde_json::Value = io::read_json(file)?;
    let json_err = |e: serde_json::Error| Failure::Io(format!("{}: {e}", file.display()));
    if doc.get("F").is_some() {
        let report: ApproxReport = serde_json::from_value(doc).map_err(json_err)?;
        report
            .f_expr
            .validate(&s)
            .map_err(|e| Failure::Invalid(e.to_string()))?;
        certify(&p, &s, &report.f_expr, &report.f_values)
            .map_err(|e| Failure::Invalid(format!("certificate replay failed: {e}")))?;
        let error = funcspace::sup_dist(&report.target, &report.f_values)?;
        if error != report.error || error > report.bound {
            return Err(Failure::Invalid(format!(
                "reported error {} does not match recomputed {} within bound {}",
                report.error, error, report.bound
            )));
        }
        println!("report replays: error = {error}, bound = {}", report.bound);
        Ok(())
    } else {
        let e: ConeExpr = serde_json::from_value(doc).map_err(json_err)?;
        e.validate(&s)
            .map_err(|e| Failure::Invalid(e.to_string()))?;
        let values = e.eval(&s).map_err(|e| Failure::Invalid(e.to_string()))?;
        if !funcspace::is_isotone(&p, &values) {
            return Err(Failure::Invalid("expression is not isotone".into()));
        }
        println!("expression replays ({} nodes):", e.node_count());
        print_table(&p, &values);
        Ok(())
    }
}

fn cmd_verify(cfg: &SuiteConfig, output: Option<&Path>) -> CmdResult {
    cfg.check().map_err(Failure::Invalid)?;
    let outcome = run_suite(cfg);
    let text = io::to_json(&outcome);
    print!("{text}");
    if let Some(out) = output {
        io::write_json(out, &outcome)?;
    }
    eprintln!(
        "{} trials, {} failures, max error·n = {}",
        outcome.trials_run,
        outcome.failures.len(),
        rational::format(&outcome.max_observed_error_ratio)
    );
    if outcome.passed {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "{} property failures",
            outcome.failures.len()
        )))
    }
}
