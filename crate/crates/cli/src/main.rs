//! Batch command-line front end: Bell polynomial evaluation, convolution
//! powers and roots, inversion, compound distributions, savings tables and
//! curves, and instrumented count verification.
//!
//! Errors are reported as one-line JSON objects `{"code", "message"}` on
//! stderr; parse problems exit with status 2, domain errors with status 1.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bellcalc::bell::{bell_exp_alg91, Flavor};
use bellcalc::calculus::{
    compound_distribution, conv_power_via_bell, conv_root, invert_bell_exponential,
    invert_bell_ordinary,
};
use bellcalc::cost::{
    cost_q, cost_qprime, cost_qprime_n0, figure1_data, table1, write_csv, CostRow, TABLE1_KS,
    TABLE1_NS,
};
use bellcalc::factorized::{bell_exp_alg92, bell_exp_genal, bell_with, AlgorithmSelect};
use bellcalc::{Factorization, Rational, Sequence};

#[derive(Parser)]
#[command(name = "bellcalc", version, about = "Exact Bell polynomial calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Exp,
    Ord,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Exp => Flavor::Exponential,
            FlavorArg::Ord => Flavor::Ordinary,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Auto,
    #[value(name = "91")]
    Alg91,
    #[value(name = "92")]
    Alg92,
    Genal,
}

impl From<AlgorithmArg> for AlgorithmSelect {
    fn from(a: AlgorithmArg) -> AlgorithmSelect {
        match a {
            AlgorithmArg::Auto => AlgorithmSelect::Auto,
            AlgorithmArg::Alg91 => AlgorithmSelect::Alg91,
            AlgorithmArg::Alg92 => AlgorithmSelect::Alg92,
            AlgorithmArg::Genal => AlgorithmSelect::GenAl,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

/// Where the input sequence comes from: a named/inline spec or a JSON file.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SequenceInput {
    /// Named sequence (`ones`, `factorial`, `geometric:R`) or inline JSON
    /// `{"start": ..., "terms": ["p/q", ...]}`
    #[arg(long)]
    seq: Option<String>,
    /// Path to a JSON sequence document
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a partial Bell polynomial B_{n,k} or B̂_{n,k}
    Bell {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        input: SequenceInput,
        #[arg(long, value_enum, default_value_t = FlavorArg::Exp)]
        flavor: FlavorArg,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Convolution power x^{*k}, exact through --up-to
    ConvPower {
        #[arg(long)]
        k: u64,
        #[arg(long = "up-to", allow_hyphen_values = true)]
        up_to: i64,
        #[command(flatten)]
        input: SequenceInput,
        /// Evaluate through the Bell-polynomial route instead of repeated squaring
        #[arg(long)]
        via_bell: bool,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// K-th convolution root, exact through --up-to
    ConvRoot {
        #[arg(long)]
        k: u64,
        #[arg(long = "up-to", allow_hyphen_values = true)]
        up_to: i64,
        #[command(flatten)]
        input: SequenceInput,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Recover x from forward values y_n = B_{n,k}(x) or B̂_{n,k}(x)
    Invert {
        #[arg(long)]
        k: u64,
        #[arg(long = "up-to")]
        up_to: u64,
        #[command(flatten)]
        input: SequenceInput,
        #[arg(long, value_enum, default_value_t = FlavorArg::Ord)]
        flavor: FlavorArg,
        /// Leading term x_1 (recovered from y_k when omitted)
        #[arg(long)]
        x1: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// P(S_k = n) for a sum of k i.i.d. draws from a distribution on 1,2,...
    Compound {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        input: SequenceInput,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Savings percentages over an (n, k) grid, as CSV
    Table1 {
        /// Comma-separated first indexes (defaults to the published grid)
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u64>>,
        /// Comma-separated second indexes (defaults to the published grid)
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Savings curves at fixed k for several leading-zero counts, as CSV
    Figure1 {
        #[arg(long, default_value_t = 50)]
        k: u64,
        #[arg(long = "n-max", default_value_t = 2500)]
        n_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
        n0s: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the instrumented evaluators over a grid and compare counts
    Bench {
        /// Exit nonzero if any measured count differs from its prediction
        #[arg(long)]
        verify: bool,
        #[arg(long = "k-max", default_value_t = 10)]
        k_max: u64,
        #[arg(long = "n-max", default_value_t = 40)]
        n_max: u64,
        #[arg(long = "n0-max", default_value_t = 2)]
        n0_max: u64,
    },
}

struct CliError {
    code: &'static str,
    message: String,
    exit: u8,
}

impl CliError {
    fn parse(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
            exit: 2,
        }
    }
}

impl From<bellcalc::Error> for CliError {
    fn from(e: bellcalc::Error) -> Self {
        CliError {
            code: e.code(),
            message: e.to_string(),
            exit: 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "code": e.code, "message": e.message })
            );
            ExitCode::from(e.exit)
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    Rational::from_str(text)
        .map_err(|err| CliError::parse("BAD_RATIONAL", err.to_string()))
}

/// Parses a sequence document with distinct codes for JSON syntax errors,
/// shape errors, and bad rational terms.
fn parse_sequence_text(text: &str) -> Result<Sequence, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::parse("MALFORMED_JSON", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::parse("MISSING_FIELD", "expected a JSON object"))?;
    let start = obj
        .get("start")
        .and_then(|v| v.as_i64())
        .ok_or_else(|| CliError::parse("MISSING_FIELD", "missing integer field \"start\""))?;
    let terms_value = obj
        .get("terms")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::parse("MISSING_FIELD", "missing array field \"terms\""))?;
    let mut terms = Vec::with_capacity(terms_value.len());
    for item in terms_value {
        let text = item.as_str().ok_or_else(|| {
            CliError::parse(
                "BAD_RATIONAL",
                format!("term {item} is not a rational string"),
            )
        })?;
        terms.push(parse_rational(text)?);
    }
    Ok(Sequence::new(start, terms))
}

fn parse_sequence_file(path: &PathBuf) -> Result<Sequence, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::parse("IO_ERROR", format!("cannot read {}: {e}", path.display()))
    })?;
    parse_sequence_text(&text)
}

/// Materializes the requested sequence; named sequences are generated
/// through index `window`.
fn load_sequence(input: &SequenceInput, window: i64) -> Result<Sequence, CliError> {
    if let Some(path) = &input.input {
        return parse_sequence_file(path);
    }
    let spec = input.seq.as_deref().expect("clap enforces one source");
    if spec.trim_start().starts_with('{') {
        return parse_sequence_text(spec);
    }
    let len = window.max(1) as usize;
    match spec {
        "ones" => Ok(Sequence::ones(1, len as i64)),
        "factorial" => Ok(Sequence::new(
            1,
            (1..=len as u64)
                .map(|i| Rational::from(bellcalc::rational::factorial(i)))
                .collect(),
        )),
        _ => {
            if let Some(ratio_text) = spec.strip_prefix("geometric:") {
                let ratio = parse_rational(ratio_text)?;
                let mut terms = Vec::with_capacity(len);
                let mut current = Rational::one();
                for _ in 0..len {
                    terms.push(current.clone());
                    current *= &ratio;
                }
                Ok(Sequence::new(1, terms))
            } else {
                Err(CliError::parse(
                    "UNKNOWN_SEQUENCE",
                    format!("unknown sequence spec {spec:?}; use ones, factorial, geometric:R, inline JSON, or --in"),
                ))
            }
        }
    }
}

fn sequence_json(seq: &Sequence) -> String {
    serde_json::to_string(seq).expect("sequences serialize")
}

/// Writes to stdout, exiting quietly when the reader has gone away.
fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("stdout: {e}");
    }
}

fn print_sequence(seq: &Sequence, format: Format) {
    match format {
        Format::Csv => {
            println!("n,value");
            for (off, term) in seq.terms().iter().enumerate() {
                println!("{},{}", seq.start() + off as i64, term);
            }
        }
        _ => println!("{}", sequence_json(seq)),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Bell {
            n,
            k,
            input,
            flavor,
            algorithm,
            format,
        } => {
            let x = load_sequence(&input, n as i64)?;
            if x.leading_index().is_some_and(|lead| lead < 1) {
                return Err(CliError {
                    code: "DOMAIN_ERROR",
                    message: "Bell arguments must vanish below index 1".into(),
                    exit: 1,
                });
            }
            let result = bell_with(&x, n, k, flavor.into(), algorithm.into(), None)?;
            match format {
                Format::Plain | Format::Csv => println!("{}", result.value),
                Format::Json => {
                    let cost = result.cost.as_ref().map(|c| {
                        serde_json::json!({
                            "predicted": c.predicted,
                            "measured": c.measured,
                            "n0": c.n0,
                        })
                    });
                    println!(
                        "{}",
                        serde_json::json!({
                            "value": result.value.to_string(),
                            "n": result.n,
                            "k": result.k,
                            "flavor": result.flavor.to_string(),
                            "algorithm": result.algorithm.to_string(),
                            "cost": cost,
                        })
                    );
                }
            }
        }
        Command::ConvPower {
            k,
            up_to,
            input,
            via_bell,
            format,
        } => {
            let x = load_sequence(&input, up_to.max(1))?;
            let power = if via_bell {
                conv_power_via_bell(&x, k, up_to)
            } else {
                x.conv_power(k, up_to)
            };
            print_sequence(&power, format);
        }
        Command::ConvRoot {
            k,
            up_to,
            input,
            format,
        } => {
            if k == 0 {
                return Err(CliError::parse("BAD_ARGUMENT", "--k must be at least 1"));
            }
            let x = load_sequence(&input, up_to.max(1) + 1)?;
            let result = conv_root(&x, k, up_to)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "root": serde_json::to_value(&result.root).expect("serialize"),
                        "k": result.k,
                        "sign_pair": result.sign_pair,
                    })
                ),
                other => print_sequence(&result.root, other),
            }
        }
        Command::Invert {
            k,
            up_to,
            input,
            flavor,
            x1,
            format,
        } => {
            if k == 0 || up_to == 0 {
                return Err(CliError::parse(
                    "BAD_ARGUMENT",
                    "--k and --up-to must be at least 1",
                ));
            }
            let y = load_sequence(&input, (up_to + k) as i64)?;
            let x1 = x1.as_deref().map(parse_rational).transpose()?;
            let recovered = match Flavor::from(flavor) {
                Flavor::Ordinary => invert_bell_ordinary(&y, k, x1.as_ref(), up_to)?,
                Flavor::Exponential => invert_bell_exponential(&y, k, x1.as_ref(), up_to)?,
            };
            print_sequence(&recovered, format);
        }
        Command::Compound {
            k,
            n,
            input,
            format,
        } => {
            if k == 0 {
                return Err(CliError::parse("BAD_ARGUMENT", "--k must be at least 1"));
            }
            let p = load_sequence(&input, n as i64)?;
            let probability = compound_distribution(&p, k, n)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "probability": probability.to_string(),
                        "n": n,
                        "k": k,
                    })
                ),
                _ => println!("{probability}"),
            }
        }
        Command::Table1 { ns, ks, format } => {
            let ns = ns.unwrap_or_else(|| TABLE1_NS.to_vec());
            let ks = ks.unwrap_or_else(|| TABLE1_KS.to_vec());
            let rows = table1(&ns, &ks);
            emit_cost_rows(&rows, format, Some((&ns, &ks)));
        }
        Command::Figure1 {
            k,
            n_max,
            n0s,
            format,
        } => {
            if k < 2 {
                return Err(CliError::parse("BAD_ARGUMENT", "--k must be at least 2"));
            }
            let rows = figure1_data(k, n_max, &n0s);
            emit_cost_rows(&rows, format, None);
        }
        Command::Bench {
            verify,
            k_max,
            n_max,
            n0_max,
        } => {
            run_bench(verify, k_max, n_max, n0_max)?;
        }
    }
    Ok(())
}

fn emit_cost_rows(rows: &[CostRow], format: Format, grid: Option<(&[u64], &[u64])>) {
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            write_csv(rows, &mut out).expect("in-memory write");
            write_stdout(&String::from_utf8(out).expect("utf8"));
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "n": r.n,
                        "k": r.k,
                        "n0": r.n0,
                        "Q": r.q.to_string(),
                        "Qprime": r.qprime.to_string(),
                        "e_percent": r.e_percent.to_decimal_string(1),
                        "no_factorization": r.no_factorization,
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(items));
        }
        Format::Plain => {
            // grid rendering: k down the side, n across the top, blank for n < k
            let Some((ns, ks)) = grid else {
                for row in rows {
                    println!(
                        "n={} k={} n0={} Q={} Qprime={} e={}%",
                        row.n,
                        row.k,
                        row.n0,
                        row.q,
                        row.qprime,
                        row.e_percent.to_decimal_string(1)
                    );
                }
                return;
            };
            let mut header = String::from("k\\n");
            for n in ns {
                let _ = write!(header, "\t{n}");
            }
            println!("{header}");
            for &k in ks {
                let mut line = format!("{k}");
                for &n in ns {
                    if n < k {
                        line.push('\t');
                    } else {
                        let row = rows
                            .iter()
                            .find(|r| r.n == n && r.k == k)
                            .expect("row present for n >= k");
                        let flag = if row.no_factorization { " (prime)" } else { "" };
                        let _ = write!(line, "\t{}%{}", row.e_percent.to_decimal_string(1), flag);
                    }
                }
                println!("{line}");
            }
        }
    }
}

fn run_bench(verify: bool, k_max: u64, n_max: u64, n0_max: u64) -> Result<(), CliError> {
    let started = Instant::now();
    let mut mismatches = 0u64;
    let mut runs = 0u64;
    write_stdout("algorithm,n,k,n0,predicted,measured,match\n");

    let record = |name: &str, n: u64, k: u64, n0: u64, predicted: u64, measured: u64| {
        let ok = predicted == measured;
        write_stdout(&format!("{name},{n},{k},{n0},{predicted},{measured},{ok}\n"));
        ok
    };

    for k in 2..=k_max {
        let f = Factorization::of_primes(k).expect("k >= 2");
        for n in k..=n_max {
            let x = Sequence::ones(1, n as i64);
            runs += 2;

            let r = bell_exp_alg91(&x, n, k, None);
            let measured = r.cost.as_ref().and_then(|c| c.measured).unwrap_or(0);
            let predicted = u64::try_from(cost_q(n, k)).expect("fits");
            if !record("alg91", n, k, 0, predicted, measured) {
                mismatches += 1;
            }

            let r = bell_exp_alg92(&x, n, k, &f, None)?;
            let measured = r.cost.as_ref().and_then(|c| c.measured).unwrap_or(0);
            let predicted = u64::try_from(cost_qprime(n, &f)).expect("fits");
            if !record("alg92", n, k, 0, predicted, measured) {
                mismatches += 1;
            }

            for n0 in 0..=n0_max {
                if n < k * n0 || n - k * n0 < k {
                    continue;
                }
                runs += 1;
                let arg = Sequence::ones(n0 as i64 + 1, n as i64);
                let r = bell_exp_genal(&arg, n, k, None);
                let measured = r.cost.as_ref().and_then(|c| c.measured).unwrap_or(0);
                let predicted = u64::try_from(cost_qprime_n0(n, &f, n0)).expect("fits");
                if !record("genal", n, k, n0, predicted, measured) {
                    mismatches += 1;
                }
            }
        }
    }

    eprintln!(
        "bench: {runs} instrumented runs, {mismatches} mismatches, {:?} elapsed",
        started.elapsed()
    );
    if verify && mismatches > 0 {
        return Err(CliError {
            code: "COUNT_MISMATCH",
            message: format!("{mismatches} measured counts deviate from the predictions"),
            exit: 1,
        });
    }
    Ok(())
}
