//! Argument model and command handlers for the `renyicap` binary.
//!
//! Every command renders its result into a string; `main` writes it to stdout
//! or to `--out`. Outputs depend only on the verb, the input files and the
//! flags, so repeated invocations are byte-identical.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use renyicap::capacity::{alpha_holevo, c_constant_at, holevo_capacity, info_radius, info_radius_around};
use renyicap::channels::{completely_depolarizing, depolarizing, pinching, EbVerdict, KrausChannel};
use renyicap::converse::{eb_exponent_bound, generic_bound, simulate_code, sqrt_n_bound, weak_converse_rate};
use renyicap::divergences::{min_output_renyi, renyi_d, sandwiched_d, vn_relative_entropy};
use renyicap::io::{
    bound_report_to_json, density_to_json, ensemble_to_json, num, parse_channel, parse_code_spec, parse_density,
    read_text, to_pretty,
};
use renyicap::linalg::Mat;
use renyicap::optimize::OptimizerConfig;
use renyicap::verify::{run_suite, Suite};
use renyicap::Error;

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_REGIME: u8 = 4;
pub const EXIT_NUMERICAL: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "renyicap", version, about = "Sandwiched Rényi divergences, channel capacities and strong-converse bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every verb.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "RENYICAP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Random restarts per pure-state search.
    #[arg(long, global = true, default_value_t = 8)]
    pub restarts: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; sweeps default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Parameter of builtin channels (depolarizing probability).
    #[arg(long, global = true, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Sandwiched,
    Traditional,
    Vn,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Generic,
    Eb,
    Sqrtn,
    Weak,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Radius,
    Holevo,
    MinOutputEntropy,
}

/// Channel arguments accept a JSON file or `builtin:NAME[:DIM]` with NAME one
/// of identity, depolarizing, completely-depolarizing, pinching.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Divergence between two density matrices.
    Divergence {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Kind::Sandwiched)]
        kind: Kind,
    },
    /// α-information radius, minimax or around a fixed σ.
    Radius {
        channel: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Density matrix to centre the radius on.
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// Holevo capacity, c(N), and the α-Holevo information with its ensemble.
    Capacity {
        channel: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
    },
    /// Success-probability bound for n uses at the given rate.
    Bound {
        channel: String,
        #[arg(long, value_enum, default_value_t = Variant::Generic)]
        variant: Variant,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Used by the generic variant.
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Target error for the weak variant.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Exact PGM success probabilities of random codebooks.
    Simulate {
        channel: String,
        /// Code spec JSON: {"n", "R", "ensemble", "seed"}.
        code: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// One quantity across a list of α values.
    Sweep {
        channel: String,
        #[arg(long, value_delimiter = ',', default_value = "1.1,1.25,1.5,1.75,2")]
        alphas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Quantity::Radius)]
        quantity: Quantity,
    },
    /// Seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Extra channels added to the channel and lemma corpora.
        #[arg(long = "channel")]
        channels: Vec<PathBuf>,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Output to emit anyway (a failing verify report).
    pub output: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Domain(_) => EXIT_PARSE,
            Error::Regime(_) | Error::Unbounded(_) => EXIT_REGIME,
            Error::EigenNonConvergence(_) | Error::Construction(_) => EXIT_NUMERICAL,
            _ => EXIT_INVARIANT,
        };
        Failure {
            code,
            message: e.to_string(),
            output: None,
        }
    }
}

pub type CmdResult = std::result::Result<String, Failure>;

impl Cli {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.common.restarts,
            seed: self.common.seed,
            ..OptimizerConfig::default()
        }
    }

    fn format(&self) -> Format {
        self.common.format.unwrap_or(match self.command {
            Command::Sweep { .. } => Format::Csv,
            _ => Format::Json,
        })
    }
}

/// Runs the parsed command and renders its output.
pub fn execute(cli: &Cli) -> CmdResult {
    let cfg = cli.optimizer();
    cfg.validate()?;
    let fmt = cli.format();
    match &cli.command {
        Command::Divergence { a, b, alpha, kind } => render(divergence(a, b, *alpha, *kind)?, fmt),
        Command::Radius { channel, alpha, sigma } => {
            let ch = load_channel(channel, cli.common.p)?;
            let r = match sigma {
                Some(path) => info_radius_around(&ch, &parse_density(&read_text(path)?)?, *alpha, &cfg)?,
                None => info_radius(&ch, *alpha, &cfg)?,
            };
            render(
                json!({
                    "alpha": num(*alpha),
                    "value_bits": num(r.value),
                    "converged": r.converged,
                    "restarts_used": r.restarts_used,
                    "gap_estimate": num(r.gap_estimate),
                    "sigma_star": density_to_json(&r.sigma_star),
                    "worst_input": density_to_json(&r.worst_input),
                }),
                fmt,
            )
        }
        Command::Capacity { channel, alpha } => {
            let ch = load_channel(channel, cli.common.p)?;
            let cap = holevo_capacity(&ch, &cfg)?;
            let c = match c_constant_at(&ch, &cap.sigma_star, &cfg) {
                Ok(c) => num(c.value),
                Err(Error::Unbounded(_)) => num(f64::INFINITY),
                Err(e) => return Err(e.into()),
            };
            let h = alpha_holevo(&ch, *alpha, &cfg)?;
            render(
                json!({
                    "chi_bits": num(cap.value),
                    "chi_converged": cap.converged,
                    "sigma_star": density_to_json(&cap.sigma_star),
                    "c": c,
                    "alpha": num(*alpha),
                    "chi_alpha_bits": num(h.value),
                    "chi_alpha_converged": h.converged,
                    "ensemble": serde_json::to_value(ensemble_to_json(&h.ensemble)).expect("serializable"),
                }),
                fmt,
            )
        }
        Command::Bound {
            channel,
            variant,
            n,
            rate,
            alpha,
            eps,
        } => {
            let ch = load_channel(channel, cli.common.p)?;
            render(bound(&ch, *variant, *n, *rate, *alpha, *eps, &cfg)?, fmt)
        }
        Command::Simulate { channel, code, trials } => {
            let ch = load_channel(channel, cli.common.p)?;
            let spec = parse_code_spec(&read_text(code)?)?;
            let sim = simulate_code(&ch, &spec, *trials)?;
            render(
                json!({
                    "n": spec.n,
                    "rate": num(spec.rate),
                    "message_count": sim.message_count,
                    "effective_rate": num(sim.effective_rate),
                    "trials": trials,
                    "p_succ_hat": num(sim.p_succ_hat),
                    "stderr": num(sim.stderr),
                    "per_codebook": sim.per_codebook.iter().map(|x| num(*x)).collect::<Vec<_>>(),
                }),
                fmt,
            )
        }
        Command::Sweep {
            channel,
            alphas,
            quantity,
        } => {
            let ch = load_channel(channel, cli.common.p)?;
            sweep(&ch, alphas, *quantity, &cfg, fmt)
        }
        Command::Verify { suite, channels } => {
            let suite: Suite = suite.parse()?;
            let extra = channels
                .iter()
                .map(|p| parse_channel(&read_text(p)?))
                .collect::<renyicap::Result<Vec<_>>>()?;
            let report = run_suite(suite, cli.common.seed, &extra)?;
            let text = match fmt {
                Format::Json => to_pretty(&report.to_json()),
                Format::Csv => csv_table(
                    &["suite", "name", "samples", "tolerance", "worst_observed", "pass"],
                    report.properties.iter().map(|p| {
                        vec![
                            p.suite.clone(),
                            p.name.clone(),
                            p.samples.to_string(),
                            p.tolerance.to_string(),
                            p.worst_observed.to_string(),
                            p.pass.to_string(),
                        ]
                    }),
                ),
            };
            if report.passed() {
                Ok(text)
            } else {
                let names: Vec<_> = report.failures().map(|p| p.name.as_str()).collect();
                Err(Failure {
                    code: EXIT_VERIFY_FAILED,
                    message: format!("property violations: {}", names.join(", ")),
                    output: Some(text),
                })
            }
        }
    }
}

/// Parses arguments, runs, writes output and maps failures to exit codes.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let (text, code) = match execute(&cli) {
        Ok(t) => (Some(t), 0),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.output, f.code)
        }
    };
    if let Some(text) = text {
        let written = match &cli.common.out {
            Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        };
        if let Err(msg) = written {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_PARSE);
        }
    }
    ExitCode::from(code)
}

/// Reads a channel file or builds a builtin channel.
pub fn load_channel(spec: &str, p: f64) -> renyicap::Result<KrausChannel> {
    let Some(rest) = spec.strip_prefix("builtin:") else {
        return parse_channel(&read_text(Path::new(spec))?);
    };
    let (name, dim) = match rest.split_once(':') {
        Some((n, d)) => (
            n,
            d.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension in \"{spec}\"")))?,
        ),
        None => (rest, 2),
    };
    match name {
        "identity" => Ok(KrausChannel::identity(dim)),
        "depolarizing" => depolarizing(dim, p),
        "completely-depolarizing" => Ok(completely_depolarizing(dim)),
        "pinching" => pinching(&Mat::identity(dim, dim)),
        _ => Err(Error::Parse(format!("unknown builtin channel \"{name}\""))),
    }
}

fn divergence(a: &Path, b: &Path, alpha: f64, kind: Kind) -> renyicap::Result<Value> {
    let ra = parse_density(&read_text(a)?)?;
    let rb = parse_density(&read_text(b)?)?;
    let (v, kind_name, alpha_out) = match kind {
        Kind::Sandwiched => (sandwiched_d(ra.op(), rb.op(), alpha)?, "sandwiched", num(alpha)),
        Kind::Traditional => (renyi_d(ra.op(), rb.op(), alpha)?, "traditional", num(alpha)),
        Kind::Vn => (vn_relative_entropy(ra.op(), rb.op())?, "vn", num(1.0)),
    };
    Ok(json!({
        "value_bits": num(v.value),
        "support_ok": v.support_ok,
        "kind": kind_name,
        "alpha": alpha_out,
    }))
}

fn bound(
    ch: &KrausChannel,
    variant: Variant,
    n: usize,
    rate: f64,
    alpha: f64,
    eps: f64,
    cfg: &OptimizerConfig,
) -> renyicap::Result<Value> {
    // n-fold quantities are taken as n times the single-copy value; that is
    // exact for EB channels and otherwise flagged.
    let additive = ch.eb_verdict()? == EbVerdict::Yes;
    let mut v = match variant {
        Variant::Generic => {
            let chi_alpha = alpha_holevo(ch, alpha, cfg)?.value.max(info_radius(ch, alpha, cfg)?.value);
            bound_report_to_json(&generic_bound(n, rate, n as f64 * chi_alpha, alpha)?)
        }
        Variant::Eb => bound_report_to_json(&eb_exponent_bound(ch, n, rate, cfg)?),
        Variant::Sqrtn => bound_report_to_json(&sqrt_n_bound(ch, n, rate, cfg)?),
        Variant::Weak => {
            let chi = holevo_capacity(ch, cfg)?.value;
            let chi_total = n as f64 * chi;
            json!({
                "variant": "weak",
                "n": n,
                "eps": num(eps),
                "chi": num(chi),
                "chi_total": num(chi_total),
                "rate_max": num(weak_converse_rate(n, eps, chi_total)?),
                "flags": [],
            })
        }
    };
    if !additive && matches!(variant, Variant::Generic | Variant::Weak) {
        if let Some(flags) = v.get_mut("flags").and_then(Value::as_array_mut) {
            flags.push(json!("additivity_assumed"));
        }
    }
    Ok(v)
}

fn sweep(ch: &KrausChannel, alphas: &[f64], quantity: Quantity, cfg: &OptimizerConfig, fmt: Format) -> CmdResult {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let (value, converged, restarts) = match quantity {
            Quantity::Radius => {
                let r = info_radius(ch, alpha, cfg)?;
                (r.value, r.converged, r.restarts_used)
            }
            Quantity::Holevo => {
                let h = alpha_holevo(ch, alpha, cfg)?;
                (h.value, h.converged, cfg.restarts)
            }
            Quantity::MinOutputEntropy => {
                let m = min_output_renyi(ch, alpha, cfg)?;
                (m.value, m.search.converged, m.search.restarts_used)
            }
        };
        rows.push((alpha, value, converged, restarts));
    }
    Ok(match fmt {
        Format::Csv => csv_table(
            &["alpha", "value_bits", "converged", "restarts_used"],
            rows.into_iter()
                .map(|(a, v, c, r)| vec![a.to_string(), v.to_string(), c.to_string(), r.to_string()]),
        ),
        Format::Json => to_pretty(&Value::Array(
            rows.into_iter()
                .map(|(a, v, c, r)| json!({"alpha": num(a), "value_bits": num(v), "converged": c, "restarts_used": r}))
                .collect(),
        )),
    })
}

/// JSON is pretty-printed; CSV flattens the top-level scalar fields into a
/// header and one row.
fn render(v: Value, fmt: Format) -> CmdResult {
    Ok(match fmt {
        Format::Json => to_pretty(&v),
        Format::Csv => {
            let empty = Map::new();
            let obj = v.as_object().unwrap_or(&empty);
            let scalars: Vec<(&String, String)> = obj
                .iter()
                .filter_map(|(k, x)| match x {
                    Value::String(s) => Some((k, s.clone())),
                    Value::Number(_) | Value::Bool(_) => Some((k, x.to_string())),
                    _ => None,
                })
                .collect();
            let header: Vec<&str> = scalars.iter().map(|(k, _)| k.as_str()).collect();
            let row: Vec<String> = scalars.into_iter().map(|(_, x)| x).collect();
            csv_table(&header, std::iter::once(row))
        }
    })
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
