use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use resilient_obdd::bench::{
    format_stats_table, output_diagrams, run_campaign, stats, verify, write_campaign_csv,
    write_stats_csv, write_stats_json, CampaignConfig, CampaignMode, CampaignRow, VerifyOptions,
};
use resilient_obdd::dot::export_dot_named;
use resilient_obdd::{parse_pla, DcPolicy, PlaFile};

const OK: u8 = 0;
const CHECK_FAILED: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "resilient-obdd",
    version,
    about = "Index-resilient OBDD statistics, verification and fault campaigns"
)]
struct Cli {
    /// Don't-care resolution when building each output.
    #[arg(long, value_enum, default_value_t = Policy::Zero, global = true)]
    dc_policy: Policy,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Zero,
    One,
}

impl From<Policy> for DcPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Zero => DcPolicy::Zero,
            Policy::One => DcPolicy::One,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    IndexUt,
    IndexIr,
    Edge,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Ro,
    Qr,
    Ir,
}

#[derive(Subcommand)]
enum Command {
    /// Node counts of the QR, RO and IR diagrams, summed over outputs.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Exit with failure when a row with published counts differs from
        /// them.
        #[arg(long)]
        require_reference: bool,
    },
    /// Exhaustive semantic and structural checks of every output.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Largest input count checked against the cube oracle.
        #[arg(long, default_value_t = 20)]
        max_inputs: usize,
    },
    /// Fault campaigns; CSV on stdout, summary on stderr.
    InjectRecover {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "RESILIENT_OBDD_SEED", default_value_t = 1)]
        seed: u64,
        /// Unique-table bucket count; repeatable.
        #[arg(long = "table-size", value_parser = clap::value_parser!(u64).range(1..))]
        table_sizes: Vec<u64>,
        /// Edge mode: report ambiguity instead of taking the first match.
        #[arg(long)]
        strict: bool,
        /// Index faults per trial in index-ir mode.
        #[arg(long, default_value_t = 1)]
        faults: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Graphviz rendering of one output.
    ExportDot {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        output: usize,
        #[arg(long, value_enum, default_value_t = Form::Ir)]
        form: Form,
    },
}

/// Input problems map to the usage exit code; everything else is a failed
/// check.
enum Failure {
    Usage(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn load(path: &Path) -> Result<(String, PlaFile)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let pla = parse_pla(&text).with_context(|| format!("{}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok((name, pla))
}

fn cmd_stats(
    files: &[PathBuf],
    policy: DcPolicy,
    format: Format,
    strict: bool,
) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for f in files {
        let (name, pla) = load(f)?;
        rows.push(stats(&name, &pla, policy).map_err(anyhow::Error::from)?);
    }
    let stdout = io::stdout();
    match format {
        Format::Text => print!("{}", format_stats_table(&rows)),
        Format::Csv => write_stats_csv(&rows, stdout.lock()).map_err(anyhow::Error::from)?,
        Format::Json => {
            write_stats_json(&rows, stdout.lock()).map_err(anyhow::Error::from)?;
            println!();
        }
    }
    let mut problems = Vec::new();
    for r in &rows {
        let bad = r.sandwich_violations();
        if !bad.is_empty() {
            problems.push(format!(
                "{}: ro <= ir <= qr fails on outputs {bad:?}",
                r.benchmark
            ));
        }
        if let Some(d) = r.delta().filter(|d| !d.is_zero()) {
            log::warn!(
                "{}: differs from published counts (qr {:+}, ro {:+}, ir {:+})",
                r.benchmark,
                d.qr,
                d.ro,
                d.ir
            );
            if strict {
                problems.push(format!("{}: published counts not matched", r.benchmark));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("\n")))
    }
}

fn cmd_verify(files: &[PathBuf], policy: DcPolicy, max_inputs: usize) -> Result<(), Failure> {
    let opts = VerifyOptions {
        policy,
        max_exhaustive_inputs: max_inputs,
    };
    let mut failed = 0;
    for f in files {
        let (name, pla) = load(f)?;
        let r = verify(&pla, opts).map_err(anyhow::Error::from)?;
        let status = if r.ok() { "ok" } else { "FAILED" };
        print!("{name}: {} outputs, {status}", r.outputs);
        if r.semantic_skipped > 0 {
            print!(
                " ({} outputs too wide for the exhaustive check)",
                r.semantic_skipped
            );
        }
        println!();
        for v in &r.violations {
            println!("  output {}: {}", v.output, v.check);
        }
        failed += r.violations.len();
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} violations")))
    }
}

fn summarize(rows: &[CampaignRow], mode: Mode) -> Vec<String> {
    let mut problems = Vec::new();
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.table_size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut benches: Vec<&str> = rows.iter().map(|r| r.benchmark.as_str()).collect();
    benches.dedup();
    for b in benches {
        let mut previous: Option<f64> = None;
        for &s in &sizes {
            let (t, ok, amb) = rows
                .iter()
                .filter(|r| r.benchmark == b && r.table_size == s)
                .fold((0, 0, 0), |(t, ok, a), r| {
                    (t + r.trials, ok + r.successes, a + r.ambiguous)
                });
            if t == 0 {
                continue;
            }
            let rate = ok as f64 / t as f64;
            let table = if s == 0 {
                "no table".to_string()
            } else {
                format!("table {s:>6}")
            };
            eprintln!(
                "{b:<12} {table}: {ok}/{t} recovered ({:.2}%), {amb} ambiguous",
                100.0 * rate
            );
            match mode {
                Mode::Edge => {
                    if previous.is_some_and(|p| rate < p) {
                        log::warn!("{b}: success rate drops at table size {s}");
                    }
                    previous = Some(rate);
                }
                Mode::IndexUt | Mode::IndexIr => {
                    if ok != t {
                        problems.push(format!("{b}: {} of {t} recoveries failed", t - ok));
                    }
                }
            }
        }
    }
    problems
}

#[allow(clippy::too_many_arguments)]
fn cmd_inject(
    files: &[PathBuf],
    policy: DcPolicy,
    mode: Mode,
    trials: usize,
    seed: u64,
    table_sizes: Vec<u64>,
    strict: bool,
    faults: usize,
    csv: Option<PathBuf>,
) -> Result<(), Failure> {
    let table_sizes: Vec<usize> = if table_sizes.is_empty() {
        match mode {
            Mode::Edge => vec![256, 1024, 2048],
            _ => vec![256],
        }
    } else {
        table_sizes.into_iter().map(|s| s as usize).collect()
    };
    let cfg = CampaignConfig {
        mode: match mode {
            Mode::IndexUt => CampaignMode::IndexUt,
            Mode::IndexIr => CampaignMode::IndexIr,
            Mode::Edge => CampaignMode::Edge,
        },
        trials,
        seed,
        table_sizes,
        strict,
        faults,
        policy,
    };
    let mut rows = Vec::new();
    for f in files {
        let (name, pla) = load(f)?;
        rows.extend(run_campaign(&name, &pla, &cfg).map_err(anyhow::Error::from)?);
    }
    match csv {
        Some(path) => {
            let file = fs::File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            write_campaign_csv(&rows, file).map_err(anyhow::Error::from)?;
        }
        None => write_campaign_csv(&rows, io::stdout().lock()).map_err(anyhow::Error::from)?,
    }
    let problems = summarize(&rows, mode);
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("\n")))
    }
}

fn cmd_dot(file: &Path, policy: DcPolicy, output: usize, form: Form) -> Result<(), Failure> {
    let (_, pla) = load(file)?;
    if output >= pla.num_outputs {
        return Err(Failure::Usage(anyhow::anyhow!(
            "output {output} out of range, {} has {} outputs",
            file.display(),
            pla.num_outputs
        )));
    }
    let d = output_diagrams(&pla, output, policy).map_err(anyhow::Error::from)?;
    let d = match form {
        Form::Ro => d.ro,
        Form::Qr => d.qr,
        Form::Ir => d.ir,
    };
    let labels = pla.input_labels.clone();
    let dot = export_dot_named(&d, |l| {
        labels
            .get(l as usize)
            .cloned()
            .unwrap_or_else(|| format!("x{l}"))
    });
    io::stdout()
        .write_all(dot.as_bytes())
        .map_err(anyhow::Error::from)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let policy = cli.dc_policy.into();
    let result = match cli.command {
        Command::Stats {
            files,
            format,
            require_reference,
        } => cmd_stats(&files, policy, format, require_reference),
        Command::Verify { files, max_inputs } => cmd_verify(&files, policy, max_inputs),
        Command::InjectRecover {
            files,
            mode,
            trials,
            seed,
            table_sizes,
            strict,
            faults,
            csv,
        } => cmd_inject(
            &files,
            policy,
            mode,
            trials,
            seed,
            table_sizes,
            strict,
            faults,
            csv,
        ),
        Command::ExportDot { file, output, form } => cmd_dot(&file, policy, output, form),
    };
    match result {
        Ok(()) => ExitCode::from(OK),
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(CHECK_FAILED)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
