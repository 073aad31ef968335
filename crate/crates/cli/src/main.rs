//! Batch driver: deterministic instance generation, verification suites,
//! reconstruction, and machine-readable JSON reports.
//!
//! Exit codes: 0 success, 1 check/solver failure, 2 input or schema error.

use b5core::pipeline::{build_instance, instance_from_file, InstanceFile, NumCfg};
use b5core::verify::{instance_json, reconstruct_instance, verify_instance};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "b5",
    about = "Exact and numeric computations on the quintic del Pezzo threefold: conic-type sextics, their plane spin-curve models, and reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Tolerance for the numeric checks (exact checks ignore it).
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Sample count along the curve (at least 28).
    #[arg(long, default_value_t = 48)]
    samples: usize,
    /// Search budget of the reconstruction solver.
    #[arg(long, default_value_t = 64)]
    multistart: usize,
    /// Working precision of the floating-point lane (53 = f64, more
    /// selects double-double). Env override: B5_PRECISION_BITS.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Worker pool size (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl CommonOpts {
    fn to_cfg(&self) -> NumCfg {
        let bits = self
            .precision_bits
            .or_else(|| {
                std::env::var("B5_PRECISION_BITS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(128);
        NumCfg {
            samples: self.samples,
            tolerance: self.tolerance,
            multistart: self.multistart,
            precision_bits: bits,
            threads: self.threads,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a conic-type instance, deterministic per seed.
    Gen {
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the verification suite on an instance file.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Write the self-contained report (instance + results) here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve for the identification conic and certify the reconstruction.
    Reconstruct {
        input: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Apply a seeded random projectivity to the plane model first.
        #[arg(long)]
        scramble: bool,
        /// Seed of the scrambling projectivity.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarize an instance or report file.
    Report { input: PathBuf },
}

fn read_instance(path: &PathBuf) -> Result<(InstanceFile, b5core::pipeline::CTInstance), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read file: {e}"))?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| format!("malformed JSON: {e}"))?;
    let inst = instance_from_file(&file).map_err(|e| format!("schema error: {e}"))?;
    Ok((file, inst))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| format!("write: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Gen {
            seed,
            common,
            output,
        } => {
            let cfg = common.to_cfg();
            let inst = build_instance(seed, &cfg).map_err(|e| e.to_string())?;
            emit(&instance_json(&inst, None), &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            input,
            common,
            output,
        } => {
            let cfg = common.to_cfg();
            let (_, inst) = read_instance(&input)?;
            let report = verify_instance(&inst, &cfg);
            let mut lines = String::new();
            for c in &report.checks {
                lines.push_str(&format!(
                    "{}: {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name
                ));
            }
            eprint!("{lines}");
            let doc = instance_json(&inst, Some(serde_json::json!({ "verify": report })));
            emit(&doc, &output)?;
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Reconstruct {
            input,
            common,
            scramble,
            seed,
            output,
        } => {
            let cfg = common.to_cfg();
            let (_, inst) = read_instance(&input)?;
            let scramble_seed = scramble.then_some(seed);
            let report = reconstruct_instance(&inst, &cfg, scramble_seed)?;
            let ok = report.converged && report.all_certificates_pass;
            eprintln!(
                "{}: reconstruction (residual {:.3e})",
                if ok { "PASS" } else { "FAIL" },
                report.residual
            );
            let doc = instance_json(&inst, Some(serde_json::json!({ "reconstruction": report })));
            emit(&doc, &output)?;
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Report { input } => {
            let text =
                std::fs::read_to_string(&input).map_err(|e| format!("cannot read file: {e}"))?;
            let file: InstanceFile =
                serde_json::from_str(&text).map_err(|e| format!("malformed JSON: {e}"))?;
            println!("schema_version: {}", file.schema_version);
            println!("seed: {}", file.seed);
            println!("samples: {}", file.samples.len());
            match &file.reports {
                serde_json::Value::Null => println!("reports: none"),
                reports => {
                    if let Some(v) = reports.get("verify") {
                        let passed = v["passed"].as_bool().unwrap_or(false);
                        println!("verify: {}", if passed { "PASS" } else { "FAIL" });
                        if let Some(checks) = v["checks"].as_array() {
                            for c in checks {
                                println!(
                                    "  {}: {}",
                                    c["name"].as_str().unwrap_or("?"),
                                    if c["pass"].as_bool().unwrap_or(false) {
                                        "pass"
                                    } else {
                                        "FAIL"
                                    }
                                );
                            }
                        }
                    }
                    if let Some(r) = reports.get("reconstruction") {
                        println!(
                            "reconstruction: residual {}, certificates {}",
                            r["residual"],
                            if r["all_certificates_pass"].as_bool().unwrap_or(false) {
                                "pass"
                            } else {
                                "FAIL"
                            }
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
