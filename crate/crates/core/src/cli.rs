//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::casebook::run_selfcheck;
use crate::config::{AnalysisConfig, OutputFormat};
use crate::pipeline::{analyze_rois, AnalysisError};
use crate::raster::{load_image, save_image, Roi};
use crate::service::{self, ServiceConfig};
use crate::synth::SynthJob;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NO_CELL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "erythro", version, about = "Erythrocyte morphology and colour analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one or more ROIs of an image and emit one report per ROI.
    Analyze {
        #[arg(long)]
        image: PathBuf,
        /// X,Y,W,H in image pixels; repeatable.
        #[arg(long = "roi", required = true)]
        rois: Vec<Roi>,
        /// key = value config file.
        #[arg(long, env = "ERYTHRO_CONFIG")]
        config: Option<PathBuf>,
        /// Write reports here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        min_area: Option<usize>,
    },
    /// Render a synthetic cell fixture from a spec file.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Output path; `.ppm` writes PPM, anything else PNG.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify the built-in reference cases and report pass/fail.
    Selftest,
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, env = "ERYTHRO_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 30 * 60)]
        idle_timeout_secs: u64,
        #[arg(long, default_value_t = service::DEFAULT_MAX_UPLOAD)]
        max_upload_bytes: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match cli.command {
        Command::Analyze { image, rois, config, out, format, min_area } => {
            let mut cfg = match config.map(AnalysisConfig::load).transpose() {
                Ok(c) => c.unwrap_or_default(),
                Err(e) => return fail(stderr, &format!("config: {e}")),
            };
            if let Some(f) = format {
                cfg.format = f;
            }
            if let Some(m) = min_area {
                cfg.min_area = m;
            }
            cmd_analyze(&image, &rois, &cfg, out.as_deref(), stdout, stderr)
        }
        Command::Synth { spec, out } => cmd_synth(&spec, &out, stderr),
        Command::Selftest => cmd_selftest(stdout),
        Command::Serve { addr, config, idle_timeout_secs, max_upload_bytes } => {
            let analysis = match config.map(AnalysisConfig::load).transpose() {
                Ok(c) => c.unwrap_or_default(),
                Err(e) => return fail(stderr, &format!("config: {e}")),
            };
            let cfg = ServiceConfig {
                idle_timeout: Duration::from_secs(idle_timeout_secs),
                max_upload_bytes,
                analysis,
            };
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => return fail(stderr, &format!("runtime: {e}")),
            };
            let _ = writeln!(stderr, "listening on {addr}");
            match runtime.block_on(service::serve(&addr, cfg)) {
                Ok(()) => EXIT_OK,
                Err(e) => fail(stderr, &format!("serve: {e}")),
            }
        }
    }
}

fn fail(stderr: &mut dyn Write, message: &str) -> i32 {
    let _ = writeln!(stderr, "error: {message}");
    EXIT_FAILURE
}

/// Writes one report line per successfully analyzed ROI, in ROI order.
///
/// Exit code is 1 if any ROI hit an image or I/O error, otherwise 2 if any
/// ROI contained no cell, otherwise 0.
pub fn cmd_analyze(
    image: &std::path::Path,
    rois: &[Roi],
    config: &AnalysisConfig,
    out: Option<&std::path::Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    if rois.is_empty() {
        return fail(stderr, "at least one --roi is required");
    }
    if let Err(e) = config.thresholds.validate() {
        return fail(stderr, &format!("config: {e}"));
    }
    let img = match load_image(image) {
        Ok(img) => img,
        Err(e) => return fail(stderr, &format!("{}: {e}", image.display())),
    };

    let mut body = String::new();
    let (mut io_failure, mut no_cell) = (false, false);
    for (roi, result) in rois.iter().zip(analyze_rois(&img, rois, config)) {
        match result {
            Ok(report) => {
                body.push_str(&match config.format {
                    OutputFormat::Json => report.to_json(),
                    OutputFormat::Text => report.to_text(),
                });
                body.push('\n');
            }
            Err(e) => {
                match e {
                    AnalysisError::NoCellFound(_) => no_cell = true,
                    _ => io_failure = true,
                }
                let _ = writeln!(stderr, "roi {roi}: {}: {e}", e.kind());
            }
        }
    }

    let written = match out {
        Some(path) => fs::write(path, &body).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return fail(stderr, &e);
    }
    if io_failure {
        EXIT_FAILURE
    } else if no_cell {
        EXIT_NO_CELL
    } else {
        EXIT_OK
    }
}

pub fn cmd_synth(spec: &std::path::Path, out: &std::path::Path, stderr: &mut dyn Write) -> i32 {
    let text = match fs::read_to_string(spec) {
        Ok(t) => t,
        Err(e) => return fail(stderr, &format!("{}: {e}", spec.display())),
    };
    let job = match SynthJob::parse(&text) {
        Ok(j) => j,
        Err(e) => return fail(stderr, &format!("{}: {e}", spec.display())),
    };
    let img = match job.render() {
        Ok(img) => img,
        Err(e) => return fail(stderr, &e.to_string()),
    };
    match save_image(&img, out) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(stderr, &format!("{}: {e}", out.display())),
    }
}

pub fn cmd_selftest(stdout: &mut dyn Write) -> i32 {
    let outcomes = run_selfcheck(&Default::default());
    let mut all = true;
    for o in &outcomes {
        all &= o.passed;
        let _ = writeln!(stdout, "{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(stdout, "{passed}/{} checks passed", outcomes.len());
    if all { EXIT_OK } else { EXIT_FAILURE }
}
