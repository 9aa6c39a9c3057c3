//! `finsheaf`: batch computations on finite ringed spaces.

mod document;
mod tasks;
mod workspace;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use finsheaf::finring::DEFAULT_RING_CAP;
use finsheaf::poset::face_poset;

use tasks::{Options, Report, Status};
use workspace::{input_error, InputError};

#[derive(Parser)]
#[command(name = "finsheaf", version, about = "Sheaf computations on finite ringed spaces")]
struct Cli {
    /// Largest ring (in elements) accepted on load.
    #[arg(long, global = true, default_value_t = DEFAULT_RING_CAP)]
    max_ring_size: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a workspace file.
    Check { file: PathBuf },
    /// Run the tasks of a workspace file.
    Run {
        file: PathBuf,
        /// Only run tasks of this kind.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Injective resolution depth for shriek and duality tasks.
        #[arg(long)]
        depth: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Face poset of a simplicial complex and its cohomology.
    Model {
        /// JSON list of maximal simplices, or `{"simplices": [...]}`.
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const INPUT: u8 = 2;

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| input_error(path.display().to_string(), e))
}

fn load(path: &Path, cap: u128) -> Result<(document::Document, workspace::Workspace), InputError> {
    let text = read(path)?;
    let doc = document::parse(&text).map_err(|e| input_error(path.display().to_string(), e))?;
    let ws = workspace::load(&doc, cap)?;
    Ok((doc, ws))
}

fn check(path: &Path, cap: u128) -> Result<u8, InputError> {
    let (doc, ws) = load(path, cap)?;
    let again = document::parse(&document::serialize(&doc)).map_err(|e| input_error("round trip", e))?;
    if again != doc {
        return Err(input_error("round trip", "serialized workspace does not reparse to itself"));
    }
    for (k, t) in ws.tasks.iter().enumerate() {
        if !tasks::TASKS.contains(&t.task.as_str()) {
            return Err(input_error(format!("tasks[{k}].task"), format!("unknown task `{}`", t.task)));
        }
    }
    println!(
        "ok: {} rings, {} spaces, {} maps, {} sheaves, {} complexes, {} tasks",
        ws.rings.len(),
        ws.spaces.len(),
        ws.maps.len(),
        ws.sheaves.len(),
        ws.complexes.len(),
        ws.tasks.len()
    );
    Ok(PASS)
}

fn print_reports(reports: &[Report], format: Format) {
    match format {
        Format::Text => {
            for r in reports {
                let status = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Info => "DONE",
                };
                let subject = if r.subject.is_empty() { String::new() } else { format!(" {}", r.subject) };
                println!("[{}] {}{subject}: {status}", r.index, r.task);
                for l in &r.lines {
                    println!("  {l}");
                }
            }
        }
        Format::Json => {
            let pass = reports.iter().all(|r| r.status != Status::Fail);
            let out = json!({ "pass": pass, "tasks": reports });
            println!("{}", serde_json::to_string_pretty(&out).expect("reports serialize"));
        }
    }
}

fn run(path: &Path, cap: u128, only: Option<&str>, opts: Options, format: Format) -> Result<u8, InputError> {
    let (_, ws) = load(path, cap)?;
    if let Some(name) = only {
        if !tasks::TASKS.contains(&name) {
            return Err(input_error("--task", format!("unknown task `{name}`")));
        }
    }
    let selected: Vec<usize> =
        (0..ws.tasks.len()).filter(|&k| only.map_or(true, |n| ws.tasks[k].task == n)).collect();
    if selected.is_empty() {
        if only.is_some() {
            return Err(input_error("--task", "no task of this kind in the workspace"));
        }
        println!("no tasks");
        return Ok(PASS);
    }
    // tasks run concurrently; reports keep declaration order
    let results: Vec<Result<Report, InputError>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            selected.iter().map(|&k| s.spawn({ let ws = &ws; move || tasks::run(ws, &ws.tasks[k], k, opts) })).collect();
        handles.into_iter().map(|h| h.join().expect("task thread panicked")).collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    print_reports(&reports, format);
    Ok(if reports.iter().any(|r| r.status == Status::Fail) { FAIL } else { PASS })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SimplicialFile {
    List(Vec<Vec<String>>),
    Object { simplices: Vec<Vec<String>> },
}

fn model(path: &Path, format: Format) -> Result<u8, InputError> {
    let where_ = path.display().to_string();
    let file: SimplicialFile = serde_json::from_str(&read(path)?).map_err(|e| input_error(&where_, e))?;
    let simplices = match file {
        SimplicialFile::List(s) | SimplicialFile::Object { simplices: s } => s,
    };
    let fp = face_poset(&simplices).map_err(|e| input_error(&where_, e))?;
    let (status, lines, data) = tasks::simplicial_report(fp).map_err(|e| input_error(&where_, e))?;
    let report = Report { index: 0, task: "model".into(), subject: where_, status, lines, data };
    print_reports(&[report], format);
    Ok(PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.max_ring_size;
    let result = match &cli.command {
        Command::Check { file } => check(file, cap),
        Command::Run { file, task, seed, depth, format } => {
            run(file, cap, task.as_deref(), Options { seed: *seed, depth: *depth }, *format)
        }
        Command::Model { complex, format } => model(complex, *format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("input error: {e}");
            ExitCode::from(INPUT)
        }
    }
}
