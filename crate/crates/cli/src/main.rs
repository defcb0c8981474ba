use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ends_splitter_cli::pipeline::{execute, to_json, Command};
use ends_splitter_cli::scenario::{Scenario, ScenarioError};
use ends_splitter_cli::{exit_code, ErrorBody, ErrorJson};

#[derive(Parser)]
#[command(name = "ends-splitter", version, about = "Harmonic end-functions, necks and wall trees on Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the Dirichlet problem; writes report.json and field.csv.
    Solve(Common),
    /// Classify necks; adds necks.json and dual.dot.
    Necks(Common),
    /// Bracket the energy gap over the scenario's end-function list.
    Gap(Common),
    /// Build walls and the wall tree; adds tree.dot and action.json.
    Tree(Common),
    /// Every stage.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; one subdirectory per scenario name.
    #[arg(long, env = "ENDS_SPLITTER_OUT", default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the truncation radius.
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long)]
    verbose: bool,
}

fn fail(code: i32, body: &ErrorJson) -> ExitCode {
    eprint!("{}", to_json(body));
    ExitCode::from(code as u8)
}

fn load(common: &Common) -> Result<Scenario, ErrorJson> {
    let text = std::fs::read_to_string(&common.scenario)
        .map_err(|e| ErrorJson::config(format!("cannot read {}: {e}", common.scenario.display())))?;
    let mut s = Scenario::from_json(&text).map_err(|e| match e {
        ScenarioError::Parse { message, line, column } => ErrorJson {
            error: ErrorBody {
                family: "config",
                message: format!("malformed scenario: {message}"),
                line: Some(line),
                column: Some(column),
            },
        },
        ScenarioError::Invalid(e) => ErrorJson::from_error(&e),
    })?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(r) = common.radius {
        s.truncation_radius = r;
    }
    Ok(s)
}

fn write_all(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(1, &ErrorJson::config(e.to_string().trim_end())),
    };
    let (command, common) = match cli.command {
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Necks(c) => (Command::Necks, c),
        Cmd::Gap(c) => (Command::Gap, c),
        Cmd::Tree(c) => (Command::Tree, c),
        Cmd::Run(c) => (Command::Run, c),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return fail(1, &ErrorJson::config("--threads must be >= 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(1, &ErrorJson::config(format!("cannot configure thread pool: {e}")));
        }
    }
    let scenario = match load(&common) {
        Ok(s) => s,
        Err(body) => return fail(1, &body),
    };
    let dir = common.out.join(&scenario.name);
    let outputs = match execute(command, scenario, common.verbose) {
        Ok(o) => o,
        Err(e) => return fail(exit_code(e.family()), &ErrorJson::from_error(&e)),
    };
    let timing: serde_json::Map<String, serde_json::Value> =
        outputs.timings.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
    let mut files: Vec<(String, String)> = outputs.files.into_iter().collect();
    files.push(("timing.json".to_string(), to_json(&timing)));
    if let Err(e) = write_all(&dir, &files) {
        return fail(1, &ErrorJson::config(format!("cannot write {}: {e}", dir.display())));
    }
    for w in &outputs.report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", dir.join("report.json").display());
    ExitCode::SUCCESS
}
