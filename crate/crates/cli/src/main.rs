use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use repcoh_cli::config::{load_config, RunConfig};
use repcoh_cli::error::{CliError, CliResult};
use repcoh_cli::figures::{figure, FIGURE_IDS};
use repcoh_cli::sweep::{evaluate, rows_table, run_sweep, Mode, SweepSpec, COLUMNS};
use repcoh_cli::table::{write_meta, Meta, Table};
use repcoh_cli::verify::{verify, Level, Status, VerifyOptions};

#[derive(Parser)]
#[command(name = "repcoh", version, about = "Coherence from repeated system-bath collisions")]
struct Cli {
    /// Accepted for compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output CSV path (a `.meta.json` sidecar is written next to it); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Mode::All)]
    mode: Mode,

    /// Keep every k-th data row.
    #[arg(long, default_value_t = 1)]
    decimate: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a configuration: its sweep if it has one, otherwise a single point.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep one parameter of a configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `name=from:to:points` or `name=v1,v2,...`
        #[arg(long)]
        sweep: String,
        #[command(flatten)]
        output: Output,
    },
    /// Emit the data behind a figure preset (`all` for every preset).
    Figure {
        #[arg(value_name = "ID", required_unless_present = "figure")]
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        figure: Option<String>,
        /// Output directory; `<id>.csv` per preset.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        decimate: usize,
    },
    /// Run the built-in acceptance checks.
    Verify {
        /// Skip the collision-heavy checks.
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true, default_value_t = 1.0)]
        perturb_gamma: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => load_config(&config).and_then(|run| match run.sweep.clone() {
            Some(s) => sweep_command(&run, &s, &output, "run"),
            None => point_command(&run, &output),
        }),
        Command::Sweep { config, sweep, output } => load_config(&config).and_then(|run| {
            let spec = SweepSpec::parse_arg(&sweep)?;
            sweep_command(&run, &spec, &output, "sweep")
        }),
        Command::Figure { id, figure: flag, out, mode, decimate } => {
            figure_command(&id.or(flag).unwrap_or_default(), &out, mode, decimate)
        }
        Command::Verify { fast, full: _, json, perturb_gamma } => {
            let level = if fast { Level::Fast } else { Level::Full };
            return verify_command(VerifyOptions { level, gamma_scale: perturb_gamma }, json);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(table: &Table, run: &RunConfig, output_path: Option<&Path>, command: &str, mode: Mode, flagged: usize, started: Instant) -> CliResult<()> {
    match output_path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(table.to_csv().as_bytes()).map_err(|e| CliError::io("<stdout>", e))
        }
        Some(path) => {
            table.write(path)?;
            let meta = Meta {
                tool: "repcoh".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_sha256: run.hash(),
                command: command.into(),
                mode: mode.name().into(),
                rows: table.rows.len(),
                flagged_rows: flagged,
                generated_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
                elapsed_seconds: started.elapsed().as_secs_f64(),
            };
            write_meta(path, &meta)
        }
    }
}

fn point_command(run: &RunConfig, output: &Output) -> CliResult<()> {
    let started = Instant::now();
    let row = evaluate(&run.id, &run.scenario, f64::NAN, output.mode);
    let mut t = Table::new(&COLUMNS);
    t.comment(format!("repcoh run {}", run.id));
    t.comment(format!("config-sha256 {}", run.hash()));
    t.comment(format!("mode {}", output.mode.name()));
    let flagged = usize::from(!row.flags.is_empty());
    t.push(row.cells());
    emit(&t, run, output.out.as_deref(), "run", output.mode, flagged, started)
}

fn sweep_command(run: &RunConfig, spec: &SweepSpec, output: &Output, command: &str) -> CliResult<()> {
    let started = Instant::now();
    let rows = run_sweep(run, spec, output.mode)?;
    let flagged = rows.iter().filter(|r| !r.flags.is_empty()).count();
    let mut t = rows_table(run, spec, output.mode, &rows);
    t.decimate(output.decimate);
    let path = output.out.clone().or_else(|| spec.output.as_ref().map(PathBuf::from));
    emit(&t, run, path.as_deref(), command, output.mode, flagged, started)
}

fn figure_command(id: &str, out: &Path, mode: Mode, decimate: usize) -> CliResult<()> {
    let ids: Vec<&str> = if id == "all" { FIGURE_IDS.to_vec() } else { vec![id] };
    for id in ids {
        let started = Instant::now();
        let (run, mut table) = figure(id, mode)?;
        table.decimate(decimate);
        let path = out.join(format!("{id}.csv"));
        emit(&table, &run, Some(&path), &format!("figure {id}"), mode, 0, started)?;
        eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    }
    Ok(())
}

fn verify_command(opts: VerifyOptions, json: bool) -> ExitCode {
    let report = verify(&opts);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for r in &report.results {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            println!("{tag} [{}] {} ({:.2} s): {}", r.id, r.name, r.seconds, r.detail);
        }
        println!("total {:.1} s", report.seconds);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
