use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qtransfer_cli::error::{CliError, CliResult};
use qtransfer_cli::output::{emit_plot_data, grid_csv_bytes, write_atomic};
use qtransfer_cli::pipeline::{
    far_field_mismatch, load_scenario, output_dir, run_loaded, uniform_amplitude, RunOptions, RunReport, Stages,
    DEFAULT_TOLERANCE,
};
use qtransfer_cli::suite::{run_suite, table, write_summary};
use qtransfer_core::export::{read_grid_binary, read_grid_csv, GRID_MAGIC};
use qtransfer_core::retrieval::{gs_retrieve_grid, GsConfig};

#[derive(Debug, Parser)]
#[command(name = "qtransfer", version, about = "Nonlocal unitary transfer simulator")]
struct Cli {
    /// Output root; each scenario writes into `<out>/<name>`.
    #[arg(long, global = true, env = "QTRANSFER_OUT")]
    out: Option<PathBuf>,
    /// Replace every seed in the scenario.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    /// Transfer passes when fidelity >= 1 - tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer only: fidelity, success probability, idler distribution.
    Transfer { scenario: PathBuf },
    /// Transfer plus far-field imaging and shot noise.
    Simulate { scenario: PathBuf },
    /// Phase retrieval on the scenario's idler field, or on a far-field grid.
    Retrieve {
        scenario: PathBuf,
        /// Far-field intensity grid (binary or CSV), centered.
        #[arg(long)]
        far: Option<PathBuf>,
    },
    /// Runs every scenario in a directory.
    Suite { dir: PathBuf },
    /// Rewrites modes.csv from a saved report.
    EmitPlots { report: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn options(cli: &Cli, stages: Stages) -> RunOptions {
    RunOptions {
        out_root: cli.out.clone(),
        seed_override: cli.seed_override,
        tolerance: cli.tolerance,
        stages,
        write_files: true,
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Transfer { scenario } => single(&cli, scenario, Stages::TRANSFER),
        Command::Simulate { scenario } => single(&cli, scenario, Stages::SIMULATE),
        Command::Retrieve { scenario, far: None } => single(&cli, scenario, Stages::RETRIEVE),
        Command::Retrieve {
            scenario,
            far: Some(far),
        } => retrieve_external(&cli, scenario, far),
        Command::Suite { dir } => {
            let opts = options(&cli, Stages::ALL);
            let rows = run_suite(dir, &opts)?;
            print!("{}", table(&rows));
            let root = opts.out_root.clone().unwrap_or_else(|| PathBuf::from("qtransfer-out"));
            write_summary(&rows, &root.join("summary.csv"))?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::SuiteFailed {
                    failed,
                    total: rows.len(),
                });
            }
            Ok(())
        }
        Command::EmitPlots { report } => {
            let text = fs::read_to_string(report).map_err(|e| CliError::io(report.display().to_string(), e))?;
            let parsed: RunReport = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                path: report.display().to_string(),
                source: qtransfer_core::Error::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                },
            })?;
            let dir = report.parent().unwrap_or(Path::new("."));
            for p in emit_plot_data(&parsed, None, dir)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn single(cli: &Cli, path: &Path, stages: Stages) -> CliResult<()> {
    let opts = options(cli, stages);
    let s = load_scenario(path, &opts)?;
    let out = run_loaded(&s, &opts)?;
    print_report(&out.report);
    println!("wrote {}", out.out_dir.display());
    if !out.report.passed {
        return Err(CliError::Physics(qtransfer_core::Error::InvalidConfig(format!(
            "transfer fidelity {:.3e} below 1 - {:.0e}",
            out.report.transfer_fidelity, cli.tolerance
        ))));
    }
    Ok(())
}

fn print_report(r: &RunReport) {
    println!("scenario            {}", r.name);
    println!("lattice             {}D, N = {}", r.dims, r.modes_per_axis);
    println!("transfer fidelity   {:.15}", r.transfer_fidelity);
    println!(
        "success probability {:.6e} (1/N^d = {:.6e})",
        r.success_probability, r.expected_success_probability
    );
    if let Some(s) = r.similarity_noiseless {
        println!("similarity          {s:.6}");
    }
    if let (Some(s), Some(n)) = (r.similarity_sampled, r.counts_total) {
        println!("similarity sampled  {s:.6} over {n} counts");
    }
    if let Some(g) = &r.retrieval {
        println!(
            "retrieval           best run {} of {}, error {:.4e}, aligned rms {:.4}{}",
            g.best_run_index,
            g.n_runs,
            g.final_error,
            g.aligned_rms,
            if g.twin { " (twin)" } else { "" }
        );
    }
}

fn read_far(path: &Path) -> CliResult<ndarray::Array2<f64>> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let parsed = if bytes.starts_with(&GRID_MAGIC) {
        read_grid_binary(bytes.as_slice())
    } else {
        read_grid_csv(BufReader::new(bytes.as_slice()))
    };
    parsed.map_err(|e| CliError::loading(path, e))
}

fn retrieve_external(cli: &Cli, scenario: &Path, far_path: &Path) -> CliResult<()> {
    let opts = options(cli, Stages::RETRIEVE);
    let s = load_scenario(scenario, &opts)?;
    let far = read_far(far_path)?;
    let cfg = s.retrieval.unwrap_or_else(|| {
        if s.lattice.dims() == 1 {
            GsConfig::one_d()
        } else {
            GsConfig::two_d()
        }
    });
    let near = uniform_amplitude(far.dim());
    let t = Instant::now();
    let res = gs_retrieve_grid(&near, &far, &cfg)?;
    let wall_ms = t.elapsed().as_secs_f64() * 1e3;
    let mismatch = far_field_mismatch(&res.phase, &near, &far)?;
    let dir = output_dir(&s, &opts);
    write_atomic(&dir.join("phase_retrieved.csv"), &grid_csv_bytes(&res.phase))?;
    let summary = serde_json::json!({
        "n_runs": cfg.n_runs,
        "n_iters": cfg.n_iters,
        "best_run_index": res.best_run_index,
        "final_error": res.final_error,
        "run_final_errors": res.runs.iter().map(|r| r.final_error).collect::<Vec<_>>(),
        "far_mismatch": mismatch,
        "wall_ms": wall_ms,
    });
    write_atomic(
        &dir.join("gs_report.json"),
        &serde_json::to_vec_pretty(&summary).expect("json serializes"),
    )?;
    println!(
        "best run {} of {}, error {:.4e}, far mismatch {:.4e}",
        res.best_run_index, cfg.n_runs, res.final_error, mismatch
    );
    println!("wrote {}", dir.display());
    Ok(())
}
