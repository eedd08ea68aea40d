use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aia_cli::fit::{fit_csv, fit_line, FitRequest};
use aia_cli::{exit, output, run_dtau_scan, run_sweep, with_threads, Model, SweepConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aia", version, about = "Adiabatic-impulse sweeps for driven two-level systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; overrides `out` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed Landau-Zener sweep.
    Lz(SweepArgs),
    /// Transverse-field Ising chain sweep.
    Tfi(SweepArgs),
    /// Landau-Zener sweep with a thermal bath.
    Open(SweepArgs),
    /// Fit `column = A t_f^p` over a window of a sweep CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, allow_negative_numbers = true)]
        tmin: f64,
        #[arg(long)]
        tmax: f64,
        /// Temperature to select in open-model tables.
        #[arg(long)]
        temp: Option<f64>,
    },
    /// AIA distance on a dense Δτ grid at one t_f.
    DtauScan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tf: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(model: Model, args: SweepArgs) -> i32 {
    let cfg = match SweepConfig::from_file(&args.config, model) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return exit::CONFIG;
        }
    };
    let result = with_threads(args.threads, || run_sweep(&cfg));
    let target = args.out.or_else(|| cfg.out.clone());
    let written = open_out(target.as_deref())
        .map_err(|e| e.to_string())
        .and_then(|w| result.write_csv(w).map_err(|e| e.to_string()));
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return exit::CONFIG;
    }
    for r in result.rows.iter().filter(|r| !r.err.is_empty()) {
        eprintln!("warning: t_f = {}: {}", r.t_f, r.err);
    }
    if result.all_failed() {
        eprintln!("error: every row failed");
        return exit::NUMERICAL;
    }
    exit::SUCCESS
}

fn dtau_scan(config: &Path, tf: f64, out: Option<PathBuf>, threads: Option<usize>) -> i32 {
    let loaded = std::fs::read_to_string(config).map_err(|e| e.to_string()).and_then(|text| {
        let model = SweepConfig::declared_model(&text)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| "dtau-scan needs a `model` key in the config".to_string())?;
        SweepConfig::parse(&text, model).map_err(|e| e.to_string())
    });
    let cfg = match loaded {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return exit::CONFIG;
        }
    };
    if !(tf > 0.0 && tf.is_finite()) {
        eprintln!("error: --tf must be positive");
        return exit::CONFIG;
    }
    let points = match with_threads(threads, || run_dtau_scan(&cfg, tf)) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::NUMERICAL;
        }
    };
    let target = out.or_else(|| cfg.out.clone());
    let written = open_out(target.as_deref())
        .map_err(|e| e.to_string())
        .and_then(|w| output::write_scan_csv(w, &points, cfg.model == Model::Open).map_err(|e| e.to_string()));
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return exit::CONFIG;
    }
    if points.iter().all(|p| p.distance.is_none()) {
        return exit::NUMERICAL;
    }
    exit::SUCCESS
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Lz(a) => sweep(Model::Lz, a),
        Cmd::Tfi(a) => sweep(Model::Tfi, a),
        Cmd::Open(a) => sweep(Model::Open, a),
        Cmd::Fit { csv, column, tmin, tmax, temp } => {
            let req = FitRequest { column: column.clone(), tmin, tmax, temperature: temp };
            match fit_csv(&csv, &req) {
                Ok(f) => {
                    println!("{column}: {:.6e} * t_f^{:.4} (log rms {:.3e})", f.amplitude, f.exponent, f.residual);
                    println!("{}", fit_line(&column, &f));
                    exit::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::CONFIG
                }
            }
        }
        Cmd::DtauScan { config, tf, out, threads } => dtau_scan(&config, tf, out, threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(run(cli) as u8)
}
