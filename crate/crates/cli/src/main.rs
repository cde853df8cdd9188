//! `ris-sr` command-line front end: JSON configuration in, CSV out.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_sr::experiment::{
    algorithm_seed, emit_plotdata, fmt_sig6, instance, run_convergence, run_sweep, write_convergence_csv,
    write_plotdata_csv, write_sweep_csv, Scheme, SweepConfig,
};
use ris_sr::oracle::brute_force_search;
use ris_sr::pso::run_pso_with;
use ris_sr::rng::rng_from_seed;
use ris_sr::sdp::solve_sdp;
use ris_sr::sinr::{build_quadratics, SinrEvaluator};
use ris_sr::Result;

#[derive(Parser)]
#[command(name = "ris-sr", version, about = "Surface-assisted two-relay successive relaying simulator")]
struct Cli {
    /// JSON configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (all cores when omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the default configuration as JSON and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo rate sweep over M, SNR and trials for every configured scheme.
    Sweep {
        /// Also write per-(scheme, M, SNR) means and standard errors here.
        #[arg(long)]
        plotdata: Option<PathBuf>,
    },
    /// Best-so-far swarm trace on one channel draw.
    PsoTrace(Point),
    /// Relaxation upper bound and extracted design on one channel draw.
    SdpBound(Point),
    /// Exhaustive grid search on one (tiny) channel draw.
    Oracle(Point),
    /// Mean swarm traces for every step size of the `convergence` section.
    Convergence,
}

/// Selects one channel draw, identical to the sweep's draw at the same coordinates.
#[derive(Args)]
struct Point {
    /// Elements per surface (first `m_list` entry, or 1 for `oracle`, when omitted).
    #[arg(long)]
    m: Option<usize>,
    /// Transmit SNR in dB (first `snr_grid_db` entry when omitted).
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    trial: usize,
}

impl Point {
    fn resolve(&self, cfg: &SweepConfig, default_m: usize) -> (usize, f64, usize) {
        (
            self.m.unwrap_or(default_m),
            self.snr_db.unwrap_or(cfg.snr_grid_db[0]),
            self.trial,
        )
    }
}

fn load_config(cli: &Cli) -> Result<SweepConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if cli.print_defaults {
        let mut out = open_out(cli.out.as_deref())?;
        writeln!(out, "{}", SweepConfig::default().to_json_pretty())?;
        out.flush()?;
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(ris_sr::Error::Domain(
            "no subcommand given (see --help)".to_string(),
        ));
    };
    let cfg = load_config(cli)?;
    let out = || open_out(cli.out.as_deref());

    match command {
        Command::Sweep { plotdata } => {
            let rows = run_sweep(&cfg, cli.threads)?;
            write_sweep_csv(&rows, out()?)?;
            if let Some(path) = plotdata {
                let points = emit_plotdata(&rows)?;
                write_plotdata_csv(&points, BufWriter::new(File::create(path)?))?;
            }
        }
        Command::PsoTrace(pt) => {
            let (m, snr, trial) = pt.resolve(&cfg, cfg.m_list[0]);
            let (sc, real) = instance(&cfg, m, snr, trial)?;
            let ev = SinrEvaluator::new(&real, sc.powers());
            let seed = algorithm_seed(cfg.seed, Scheme::Pso, m, snr, trial);
            let res = run_pso_with(&ev, &cfg.pso, &mut rng_from_seed(seed));
            let rows: Vec<Vec<String>> = res
                .trace
                .iter()
                .zip(res.rate_trace())
                .enumerate()
                .map(|(t, (g, r))| vec![t.to_string(), fmt_sig6(*g), fmt_sig6(r)])
                .collect();
            write_rows(out()?, &["t", "best_fitness", "best_rate"], &rows)?;
        }
        Command::SdpBound(pt) => {
            let (m, snr, trial) = pt.resolve(&cfg, cfg.m_list[0]);
            let (sc, real) = instance(&cfg, m, snr, trial)?;
            let qf = build_quadratics(&real);
            let seed = algorithm_seed(cfg.seed, Scheme::SdpUpper, m, snr, trial);
            let res = solve_sdp(&qf, sc.powers(), &cfg.sdp, &mut rng_from_seed(seed))?;
            let row = vec![
                m.to_string(),
                fmt_sig6(snr),
                trial.to_string(),
                fmt_sig6(res.upper_bound_rate),
                fmt_sig6(res.feasible_rate),
                res.iterations.to_string(),
                fmt_sig6(res.rank_gap),
                res.converged.to_string(),
                res.damping_events.to_string(),
            ];
            let header = [
                "M",
                "snr_db",
                "trial",
                "upper_bound_rate",
                "feasible_rate",
                "iterations",
                "rank_gap",
                "converged",
                "damping_events",
            ];
            write_rows(out()?, &header, &[row])?;
        }
        Command::Oracle(pt) => {
            let (m, snr, trial) = pt.resolve(&cfg, 1);
            let (sc, real) = instance(&cfg, m, snr, trial)?;
            let res = brute_force_search(&real, sc.powers(), &cfg.oracle)?;
            let theta: Vec<String> = res.theta.as_slice().iter().map(|&p| fmt_sig6(p)).collect();
            let row = vec![
                m.to_string(),
                fmt_sig6(snr),
                trial.to_string(),
                cfg.oracle.levels.to_string(),
                fmt_sig6(res.rate),
                theta.join(" "),
            ];
            write_rows(
                out()?,
                &["M", "snr_db", "trial", "levels", "rate_best", "theta_best"],
                &[row],
            )?;
        }
        Command::Convergence => {
            let points = run_convergence(&cfg, cli.threads)?;
            write_convergence_csv(&points, out()?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
