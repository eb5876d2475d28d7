use std::path::PathBuf;
use std::process::ExitCode;

use afdm::effective::{elg_curve, EffectiveChannel, EnvelopeParams};
use afdm::harness::{run_sweep, validate_mode, write_elg_csv, write_profile_csv, EstimatorKind, ExperimentConfig};
use afdm::{AfdmGrid, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "afdm", version, about = "AFDM fractional delay/Doppler estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo RMSE sweep; writes <out>.csv and <out>.json, or CSV to stdout.
    Sweep(Overrides),
    /// Envelope, channel-model, integer-channel and ELG checks; exits 1 on failure.
    Validate(Overrides),
    /// Magnitude profile of one pilot column and the ELG table as CSV.
    ProfileDump(ProfileArgs),
}

/// Config file plus per-field overrides.
#[derive(Args)]
struct Overrides {
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    eta_v: Option<usize>,
    /// Comma-separated segment counts C.
    #[arg(long, value_delimiter = ',')]
    segments: Option<Vec<usize>>,
    #[arg(long)]
    n_cp: Option<usize>,
    /// Guard chirps on each side of the pilot (default: the grid's Q).
    #[arg(long)]
    guard_width: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snr_db: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ep_ei_db: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    estimates_per_trial: Option<usize>,
    /// Score every frame instead of the per-trial average.
    #[arg(long)]
    no_average: bool,
    /// Comma-separated: proposed, integer-only, two-d-search.
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<EstimatorKind>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fir_half_width: Option<usize>,
    #[arg(long)]
    oracle_oversampling: Option<usize>,
    #[arg(long)]
    validation_draws: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { c.$target = v; })*
            };
        }
        set!(n => n, k_max => k_max, l_max => l_max, eta_v => eta_v, segments => segments, n_cp => n_cp,
             snr_db => snr_db, ep_ei_db => ep_ei_db, trials => trials,
             estimates_per_trial => estimates_per_trial, estimators => estimators, seed => master_seed,
             fir_half_width => fir_half_width, oracle_oversampling => oracle_oversampling,
             validation_draws => validation_draws);
        if self.guard_width.is_some() {
            c.guard_width = self.guard_width;
        }
        if self.no_average {
            c.average_estimates = false;
        }
        if self.out.is_some() {
            c.output = self.out;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k_max: usize,
    /// Segment count C.
    #[arg(long, default_value_t = 8)]
    segments: usize,
    #[arg(long, default_value_t = 1.3)]
    delay: f64,
    #[arg(long, default_value_t = 2.4, allow_negative_numbers = true)]
    doppler: f64,
    #[arg(long, default_value_t = 0)]
    carrier: usize,
    /// Directory for profile.csv and elg.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep(o) => {
            let cfg = o.resolve()?;
            let report = run_sweep(&cfg)?;
            match &cfg.output {
                Some(prefix) => {
                    let (c, j) = report.emit(prefix)?;
                    eprintln!("wrote {} and {}", c.display(), j.display());
                }
                None => report.write_csv(std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Validate(o) => {
            let cfg = o.resolve()?;
            let report = validate_mode(&cfg)?;
            for c in &report.checks {
                println!("{c}");
            }
            if let Some(prefix) = &cfg.output {
                serde_json::to_writer_pretty(std::fs::File::create(prefix.with_extension("json"))?, &report)?;
            }
            Ok(report.passed())
        }
        Command::ProfileDump(a) => {
            let grid = AfdmGrid::with_segments(a.n, a.k_max, a.segments, std::f64::consts::SQRT_2, 3, 32)?;
            let eff = EffectiveChannel::new(&grid);
            let (l, k) = (a.delay.floor(), a.doppler.floor());
            let p = EnvelopeParams::new(l as i64, a.delay - l, k as i64, a.doppler - k);
            std::fs::create_dir_all(&a.out_dir)?;
            write_profile_csv(&eff, &p, a.carrier, std::fs::File::create(a.out_dir.join("profile.csv"))?)?;
            write_elg_csv(&elg_curve(&grid), std::fs::File::create(a.out_dir.join("elg.csv"))?)?;
            eprintln!("wrote profile.csv and elg.csv to {}", a.out_dir.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
