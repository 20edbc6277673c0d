use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fences_cli::config::{Command, RunConfig, Tolerances};
use fences_cli::{run, CliError};
use fences_core::lifted::Realm;
use fences_core::selfdual::Conjecture;
use fences_core::{DynamicsMap, FenceShape};

#[derive(Parser)]
#[command(name = "fences", version, about = "Rowmotion, toggleability and homomesy on fence posets")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for random labelings.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout (`.json` selects JSON).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory; FENCES_CACHE_DIR takes precedence.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = Tolerances::default().toggle)]
    tol_toggle: f64,
    #[arg(long, global = true, default_value_t = Tolerances::default().basis)]
    tol_basis: f64,
    /// Also write the resolved configuration to this file.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Toggleability and homomesy dimensions over a sweep.
    Dims {
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        max_n: usize,
    },
    /// Every identity suite on every fence up to a size.
    Verify {
        #[arg(long)]
        max_n: usize,
    },
    /// Orbit-average scan for one conjecture.
    Scan {
        #[arg(long)]
        conj: Conjecture,
        #[arg(long)]
        max_apt: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// The cycle through one ideal.
    Orbit {
        #[arg(long)]
        fence: FenceShape,
        #[arg(long)]
        ideal: String,
        #[arg(long, default_value = "rowmotion")]
        map: DynamicsMap,
    },
    /// Lifted orbit of a seeded labeling: JSON-lines trace and means.
    Lifted {
        #[arg(long)]
        fence: FenceShape,
        #[arg(long)]
        realm: Realm,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 20)]
        exact_steps: usize,
    },
    /// Run a saved configuration.
    Run { config: PathBuf },
}

fn config(cli: Cli) -> Result<(RunConfig, Option<PathBuf>), CliError> {
    let common = cli.common;
    let command = match cli.command {
        Cmd::Run { config } => return Ok((RunConfig::load(&config)?, common.save_config)),
        Cmd::Dims { t, max_n } => Command::Dims { t, max_n },
        Cmd::Verify { max_n } => Command::Verify { max_n },
        Cmd::Scan {
            conj,
            max_apt,
            t,
            max_n,
        } => Command::Scan {
            conjecture: conj,
            max_apt,
            t,
            max_n,
        },
        Cmd::Orbit { fence, ideal, map } => Command::Orbit { fence, ideal, map },
        Cmd::Lifted {
            fence,
            realm,
            steps,
            exact_steps,
        } => Command::Lifted {
            fence,
            realm,
            steps,
            exact_steps,
        },
    };
    let cfg = RunConfig {
        command,
        seed: common.seed,
        tolerances: Tolerances {
            toggle: common.tol_toggle,
            basis: common.tol_basis,
        },
        out: common.out,
        cache_dir: common.cache_dir,
    };
    Ok((cfg, common.save_config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli).and_then(|(cfg, save)| {
        if let Some(path) = save {
            cfg.save(&path)?;
        }
        run(&cfg, &mut std::io::stdout().lock())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
