use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use coarse_cli::commands;
use coarse_cli::report::{CheckRecord, Report};
use coarse_cli::scenario::{load_scenario, Scenario};
use coarse_core::asdim::DEFAULT_EXACT_CAP;
use coarse_core::hyperspace::DEFAULT_HYPER_CAP;

#[derive(Parser)]
#[command(name = "coarse-dyn", version, about = "Checks coarse spaces, groups, and dynamical systems on finite instances")]
struct Cli {
    /// Scenario file naming spaces, groups, windows, maps, systems, and
    /// conjugacies.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Seed for randomized generation; defaults to the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of random instances for corpus runs.
    #[arg(long, global = true, default_value_t = 20)]
    count: usize,

    /// Point cap for exhaustive dimension searches.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,

    /// Base-space cap for hyperspace constructions; can only lower the
    /// built-in bound.
    #[arg(long, global = true, default_value_t = DEFAULT_HYPER_CAP)]
    hyper_cap: usize,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the chain invariants of every space.
    CheckSpace,
    /// Classify every map between its named spaces.
    CheckMap,
    /// Check group structures: entourage spaces, ideal round trip, inversion.
    CheckGroup,
    /// Validate the axioms of every dynamical system.
    CheckCds,
    /// Verify conjugacies, their inverses, and their self-compositions.
    Conjugacy,
    /// Orbit tables, and orbit preservation along every conjugacy.
    Orbit,
    /// Coproducts of systems, and coproducts of conjugacies.
    Coproduct,
    /// Hyperspace structures, lifted systems, and lifted conjugacies.
    Hyperlift,
    /// Dimension witness search on a named space, window, or group.
    Asdim {
        /// Which space to search; window and group names also resolve.
        #[arg(long)]
        space: String,
        /// Dimension bound to witness: n + 1 separated families.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Integer window against a fractional grid: round trips, closeness, and
    /// the coarse equivalence both ways.
    ZrDemo {
        #[arg(long, default_value_t = 1000.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
    },
    /// Generate random systems with conjugate copies and run the full
    /// theorem suite on them.
    Corpus,
}

fn need_scenario(cli: &Cli) -> Result<Scenario, String> {
    let path = cli.scenario.as_ref().ok_or("this command needs --scenario FILE")?;
    load_scenario(path)
}

fn run(cli: &Cli, hyper_cap: usize) -> Result<(u64, Vec<CheckRecord>), String> {
    let mut scenario_seed = None;
    let checks = match &cli.command {
        Command::CheckSpace => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::check_space(&scn)
        }
        Command::CheckMap => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::check_map(&scn)
        }
        Command::CheckGroup => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::check_group(&scn)
        }
        Command::CheckCds => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::check_cds(&scn)
        }
        Command::Conjugacy => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::conjugacy(&scn)
        }
        Command::Orbit => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::orbit(&scn)
        }
        Command::Coproduct => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::coproduct(&scn)
        }
        Command::Hyperlift => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::hyperlift(&scn, hyper_cap)
        }
        Command::Asdim { space, n } => {
            let scn = need_scenario(cli)?;
            scenario_seed = Some(scn.seed);
            commands::asdim(&scn, space, *n, cli.exact_cap)
        }
        Command::ZrDemo { half_width, step } => commands::zr_demo(*half_width, *step),
        Command::Corpus => {
            let seed = cli.seed.unwrap_or(0);
            commands::corpus(cli.count, seed, hyper_cap)
        }
    };
    let seed = cli.seed.or(scenario_seed).unwrap_or(0);
    Ok((seed, checks))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let hyper_cap = cli.hyper_cap.min(DEFAULT_HYPER_CAP);

    let (seed, checks) = match run(&cli, hyper_cap) {
        Ok(out) => out,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = Report::new(seed, checks);
    let rendered = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{rendered}");
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
