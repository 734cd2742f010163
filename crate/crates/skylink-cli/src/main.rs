//! Command-line mission planner and simulator for satellite optical
//! quantum links.
//!
//! Exit codes: 0 when every requirement verdict passes, 1 when a
//! requirement fails, 2 on configuration or usage errors.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use skylink::link::{design_points, fiber_vs_freespace, FreespaceChannel};
use skylink::mission::{self, ConstellationPlan, KeyStore, MissionError, Scenario};
use skylink::quantum::{chsh_analytic, chsh_sampled, werner_p_from_fidelity, BellState, ChshSettings, TwoQubitState};
use skylink::report::{emit_report, summary_text};
use skylink::{geometry, gravity};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "skylink", version, about = "Mission planner and simulator for satellite optical quantum links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the report bundle.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in preset name (`--preset list` to enumerate).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mission scenario and emit its report bundle.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scenario file (alternative to --preset).
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Print link budgets: the three design-point tables and, with a
    /// preset, the pass-resolved reference budget.
    Budget {
        #[command(flatten)]
        common: Common,
        /// Fiber attenuation for the comparison, dB/km.
        #[arg(long, default_value_t = 0.2)]
        fiber_db_per_km: f64,
    },
    /// Bell test on a Werner state.
    Bell {
        #[command(flatten)]
        common: Common,
        /// Bell-state fidelity of the source.
        #[arg(long, default_value_t = 0.869)]
        fidelity: f64,
        #[arg(long, default_value_t = 1167)]
        trials: u64,
    },
    /// Gravitational decoherence sweep.
    Gravity {
        #[command(flatten)]
        common: Common,
        /// Orbit altitude, km.
        #[arg(long, default_value_t = 500.0)]
        altitude_km: f64,
        /// Calibration: D at the reference angle.
        #[arg(long, default_value_t = 0.97)]
        target_d: f64,
        #[arg(long, default_value_t = 50.0)]
        reference_angle_deg: f64,
    },
    /// Constellation pass statistics and throughput.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        satellites: u32,
        #[arg(long, default_value_t = 900.0)]
        altitude_km: f64,
        #[arg(long, default_value_t = 40.0)]
        station_latitude_deg: f64,
        #[arg(long, default_value_t = 25.0)]
        min_elevation_deg: f64,
        #[arg(long, default_value_t = 200)]
        days: u32,
        #[arg(long, default_value_t = 100)]
        stations: u32,
        #[arg(long, default_value_t = 2_000_000)]
        key_per_pass_bits: u64,
        /// Contracted passes per station-year (omit to use the simulation).
        #[arg(long)]
        passes_per_station_year: Option<u64>,
    },
    /// Inspect the key store of a report directory.
    Keys {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(common: &Common, scenario_path: Option<&PathBuf>) -> anyhow::Result<Scenario> {
    let mut scenario = match (&common.preset, scenario_path) {
        (Some(name), None) => {
            if name == "list" {
                anyhow::bail!("available presets: {}", mission::preset_names().join(", "));
            }
            Scenario::preset(name).with_context(|| format!("loading preset {name}"))?
        }
        (None, Some(path)) => {
            let doc = skylink::scenario::parse_scenario_file(path).map_err(MissionError::from)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
            Scenario::from_document(&name, &doc)?
        }
        _ => anyhow::bail!("exactly one of --preset or --scenario is required"),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { common, scenario } => {
            let scenario = load_scenario(&common, scenario.as_ref())?;
            let report = scenario.run()?;
            print!("{}", summary_text(&report));
            if let Some(dir) = &common.out {
                let bundle = emit_report(&report, dir)?;
                eprintln!("wrote {} files under {}", bundle.files.len(), bundle.dir.display());
            }
            Ok(report.all_pass())
        }
        Command::Budget { common, fiber_db_per_km } => {
            for (label, budget) in [
                ("one-downlink (QKD)", design_points::one_downlink()),
                ("two-downlink (entanglement)", design_points::two_downlink()),
                ("one-uplink (teleportation)", design_points::one_uplink()),
            ] {
                println!("# {label}");
                print!("{}", budget.to_csv());
                println!();
            }
            let cmp = fiber_vs_freespace(fiber_db_per_km, &FreespaceChannel::reference_downlink(), 1000.0)
                .map_err(MissionError::from)?;
            println!(
                "fiber {} dB/km crosses the reference downlink at {:.1} km",
                fiber_db_per_km, cmp.crossover_km
            );
            if common.preset.is_some() {
                let scenario = load_scenario(&common, None)?;
                let report = scenario.run()?;
                if let Some(budget) = &report.reference_budget {
                    println!("\n# {} reference budget (best sample)", scenario.name);
                    print!("{}", budget.to_csv());
                }
                if let Some(dir) = &common.out {
                    emit_report(&report, dir)?;
                }
            }
            Ok(true)
        }
        Command::Bell { common, fidelity, trials } => {
            let p = werner_p_from_fidelity(fidelity).clamp(0.0, 1.0);
            let state = TwoQubitState::werner(BellState::PhiPlus, p).map_err(MissionError::from)?;
            let settings = ChshSettings::optimal();
            let analytic = chsh_analytic(&state, settings);
            let sampled = chsh_sampled(&state, settings, trials, common.seed.unwrap_or(1)).map_err(MissionError::from)?;
            println!("setting_a,setting_b,E,stderr");
            for c in &sampled.correlations {
                println!(
                    "{:.3},{:.3},{:.6},{:.6}",
                    c.setting_a_rad.to_degrees(),
                    c.setting_b_rad.to_degrees(),
                    c.e,
                    c.stderr
                );
            }
            println!("S_analytic = {analytic:.4}");
            println!("S_sampled  = {:.4} +- {:.4}  ({trials} trials)", sampled.s, sampled.standard_error);
            println!("classical bound 2, quantum bound {:.4}", 2.0 * std::f64::consts::SQRT_2);
            Ok(true)
        }
        Command::Gravity {
            common,
            altitude_km,
            target_d,
            reference_angle_deg,
        } => {
            let earth = gravity::EarthModel::default();
            let h_m = altitude_km * 1000.0;
            let d_t = gravity::calibrate_coherence_time(&earth, h_m, reference_angle_deg, target_d, gravity::Formulation::LocalClock)
                .map_err(MissionError::from)?;
            println!("# coherence time {d_t:.4e} s calibrated at D({reference_angle_deg}) = {target_d}");
            println!("theta_deg,delta_t_s,D");
            let mut theta = 15.0;
            while theta <= 90.0 {
                let dt = gravity::delta_t(&earth, h_m, theta, gravity::Formulation::LocalClock).map_err(MissionError::from)?;
                println!("{theta},{dt:.6e},{:.6}", gravity::decorrelation_d(dt, d_t));
                theta += 5.0;
            }
            let _ = common;
            Ok(true)
        }
        Command::Plan {
            common,
            satellites,
            altitude_km,
            station_latitude_deg,
            min_elevation_deg,
            days,
            stations,
            key_per_pass_bits,
            passes_per_station_year,
        } => {
            let orbit = geometry::OrbitSpec::new(altitude_km).map_err(MissionError::from)?;
            let station =
                geometry::GroundStation::new("station", station_latitude_deg, 0.0, min_elevation_deg).map_err(MissionError::from)?;
            let plan = ConstellationPlan {
                satellites: vec![orbit; satellites as usize],
                station,
                days,
                seed: common.seed.unwrap_or(43),
                key_per_pass_bits,
                passes_per_station_year,
            };
            let report = mission::constellation_throughput(&plan, stations);
            println!("passes_per_day = {:.3}", report.passes_per_day);
            println!("mean_pass_duration_s = {:.1}", report.mean_pass_duration_s);
            println!("passes_per_station_year = {:.1}", report.passes_per_station_year);
            println!("key_per_pass_bits = {}", report.key_per_pass_bits);
            println!("per_station_bits_per_year = {:.3e}", report.per_station_bits_per_year);
            println!("aggregate_bits_per_year = {:.3e}", report.aggregate_bits_per_year);
            Ok(true)
        }
        Command::Keys { common } => {
            let dir = common.out.clone().context("--out <dir> points at the report's keys/ directory")?;
            let store = KeyStore::open(&dir)?;
            println!("id,owners,bytes,consumed,provenance");
            for k in store.keys() {
                println!(
                    "{},{}<->{},{},{},{}",
                    k.id,
                    k.owners.0,
                    k.owners.1,
                    k.bytes.len(),
                    k.consumed,
                    k.provenance.join("+")
                );
            }
            Ok(true)
        }
    }
}
