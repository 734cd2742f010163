//! End-to-end scenario orchestration: couples pass geometry, link budgets,
//! photonics, and protocols into per-pass mission reports.

mod keystore;
mod presets;
mod runners;

pub use keystore::KeyStore;
pub use presets::{load_preset, preset_names, PRESET_ENV_VAR};
pub use runners::{constellation_throughput, intercontinental_demo, ConstellationPlan, RelayDemo, ThroughputReport};

use crate::geometry::{GroundStation, OrbitSpec};
use crate::gravity::DecoherenceEstimate;
use crate::link::{AtmosphereModel, LinkBudget, TurbulenceModel};
use crate::photonics::{DetectorModel, SyncModel};
use crate::qkd::SecureKeyResult;
use crate::quantum::{ChshResult, FidelityExperiment};
use crate::scenario::{parse_scenario_text, ScenarioError, ScenarioFile, Section};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("geometry: {0}")]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("link: {0}")]
    Link(#[from] crate::link::LinkError),
    #[error("photonics: {0}")]
    Photonics(#[from] crate::photonics::PhotonicsError),
    #[error("qkd: {0}")]
    Qkd(#[from] crate::qkd::QkdError),
    #[error("quantum: {0}")]
    Quantum(#[from] crate::quantum::QuantumError),
    #[error("gravity: {0}")]
    Gravity(#[from] crate::gravity::GravityError),
    #[error("insufficient key: need {need} bytes, have {have}")]
    InsufficientKey { need: usize, have: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// The mission archetypes a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissionKind {
    DownlinkQkd,
    TwoDownlinkEntanglement,
    UplinkTeleportation,
    RelayExchange,
    GravityTest,
    ConstellationPlan,
}

impl MissionKind {
    pub fn parse(text: &str) -> Result<Self, MissionError> {
        match text {
            "downlink-qkd" => Ok(Self::DownlinkQkd),
            "two-downlink-entanglement" => Ok(Self::TwoDownlinkEntanglement),
            "uplink-teleportation" => Ok(Self::UplinkTeleportation),
            "relay-exchange" => Ok(Self::RelayExchange),
            "gravity-test" => Ok(Self::GravityTest),
            "constellation-plan" => Ok(Self::ConstellationPlan),
            other => Err(MissionError::Config(format!(
                "[mission] kind `{other}` is not one of downlink-qkd, two-downlink-entanglement, \
                 uplink-teleportation, relay-exchange, gravity-test, constellation-plan"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DownlinkQkd => "downlink-qkd",
            Self::TwoDownlinkEntanglement => "two-downlink-entanglement",
            Self::UplinkTeleportation => "uplink-teleportation",
            Self::RelayExchange => "relay-exchange",
            Self::GravityTest => "gravity-test",
            Self::ConstellationPlan => "constellation-plan",
        }
    }
}

/// One participating station plus its optics and pass parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct StationConfig {
    pub station: GroundStation,
    pub aperture_diameter_m: f64,
    pub peak_elevation_deg: f64,
    pub peak_offset_s: f64,
    pub background_hz: f64,
}

/// Photon source: weak coherent pulses or an entangled-pair source.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceConfig {
    Wcp {
        rep_rate_hz: f64,
        mu_signal: f64,
        mu_decoy: f64,
        p_signal: f64,
        p_decoy: f64,
        basis_bias: f64,
    },
    Spdc { pair_rate_hz: f64, fidelity: f64 },
}

/// Optics shared by every kind: wavelength, divergence, chain efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticsConfig {
    pub wavelength_m: f64,
    pub divergence_rad: f64,
    pub transmitter_efficiency: f64,
    pub receiver_efficiency: f64,
    pub coupling_efficiency: f64,
}

/// Detector block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub detector: DetectorModel,
    pub sync: SyncModel,
}

/// Atmosphere and pointing block.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmosphereConfig {
    pub atmosphere: AtmosphereModel,
    pub turbulence: Option<TurbulenceModel>,
    pub tracking_error_rad: f64,
}

/// Protocol post-processing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub f_ec: f64,
    pub epsilon: f64,
    pub misalignment_error: f64,
    pub bob_basis_bias: f64,
    pub intercept_fraction: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            f_ec: 1.16,
            epsilon: 1e-9,
            misalignment_error: 0.01,
            bob_basis_bias: 0.5,
            intercept_fraction: 0.0,
        }
    }
}

/// Run-size knobs and per-kind extras.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Sampled pulses for QKD Monte Carlo (spread over the pass).
    pub pulses: u64,
    /// Fixed-loss override: skip geometry and hold this channel loss.
    pub fixed_loss_db: Option<f64>,
    /// Duration for fixed-loss runs, s.
    pub duration_s: f64,
    /// Bell-test trials.
    pub trials: u64,
    /// Teleportation four-photon events for the fidelity benchmark.
    pub events: u64,
    /// QKD passes per station pair for relay scenarios.
    pub passes: u64,
    pub relay_budget_bytes: usize,
    pub payload_forward_bytes: usize,
    pub payload_return_bytes: usize,
    /// Gravity: calibration target D at the reference angle.
    pub target_d: f64,
    pub reference_angle_deg: f64,
    /// Teleportation channel quality and accidental floor.
    pub channel_fidelity: f64,
    pub accidental_floor: f64,
    /// Constellation planning inputs.
    pub days: u32,
    pub satellites: u32,
    pub stations_covered: u32,
    pub key_per_pass_bits: u64,
    pub passes_per_station_year: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pulses: 10_000_000,
            fixed_loss_db: None,
            duration_s: 300.0,
            trials: 1167,
            events: 911,
            passes: 2,
            relay_budget_bytes: 100_000,
            payload_forward_bytes: 5340,
            payload_return_bytes: 4900,
            target_d: 0.97,
            reference_angle_deg: 50.0,
            channel_fidelity: 0.739,
            accidental_floor: 0.08,
            days: 120,
            satellites: 3,
            stations_covered: 100,
            key_per_pass_bits: 2_000_000,
            passes_per_station_year: Some(50),
        }
    }
}

/// A fully validated mission scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: MissionKind,
    pub orbit: OrbitSpec,
    pub stations: Vec<StationConfig>,
    pub source: SourceConfig,
    pub optics: OpticsConfig,
    pub detectors: DetectorConfig,
    pub atmosphere: AtmosphereConfig,
    pub protocol: ProtocolConfig,
    pub run: RunConfig,
    pub seed: u64,
}

impl Scenario {
    /// Load and validate a scenario from parsed text.
    pub fn from_text(name: &str, text: &str) -> Result<Self, MissionError> {
        let doc = parse_scenario_text(text)?;
        Self::from_document(name, &doc)
    }

    /// Load a named preset.
    pub fn preset(name: &str) -> Result<Self, MissionError> {
        let text = load_preset(name)?;
        Self::from_text(name, &text)
    }

    pub fn from_document(name: &str, doc: &ScenarioFile) -> Result<Self, MissionError> {
        let mission = doc.require_section("mission")?;
        let kind = MissionKind::parse(mission.require("kind")?.as_text())?;
        let scenario_name = mission
            .get("name")
            .map(|v| v.as_text().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| name.to_string());

        let orbit_section = doc.require_section("orbit")?;
        let orbit = OrbitSpec::new(orbit_section.require("altitude")?.as_f64())
            .map_err(|e| MissionError::Config(format!("[orbit] altitude: {e}")))?;

        let mut stations = Vec::new();
        for sec in doc.all("station") {
            stations.push(parse_station(sec)?);
        }
        let required_stations = match kind {
            MissionKind::TwoDownlinkEntanglement | MissionKind::RelayExchange => 2,
            _ => 1,
        };
        if stations.len() < required_stations {
            return Err(MissionError::Config(format!(
                "mission kind {} needs at least {required_stations} [station] sections, found {}",
                kind.as_str(),
                stations.len()
            )));
        }

        let source_section = doc.require_section("source")?;
        let (source, optics) = parse_source(source_section, doc.first("detectors"))?;
        let detectors = parse_detectors(doc.first("detectors"))?;
        let atmosphere = parse_atmosphere(doc.first("atmosphere"))?;
        let protocol = parse_protocol(doc.first("protocol"))?;
        let run = parse_run(mission)?;
        let seed = doc.first("seeds").and_then(|s| s.get("master")).map(|v| v.as_u64()).unwrap_or(1);

        Ok(Self {
            name: scenario_name,
            kind,
            orbit,
            stations,
            source,
            optics,
            detectors,
            atmosphere,
            protocol,
            run,
            seed,
        })
    }

    /// Dispatch to the mission-specific runner.
    pub fn run(&self) -> Result<MissionReport, MissionError> {
        runners::run_scenario(self)
    }
}

fn parse_station(sec: &Section) -> Result<StationConfig, MissionError> {
    let name = sec.require("name")?.as_text().to_string();
    let latitude = sec.require("latitude")?.as_f64();
    let altitude_above_sea_km = sec.get("altitude_above_sea").map(|v| v.as_f64()).unwrap_or(0.0);
    let min_elevation = sec.get("min_elevation").map(|v| v.as_f64()).unwrap_or(10.0);
    let station = GroundStation::new(&name, latitude, altitude_above_sea_km * 1000.0, min_elevation)
        .map_err(|e| MissionError::Config(format!("[station] {name}: {e}")))?;
    Ok(StationConfig {
        station,
        aperture_diameter_m: sec.get("aperture_diameter").map(|v| v.as_f64() * 1000.0).unwrap_or(1.2),
        peak_elevation_deg: sec.get("peak_elevation").map(|v| v.as_f64()).unwrap_or(90.0),
        peak_offset_s: sec.get("peak_offset").map(|v| v.as_f64()).unwrap_or(0.0),
        background_hz: sec.get("background").map(|v| v.as_f64()).unwrap_or(500.0),
    })
}

fn parse_source(sec: &Section, detectors: Option<&Section>) -> Result<(SourceConfig, OpticsConfig), MissionError> {
    let kind = sec.require("type")?.as_text().to_string();
    let optics = OpticsConfig {
        wavelength_m: sec.get("wavelength").map(|v| v.as_f64() * 1000.0).unwrap_or(850e-9),
        divergence_rad: sec
            .get("divergence")
            .map(|v| v.as_f64().to_radians())
            .unwrap_or(10e-6),
        transmitter_efficiency: sec.get("transmitter_efficiency").map(|v| v.as_f64()).unwrap_or(0.5),
        receiver_efficiency: detectors
            .and_then(|d| d.get("receiver_efficiency"))
            .map(|v| v.as_f64())
            .unwrap_or(0.4),
        coupling_efficiency: detectors
            .and_then(|d| d.get("coupling_efficiency"))
            .map(|v| v.as_f64())
            .unwrap_or(0.5),
    };
    let source = match kind.as_str() {
        "wcp" => SourceConfig::Wcp {
            rep_rate_hz: sec.require("rep_rate")?.as_f64(),
            mu_signal: sec.get("mu_signal").map(|v| v.as_f64()).unwrap_or(0.8),
            mu_decoy: sec.get("mu_decoy").map(|v| v.as_f64()).unwrap_or(0.1),
            p_signal: sec.get("p_signal").map(|v| v.as_f64()).unwrap_or(0.5),
            p_decoy: sec.get("p_decoy").map(|v| v.as_f64()).unwrap_or(0.25),
            basis_bias: sec.get("basis_bias").map(|v| v.as_f64()).unwrap_or(0.5),
        },
        "spdc" => SourceConfig::Spdc {
            pair_rate_hz: sec.require("pair_rate")?.as_f64(),
            fidelity: sec.get("fidelity").map(|v| v.as_f64()).unwrap_or(0.907),
        },
        other => {
            return Err(MissionError::Config(format!(
                "[source] type `{other}` is not one of wcp, spdc"
            )))
        }
    };
    Ok((source, optics))
}

fn parse_detectors(sec: Option<&Section>) -> Result<DetectorConfig, MissionError> {
    let efficiency = sec.and_then(|s| s.get("efficiency")).map(|v| v.as_f64()).unwrap_or(0.5);
    let dark = sec.and_then(|s| s.get("dark_rate")).map(|v| v.as_f64()).unwrap_or(150.0);
    let mut detector = DetectorModel::new(efficiency, dark).map_err(|e| MissionError::Config(format!("[detectors]: {e}")))?;
    if let Some(tau) = sec.and_then(|s| s.get("dead_time")) {
        detector.dead_time_s = tau.as_f64();
    }
    let jitter = sec.and_then(|s| s.get("timing_jitter")).map(|v| v.as_f64()).unwrap_or(529e-12);
    let window = sec.and_then(|s| s.get("coincidence_window")).map(|v| v.as_f64()).unwrap_or(2e-9);
    let sync = SyncModel::new(10e3, jitter, window).map_err(|e| MissionError::Config(format!("[detectors]: {e}")))?;
    Ok(DetectorConfig { detector, sync })
}

fn parse_atmosphere(sec: Option<&Section>) -> Result<AtmosphereConfig, MissionError> {
    let t_z = sec
        .and_then(|s| s.get("zenith_transmittance"))
        .map(|v| v.as_f64())
        .unwrap_or(0.725);
    let visibility = sec
        .and_then(|s| s.get("visibility"))
        .map(|v| v.as_text().to_string())
        .unwrap_or_else(|| "clear-night".to_string());
    let atmosphere = AtmosphereModel::new(t_z, &visibility).map_err(|e| MissionError::Config(format!("[atmosphere]: {e}")))?;
    let rytov = sec.and_then(|s| s.get("rytov_variance")).map(|v| v.as_f64()).unwrap_or(0.0);
    let fresnel = sec.and_then(|s| s.get("fresnel_ratio")).map(|v| v.as_f64()).unwrap_or(0.0);
    let turbulence = if rytov > 0.0 {
        Some(TurbulenceModel::new(rytov, fresnel).map_err(|e| MissionError::Config(format!("[atmosphere]: {e}")))?)
    } else {
        None
    };
    Ok(AtmosphereConfig {
        atmosphere,
        turbulence,
        tracking_error_rad: sec
            .and_then(|s| s.get("tracking_error"))
            .map(|v| v.as_f64().to_radians())
            .unwrap_or(1.2e-6),
    })
}

fn parse_protocol(sec: Option<&Section>) -> Result<ProtocolConfig, MissionError> {
    let d = ProtocolConfig::default();
    Ok(ProtocolConfig {
        f_ec: sec.and_then(|s| s.get("f_ec")).map(|v| v.as_f64()).unwrap_or(d.f_ec),
        epsilon: sec.and_then(|s| s.get("epsilon")).map(|v| v.as_f64()).unwrap_or(d.epsilon),
        misalignment_error: sec
            .and_then(|s| s.get("misalignment_error"))
            .map(|v| v.as_f64())
            .unwrap_or(d.misalignment_error),
        bob_basis_bias: sec
            .and_then(|s| s.get("bob_basis_bias"))
            .map(|v| v.as_f64())
            .unwrap_or(d.bob_basis_bias),
        intercept_fraction: sec
            .and_then(|s| s.get("intercept_fraction"))
            .map(|v| v.as_f64())
            .unwrap_or(d.intercept_fraction),
    })
}

fn parse_run(mission: &Section) -> Result<RunConfig, MissionError> {
    let d = RunConfig::default();
    Ok(RunConfig {
        pulses: mission.get("pulses").map(|v| v.as_u64()).unwrap_or(d.pulses),
        fixed_loss_db: mission.get("fixed_loss").map(|v| v.as_f64()),
        duration_s: mission.get("duration").map(|v| v.as_f64()).unwrap_or(d.duration_s),
        trials: mission.get("trials").map(|v| v.as_u64()).unwrap_or(d.trials),
        events: mission.get("events").map(|v| v.as_u64()).unwrap_or(d.events),
        passes: mission.get("passes").map(|v| v.as_u64()).unwrap_or(d.passes),
        relay_budget_bytes: mission
            .get("relay_budget_bytes")
            .map(|v| v.as_u64() as usize)
            .unwrap_or(d.relay_budget_bytes),
        payload_forward_bytes: mission
            .get("payload_forward_bytes")
            .map(|v| v.as_u64() as usize)
            .unwrap_or(d.payload_forward_bytes),
        payload_return_bytes: mission
            .get("payload_return_bytes")
            .map(|v| v.as_u64() as usize)
            .unwrap_or(d.payload_return_bytes),
        target_d: mission.get("target_d").map(|v| v.as_f64()).unwrap_or(d.target_d),
        reference_angle_deg: mission.get("reference_angle").map(|v| v.as_f64()).unwrap_or(d.reference_angle_deg),
        channel_fidelity: mission.get("channel_fidelity").map(|v| v.as_f64()).unwrap_or(d.channel_fidelity),
        accidental_floor: mission.get("accidental_floor").map(|v| v.as_f64()).unwrap_or(d.accidental_floor),
        days: mission.get("days").map(|v| v.as_u64() as u32).unwrap_or(d.days),
        satellites: mission.get("satellites").map(|v| v.as_u64() as u32).unwrap_or(d.satellites),
        stations_covered: mission.get("stations_covered").map(|v| v.as_u64() as u32).unwrap_or(d.stations_covered),
        key_per_pass_bits: mission.get("key_per_pass_bits").map(|v| v.as_u64()).unwrap_or(d.key_per_pass_bits),
        passes_per_station_year: mission
            .get("passes_per_station_year")
            .map(|v| v.as_u64())
            .or(d.passes_per_station_year),
    })
}

/// Practical mission requirements used for report verdicts.
pub mod requirements {
    pub const QKD_MAX_LOSS_DB: f64 = 40.0;
    pub const QKD_MIN_RAW_RATE_HZ: f64 = 1000.0;
    pub const QKD_MAX_QBER: f64 = 0.035;
    pub const QKD_EXPERIMENT_TIME_S: f64 = 20_000.0;
    pub const ENT_MIN_COINCIDENCES: f64 = 1000.0;
    pub const ENT_MIN_FIDELITY: f64 = 0.85;
    pub const ENT_MAX_LOSS_DB: f64 = 80.0;
    pub const ENT_EXPERIMENT_TIME_S: f64 = 10_000.0;
    pub const TELE_MIN_COINCIDENCES: f64 = 400.0;
    pub const TELE_MIN_FIDELITY: f64 = 0.75;
    pub const TELE_MAX_LOSS_DB: f64 = 55.0;
    pub const TELE_EXPERIMENT_TIME_S: f64 = 40_000.0;
}

/// Comparison direction of a requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    AtMost,
    AtLeast,
}

/// One requirement check in a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub sense: Sense,
}

impl Verdict {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            sense: Sense::AtMost,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            sense: Sense::AtLeast,
        }
    }

    pub fn pass(&self) -> bool {
        match self.sense {
            Sense::AtMost => self.value <= self.threshold,
            Sense::AtLeast => self.value >= self.threshold,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = match self.sense {
            Sense::AtMost => "<=",
            Sense::AtLeast => ">=",
        };
        write!(
            f,
            "[{}] {}: {:.6} {op} {:.6}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

/// One time sample of the loss profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSample {
    pub t_s: f64,
    pub elevation_deg: f64,
    pub range_km: f64,
    pub loss_db: f64,
    /// Kind-specific rate at this sample (sifted bits/s, coincidences/s, or
    /// teleport events/s).
    pub rate_hz: f64,
    pub qber: f64,
}

/// QKD aggregates for a pass.
#[derive(Debug, Clone, PartialEq)]
pub struct QkdSummary {
    pub mean_sifted_rate_hz: f64,
    pub mean_qber: f64,
    pub pass_sifted_bits: u64,
    /// Signal-class sifted count actually observed in the sampled Monte
    /// Carlo, with its analytic expectation, for consistency checks.
    pub mc_sifted_bits: u64,
    pub mc_expected_sifted: f64,
    pub secure: SecureKeyResult,
    /// Distilled key bytes from the sampled transcript (error-corrected and
    /// amplified), or empty if reconciliation failed.
    pub final_key: Vec<u8>,
    pub reconciliation_leak_bits: u64,
}

/// Coincidence aggregates for entanglement distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceSummary {
    pub mean_rate_hz: f64,
    pub mean_snr: f64,
    pub total_coincidences: f64,
    pub effective_fidelity: f64,
}

/// Gravity sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityRow {
    pub theta_deg: f64,
    pub delta_t_general_s: f64,
    pub delta_t_local_s: f64,
    pub d: f64,
}

/// Gravity-test results.
#[derive(Debug, Clone, PartialEq)]
pub struct GravitySummary {
    pub coherence_time_s: f64,
    pub rows: Vec<GravityRow>,
    pub injected: Vec<(f64, DecoherenceEstimate)>,
}

/// Everything a scenario run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionReport {
    pub scenario_name: String,
    pub kind: MissionKind,
    pub seed: u64,
    pub duration_s: f64,
    pub samples: Vec<LossSample>,
    /// Budget at the best (peak-elevation) sample.
    pub reference_budget: Option<LinkBudget>,
    pub tracks: Vec<crate::geometry::PassTrack>,
    pub qkd: Option<QkdSummary>,
    pub bell: Option<(f64, ChshResult)>,
    pub coincidences: Option<CoincidenceSummary>,
    pub teleport: Option<FidelityExperiment>,
    pub gravity: Option<GravitySummary>,
    pub relay: Option<RelayDemo>,
    pub throughput: Option<ThroughputReport>,
    pub verdicts: Vec<Verdict>,
    /// Calibration flags and caveats surfaced in the summary.
    pub notes: Vec<String>,
}

impl MissionReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(Verdict::pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_flip_at_thresholds() {
        use requirements::*;
        for (value, expect) in [(39.9, true), (40.0, true), (40.1, false)] {
            let v = Verdict::at_most("total channel loss (dB)", value, QKD_MAX_LOSS_DB);
            assert_eq!(v.pass(), expect, "loss {value}");
        }
        for (value, expect) in [(999.9, false), (1000.0, true), (1000.1, true)] {
            let v = Verdict::at_least("raw key rate (bit/s)", value, QKD_MIN_RAW_RATE_HZ);
            assert_eq!(v.pass(), expect, "rate {value}");
        }
        for (value, expect) in [(0.034, true), (0.035, true), (0.036, false)] {
            let v = Verdict::at_most("QBER", value, QKD_MAX_QBER);
            assert_eq!(v.pass(), expect, "qber {value}");
        }
        for (value, expect) in [(999.0, false), (1000.0, true)] {
            let v = Verdict::at_least("coincidences", value, ENT_MIN_COINCIDENCES);
            assert_eq!(v.pass(), expect);
        }
        for (value, expect) in [(0.849, false), (0.85, true)] {
            let v = Verdict::at_least("effective fidelity", value, ENT_MIN_FIDELITY);
            assert_eq!(v.pass(), expect);
        }
        for (value, expect) in [(80.0, true), (80.5, false)] {
            let v = Verdict::at_most("two-link loss (dB)", value, ENT_MAX_LOSS_DB);
            assert_eq!(v.pass(), expect);
        }
        for (value, expect) in [(54.9, true), (55.1, false)] {
            let v = Verdict::at_most("uplink loss (dB)", value, TELE_MAX_LOSS_DB);
            assert_eq!(v.pass(), expect);
        }
        for (value, expect) in [(0.74, false), (0.76, true)] {
            let v = Verdict::at_least("teleport fidelity", value, TELE_MIN_FIDELITY);
            assert_eq!(v.pass(), expect);
        }
        for (value, expect) in [(399.0, false), (401.0, true)] {
            let v = Verdict::at_least("four-photon events", value, TELE_MIN_COINCIDENCES);
            assert_eq!(v.pass(), expect);
        }
    }

    #[test]
    fn mission_kind_round_trip() {
        for kind in [
            MissionKind::DownlinkQkd,
            MissionKind::TwoDownlinkEntanglement,
            MissionKind::UplinkTeleportation,
            MissionKind::RelayExchange,
            MissionKind::GravityTest,
            MissionKind::ConstellationPlan,
        ] {
            assert_eq!(MissionKind::parse(kind.as_str()).unwrap(), kind);
        }
        assert!(MissionKind::parse("warp").is_err());
    }
}
