//! Scenario-file parsing: a sectioned key-value text format with mandatory
//! unit suffixes.
//!
//! ```text
//! [mission]
//! kind = downlink-qkd
//! pulses = 10000000
//!
//! [orbit]
//! altitude = 500 km
//!
//! [station]
//! name = xinglong
//! latitude = 40.4 deg
//! ...
//! ```
//!
//! Sections: mission, orbit, station (repeatable), source, detectors,
//! atmosphere, protocol, seeds. Unknown keys are rejected with the nearest
//! known key; dimensioned values without a unit are rejected naming the
//! key. Numbers round-trip at 12 significant digits, so emitted files parse
//! back to the same scenario.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: cannot parse `{text}`")]
    Parse { line: usize, text: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}` in [{section}]; nearest known key is `{nearest}`")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
        nearest: String,
    },
    #[error("line {line}: key `{key}` needs a {expected} unit ({accepted}); got `{got}`")]
    Unit {
        line: usize,
        key: String,
        expected: &'static str,
        accepted: &'static str,
        got: String,
    },
    #[error("line {line}: value `{value}` for `{key}` is not a number")]
    Number { line: usize, key: String, value: String },
    #[error("[{section}] missing required key `{key}`")]
    MissingKey { section: String, key: String },
    #[error("missing required section [{0}]")]
    MissingSection(String),
    #[error("validation: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(String),
}

/// Physical dimension a key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// km / m / mm (stored in the declared canonical unit).
    Length,
    /// deg / rad / mrad / urad.
    Angle,
    /// s / ms / us / ns / ps.
    Time,
    /// Hz / kHz / MHz / GHz.
    Rate,
    /// dB value.
    Decibel,
    /// Bare number.
    Scalar,
    /// Integer count.
    Count,
    /// Free-form token.
    Text,
}

impl Dimension {
    fn accepted(&self) -> &'static str {
        match self {
            Dimension::Length => "km, m, mm, um, nm",
            Dimension::Angle => "deg, rad, mrad, urad",
            Dimension::Time => "s, ms, us, ns, ps",
            Dimension::Rate => "Hz, kHz, MHz, GHz",
            Dimension::Decibel => "dB",
            Dimension::Scalar => "none",
            Dimension::Count => "none",
            Dimension::Text => "none",
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Angle => "angle",
            Dimension::Time => "time",
            Dimension::Rate => "rate",
            Dimension::Decibel => "dB",
            Dimension::Scalar => "scalar",
            Dimension::Count => "count",
            Dimension::Text => "text",
        }
    }
}

/// A parsed value with provenance for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Integer(u64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Number(x) => *x,
            Value::Integer(n) => *n as f64,
            Value::Text(_) => f64::NAN,
        }
    }

    pub fn as_u64(&self) -> u64 {
        match self {
            Value::Integer(n) => *n,
            Value::Number(x) => *x as u64,
            Value::Text(_) => 0,
        }
    }

    pub fn as_text(&self) -> &str {
        match self {
            Value::Text(s) => s,
            _ => "",
        }
    }
}

/// One parsed section instance, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub values: BTreeMap<String, Value>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn require(&self, key: &str) -> Result<&Value, ScenarioError> {
        self.get(key).ok_or_else(|| ScenarioError::MissingKey {
            section: self.name.clone(),
            key: key.to_string(),
        })
    }
}

/// A fully parsed scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub sections: Vec<Section>,
}

impl ScenarioFile {
    pub fn first(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require_section(&self, name: &str) -> Result<&Section, ScenarioError> {
        self.first(name).ok_or_else(|| ScenarioError::MissingSection(name.to_string()))
    }

    pub fn all(&self, name: &str) -> Vec<&Section> {
        self.sections.iter().filter(|s| s.name == name).collect()
    }
}

/// Schema entry: key, expected dimension, canonical unit scale factors.
struct KeySpec {
    key: &'static str,
    dim: Dimension,
}

const fn k(key: &'static str, dim: Dimension) -> KeySpec {
    KeySpec { key, dim }
}

fn section_schema(section: &str) -> Option<&'static [KeySpec]> {
    use Dimension::*;
    const MISSION: &[KeySpec] = &[
        k("kind", Text),
        k("name", Text),
        k("pulses", Count),
        k("duration", Time),
        k("fixed_loss", Decibel),
        k("trials", Count),
        k("events", Count),
        k("passes", Count),
        k("relay_budget_bytes", Count),
        k("payload_forward_bytes", Count),
        k("payload_return_bytes", Count),
        k("target_d", Scalar),
        k("reference_angle", Angle),
        k("channel_fidelity", Scalar),
        k("accidental_floor", Scalar),
        k("days", Count),
        k("satellites", Count),
        k("stations_covered", Count),
        k("key_per_pass_bits", Count),
        k("passes_per_station_year", Count),
    ];
    const ORBIT: &[KeySpec] = &[k("altitude", Length)];
    const STATION: &[KeySpec] = &[
        k("name", Text),
        k("latitude", Angle),
        k("altitude_above_sea", Length),
        k("min_elevation", Angle),
        k("aperture_diameter", Length),
        k("peak_elevation", Angle),
        k("peak_offset", Time),
        k("background", Rate),
    ];
    const SOURCE: &[KeySpec] = &[
        k("type", Text),
        k("rep_rate", Rate),
        k("mu_signal", Scalar),
        k("mu_decoy", Scalar),
        k("p_signal", Scalar),
        k("p_decoy", Scalar),
        k("basis_bias", Scalar),
        k("wavelength", Length),
        k("divergence", Angle),
        k("pair_rate", Rate),
        k("fidelity", Scalar),
        k("transmitter_efficiency", Scalar),
    ];
    const DETECTORS: &[KeySpec] = &[
        k("efficiency", Scalar),
        k("dark_rate", Rate),
        k("dead_time", Time),
        k("timing_jitter", Time),
        k("coincidence_window", Time),
        k("receiver_efficiency", Scalar),
        k("coupling_efficiency", Scalar),
    ];
    const ATMOSPHERE: &[KeySpec] = &[
        k("zenith_transmittance", Scalar),
        k("visibility", Text),
        k("rytov_variance", Scalar),
        k("fresnel_ratio", Scalar),
        k("tracking_error", Angle),
    ];
    const PROTOCOL: &[KeySpec] = &[
        k("f_ec", Scalar),
        k("epsilon", Scalar),
        k("misalignment_error", Scalar),
        k("bob_basis_bias", Scalar),
        k("intercept_fraction", Scalar),
    ];
    const SEEDS: &[KeySpec] = &[k("master", Count)];
    match section {
        "mission" => Some(MISSION),
        "orbit" => Some(ORBIT),
        "station" => Some(STATION),
        "source" => Some(SOURCE),
        "detectors" => Some(DETECTORS),
        "atmosphere" => Some(ATMOSPHERE),
        "protocol" => Some(PROTOCOL),
        "seeds" => Some(SEEDS),
        _ => None,
    }
}

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur.push((prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

fn nearest_key(section: &str, key: &str) -> String {
    section_schema(section)
        .unwrap_or(&[])
        .iter()
        .min_by_key(|spec| edit_distance(spec.key, key))
        .map(|spec| spec.key.to_string())
        .unwrap_or_default()
}

/// Unit conversion to the canonical unit of each dimension (km for length,
/// degrees for angles, seconds for time, Hz for rates).
fn unit_factor(dim: Dimension, unit: &str) -> Option<f64> {
    match dim {
        Dimension::Length => match unit {
            "km" => Some(1.0),
            "m" => Some(1e-3),
            "mm" => Some(1e-6),
            "um" => Some(1e-9),
            "nm" => Some(1e-12),
            _ => None,
        },
        Dimension::Angle => match unit {
            "deg" => Some(1.0),
            "rad" => Some(57.295_779_513_082_32),
            "mrad" => Some(57.295_779_513_082_32e-3),
            "urad" => Some(57.295_779_513_082_32e-6),
            _ => None,
        },
        Dimension::Time => match unit {
            "s" => Some(1.0),
            "ms" => Some(1e-3),
            "us" => Some(1e-6),
            "ns" => Some(1e-9),
            "ps" => Some(1e-12),
            _ => None,
        },
        Dimension::Rate => match unit {
            "Hz" => Some(1.0),
            "kHz" => Some(1e3),
            "MHz" => Some(1e6),
            "GHz" => Some(1e9),
            _ => None,
        },
        Dimension::Decibel => match unit {
            "dB" => Some(1.0),
            _ => None,
        },
        Dimension::Scalar | Dimension::Count | Dimension::Text => None,
    }
}

fn parse_value(dim: Dimension, key: &str, raw: &str, line: usize) -> Result<Value, ScenarioError> {
    let raw = raw.trim();
    match dim {
        Dimension::Text => Ok(Value::Text(raw.to_string())),
        Dimension::Scalar => raw
            .parse::<f64>()
            .map(Value::Number)
            .map_err(|_| ScenarioError::Number {
                line,
                key: key.to_string(),
                value: raw.to_string(),
            }),
        Dimension::Count => raw
            .parse::<u64>()
            .map(Value::Integer)
            .map_err(|_| ScenarioError::Number {
                line,
                key: key.to_string(),
                value: raw.to_string(),
            }),
        _ => {
            let mut parts = raw.split_whitespace();
            let num = parts.next().unwrap_or("");
            let unit = parts.next().unwrap_or("");
            let x: f64 = num.parse().map_err(|_| ScenarioError::Number {
                line,
                key: key.to_string(),
                value: raw.to_string(),
            })?;
            let Some(factor) = unit_factor(dim, unit) else {
                return Err(ScenarioError::Unit {
                    line,
                    key: key.to_string(),
                    expected: dim.name(),
                    accepted: dim.accepted(),
                    got: if unit.is_empty() { "(no unit)".to_string() } else { unit.to_string() },
                });
            };
            Ok(Value::Number(x * factor))
        }
    }
}

/// Parse a scenario document from text.
pub fn parse_scenario_text(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|rest| rest.strip_suffix(']')) {
            let name = name.trim().to_string();
            if section_schema(&name).is_none() {
                return Err(ScenarioError::UnknownSection { line: line_no, name });
            }
            sections.push(Section {
                name,
                line: line_no,
                values: BTreeMap::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::Parse {
                line: line_no,
                text: line.to_string(),
            });
        };
        let key = key.trim().to_string();
        let Some(section) = sections.last_mut() else {
            return Err(ScenarioError::Parse {
                line: line_no,
                text: line.to_string(),
            });
        };
        let schema = section_schema(&section.name).unwrap();
        let Some(spec) = schema.iter().find(|spec| spec.key == key) else {
            return Err(ScenarioError::UnknownKey {
                line: line_no,
                section: section.name.clone(),
                key: key.clone(),
                nearest: nearest_key(&section.name, &key),
            });
        };
        let parsed = parse_value(spec.dim, &key, value, line_no)?;
        section.values.insert(key, parsed);
    }
    Ok(ScenarioFile { sections })
}

/// Parse a scenario document from a file path.
pub fn parse_scenario_file(path: &std::path::Path) -> Result<ScenarioFile, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_text(&text)
}

impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sections {
            writeln!(f, "[{}]", s.name)?;
            for (key, v) in &s.values {
                match v {
                    Value::Text(t) => writeln!(f, "{key} = {t}")?,
                    Value::Integer(n) => writeln!(f, "{key} = {n}")?,
                    Value::Number(x) => {
                        let dim = section_schema(&s.name)
                            .unwrap()
                            .iter()
                            .find(|spec| spec.key == key.as_str())
                            .map(|spec| spec.dim)
                            .unwrap_or(Dimension::Scalar);
                        let unit = match dim {
                            Dimension::Length => " km",
                            Dimension::Angle => " deg",
                            Dimension::Time => " s",
                            Dimension::Rate => " Hz",
                            Dimension::Decibel => " dB",
                            _ => "",
                        };
                        writeln!(f, "{key} = {}{unit}", crate::util::fmt_sig12(*x))?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample scenario
[mission]
kind = downlink-qkd
pulses = 10000000

[orbit]
altitude = 500 km

[station]
name = xinglong
latitude = 40.4 deg
altitude_above_sea = 890 m
min_elevation = 10 deg
aperture_diameter = 1.2 m
peak_elevation = 70 deg
background = 500 Hz

[source]
type = wcp
rep_rate = 100 MHz
mu_signal = 0.8
mu_decoy = 0.1

[seeds]
master = 42
";

    #[test]
    fn parses_sections_units_and_counts() {
        let doc = parse_scenario_text(SAMPLE).unwrap();
        assert_eq!(doc.first("mission").unwrap().get("kind").unwrap().as_text(), "downlink-qkd");
        assert_eq!(doc.first("orbit").unwrap().get("altitude").unwrap().as_f64(), 500.0);
        let st = doc.first("station").unwrap();
        assert_eq!(st.get("altitude_above_sea").unwrap().as_f64(), 0.89); // km
        assert_eq!(st.get("aperture_diameter").unwrap().as_f64(), 1.2e-3); // km
        assert_eq!(doc.first("source").unwrap().get("rep_rate").unwrap().as_f64(), 100e6);
        assert_eq!(doc.first("seeds").unwrap().get("master").unwrap().as_u64(), 42);
    }

    #[test]
    fn missing_unit_is_an_error_naming_the_key() {
        let err = parse_scenario_text("[orbit]\naltitude = 500\n").unwrap_err();
        match err {
            ScenarioError::Unit { key, got, .. } => {
                assert_eq!(key, "altitude");
                assert_eq!(got, "(no unit)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_unit_is_an_error() {
        let err = parse_scenario_text("[orbit]\naltitude = 500 Hz\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Unit { .. }));
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let err = parse_scenario_text("[orbit]\naltitudes = 500 km\n").unwrap_err();
        match err {
            ScenarioError::UnknownKey { key, nearest, .. } => {
                assert_eq!(key, "altitudes");
                assert_eq!(nearest, "altitude");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_section_rejected() {
        let err = parse_scenario_text("[warp-drive]\nq = 1\n").unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownSection { .. }));
    }

    #[test]
    fn display_round_trips() {
        let doc = parse_scenario_text(SAMPLE).unwrap();
        let emitted = doc.to_string();
        let again = parse_scenario_text(&emitted).unwrap();
        // Line provenance differs; the parsed content must not.
        let content =
            |d: &ScenarioFile| d.sections.iter().map(|s| (s.name.clone(), s.values.clone())).collect::<Vec<_>>();
        assert_eq!(content(&doc), content(&again));
        // And emission is a fixed point.
        assert_eq!(emitted, again.to_string());
    }

    #[test]
    fn repeated_station_sections_collect() {
        let text = "[station]\nname = a\nlatitude = 1 deg\n[station]\nname = b\nlatitude = 2 deg\n";
        let doc = parse_scenario_text(text).unwrap();
        assert_eq!(doc.all("station").len(), 2);
    }
}
