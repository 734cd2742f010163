//! Named mission presets shipped as data files.
//!
//! Presets are plain scenario files embedded at build time; setting the
//! `SKYLINK_PRESET_DIR` environment variable redirects lookup to
//! `<dir>/<name>.scn` so deployments can override them without rebuilding.

use super::MissionError;

/// Environment variable overriding preset lookup.
pub const PRESET_ENV_VAR: &str = "SKYLINK_PRESET_DIR";

const PRESETS: &[(&str, &str)] = &[
    ("micius-qkd-xinglong", include_str!("../../presets/micius-qkd-xinglong.scn")),
    (
        "micius-entanglement-dlh-ljg",
        include_str!("../../presets/micius-entanglement-dlh-ljg.scn"),
    ),
    ("micius-teleport-ngari", include_str!("../../presets/micius-teleport-ngari.scn")),
    ("relay-xinglong-graz", include_str!("../../presets/relay-xinglong-graz.scn")),
    ("micius-gravity", include_str!("../../presets/micius-gravity.scn")),
    ("tiangong2", include_str!("../../presets/tiangong2.scn")),
    ("daylight-53km", include_str!("../../presets/daylight-53km.scn")),
    ("constellation-3x900", include_str!("../../presets/constellation-3x900.scn")),
];

/// Names of the built-in presets.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

/// Load a preset's text, honoring the directory override.
pub fn load_preset(name: &str) -> Result<String, MissionError> {
    if let Ok(dir) = std::env::var(PRESET_ENV_VAR) {
        let path = std::path::Path::new(&dir).join(format!("{name}.scn"));
        if path.exists() {
            return Ok(std::fs::read_to_string(path)?);
        }
    }
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| {
            MissionError::Config(format!(
                "unknown preset `{name}`; available: {}",
                preset_names().join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::super::Scenario;
    use super::*;

    #[test]
    fn all_presets_parse_and_validate() {
        for name in preset_names() {
            let scenario = Scenario::preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!scenario.name.is_empty());
        }
    }

    #[test]
    fn preset_round_trip_through_emission() {
        // One emission canonicalizes numbers at 12 significant digits;
        // parse(emit(parse(f))) is then a fixed point.
        for name in ["micius-qkd-xinglong", "tiangong2"] {
            let text = load_preset(name).unwrap();
            let doc = crate::scenario::parse_scenario_text(&text).unwrap();
            let emitted = doc.to_string();
            let reparsed = crate::scenario::parse_scenario_text(&emitted).unwrap();
            assert_eq!(emitted, reparsed.to_string(), "{name} emission not a fixed point");
            let a = Scenario::from_document(name, &reparsed).unwrap();
            let b = Scenario::from_text(name, &reparsed.to_string()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn preset_dir_override() {
        let dir = tempfile::tempdir().unwrap();
        let custom = dir.path().join("custom-zenith.scn");
        std::fs::write(
            &custom,
            "[mission]\nkind = downlink-qkd\n[orbit]\naltitude = 400 km\n[station]\nname = s\nlatitude = 0 deg\n[source]\ntype = wcp\nrep_rate = 100 MHz\n",
        )
        .unwrap();
        std::env::set_var(PRESET_ENV_VAR, dir.path());
        let scenario = Scenario::preset("custom-zenith").unwrap();
        std::env::remove_var(PRESET_ENV_VAR);
        assert_eq!(scenario.orbit.altitude_km, 400.0);
    }
}
