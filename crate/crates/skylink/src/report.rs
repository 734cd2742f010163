//! Report emission: a deterministic directory of CSVs plus a text summary.
//!
//! Layout:
//!
//! ```text
//! out/
//!   summary.txt                  verdicts and aggregates
//!   pass.csv                     t_s,elevation_deg,range_km,rate_mrad_s
//!   budget.csv                   term,efficiency,db
//!   keys/                        distilled key material (+ sidecars)
//!   plots/loss_vs_time.csv       t_s,elevation_deg,total_db
//!   plots/loss_vs_elevation.csv  elevation_deg,total_db
//!   plots/rates.csv              t_s,rate_hz,qber
//!   plots/bell.csv               setting_a,setting_b,E,stderr
//!   plots/fidelity.csv           input_state,F,stderr
//!   plots/decoherence.csv        theta_deg,delta_t_s,D
//!   report.csv                   pass_id,sifted,qber,secure_asym,secure_finite
//! ```
//!
//! Numbers are formatted at 12 significant digits and all iteration orders
//! are fixed, so identical seeds produce byte-identical bundles.

use crate::mission::{MissionError, MissionReport};
use crate::util::fmt_sig12;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Paths of the files an emission produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

fn write_file(files: &mut Vec<PathBuf>, path: PathBuf, contents: &str) -> Result<(), MissionError> {
    std::fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

/// Emit a report into `dir` (created if needed).
pub fn emit_report(report: &MissionReport, dir: &Path) -> Result<ReportBundle, MissionError> {
    std::fs::create_dir_all(dir)?;
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots)?;
    let keys_dir = dir.join("keys");
    std::fs::create_dir_all(&keys_dir)?;
    let mut files = Vec::new();

    write_file(&mut files, dir.join("summary.txt"), &summary_text(report))?;

    if let Some(track) = report.tracks.first() {
        write_file(&mut files, dir.join("pass.csv"), &track.to_csv())?;
    }
    for track in report.tracks.iter().skip(1) {
        write_file(&mut files, dir.join(format!("pass_{}.csv", track.station.name)), &track.to_csv())?;
    }
    if let Some(budget) = &report.reference_budget {
        write_file(&mut files, dir.join("budget.csv"), &budget.to_csv())?;
    }

    if !report.samples.is_empty() {
        let mut loss_t = String::from("t_s,elevation_deg,total_db\n");
        let mut rates = String::from("t_s,rate_hz,qber\n");
        for s in &report.samples {
            let _ = writeln!(
                loss_t,
                "{},{},{}",
                fmt_sig12(s.t_s),
                fmt_sig12(s.elevation_deg),
                fmt_sig12(-s.loss_db)
            );
            let _ = writeln!(rates, "{},{},{}", fmt_sig12(s.t_s), fmt_sig12(s.rate_hz), fmt_sig12(s.qber));
        }
        write_file(&mut files, plots.join("loss_vs_time.csv"), &loss_t)?;
        write_file(&mut files, plots.join("rates.csv"), &rates)?;

        // Elevation-sorted view of the same profile.
        let mut by_elevation: Vec<(f64, f64)> = report.samples.iter().map(|s| (s.elevation_deg, s.loss_db)).collect();
        by_elevation.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut loss_el = String::from("elevation_deg,total_db\n");
        for (el, db) in by_elevation {
            let _ = writeln!(loss_el, "{},{}", fmt_sig12(el), fmt_sig12(-db));
        }
        write_file(&mut files, plots.join("loss_vs_elevation.csv"), &loss_el)?;
    }

    if let Some((_, sampled)) = &report.bell {
        let mut bell = String::from("setting_a,setting_b,E,stderr\n");
        for c in &sampled.correlations {
            let _ = writeln!(
                bell,
                "{},{},{},{}",
                fmt_sig12(c.setting_a_rad.to_degrees()),
                fmt_sig12(c.setting_b_rad.to_degrees()),
                fmt_sig12(c.e),
                fmt_sig12(c.stderr)
            );
        }
        write_file(&mut files, plots.join("bell.csv"), &bell)?;
    }

    if let Some(exp) = &report.teleport {
        let mut fid = String::from("input_state,F,stderr\n");
        for s in &exp.per_state {
            let _ = writeln!(fid, "{},{},{}", s.label, fmt_sig12(s.fidelity), fmt_sig12(s.stderr));
        }
        let _ = writeln!(fid, "mean,{},{}", fmt_sig12(exp.mean_fidelity), fmt_sig12(exp.mean_stderr));
        let _ = writeln!(fid, "classical_limit,{},0", fmt_sig12(exp.classical_limit));
        write_file(&mut files, plots.join("fidelity.csv"), &fid)?;
    }

    if let Some(grav) = &report.gravity {
        let mut rows = String::from("theta_deg,delta_t_s,D\n");
        for r in &grav.rows {
            let _ = writeln!(rows, "{},{},{}", fmt_sig12(r.theta_deg), fmt_sig12(r.delta_t_local_s), fmt_sig12(r.d));
        }
        write_file(&mut files, plots.join("decoherence.csv"), &rows)?;
    }

    if let Some(qkd) = &report.qkd {
        let mut csv = String::from("pass_id,sifted,qber,secure_asym,secure_finite\n");
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            report.scenario_name,
            qkd.secure.sifted_bits,
            fmt_sig12(qkd.secure.qber),
            qkd.secure.secure_bits_asymptotic,
            qkd.secure.secure_bits_finite
        );
        write_file(&mut files, dir.join("report.csv"), &csv)?;
        if !qkd.final_key.is_empty() {
            let key_path = keys_dir.join(format!("{}.key", report.scenario_name));
            std::fs::write(&key_path, &qkd.final_key)?;
            files.push(key_path);
        }
    }

    Ok(ReportBundle {
        dir: dir.to_path_buf(),
        files,
    })
}

/// Human-readable summary with one verdict line per requirement.
pub fn summary_text(report: &MissionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.scenario_name);
    let _ = writeln!(out, "kind: {}", report.kind.as_str());
    let _ = writeln!(out, "seed: {}", report.seed);
    let _ = writeln!(out, "duration_s: {}", fmt_sig12(report.duration_s));
    if let Some(qkd) = &report.qkd {
        let _ = writeln!(out, "mean_sifted_rate_hz: {}", fmt_sig12(qkd.mean_sifted_rate_hz));
        let _ = writeln!(out, "mean_qber: {}", fmt_sig12(qkd.mean_qber));
        let _ = writeln!(out, "sifted_bits: {}", qkd.secure.sifted_bits);
        let _ = writeln!(out, "secure_bits_asymptotic: {}", qkd.secure.secure_bits_asymptotic);
        let _ = writeln!(out, "secure_bits_finite: {}", qkd.secure.secure_bits_finite);
        let _ = writeln!(out, "failure_probability: {}", fmt_sig12(qkd.secure.failure_probability));
    }
    if let Some(c) = &report.coincidences {
        let _ = writeln!(out, "mean_coincidence_rate_hz: {}", fmt_sig12(c.mean_rate_hz));
        let _ = writeln!(out, "mean_snr: {}", fmt_sig12(c.mean_snr));
        let _ = writeln!(out, "effective_fidelity: {}", fmt_sig12(c.effective_fidelity));
    }
    if let Some((analytic, sampled)) = &report.bell {
        let _ = writeln!(out, "chsh_s_analytic: {}", fmt_sig12(*analytic));
        let _ = writeln!(out, "chsh_s_sampled: {} +- {}", fmt_sig12(sampled.s), fmt_sig12(sampled.standard_error));
    }
    if let Some(t) = &report.teleport {
        let _ = writeln!(out, "mean_teleport_fidelity: {} +- {}", fmt_sig12(t.mean_fidelity), fmt_sig12(t.mean_stderr));
        let _ = writeln!(out, "classical_limit: {}", fmt_sig12(t.classical_limit));
    }
    if let Some(g) = &report.gravity {
        let _ = writeln!(out, "coherence_time_s: {}", fmt_sig12(g.coherence_time_s));
        for (d_true, est) in &g.injected {
            let _ = writeln!(
                out,
                "injected_d: {} recovered_epr: {} +- {} recovered_coh: {} +- {}",
                fmt_sig12(*d_true),
                fmt_sig12(est.d_epr),
                fmt_sig12(est.d_epr_sigma),
                fmt_sig12(est.d_coh),
                fmt_sig12(est.d_coh_sigma)
            );
        }
    }
    if let Some(r) = &report.relay {
        let _ = writeln!(out, "relay_shared_bytes: {}", r.shared_bytes);
        let _ = writeln!(
            out,
            "relay_payloads: forward {} bytes ({}), return {} bytes ({})",
            r.forward_payload_bytes,
            if r.forward_round_trip_ok { "ok" } else { "MISMATCH" },
            r.return_payload_bytes,
            if r.return_round_trip_ok { "ok" } else { "MISMATCH" },
        );
        let _ = writeln!(out, "relay_remaining_bytes: {}", r.remaining_shared_bytes);
    }
    if let Some(t) = &report.throughput {
        let _ = writeln!(out, "passes_per_day: {}", fmt_sig12(t.passes_per_day));
        let _ = writeln!(out, "mean_pass_duration_s: {}", fmt_sig12(t.mean_pass_duration_s));
        let _ = writeln!(out, "per_station_bits_per_year: {}", fmt_sig12(t.per_station_bits_per_year));
        let _ = writeln!(out, "aggregate_bits_per_year: {}", fmt_sig12(t.aggregate_bits_per_year));
    }
    let _ = writeln!(out, "requirements:");
    for v in &report.verdicts {
        let _ = writeln!(out, "  {v}");
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::Scenario;

    #[test]
    fn bundle_layout_and_determinism() {
        let scenario = Scenario::preset("tiangong2").unwrap();
        let report = scenario.run().unwrap();
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let b1 = emit_report(&report, dir1.path()).unwrap();
        assert!(dir1.path().join("summary.txt").exists());
        assert!(dir1.path().join("pass.csv").exists());
        assert!(dir1.path().join("budget.csv").exists());
        assert!(dir1.path().join("plots/loss_vs_time.csv").exists());
        // Identical report emitted twice is byte-identical.
        let report2 = scenario.run().unwrap();
        assert_eq!(report, report2);
        let b2 = emit_report(&report2, dir2.path()).unwrap();
        for (f1, f2) in b1.files.iter().zip(&b2.files) {
            assert_eq!(std::fs::read(f1).unwrap(), std::fs::read(f2).unwrap(), "{f1:?} differs");
        }
        // Summary carries a verdict line per requirement.
        let summary = std::fs::read_to_string(dir1.path().join("summary.txt")).unwrap();
        assert!(summary.contains("requirements:"));
        assert!(summary.contains("PASS") || summary.contains("FAIL"));
    }

    #[test]
    fn loss_vs_elevation_is_monotone() {
        let scenario = Scenario::preset("micius-qkd-xinglong").unwrap();
        let report = scenario.run().unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_report(&report, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("plots/loss_vs_elevation.csv")).unwrap();
        let mut prev_el = f64::NEG_INFINITY;
        let mut prev_db = f64::NEG_INFINITY;
        for line in text.lines().skip(1) {
            let mut parts = line.split(',');
            let el: f64 = parts.next().unwrap().parse().unwrap();
            let db: f64 = parts.next().unwrap().parse().unwrap();
            assert!(el >= prev_el);
            // Total dB (negative) grows toward zenith: less loss.
            if el > prev_el + 1e-9 {
                assert!(db >= prev_db - 1e-9, "loss not monotone at {el}: {db} vs {prev_db}");
            }
            prev_el = el;
            prev_db = db;
        }
    }
}
