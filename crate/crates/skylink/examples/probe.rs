use skylink::mission::Scenario;

fn main() {
    for name in ["micius-qkd-xinglong", "micius-entanglement-dlh-ljg", "micius-teleport-ngari", "tiangong2", "daylight-53km", "micius-gravity", "relay-xinglong-graz", "constellation-3x900"] {
        let s = Scenario::preset(name).unwrap();
        let r = s.run().unwrap();
        println!("==== {name} ====");
        println!("duration {:.1} s, samples {}", r.duration_s, r.samples.len());
        if !r.samples.is_empty() {
            let min = r.samples.iter().map(|x| x.loss_db).fold(f64::INFINITY, f64::min);
            let max = r.samples.iter().map(|x| x.loss_db).fold(f64::NEG_INFINITY, f64::max);
            println!("loss range [{min:.2}, {max:.2}] dB");
            // loss at specific ranges for qkd preset
            for target in [530.0, 645.0, 1200.0, 1600.0] {
                if let Some(s2) = r.samples.iter().min_by(|a, b| (a.range_km - target).abs().total_cmp(&(b.range_km - target).abs())) {
                    if (s2.range_km - target).abs() < 30.0 {
                        println!("  at {:.0} km: loss {:.2} dB rate {:.0} /s qber {:.4}", s2.range_km, s2.loss_db, s2.rate_hz, s2.qber);
                    }
                }
            }
        }
        if let Some(q) = &r.qkd {
            println!("qkd: mean rate {:.1}/s qber {:.4} sifted {} finite {} ratio {:.3} key {} bytes",
                q.mean_sifted_rate_hz, q.mean_qber, q.secure.sifted_bits, q.secure.secure_bits_finite,
                q.secure.secure_bits_finite as f64 / q.secure.sifted_bits.max(1) as f64, q.final_key.len());
            println!("secure rate {:.1} bit/s", q.secure.secure_bits_finite as f64 / r.duration_s);
        }
        if let Some(c) = &r.coincidences {
            println!("coinc: mean {:.3}/s snr {:.1} total {:.0} feff {:.3}", c.mean_rate_hz, c.mean_snr, c.total_coincidences, c.effective_fidelity);
        }
        if let Some((a, samp)) = &r.bell {
            println!("bell: analytic {a:.4} sampled {:.4} +- {:.4}", samp.s, samp.standard_error);
        }
        if let Some(t) = &r.teleport {
            println!("teleport: mean F {:.4} +- {:.4}", t.mean_fidelity, t.mean_stderr);
        }
        if let Some(g) = &r.gravity {
            println!("gravity: d_t {:.3e}", g.coherence_time_s);
            for row in g.rows.iter().filter(|r| [40.0,50.0,60.0,90.0].contains(&r.theta_deg)) {
                println!("  theta {:.0}: D {:.4}", row.theta_deg, row.d);
            }
        }
        if let Some(rel) = &r.relay {
            println!("relay: shared {} fwd_ok {} ret_ok {} remaining {}", rel.shared_bytes, rel.forward_round_trip_ok, rel.return_round_trip_ok, rel.remaining_shared_bytes);
        }
        if let Some(t) = &r.throughput {
            println!("plan: {:.2}/day mean {:.0}s per-station {:.3e} aggregate {:.3e}", t.passes_per_day, t.mean_pass_duration_s, t.per_station_bits_per_year, t.aggregate_bits_per_year);
        }
        for v in &r.verdicts { println!("  {v}"); }
    }
}
