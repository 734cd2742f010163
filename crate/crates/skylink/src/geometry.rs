//! Satellite pass geometry over ground stations.
//!
//! The model is a circular orbit around a spherical, non-rotating Earth,
//! with passes parameterized by their peak elevation instead of full orbital
//! elements. That is enough to reproduce elevation/range profiles, angular
//! dynamics seen by a tracking telescope, and constellation pass statistics.
//!
//! Conventions: elevations in degrees, ranges in km, angular rates in
//! mrad/s. The sub-satellite track is a great circle; the cross-track offset
//! at closest approach is what sets the peak elevation.

use crate::consts::{EARTH_RADIUS_KM, EARTH_ROTATION_RAD_S, MU_EARTH_KM3_S2};
use crate::util::Seeder;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("elevation {0} deg outside [0, 90]")]
    ElevationOutOfRange(f64),
    #[error("satellite never rises above the {min_elevation} deg cutoff (peak {max_elevation} deg)")]
    NoVisibility { max_elevation: f64, min_elevation: f64 },
    #[error("pass track needs at least 3 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A ground station taking part in a mission.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub name: String,
    /// Geodetic latitude, degrees, in [-90, 90].
    pub latitude_deg: f64,
    /// Station altitude above mean sea level, meters.
    pub altitude_above_sea_m: f64,
    /// Operational elevation cutoff, degrees, in [0, 90).
    pub min_elevation_deg: f64,
}

impl GroundStation {
    pub fn new(name: &str, latitude_deg: f64, altitude_above_sea_m: f64, min_elevation_deg: f64) -> Result<Self, GeometryError> {
        if !(-90.0..=90.0).contains(&latitude_deg) {
            return Err(GeometryError::InvalidParameter(format!("latitude {latitude_deg} outside [-90, 90]")));
        }
        if !(0.0..90.0).contains(&min_elevation_deg) {
            return Err(GeometryError::InvalidParameter(format!("min_elevation {min_elevation_deg} outside [0, 90)")));
        }
        Ok(Self {
            name: name.to_string(),
            latitude_deg,
            altitude_above_sea_m,
            min_elevation_deg,
        })
    }
}

/// A circular orbit described by its altitude above the mean Earth radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSpec {
    /// Altitude above the mean Earth radius, km.
    pub altitude_km: f64,
}

impl OrbitSpec {
    pub fn new(altitude_km: f64) -> Result<Self, GeometryError> {
        if altitude_km <= 0.0 {
            return Err(GeometryError::InvalidParameter(format!("orbit altitude {altitude_km} km must be > 0")));
        }
        Ok(Self { altitude_km })
    }

    /// Orbital radius from the Earth's center, km.
    pub fn radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }

    /// Orbital period 2*pi*sqrt(a^3/mu), seconds.
    pub fn period_s(&self) -> f64 {
        let a = self.radius_km();
        std::f64::consts::TAU * (a.powi(3) / MU_EARTH_KM3_S2).sqrt()
    }

    /// Orbital angular rate, rad/s.
    pub fn angular_rate_rad_s(&self) -> f64 {
        std::f64::consts::TAU / self.period_s()
    }

    /// Orbital speed, km/s.
    pub fn speed_km_s(&self) -> f64 {
        self.angular_rate_rad_s() * self.radius_km()
    }
}

/// One time sample of a pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassSample {
    /// Seconds from the start of the pass.
    pub t_s: f64,
    /// Elevation above the horizon, degrees.
    pub elevation_deg: f64,
    /// Azimuth, degrees (great-circle pass convention, 0 at closest approach plane).
    pub azimuth_deg: f64,
    /// Slant range to the satellite, km.
    pub range_km: f64,
    /// Line-of-sight angular rate seen from the station, mrad/s.
    pub angular_rate_mrad_s: f64,
    /// Line-of-sight angular acceleration, mrad/s^2.
    pub angular_accel_mrad_s2: f64,
}

/// A complete pass over one station: strictly increasing sample times with a
/// unimodal elevation profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PassTrack {
    pub station: GroundStation,
    pub orbit: OrbitSpec,
    pub samples: Vec<PassSample>,
    /// Pass duration (time between first and last sample), seconds.
    pub duration_s: f64,
}

impl PassTrack {
    /// Maximum elevation over the pass, degrees.
    pub fn peak_elevation_deg(&self) -> f64 {
        self.samples.iter().map(|s| s.elevation_deg).fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV export: `t_s,elevation_deg,range_km,rate_mrad_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,elevation_deg,range_km,rate_mrad_s\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::util::fmt_sig12(s.t_s),
                crate::util::fmt_sig12(s.elevation_deg),
                crate::util::fmt_sig12(s.range_km),
                crate::util::fmt_sig12(s.angular_rate_mrad_s)
            ));
        }
        out
    }
}

/// Slant range from a station to a satellite at altitude `h_km` seen at
/// `elevation_deg`, spherical-Earth law of cosines:
///
/// Z = r_e * (sqrt(sin^2(el) + 2h/r_e + (h/r_e)^2) - sin(el))
pub fn slant_range(h_km: f64, elevation_deg: f64) -> Result<f64, GeometryError> {
    if !(0.0..=90.0).contains(&elevation_deg) {
        return Err(GeometryError::ElevationOutOfRange(elevation_deg));
    }
    if h_km <= 0.0 {
        return Err(GeometryError::InvalidParameter(format!("altitude {h_km} km must be > 0")));
    }
    let s = elevation_deg.to_radians().sin();
    let x = h_km / EARTH_RADIUS_KM;
    Ok(EARTH_RADIUS_KM * ((s * s + 2.0 * x + x * x).sqrt() - s))
}

/// Central Earth angle between station and sub-satellite point for a given
/// elevation: psi = acos((r_e/r_s) * cos(el)) - el.
fn central_angle_rad(orbit: OrbitSpec, elevation_deg: f64) -> f64 {
    let el = elevation_deg.to_radians();
    ((EARTH_RADIUS_KM / orbit.radius_km()) * el.cos()).acos() - el
}

/// Geometry of one pass sample at time `t` from closest approach, for a pass
/// whose closest-approach cross-track offset is `beta` (radians).
///
/// Returns (elevation_deg, azimuth_deg, range_km). The azimuth is measured
/// in the station's sky with the pass direction as reference; it is what a
/// tracking mount would follow and is needed to recover line-of-sight rates.
pub fn sample_at(orbit: OrbitSpec, beta_rad: f64, t_s: f64) -> (f64, f64, f64) {
    let re = EARTH_RADIUS_KM;
    let rs = orbit.radius_km();
    let alpha = orbit.angular_rate_rad_s() * t_s;
    // Satellite unit vector with the station at (1,0,0)*re and the orbit
    // track running in the x-y plane offset by beta about the x-axis.
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta_rad.sin_cos();
    let sat = [ca * cb, sa, ca * sb];
    // Topocentric frame: up = station zenith, east = track direction.
    let up = [1.0, 0.0, 0.0];
    let east = [0.0, 1.0, 0.0];
    let north = [0.0, 0.0, 1.0];
    let rel = [rs * sat[0] - re * up[0], rs * sat[1] - re * up[1], rs * sat[2] - re * up[2]];
    let range = (rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2]).sqrt();
    let dot = |a: [f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let z = dot(rel, &up) / range;
    let e = dot(rel, &east) / range;
    let n = dot(rel, &north) / range;
    let elevation = z.asin().to_degrees();
    let azimuth = e.atan2(n).to_degrees();
    (elevation, azimuth, range)
}

/// Cross-track offset (radians) that yields the requested peak elevation.
pub fn beta_for_peak_elevation(orbit: OrbitSpec, peak_elevation_deg: f64) -> f64 {
    central_angle_rad(orbit, peak_elevation_deg)
}

/// Generate a symmetric pass with the given peak elevation, sampled every
/// `dt_s` seconds between the `min_elevation` crossings of the station.
pub fn generate_pass(orbit: OrbitSpec, station: &GroundStation, max_elevation_deg: f64, dt_s: f64) -> Result<PassTrack, GeometryError> {
    if dt_s <= 0.0 {
        return Err(GeometryError::InvalidParameter(format!("dt {dt_s} s must be > 0")));
    }
    if !(0.0..=90.0).contains(&max_elevation_deg) {
        return Err(GeometryError::ElevationOutOfRange(max_elevation_deg));
    }
    if max_elevation_deg < station.min_elevation_deg {
        return Err(GeometryError::NoVisibility {
            max_elevation: max_elevation_deg,
            min_elevation: station.min_elevation_deg,
        });
    }
    let beta = beta_for_peak_elevation(orbit, max_elevation_deg);
    let half_window = half_window_s(orbit, beta, station.min_elevation_deg);
    // Align the grid so closest approach is itself a sample; the pass is
    // then symmetric and actually reaches the requested peak elevation.
    let half_aligned = (half_window / dt_s).floor() * dt_s;
    let samples = build_samples(orbit, beta, -half_aligned, half_aligned, dt_s, 0.0);
    if samples.len() < 3 {
        return Err(GeometryError::InsufficientSamples(samples.len()));
    }
    let duration_s = samples.last().unwrap().t_s - samples.first().unwrap().t_s;
    Ok(PassTrack {
        station: station.clone(),
        orbit,
        samples,
        duration_s,
    })
}

/// Half-duration of the window during which elevation >= cutoff, seconds.
pub fn half_window_s(orbit: OrbitSpec, beta_rad: f64, cutoff_elevation_deg: f64) -> f64 {
    let psi_max = central_angle_rad(orbit, cutoff_elevation_deg);
    if beta_rad >= psi_max {
        return 0.0;
    }
    let alpha = (psi_max.cos() / beta_rad.cos()).acos();
    alpha / orbit.angular_rate_rad_s()
}

/// Build samples on a regular grid [t0, t1] (seconds from closest approach),
/// reporting times relative to the grid start shifted by `t_offset`.
pub(crate) fn build_samples(orbit: OrbitSpec, beta_rad: f64, t0: f64, t1: f64, dt_s: f64, t_offset: f64) -> Vec<PassSample> {
    let n = ((t1 - t0) / dt_s).floor() as usize + 1;
    let mut geom = Vec::with_capacity(n);
    for i in 0..n {
        let t = t0 + i as f64 * dt_s;
        let (el, az, range) = sample_at(orbit, beta_rad, t);
        geom.push((t - t0 + t_offset, el, az, range));
    }
    let rates = los_rates(&geom, dt_s);
    geom.iter()
        .zip(rates)
        .map(|(&(t, el, az, range), (rate, accel))| PassSample {
            t_s: t,
            elevation_deg: el,
            azimuth_deg: az,
            range_km: range,
            angular_rate_mrad_s: rate,
            angular_accel_mrad_s2: accel,
        })
        .collect()
}

/// Line-of-sight unit vector from (elevation, azimuth) in degrees.
fn los_unit(el_deg: f64, az_deg: f64) -> [f64; 3] {
    let el = el_deg.to_radians();
    let az = az_deg.to_radians();
    [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]
}

/// Finite-difference line-of-sight rates (mrad/s) and accelerations
/// (mrad/s^2) for a list of (t, el, az, range) samples.
fn los_rates(geom: &[(f64, f64, f64, f64)], dt_s: f64) -> Vec<(f64, f64)> {
    let n = geom.len();
    let mut rate = vec![0.0; n];
    for i in 0..n {
        let (a, b) = if i + 1 < n { (i, i + 1) } else { (i - 1, i) };
        let va = los_unit(geom[a].1, geom[a].2);
        let vb = los_unit(geom[b].1, geom[b].2);
        let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
        rate[i] = dot.clamp(-1.0, 1.0).acos() / dt_s * 1e3;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let accel = if i + 1 < n {
            (rate[i + 1] - rate[i]).abs() / dt_s
        } else if n >= 2 {
            (rate[i] - rate[i - 1]).abs() / dt_s
        } else {
            0.0
        };
        out.push((rate[i], accel));
    }
    out
}

/// Finite-difference maxima of line-of-sight angular rate and acceleration
/// over a track. Requires at least 3 samples.
pub fn angular_dynamics(track: &PassTrack) -> Result<(f64, f64), GeometryError> {
    if track.samples.len() < 3 {
        return Err(GeometryError::InsufficientSamples(track.samples.len()));
    }
    let dt = track.samples[1].t_s - track.samples[0].t_s;
    let geom: Vec<(f64, f64, f64, f64)> = track
        .samples
        .iter()
        .map(|s| (s.t_s, s.elevation_deg, s.azimuth_deg, s.range_km))
        .collect();
    let rates = los_rates(&geom, dt);
    let max_rate = rates.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_accel = rates.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((max_rate, max_accel))
}

/// Aggregate pass statistics for a constellation over a station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassStatistics {
    /// Night-time passes per day, averaged over the simulated days.
    pub passes_per_day: f64,
    /// Mean duration of a counted pass, seconds (0 if none).
    pub mean_duration_s: f64,
    /// Total passes counted.
    pub total_passes: u64,
}

/// Monte Carlo pass statistics for a constellation of circular orbits.
///
/// Each day draws a fresh ascending-node/phase geometry per satellite
/// (polar tracks, Earth rotation shifting successive crossings in
/// longitude). Only night passes are counted: keys can only be exchanged in
/// darkness, so passes whose local solar time falls between 06:00 and 18:00
/// are discarded. Per-day RNG streams derive from the master seed, so the
/// result is independent of how days are sharded across workers.
pub fn pass_statistics(constellation: &[OrbitSpec], station: &GroundStation, days: u32, seed: u64) -> PassStatistics {
    let seeder = Seeder::new(seed);
    let mut total = 0u64;
    let mut dur_sum = 0.0;
    let lat = station.latitude_deg.to_radians();
    for day in 0..u64::from(days) {
        for (k, orbit) in constellation.iter().enumerate() {
            let mut rng = seeder.rng("pass-stats", day * 1000 + k as u64);
            let psi_max = central_angle_rad(*orbit, station.min_elevation_deg);
            // Longitude half-width of the visibility window at this latitude.
            let dlon_window = psi_max / lat.cos().max(0.05);
            let node0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let phase0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let period = orbit.period_s();
            let orbits_per_day = 86_400.0 / period;
            let dlon_per_orbit = EARTH_ROTATION_RAD_S * period;
            let n_crossings = (2.0 * orbits_per_day).floor() as usize;
            for c in 0..n_crossings {
                // Ascending and descending crossings alternate and sit half
                // an orbit apart; Earth rotation drifts them westward.
                let orbit_idx = (c / 2) as f64;
                let asc = c % 2 == 0;
                let lon = node0 + if asc { 0.0 } else { std::f64::consts::PI } - orbit_idx * dlon_per_orbit;
                let lon = lon.rem_euclid(std::f64::consts::TAU);
                let delta = (lon - std::f64::consts::PI).abs();
                if delta > dlon_window {
                    continue;
                }
                // Cross-track offset at closest approach, from the crossing
                // longitude mismatch.
                let beta = (delta * lat.cos()).min(psi_max);
                let half = half_window_s(*orbit, beta, station.min_elevation_deg);
                if half <= 0.0 {
                    continue;
                }
                // Local solar time of the crossing: phase the day randomly.
                let t_frac = (phase0 / std::f64::consts::TAU + orbit_idx / orbits_per_day).fract();
                let local_hour = t_frac * 24.0;
                let night = !(6.0..18.0).contains(&local_hour);
                if !night {
                    continue;
                }
                total += 1;
                dur_sum += 2.0 * half;
            }
        }
    }
    let days_f = f64::from(days.max(1));
    PassStatistics {
        passes_per_day: total as f64 / days_f,
        mean_duration_s: if total > 0 { dur_sum / total as f64 } else { 0.0 },
        total_passes: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn station(min_el: f64) -> GroundStation {
        GroundStation::new("test", 40.4, 890.0, min_el).unwrap()
    }

    #[test]
    fn slant_range_zenith_equals_altitude() {
        assert_abs_diff_eq!(slant_range(500.0, 90.0).unwrap(), 500.0, epsilon = 1e-9);
    }

    #[test]
    fn slant_range_closed_form_values() {
        // Frozen from the closed form with r_e = 6371 km.
        assert_relative_eq!(slant_range(500.0, 10.0).unwrap(), 1694.58, max_relative = 1e-4);
        assert_relative_eq!(slant_range(500.0, 0.0).unwrap(), 2573.13, max_relative = 1e-4);
        // Published profile quotes 560-1700 km between 10 deg and zenith at
        // ~500 km altitude; the 10-deg value sits at the top of that band.
        let z10 = slant_range(500.0, 10.0).unwrap();
        assert!(z10 > 1600.0 && z10 < 1750.0);
    }

    #[test]
    fn slant_range_rejects_bad_elevation() {
        assert!(matches!(slant_range(500.0, -1.0), Err(GeometryError::ElevationOutOfRange(_))));
        assert!(matches!(slant_range(500.0, 90.5), Err(GeometryError::ElevationOutOfRange(_))));
    }

    #[test]
    fn slant_range_monotonicity() {
        let mut prev = slant_range(500.0, 0.0).unwrap();
        for el in 1..=90 {
            let z = slant_range(500.0, f64::from(el)).unwrap();
            assert!(z < prev, "not decreasing at {el}");
            prev = z;
        }
        for h in [200.0, 400.0, 600.0, 35786.0] {
            assert!(slant_range(h + 1.0, 30.0).unwrap() > slant_range(h, 30.0).unwrap());
        }
    }

    #[test]
    fn orbit_period_and_speed() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        // ~94.5 min period and ~7.6 km/s for a 500 km orbit.
        assert_relative_eq!(orbit.period_s(), 5668.6, max_relative = 1e-3);
        assert_relative_eq!(orbit.speed_km_s(), 7.61, max_relative = 1e-2);
    }

    #[test]
    fn generate_pass_zenith_shape() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let track = generate_pass(orbit, &station(10.0), 90.0, 1.0).unwrap();
        // Symmetric unimodal elevation, peak at 90.
        let peak = track.peak_elevation_deg();
        assert!(peak > 89.9, "peak {peak}");
        assert!((100.0..600.0).contains(&track.duration_s), "duration {}", track.duration_s);
        // Strictly increasing time, elevation rises then falls.
        let els: Vec<f64> = track.samples.iter().map(|s| s.elevation_deg).collect();
        let imax = els.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        for i in 1..=imax {
            assert!(els[i] >= els[i - 1] - 1e-9);
        }
        for i in imax + 1..els.len() {
            assert!(els[i] <= els[i - 1] + 1e-9);
        }
        // Zenith sample range equals the altitude.
        let min_range = track.samples.iter().map(|s| s.range_km).fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min_range, 500.0, epsilon = 0.5);
    }

    #[test]
    fn generate_pass_below_cutoff_errors() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let err = generate_pass(orbit, &station(10.0), 5.0, 1.0).unwrap_err();
        assert!(matches!(err, GeometryError::NoVisibility { .. }));
    }

    #[test]
    fn generate_pass_duration_monotone_in_peak_elevation() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let st = station(10.0);
        let mut prev = 0.0;
        for peak in [15.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
            let track = generate_pass(orbit, &st, peak, 1.0).unwrap();
            assert!(track.duration_s > prev, "duration not monotone at peak {peak}");
            prev = track.duration_s;
        }
    }

    #[test]
    fn stored_range_matches_closed_form() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let track = generate_pass(orbit, &station(10.0), 63.0, 5.0).unwrap();
        for s in &track.samples {
            let z = slant_range(500.0, s.elevation_deg).unwrap();
            assert_relative_eq!(z, s.range_km, max_relative = 1e-9);
        }
    }

    #[test]
    fn angular_dynamics_overhead_rate() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let track = generate_pass(orbit, &station(10.0), 90.0, 1.0).unwrap();
        let (max_rate, max_accel) = angular_dynamics(&track).unwrap();
        // v/h at zenith: 7.61 km/s over 500 km = 15.2 mrad/s.
        assert_relative_eq!(max_rate, 15.2, max_relative = 0.02);
        assert!(max_accel > 0.0 && max_accel < 0.4, "accel {max_accel}");
    }

    #[test]
    fn angular_dynamics_stays_below_leo_bound() {
        // 400-800 km LEO overhead passes stay within 20 mrad/s.
        for h in [400.0, 500.0, 600.0, 800.0] {
            let orbit = OrbitSpec::new(h).unwrap();
            let track = generate_pass(orbit, &station(10.0), 90.0, 1.0).unwrap();
            let (max_rate, _) = angular_dynamics(&track).unwrap();
            assert!(max_rate <= 20.0, "h={h}: {max_rate}");
        }
    }

    #[test]
    fn angular_dynamics_degenerate_track_is_zero() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let st = station(10.0);
        let samples: Vec<PassSample> = (0..10)
            .map(|i| PassSample {
                t_s: f64::from(i),
                elevation_deg: 45.0,
                azimuth_deg: 10.0,
                range_km: 700.0,
                angular_rate_mrad_s: 0.0,
                angular_accel_mrad_s2: 0.0,
            })
            .collect();
        let track = PassTrack {
            station: st,
            orbit,
            samples,
            duration_s: 9.0,
        };
        let (rate, accel) = angular_dynamics(&track).unwrap();
        assert_eq!((rate, accel), (0.0, 0.0));
    }

    #[test]
    fn angular_dynamics_needs_three_samples() {
        let orbit = OrbitSpec::new(500.0).unwrap();
        let track = PassTrack {
            station: station(10.0),
            orbit,
            samples: vec![],
            duration_s: 0.0,
        };
        assert!(matches!(angular_dynamics(&track), Err(GeometryError::InsufficientSamples(0))));
    }

    #[test]
    fn pass_statistics_empty_constellation() {
        let stats = pass_statistics(&[], &station(25.0), 10, 1);
        assert_eq!(stats.passes_per_day, 0.0);
        assert_eq!(stats.total_passes, 0);
    }

    #[test]
    fn pass_statistics_three_sats_900km() {
        let orbit = OrbitSpec::new(900.0).unwrap();
        let st = station(25.0);
        let stats = pass_statistics(&[orbit, orbit, orbit], &st, 200, 42);
        // Published figure: ~3.7 night passes/day and ~5 min mean duration
        // for a 3-satellite constellation at 800-1000 km above a 25 deg
        // cutoff; the simplified model carries a +-30% band.
        assert!(
            (2.6..=4.8).contains(&stats.passes_per_day),
            "passes/day {}",
            stats.passes_per_day
        );
        assert!(
            (240.0..=420.0).contains(&stats.mean_duration_s),
            "mean duration {}",
            stats.mean_duration_s
        );
    }

    #[test]
    fn pass_statistics_deterministic_and_shard_invariant() {
        let orbit = OrbitSpec::new(900.0).unwrap();
        let st = station(25.0);
        let a = pass_statistics(&[orbit, orbit], &st, 50, 7);
        let b = pass_statistics(&[orbit, orbit], &st, 50, 7);
        assert_eq!(a, b);
        // Sharding days produces the same counts because per-day streams are
        // derived, not sequential.
        let whole = pass_statistics(&[orbit], &st, 40, 9);
        let mut total = 0;
        let mut dur = 0.0;
        for day in 0..40u32 {
            let one = pass_statistics_single_day(&[orbit], &st, day, 9);
            total += one.0;
            dur += one.1;
        }
        assert_eq!(whole.total_passes, total);
        assert_abs_diff_eq!(
            whole.mean_duration_s,
            if total > 0 { dur / total as f64 } else { 0.0 },
            epsilon = 1e-9
        );
    }

    /// Shard helper used by the shard-invariance test: run day `day` alone.
    fn pass_statistics_single_day(constellation: &[OrbitSpec], station: &GroundStation, day: u32, seed: u64) -> (u64, f64) {
        // Same derivation as pass_statistics: day index keyed into the seeder.
        let seeder = Seeder::new(seed);
        let mut total = 0u64;
        let mut dur = 0.0;
        for (k, orbit) in constellation.iter().enumerate() {
            let mut rng = seeder.rng("pass-stats", u64::from(day) * 1000 + k as u64);
            let psi_max = central_angle_rad(*orbit, station.min_elevation_deg);
            let lat = station.latitude_deg.to_radians();
            let dlon_window = psi_max / lat.cos().max(0.05);
            let node0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let phase0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let period = orbit.period_s();
            let orbits_per_day = 86_400.0 / period;
            let dlon_per_orbit = EARTH_ROTATION_RAD_S * period;
            let n_crossings = (2.0 * orbits_per_day).floor() as usize;
            for c in 0..n_crossings {
                let orbit_idx = (c / 2) as f64;
                let asc = c % 2 == 0;
                let lon = node0 + if asc { 0.0 } else { std::f64::consts::PI } - orbit_idx * dlon_per_orbit;
                let lon = lon.rem_euclid(std::f64::consts::TAU);
                let delta = (lon - std::f64::consts::PI).abs();
                if delta > dlon_window {
                    continue;
                }
                let beta = (delta * lat.cos()).min(psi_max);
                let half = half_window_s(*orbit, beta, station.min_elevation_deg);
                if half <= 0.0 {
                    continue;
                }
                let t_frac = (phase0 / std::f64::consts::TAU + orbit_idx / orbits_per_day).fract();
                let local_hour = t_frac * 24.0;
                if (6.0..18.0).contains(&local_hour) {
                    continue;
                }
                total += 1;
                dur += 2.0 * half;
            }
        }
        (total, dur)
    }
}
