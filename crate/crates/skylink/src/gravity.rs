//! Event-formalism gravitational decoherence of photonic entanglement.
//!
//! A photon climbing through the Earth's curved spacetime accumulates a
//! time offset Delta_t relative to its ground twin; the surviving
//! correlation is D = exp(-Delta_t^2 / (2 d_t^2)) with d_t the photon
//! coherence time. Two formulations of Delta_t are implemented: the general
//! one,
//!
//!   Delta_t = (1/c) Int_{r_e}^{r_e+h} (M/r)
//!             sqrt(1 + 2M/r + r_e^2 tan^2(90-theta)/r^2) dr,
//!
//! and the local-clock variant, which references the detector's own clock
//! and replaces M/r by (M/r - M/(r_e+h)). M is the Earth's mass in length
//! units (GM/c^2) and theta the altitude angle of the satellite.

use crate::consts::{C_M_S, EARTH_MASS_LENGTH_M, EARTH_RADIUS_M};
use crate::util::{sample_poisson, Seeder};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GravityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature failed to converge (depth {0})")]
    QuadratureNonConvergence(u32),
    #[error("empty bin: expected counts must be positive")]
    EmptyBin,
}

/// Earth parameters for the spacetime integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    /// Earth radius, m.
    pub radius_m: f64,
    /// Mass in length units GM/c^2, m.
    pub mass_length_m: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        Self {
            radius_m: EARTH_RADIUS_M,
            mass_length_m: EARTH_MASS_LENGTH_M,
        }
    }
}

/// Which Delta_t expression to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    General,
    LocalClock,
}

/// Event-formalism parameters for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventFormalismParams {
    /// Photon coherence time, s.
    pub coherence_time_s: f64,
    /// Satellite altitude, m.
    pub altitude_m: f64,
    pub formulation: Formulation,
}

impl EventFormalismParams {
    pub fn new(coherence_time_s: f64, altitude_m: f64, formulation: Formulation) -> Result<Self, GravityError> {
        if coherence_time_s <= 0.0 {
            return Err(GravityError::InvalidParameter("coherence time must be > 0".into()));
        }
        if altitude_m <= 0.0 {
            return Err(GravityError::InvalidParameter("altitude must be > 0".into()));
        }
        Ok(Self {
            coherence_time_s,
            altitude_m,
            formulation,
        })
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64, GravityError> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, GravityError> {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-12 {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(GravityError::QuadratureNonConvergence(depth));
        }
        Ok(recurse(f, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)?
            + recurse(f, m, fm, b, fb, right, frm, tol / 2.0, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, max_depth)
}

/// Gravitationally induced time offset Delta_t, seconds.
pub fn delta_t(earth: &EarthModel, altitude_m: f64, altitude_angle_deg: f64, formulation: Formulation) -> Result<f64, GravityError> {
    if !(altitude_angle_deg > 0.0 && altitude_angle_deg <= 90.0) {
        return Err(GravityError::InvalidParameter(format!(
            "altitude angle {altitude_angle_deg} outside (0, 90]"
        )));
    }
    if altitude_m <= 0.0 {
        return Err(GravityError::InvalidParameter("altitude must be > 0".into()));
    }
    let re = earth.radius_m;
    let m = earth.mass_length_m;
    let rs = re + altitude_m;
    let tan_zenith = (90.0 - altitude_angle_deg).to_radians().tan();
    let tan2 = tan_zenith * tan_zenith;
    let weight = move |r: f64| -> f64 {
        let base = match formulation {
            Formulation::General => m / r,
            Formulation::LocalClock => m / r - m / rs,
        };
        base * (1.0 + 2.0 * m / r + re * re * tan2 / (r * r)).sqrt()
    };
    // Relative tolerance 1e-10 on the integral scale.
    let scale = m * (rs / re).ln();
    let integral = adaptive_simpson(&weight, re, rs, 1e-10 * scale, 48)?;
    Ok(integral / C_M_S)
}

/// Decorrelation factor D = exp(-Delta_t^2 / (2 d_t^2)).
pub fn decorrelation_d(delta_t_s: f64, coherence_time_s: f64) -> f64 {
    (-0.5 * (delta_t_s / coherence_time_s).powi(2)).exp()
}

/// Solve the coherence time that yields a target D at a reference angle.
pub fn calibrate_coherence_time(
    earth: &EarthModel,
    altitude_m: f64,
    reference_angle_deg: f64,
    target_d: f64,
    formulation: Formulation,
) -> Result<f64, GravityError> {
    if !(0.0 < target_d && target_d < 1.0) {
        return Err(GravityError::InvalidParameter(format!("target D {target_d} outside (0, 1)")));
    }
    let dt = delta_t(earth, altitude_m, reference_angle_deg, formulation)?;
    Ok(dt / (-2.0 * target_d.ln()).sqrt())
}

/// Experimental decorrelation estimate with Poisson errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceEstimate {
    pub d_epr: f64,
    pub d_epr_sigma: f64,
    pub d_coh: f64,
    pub d_coh_sigma: f64,
}

/// Counts entering the estimators for one angle bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleBinCounts {
    /// Measured two-photon coincidences of the entangled pairs.
    pub observed_epr: u64,
    /// Entangled photons detected at the satellite.
    pub singles_epr_satellite: u64,
    /// Path-2 detection efficiency (ground twin).
    pub eta_ground: f64,
    /// Measured coherent-laser coincidences.
    pub observed_coh: u64,
    /// Coherent photons detected at the satellite.
    pub singles_coh_satellite: u64,
    /// Ground singles in the coherent reference path.
    pub singles_coh_ground: u64,
    /// Laser pulse period, s.
    pub pulse_period_s: f64,
    /// Data collection time in the bin, s.
    pub collection_time_s: f64,
}

/// Decorrelation estimators: the measured coincidences divided by the
/// standard-quantum-theory expectations
///   C_SQT_EPR = eta_2 * S_EPR,
///   C_SQT_COH = S_COH * S_3 * t_p / t_bin.
pub fn decorrelation_estimators(counts: &AngleBinCounts) -> Result<DecoherenceEstimate, GravityError> {
    let c_sqt_epr = counts.eta_ground * counts.singles_epr_satellite as f64;
    let c_sqt_coh =
        counts.singles_coh_satellite as f64 * counts.singles_coh_ground as f64 * counts.pulse_period_s / counts.collection_time_s;
    if c_sqt_epr <= 0.0 || c_sqt_coh <= 0.0 {
        return Err(GravityError::EmptyBin);
    }
    let d_epr = counts.observed_epr as f64 / c_sqt_epr;
    let d_coh = counts.observed_coh as f64 / c_sqt_coh;
    // Propagated Poisson errors from every counted quantity.
    let rel_epr = (1.0 / counts.observed_epr.max(1) as f64 + 1.0 / counts.singles_epr_satellite.max(1) as f64).sqrt();
    let rel_coh = (1.0 / counts.observed_coh.max(1) as f64
        + 1.0 / counts.singles_coh_satellite.max(1) as f64
        + 1.0 / counts.singles_coh_ground.max(1) as f64)
        .sqrt();
    Ok(DecoherenceEstimate {
        d_epr,
        d_epr_sigma: d_epr * rel_epr,
        d_coh,
        d_coh_sigma: d_coh * rel_coh,
    })
}

/// Simulated angle bin with a true decorrelation factor `d_true` injected:
/// all counts are Poisson draws around their expectations.
#[allow(clippy::too_many_arguments)]
pub fn simulate_angle_bin(
    expected_pairs_at_satellite: f64,
    eta_ground: f64,
    expected_coh_at_satellite: f64,
    ground_coh_rate_hz: f64,
    pulse_period_s: f64,
    collection_time_s: f64,
    d_true: f64,
    seed: u64,
) -> AngleBinCounts {
    let mut rng = Seeder::new(seed).rng("gravity-bin", 0);
    let singles_epr = sample_poisson(expected_pairs_at_satellite, &mut rng);
    let observed_epr = sample_poisson(expected_pairs_at_satellite * eta_ground * d_true, &mut rng);
    let singles_coh = sample_poisson(expected_coh_at_satellite, &mut rng);
    let singles_ground = sample_poisson(ground_coh_rate_hz * collection_time_s, &mut rng);
    let accidental = expected_coh_at_satellite * (ground_coh_rate_hz * collection_time_s) * pulse_period_s / collection_time_s;
    let observed_coh = sample_poisson(accidental * d_true, &mut rng);
    AngleBinCounts {
        observed_epr,
        singles_epr_satellite: singles_epr,
        eta_ground,
        observed_coh,
        singles_coh_satellite: singles_coh,
        singles_coh_ground: singles_ground,
        pulse_period_s,
        collection_time_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const H500_KM: f64 = 500e3;

    /// Closed-form zenith references: at theta = 90 the angular term
    /// vanishes and the 2M/r correction is below 1e-8 relative, so
    ///   general:     M ln((re+h)/re) / c
    ///   local clock: M (ln((re+h)/re) - h/(re+h)) / c.
    fn zenith_oracle(formulation: Formulation) -> f64 {
        let earth = EarthModel::default();
        let re = earth.radius_m;
        let rs = re + H500_KM;
        let m = earth.mass_length_m;
        match formulation {
            Formulation::General => m * (rs / re).ln() / C_M_S,
            Formulation::LocalClock => m * ((rs / re).ln() - H500_KM / rs) / C_M_S,
        }
    }

    #[test]
    fn zenith_matches_closed_form_oracles() {
        let earth = EarthModel::default();
        for formulation in [Formulation::General, Formulation::LocalClock] {
            let dt = delta_t(&earth, H500_KM, 90.0, formulation).unwrap();
            let oracle = zenith_oracle(formulation);
            assert_relative_eq!(dt, oracle, max_relative = 1e-8);
        }
        // Magnitudes: ~1.12 ps general, ~41.2 fs local clock.
        let dt_gen = delta_t(&earth, H500_KM, 90.0, Formulation::General).unwrap();
        assert_relative_eq!(dt_gen, 1.118e-12, max_relative = 1e-3);
        let dt_loc = delta_t(&earth, H500_KM, 90.0, Formulation::LocalClock).unwrap();
        assert_relative_eq!(dt_loc, 4.122e-14, max_relative = 1e-3);
    }

    #[test]
    fn delta_t_vanishes_with_altitude() {
        // One meter of climb: ~1e-18 s of offset, vanishing with h.
        let earth = EarthModel::default();
        let dt = delta_t(&earth, 1.0, 45.0, Formulation::General).unwrap();
        assert!(dt < 1e-16, "dt {dt}");
        let dt_lower = delta_t(&earth, 0.1, 45.0, Formulation::General).unwrap();
        assert!(dt_lower < dt);
    }

    #[test]
    fn local_clock_below_general_everywhere() {
        let earth = EarthModel::default();
        for h in [200e3, 500e3, 2000e3, 36_000e3] {
            for theta in [10.0, 30.0, 50.0, 70.0, 90.0] {
                let loc = delta_t(&earth, h, theta, Formulation::LocalClock).unwrap();
                let gen = delta_t(&earth, h, theta, Formulation::General).unwrap();
                assert!(loc < gen, "h {h} theta {theta}: {loc} vs {gen}");
                assert!(loc > 0.0);
            }
        }
    }

    #[test]
    fn delta_t_decreases_with_altitude_angle() {
        let earth = EarthModel::default();
        for formulation in [Formulation::General, Formulation::LocalClock] {
            let mut prev = f64::INFINITY;
            for theta in [15.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
                let dt = delta_t(&earth, H500_KM, theta, formulation).unwrap();
                assert!(dt < prev, "not decreasing at {theta}");
                prev = dt;
            }
        }
    }

    #[test]
    fn decorrelation_factor_basics() {
        assert_eq!(decorrelation_d(0.0, 1e-12), 1.0);
        assert_abs_diff_eq!(decorrelation_d(1e-12, 1e-12), (-0.5f64).exp(), epsilon = 1e-12);
        // D -> 1 as coherence time grows.
        let mut prev = 0.0;
        for dt_coh in [1e-14, 1e-13, 1e-12, 1e-10] {
            let d = decorrelation_d(4e-14, dt_coh);
            assert!(d > prev);
            prev = d;
        }
        assert!(prev > 0.999999);
    }

    #[test]
    fn calibrated_band_matches_published_window() {
        // Calibrate d_t so that D(50 deg) = 0.97 in the local-clock
        // formulation; D over (40, 60) deg then spans the published
        // 0.96-0.98 window at its quoted two-decimal precision.
        let earth = EarthModel::default();
        let d_t = calibrate_coherence_time(&earth, H500_KM, 50.0, 0.97, Formulation::LocalClock).unwrap();
        let d50 = decorrelation_d(delta_t(&earth, H500_KM, 50.0, Formulation::LocalClock).unwrap(), d_t);
        assert_abs_diff_eq!(d50, 0.97, epsilon = 1e-9);
        let mut theta = 40.5;
        while theta < 60.0 {
            let d = decorrelation_d(delta_t(&earth, H500_KM, theta, Formulation::LocalClock).unwrap(), d_t);
            assert!((0.955..=0.985).contains(&d), "theta {theta}: D {d}");
            theta += 1.0;
        }
    }

    #[test]
    fn estimator_identity_when_counts_match() {
        let counts = AngleBinCounts {
            observed_epr: 500,
            singles_epr_satellite: 1000,
            eta_ground: 0.5,
            observed_coh: 200,
            singles_coh_satellite: 100_000,
            singles_coh_ground: 200_000,
            pulse_period_s: 1e-8,
            collection_time_s: 1.0,
        };
        let est = decorrelation_estimators(&counts).unwrap();
        assert_abs_diff_eq!(est.d_epr, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.d_coh, 1.0, epsilon = 1e-12);
        assert!(est.d_epr_sigma > 0.0);
    }

    #[test]
    fn estimator_rejects_empty_bins() {
        let counts = AngleBinCounts {
            observed_epr: 0,
            singles_epr_satellite: 0,
            eta_ground: 0.5,
            observed_coh: 0,
            singles_coh_satellite: 0,
            singles_coh_ground: 0,
            pulse_period_s: 1e-8,
            collection_time_s: 1.0,
        };
        assert_eq!(decorrelation_estimators(&counts), Err(GravityError::EmptyBin));
    }

    #[test]
    fn injection_recovery_of_decorrelation() {
        // Inject D = 0.9 and D = 1.0; the estimators recover them within
        // 3 sigma.
        for (d_true, seed) in [(0.9, 21u64), (1.0, 22)] {
            let counts = simulate_angle_bin(20_000.0, 0.3, 500_000.0, 2000.0, 1e-8, 50.0, d_true, seed);
            let est = decorrelation_estimators(&counts).unwrap();
            assert!(
                (est.d_epr - d_true).abs() < 3.0 * est.d_epr_sigma,
                "EPR: {} vs {d_true} (sigma {})",
                est.d_epr,
                est.d_epr_sigma
            );
            assert!(
                (est.d_coh - d_true).abs() < 3.0 * est.d_coh_sigma,
                "COH: {} vs {d_true} (sigma {})",
                est.d_coh,
                est.d_coh_sigma
            );
        }
    }

    #[test]
    fn estimator_independent_of_bin_interleaving() {
        // The pulse-train interleaving only assigns events to disjoint time
        // bins; merging two half-bins with the same rates must reproduce the
        // single-bin estimate exactly.
        let half = AngleBinCounts {
            observed_epr: 250,
            singles_epr_satellite: 500,
            eta_ground: 0.5,
            observed_coh: 100,
            singles_coh_satellite: 50_000,
            singles_coh_ground: 100_000,
            pulse_period_s: 1e-8,
            collection_time_s: 0.5,
        };
        let merged = AngleBinCounts {
            observed_epr: 500,
            singles_epr_satellite: 1000,
            observed_coh: 200,
            singles_coh_satellite: 100_000,
            singles_coh_ground: 200_000,
            collection_time_s: 1.0,
            ..half
        };
        let a = decorrelation_estimators(&half).unwrap();
        let b = decorrelation_estimators(&merged).unwrap();
        assert_abs_diff_eq!(a.d_epr, b.d_epr, epsilon = 1e-12);
        assert_abs_diff_eq!(a.d_coh, b.d_coh, epsilon = 1e-12);
    }
}
