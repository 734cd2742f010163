//! Free-space optical link budgets.
//!
//! The one-way channel efficiency is a product of independent terms:
//! transmitter and receiver optics, diffraction capture, turbulence
//! broadening, pointing jitter, and atmospheric transmittance. Each term is
//! an efficiency in (0, 1]; the budget tracks them separately so reports can
//! show a per-term dB breakdown.
//!
//! Beam propagation is Gaussian: spot radius w(z) = w0*sqrt(1+(z/zR)^2) with
//! Rayleigh range zR = pi*w0^2/lambda. Turbulence broadens the long-term
//! spot to w_at = w_d*sqrt(1 + 1.33*sigma_R^2*Lambda^(5/6)). A telescope of
//! aperture radius r captures 1 - exp(-2r^2/w^2), and Gaussian pointing
//! jitter of scale sigma_p costs w^2/(w^2+4 sigma_p^2). The atmosphere is a
//! per-band zenith transmittance raised to the plane-parallel airmass.

use crate::util::{from_db, to_db};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate elevation {0} deg: airmass diverges")]
    DegenerateElevation(f64),
}

/// Gaussian beam parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    /// Wavelength, m.
    pub wavelength_m: f64,
    /// Waist radius, m.
    pub waist_m: f64,
}

impl BeamParams {
    pub fn new(wavelength_m: f64, waist_m: f64) -> Result<Self, LinkError> {
        if wavelength_m <= 0.0 || waist_m <= 0.0 {
            return Err(LinkError::InvalidParameter("wavelength and waist must be > 0".into()));
        }
        Ok(Self { wavelength_m, waist_m })
    }

    /// Beam with a given far-field divergence half-angle: w0 = lambda/(pi*theta).
    pub fn from_divergence(wavelength_m: f64, divergence_rad: f64) -> Result<Self, LinkError> {
        if divergence_rad <= 0.0 {
            return Err(LinkError::InvalidParameter("divergence must be > 0".into()));
        }
        Self::new(wavelength_m, wavelength_m / (std::f64::consts::PI * divergence_rad))
    }

    /// Downlink design guidance: set the FWHM beam waist to half the
    /// transmitting telescope diameter. The intensity FWHM of a Gaussian of
    /// radius w0 is w0*sqrt(2 ln 2), so w0 = D/(2 sqrt(2 ln 2)).
    pub fn from_telescope_fwhm(wavelength_m: f64, telescope_diameter_m: f64) -> Result<Self, LinkError> {
        if telescope_diameter_m <= 0.0 {
            return Err(LinkError::InvalidParameter("telescope diameter must be > 0".into()));
        }
        let w0 = telescope_diameter_m / (2.0 * (2.0 * 2.0_f64.ln()).sqrt());
        Self::new(wavelength_m, w0)
    }

    /// Rayleigh range zR = pi*w0^2/lambda, m.
    pub fn rayleigh_range_m(&self) -> f64 {
        std::f64::consts::PI * self.waist_m * self.waist_m / self.wavelength_m
    }

    /// Far-field divergence half-angle lambda/(pi*w0), rad.
    pub fn divergence_rad(&self) -> f64 {
        self.wavelength_m / (std::f64::consts::PI * self.waist_m)
    }
}

/// Turbulence strength at the receiver: Rytov variance for a plane wave and
/// the Fresnel ratio of the beam.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TurbulenceModel {
    pub rytov_variance: f64,
    pub fresnel_ratio: f64,
}

impl TurbulenceModel {
    pub fn new(rytov_variance: f64, fresnel_ratio: f64) -> Result<Self, LinkError> {
        if rytov_variance < 0.0 || fresnel_ratio < 0.0 {
            return Err(LinkError::InvalidParameter("turbulence parameters must be >= 0".into()));
        }
        Ok(Self { rytov_variance, fresnel_ratio })
    }

    /// Long-term spot broadening factor sqrt(1 + 1.33 sigma_R^2 Lambda^(5/6)).
    pub fn broadening_factor(&self) -> f64 {
        (1.0 + 1.33 * self.rytov_variance * self.fresnel_ratio.powf(5.0 / 6.0)).sqrt()
    }
}

/// Rytov variance for a plane wave over a slant path through a
/// Hufnagel-Valley 5/7 refractive-index structure profile.
///
/// sigma_R^2 = 2.25 k^(7/6) sec^(11/6)(zeta) Int Cn^2(h) (h-h0)^(5/6) dh.
/// The profile is a convenience for scenario authors; the budget itself
/// takes sigma_R^2 and Lambda directly.
pub fn rytov_variance_hv57(wavelength_m: f64, elevation_deg: f64, h0_m: f64, h_top_m: f64) -> f64 {
    let k = std::f64::consts::TAU / wavelength_m;
    let zeta = (90.0 - elevation_deg).to_radians();
    let cn2 = |h: f64| -> f64 {
        let w: f64 = 21.0; // rms wind, m/s (HV 5/7)
        let a = 1.7e-14;
        0.00594 * (w / 27.0).powi(2) * (1e-5 * h).powi(10) * (-h / 1000.0).exp()
            + 2.7e-16 * (-h / 1500.0).exp()
            + a * (-h / 100.0).exp()
    };
    // Fixed-step Simpson is plenty: the integrand is smooth and decays fast.
    let n = 2000;
    let dh = (h_top_m - h0_m) / f64::from(n);
    let mut sum = 0.0;
    for i in 0..=n {
        let h = h0_m + f64::from(i) * dh;
        let f = cn2(h) * (h - h0_m).max(0.0).powf(5.0 / 6.0);
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * f;
    }
    let integral = sum * dh / 3.0;
    2.25 * k.powf(7.0 / 6.0) * (1.0 / zeta.cos()).powf(11.0 / 6.0) * integral
}

/// Gaussian pointing jitter at the receiver plane, m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointingModel {
    pub jitter_m: f64,
}

impl PointingModel {
    pub fn new(jitter_m: f64) -> Result<Self, LinkError> {
        if jitter_m < 0.0 {
            return Err(LinkError::InvalidParameter("pointing jitter must be >= 0".into()));
        }
        Ok(Self { jitter_m })
    }

    /// Jitter from a tracking-error angle and a range.
    pub fn from_tracking(tracking_error_rad: f64, range_m: f64) -> Result<Self, LinkError> {
        Self::new(tracking_error_rad * range_m)
    }
}

/// Per-band zenith transmittance with plane-parallel airmass scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmosphereModel {
    /// Zenith transmittance in (0, 1].
    pub zenith_transmittance: f64,
    /// Visibility class label, carried through to reports.
    pub visibility: String,
}

impl AtmosphereModel {
    pub fn new(zenith_transmittance: f64, visibility: &str) -> Result<Self, LinkError> {
        if !(zenith_transmittance > 0.0 && zenith_transmittance <= 1.0) {
            return Err(LinkError::InvalidParameter(format!(
                "zenith transmittance {zenith_transmittance} outside (0, 1]"
            )));
        }
        Ok(Self {
            zenith_transmittance,
            visibility: visibility.to_string(),
        })
    }
}

/// Fixed optical-chain efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalChain {
    pub transmitter: f64,
    pub receiver: f64,
    pub coupling: f64,
    pub detector: f64,
    /// Mispointing entry for table-style budgets; pass-resolved budgets use
    /// `pointing_efficiency` instead.
    pub mispointing: f64,
}

impl OpticalChain {
    pub fn new(transmitter: f64, receiver: f64, coupling: f64, detector: f64, mispointing: f64) -> Result<Self, LinkError> {
        for (name, v) in [
            ("transmitter", transmitter),
            ("receiver", receiver),
            ("coupling", coupling),
            ("detector", detector),
            ("mispointing", mispointing),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(LinkError::InvalidParameter(format!("{name} efficiency {v} outside (0, 1]")));
            }
        }
        Ok(Self {
            transmitter,
            receiver,
            coupling,
            detector,
            mispointing,
        })
    }
}

/// One named term of a link budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetTerm {
    pub name: &'static str,
    pub efficiency: f64,
}

impl BudgetTerm {
    pub fn db(&self) -> f64 {
        to_db(self.efficiency)
    }
}

/// A per-term efficiency breakdown whose total is the product of the terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub terms: Vec<BudgetTerm>,
}

impl LinkBudget {
    pub fn from_terms(terms: Vec<(&'static str, f64)>) -> Result<Self, LinkError> {
        for &(name, v) in &terms {
            if !(v > 0.0 && v <= 1.0) {
                return Err(LinkError::InvalidParameter(format!("term {name} = {v} outside (0, 1]")));
            }
        }
        Ok(Self {
            terms: terms
                .into_iter()
                .map(|(name, efficiency)| BudgetTerm { name, efficiency })
                .collect(),
        })
    }

    /// Total efficiency: product of the terms.
    pub fn total(&self) -> f64 {
        self.terms.iter().map(|t| t.efficiency).product()
    }

    /// Total in dB (non-positive).
    pub fn total_db(&self) -> f64 {
        to_db(self.total())
    }

    /// CSV export: `term,efficiency,db` plus a total row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("term,efficiency,db\n");
        for t in &self.terms {
            out.push_str(&format!(
                "{},{},{}\n",
                t.name,
                crate::util::fmt_sig12(t.efficiency),
                crate::util::fmt_sig12(t.db())
            ));
        }
        out.push_str(&format!(
            "total,{},{}\n",
            crate::util::fmt_sig12(self.total()),
            crate::util::fmt_sig12(self.total_db())
        ));
        out
    }
}

/// Spot radius at distance `z`, optionally broadened by turbulence.
pub fn beam_radius_at(beam: BeamParams, z_m: f64, turbulence: Option<TurbulenceModel>) -> f64 {
    let zr = beam.rayleigh_range_m();
    let wd = beam.waist_m * (1.0 + (z_m / zr).powi(2)).sqrt();
    match turbulence {
        Some(t) => wd * t.broadening_factor(),
        None => wd,
    }
}

/// Fraction of a Gaussian spot of radius `w` captured by an aperture of
/// radius `r`: 1 - exp(-2 r^2 / w^2).
pub fn aperture_collection(spot_radius_m: f64, aperture_radius_m: f64) -> f64 {
    if aperture_radius_m <= 0.0 {
        return 0.0;
    }
    1.0 - (-2.0 * aperture_radius_m * aperture_radius_m / (spot_radius_m * spot_radius_m)).exp()
}

/// Expected pointing loss for Gaussian jitter: w^2 / (w^2 + 4 sigma_p^2).
pub fn pointing_efficiency(spot_radius_m: f64, pointing: PointingModel) -> f64 {
    let w2 = spot_radius_m * spot_radius_m;
    w2 / (w2 + 4.0 * pointing.jitter_m * pointing.jitter_m)
}

/// Atmospheric transmittance at an elevation: T_z^(1/sin(el)).
pub fn atmospheric_transmittance(model: &AtmosphereModel, elevation_deg: f64) -> Result<f64, LinkError> {
    if elevation_deg <= 0.0 || elevation_deg > 90.0 {
        return Err(LinkError::DegenerateElevation(elevation_deg));
    }
    let airmass = 1.0 / elevation_deg.to_radians().sin();
    Ok(model.zenith_transmittance.powf(airmass))
}

/// Far-field geometric loss approximation 2*(D/(theta*Z))^2, capped at 1
/// near the field where the approximation breaks down.
pub fn geometric_loss_approx(aperture_diameter_m: f64, divergence_rad: f64, range_m: f64) -> f64 {
    let ratio = aperture_diameter_m / (divergence_rad * range_m);
    (2.0 * ratio * ratio).min(1.0)
}

/// Full one-way budget: fixed chain terms plus distance- and
/// elevation-resolved diffraction, turbulence, pointing, and atmosphere.
///
/// The diffraction term is the vacuum-spot capture; the turbulence term is
/// the extra penalty from the broadened spot, so their product equals the
/// capture of the turbulent spot.
#[allow(clippy::too_many_arguments)]
pub fn link_loss(
    chain: OpticalChain,
    beam: BeamParams,
    turbulence: Option<TurbulenceModel>,
    pointing: PointingModel,
    atmosphere: &AtmosphereModel,
    range_km: f64,
    elevation_deg: f64,
    aperture_radius_m: f64,
) -> Result<LinkBudget, LinkError> {
    if range_km <= 0.0 {
        return Err(LinkError::InvalidParameter(format!("range {range_km} km must be > 0")));
    }
    if aperture_radius_m <= 0.0 {
        return Err(LinkError::InvalidParameter(format!(
            "aperture radius {aperture_radius_m} m must be > 0"
        )));
    }
    let z_m = range_km * 1000.0;
    let w_vac = beam_radius_at(beam, z_m, None);
    let w_at = beam_radius_at(beam, z_m, turbulence);
    let eta_d = aperture_collection(w_vac, aperture_radius_m);
    let eta_at = aperture_collection(w_at, aperture_radius_m) / eta_d;
    let eta_p = pointing_efficiency(w_at, pointing);
    let eta_as = atmospheric_transmittance(atmosphere, elevation_deg)?;
    LinkBudget::from_terms(vec![
        ("transmitter", chain.transmitter),
        ("receiver", chain.receiver),
        ("coupling", chain.coupling),
        ("detector", chain.detector),
        ("diffraction", eta_d),
        ("turbulence", eta_at),
        ("pointing", eta_p),
        ("atmosphere", eta_as),
    ])
}

/// Table-style budget from seven fixed factors (geometry, atmosphere,
/// transmitter, receiver, coupling, detector, mispointing).
pub fn table_budget(
    geometry: f64,
    atmosphere: f64,
    transmitter: f64,
    receiver: f64,
    coupling: f64,
    detector: f64,
    mispointing: f64,
) -> Result<LinkBudget, LinkError> {
    LinkBudget::from_terms(vec![
        ("geometry", geometry),
        ("atmosphere", atmosphere),
        ("transmitter", transmitter),
        ("receiver", receiver),
        ("coupling", coupling),
        ("detector", detector),
        ("mispointing", mispointing),
    ])
}

/// Reference design-point budgets for one-downlink QKD, two-downlink
/// entanglement distribution, and one-uplink teleportation at 1000 km.
pub mod design_points {
    use super::{table_budget, LinkBudget};

    /// One-downlink channel for QKD.
    pub fn one_downlink() -> LinkBudget {
        table_budget(0.0128, 0.5, 1.0, 0.4, 0.5, 0.5, 0.5).unwrap()
    }

    /// Two-downlink channel for entanglement distribution (both links folded
    /// into single squared factors).
    pub fn two_downlink() -> LinkBudget {
        table_budget(0.000164, 0.25, 0.25, 0.16, 0.25, 0.25, 0.25).unwrap()
    }

    /// One-uplink channel for teleportation.
    pub fn one_uplink() -> LinkBudget {
        table_budget(0.00045, 0.5, 0.5, 0.4, 0.5, 0.5, 0.5).unwrap()
    }
}

/// Free-space channel model used for the fiber comparison: fixed chain terms
/// plus Gaussian-capture diffraction versus distance.
#[derive(Debug, Clone)]
pub struct FreespaceChannel {
    pub beam: BeamParams,
    pub aperture_radius_m: f64,
    /// Product of the distance-independent efficiencies.
    pub fixed_efficiency: f64,
}

impl FreespaceChannel {
    /// Reference-design downlink: 10 urad divergence at 850 nm, 1.2 m
    /// receiving telescope, and fixed terms {atmosphere 0.5, receiver 0.4,
    /// coupling 0.5, mispointing 0.5} up to the detectors.
    pub fn reference_downlink() -> Self {
        Self {
            beam: BeamParams::from_divergence(850e-9, 10e-6).unwrap(),
            aperture_radius_m: 0.6,
            fixed_efficiency: 0.5 * 0.4 * 0.5 * 0.5,
        }
    }

    /// Channel loss in dB (positive number) at a distance.
    pub fn loss_db(&self, distance_km: f64) -> f64 {
        let w = beam_radius_at(self.beam, distance_km * 1000.0, None);
        let eta = self.fixed_efficiency * aperture_collection(w, self.aperture_radius_m);
        -to_db(eta)
    }
}

/// Result of the fiber-versus-free-space comparison at a distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberComparison {
    pub fiber_db: f64,
    pub freespace_db: f64,
    /// Distance at which free space starts winning, km.
    pub crossover_km: f64,
}

/// Compare fiber attenuation `alpha_db_per_km * L` against a free-space
/// channel at distance `L`, and find the crossover distance by bisection.
pub fn fiber_vs_freespace(alpha_db_per_km: f64, channel: &FreespaceChannel, distance_km: f64) -> Result<FiberComparison, LinkError> {
    if alpha_db_per_km <= 0.0 {
        return Err(LinkError::InvalidParameter("fiber attenuation must be > 0".into()));
    }
    let gap = |l: f64| alpha_db_per_km * l - channel.loss_db(l);
    // Fiber always loses at very long distance; find a bracket then bisect.
    let mut lo = 1.0;
    let mut hi = 1.0;
    while gap(hi) < 0.0 && hi < 1e6 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(FiberComparison {
        fiber_db: alpha_db_per_km * distance_km,
        freespace_db: channel.loss_db(distance_km),
        crossover_km: 0.5 * (lo + hi),
    })
}

/// Expected detections per second through a fiber of length `l_km`.
pub fn fiber_detection_rate(source_rate_hz: f64, alpha_db_per_km: f64, l_km: f64) -> f64 {
    source_rate_hz * from_db(-alpha_db_per_km * l_km)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::SECONDS_PER_YEAR;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn micius_beam() -> BeamParams {
        // 10 urad divergence at 850 nm -> w0 = 27.06 mm.
        BeamParams::from_divergence(850e-9, 10e-6).unwrap()
    }

    #[test]
    fn beam_waist_from_divergence() {
        let beam = micius_beam();
        assert_relative_eq!(beam.waist_m, 27.06e-3, max_relative = 1e-3);
        // theta * w0 = lambda / pi
        assert_relative_eq!(
            beam.divergence_rad() * beam.waist_m,
            850e-9 / std::f64::consts::PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn beam_radius_at_waist_and_far_field() {
        let beam = micius_beam();
        assert_abs_diff_eq!(beam_radius_at(beam, 0.0, None), beam.waist_m, epsilon = 1e-12);
        // Far field: w ~ theta*z = 10 m at 1000 km.
        assert_relative_eq!(beam_radius_at(beam, 1e6, None), 10.0, max_relative = 1e-3);
    }

    #[test]
    fn beam_radius_turbulent_broadening() {
        let beam = micius_beam();
        let t = TurbulenceModel::new(1.0, 1.0).unwrap();
        let w = beam_radius_at(beam, 1e6, Some(t));
        // sqrt(1 + 1.33) = sqrt(2.33) broadening on the 10 m spot.
        assert_relative_eq!(w, 10.0 * 2.33_f64.sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn aperture_collection_limits() {
        assert_abs_diff_eq!(aperture_collection(10.0, 1e6), 1.0, epsilon = 1e-12);
        assert_eq!(aperture_collection(10.0, 0.0), 0.0);
        // 12 m spot on a 0.6 m aperture: ~ -23 dB, consistent with the
        // ~22 dB diffraction loss reported at 1200 km.
        let eta = aperture_collection(12.0, 0.6);
        assert_relative_eq!(eta, 0.0049875, max_relative = 1e-4);
        assert_abs_diff_eq!(to_db(eta), -23.02, epsilon = 0.01);
    }

    #[test]
    fn aperture_collection_monotonicity() {
        assert!(aperture_collection(10.0, 0.7) > aperture_collection(10.0, 0.6));
        assert!(aperture_collection(11.0, 0.6) < aperture_collection(10.0, 0.6));
    }

    #[test]
    fn pointing_efficiency_values() {
        assert_eq!(pointing_efficiency(10.0, PointingModel::new(0.0).unwrap()), 1.0);
        // 1.2 urad tracking error at 1000 km -> sigma_p = 1.2 m.
        let p = PointingModel::from_tracking(1.2e-6, 1e6).unwrap();
        assert_relative_eq!(pointing_efficiency(10.0, p), 0.94553, max_relative = 1e-4);
        assert_abs_diff_eq!(pointing_efficiency(10.0, PointingModel::new(5.0).unwrap()), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pointing_efficiency_decreases_with_jitter() {
        let mut prev = 1.0;
        for j in [0.5, 1.0, 2.0, 4.0] {
            let eta = pointing_efficiency(10.0, PointingModel::new(j).unwrap());
            assert!(eta < prev);
            prev = eta;
        }
    }

    #[test]
    fn atmosphere_airmass_scaling() {
        let atm = AtmosphereModel::new(0.5, "clear-night").unwrap();
        assert_abs_diff_eq!(atmospheric_transmittance(&atm, 90.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(atmospheric_transmittance(&atm, 30.0).unwrap(), 0.25, epsilon = 1e-12);
        let unity = AtmosphereModel::new(1.0, "vacuum").unwrap();
        assert_eq!(atmospheric_transmittance(&unity, 17.0).unwrap(), 1.0);
        assert!(matches!(
            atmospheric_transmittance(&atm, 0.0),
            Err(LinkError::DegenerateElevation(_))
        ));
        // Decreasing toward the horizon.
        let mut prev = 0.0;
        for el in 5..=90 {
            let t = atmospheric_transmittance(&atm, f64::from(el)).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn geometric_loss_reference_points() {
        // 1.2 m telescope, 15 urad, 1000 km: 0.0128 = -18.9 dB.
        let eta = geometric_loss_approx(1.2, 15e-6, 1e6);
        assert_relative_eq!(eta, 0.0128, max_relative = 1e-12);
        assert_abs_diff_eq!(to_db(eta), -18.93, epsilon = 0.01);
        // Uplink geometry: 0.3 m aperture, 20 urad.
        assert_relative_eq!(geometric_loss_approx(0.3, 20e-6, 1e6), 4.5e-4, max_relative = 1e-12);
        // Near field caps at 1.
        assert_eq!(geometric_loss_approx(1.2, 15e-6, 5e4), 1.0);
    }

    #[test]
    fn table_budget_design_points() {
        // Products of the published per-term factors; the headline numbers
        // in the source round to -35/-75/-53 dB.
        let down = design_points::one_downlink();
        assert_abs_diff_eq!(down.total_db(), -34.949, epsilon = 5e-3);
        let two = design_points::two_downlink();
        assert_abs_diff_eq!(two.total_db(), -75.914, epsilon = 5e-3);
        let up = design_points::one_uplink();
        assert_abs_diff_eq!(up.total_db(), -52.499, epsilon = 5e-3);
    }

    #[test]
    fn budget_db_sum_matches_total() {
        for budget in [
            design_points::one_downlink(),
            design_points::two_downlink(),
            design_points::one_uplink(),
        ] {
            let db_sum: f64 = budget.terms.iter().map(|t| t.db()).sum();
            assert_abs_diff_eq!(db_sum, budget.total_db(), epsilon = 1e-9);
        }
    }

    #[test]
    fn link_loss_composes_terms() {
        let chain = OpticalChain::new(1.0, 0.4, 0.5, 0.5, 0.5).unwrap();
        let atm = AtmosphereModel::new(0.5, "clear-night").unwrap();
        let pointing = PointingModel::from_tracking(1.2e-6, 1e6).unwrap();
        let budget = link_loss(chain, micius_beam(), None, pointing, &atm, 1000.0, 90.0, 0.6).unwrap();
        let product: f64 = budget.terms.iter().map(|t| t.efficiency).product();
        assert_relative_eq!(budget.total(), product, max_relative = 1e-12);
        for t in &budget.terms {
            assert!(t.efficiency > 0.0 && t.efficiency <= 1.0, "{}: {}", t.name, t.efficiency);
        }
    }

    #[test]
    fn uplink_lossier_than_downlink() {
        // Same chain; uplink carries the turbulence-broadened divergence
        // (20 urad vs 15 urad effective).
        let down = BeamParams::from_divergence(850e-9, 15e-6).unwrap();
        let up = BeamParams::from_divergence(850e-9, 20e-6).unwrap();
        let chain = OpticalChain::new(0.5, 0.4, 0.5, 0.5, 0.5).unwrap();
        let atm = AtmosphereModel::new(0.5, "clear-night").unwrap();
        let p = PointingModel::new(1.2).unwrap();
        let d = link_loss(chain, down, None, p, &atm, 1000.0, 45.0, 0.6).unwrap();
        let u = link_loss(chain, up, None, p, &atm, 1000.0, 45.0, 0.6).unwrap();
        assert!(u.total_db() < d.total_db(), "uplink {} vs downlink {}", u.total_db(), d.total_db());
    }

    #[test]
    fn fiber_crossover_in_expected_band() {
        let cmp = fiber_vs_freespace(0.2, &FreespaceChannel::reference_downlink(), 1000.0).unwrap();
        assert!(
            (50.0..=100.0).contains(&cmp.crossover_km),
            "crossover {}",
            cmp.crossover_km
        );
        assert_abs_diff_eq!(cmp.fiber_db, 200.0, epsilon = 1e-9);
    }

    #[test]
    fn fiber_photon_per_century() {
        // 10 GHz source through 1000 km of 0.2 dB/km fiber: ~0.32
        // detections per century.
        let rate = fiber_detection_rate(1e10, 0.2, 1000.0);
        let per_century = rate * SECONDS_PER_YEAR * 100.0;
        assert_relative_eq!(per_century, 0.3156, max_relative = 1e-3);
    }

    #[test]
    fn fiber_1200km_sifted_bit_every_six_million_years() {
        let rate = fiber_detection_rate(1e10, 0.2, 1200.0) * 0.5; // 1/2 sifting
        let years_per_bit = 1.0 / rate / SECONDS_PER_YEAR;
        assert!(
            (3.0e6..=1.2e7).contains(&years_per_bit),
            "{years_per_bit} years/bit"
        );
        // 240 dB of fiber loss at 1200 km.
        assert_abs_diff_eq!(0.2 * 1200.0, 240.0, epsilon = 1e-12);
    }

    #[test]
    fn rytov_variance_helper_is_sane() {
        // Slant path at 850 nm from sea level: weak-fluctuation regime for
        // a downlink, growing toward the horizon.
        let high = rytov_variance_hv57(850e-9, 90.0, 0.0, 20_000.0);
        let low = rytov_variance_hv57(850e-9, 20.0, 0.0, 20_000.0);
        assert!(high > 0.0 && high < 1.0, "zenith Rytov {high}");
        assert!(low > high, "low-elevation Rytov {low} vs zenith {high}");
    }
}
