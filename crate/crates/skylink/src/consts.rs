//! Physical constants shared across modules.

/// Speed of light in vacuum, m/s.
pub const C_M_S: f64 = 299_792_458.0;

/// Mean Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Mean Earth radius, m.
pub const EARTH_RADIUS_M: f64 = EARTH_RADIUS_KM * 1000.0;

/// Standard gravitational parameter of Earth, km^3/s^2.
pub const MU_EARTH_KM3_S2: f64 = 398_600.4418;

/// Earth's mass expressed as a length, GM/c^2, in meters.
///
/// GM = 3.986004418e14 m^3/s^2 divided by c^2 gives 4.435e-3 m.
pub const EARTH_MASS_LENGTH_M: f64 = MU_EARTH_KM3_S2 * 1.0e9 / (C_M_S * C_M_S);

/// Sidereal Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

/// Seconds per Julian year.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;
