#pragma once

#include <numbers>

// Physical constants (CODATA 2018, SI) and the unit conversions used to turn
// laboratory quantities into the angular rates the physics modules work in.
namespace transducer::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double boltzmann = 1.380649e-23;          // J/K
inline constexpr double speed_of_light = 299792458.0;      // m/s

}  // namespace transducer::constants

namespace transducer::units {

/// Cyclic frequency in Hz to angular frequency in rad/s.
constexpr double angular(double hertz) { return constants::two_pi * hertz; }
/// Angular frequency to cyclic frequency; every "/2pi" figure goes through here.
constexpr double cyclic(double rad_per_s) { return rad_per_s / constants::two_pi; }

constexpr double mhz_to_rad(double mhz) { return angular(mhz * 1e6); }
constexpr double ghz_to_rad(double ghz) { return angular(ghz * 1e9); }
constexpr double khz_to_rad(double khz) { return angular(khz * 1e3); }

/// Energy in eV to angular frequency E/hbar.
constexpr double ev_to_rad(double ev) {
  return ev * constants::elementary_charge / constants::hbar;
}

/// ZPL strain shift quoted in meV per 1 % strain, as rad/s per unit strain.
constexpr double strain_shift_from_mev_per_percent(double mev_per_percent) {
  // 1 % strain = 0.01 unit strain
  return ev_to_rad(mev_per_percent * 1e-3 / 0.01);
}

/// Linear Stark shift quoted in meV per MV/m, as rad/s per (V/m).
constexpr double stark_shift_from_mev_per_mv_m(double mev_per_mv_m) {
  return ev_to_rad(mev_per_mv_m * 1e-3) / 1e6;
}

/// Vacuum wavelength to angular optical frequency.
constexpr double wavelength_to_rad(double wavelength_m) {
  return constants::two_pi * constants::speed_of_light / wavelength_m;
}

}  // namespace transducer::units
