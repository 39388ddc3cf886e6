#pragma once

#include <cmath>

#include "transducer/circuit.hpp"
#include "transducer/constants.hpp"
#include "transducer/errors.hpp"
#include "transducer/mechanics.hpp"

// Emitter-phonon coupling through strain and the Stark effect, the
// drive-dressed (red sideband) coupling, and the thermal bookkeeping applied
// to every decay channel. All rates are angular (rad/s).
namespace transducer::coupling {

using mechanics::ElectrostaticEnvironment;
using mechanics::MembraneGeometry;
using mechanics::OperatingPoint;

struct EmitterParams {
  double zpl_frequency = units::wavelength_to_rad(600e-9);              // rad/s
  double optical_decay = units::mhz_to_rad(53.0);                        // rad/s
  double strain_shift = units::strain_shift_from_mev_per_percent(5.0);   // rad/s per unit strain
  double stark_shift = units::stark_shift_from_mev_per_mv_m(21.0 / 400.0);  // rad/s per V/m

  void validate() const {
    if (!(zpl_frequency > 0.0)) throw DomainError("ZPL frequency must be positive");
    if (!(optical_decay > 0.0)) throw DomainError("optical decay rate must be positive");
  }
};

/// Every coupling and damping rate the transfer dynamics needs. The "/2pi"
/// figures are never stored; convert with units::cyclic.
struct CouplingSet {
  double g_em = 0.0;           // electromechanical
  double g_om1 = 0.0;          // strain
  double g_om2 = 0.0;          // Stark
  double rabi_rate = 0.0;      // drive Omega
  double effective_g_om = 0.0; // (Omega/2) g_om / omega_m
  double detuning = 0.0;       // omega_L - omega_0 - g_om^2/omega_m
  double optical_decay = 0.0;  // kappa
  double mech_damping = 0.0;   // Gamma_m
  double lc_damping = 0.0;     // Gamma_LC
  double n_mech = 0.0;
  double n_lc = 0.0;
  double n_optical = 0.0;
};

/// Strain coupling: the zero-point motion modulates the static stretch of a
/// membrane already deflected by x0, dS = 4 x0 x_zpf / l^2.
inline double strain_coupling(const OperatingPoint& op, const MembraneGeometry& g,
                              const EmitterParams& e) {
  return 4.0 * op.deflection * op.x_zpf / (g.length * g.length) * e.strain_shift;
}

/// Stark coupling: zero-point motion modulates the gap field V/(d - x0).
inline double stark_coupling(const OperatingPoint& op, const ElectrostaticEnvironment& env,
                             const EmitterParams& e) {
  if (!(op.deflection < env.gap)) throw DomainError("deflection must be below the gap");
  const double s = env.gap - op.deflection;
  return op.x_zpf * env.bias_voltage / (s * s) * e.stark_shift;
}

inline double effective_optomechanical_coupling(double rabi_rate, double g_om, double mech_frequency) {
  if (!(mech_frequency > 0.0)) throw DomainError("mechanical frequency must be positive");
  return 0.5 * rabi_rate * g_om / mech_frequency;
}

/// Laser detuning from the polaron-shifted transition.
inline double drive_detuning(double laser_frequency, double zpl_frequency, double g_om,
                             double mech_frequency) {
  return laser_frequency - zpl_frequency - g_om * g_om / mech_frequency;
}

/// Bose-Einstein occupation of a mode at angular frequency omega; zero at T = 0.
inline double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw DomainError("mode frequency must be positive");
  if (!(temperature >= 0.0)) throw DomainError("temperature must be nonnegative");
  if (temperature == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

/// Stimulated-emission-enhanced rate (n + 1) * rate.
inline double effective_decay(double rate, double occupation) {
  return (occupation + 1.0) * rate;
}

inline double cooperativity(double g, double rate_a, double rate_b) { return g * g / (rate_a * rate_b); }

struct Drive {
  double rabi_rate = 0.0;        // Omega, rad/s
  double laser_frequency = 0.0;  // omega_L, rad/s
};

/// Couplings of a biased device at its solved operating point. The dressed
/// coupling uses the total emitter shift g_om1 + g_om2. Decay rates are the
/// bare ones; occupations are evaluated at `temperature` for the mechanical,
/// LC and optical modes.
inline CouplingSet device_couplings(const MembraneGeometry& g, const ElectrostaticEnvironment& env,
                                    const OperatingPoint& op, const circuit::CircuitParams& c,
                                    const EmitterParams& e, const Drive& drive,
                                    double mech_damping, double temperature) {
  e.validate();
  CouplingSet s;
  s.g_em = circuit::electromechanical_coupling(op, c, g).g_em;
  s.g_om1 = strain_coupling(op, g, e);
  s.g_om2 = stark_coupling(op, env, e);
  const double g_om = s.g_om1 + s.g_om2;
  s.rabi_rate = drive.rabi_rate;
  s.effective_g_om = effective_optomechanical_coupling(drive.rabi_rate, g_om, op.mech_frequency);
  s.detuning = drive_detuning(drive.laser_frequency, e.zpl_frequency, g_om, op.mech_frequency);
  s.optical_decay = e.optical_decay;
  s.mech_damping = mech_damping;
  s.lc_damping = c.damping();
  s.n_mech = thermal_occupation(op.mech_frequency, temperature);
  s.n_lc = thermal_occupation(c.lc_frequency, temperature);
  s.n_optical = thermal_occupation(e.zpl_frequency, temperature);
  return s;
}

/// Coupling set with a common coupling g_c on both links, as used for the
/// transfer studies where rates are specified directly.
inline CouplingSet symmetric_couplings(double g_c, double optical_decay, double mech_damping,
                                       double lc_damping, double mech_frequency,
                                       double lc_frequency, double optical_frequency,
                                       double temperature) {
  CouplingSet s;
  s.g_em = g_c;
  s.effective_g_om = g_c;
  s.optical_decay = optical_decay;
  s.mech_damping = mech_damping;
  s.lc_damping = lc_damping;
  s.n_mech = thermal_occupation(mech_frequency, temperature);
  s.n_lc = thermal_occupation(lc_frequency, temperature);
  s.n_optical = thermal_occupation(optical_frequency, temperature);
  return s;
}

}  // namespace transducer::coupling
