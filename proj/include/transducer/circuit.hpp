#pragma once

#include <cmath>

#include "transducer/constants.hpp"
#include "transducer/errors.hpp"
#include "transducer/mechanics.hpp"

// LC microwave resonator whose capacitance includes the membrane, and the
// resulting phonon-photon (electromechanical) coupling. The bias-isolation
// elements (C1, L2) are treated as ideal and never enter these formulas.
namespace transducer::circuit {

using mechanics::MembraneGeometry;
using mechanics::OperatingPoint;

struct CircuitParams {
  double inductance = 1e-6;           // H (L1)
  double tuning_capacitance = 0.0;    // F (C0)
  double gap = 10e-9;                 // m
  double bias_voltage = 0.0;          // V
  double quality_factor = 50000.0;
  double lc_frequency = 0.0;          // rad/s
  double q_zpf = 0.0;                 // C

  /// Microwave energy damping rate omega_LC / Q_LC.
  double damping() const { return lc_frequency / quality_factor; }
};

struct ElectromechanicalCoupling {
  double gradient = 0.0;       // |q dC^-1/dx| at x0, V/m
  double g_em = 0.0;           // rad/s
  double static_charge = 0.0;  // C
};

/// Parallel-plate capacitance of the membrane at deflection x.
inline double membrane_capacitance(const MembraneGeometry& g, double gap, double x) {
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  if (!(x >= 0.0) || !(x < gap)) throw DomainError("deflection must lie in [0, gap)");
  return constants::vacuum_permittivity * g.length * g.width / (gap - x);
}

/// dC_m/dx.
inline double membrane_capacitance_slope(const MembraneGeometry& g, double gap, double x) {
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  if (!(x >= 0.0) || !(x < gap)) throw DomainError("deflection must lie in [0, gap)");
  const double s = gap - x;
  return constants::vacuum_permittivity * g.length * g.width / (s * s);
}

inline double lc_frequency(double inductance, double total_capacitance) {
  if (!(inductance > 0.0) || !(total_capacitance > 0.0))
    throw DomainError("LC frequency needs positive inductance and capacitance");
  return 1.0 / std::sqrt(inductance * total_capacitance);
}

/// sqrt(hbar / (2 L omega)).
inline double charge_zero_point(double inductance, double omega) {
  if (!(inductance > 0.0) || !(omega > 0.0))
    throw DomainError("charge zero-point needs positive inductance and frequency");
  return std::sqrt(constants::hbar / (2.0 * inductance * omega));
}

/// Tuning capacitance C0 that puts the LC resonance at `target_omega` given
/// the membrane capacitance already in the circuit.
inline double tune_c0(double inductance, double target_omega, double membrane_cap) {
  if (!(inductance > 0.0) || !(target_omega > 0.0))
    throw DomainError("tuning needs positive inductance and target frequency");
  const double total = 1.0 / (inductance * target_omega * target_omega);
  if (membrane_cap > total)
    throw TuningError("membrane capacitance " + std::to_string(membrane_cap) +
                      " F exceeds the total " + std::to_string(total) +
                      " F allowed by the target frequency");
  return total - membrane_cap;
}

/// Circuit with C0 chosen so that omega_LC matches the mechanical frequency
/// at the operating point.
inline CircuitParams matched_circuit(const MembraneGeometry& g, double gap, double bias_voltage,
                                     const OperatingPoint& op, double inductance,
                                     double quality_factor) {
  if (!(quality_factor > 0.0)) throw DomainError("quality factor must be positive");
  CircuitParams c;
  c.inductance = inductance;
  c.gap = gap;
  c.bias_voltage = bias_voltage;
  c.quality_factor = quality_factor;
  const double cm = membrane_capacitance(g, gap, op.deflection);
  c.tuning_capacitance = tune_c0(inductance, op.mech_frequency, cm);
  c.lc_frequency = lc_frequency(inductance, cm + c.tuning_capacitance);
  c.q_zpf = charge_zero_point(inductance, c.lc_frequency);
  return c;
}

/// Single-phonon, single-photon electromechanical coupling rate
/// g_em = |q dC^-1/dx| x_zpf q_zpf / hbar at the operating point.
inline ElectromechanicalCoupling electromechanical_coupling(const OperatingPoint& op,
                                                            const CircuitParams& c,
                                                            const MembraneGeometry& g) {
  if (!(c.q_zpf > 0.0)) throw DomainError("circuit is not tuned (q_zpf unset)");
  const double total = membrane_capacitance(g, c.gap, op.deflection) + c.tuning_capacitance;
  ElectromechanicalCoupling out;
  out.static_charge = c.bias_voltage * total;
  out.gradient = out.static_charge * membrane_capacitance_slope(g, c.gap, op.deflection) / (total * total);
  out.g_em = out.gradient * op.x_zpf * c.q_zpf / constants::hbar;
  return out;
}

}  // namespace transducer::circuit
