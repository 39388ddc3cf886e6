#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "transducer/constants.hpp"
#include "transducer/errors.hpp"

// Doubly clamped 2D membrane: flexural frequency, force balance against the
// bottom electrode, bias-induced tension and the mechanical zero-point
// amplitude. Positive deflection points toward the electrode everywhere.
namespace transducer::mechanics {

struct MembraneGeometry {
  double length = 110e-9;           // m
  double width = 1e-6;              // m
  double thickness = 1.1e-9;        // m
  double youngs_modulus = 1000e9;   // Pa
  double mass_density = 2260.0;     // kg/m^3
  double pre_tension = 10e-9;       // N, absolute force
  double clamping_coefficient = 1.03;

  double mass() const { return mass_density * length * width * thickness; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string("membrane ") + name + " must be positive and finite");
    };
    positive(length, "length");
    positive(width, "width");
    positive(thickness, "thickness");
    positive(youngs_modulus, "Young's modulus");
    positive(mass_density, "mass density");
    positive(clamping_coefficient, "clamping coefficient");
    if (!(pre_tension >= 0.0) || !std::isfinite(pre_tension))
      throw DomainError("membrane pre-tension must be nonnegative");
  }
};

struct ElectrostaticEnvironment {
  double gap = 10e-9;         // m, undeflected membrane-to-electrode distance
  double bias_voltage = 0.0;  // V

  void validate() const {
    if (!(gap > 0.0) || !std::isfinite(gap)) throw DomainError("gap must be positive");
    if (!(bias_voltage >= 0.0) || !std::isfinite(bias_voltage))
      throw DomainError("bias voltage must be nonnegative");
  }
};

struct OperatingPoint {
  double deflection = 0.0;      // m
  double tension = 0.0;         // N
  double mech_frequency = 0.0;  // rad/s
  double effective_mass = 0.0;  // kg
  double x_zpf = 0.0;           // m
};

/// Fundamental flexural angular frequency of the membrane under `tension` (N).
/// The plate term scales with thickness, the string term with tension.
inline double flexural_frequency(const MembraneGeometry& g, double tension) {
  g.validate();
  if (!(tension >= 0.0)) throw DomainError("tension must be nonnegative");
  const double a2 = g.clamping_coefficient * g.clamping_coefficient;
  const double l2 = g.length * g.length;
  const double plate = a2 * g.youngs_modulus * g.thickness * g.thickness / (g.mass_density * l2 * l2);
  const double string = 0.57 * a2 * tension / (g.mass_density * l2 * g.width * g.thickness);
  return constants::two_pi * std::sqrt(plate + string);
}

/// Linear spring constant of the center deflection (N/m).
inline double linear_stiffness(const MembraneGeometry& g) {
  const double l3 = g.length * g.length * g.length;
  return 30.78 * g.width * g.thickness * g.thickness * g.thickness * g.youngs_modulus / l3 +
         12.32 * g.pre_tension / g.length;
}

/// Cubic (stretching) stiffness of the center deflection (N/m^3).
inline double cubic_stiffness(const MembraneGeometry& g) {
  return 8.0 * g.width * g.thickness * g.youngs_modulus / (3.0 * g.length * g.length * g.length);
}

/// Restoring force at center deflection `deflection` >= 0.
inline double elastic_force(const MembraneGeometry& g, double deflection) {
  g.validate();
  if (!(deflection >= 0.0)) throw DomainError("deflection must be nonnegative");
  return linear_stiffness(g) * deflection + cubic_stiffness(g) * deflection * deflection * deflection;
}

/// Parallel-plate attraction toward the electrode at deflection x.
inline double electrostatic_force(const ElectrostaticEnvironment& env, const MembraneGeometry& g,
                                  double x) {
  g.validate();
  env.validate();
  if (!(x >= 0.0)) throw DomainError("deflection must be nonnegative");
  if (x >= env.gap) throw DomainError("membrane in contact with the electrode (x >= gap)");
  const double s = env.gap - x;
  return constants::vacuum_permittivity * g.width * g.length * env.bias_voltage * env.bias_voltage /
         (2.0 * s * s);
}

/// Axial strain from stretching the membrane into a triangle of height x0.
inline double static_strain(const MembraneGeometry& g, double x0) {
  return 2.0 * x0 * x0 / (g.length * g.length);
}

/// Tension after a static center deflection x0.
inline double induced_tension(const MembraneGeometry& g, double x0) {
  g.validate();
  if (!(x0 >= 0.0)) throw DomainError("deflection must be nonnegative");
  return g.pre_tension + g.youngs_modulus * g.width * g.thickness * static_strain(g, x0);
}

/// sqrt(hbar / (2 m omega)).
inline double zero_point_amplitude(double effective_mass, double omega) {
  if (!(effective_mass > 0.0) || !(omega > 0.0))
    throw DomainError("zero-point amplitude needs positive mass and frequency");
  return std::sqrt(constants::hbar / (2.0 * effective_mass * omega));
}

/// Operating point for a known static deflection, without checking that the
/// deflection is an equilibrium. Used by displacement sweeps.
inline OperatingPoint operating_point_at(const MembraneGeometry& g, double x0) {
  OperatingPoint op;
  op.deflection = x0;
  op.tension = induced_tension(g, x0);
  op.mech_frequency = flexural_frequency(g, op.tension);
  op.effective_mass = g.mass();
  op.x_zpf = zero_point_amplitude(op.effective_mass, op.mech_frequency);
  return op;
}

/// Bias voltage that holds the membrane at deflection x in force balance.
inline double bias_for_deflection(const MembraneGeometry& g, double gap, double x) {
  g.validate();
  if (!(x >= 0.0) || !(x < gap)) throw DomainError("deflection must lie in [0, gap)");
  const double s = gap - x;
  return std::sqrt(2.0 * elastic_force(g, x) * s * s /
                   (constants::vacuum_permittivity * g.width * g.length));
}

/// Net restoring force F_elastic - F_electrostatic; positive pushes the
/// membrane back toward x = 0.
inline double net_restoring_force(const MembraneGeometry& g, const ElectrostaticEnvironment& env,
                                  double x) {
  return elastic_force(g, x) - electrostatic_force(env, g, x);
}

namespace detail {
inline constexpr int equilibrium_scan_points = 4096;
}

/// Smallest stable static deflection in [0, gap). Throws PullInError when the
/// electrostatic pull exceeds the restoring force everywhere.
///
/// The net force is sampled on a uniform grid over [0, gap (1 - 1e-6)] to
/// bracket its first upward zero crossing, which is then bisected down to
/// adjacent doubles.
inline OperatingPoint solve_equilibrium(const MembraneGeometry& g, const ElectrostaticEnvironment& env) {
  g.validate();
  env.validate();
  if (env.bias_voltage == 0.0) return operating_point_at(g, 0.0);

  const double upper = env.gap * (1.0 - 1e-6);
  const int n = detail::equilibrium_scan_points;
  double lo = 0.0;
  double hi = -1.0;
  for (int i = 1; i <= n; ++i) {
    const double x = upper * static_cast<double>(i) / n;
    if (net_restoring_force(g, env, x) >= 0.0) {
      hi = x;
      break;
    }
    lo = x;
  }
  if (hi < 0.0)
    throw PullInError("no stable equilibrium below the electrode: bias voltage " +
                          std::to_string(env.bias_voltage) + " V is past pull-in",
                      env.bias_voltage);

  // f(lo) < 0 <= f(hi); bisect until the bracket cannot shrink further.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (net_restoring_force(g, env, mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  const double x0 =
      std::abs(net_restoring_force(g, env, lo)) < std::abs(net_restoring_force(g, env, hi)) ? lo : hi;

  const double h = env.gap * 1e-6;
  const double slope = (net_restoring_force(g, env, x0 + h) -
                        net_restoring_force(g, env, std::max(0.0, x0 - h))) /
                       (x0 + h - std::max(0.0, x0 - h));
  if (!(slope > 0.0))
    throw PullInError("equilibrium at " + std::to_string(x0) + " m is unstable", env.bias_voltage);

  return operating_point_at(g, x0);
}

/// Lowest bias at which solve_equilibrium fails, located by bisection on the
/// voltage to within `resolution` volts.
inline double pull_in_voltage(const MembraneGeometry& g, double gap, double resolution = 1e-3,
                              double upper_guess = 1000.0) {
  ElectrostaticEnvironment env{gap, 0.0};
  auto stable = [&](double v) {
    env.bias_voltage = v;
    try {
      solve_equilibrium(g, env);
      return true;
    } catch (const PullInError&) {
      return false;
    }
  };
  double lo = 0.0;
  double hi = 1.0;
  while (stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > upper_guess) throw DomainError("pull-in voltage above search limit");
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace transducer::mechanics
