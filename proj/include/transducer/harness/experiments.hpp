#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "transducer/circuit.hpp"
#include "transducer/coupling.hpp"
#include "transducer/dynamics.hpp"
#include "transducer/errors.hpp"
#include "transducer/harness/config.hpp"
#include "transducer/harness/parallel.hpp"
#include "transducer/harness/result_table.hpp"
#include "transducer/mechanics.hpp"

// Experiment runners: each turns a configuration into a ResultTable. Sweep
// points run on the worker pool; rows are emitted in sweep order. Physics
// failures at a single sweep point (pull-in, tuning, unreachable threshold)
// become flagged rows; configuration errors abort the run.
namespace transducer::harness {

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Row {
  std::vector<double> values;
  std::string status = "ok";
};

inline ResultTable make_table(const ExperimentConfig& cfg, std::string experiment, std::vector<Column> cols) {
  ResultTable t(std::move(experiment), std::move(cols));
  t.set_provenance("config_fnv1a64", hex64(cfg.source_hash));
  if (!cfg.name.empty()) t.set_provenance("config_name", cfg.name);
  if (cfg.sweep) t.set_provenance("sweep", cfg.sweep->variable);
  return t;
}

inline void emit(ResultTable& t, std::vector<Row>& rows) {
  for (auto& r : rows) t.add_row(std::move(r.values), std::move(r.status));
}

inline const SweepBlock& require_sweep(const ExperimentConfig& cfg, std::initializer_list<std::string_view> allowed,
                                       const char* experiment) {
  const auto& s = require(cfg.sweep, "sweep");
  for (auto v : allowed)
    if (s.variable == v) return s;
  std::string list;
  for (auto v : allowed) list += (list.empty() ? "" : ", ") + std::string(v);
  throw ConfigError(std::string("sweep variable '") + s.variable + "' is not valid for " + experiment +
                        " (expected one of: " + list + ")",
                    "sweep.variable");
}

inline double temperature_of(const ExperimentConfig& cfg) {
  return cfg.simulation ? cfg.simulation->temperature : 0.05;
}

}  // namespace detail

/// Deflection, tension and frequency against thickness (at the configured
/// bias, zero when no circuit block is given) or against bias voltage.
inline ResultTable run_mechanics_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = detail::require_sweep(cfg, {"thickness", "bias_voltage"}, "mechanics");
  const auto& geometry = require(cfg.geometry, "geometry");
  const bool by_voltage = sweep.variable == "bias_voltage";
  if (by_voltage) require(cfg.circuit, "circuit");
  const CircuitBlock circuit = cfg.circuit.value_or(CircuitBlock{});

  auto table = detail::make_table(
      cfg, "mechanics",
      {{sweep.variable, by_voltage ? "V" : "nm"}, {"deflection", "nm"}, {"tension", "N"},
       {"mech_frequency", "GHz"}, {"x_zpf", "pm"}});

  const auto values = sweep.values();
  auto rows = parallel_map<detail::Row>(values.size(), [&](std::size_t i) {
    const double v = values[i];
    mechanics::MembraneGeometry g = geometry;
    mechanics::ElectrostaticEnvironment env{circuit.gap, circuit.bias_voltage};
    if (by_voltage)
      env.bias_voltage = v;
    else
      g.thickness = v * 1e-9;
    try {
      const auto op = mechanics::solve_equilibrium(g, env);
      return detail::Row{{v, op.deflection * 1e9, op.tension, units::cyclic(op.mech_frequency) / 1e9,
                          op.x_zpf * 1e12}};
    } catch (const PullInError&) {
      return detail::Row{{v, detail::nan, detail::nan, detail::nan, detail::nan}, "pull_in"};
    }
  });
  detail::emit(table, rows);
  return table;
}

/// Operating point, matched circuit and every coupling rate at one bias
/// voltage (or one imposed deflection).
struct DevicePoint {
  mechanics::OperatingPoint op;
  circuit::CircuitParams circuit;
  coupling::CouplingSet couplings;
  double bias_voltage = 0.0;
  bool stable = true;
};

inline DevicePoint device_point(const ExperimentConfig& cfg, std::optional<double> bias_voltage,
                                std::optional<double> deflection) {
  const auto& g = require(cfg.geometry, "geometry");
  const auto& cb = require(cfg.circuit, "circuit");
  const auto& emitter = require(cfg.emitter, "emitter");
  const DriveBlock drive = cfg.drive.value_or(DriveBlock{});

  DevicePoint p;
  mechanics::ElectrostaticEnvironment env{cb.gap, cb.bias_voltage};
  if (deflection) {
    env.bias_voltage = mechanics::bias_for_deflection(g, cb.gap, *deflection);
    p.op = mechanics::operating_point_at(g, *deflection);
    const double h = cb.gap * 1e-6;
    const double x = *deflection;
    const double slope = (mechanics::net_restoring_force(g, env, x + h) -
                          mechanics::net_restoring_force(g, env, std::max(0.0, x - h))) /
                         (x + h - std::max(0.0, x - h));
    p.stable = slope > 0.0;
  } else {
    if (bias_voltage) env.bias_voltage = *bias_voltage;
    p.op = mechanics::solve_equilibrium(g, env);
  }
  p.bias_voltage = env.bias_voltage;
  p.circuit = circuit::matched_circuit(g, cb.gap, env.bias_voltage, p.op, cb.inductance, cb.quality_factor);
  coupling::Drive d;
  d.rabi_rate = drive.rabi_rate;
  d.laser_frequency = emitter.zpl_frequency + drive.laser_detuning.value_or(-p.op.mech_frequency);
  p.couplings = coupling::device_couplings(g, env, p.op, p.circuit, emitter, d, cfg.mech_damping,
                                           detail::temperature_of(cfg));
  return p;
}

/// Coupling rates and cooperativities against bias voltage or against an
/// imposed static deflection (with the bias that holds it).
inline ResultTable run_coupling_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = detail::require_sweep(cfg, {"bias_voltage", "displacement"}, "couplings");
  require(cfg.geometry, "geometry");
  require(cfg.circuit, "circuit");
  require(cfg.emitter, "emitter");
  const bool by_voltage = sweep.variable == "bias_voltage";

  auto table = detail::make_table(
      cfg, "couplings",
      {{sweep.variable, by_voltage ? "V" : "nm"},
       {by_voltage ? "deflection" : "bias_voltage", by_voltage ? "nm" : "V"},
       {"mech_frequency", "GHz"},
       {"g_em", "MHz"},
       {"g_om1", "MHz"},
       {"g_om2", "MHz"},
       {"effective_g_om", "MHz"},
       {"c_em", "-"},
       {"c_om1", "-"},
       {"c_om2", "-"}});

  const auto values = sweep.values();
  auto rows = parallel_map<detail::Row>(values.size(), [&](std::size_t i) {
    const double v = values[i];
    detail::Row failed{std::vector<double>(10, detail::nan), ""};
    failed.values[0] = v;
    try {
      const auto p = by_voltage ? device_point(cfg, v, std::nullopt) : device_point(cfg, std::nullopt, v * 1e-9);
      const auto& s = p.couplings;
      const double gamma_lc = s.lc_damping;
      detail::Row r;
      r.values = {v,
                  by_voltage ? p.op.deflection * 1e9 : p.bias_voltage,
                  units::cyclic(p.op.mech_frequency) / 1e9,
                  units::cyclic(s.g_em) / 1e6,
                  units::cyclic(s.g_om1) / 1e6,
                  units::cyclic(s.g_om2) / 1e6,
                  units::cyclic(s.effective_g_om) / 1e6,
                  coupling::cooperativity(s.g_em, gamma_lc, s.mech_damping),
                  coupling::cooperativity(s.g_om1, s.mech_damping, s.optical_decay),
                  coupling::cooperativity(s.g_om2, s.mech_damping, s.optical_decay)};
      if (!p.stable) r.status = "unstable";
      return r;
    } catch (const PullInError&) {
      failed.status = "pull_in";
    } catch (const TuningError&) {
      failed.status = "tuning_error";
    } catch (const DomainError&) {
      failed.status = "domain_error";
    }
    return failed;
  });
  detail::emit(table, rows);
  return table;
}

/// Transfer system for the configured rates at `temperature`; `coupling` and
/// `optical_decay` override the transfer block when given (kappa scans).
inline dynamics::TransferSystem transfer_system(const ExperimentConfig& cfg, double temperature,
                                                std::optional<double> coupling_rate = std::nullopt,
                                                std::optional<double> optical_decay = std::nullopt) {
  const auto& t = require(cfg.transfer, "transfer");
  const auto& sim = require(cfg.simulation, "simulation");
  const double g = coupling_rate.value_or(t.coupling);
  const double kappa = optical_decay.value_or(t.optical_decay);
  const auto set = coupling::symmetric_couplings(g, kappa, t.mech_damping, t.lc_damping, t.mech_frequency,
                                                 t.lc_frequency, t.optical_frequency, temperature);
  dynamics::Discretization disc = dynamics::default_discretization(g, kappa);
  if (sim.mode_spacing) disc = {*sim.mode_spacing, *sim.mode_count};
  return dynamics::build_transfer_system(set, disc);
}

inline void describe_system(ResultTable& table, const dynamics::TransferSystem& sys, double dt) {
  table.set_provenance("mode_spacing_mhz", ResultTable::format_number(units::cyclic(sys.mode_spacing()) / 1e6));
  table.set_provenance("mode_count", std::to_string(sys.mode_count()));
  table.set_provenance("time_step_s", ResultTable::format_number(dt));
}

/// Populations against time for a single trajectory, sampled every
/// `sample_interval_ns` (default: 200 samples over the run).
inline ResultTable run_transfer(const ExperimentConfig& cfg) {
  const auto& sim = require(cfg.simulation, "simulation");
  const auto sys = transfer_system(cfg, sim.temperature);
  const auto grid = dynamics::make_grid(sim.duration, sim.time_step.value_or(sys.default_step()));

  auto table = detail::make_table(cfg, "transfer",
                                  {{"time", "ns"},
                                   {"p_excited", "-"},
                                   {"p_phonon", "-"},
                                   {"p_microwave", "-"},
                                   {"survival", "-"},
                                   {"fidelity", "-"}});
  describe_system(table, sys, grid.dt);

  auto record = [&](const dynamics::TransferState& s) {
    table.add_row({s.time * 1e9, std::norm(s.c1()), std::norm(s.c2()), std::norm(s.c3()),
                   dynamics::survival_probability(s), dynamics::transfer_fidelity(s)});
  };
  auto state = dynamics::TransferState::initial(sys);
  record(state);
  if (grid.steps == 0) return table;

  const double interval = sim.sample_interval.value_or(sim.duration / 200.0);
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / grid.dt)));
  std::size_t k = 0;
  dynamics::propagate(sys, state, sim.duration, grid.dt, [&](const dynamics::TransferState& s) {
    ++k;
    if (k % stride == 0 || k == grid.steps) record(s);
  });
  return table;
}

/// Maximum fidelity, final survival and time to the fidelity threshold against
/// temperature (K) or against kappa/2pi (MHz) with g_c slaved to kappa.
inline ResultTable run_environment_scan(const ExperimentConfig& cfg) {
  const auto& sweep = detail::require_sweep(cfg, {"temperature", "kappa"}, "scan");
  const auto& sim = require(cfg.simulation, "simulation");
  require(cfg.transfer, "transfer");
  const bool by_kappa = sweep.variable == "kappa";
  if (by_kappa && sweep.start <= 0.0) throw ConfigError("kappa sweep must start above zero", "sweep.start");

  auto table = detail::make_table(cfg, "scan",
                                  {{sweep.variable, by_kappa ? "MHz" : "K"},
                                   {"max_fidelity", "-"},
                                   {"survival", "-"},
                                   {"time_to_threshold", "ns"},
                                   {"saturation_time", "ns"}});
  table.set_provenance("duration_ns", ResultTable::format_number(sim.duration * 1e9));
  table.set_provenance("fidelity_threshold", ResultTable::format_number(sim.fidelity_threshold));

  const auto values = sweep.values();
  auto rows = parallel_map<detail::Row>(values.size(), [&](std::size_t i) {
    const double v = values[i];
    const auto sys = by_kappa ? transfer_system(cfg, sim.temperature, units::mhz_to_rad(v), units::mhz_to_rad(v))
                              : transfer_system(cfg, v);
    const auto s = dynamics::summarize(sys, sim.duration, sim.fidelity_threshold, sim.time_step.value_or(0.0));
    detail::Row r{{v, s.max_fidelity, s.final_survival, s.threshold_time * 1e9, s.saturation_time * 1e9}};
    if (std::isnan(s.threshold_time)) r.status = "not_reached";
    return r;
  });
  detail::emit(table, rows);
  return table;
}

}  // namespace transducer::harness
