#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "transducer/constants.hpp"
#include "transducer/coupling.hpp"
#include "transducer/errors.hpp"
#include "transducer/mechanics.hpp"

// Experiment configuration documents.
//
// A document is a YAML mapping of named blocks. Every numeric key carries
// its unit in its name (`length_nm`, `optical_decay_mhz`, ...); rates given
// in MHz/kHz/GHz are cyclic, i.e. the value of rate/2pi. Parsing is strict:
// unknown keys, missing required keys and out-of-range values raise
// ConfigError with the dotted field path and the 1-based source line.
// The full schema is documented in README.md.
namespace transducer::harness {

struct CircuitBlock {
  double gap = 10e-9;            // m
  double bias_voltage = 0.0;     // V
  double inductance = 1e-6;      // H
  double quality_factor = 50000.0;
};

struct DriveBlock {
  double rabi_rate = 0.0;  // rad/s
  /// omega_L - omega_0 in rad/s; unset means the red sideband omega_0 - omega_m.
  std::optional<double> laser_detuning;
};

/// Rates for the state-transfer studies, given directly rather than derived
/// from a device.
struct TransferBlock {
  double coupling = 0.0;          // g_c, rad/s
  double optical_decay = 0.0;     // kappa, rad/s
  double mech_damping = 0.0;      // Gamma_m, rad/s
  double lc_damping = 0.0;        // Gamma_LC, rad/s
  double mech_frequency = 0.0;    // rad/s, sets n_m
  double lc_frequency = 0.0;      // rad/s, sets n_LC
  double optical_frequency = 0.0; // rad/s, sets n_0
};

struct SimulationBlock {
  double temperature = 0.05;     // K
  double duration = 0.0;         // s
  std::optional<double> mode_spacing;        // rad/s
  std::optional<std::size_t> mode_count;
  std::optional<double> time_step;           // s
  std::optional<double> sample_interval;     // s
  double fidelity_threshold = 0.95;
};

enum class SweepScale { linear, log };

struct SweepBlock {
  std::string variable;
  double start = 0.0;  // in the variable's documented unit
  double stop = 0.0;
  std::size_t points = 0;
  SweepScale scale = SweepScale::linear;

  std::vector<double> values() const {
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double u = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
      out[i] = scale == SweepScale::log ? start * std::pow(stop / start, u) : start + (stop - start) * u;
    }
    if (points > 1) out.back() = stop;
    return out;
  }
};

struct ExperimentConfig {
  std::string name;
  std::optional<mechanics::MembraneGeometry> geometry;
  double mech_damping = units::khz_to_rad(100.0);  // rad/s, geometry.mechanical_damping_khz
  std::optional<CircuitBlock> circuit;
  std::optional<coupling::EmitterParams> emitter;
  std::optional<DriveBlock> drive;
  std::optional<TransferBlock> transfer;
  std::optional<SimulationBlock> simulation;
  std::optional<SweepBlock> sweep;
  std::optional<std::string> output_path;
  /// FNV-1a 64 of the source text, for provenance headers.
  std::uint64_t source_hash = 0;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

inline int line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? 0 : m.line + 1;
}

enum class Range { any, positive, nonnegative };

/// Reads one mapping block, rejecting keys outside `allowed`.
class Block {
 public:
  Block(const YAML::Node& node, std::string path, std::initializer_list<std::string_view> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError("expected a mapping", path_, line_of(node_));
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("unknown key", path_ + "." + key, line_of(kv.first));
    }
  }

  bool has(std::string_view key) const { return static_cast<bool>(node_[std::string(key)]); }

  double number(std::string_view key, Range range = Range::positive) const {
    const auto n = node_[std::string(key)];
    if (!n) throw ConfigError("missing required field", field(key), line_of(node_));
    return convert(n, key, range);
  }

  std::optional<double> optional_number(std::string_view key, Range range = Range::positive) const {
    const auto n = node_[std::string(key)];
    if (!n) return std::nullopt;
    return convert(n, key, range);
  }

  std::size_t count(std::string_view key, bool required) const {
    const auto n = node_[std::string(key)];
    if (!n) {
      if (required) throw ConfigError("missing required field", field(key), line_of(node_));
      return 0;
    }
    long long v = 0;
    try {
      v = n.as<long long>();
    } catch (const YAML::Exception&) {
      throw ConfigError("expected an integer", field(key), line_of(n));
    }
    if (v < 0) throw ConfigError("must be nonnegative", field(key), line_of(n));
    return static_cast<std::size_t>(v);
  }

  std::string text(std::string_view key, bool required) const {
    const auto n = node_[std::string(key)];
    if (!n) {
      if (required) throw ConfigError("missing required field", field(key), line_of(node_));
      return {};
    }
    if (!n.IsScalar()) throw ConfigError("expected a string", field(key), line_of(n));
    return n.as<std::string>();
  }

  int line(std::string_view key) const {
    const auto n = node_[std::string(key)];
    return n ? line_of(n) : line_of(node_);
  }

  std::string field(std::string_view key) const { return path_ + "." + std::string(key); }

 private:
  double convert(const YAML::Node& n, std::string_view key, Range range) const {
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError("expected a number", field(key), line_of(n));
    }
    if (!std::isfinite(v)) throw ConfigError("must be finite", field(key), line_of(n));
    if (range == Range::positive && !(v > 0.0))
      throw ConfigError("must be positive", field(key), line_of(n));
    if (range == Range::nonnegative && !(v >= 0.0))
      throw ConfigError("must be nonnegative", field(key), line_of(n));
    return v;
  }

  const YAML::Node node_;
  std::string path_;
};

inline void parse_geometry(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "geometry",
          {"length_nm", "width_um", "thickness_nm", "youngs_modulus_gpa", "mass_density_kg_m3",
           "pre_tension_nn", "clamping_coefficient", "mechanical_damping_khz"});
  mechanics::MembraneGeometry g;
  g.length = b.number("length_nm") * 1e-9;
  g.width = b.number("width_um") * 1e-6;
  g.thickness = b.number("thickness_nm") * 1e-9;
  g.youngs_modulus = b.number("youngs_modulus_gpa") * 1e9;
  g.pre_tension = b.number("pre_tension_nn", Range::nonnegative) * 1e-9;
  g.mass_density = b.optional_number("mass_density_kg_m3").value_or(g.mass_density);
  g.clamping_coefficient = b.optional_number("clamping_coefficient").value_or(g.clamping_coefficient);
  if (auto v = b.optional_number("mechanical_damping_khz")) cfg.mech_damping = units::khz_to_rad(*v);
  cfg.geometry = g;
}

inline void parse_circuit(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "circuit", {"gap_nm", "bias_voltage_v", "inductance_uh", "quality_factor"});
  CircuitBlock c;
  c.gap = b.number("gap_nm") * 1e-9;
  c.bias_voltage = b.number("bias_voltage_v", Range::nonnegative);
  c.inductance = b.number("inductance_uh") * 1e-6;
  c.quality_factor = b.number("quality_factor");
  cfg.circuit = c;
}

inline void parse_emitter(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "emitter",
          {"zpl_wavelength_nm", "optical_decay_mhz", "strain_shift_mev_per_percent",
           "stark_shift_mev_per_mv_m"});
  coupling::EmitterParams e;
  e.zpl_frequency = units::wavelength_to_rad(b.number("zpl_wavelength_nm") * 1e-9);
  e.optical_decay = units::mhz_to_rad(b.number("optical_decay_mhz"));
  e.strain_shift = units::strain_shift_from_mev_per_percent(b.number("strain_shift_mev_per_percent", Range::any));
  e.stark_shift = units::stark_shift_from_mev_per_mv_m(b.number("stark_shift_mev_per_mv_m", Range::any));
  cfg.emitter = e;
}

inline void parse_drive(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "drive", {"rabi_frequency_mhz", "laser_detuning_mhz"});
  DriveBlock d;
  d.rabi_rate = units::mhz_to_rad(b.number("rabi_frequency_mhz", Range::nonnegative));
  if (auto v = b.optional_number("laser_detuning_mhz", Range::any)) d.laser_detuning = units::mhz_to_rad(*v);
  cfg.drive = d;
}

inline void parse_transfer(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "transfer",
          {"coupling_mhz", "optical_decay_mhz", "mechanical_damping_khz", "lc_damping_khz",
           "mechanical_frequency_ghz", "lc_frequency_ghz", "optical_wavelength_nm"});
  TransferBlock t;
  t.coupling = units::mhz_to_rad(b.number("coupling_mhz"));
  t.optical_decay = units::mhz_to_rad(b.number("optical_decay_mhz"));
  t.mech_damping = units::khz_to_rad(b.number("mechanical_damping_khz", Range::nonnegative));
  t.lc_damping = units::khz_to_rad(b.number("lc_damping_khz", Range::nonnegative));
  t.mech_frequency = units::ghz_to_rad(b.number("mechanical_frequency_ghz"));
  t.lc_frequency = units::ghz_to_rad(b.number("lc_frequency_ghz"));
  t.optical_frequency = units::wavelength_to_rad(b.number("optical_wavelength_nm") * 1e-9);
  cfg.transfer = t;
}

inline void parse_simulation(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "simulation",
          {"temperature_k", "duration_ns", "mode_spacing_mhz", "mode_count", "time_step_ns",
           "sample_interval_ns", "fidelity_threshold"});
  SimulationBlock s;
  s.temperature = b.number("temperature_k", Range::nonnegative);
  s.duration = b.number("duration_ns", Range::nonnegative) * 1e-9;
  if (auto v = b.optional_number("mode_spacing_mhz")) s.mode_spacing = units::mhz_to_rad(*v);
  if (b.has("mode_count")) {
    const auto n = b.count("mode_count", true);
    if (n < 2 || n % 2 != 0)
      throw ConfigError("must be an even count >= 2", b.field("mode_count"), b.line("mode_count"));
    s.mode_count = n;
  }
  if (s.mode_spacing.has_value() != s.mode_count.has_value())
    throw ConfigError("mode_spacing_mhz and mode_count must be given together",
                      b.field(s.mode_spacing ? "mode_count" : "mode_spacing_mhz"),
                      b.line(s.mode_spacing ? "mode_spacing_mhz" : "mode_count"));
  if (auto v = b.optional_number("time_step_ns")) s.time_step = *v * 1e-9;
  if (auto v = b.optional_number("sample_interval_ns")) s.sample_interval = *v * 1e-9;
  if (auto v = b.optional_number("fidelity_threshold")) {
    if (!(*v < 1.0))
      throw ConfigError("must lie in (0, 1)", b.field("fidelity_threshold"), b.line("fidelity_threshold"));
    s.fidelity_threshold = *v;
  }
  cfg.simulation = s;
}

inline constexpr std::string_view sweep_variables[] = {"thickness", "bias_voltage", "displacement",
                                                       "temperature", "kappa"};

inline void parse_sweep(const YAML::Node& node, ExperimentConfig& cfg) {
  Block b(node, "sweep", {"variable", "start", "stop", "points", "scale"});
  SweepBlock s;
  s.variable = b.text("variable", true);
  if (std::find(std::begin(sweep_variables), std::end(sweep_variables), s.variable) == std::end(sweep_variables))
    throw ConfigError("unknown sweep variable '" + s.variable + "'", b.field("variable"), b.line("variable"));
  s.start = b.number("start", Range::nonnegative);
  s.stop = b.number("stop", Range::nonnegative);
  s.points = b.count("points", true);
  if (s.points == 0) throw ConfigError("sweep range is empty", b.field("points"), b.line("points"));
  if (s.stop < s.start || (s.points > 1 && s.stop == s.start))
    throw ConfigError("sweep range must satisfy start < stop", b.field("stop"), b.line("stop"));
  const auto scale = b.text("scale", false);
  if (scale == "log") {
    if (!(s.start > 0.0))
      throw ConfigError("log sweep needs a positive start", b.field("start"), b.line("start"));
    s.scale = SweepScale::log;
  } else if (!scale.empty() && scale != "linear") {
    throw ConfigError("scale must be 'linear' or 'log'", b.field("scale"), b.line("scale"));
  }
  cfg.sweep = s;
}

}  // namespace detail

/// Strict parse of a configuration document.
inline ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, "", e.mark.is_null() ? 0 : e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("document must be a mapping of blocks", "", detail::line_of(root));

  ExperimentConfig cfg;
  cfg.source_hash = fnv1a64(text);
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto& node = kv.second;
    if (key == "name") {
      if (!node.IsScalar()) throw ConfigError("expected a string", "name", detail::line_of(node));
      cfg.name = node.as<std::string>();
    } else if (key == "geometry") {
      detail::parse_geometry(node, cfg);
    } else if (key == "circuit") {
      detail::parse_circuit(node, cfg);
    } else if (key == "emitter") {
      detail::parse_emitter(node, cfg);
    } else if (key == "drive") {
      detail::parse_drive(node, cfg);
    } else if (key == "transfer") {
      detail::parse_transfer(node, cfg);
    } else if (key == "simulation") {
      detail::parse_simulation(node, cfg);
    } else if (key == "sweep") {
      detail::parse_sweep(node, cfg);
    } else if (key == "output") {
      detail::Block b(node, "output", {"path"});
      cfg.output_path = b.text("path", true);
    } else {
      throw ConfigError("unknown block", key, detail::line_of(kv.first));
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Value of a block that an experiment needs, or a ConfigError naming it.
template <class T>
const T& require(const std::optional<T>& block, const char* name) {
  if (!block) throw ConfigError("missing required block", name);
  return *block;
}

}  // namespace transducer::harness
