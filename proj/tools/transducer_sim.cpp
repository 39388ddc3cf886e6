// transducer-sim: run a configured experiment and write its result table.
//
//   transducer-sim mechanics --config cfg.yaml --out table.csv
//   transducer-sim couplings --config cfg.yaml
//   transducer-sim transfer  --config cfg.yaml
//   transducer-sim scan      --config cfg.yaml
//
// Exit codes: 0 success, 2 configuration error, 3 physics error, 1 other.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "transducer/harness/config.hpp"
#include "transducer/harness/experiments.hpp"

namespace {

using transducer::harness::ExperimentConfig;
using transducer::harness::ResultTable;

int run(const std::function<ResultTable(const ExperimentConfig&)>& experiment, const std::string& config_path,
        std::string out_path) {
  try {
    const auto cfg = transducer::harness::load_config(config_path);
    const auto table = experiment(cfg);
    if (out_path.empty() && cfg.output_path) out_path = *cfg.output_path;
    if (out_path.empty() || out_path == "-") {
      table.write_csv(std::cout);
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
      }
      table.write_csv(out);
      std::cerr << "wrote " << table.row_count() << " rows to " << out_path << '\n';
    }
    return 0;
  } catch (const transducer::ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const transducer::StepSizeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const transducer::TransducerError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microwave-to-optical transducer simulator"};
  app.set_version_flag("--version", TRANSDUCER_VERSION);
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, std::function<ResultTable(const ExperimentConfig&)>>>
      experiments = {
          {"mechanics", {"Deflection and frequency vs thickness or bias", transducer::harness::run_mechanics_sweep}},
          {"couplings", {"Coupling rates vs bias or displacement", transducer::harness::run_coupling_sweep}},
          {"transfer", {"State-transfer populations vs time", transducer::harness::run_transfer}},
          {"scan", {"Fidelity vs temperature or optical decay rate", transducer::harness::run_environment_scan}},
      };

  std::string config_path;
  std::string out_path;
  std::string chosen;
  for (const auto& [name, entry] : experiments) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "Experiment configuration (YAML)")->required();
    sub->add_option("--out", out_path, "Output CSV path ('-' for stdout; default: output.path or stdout)");
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(experiments.at(chosen).second, config_path, out_path);
}
