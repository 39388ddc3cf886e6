#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "transducer/harness/experiments.hpp"

using namespace transducer;
using namespace transducer::harness;

namespace {

const std::string config_dir = TRANSDUCER_CONFIG_DIR;

ExperimentConfig reference() { return load_config(config_dir + "/reference_device.yaml"); }

class ThreadCount {
 public:
  explicit ThreadCount(const char* n) { setenv("TRANSDUCER_SIM_THREADS", n, 1); }
  ~ThreadCount() { unsetenv("TRANSDUCER_SIM_THREADS"); }
};

}  // namespace

TEST(MechanicsSweep, VoltageColumnsAndUnits) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"bias_voltage", 0.0, 3.3, 12};
  const auto t = run_mechanics_sweep(cfg);
  ASSERT_EQ(t.row_count(), 12u);
  EXPECT_EQ(t.columns()[0].unit, "V");
  EXPECT_EQ(t.columns()[1].name, "deflection");
  EXPECT_EQ(t.value(0, "deflection"), 0.0);
  EXPECT_NEAR(t.value(0, "mech_frequency"), 2.07, 0.1);
  EXPECT_GT(t.value(11, "mech_frequency"), t.value(0, "mech_frequency"));
}

TEST(MechanicsSweep, PullInRowsFlagged) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"bias_voltage", 4.0, 6.0, 5};
  const auto t = run_mechanics_sweep(cfg);
  EXPECT_EQ(t.status(0), "ok");
  EXPECT_EQ(t.status(4), "pull_in");
  EXPECT_TRUE(std::isnan(t.value(4, "deflection")));
}

TEST(MechanicsSweep, ThicknessWithoutCircuitIsUnbiased) {
  auto cfg = reference();
  cfg.circuit.reset();
  cfg.sweep = SweepBlock{"thickness", 1.1, 1.1, 1};
  const auto t = run_mechanics_sweep(cfg);
  EXPECT_EQ(t.value(0, "deflection"), 0.0);
}

TEST(MechanicsSweep, WrongVariableRejected) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"temperature", 0.1, 1.0, 3};
  EXPECT_THROW(run_mechanics_sweep(cfg), ConfigError);
  cfg.sweep.reset();
  EXPECT_THROW(run_mechanics_sweep(cfg), ConfigError);
}

TEST(CouplingSweep, ZeroBiasRowHasNoCoupling) {
  const auto t = run_coupling_sweep(reference());
  EXPECT_EQ(t.value(0, "bias_voltage"), 0.0);
  EXPECT_EQ(t.value(0, "g_em"), 0.0);
  EXPECT_EQ(t.value(0, "g_om1"), 0.0);
  EXPECT_EQ(t.value(0, "g_om2"), 0.0);
  EXPECT_EQ(t.status(0), "ok");
  const auto last = t.row_count() - 1;
  EXPECT_NEAR(t.value(last, "bias_voltage"), 3.3, 1e-12);
  EXPECT_GT(t.value(last, "g_em"), 100.0);
}

TEST(CouplingSweep, DisplacementPastPullInUnstable) {
  auto cfg = reference();
  cfg.circuit->inductance = 0.1e-6;  // leaves room to tune past 10 GHz
  cfg.sweep = SweepBlock{"displacement", 4.0, 6.0, 3};
  const auto t = run_coupling_sweep(cfg);
  EXPECT_EQ(t.columns()[1].name, "bias_voltage");
  EXPECT_EQ(t.status(0), "ok");
  EXPECT_EQ(t.status(2), "unstable");
  EXPECT_FALSE(std::isnan(t.value(2, "g_em")));
  EXPECT_GT(t.value(0, "g_om1"), 3.0);
}

TEST(CouplingSweep, DeviceErrorsBecomeRowStatus) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"bias_voltage", 5.0, 6.0, 2};
  const auto t = run_coupling_sweep(cfg);
  EXPECT_EQ(t.status(0), "pull_in");
  cfg.circuit->inductance = 1.0;  // tuning capacitance would be negative
  cfg.sweep = SweepBlock{"bias_voltage", 1.0, 1.0, 1};
  EXPECT_EQ(run_coupling_sweep(cfg).status(0), "tuning_error");
}

TEST(Transfer, ZeroDurationSingleRow) {
  auto cfg = reference();
  cfg.simulation->duration = 0.0;
  const auto t = run_transfer(cfg);
  ASSERT_EQ(t.row_count(), 1u);
  EXPECT_EQ(t.value(0, "p_microwave"), 1.0);
  EXPECT_EQ(t.value(0, "fidelity"), 0.0);
}

TEST(Transfer, TraceEndsAtDuration) {
  auto cfg = reference();
  cfg.simulation->duration = 40e-9;
  cfg.simulation->sample_interval = 1e-9;
  const auto t = run_transfer(cfg);
  EXPECT_GE(t.row_count(), 41u);
  EXPECT_LE(t.row_count(), 43u);
  EXPECT_NEAR(t.value(t.row_count() - 1, "time"), 40.0, 1e-9);
  EXPECT_GT(t.value(t.row_count() - 1, "fidelity"), 0.9);
}

TEST(Transfer, ExplicitDiscretizationHonoured) {
  auto cfg = reference();
  cfg.simulation->duration = 5e-9;
  cfg.simulation->mode_spacing = units::mhz_to_rad(0.5);
  cfg.simulation->mode_count = 1000;
  const auto csv = run_transfer(cfg).to_csv();
  EXPECT_NE(csv.find("# mode_count: 1000"), std::string::npos);
}

TEST(Transfer, OversizedStepRejected) {
  auto cfg = reference();
  cfg.simulation->time_step = 1e-9;
  EXPECT_THROW(run_transfer(cfg), StepSizeError);
}

TEST(EnvironmentScan, TemperatureLowersFidelity) {
  auto cfg = reference();
  cfg.simulation->duration = 50e-9;
  cfg.sweep = SweepBlock{"temperature", 0.05, 5.0, 3, SweepScale::log};
  const auto t = run_environment_scan(cfg);
  EXPECT_GT(t.value(0, "max_fidelity"), t.value(2, "max_fidelity"));
  EXPECT_EQ(t.status(0), "ok");
}

TEST(EnvironmentScan, KappaSweepMustStartAboveZero) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"kappa", 0.0, 10.0, 2};
  EXPECT_THROW(run_environment_scan(cfg), ConfigError);
}

TEST(ResultTable, CsvLayout) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"bias_voltage", 0.0, 1.0, 2};
  const auto csv = run_mechanics_sweep(cfg).to_csv();
  EXPECT_EQ(csv.rfind("# transducer-sim result table", 0), 0u);
  EXPECT_NE(csv.find("# experiment: mechanics"), std::string::npos);
  EXPECT_NE(csv.find("bias_voltage [V],deflection [nm],tension [N],mech_frequency [GHz],x_zpf [pm],status"),
            std::string::npos);
}

TEST(ResultTable, NumberFormatting) {
  EXPECT_EQ(ResultTable::format_number(std::nan("")), "nan");
  EXPECT_EQ(ResultTable::format_number(0.5), "0.5");
  EXPECT_EQ(std::stod(ResultTable::format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(ResultTable, RejectsMismatchedRow) {
  ResultTable t("x", {{"a", "s"}});
  EXPECT_THROW(t.add_row({1.0, 2.0}), std::logic_error);
  EXPECT_THROW(ResultTable("x", {{"a", ""}}), std::logic_error);
}

TEST(Parallel, OutputIndependentOfThreadCount) {
  auto cfg = reference();
  cfg.sweep = SweepBlock{"bias_voltage", 0.0, 4.9, 25};
  std::string serial, threaded;
  {
    ThreadCount one("1");
    serial = run_coupling_sweep(cfg).to_csv();
  }
  {
    ThreadCount four("4");
    threaded = run_coupling_sweep(cfg).to_csv();
  }
  EXPECT_EQ(serial, threaded);
}

TEST(Parallel, FirstExceptionByIndexRethrown) {
  auto fn = [](std::size_t i) -> int {
    if (i == 3) throw std::runtime_error("three");
    if (i == 7) throw std::runtime_error("seven");
    return static_cast<int>(i);
  };
  try {
    parallel_map<int>(10, fn, 4);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "three");
  }
  const auto v = parallel_map<int>(5, [](std::size_t i) { return static_cast<int>(i * i); }, 3);
  EXPECT_EQ(v, (std::vector<int>{0, 1, 4, 9, 16}));
}
