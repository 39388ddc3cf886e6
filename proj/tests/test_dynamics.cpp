#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "transducer/dynamics.hpp"

using namespace transducer;
using namespace transducer::dynamics;

namespace {

constexpr double ns = 1e-9;

TransferSystem symmetric_system(double g_mhz, double kappa_mhz = 50.0, Discretization disc = {}) {
  const double g = units::mhz_to_rad(g_mhz);
  const double kappa = units::mhz_to_rad(kappa_mhz);
  if (disc.mode_count == 0) disc = default_discretization(g, kappa);
  return TransferSystem(TransferRates::symmetric(g, kappa, units::khz_to_rad(100.0), units::khz_to_rad(100.0)),
                        disc);
}

double norm_sq(std::span<const amplitude> v) {
  return std::accumulate(v.begin(), v.end(), 0.0, [](double a, amplitude c) { return a + std::norm(c); });
}

}  // namespace

TEST(ClosedSystem, EigenstatesSatisfyEigenEquation) {
  const double g = units::mhz_to_rad(50.0);
  for (const auto& e : closed_eigenstates(g)) {
    const auto hv = apply_closed_hamiltonian(g, e.vector);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(hv[k] - e.eigenvalue * e.vector[k]), 0.0, 1e-6 * g);
    EXPECT_NEAR(std::norm(e.vector[0]) + std::norm(e.vector[1]) + std::norm(e.vector[2]), 1.0, 1e-15);
  }
}

TEST(ClosedSystem, EvolutionSolvesSchrodinger) {
  const double g = units::mhz_to_rad(50.0);
  for (double t : {0.0, 1.3 * ns, 7.0 * ns, 22.0 * ns}) {
    const auto a = closed_evolution(g, t);
    EXPECT_NEAR(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]), 1.0, 1e-14);
    const double h = 1e-14;
    const auto ap = closed_evolution(g, t + h);
    const auto am = closed_evolution(g, t > h ? t - h : t);
    const double span = t > h ? 2 * h : h;
    const auto hv = apply_closed_hamiltonian(g, a);
    for (int k = 0; k < 3; ++k) {
      const amplitude dadt = (ap[k] - am[k]) / span;
      EXPECT_NEAR(std::abs(dadt - amplitude{0.0, -1.0} * hv[k]), 0.0, 1e-5 * g);
    }
  }
}

TEST(ClosedSystem, CompleteTransferAtHalfPeriod) {
  const double g = units::mhz_to_rad(50.0);
  const auto a = closed_evolution(g, constants::pi / (std::sqrt(2.0) * g));
  EXPECT_NEAR(std::norm(a[2]), 1.0, 1e-14);
  EXPECT_THROW(closed_evolution(0.0, 1.0), DomainError);
}

TEST(TransferSystem, MatchesClosedSolutionWhenDecoupledFromContinuum) {
  const double g = units::mhz_to_rad(50.0);
  const TransferSystem sys(TransferRates::symmetric(g, 1e-3, 0.0, 0.0), {units::mhz_to_rad(1.0), 500});
  TransferState s = TransferState::initial(sys);
  double worst = 0.0;
  propagate(sys, s, 30 * ns, 0.0, [&](const TransferState& st) {
    const auto a = closed_evolution(g, st.time);
    worst = std::max({worst, std::abs(st.c3() - a[0]), std::abs(st.c2() - a[1]), std::abs(st.c1() - a[2])});
  });
  EXPECT_LT(worst, 1e-6);
}

TEST(TransferSystem, Discretization) {
  const auto sys = symmetric_system(50.0);
  EXPECT_EQ(sys.mode_count(), 500u);
  EXPECT_EQ(sys.dimension(), 503u);
  EXPECT_NEAR(sys.mode_coupling(), std::sqrt(units::mhz_to_rad(50.0) * units::mhz_to_rad(1.0) / constants::two_pi),
              1e-9);
  const auto det = sys.detunings();
  EXPECT_NEAR(det.front(), (1.0 - 250.0) * units::mhz_to_rad(1.0), 1e-3);
  EXPECT_NEAR(det.back(), 250.0 * units::mhz_to_rad(1.0), 1e-3);
  EXPECT_NEAR(sys.max_duration(), 500 * ns, 1e-15);
}

TEST(TransferSystem, DefaultDiscretizationRule) {
  const double kappa = units::mhz_to_rad(50.0);
  auto d = default_discretization(units::mhz_to_rad(5.0), kappa);
  EXPECT_NEAR(units::cyclic(d.mode_spacing), 0.25e6, 1e-6);
  EXPECT_EQ(d.mode_count, 2000u);
  d = default_discretization(units::mhz_to_rad(20.0), kappa);
  EXPECT_NEAR(units::cyclic(d.mode_spacing), 1e6, 1e-6);
  EXPECT_EQ(d.mode_count, 500u);
  d = default_discretization(units::mhz_to_rad(200.0), kappa);
  EXPECT_EQ(d.mode_count % 2, 0u);
  EXPECT_GE(d.mode_count * 0.5 * units::cyclic(d.mode_spacing), 3.0 * std::sqrt(2.0) * 200e6 - 1.0);
  d = default_discretization(units::mhz_to_rad(20.0), units::mhz_to_rad(200.0));
  EXPECT_GE(d.mode_count, 2000u);
}

TEST(TransferSystem, RejectsInvalidConfiguration) {
  const auto r = TransferRates::symmetric(1e8, 3e8, 1e5, 1e5);
  EXPECT_THROW(TransferSystem(r, {units::mhz_to_rad(1.0), 501}), ConfigError);
  EXPECT_THROW(TransferSystem(r, {units::mhz_to_rad(1.0), 0}), ConfigError);
  EXPECT_THROW(TransferSystem(r, {0.0, 500}), ConfigError);
  EXPECT_THROW(TransferSystem(r, {units::mhz_to_rad(1.0), 100}), ConfigError);  // bandwidth < 5 kappa
  auto bad = r;
  bad.optical_decay = 0.0;
  EXPECT_THROW(TransferSystem(bad, {units::mhz_to_rad(1.0), 500}), ConfigError);
  bad = r;
  bad.mech_damping = -1.0;
  EXPECT_THROW(TransferSystem(bad, {units::mhz_to_rad(1.0), 500}), ConfigError);
}

TEST(TransferDynamics, InitialState) {
  const auto sys = symmetric_system(50.0);
  const auto s = TransferState::initial(sys);
  EXPECT_EQ(s.c3(), amplitude(1.0));
  EXPECT_EQ(transfer_fidelity(s), 0.0);
  EXPECT_EQ(survival_probability(s), 1.0);
  EXPECT_EQ(s.time, 0.0);
}

TEST(TransferDynamics, NormConservedWithoutLoss) {
  const double g = units::mhz_to_rad(5.0), kappa = units::mhz_to_rad(50.0);
  const TransferSystem sys(TransferRates::symmetric(g, kappa, 0.0, 0.0), {units::mhz_to_rad(0.25), 2000});
  TransferState s = TransferState::initial(sys);
  double worst = 0.0;
  propagate(sys, s, 1000 * ns, 0.0,
            [&](const TransferState& st) { worst = std::max(worst, std::abs(norm_sq(st.amplitudes) - 1.0)); });
  EXPECT_LT(worst, 1e-8);
}

TEST(TransferDynamics, SurvivalFallsAndBoundsFidelity) {
  const auto sys = symmetric_system(50.0);
  TransferState s = TransferState::initial(sys);
  double last_p = 1.0;
  propagate(sys, s, 100 * ns, 0.0, [&](const TransferState& st) {
    const double f = transfer_fidelity(st), p = survival_probability(st);
    EXPECT_LE(p, last_p + 1e-12);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, p + 1e-12);
    EXPECT_NEAR(p, norm_sq(st.amplitudes), 1e-12);
    last_p = p;
  });
}

namespace {

// Sum of all step-to-step decreases of F_trans over a 100 ns g_c = kappa run.
double fidelity_backflow(std::size_t mode_count) {
  const auto sys = symmetric_system(50.0, 50.0, {units::mhz_to_rad(1.0), mode_count});
  TransferState s = TransferState::initial(sys);
  double last = 0.0, drops = 0.0;
  propagate(sys, s, 100 * ns, 0.0, [&](const TransferState& st) {
    const double f = transfer_fidelity(st);
    drops += std::max(0.0, last - f);
    last = f;
  });
  return drops;
}

}  // namespace

TEST(TransferDynamics, FidelityBackflowIsABandEdgeEffect) {
  // The truncated continuum returns a little population to the emitter
  // around the first dip of |c1|^2; the effect falls off with bandwidth.
  const double narrow = fidelity_backflow(500), wide = fidelity_backflow(1000);
  EXPECT_LT(narrow, 1e-3);
  EXPECT_LT(wide, narrow / 4.0);
}

TEST(TransferDynamics, SpectrumCarriesTheFidelity) {
  const auto sys = symmetric_system(50.0);
  TransferState s = TransferState::initial(sys);
  propagate(sys, s, 60 * ns, 0.0, [](const TransferState&) {});
  const auto lines = pulse_spectrum(sys, s);
  ASSERT_EQ(lines.size(), sys.mode_count());
  double total = 0.0, first_moment = 0.0;
  for (const auto& l : lines) {
    EXPECT_GE(l.weight, 0.0);
    total += l.weight;
    first_moment += l.weight * l.detuning;
  }
  EXPECT_NEAR(total, transfer_fidelity(s), 1e-14);
  // Symmetric chain: the emitted pulse is centered on the emitter line.
  EXPECT_LT(std::abs(first_moment / total), units::mhz_to_rad(2.0));
}

TEST(TransferDynamics, StrongCouplingReachesHighFidelityQuickly) {
  const auto sys = symmetric_system(50.0);
  const auto s = summarize(sys, 100 * ns, 0.95);
  EXPECT_GT(s.max_fidelity, 0.99);
  EXPECT_LT(s.threshold_time, 50 * ns);
  EXPECT_LE(s.saturation_time, s.time_of_max);
  EXPECT_GT(s.final_survival, s.final_fidelity - 1e-12);
}

TEST(TransferDynamics, WeakCouplingNeverReachesThreshold) {
  const auto sys = symmetric_system(5.0);
  try {
    time_to_fidelity(sys, 0.95, 400 * ns);
    FAIL() << "threshold unexpectedly reached";
  } catch (const NotReached& e) {
    EXPECT_GT(e.achieved_maximum(), 0.5);
    EXPECT_LT(e.achieved_maximum(), 0.95);
  }
}

TEST(TransferDynamics, ConvergedInModeSpacing) {
  const auto coarse = summarize(symmetric_system(50.0, 50.0, {units::mhz_to_rad(1.0), 500}), 100 * ns, 0.95);
  const auto fine = summarize(symmetric_system(50.0, 50.0, {units::mhz_to_rad(0.5), 1000}), 100 * ns, 0.95);
  EXPECT_NEAR(coarse.max_fidelity, fine.max_fidelity, 1e-4);
}

TEST(TransferDynamics, Deterministic) {
  const auto sys = symmetric_system(20.0);
  TransferState a = TransferState::initial(sys), b = TransferState::initial(sys);
  propagate(sys, a, 40 * ns, 0.0, [](const TransferState&) {});
  propagate(sys, b, 40 * ns, 0.0, [](const TransferState&) {});
  EXPECT_EQ(a.amplitudes, b.amplitudes);
}

TEST(TransferDynamics, StepSizeGuard) {
  const auto sys = symmetric_system(50.0);
  auto s = TransferState::initial(sys);
  EXPECT_THROW(step(sys, s, 2.0 * sys.max_step()), StepSizeError);
  EXPECT_THROW(step(sys, s, 0.0), StepSizeError);
  EXPECT_THROW(propagate(sys, s, 10 * ns, 2.0 * sys.max_step(), [](const TransferState&) {}), StepSizeError);
  EXPECT_NO_THROW(step(sys, s, sys.max_step()));
}

TEST(TransferDynamics, DurationBoundedByRevival) {
  const auto sys = symmetric_system(50.0);
  auto s = TransferState::initial(sys);
  EXPECT_THROW(propagate(sys, s, 2.0 * sys.max_duration(), 0.0, [](const TransferState&) {}), ConfigError);
}

TEST(TransferDynamics, SingleStepMatchesTaylorExpansion) {
  const auto sys = symmetric_system(50.0);
  const auto s0 = TransferState::initial(sys);
  const double dt = 1e-12;
  const auto s1 = step(sys, s0, dt);
  std::vector<amplitude> d(sys.dimension());
  sys.derivative(s0.amplitudes, d);
  for (std::size_t i = 0; i < sys.dimension(); ++i)
    EXPECT_NEAR(std::abs(s1.amplitudes[i] - (s0.amplitudes[i] + dt * d[i])), 0.0, 1e-5);
  EXPECT_EQ(s0.time, 0.0);
  EXPECT_EQ(s1.time, dt);
}

TEST(TransferDynamics, ZeroDurationIsANoOp) {
  const auto sys = symmetric_system(50.0);
  auto s = TransferState::initial(sys);
  int calls = 0;
  propagate(sys, s, 0.0, 0.0, [&](const TransferState&) { ++calls; });
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(s.c3(), amplitude(1.0));
}

TEST(TransferDynamics, ThermalFactorsScaleLosses) {
  coupling::CouplingSet c;
  c.g_em = c.effective_g_om = units::mhz_to_rad(50.0);
  c.optical_decay = units::mhz_to_rad(50.0);
  c.mech_damping = c.lc_damping = units::khz_to_rad(100.0);
  c.n_mech = 20.0;
  c.n_lc = 3.0;
  const auto sys = build_transfer_system(c, {units::mhz_to_rad(1.0), 500});
  EXPECT_DOUBLE_EQ(sys.rates().mech_damping, 21.0 * units::khz_to_rad(100.0));
  EXPECT_DOUBLE_EQ(sys.rates().lc_damping, 4.0 * units::khz_to_rad(100.0));
  EXPECT_DOUBLE_EQ(sys.rates().optical_decay, units::mhz_to_rad(50.0));
}
