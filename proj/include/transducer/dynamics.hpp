#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "transducer/constants.hpp"
#include "transducer/coupling.hpp"
#include "transducer/errors.hpp"

// Single-excitation state transfer microwave photon -> phonon -> emitter ->
// free-space photon.
//
// The tracked state is
//   c1 |e,00>  +  c2 |g,10>  +  c3 |g,01>  +  sum_j c_j |g,00> a_j^+ |vac>
// where |mech, LC> occupations follow the emitter label. The free-space
// continuum is discretized into N modes at detunings (j - N/2) dw, j = 1..N,
// each coupled to the emitter with strength kappa' = sqrt(kappa dw / 2pi).
// Mechanical and LC losses enter as anti-Hermitian terms, so the state norm
// P_n is the probability that nothing has leaked yet and the photon-mode
// population F_trans is the transfer fidelity.
namespace transducer::dynamics {

using amplitude = std::complex<double>;

struct Discretization {
  double mode_spacing = 0.0;    // dw, rad/s
  std::size_t mode_count = 0;   // N
};

/// Default continuum discretization: the (0.25 MHz, 2000) grid for couplings
/// below 2pi x 10 MHz and the (1 MHz, 500) grid otherwise, widened when
/// needed so the half-bandwidth covers both 5 kappa and the dressed
/// splitting sqrt(2) g with a factor-3 margin.
inline Discretization default_discretization(double coupling, double optical_decay) {
  const bool narrow = coupling < units::mhz_to_rad(10.0);
  Discretization d;
  d.mode_spacing = units::mhz_to_rad(narrow ? 0.25 : 1.0);
  std::size_t count = narrow ? 2000 : 500;
  const double half_bandwidth = std::max(5.0 * optical_decay, 3.0 * std::sqrt(2.0) * coupling);
  auto needed = static_cast<std::size_t>(std::ceil(2.0 * half_bandwidth / d.mode_spacing - 1e-9));
  needed += needed % 2;
  while (static_cast<double>(needed) * d.mode_spacing / 2.0 < half_bandwidth * (1.0 - 1e-12)) needed += 2;
  d.mode_count = std::max(count, needed);
  return d;
}

/// Coherent couplings and (already thermally enhanced) loss rates, rad/s.
struct TransferRates {
  double g_om = 0.0;            // |e,00> <-> |g,10>, drive-dressed
  double g_em = 0.0;            // |g,10> <-> |g,01>
  double optical_decay = 0.0;   // kappa
  double mech_damping = 0.0;    // Gamma_m
  double lc_damping = 0.0;      // Gamma_LC

  static TransferRates symmetric(double g_c, double kappa, double gamma_m, double gamma_lc) {
    return {g_c, g_c, kappa, gamma_m, gamma_lc};
  }
};

/// Immutable generator of the coefficient equations
///   c1' = -i g_om c2 + k' sum_j c_j
///   c2' = -i g_om c1 - i g_em c3 - (Gamma_m/2) c2
///   c3' = -i g_em c2 - (Gamma_LC/2) c3
///   c_j' = -k' c1 - i w_j c_j
/// Shareable across threads.
class TransferSystem {
 public:
  TransferSystem(const TransferRates& rates, const Discretization& disc)
      : rates_(rates), spacing_(disc.mode_spacing), count_(disc.mode_count) {
    if (!(rates.optical_decay > 0.0))
      throw ConfigError("optical decay rate must be positive", "optical_decay");
    if (!(rates.g_om >= 0.0) || !(rates.g_em >= 0.0))
      throw ConfigError("coupling rates must be nonnegative", "coupling");
    if (!(rates.mech_damping >= 0.0) || !(rates.lc_damping >= 0.0))
      throw ConfigError("damping rates must be nonnegative", "damping");
    if (!(spacing_ > 0.0)) throw ConfigError("mode spacing must be positive", "mode_spacing");
    if (count_ < 2 || count_ % 2 != 0)
      throw ConfigError("mode count must be even and at least 2", "mode_count");
    if (half_bandwidth() < 5.0 * rates.optical_decay * (1.0 - 1e-12))
      throw ConfigError("continuum half-bandwidth " + std::to_string(units::cyclic(half_bandwidth()) / 1e6) +
                            " MHz is below 5 kappa",
                        "mode_count");
    mode_coupling_ = std::sqrt(rates.optical_decay * spacing_ / constants::two_pi);
    detunings_.resize(count_);
    const double half = static_cast<double>(count_) / 2.0;
    for (std::size_t j = 0; j < count_; ++j)
      detunings_[j] = (static_cast<double>(j + 1) - half) * spacing_;
  }

  const TransferRates& rates() const { return rates_; }
  double mode_spacing() const { return spacing_; }
  std::size_t mode_count() const { return count_; }
  std::size_t dimension() const { return count_ + 3; }
  /// omega_a = N dw / 2.
  double half_bandwidth() const { return static_cast<double>(count_) * spacing_ / 2.0; }
  /// kappa' = sqrt(kappa dw / 2pi).
  double mode_coupling() const { return mode_coupling_; }
  std::span<const double> detunings() const { return detunings_; }

  /// Largest step that still resolves the fastest detuned mode.
  double max_step() const { return 0.05 * constants::two_pi / half_bandwidth(); }

  double default_step() const {
    double dt = max_step();
    const double g = std::max(rates_.g_om, rates_.g_em);
    if (g > 0.0) dt = std::min(dt, 0.01 / g);
    return std::min(dt, 0.01 / mode_coupling_);
  }

  /// Longest run before the discrete modes revive: half the recurrence time.
  double max_duration() const { return constants::pi / spacing_; }

  void derivative(std::span<const amplitude> y, std::span<amplitude> dy) const {
    const amplitude i{0.0, 1.0};
    const amplitude c1 = y[0], c2 = y[1], c3 = y[2];
    amplitude photon_sum{0.0, 0.0};
    for (std::size_t j = 0; j < count_; ++j) photon_sum += y[3 + j];
    dy[0] = -i * rates_.g_om * c2 + mode_coupling_ * photon_sum;
    dy[1] = -i * (rates_.g_om * c1 + rates_.g_em * c3) - 0.5 * rates_.mech_damping * c2;
    dy[2] = -i * rates_.g_em * c2 - 0.5 * rates_.lc_damping * c3;
    const amplitude drive = -mode_coupling_ * c1;
    for (std::size_t j = 0; j < count_; ++j)
      dy[3 + j] = drive - i * detunings_[j] * y[3 + j];
  }

 private:
  TransferRates rates_;
  double spacing_;
  std::size_t count_;
  double mode_coupling_ = 0.0;
  std::vector<double> detunings_;
};

/// Generator for a coupling set: each loss rate is scaled by (n + 1) at the
/// occupation stored in the set before the system is built.
inline TransferSystem build_transfer_system(const coupling::CouplingSet& s, const Discretization& disc) {
  TransferRates r;
  r.g_om = s.effective_g_om;
  r.g_em = s.g_em;
  r.optical_decay = coupling::effective_decay(s.optical_decay, s.n_optical);
  r.mech_damping = coupling::effective_decay(s.mech_damping, s.n_mech);
  r.lc_damping = coupling::effective_decay(s.lc_damping, s.n_lc);
  return TransferSystem(r, disc);
}

/// Amplitudes (c1, c2, c3, c_1..c_N) at time t, stored contiguously.
class TransferState {
 public:
  /// The microwave photon loaded: c3 = 1, everything else 0.
  static TransferState initial(const TransferSystem& sys) {
    TransferState s;
    s.amplitudes.assign(sys.dimension(), amplitude{});
    s.amplitudes[2] = 1.0;
    return s;
  }

  amplitude c1() const { return amplitudes[0]; }
  amplitude c2() const { return amplitudes[1]; }
  amplitude c3() const { return amplitudes[2]; }
  std::span<const amplitude> photon_modes() const {
    return std::span<const amplitude>(amplitudes).subspan(3);
  }

  double time = 0.0;
  std::vector<amplitude> amplitudes;
};

/// Photon-mode population sum_j |c_j|^2.
inline double transfer_fidelity(const TransferState& s) {
  double f = 0.0;
  for (const auto& c : s.photon_modes()) f += std::norm(c);
  return f;
}

/// Norm of the tracked state: probability of no mechanical or LC leakage.
inline double survival_probability(const TransferState& s) {
  return std::norm(s.c1()) + std::norm(s.c2()) + std::norm(s.c3()) + transfer_fidelity(s);
}

struct SpectralLine {
  double detuning;  // rad/s
  double weight;    // |c_j|^2
};

inline std::vector<SpectralLine> pulse_spectrum(const TransferSystem& sys, const TransferState& s) {
  std::vector<SpectralLine> out(sys.mode_count());
  const auto modes = s.photon_modes();
  const auto det = sys.detunings();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {det[j], std::norm(modes[j])};
  return out;
}

/// Classical fixed-step fourth-order Runge-Kutta stepper with reusable
/// workspace. One instance per trajectory.
class Stepper {
 public:
  explicit Stepper(const TransferSystem& sys)
      : sys_(&sys), k1_(sys.dimension()), k2_(sys.dimension()), k3_(sys.dimension()),
        k4_(sys.dimension()), tmp_(sys.dimension()) {}

  void advance(TransferState& s, double dt) {
    check_step(dt);
    const std::size_t n = sys_->dimension();
    auto& y = s.amplitudes;
    sys_->derivative(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    sys_->derivative(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    sys_->derivative(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    sys_->derivative(tmp_, k4_);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
      y[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    s.time += dt;
  }

  void check_step(double dt) const {
    if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
    if (dt > sys_->max_step() * (1.0 + 1e-12))
      throw StepSizeError("time step " + std::to_string(dt) + " s exceeds the resolution bound " +
                          std::to_string(sys_->max_step()) + " s = 0.05 * 2pi / omega_a");
  }

 private:
  const TransferSystem* sys_;
  std::vector<amplitude> k1_, k2_, k3_, k4_, tmp_;
};

/// One fixed step from `state`; the input is left untouched.
inline TransferState step(const TransferSystem& sys, const TransferState& state, double dt) {
  if (state.amplitudes.size() != sys.dimension())
    throw DomainError("state dimension does not match the system");
  TransferState next = state;
  Stepper(sys).advance(next, dt);
  return next;
}

/// Step grid covering [0, duration] exactly with steps no longer than
/// `max_dt`.
struct StepGrid {
  std::size_t steps = 0;
  double dt = 0.0;
};

inline StepGrid make_grid(double duration, double max_dt) {
  if (!(duration >= 0.0)) throw ConfigError("duration must be nonnegative", "duration");
  if (duration == 0.0) return {0, max_dt};
  const auto n = static_cast<std::size_t>(std::ceil(duration / max_dt - 1e-9));
  return {n, duration / static_cast<double>(n)};
}

/// Integrate from `state` for `duration`, calling `observe(state)` after
/// every step. `dt` <= 0 selects the system's default step; the step is then
/// shrunk so the grid ends exactly at `duration`.
template <class Observer>
void propagate(const TransferSystem& sys, TransferState& state, double duration, double dt,
               Observer&& observe) {
  if (state.time + duration > sys.max_duration() * (1.0 + 1e-12))
    throw ConfigError("run of " + std::to_string(state.time + duration) +
                          " s exceeds pi / mode_spacing; the discrete continuum would revive",
                      "duration");
  const StepGrid grid = make_grid(duration, dt > 0.0 ? dt : sys.default_step());
  Stepper stepper(sys);
  stepper.check_step(grid.dt);
  const double t0 = state.time;
  for (std::size_t k = 1; k <= grid.steps; ++k) {
    stepper.advance(state, grid.dt);
    state.time = t0 + static_cast<double>(k) * grid.dt;
    observe(static_cast<const TransferState&>(state));
  }
}

/// Headline figures of one trajectory.
struct TransferSummary {
  double max_fidelity = 0.0;
  double time_of_max = 0.0;
  /// First time F_trans reaches 99.5 % of its maximum over the run.
  double saturation_time = 0.0;
  /// First time F_trans >= threshold, NaN if never.
  double threshold_time = std::numeric_limits<double>::quiet_NaN();
  double final_fidelity = 0.0;
  double final_survival = 1.0;
};

inline constexpr double saturation_fraction = 0.995;

inline TransferSummary summarize(const TransferSystem& sys, double duration, double threshold,
                                 double dt = 0.0) {
  TransferState s = TransferState::initial(sys);
  std::vector<std::pair<double, double>> trace;
  TransferSummary out;
  propagate(sys, s, duration, dt, [&](const TransferState& st) {
    const double f = transfer_fidelity(st);
    trace.emplace_back(st.time, f);
    if (f > out.max_fidelity) {
      out.max_fidelity = f;
      out.time_of_max = st.time;
    }
    if (std::isnan(out.threshold_time) && f >= threshold) out.threshold_time = st.time;
  });
  for (const auto& [t, f] : trace) {
    if (f >= saturation_fraction * out.max_fidelity) {
      out.saturation_time = t;
      break;
    }
  }
  out.final_fidelity = transfer_fidelity(s);
  out.final_survival = survival_probability(s);
  return out;
}

/// First grid time at which F_trans >= threshold. Throws NotReached, carrying
/// the best fidelity seen, if that does not happen by t_max.
inline double time_to_fidelity(const TransferSystem& sys, double threshold, double t_max,
                               double dt = 0.0) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw DomainError("fidelity threshold must lie in (0, 1)");
  const TransferSummary s = summarize(sys, t_max, threshold, dt);
  if (std::isnan(s.threshold_time))
    throw NotReached("fidelity " + std::to_string(threshold) + " not reached within " +
                         std::to_string(t_max) + " s (max " + std::to_string(s.max_fidelity) + ")",
                     s.max_fidelity);
  return s.threshold_time;
}

// ---------------------------------------------------------------------------
// Lossless three-level limit (no continuum, no damping, g_om = g_em = g_c).
// Amplitudes are ordered (|g,01>, |g,10>, |e,00>).

using ClosedAmplitudes = std::array<amplitude, 3>;

struct ClosedEigenstate {
  double eigenvalue;  // rad/s
  ClosedAmplitudes vector;
};

/// H/hbar applied to v: the tridiagonal chain g_c (|g01><g10| + |g10><e00| + h.c.).
inline ClosedAmplitudes apply_closed_hamiltonian(double g_c, const ClosedAmplitudes& v) {
  return {g_c * v[1], g_c * (v[0] + v[2]), g_c * v[1]};
}

inline std::array<ClosedEigenstate, 3> closed_eigenstates(double g_c) {
  const double r2 = std::sqrt(2.0);
  return {{
      {-r2 * g_c, {0.5, -0.5 * r2, 0.5}},
      {r2 * g_c, {0.5, 0.5 * r2, 0.5}},
      {0.0, {0.5 * r2, 0.0, -0.5 * r2}},
  }};
}

/// Analytic evolution from |g,01>.
inline ClosedAmplitudes closed_evolution(double g_c, double t) {
  if (!(g_c > 0.0)) throw DomainError("coupling must be positive");
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  const double theta = std::sqrt(2.0) * g_c * t;
  const double c = std::cos(theta);
  return {amplitude{0.5 * (1.0 + c), 0.0}, amplitude{0.0, -0.5 * std::sqrt(2.0) * std::sin(theta)},
          amplitude{-0.5 * (1.0 - c), 0.0}};
}

}  // namespace transducer::dynamics
