#include "scsqkd/phaselock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scsqkd/errors.hpp"

namespace scsqkd {

namespace {

constexpr double kPi = std::numbers::pi;

double poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0.0;
  return static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
}

// Wraps x into [-half, half).
double wrap_symmetric(double x, double half) {
  const double period = 2.0 * half;
  return x - period * std::floor((x + half) / period);
}

}  // namespace

long long FrameTiming::slots(double duration_us) const { return std::llround(duration_us * 1e-6 * clock_hz); }

bool FrameTiming::valid() const {
  return frame_us > 0.0 && reference_us > 0.0 && quantum_us >= 0.0 && recovery_us >= 0.0 && clock_hz > 0.0 &&
         std::abs(reference_us + quantum_us + recovery_us - frame_us) < 1e-9;
}

bool InterferenceModel::valid() const { return C0 > 0.0 && Cd >= 0.0 && V_pi > 0.0 && v_max - v_min > 2.5 * V_pi; }

double wrap_phase(double phi) {
  const double w = wrap_symmetric(phi, kPi);
  return w == -kPi ? kPi : w;
}

double effective_phase(double phi_true, double V, double V_pi) { return phi_true + kPi * V / V_pi; }

DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model) {
  return {model.C0 * std::cos(phi_eff) + model.C0 + model.Cd, model.C0 * std::cos(phi_eff + kPi) + model.C0 + model.Cd};
}

DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model, std::mt19937_64& rng) {
  const DetectorCounts mean = detector_counts(phi_eff, model);
  return {poisson(mean.left, rng), poisson(mean.right, rng)};
}

DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model, bool noisy, std::uint64_t seed) {
  if (!noisy) return detector_counts(phi_eff, model);
  std::mt19937_64 rng(seed);
  return detector_counts(phi_eff, model, rng);
}

CountingMatrix two_phase_scan(const PhaseLockState& state, const InterferenceModel& model, std::mt19937_64* rng) {
  const double in_phase = effective_phase(state.phi_true, state.V_current, model.V_pi);
  const double quadrature = effective_phase(state.phi_true, state.V_current + model.V_pi / 2.0, model.V_pi);
  const DetectorCounts first = rng ? detector_counts(in_phase, model, *rng) : detector_counts(in_phase, model);
  const DetectorCounts second = rng ? detector_counts(quadrature, model, *rng) : detector_counts(quadrature, model);
  return {first.left, first.right, second.left, second.right};
}

CountingMatrix two_phase_scan(const PhaseLockState& state, const InterferenceModel& model, bool noisy,
                              std::uint64_t seed) {
  if (!noisy) return two_phase_scan(state, model, nullptr);
  std::mt19937_64 rng(seed);
  return two_phase_scan(state, model, &rng);
}

double estimate_v0(const CountingMatrix& m, double V_i, double V_pi) {
  const double first = m.N0 + m.M0;
  const double second = m.N1 + m.M1;
  if (!(first > 0.0) || !(second > 0.0)) throw EmptyMatrix("two-phase scan recorded no counts in one probe");

  const double cosine = std::clamp((m.N0 - m.M0) / first, -1.0, 1.0);
  const double sine = std::clamp((m.M1 - m.N1) / second, -1.0, 1.0);
  const double V_c = V_pi / kPi * std::acos(cosine);
  const double V_s = V_pi / kPi * std::asin(sine);

  const double v_prime = (1.0 - 2.0 * m.N1 / second > 0.0) ? V_i - V_c : V_i + V_c;
  const double v_double_prime = (2.0 * m.N0 / first - 1.0 > 0.0) ? V_i - V_s : V_i + V_s - V_pi;
  return v_prime + wrap_symmetric(v_double_prime - v_prime, V_pi) / 2.0;
}

PhaseLockSimulator::PhaseLockSimulator(FrameTiming timing, InterferenceModel model, DriftModel drift,
                                       std::uint64_t seed)
    : timing_(timing), model_(model), drift_(drift), drift_rng_(drift.seed), shot_rng_(seed) {
  if (!timing_.valid()) throw DomainError("frame timing segments must be positive and sum to the frame period");
  if (!model_.valid()) throw DomainError("interference model needs C0 > 0, Cd >= 0, V_pi > 0 and a wide enough voltage range");
  if (drift_.sigma_rad_per_sqrt_s < 0.0) throw DomainError("drift sigma must be >= 0");
}

double PhaseLockSimulator::keep_in_range(double V) const {
  const double period = 2.0 * model_.V_pi;
  const double hi = model_.v_max - model_.V_pi / 2.0;
  while (V > hi) V -= period;
  while (V < model_.v_min) V += period;
  return V;
}

double PhaseLockSimulator::residual() const {
  return wrap_phase(effective_phase(state_.phi_true, state_.V_current, model_.V_pi));
}

// The reference half of a frame sets the voltage; the channel keeps drifting
// until the quantum half, so the residual carries one frame of drift.
double PhaseLockSimulator::step(bool enabled) {
  if (enabled) {
    state_.counting_matrix = two_phase_scan(state_, model_, &shot_rng_);
    state_.V0_estimate = estimate_v0(state_.counting_matrix, state_.V_current, model_.V_pi);
    state_.V_current = keep_in_range(state_.V0_estimate);
  }
  state_.phi_true += drift_.sigma_rad_per_sqrt_s * std::sqrt(timing_.frame_s()) * gauss_(drift_rng_);
  ++frames_;
  return residual();
}

std::vector<TracePoint> PhaseLockSimulator::run(double duration_s, bool enabled, double sample_interval_s) {
  if (duration_s < 0.0 || duration_s > 3600.0) throw DomainError("duration must lie in [0, 3600] s");
  if (!(sample_interval_s > 0.0)) throw DomainError("sample interval must be > 0");
  const auto frames = static_cast<long long>(std::llround(duration_s / timing_.frame_s()));
  const auto per_sample = std::max<long long>(1, std::llround(sample_interval_s / timing_.frame_s()));

  std::vector<TracePoint> trace;
  trace.reserve(static_cast<std::size_t>(frames / per_sample + 1));
  for (long long i = 0; i < frames; ++i) {
    const double phi = step(enabled);
    if (++frames_since_sample_ < per_sample) continue;
    frames_since_sample_ = 0;
    const double counts = detector_counts(phi, model_, shot_rng_).left;
    trace.push_back({time_s(), counts, phi, state_.V_current, enabled});
  }
  return trace;
}

std::vector<TracePoint> run_feedback(double duration_s, const FrameTiming& timing, const InterferenceModel& model,
                                     const DriftModel& drift, bool enabled, std::uint64_t seed,
                                     double sample_interval_s) {
  PhaseLockSimulator sim(timing, model, drift, seed);
  return sim.run(duration_s, enabled, sample_interval_s);
}

std::vector<QberPoint> qber_trace(double duration_s, const FrameTiming& timing, const InterferenceModel& model,
                                  const DriftModel& drift, double e_floor, std::uint64_t seed,
                                  const QberOptions& options) {
  if (duration_s < 0.0 || duration_s > 3600.0) throw DomainError("duration must lie in [0, 3600] s");
  if (!(e_floor >= 0.0 && e_floor <= 1.0)) throw DomainError("e_floor must lie in [0, 1]");
  if (!(options.bin_s > 0.0)) throw DomainError("bin length must be > 0");

  PhaseLockSimulator sim(timing, model, drift, seed);
  std::mt19937_64 error_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto frames = static_cast<long long>(std::llround(duration_s / timing.frame_s()));
  const auto per_bin = std::max<long long>(1, std::llround(options.bin_s / timing.frame_s()));

  std::vector<QberPoint> trace;
  double phase_errors = 0.0;
  long long in_bin = 0;
  for (long long i = 0; i < frames; ++i) {
    phase_errors += (1.0 - std::cos(sim.step(true))) / 2.0;
    if (++in_bin < per_bin) continue;
    double qber = std::min(1.0, e_floor + phase_errors / static_cast<double>(in_bin));
    if (options.detections_per_bin > 0.0) {
      const auto n = static_cast<long long>(options.detections_per_bin);
      qber = static_cast<double>(std::binomial_distribution<long long>(n, qber)(error_rng)) / static_cast<double>(n);
    }
    trace.push_back({sim.time_s(), qber});
    phase_errors = 0.0;
    in_bin = 0;
  }
  return trace;
}

}  // namespace scsqkd
