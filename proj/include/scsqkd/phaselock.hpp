#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace scsqkd {

/// Time multiplexing of one 40 us frame: two equal reference halves, a
/// recovery gap for the feedback electronics and the quantum-signal part.
struct FrameTiming {
  double frame_us = 40.0;
  double reference_us = 19.6;
  double quantum_us = 20.0;
  double recovery_us = 0.4;
  double clock_hz = 1.25e9;

  double frame_s() const { return frame_us * 1e-6; }
  double half_reference_us() const { return reference_us / 2.0; }
  /// Clock slots in a segment of the given duration.
  long long slots(double duration_us) const;
  bool valid() const;
};

/// Detector count model C = C0 cos(phi) + C0 + Cd for the constructive port;
/// the other port sees an extra pi. Counts are per reference half-window.
struct InterferenceModel {
  double C0 = 44950.0;
  double Cd = 100.0;
  double V_pi = 4.0;
  double v_min = -15.54;  // feedback voltage range
  double v_max = 15.96;

  bool valid() const;
};

struct DetectorCounts {
  double left = 0.0;   // constructive port at phi_eff = 0
  double right = 0.0;
};

/// Two-phase-scan counting matrix: (N0, M0) at V_i and (N1, M1) at V_i + V_pi/2.
struct CountingMatrix {
  double N0 = 0.0;
  double M0 = 0.0;
  double N1 = 0.0;
  double M1 = 0.0;
};

struct PhaseLockState {
  double phi_true = 0.0;   // accumulated channel phase drift, radians
  double V_current = 0.0;  // voltage on the phase modulator
  CountingMatrix counting_matrix{};
  double V0_estimate = 0.0;
};

/// Wiener-process channel drift.
struct DriftModel {
  double sigma_rad_per_sqrt_s = 0.6;
  std::uint64_t seed = 1;
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double phi);

/// Optical phase at the beam splitter with voltage V on the modulator.
double effective_phase(double phi_true, double V, double V_pi);

/// Mean counts at both ports.
DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model);
/// Poisson-sampled counts.
DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model, std::mt19937_64& rng);
DetectorCounts detector_counts(double phi_eff, const InterferenceModel& model, bool noisy, std::uint64_t seed);

/// Probes at state.V_current and V_current + V_pi/2. Noiseless when rng is null.
CountingMatrix two_phase_scan(const PhaseLockState& state, const InterferenceModel& model, std::mt19937_64* rng);
CountingMatrix two_phase_scan(const PhaseLockState& state, const InterferenceModel& model, bool noisy,
                              std::uint64_t seed);

/// Zero-phase voltage from a counting matrix.
///
/// With x = (N0-M0)/(N0+M0) = cos(theta) and s = (M1-N1)/(N1+M1) = sin(theta),
/// where theta = pi (V_i - V0) / V_pi, the two candidates are
///   V0' = V_i - V_c if 1 - 2 N1/(N1+M1) > 0, else V_i + V_c,   V_c = (V_pi/pi) acos x
///   V0'' = V_i - V_s if 2 N0/(N0+M0) - 1 > 0, else V_i + V_s - V_pi,   V_s = (V_pi/pi) asin s
/// and the result is their mean taken modulo 2 V_pi (so it lies within V_pi
/// of V0'). Background counts are neglected; ratios are clamped to [-1, 1].
/// Throws EmptyMatrix when either probe recorded no counts.
double estimate_v0(const CountingMatrix& matrix, double V_i, double V_pi);

struct TracePoint {
  double time_s = 0.0;
  double counts = 0.0;  // constructive-port counts at the applied voltage
  double phi_residual = 0.0;
  double v_applied = 0.0;
  bool enabled = false;
};

/// Frame-by-frame closed-loop simulation. Each frame advances the drift, and
/// when feedback is enabled runs a two-phase scan at the current voltage and
/// jumps straight to the estimated zero-phase voltage, shifted by multiples of
/// 2 V_pi into [v_min, v_max - V_pi/2] so the second probe stays in range.
/// With feedback disabled the voltage is frozen.
class PhaseLockSimulator {
 public:
  PhaseLockSimulator(FrameTiming timing, InterferenceModel model, DriftModel drift, std::uint64_t seed);

  /// Runs for `duration_s`, recording one trace point every `sample_interval_s`.
  std::vector<TracePoint> run(double duration_s, bool enabled, double sample_interval_s);

  /// One frame; returns the residual phase seen by the quantum part of the frame.
  double step(bool enabled);

  const PhaseLockState& state() const { return state_; }
  double time_s() const { return static_cast<double>(frames_) * timing_.frame_s(); }
  double residual() const;

 private:
  double keep_in_range(double V) const;

  FrameTiming timing_;
  InterferenceModel model_;
  DriftModel drift_;
  PhaseLockState state_;
  std::mt19937_64 drift_rng_;
  std::mt19937_64 shot_rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  long long frames_ = 0;
  long long frames_since_sample_ = 0;
};

std::vector<TracePoint> run_feedback(double duration_s, const FrameTiming& timing, const InterferenceModel& model,
                                     const DriftModel& drift, bool enabled, std::uint64_t seed,
                                     double sample_interval_s = 0.1);

struct QberPoint {
  double time_s = 0.0;  // end of the bin
  double qber = 0.0;
};

struct QberOptions {
  double bin_s = 10.0;
  /// Sifted detections per bin; when > 0 each bin's QBER is a binomial
  /// estimate, otherwise the exact bin mean is reported.
  double detections_per_bin = 0.0;
};

/// QBER with feedback on, both users sending coherent states: per bin,
/// e_floor plus the mean of (1 - cos phi_residual)/2 over the bin's frames.
std::vector<QberPoint> qber_trace(double duration_s, const FrameTiming& timing, const InterferenceModel& model,
                                  const DriftModel& drift, double e_floor, std::uint64_t seed,
                                  const QberOptions& options = {});

}  // namespace scsqkd
