#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace scsqkd {

/// A probability carried as its natural logarithm.
///
/// Security parameters after the postselection lift are of order 1e-830,
/// far below the smallest positive double, so every failure probability in
/// the finite-key pipeline travels in log space.
struct LogProb {
  double ln = 0.0;

  static LogProb of(double p) { return LogProb{std::log(p)}; }
  /// log2(1/p), the bit cost of a failure probability.
  double bits() const { return -ln / std::log(2.0); }
  LogProb operator*(double factor) const { return LogProb{ln + std::log(factor)}; }
};

/// Lower bounds on the vacuum projections <0|rho|0> of the four source states.
struct SourceBounds {
  double a0 = 0.99;    // Alice, strong source
  double a_o0 = 1.0;   // Alice, weak source
  double b0 = 0.99;    // Bob, strong source
  double b_o0 = 1.0;   // Bob, weak source

  /// Throws DomainError unless every field lies in [0.5, 1].
  static SourceBounds checked(double a0, double a_o0, double b0, double b_o0);

  /// Bounds of the same sources with every intensity multiplied by `factor`.
  /// The vacuum projection of a coherent state is exp(-mu), so each bound
  /// becomes v^factor.
  SourceBounds scaled(double factor) const;
};

/// Fractions of the aggregate failure probability assigned to each term of
/// eps_cor + eps_PA + eps_bar + 3 eps. Must sum to one.
struct EpsilonSplit {
  double cor = 0.25;
  double pa = 0.25;
  double bar = 0.25;
  double three_eps = 0.25;
};

/// Resolved component failure probabilities, all in log space.
struct EpsilonBudget {
  LogProb aggregate;  // eps_cor + eps_PA + eps_bar + 3 eps
  LogProb cor;
  LogProb pa;
  LogProb bar;
  LogProb eps;
};

struct ProtocolParams {
  double mu_A = 0.002;  // strong-source intensity, Alice
  double mu_B = 0.002;  // strong-source intensity, Bob
  double p_x = 0.25;    // probability of the strong source; p_o = 1 - p_x
  double N = 1e13;      // number of time windows
  double f_ec = 1.1;
  int d = 8;
  double eps_coh = 1e-10;
  EpsilonSplit eps_split{};
  double intensity_fluct = 0.0065;
  /// Extinction ratio of the intensity modulators; sets the weak-source
  /// vacuum projection when bounds are derived from the intensities.
  double extinction_ratio_db = std::numeric_limits<double>::infinity();

  double p_o() const { return 1.0 - p_x; }

  /// Splits eps_coh / (N+1)^(d^2-1) according to eps_split.
  EpsilonBudget budget() const;
};

struct ChannelParams {
  double distance_km = 200.0;
  double atten_db_per_km = 0.18;
  double extra_loss_db = 0.0;
  double det_efficiency = 0.69;
  double P_dc = 0.1 / 1.25e9;  // dark counts per detector per window
  double e_d = 0.0;
  double clock_hz = 1.25e9;
  double duty_cycle = 0.5;  // 20 us of quantum signal per 40 us frame

  /// Per-window dark-count probability from a dark-count rate.
  static double dark_probability(double dark_rate_hz, double clock_hz) { return dark_rate_hz / clock_hz; }
};

struct ObservedStatistics {
  double n_Z = 0.0;
  double n_O = 0.0;
  double n_B = 0.0;
  double M_S = 0.0;
  double E_t = 0.0;
};

/// Every quantity subtracted from n_Z [1 - H(e_ph)] on the way to the key length.
struct CostBreakdown {
  double leading = 0.0;            // n_Z [1 - H(e_ph)]
  double error_correction = 0.0;   // f M_S H(E_t)
  double correctness = 0.0;        // log2(2 / eps_cor)
  double privacy_amplification = 0.0;  // 2 log2(1 / eps_PA)
  double smoothing = 0.0;          // 7 sqrt(n_Z log2(2 / eps_bar))
  double postselection = 0.0;      // 2 (d^2 - 1) log2(N + 1)

  double collective_costs() const { return error_correction + correctness + privacy_amplification + smoothing; }
};

struct KeyRateReport {
  double R = 0.0;      // bits per window, collective attacks, clamped at 0
  double R_coh = 0.0;  // bits per window, coherent attacks, clamped at 0
  double R_unclamped = 0.0;
  double skr_bps = 0.0;
  double e_ph = 1.0;
  double N_ph_expected = 0.0;
  double N_ph_bar = 0.0;
  double n_O_exp_U = 0.0;
  double n_B_exp_U = 0.0;
  double mu_A = 0.0;  // equivalent intensities used for the phase-error bound
  double mu_B = 0.0;
  LogProb eps_coh{};  // recomputed from the component budget
  ObservedStatistics stats{};
  CostBreakdown cost{};
};

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const ProtocolParams& params);
ValidationReport validate(const ChannelParams& channel);
ValidationReport validate(const SourceBounds& bounds);
ValidationReport validate(const ProtocolParams& params, const ChannelParams& channel, const SourceBounds& bounds);

}  // namespace scsqkd
