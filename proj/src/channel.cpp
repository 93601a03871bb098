#include "scsqkd/channel.hpp"

#include <cmath>

#include "scsqkd/errors.hpp"

namespace scsqkd {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr std::uint64_t kMaxWindows = 1'000'000'000;
constexpr std::uint64_t kBlockSize = 1u << 22;

void require_symmetric(const ProtocolParams& params) {
  if (std::abs(params.mu_A - params.mu_B) > kSymmetryTol) {
    throw AsymmetryError("the linear channel model requires mu_A == mu_B");
  }
}

// Probability that a detector receiving `mean` photons clicks.
double click_probability(double mean, double P_dc) { return 1.0 - (1.0 - P_dc) * std::exp(-mean); }

void finish(ObservedStatistics& s, double errors) {
  s.M_S = s.n_Z + s.n_O + s.n_B;
  s.E_t = s.M_S > 0.0 ? errors / s.M_S : 0.0;
}

}  // namespace

double total_loss_db(const ChannelParams& channel) {
  return channel.atten_db_per_km * channel.distance_km + channel.extra_loss_db;
}

Transmittance arm_transmittance(const ChannelParams& channel) {
  return {channel.det_efficiency * std::pow(10.0, -total_loss_db(channel) / 2.0 / 10.0)};
}

ObservedStatistics expected_counts(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel) {
  require_symmetric(params);
  const double mu = params.mu_A;
  const double p_x = params.p_x;
  const double p_0 = params.p_o();
  const double P_dc = channel.P_dc;
  const double e_d = channel.e_d;
  const double N = params.N;

  const double silent_half = (1.0 - P_dc) * std::exp(-eta.eta * mu / 2.0);
  const double silent_double = (1.0 - P_dc) * std::exp(-2.0 * eta.eta * mu);

  ObservedStatistics s;
  s.n_Z = 2.0 * p_0 * p_x * silent_half * (1.0 - silent_half) * N;
  s.n_O = p_0 * p_0 * P_dc * (1.0 - P_dc) * N;
  s.n_B = p_x * p_x * (e_d * (1.0 - P_dc) * (1.0 - silent_double) + (1.0 - e_d) * P_dc * silent_double) * N;
  finish(s, s.n_O + s.n_B);
  return s;
}

WindowModel WindowModel::from(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel) {
  require_symmetric(params);
  return {params.p_x, channel.P_dc, channel.e_d, eta.eta * params.mu_A / 2.0, 2.0 * eta.eta * params.mu_A};
}

WindowSample WindowModel::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  WindowSample w;
  w.alice_sent = uniform(rng) < p_x;
  w.bob_sent = uniform(rng) < p_x;

  double left = 0.0;
  double right = 0.0;
  if (w.alice_sent && w.bob_sent) {
    // Phase-locked interference sends both pulses to the left port unless misaligned.
    if (uniform(rng) < e_d) {
      right = double_mean;
    } else {
      left = double_mean;
    }
  } else if (w.alice_sent || w.bob_sent) {
    left = single_mean;
    right = single_mean;
  }
  w.left_click = uniform(rng) < click_probability(left, P_dc);
  w.right_click = uniform(rng) < click_probability(right, P_dc);
  return w;
}

ObservedStatistics monte_carlo_counts(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel,
                                      std::uint64_t windows, std::uint64_t seed) {
  if (windows > kMaxWindows) throw DomainError("monte_carlo_counts is limited to 1e9 windows");
  const WindowModel model = WindowModel::from(params, eta, channel);

  std::uint64_t n_Z = 0, n_O = 0, n_B = 0, errors = 0;
  for (std::uint64_t block = 0; block * kBlockSize < windows; ++block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block)};
    std::mt19937_64 rng(seq);
    const std::uint64_t end = std::min(windows, (block + 1) * kBlockSize);
    for (std::uint64_t i = block * kBlockSize; i < end; ++i) {
      const WindowSample w = model.sample(rng);
      if (!w.effective()) continue;
      if (w.alice_sent && w.bob_sent) {
        ++n_B;
      } else if (w.alice_sent || w.bob_sent) {
        ++n_Z;
      } else {
        ++n_O;
      }
      if (w.bit_error()) ++errors;
    }
  }

  ObservedStatistics s;
  s.n_Z = static_cast<double>(n_Z);
  s.n_O = static_cast<double>(n_O);
  s.n_B = static_cast<double>(n_B);
  finish(s, static_cast<double>(errors));
  return s;
}

}  // namespace scsqkd
