#pragma once

#include <cstdint>
#include <random>

#include "scsqkd/model.hpp"

namespace scsqkd {

/// Single-arm transmittance from a user to Charlie's detectors, detector efficiency included.
struct Transmittance {
  double eta = 1.0;
};

/// Total fiber plus insertion loss between Alice and Bob, in dB.
double total_loss_db(const ChannelParams& channel);

/// Charlie sits midway, so each arm carries half of the total loss.
Transmittance arm_transmittance(const ChannelParams& channel);

/// Closed-form (linear-model) counts for the symmetric case mu = mu_A = mu_B.
///
/// Effective windows are those where only the right detector clicks. In Z
/// windows one strong pulse splits evenly over both detectors; in B windows
/// the two strong pulses interfere into the left port except with
/// misalignment probability e_d. Z windows carry agreeing bits while O and B
/// windows carry disagreeing ones, so M_S = n_Z + n_O + n_B and
/// E_t = (n_O + n_B) / M_S.
///
/// Throws AsymmetryError when |mu_A - mu_B| > 1e-12.
ObservedStatistics expected_counts(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel);

/// Outcome of one time window.
struct WindowSample {
  bool alice_sent = false;  // Alice chose the strong source
  bool bob_sent = false;
  bool left_click = false;
  bool right_click = false;

  bool effective() const { return right_click && !left_click; }
  /// Alice's bit is 1 for the strong source; Bob's bit is 0 for the strong source.
  bool bit_error() const { return alice_sent == bob_sent; }
};

/// Per-window event probabilities feeding the sampler.
struct WindowModel {
  double p_x = 0.0;
  double P_dc = 0.0;
  double e_d = 0.0;
  double single_mean = 0.0;  // photons per detector from one strong pulse: eta mu / 2
  double double_mean = 0.0;  // photons into one port when both pulses interfere: 2 eta mu

  static WindowModel from(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel);
  WindowSample sample(std::mt19937_64& rng) const;
};

/// Monte Carlo counterpart of expected_counts: samples every window
/// independently and tallies effective events by window type. The run is
/// split into fixed-size blocks, each seeded from (seed, block index), so the
/// result depends only on the seed. At most 1e9 windows.
ObservedStatistics monte_carlo_counts(const ProtocolParams& params, Transmittance eta, const ChannelParams& channel,
                                      std::uint64_t windows, std::uint64_t seed);

}  // namespace scsqkd
