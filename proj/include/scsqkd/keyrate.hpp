#pragma once

#include "scsqkd/model.hpp"

namespace scsqkd {

struct PhaseErrorTerms {
  double c0 = 1.0;
  double c1 = 1.0;
  double c2_bar_sq = 0.0;
  double n_O_exp_U = 0.0;
  double n_B_exp_U = 0.0;
  double N_ph_expected = 0.0;
};

/// Upper bound on the expected number of phase errors in effective Z windows.
///
/// `params.mu_A` and `params.mu_B` are read as the equivalent (mapped)
/// intensities. The O- and B-window expectations are bounded with
/// expected_upper at xi = eps. A source choice with probability zero never
/// produces its window type, so its terms are dropped when the matching count
/// is zero; a nonzero count there is a DomainError.
PhaseErrorTerms phase_error_expectation(const ProtocolParams& params, const ObservedStatistics& stats);

/// e_ph = real_upper(<N_ph>, eps) / n_Z, clamped to [0, 1]. ZeroWindows when n_Z = 0.
double phase_error_rate(const PhaseErrorTerms& terms, double n_Z, LogProb eps);

/// Key length per window against collective attacks, clamped at zero. The
/// phase-error entropy saturates at e_ph = 1/2.
KeyRateReport key_rate_collective(const ProtocolParams& params, const ObservedStatistics& stats, double e_ph);

/// Subtracts the postselection cost 2 (d^2 - 1) log2(N + 1) / N and records the
/// resulting coherent-attack security coefficient.
KeyRateReport key_rate_coherent(KeyRateReport report, const ProtocolParams& params);

double secret_key_rate_bps(double R_coh, const ChannelParams& channel);

/// Full pipeline at fixed parameters: equivalent intensities from `bounds`,
/// linear-model counts at the sent intensity params.mu_A, phase-error bound,
/// then both key rates. When intensity_fluct > 0 the pipeline runs at the
/// intensity corners mu (1 +/- intensity_fluct), with the bounds rescaled to
/// match, and the corner with the lower R_coh is reported.
KeyRateReport evaluate(const ProtocolParams& params, const ChannelParams& channel, const SourceBounds& bounds);

/// As above with bounds derived from mu_A, mu_B and params.extinction_ratio_db.
KeyRateReport evaluate(const ProtocolParams& params, const ChannelParams& channel);

}  // namespace scsqkd
