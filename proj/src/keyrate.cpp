#include "scsqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "scsqkd/channel.hpp"
#include "scsqkd/errors.hpp"
#include "scsqkd/mapping.hpp"
#include "scsqkd/stats.hpp"

namespace scsqkd {

namespace {

// Bound on the expectation of a window count whose source choice has
// probability `p`; zero when that window type cannot occur.
double window_upper(double count, double p, LogProb eps, const char* name) {
  if (p == 0.0) {
    if (count != 0.0) throw DomainError(std::string(name) + " is nonzero although its source probability is 0");
    return 0.0;
  }
  return expected_upper(count, eps).value;
}

KeyRateReport run_pipeline(const ProtocolParams& params, const ChannelParams& channel, const SourceBounds& bounds) {
  const EquivalentIntensities mapped = equivalent_pair(bounds);
  const ObservedStatistics stats = expected_counts(params, arm_transmittance(channel), channel);

  ProtocolParams equivalent = params;
  equivalent.mu_A = mapped.mu_A;
  equivalent.mu_B = mapped.mu_B;

  KeyRateReport report;
  if (stats.n_Z > 0.0) {
    const PhaseErrorTerms terms = phase_error_expectation(equivalent, stats);
    const LogProb eps = params.budget().eps;
    const double e_ph = phase_error_rate(terms, stats.n_Z, eps);
    report = key_rate_collective(params, stats, e_ph);
    report.N_ph_expected = terms.N_ph_expected;
    report.N_ph_bar = real_upper(terms.N_ph_expected, eps).value;
    report.n_O_exp_U = terms.n_O_exp_U;
    report.n_B_exp_U = terms.n_B_exp_U;
  } else {
    report = key_rate_collective(params, stats, 1.0);
  }
  report.mu_A = mapped.mu_A;
  report.mu_B = mapped.mu_B;
  report = key_rate_coherent(report, params);
  report.skr_bps = secret_key_rate_bps(report.R_coh, channel);
  return report;
}

}  // namespace

PhaseErrorTerms phase_error_expectation(const ProtocolParams& params, const ObservedStatistics& stats) {
  const double p_0 = params.p_o();
  const double p_x = params.p_x;
  const double N = params.N;
  const LogProb eps = params.budget().eps;

  PhaseErrorTerms t;
  const double mu_sum = params.mu_A + params.mu_B;
  t.c0 = std::exp(-mu_sum / 4.0);
  t.c1 = std::exp(mu_sum / 4.0);
  t.c2_bar_sq = (t.c0 + t.c1 - 2.0 * std::exp(-params.mu_A / 2.0)) * (t.c0 + t.c1 - 2.0 * std::exp(-params.mu_B / 2.0));
  t.n_O_exp_U = window_upper(stats.n_O, p_0, eps, "n_O");
  t.n_B_exp_U = window_upper(stats.n_B, p_x, eps, "n_B");

  const double c2_bar = std::sqrt(std::max(t.c2_bar_sq, 0.0));
  const double O = t.n_O_exp_U;
  const double B = t.n_B_exp_U;
  double bracket = t.c2_bar_sq * N;
  if (p_0 > 0.0) bracket += t.c0 * t.c0 / (p_0 * p_0) * O + 2.0 * t.c0 * c2_bar / p_0 * std::sqrt(N * O);
  if (p_x > 0.0) bracket += t.c1 * t.c1 / (p_x * p_x) * B + 2.0 * t.c1 * c2_bar / p_x * std::sqrt(N * B);
  if (p_0 > 0.0 && p_x > 0.0) bracket += 2.0 * t.c0 * t.c1 / (p_0 * p_x) * std::sqrt(O * B);
  t.N_ph_expected = std::max(0.0, p_0 * p_x / 2.0 * bracket);
  return t;
}

double phase_error_rate(const PhaseErrorTerms& terms, double n_Z, LogProb eps) {
  if (!(n_Z > 0.0)) throw ZeroWindows("phase-error rate needs at least one effective Z window");
  return std::clamp(real_upper(terms.N_ph_expected, eps).value / n_Z, 0.0, 1.0);
}

KeyRateReport key_rate_collective(const ProtocolParams& params, const ObservedStatistics& stats, double e_ph) {
  const EpsilonBudget budget = params.budget();
  KeyRateReport r;
  r.stats = stats;
  r.e_ph = std::clamp(e_ph, 0.0, 1.0);

  CostBreakdown& c = r.cost;
  c.leading = stats.n_Z * (1.0 - binary_entropy(std::min(r.e_ph, 0.5)));
  c.error_correction = params.f_ec * stats.M_S * binary_entropy(std::clamp(stats.E_t, 0.0, 1.0));
  c.correctness = 1.0 + budget.cor.bits();
  c.privacy_amplification = 2.0 * budget.pa.bits();
  c.smoothing = 7.0 * std::sqrt(stats.n_Z * (1.0 + budget.bar.bits()));

  r.R_unclamped = (c.leading - c.collective_costs()) / params.N;
  r.R = stats.n_Z > 0.0 ? std::max(0.0, r.R_unclamped) : 0.0;
  return r;
}

KeyRateReport key_rate_coherent(KeyRateReport report, const ProtocolParams& params) {
  const double dim = static_cast<double>(params.d) * params.d - 1.0;
  report.cost.postselection = 2.0 * dim * std::log2(params.N + 1.0);
  report.R_coh = std::max(0.0, report.R - report.cost.postselection / params.N);
  const EpsilonBudget b = params.budget();
  // eps_cor + eps_PA + eps_bar + 3 eps, combined in log space, lifted by (N+1)^(d^2-1).
  const double terms[] = {b.cor.ln, b.pa.ln, b.bar.ln, b.eps.ln + std::log(3.0)};
  const double top = *std::max_element(std::begin(terms), std::end(terms));
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  report.eps_coh = LogProb{top + std::log(sum) + dim * std::log1p(params.N)};
  return report;
}

double secret_key_rate_bps(double R_coh, const ChannelParams& channel) {
  return R_coh * channel.clock_hz * channel.duty_cycle;
}

KeyRateReport evaluate(const ProtocolParams& params, const ChannelParams& channel, const SourceBounds& bounds) {
  if (params.intensity_fluct == 0.0) return run_pipeline(params, channel, bounds);
  KeyRateReport worst;
  bool first = true;
  for (const double scale : {1.0 - params.intensity_fluct, 1.0 + params.intensity_fluct}) {
    ProtocolParams corner = params;
    corner.mu_A *= scale;
    corner.mu_B *= scale;
    KeyRateReport r = run_pipeline(corner, channel, bounds.scaled(scale));
    if (first || r.R_coh < worst.R_coh || (r.R_coh == worst.R_coh && r.R < worst.R)) worst = r;
    first = false;
  }
  return worst;
}

KeyRateReport evaluate(const ProtocolParams& params, const ChannelParams& channel) {
  return evaluate(params, channel, bounds_from_extinction(params.mu_A, params.mu_B, params.extinction_ratio_db));
}

}  // namespace scsqkd
