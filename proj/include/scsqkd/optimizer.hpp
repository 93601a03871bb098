#pragma once

#include <vector>

#include "scsqkd/model.hpp"

namespace scsqkd {

/// Search region and resolution for the (mu, p_x) optimization.
///
/// Optimal strong-source intensities sit far below the top of the range at
/// long distance (around 1e-3 at 200 km), so the mu axis is geometric by
/// default: mu_points values from mu_min to mu_max. The p_x axis is linear
/// and includes both endpoints.
struct GridSpec {
  int mu_points = 32;
  int px_points = 32;
  double mu_min = 1e-5;
  double mu_max = 0.5;
  bool log_mu = true;
  double rel_tol = 1e-6;  // simplex convergence on the objective
  int max_iter = 400;

  std::vector<double> mu_axis() const;
  std::vector<double> px_axis() const;
};

struct GridPoint {
  double mu = 0.0;
  double p_x = 0.0;
  double R_coh = 0.0;
};

struct Optimum {
  ProtocolParams params;
  KeyRateReport report;
  GridPoint grid_best;  // starting point of the refinement
  std::vector<GridPoint> grid;
};

/// R_coh at a symmetric (mu, p_x) with every other field taken from `fixed`;
/// bounds follow from fixed.extinction_ratio_db.
KeyRateReport evaluate_at(const ChannelParams& channel, const ProtocolParams& fixed, double mu, double p_x);

/// Coarse grid then Nelder-Mead refinement in (ln mu, p_x), constrained to
/// mu in (0, mu_max] and p_x in [0, 1]. Ties on the grid go to the lowest mu,
/// then the lowest p_x. Throws NoPositiveRate if nothing on the grid yields a key.
Optimum optimize(const ChannelParams& channel, const ProtocolParams& fixed, const GridSpec& grid);

struct SweepRow {
  double distance_km = 0.0;
  double mu = 0.0;
  double p_x = 0.0;
  double R = 0.0;
  double R_coh = 0.0;
  double skr_bps = 0.0;
  double e_ph = 1.0;
  double n_Z = 0.0;
};

/// One optimize() per distance; distances beyond the cutoff give zero rows.
std::vector<SweepRow> sweep(const ChannelParams& channel_template, const std::vector<double>& distances,
                            const ProtocolParams& fixed, const GridSpec& grid);

/// Misalignment e_d at which the optimized phase-flip error bound reaches
/// `target_e_ph`, by bisection on [lo, hi]. The optimized e_ph grows with e_d
/// but steps slightly where the worst intensity corner changes, so the upper
/// end of the final bracket is returned: its optimized e_ph is >= target.
/// Throws DomainError when the target is not bracketed.
double calibrate_misalignment(ChannelParams channel, const ProtocolParams& fixed, const GridSpec& grid,
                              double target_e_ph, double lo = 0.0, double hi = 0.1);

}  // namespace scsqkd
