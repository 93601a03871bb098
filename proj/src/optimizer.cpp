#include "scsqkd/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "scsqkd/errors.hpp"
#include "scsqkd/keyrate.hpp"

namespace scsqkd {

namespace {

std::vector<double> linear(double lo, double hi, int n) {
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) axis[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return axis;
}

struct Vertex {
  double log_mu;
  double p_x;
  double value;  // R_coh, maximised
};

class Objective {
 public:
  Objective(const ChannelParams& channel, const ProtocolParams& fixed, double mu_max)
      : channel_(channel), fixed_(fixed), log_mu_max_(std::log(mu_max)) {}

  double operator()(double log_mu, double p_x) const {
    if (log_mu > log_mu_max_ || p_x < 0.0 || p_x > 1.0) return -1.0;
    return evaluate_at(channel_, fixed_, std::exp(log_mu), p_x).R_coh;
  }

 private:
  const ChannelParams& channel_;
  const ProtocolParams& fixed_;
  double log_mu_max_;
};

// Nelder-Mead maximisation over two coordinates. The best vertex never gets
// worse, so the result is at least the starting value.
Vertex refine(const Objective& f, Vertex start, double step_log_mu, double step_px, const GridSpec& grid) {
  std::array<Vertex, 3> s{start, Vertex{start.log_mu + step_log_mu, start.p_x, 0.0},
                          Vertex{start.log_mu, start.p_x + step_px, 0.0}};
  if (s[2].p_x > 1.0) s[2].p_x = start.p_x - step_px;
  for (std::size_t i = 1; i < 3; ++i) s[i].value = f(s[i].log_mu, s[i].p_x);

  auto point = [&](const Vertex& a, const Vertex& b, double t) {
    Vertex v{a.log_mu + t * (b.log_mu - a.log_mu), a.p_x + t * (b.p_x - a.p_x), 0.0};
    v.value = f(v.log_mu, v.p_x);
    return v;
  };

  for (int iter = 0; iter < grid.max_iter; ++iter) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
    const double spread = s[0].value - s[2].value;
    const double size = std::max(std::abs(s[1].log_mu - s[0].log_mu) + std::abs(s[2].log_mu - s[0].log_mu),
                                 std::abs(s[1].p_x - s[0].p_x) + std::abs(s[2].p_x - s[0].p_x));
    if (spread <= grid.rel_tol * std::abs(s[0].value) && size < 1e-6) break;
    if (size < 1e-12) break;

    const Vertex centroid{(s[0].log_mu + s[1].log_mu) / 2.0, (s[0].p_x + s[1].p_x) / 2.0, 0.0};
    const Vertex reflected = point(centroid, s[2], -1.0);
    if (reflected.value > s[0].value) {
      const Vertex expanded = point(centroid, s[2], -2.0);
      s[2] = expanded.value > reflected.value ? expanded : reflected;
    } else if (reflected.value > s[1].value) {
      s[2] = reflected;
    } else {
      const Vertex contracted = reflected.value > s[2].value ? point(centroid, s[2], -0.5) : point(centroid, s[2], 0.5);
      if (contracted.value > std::max(reflected.value, s[2].value)) {
        s[2] = contracted;
      } else {
        for (std::size_t i = 1; i < 3; ++i) s[i] = point(s[0], s[i], 0.5);
      }
    }
  }
  return *std::max_element(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
}

}  // namespace

std::vector<double> GridSpec::mu_axis() const {
  if (!log_mu) {
    // Linear axis over (0, mu_max]; mu = 0 carries no key.
    std::vector<double> axis(static_cast<std::size_t>(mu_points));
    for (int i = 0; i < mu_points; ++i) axis[i] = mu_max * (i + 1) / mu_points;
    return axis;
  }
  std::vector<double> axis = linear(std::log(mu_min), std::log(mu_max), mu_points);
  for (double& v : axis) v = std::exp(v);
  axis.back() = mu_max;
  return axis;
}

std::vector<double> GridSpec::px_axis() const { return linear(0.0, 1.0, px_points); }

KeyRateReport evaluate_at(const ChannelParams& channel, const ProtocolParams& fixed, double mu, double p_x) {
  ProtocolParams p = fixed;
  p.mu_A = mu;
  p.mu_B = mu;
  p.p_x = p_x;
  return evaluate(p, channel);
}

Optimum optimize(const ChannelParams& channel, const ProtocolParams& fixed, const GridSpec& grid) {
  if (grid.mu_points < 8 || grid.px_points < 8) throw DomainError("grid needs at least 8 points per axis");
  if (!(grid.mu_min > 0.0 && grid.mu_max <= 0.5 && grid.mu_min < grid.mu_max)) {
    throw DomainError("mu range must satisfy 0 < mu_min < mu_max <= 0.5");
  }

  Optimum out;
  const auto mus = grid.mu_axis();
  const auto pxs = grid.px_axis();
  out.grid.reserve(mus.size() * pxs.size());
  std::size_t best = 0;
  for (double mu : mus) {
    for (double px : pxs) {
      out.grid.push_back({mu, px, evaluate_at(channel, fixed, mu, px).R_coh});
      // Strict comparison keeps the first (lowest mu, then lowest p_x) maximum.
      if (out.grid.back().R_coh > out.grid[best].R_coh) best = out.grid.size() - 1;
    }
  }
  out.grid_best = out.grid[best];
  if (!(out.grid_best.R_coh > 0.0)) throw NoPositiveRate("no positive key rate anywhere on the parameter grid");

  const double step_mu = grid.log_mu ? (std::log(mus.back()) - std::log(mus.front())) / (mus.size() - 1)
                                     : std::log(mus[1] / mus[0]);
  const double step_px = 1.0 / (pxs.size() - 1);
  const Objective objective(channel, fixed, grid.mu_max);
  const Vertex start{std::log(out.grid_best.mu), out.grid_best.p_x, out.grid_best.R_coh};
  const Vertex found = refine(objective, start, 0.5 * step_mu, 0.5 * step_px, grid);

  out.params = fixed;
  out.params.mu_A = out.params.mu_B = std::exp(found.log_mu);
  out.params.p_x = found.p_x;
  out.report = evaluate(out.params, channel);
  return out;
}

std::vector<SweepRow> sweep(const ChannelParams& channel_template, const std::vector<double>& distances,
                            const ProtocolParams& fixed, const GridSpec& grid) {
  std::vector<SweepRow> rows;
  rows.reserve(distances.size());
  for (double distance : distances) {
    ChannelParams channel = channel_template;
    channel.distance_km = distance;
    SweepRow row;
    row.distance_km = distance;
    try {
      const Optimum opt = optimize(channel, fixed, grid);
      row.mu = opt.params.mu_A;
      row.p_x = opt.params.p_x;
      row.R = opt.report.R;
      row.R_coh = opt.report.R_coh;
      row.skr_bps = opt.report.skr_bps;
      row.e_ph = opt.report.e_ph;
      row.n_Z = opt.report.stats.n_Z;
    } catch (const NoPositiveRate&) {
      // zero row
    }
    rows.push_back(row);
  }
  return rows;
}

double calibrate_misalignment(ChannelParams channel, const ProtocolParams& fixed, const GridSpec& grid,
                              double target_e_ph, double lo, double hi) {
  auto optimized_e_ph = [&](double e_d) {
    channel.e_d = e_d;
    try {
      return optimize(channel, fixed, grid).report.e_ph;
    } catch (const NoPositiveRate&) {
      return 1.0;
    }
  };
  if (optimized_e_ph(lo) > target_e_ph || optimized_e_ph(hi) < target_e_ph) {
    throw DomainError("target e_ph is not bracketed by the e_d search interval");
  }
  for (int i = 0; i < 40 && hi - lo > 1e-6; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (optimized_e_ph(mid) < target_e_ph) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace scsqkd
