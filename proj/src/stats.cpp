#include "scsqkd/stats.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "scsqkd/errors.hpp"

namespace scsqkd {

namespace {

constexpr double kSeriesCutoff = 1e-2;
constexpr double kRelTol = 1e-12;
constexpr int kMaxIter = 200;

void require_xi(LogProb xi) {
  if (!(xi.ln < 0.0)) throw DomainError("failure probability must lie in (0, 1)");
}

// Bisection for the root of count * exponent(delta) = ln(xi/2), exponent
// strictly decreasing from 0. `hi` is expanded while the residual stays
// positive, unless `upper_limit` caps the bracket.
template <typename Exponent>
double solve_delta(Exponent exponent, double count, LogProb xi, double upper_limit) {
  const double target = xi.ln - std::numbers::ln2;
  auto residual = [&](double delta) { return count * exponent(delta) - target; };

  double lo = 0.0;
  double hi = 1.0;
  if (upper_limit <= 0.0) {
    while (residual(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    hi = upper_limit;
  }
  for (int i = 0; i < kMaxIter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= kRelTol * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

namespace detail {

double upper_exponent(double delta) {
  if (delta < kSeriesCutoff) {
    // -sum_{k>=2} (k-1)/k d^k
    double sum = 0.0;
    double power = delta;
    for (int k = 2; k <= 14; ++k) {
      power *= delta;
      sum -= (k - 1.0) / k * power;
    }
    return sum;
  }
  return -delta / (1.0 - delta) - std::log1p(-delta);
}

double lower_exponent(double delta) {
  if (delta < kSeriesCutoff) {
    // sum_{k>=2} (-1)^{k+1} (1 - 1/k) d^k
    double sum = 0.0;
    double power = delta;
    for (int k = 2; k <= 14; ++k) {
      power *= delta;
      sum += ((k % 2) ? 1.0 : -1.0) * (1.0 - 1.0 / k) * power;
    }
    return sum;
  }
  return delta / (1.0 + delta) - std::log1p(delta);
}

double tail_exponent(double delta) {
  if (delta < kSeriesCutoff) {
    // sum_{k>=2} (-1)^{k+1} d^k / (k (k-1))
    double sum = 0.0;
    double power = delta;
    for (int k = 2; k <= 14; ++k) {
      power *= delta;
      sum += ((k % 2) ? 1.0 : -1.0) * power / (k * (k - 1.0));
    }
    return sum;
  }
  return delta - (1.0 + delta) * std::log1p(delta);
}

}  // namespace detail

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy argument out of [0,1]: " + std::to_string(x));
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

ChernoffBound expected_upper(double X, LogProb xi) {
  require_xi(xi);
  if (!(X >= 0.0)) throw DomainError("observed count must be >= 0");
  if (X == 0.0) return {std::numbers::ln2 - xi.ln, 0.0, xi};
  const double delta = solve_delta(detail::upper_exponent, X, xi, 1.0);
  return {X / (1.0 - delta), delta, xi};
}

ChernoffBound expected_lower(double X, LogProb xi) {
  require_xi(xi);
  if (!(X >= 0.0)) throw DomainError("observed count must be >= 0");
  if (X == 0.0) return {0.0, 0.0, xi};
  const double delta = solve_delta(detail::lower_exponent, X, xi, 0.0);
  return {X / (1.0 + delta), delta, xi};
}

ChernoffBound real_upper(double phi, LogProb xi) {
  require_xi(xi);
  if (!(phi >= 0.0)) throw DomainError("expected count must be >= 0");
  if (phi == 0.0) return {std::numbers::ln2 - xi.ln, 0.0, xi};
  const double delta = solve_delta(detail::tail_exponent, phi, xi, 0.0);
  return {(1.0 + delta) * phi, delta, xi};
}

}  // namespace scsqkd
