#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "scsqkd/errors.hpp"
#include "scsqkd/stats.hpp"

using namespace scsqkd;

namespace {

// Bisection directly on the power form of the tail equations, in long double,
// with no logarithms of the base. Independent of the series/log1p route.
long double oracle_delta(long double X, long double xi, int kind) {
  auto lhs = [&](long double d) -> long double {
    switch (kind) {
      case 0: return std::pow(std::exp(-d) / std::pow(1 - d, 1 - d), X / (1 - d));  // upper
      case 1: return std::pow(std::exp(d) / std::pow(1 + d, 1 + d), X / (1 + d));   // lower
      default: return std::pow(std::exp(d) / std::pow(1 + d, 1 + d), X);           // real
    }
  };
  long double lo = 0, hi = kind == 0 ? 1 : 1;
  if (kind != 0)
    while (lhs(hi) > xi / 2) hi *= 2;
  for (int i = 0; i < 300; ++i) {
    const long double mid = (lo + hi) / 2;
    (lhs(mid) > xi / 2 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // mpmath, 40 digits: H(0.1672) = 0.65125930723777124...
  CHECK(binary_entropy(0.1672) == doctest::Approx(0.6512593072377712).epsilon(1e-14));
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)).epsilon(1e-15));
  CHECK_THROWS_AS(binary_entropy(-1e-9), DomainError);
  CHECK_THROWS_AS(binary_entropy(1.0 + 1e-9), DomainError);
}

TEST_CASE("zero-observation fallbacks") {
  const double xi = 1e-10;
  CHECK(expected_upper(0.0, xi).value == doctest::Approx(std::log(2.0 / xi)));
  CHECK(expected_lower(0.0, xi).value == 0.0);
  CHECK(real_upper(0.0, xi).value == doctest::Approx(std::log(2.0 / xi)));
}

TEST_CASE("bounds at X = 1e4, xi = 1e-10") {
  // Frozen from an independent Brent solve of the log-form equations (Python/scipy).
  const auto up = expected_upper(1e4, 1e-10);
  const auto lo = expected_lower(1e4, 1e-10);
  CHECK(up.value == doctest::Approx(10704.65506204845).epsilon(1e-10));
  CHECK(lo.value == doctest::Approx(9326.968601955221).epsilon(1e-10));
  CHECK(std::abs(up.value / 1.074e4 - 1.0) < 0.02);
  CHECK(std::abs(lo.value / 9.36e3 - 1.0) < 0.02);
  CHECK(up.delta == doctest::Approx(static_cast<double>(oracle_delta(1e4L, 1e-10L, 0))).epsilon(1e-10));
  CHECK(lo.delta == doctest::Approx(static_cast<double>(oracle_delta(1e4L, 1e-10L, 1))).epsilon(1e-10));
}

TEST_CASE("real_upper at phi = 1e6, xi = 1e-10") {
  const auto r = real_upper(1e6, 1e-10);
  CHECK(r.value == doctest::Approx(1006895.4264833421).epsilon(1e-10));
  CHECK(std::abs(r.value / 1.0068e6 - 1.0) < 0.01);
  CHECK(r.delta == doctest::Approx(static_cast<double>(oracle_delta(1e6L, 1e-10L, 2))).epsilon(1e-9));
}

TEST_CASE("bracketing, ordering and monotonicity in xi") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_count(0.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    const double X = std::pow(10.0, log_count(rng));
    for (double xi : {1e-3, 1e-10, 1e-300}) {
      const double up = expected_upper(X, xi).value;
      const double lo = expected_lower(X, xi).value;
      CHECK(lo < X);
      CHECK(up > X);
      CHECK(real_upper(X, xi).value >= X);
      CHECK(expected_upper(X, xi / 10).value > up);
      CHECK(expected_lower(X, xi / 10).value < lo);
    }
  }
}

TEST_CASE("tiny failure probabilities stay finite in log space") {
  const LogProb xi{-1900.0};  // ~1e-825, below the double range
  const auto up = expected_upper(1e8, xi);
  CHECK(std::isfinite(up.value));
  CHECK(up.value > 1e8);
  CHECK(up.value < 1.1e8);
  CHECK(expected_upper(0.0, xi).value == doctest::Approx(1900.0 + std::log(2.0)));
}

TEST_CASE("solved deltas satisfy their equations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_count(0.0, 7.0);
  const double xi = 0.01;
  for (int i = 0; i < 100; ++i) {
    const long double X = std::pow(10.0, log_count(rng));
    const long double d2 = expected_upper(static_cast<double>(X), xi).delta;
    const long double d1 = expected_lower(static_cast<double>(X), xi).delta;
    const long double d3 = real_upper(static_cast<double>(X), xi).delta;
    const long double up = std::pow(std::exp(-d2) / std::pow(1 - d2, 1 - d2), X / (1 - d2));
    const long double low = std::pow(std::exp(d1) / std::pow(1 + d1, 1 + d1), X / (1 + d1));
    const long double real = std::pow(std::exp(d3) / std::pow(1 + d3, 1 + d3), X);
    CHECK(std::abs(static_cast<double>(up) - xi / 2) <= 1e-9 * xi);
    CHECK(std::abs(static_cast<double>(low) - xi / 2) <= 1e-9 * xi);
    CHECK(std::abs(static_cast<double>(real) - xi / 2) <= 1e-9 * xi);
  }
}

TEST_CASE("series and closed forms agree across the switch point") {
  for (double d : {9.9e-3, 1.01e-2}) {
    CHECK(detail::upper_exponent(d) == doctest::Approx(-d / (1 - d) - std::log1p(-d)).epsilon(1e-9));
    CHECK(detail::lower_exponent(d) == doctest::Approx(d / (1 + d) - std::log1p(d)).epsilon(1e-9));
    CHECK(detail::tail_exponent(d) == doctest::Approx(d - (1 + d) * std::log1p(d)).epsilon(1e-9));
  }
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(expected_upper(-1.0, 0.1), DomainError);
  CHECK_THROWS_AS(expected_lower(10.0, 1.5), DomainError);
  CHECK_THROWS_AS(real_upper(10.0, LogProb{0.0}), DomainError);
}

TEST_CASE("coverage on binomial samples") {
  std::mt19937_64 rng(2024);
  std::binomial_distribution<long long> binomial(100000, 0.01);
  int covered = 0;
  for (int i = 0; i < 300; ++i) {
    const double X = static_cast<double>(binomial(rng));
    if (expected_lower(X, 0.01).value <= 1000.0 && 1000.0 <= expected_upper(X, 0.01).value) ++covered;
  }
  CHECK(covered >= 294);
}
