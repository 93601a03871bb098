#include "scsqkd/mapping.hpp"

#include <cmath>
#include <string>

#include "scsqkd/errors.hpp"

namespace scsqkd {

double equivalent_intensity(double v_strong, double v_weak) {
  if (!(v_strong >= 0.5 && v_strong <= 1.0) || !(v_weak >= 0.5 && v_weak <= 1.0)) {
    throw DomainError("vacuum projections must lie in [0.5, 1], got (" + std::to_string(v_strong) + ", " +
                      std::to_string(v_weak) + ")");
  }
  const double overlap = std::sqrt(v_strong * v_weak) - std::sqrt((1.0 - v_strong) * (1.0 - v_weak));
  if (!(overlap > 0.0)) throw DegenerateMapping("vacuum overlap is zero; equivalent intensity diverges");
  return -2.0 * std::log(overlap);
}

EquivalentIntensities equivalent_pair(const SourceBounds& bounds) {
  return {equivalent_intensity(bounds.a0, bounds.a_o0), equivalent_intensity(bounds.b0, bounds.b_o0)};
}

double weak_vacuum_from_extinction(double mu, double extinction_ratio_db) {
  return std::exp(-mu * std::pow(10.0, -extinction_ratio_db / 10.0));
}

SourceBounds bounds_from_extinction(double mu_a, double mu_b, double extinction_ratio_db) {
  return {std::exp(-mu_a), weak_vacuum_from_extinction(mu_a, extinction_ratio_db), std::exp(-mu_b),
          weak_vacuum_from_extinction(mu_b, extinction_ratio_db)};
}

}  // namespace scsqkd
