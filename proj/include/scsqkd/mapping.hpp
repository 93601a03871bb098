#pragma once

#include "scsqkd/model.hpp"

namespace scsqkd {

struct EquivalentIntensities {
  double mu_A = 0.0;
  double mu_B = 0.0;
};

/// Intensity of the perfect coherent state to which a real source pair with
/// vacuum projections (v_strong, v_weak) maps:
///   mu = -ln |sqrt(v_strong v_weak) - sqrt((1 - v_strong)(1 - v_weak))|^2.
/// Symmetric in its arguments. Throws DomainError outside [0.5, 1] and
/// DegenerateMapping when the overlap vanishes.
double equivalent_intensity(double v_strong, double v_weak);

EquivalentIntensities equivalent_pair(const SourceBounds& bounds);

/// Vacuum projection of the suppressed ("not sending") state left behind by
/// a modulator with the given extinction ratio: exp(-mu 10^(-ER/10)).
double weak_vacuum_from_extinction(double mu, double extinction_ratio_db);

/// Bounds for ideal coherent strong sources of intensity mu_a, mu_b whose
/// weak sources leak through a finite extinction ratio.
SourceBounds bounds_from_extinction(double mu_a, double mu_b, double extinction_ratio_db);

}  // namespace scsqkd
