#pragma once

#include "scsqkd/model.hpp"

namespace scsqkd {

/// Result of a Chernoff-type fluctuation estimate.
struct ChernoffBound {
  double value = 0.0;  // the bound itself
  double delta = 0.0;  // relative deviation solving the tail equation; 0 for zero input
  LogProb xi{};        // failure probability
};

/// H(x) = -x log2 x - (1-x) log2(1-x), with H(0) = H(1) = 0. DomainError outside [0, 1].
double binary_entropy(double x);

// Observed count X -> bounds on its expectation:
//   phi_U(X) = X / (1 - d2),  [e^{-d2} / (1-d2)^{1-d2}]^{X/(1-d2)} = xi/2
//   phi_L(X) = X / (1 + d1),  [e^{d1} / (1+d1)^{1+d1}]^{X/(1+d1)} = xi/2
// At X = 0 the upper bound falls back to ln(2/xi) and the lower bound to 0.
ChernoffBound expected_upper(double X, LogProb xi);
ChernoffBound expected_lower(double X, LogProb xi);
inline ChernoffBound expected_upper(double X, double xi) { return expected_upper(X, LogProb::of(xi)); }
inline ChernoffBound expected_lower(double X, double xi) { return expected_lower(X, LogProb::of(xi)); }

/// Expected count phi -> upper bound on the realised count:
///   (1 + d) phi,  [e^d / (1+d)^{1+d}]^phi = xi/2,  and ln(2/xi) at phi = 0.
ChernoffBound real_upper(double phi, LogProb xi);
inline ChernoffBound real_upper(double phi, double xi) { return real_upper(phi, LogProb::of(xi)); }

namespace detail {

// Natural logs of the bracketed bases, per unit of the exponent's count:
//   upper_exponent(d) = ln[e^{-d} / (1-d)^{1-d}] / (1-d)
//   lower_exponent(d) = ln[e^{d} / (1+d)^{1+d}] / (1+d)
//   tail_exponent(d)  = ln[e^{d} / (1+d)^{1+d}]
// All are 0 at d = 0 and strictly decreasing; small arguments use the Taylor series.
double upper_exponent(double delta);
double lower_exponent(double delta);
double tail_exponent(double delta);

}  // namespace detail

}  // namespace scsqkd
