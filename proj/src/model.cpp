#include "scsqkd/model.hpp"

#include <sstream>

#include "scsqkd/errors.hpp"

namespace scsqkd {

namespace {

void check_unit(ValidationReport& report, const char* field, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    report.violations.push_back({field, std::string(field) + " out of [0,1]"});
  }
}

void check_nonnegative(ValidationReport& report, const char* field, double value) {
  if (!(value >= 0.0)) {
    report.violations.push_back({field, std::string(field) + " < 0"});
  }
}

void check_vacuum(ValidationReport& report, const char* field, double value) {
  if (!(value >= 0.5)) {
    report.violations.push_back({field, std::string(field) + " < 0.5"});
  } else if (!(value <= 1.0)) {
    report.violations.push_back({field, std::string(field) + " > 1"});
  }
}

void append(ValidationReport& into, const ValidationReport& from) {
  into.violations.insert(into.violations.end(), from.violations.begin(), from.violations.end());
}

}  // namespace

SourceBounds SourceBounds::checked(double a0, double a_o0, double b0, double b_o0) {
  SourceBounds bounds{a0, a_o0, b0, b_o0};
  const auto report = validate(bounds);
  if (!report.ok()) throw DomainError(report.to_string());
  return bounds;
}

SourceBounds SourceBounds::scaled(double factor) const {
  return {std::pow(a0, factor), std::pow(a_o0, factor), std::pow(b0, factor), std::pow(b_o0, factor)};
}

EpsilonBudget ProtocolParams::budget() const {
  EpsilonBudget b;
  const double dim = static_cast<double>(d) * d - 1.0;
  b.aggregate = LogProb{std::log(eps_coh) - dim * std::log1p(N)};
  b.cor = b.aggregate * eps_split.cor;
  b.pa = b.aggregate * eps_split.pa;
  b.bar = b.aggregate * eps_split.bar;
  b.eps = b.aggregate * (eps_split.three_eps / 3.0);
  return b;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].field << ": " << violations[i].message;
  }
  return out.str();
}

ValidationReport validate(const ProtocolParams& p) {
  ValidationReport r;
  if (!(p.mu_A > 0.0)) r.violations.push_back({"mu_A", "mu_A must be > 0"});
  if (!(p.mu_B > 0.0)) r.violations.push_back({"mu_B", "mu_B must be > 0"});
  check_unit(r, "p_x", p.p_x);
  if (!(p.N >= 1.0)) r.violations.push_back({"N", "N must be >= 1"});
  if (!(p.f_ec >= 1.0)) r.violations.push_back({"f_ec", "f_ec must be >= 1"});
  if (p.d < 2) r.violations.push_back({"d", "d must be >= 2"});
  if (!(p.eps_coh > 0.0 && p.eps_coh < 1.0)) r.violations.push_back({"eps_coh", "eps_coh out of (0,1)"});
  const auto& s = p.eps_split;
  if (!(s.cor > 0.0 && s.pa > 0.0 && s.bar > 0.0 && s.three_eps > 0.0)) {
    r.violations.push_back({"eps_split", "every eps_split fraction must be > 0"});
  } else if (std::abs(s.cor + s.pa + s.bar + s.three_eps - 1.0) > 1e-9) {
    r.violations.push_back({"eps_split", "eps_split fractions must sum to 1"});
  }
  check_nonnegative(r, "intensity_fluct", p.intensity_fluct);
  if (!(p.intensity_fluct < 1.0)) r.violations.push_back({"intensity_fluct", "intensity_fluct must be < 1"});
  if (!(p.extinction_ratio_db > 0.0)) {
    r.violations.push_back({"extinction_ratio_db", "extinction_ratio_db must be > 0"});
  }
  return r;
}

ValidationReport validate(const ChannelParams& c) {
  ValidationReport r;
  check_nonnegative(r, "distance_km", c.distance_km);
  check_nonnegative(r, "atten_db_per_km", c.atten_db_per_km);
  check_nonnegative(r, "extra_loss_db", c.extra_loss_db);
  check_unit(r, "det_efficiency", c.det_efficiency);
  check_unit(r, "P_dc", c.P_dc);
  check_unit(r, "e_d", c.e_d);
  if (!(c.clock_hz > 0.0)) r.violations.push_back({"clock_hz", "clock_hz must be > 0"});
  check_unit(r, "duty_cycle", c.duty_cycle);
  return r;
}

ValidationReport validate(const SourceBounds& b) {
  ValidationReport r;
  check_vacuum(r, "a0", b.a0);
  check_vacuum(r, "a_o0", b.a_o0);
  check_vacuum(r, "b0", b.b0);
  check_vacuum(r, "b_o0", b.b_o0);
  return r;
}

ValidationReport validate(const ProtocolParams& params, const ChannelParams& channel, const SourceBounds& bounds) {
  ValidationReport r = validate(params);
  append(r, validate(channel));
  append(r, validate(bounds));
  return r;
}

}  // namespace scsqkd
