#include "scsqkd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "scsqkd/errors.hpp"
#include "scsqkd/mapping.hpp"

namespace scsqkd {

namespace pt = boost::property_tree;

namespace {

double parse_number(const std::string& field, const std::string& text) {
  std::string trimmed = text;
  const auto first = trimmed.find_first_not_of(" \t");
  const auto last = trimmed.find_last_not_of(" \t");
  trimmed = first == std::string::npos ? std::string{} : trimmed.substr(first, last - first + 1);
  if (!trimmed.empty() && trimmed.front() == '+') trimmed.erase(0, 1);
  double value = 0.0;
  const auto* begin = trimmed.data();
  const auto* end = trimmed.data() + trimmed.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (trimmed.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(field + ": not a number: '" + text + "'");
  }
  return value;
}

std::int64_t parse_integer(const std::string& field, const std::string& text) {
  const double value = parse_number(field, text);
  if (std::floor(value) != value || std::abs(value) > 9.0e15) throw ConfigError(field + ": expected an integer");
  return static_cast<std::int64_t>(value);
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(field + ": expected true or false");
}

// One setter per "section.key".
using Setter = std::function<void(Config&, const std::string& field, const std::string& text)>;

template <typename Get>
Setter number(Get get) {
  return [get](Config& c, const std::string& f, const std::string& t) { get(c) = parse_number(f, t); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> s;
    s["protocol.mu_A"] = number([](Config& c) -> double& { return c.protocol.mu_A; });
    s["protocol.mu_B"] = number([](Config& c) -> double& { return c.protocol.mu_B; });
    s["protocol.p_x"] = number([](Config& c) -> double& { return c.protocol.p_x; });
    s["protocol.p_o"] = [](Config& c, const std::string& f, const std::string& t) {
      // Accepted only as a consistency check against p_x; see parse_config.
      c.protocol.p_x = 1.0 - parse_number(f, t);
    };
    s["protocol.N"] = number([](Config& c) -> double& { return c.protocol.N; });
    s["protocol.f_ec"] = number([](Config& c) -> double& { return c.protocol.f_ec; });
    s["protocol.d"] = [](Config& c, const std::string& f, const std::string& t) {
      c.protocol.d = static_cast<int>(parse_integer(f, t));
    };
    s["protocol.eps_coh"] = number([](Config& c) -> double& { return c.protocol.eps_coh; });
    s["protocol.eps_split_cor"] = number([](Config& c) -> double& { return c.protocol.eps_split.cor; });
    s["protocol.eps_split_pa"] = number([](Config& c) -> double& { return c.protocol.eps_split.pa; });
    s["protocol.eps_split_bar"] = number([](Config& c) -> double& { return c.protocol.eps_split.bar; });
    s["protocol.eps_split_3eps"] = number([](Config& c) -> double& { return c.protocol.eps_split.three_eps; });
    s["protocol.intensity_fluct"] = number([](Config& c) -> double& { return c.protocol.intensity_fluct; });
    s["protocol.extinction_ratio_db"] = number([](Config& c) -> double& { return c.protocol.extinction_ratio_db; });

    s["channel.distance_km"] = number([](Config& c) -> double& { return c.channel.distance_km; });
    s["channel.atten_db_per_km"] = number([](Config& c) -> double& { return c.channel.atten_db_per_km; });
    s["channel.extra_loss_db"] = number([](Config& c) -> double& { return c.channel.extra_loss_db; });
    s["channel.det_efficiency"] = number([](Config& c) -> double& { return c.channel.det_efficiency; });
    s["channel.P_dc"] = number([](Config& c) -> double& { return c.channel.P_dc; });
    s["channel.dark_rate_hz"] = [](Config& c, const std::string& f, const std::string& t) {
      c.channel.P_dc = ChannelParams::dark_probability(parse_number(f, t), c.channel.clock_hz);
    };
    s["channel.e_d"] = number([](Config& c) -> double& { return c.channel.e_d; });
    s["channel.clock_hz"] = number([](Config& c) -> double& { return c.channel.clock_hz; });
    s["channel.duty_cycle"] = number([](Config& c) -> double& { return c.channel.duty_cycle; });

    auto bound = [](double SourceBounds::*member) -> Setter {
      return [member](Config& c, const std::string& f, const std::string& t) {
        if (!c.source_bounds) c.source_bounds = SourceBounds{};
        (*c.source_bounds).*member = parse_number(f, t);
      };
    };
    s["source_bounds.a0"] = bound(&SourceBounds::a0);
    s["source_bounds.a_o0"] = bound(&SourceBounds::a_o0);
    s["source_bounds.b0"] = bound(&SourceBounds::b0);
    s["source_bounds.b_o0"] = bound(&SourceBounds::b_o0);

    s["phaselock.frame_us"] = number([](Config& c) -> double& { return c.phaselock.timing.frame_us; });
    s["phaselock.reference_us"] = number([](Config& c) -> double& { return c.phaselock.timing.reference_us; });
    s["phaselock.quantum_us"] = number([](Config& c) -> double& { return c.phaselock.timing.quantum_us; });
    s["phaselock.recovery_us"] = number([](Config& c) -> double& { return c.phaselock.timing.recovery_us; });
    s["phaselock.C0"] = number([](Config& c) -> double& { return c.phaselock.model.C0; });
    s["phaselock.Cd"] = number([](Config& c) -> double& { return c.phaselock.model.Cd; });
    s["phaselock.V_pi"] = number([](Config& c) -> double& { return c.phaselock.model.V_pi; });
    s["phaselock.v_min"] = number([](Config& c) -> double& { return c.phaselock.model.v_min; });
    s["phaselock.v_max"] = number([](Config& c) -> double& { return c.phaselock.model.v_max; });
    s["phaselock.sigma_rad_per_sqrt_s"] =
        number([](Config& c) -> double& { return c.phaselock.drift.sigma_rad_per_sqrt_s; });
    s["phaselock.drift_seed"] = [](Config& c, const std::string& f, const std::string& t) {
      c.phaselock.drift.seed = static_cast<std::uint64_t>(parse_integer(f, t));
    };
    s["phaselock.seed"] = [](Config& c, const std::string& f, const std::string& t) {
      c.phaselock.seed = static_cast<std::uint64_t>(parse_integer(f, t));
    };
    s["phaselock.sample_interval_s"] = number([](Config& c) -> double& { return c.phaselock.sample_interval_s; });
    s["phaselock.e_floor"] = number([](Config& c) -> double& { return c.phaselock.e_floor; });
    s["phaselock.qber_bin_s"] = number([](Config& c) -> double& { return c.phaselock.qber.bin_s; });
    s["phaselock.detections_per_bin"] =
        number([](Config& c) -> double& { return c.phaselock.qber.detections_per_bin; });

    s["optimizer.mu_points"] = [](Config& c, const std::string& f, const std::string& t) {
      c.optimizer.mu_points = static_cast<int>(parse_integer(f, t));
    };
    s["optimizer.px_points"] = [](Config& c, const std::string& f, const std::string& t) {
      c.optimizer.px_points = static_cast<int>(parse_integer(f, t));
    };
    s["optimizer.mu_min"] = number([](Config& c) -> double& { return c.optimizer.mu_min; });
    s["optimizer.mu_max"] = number([](Config& c) -> double& { return c.optimizer.mu_max; });
    s["optimizer.log_mu"] = [](Config& c, const std::string& f, const std::string& t) {
      c.optimizer.log_mu = parse_bool(f, t);
    };
    s["optimizer.rel_tol"] = number([](Config& c) -> double& { return c.optimizer.rel_tol; });
    s["optimizer.max_iter"] = [](Config& c, const std::string& f, const std::string& t) {
      c.optimizer.max_iter = static_cast<int>(parse_integer(f, t));
    };
    return s;
  }();
  return table;
}

void set_field(Config& config, const std::string& dotted, const std::string& value) {
  const auto it = setters().find(dotted);
  if (it == setters().end()) throw ConfigError(dotted + ": unknown configuration field");
  it->second(config, dotted, value);
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

SourceBounds Config::bounds() const {
  if (source_bounds) return *source_bounds;
  return bounds_from_extinction(protocol.mu_A, protocol.mu_B, protocol.extinction_ratio_db);
}

ValidationReport Config::validate() const {
  ValidationReport report = scsqkd::validate(protocol, channel, bounds());
  auto add = [&](const char* field, const char* message) { report.violations.push_back({field, message}); };
  if (!phaselock.timing.valid()) add("phaselock.frame_us", "frame segments must be positive and sum to frame_us");
  if (!phaselock.model.valid()) add("phaselock.C0", "need C0 > 0, Cd >= 0, V_pi > 0, v_max - v_min > 2.5 V_pi");
  if (phaselock.drift.sigma_rad_per_sqrt_s < 0.0) add("phaselock.sigma_rad_per_sqrt_s", "must be >= 0");
  if (!(phaselock.sample_interval_s > 0.0)) add("phaselock.sample_interval_s", "must be > 0");
  if (!(phaselock.e_floor >= 0.0 && phaselock.e_floor <= 1.0)) add("phaselock.e_floor", "out of [0,1]");
  if (!(phaselock.qber.bin_s > 0.0)) add("phaselock.qber_bin_s", "must be > 0");
  if (phaselock.qber.detections_per_bin < 0.0) add("phaselock.detections_per_bin", "must be >= 0");
  if (optimizer.mu_points < 8 || optimizer.px_points < 8) add("optimizer.mu_points", "need >= 8 points per axis");
  if (!(optimizer.mu_min > 0.0 && optimizer.mu_min < optimizer.mu_max && optimizer.mu_max <= 0.5)) {
    add("optimizer.mu_max", "need 0 < mu_min < mu_max <= 0.5");
  }
  return report;
}

Config parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  Config config;
  // The dark-count rate converts with the clock, so the clock is applied first.
  if (auto clock = tree.get_optional<std::string>("channel.clock_hz")) set_field(config, "channel.clock_hz", *clock);

  std::optional<std::string> p_o;
  std::set<std::string> bound_keys;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(section + ": key outside of a section");
    for (const auto& [key, value] : body) {
      const std::string dotted = section + "." + key;
      if (dotted == "protocol.p_o") {
        p_o = value.data();
        continue;
      }
      if (section == "source_bounds") bound_keys.insert(key);
      set_field(config, dotted, value.data());
    }
  }
  if (!bound_keys.empty() && bound_keys.size() != 4) {
    throw ConfigError("source_bounds: a0, a_o0, b0 and b_o0 must be given together");
  }
  if (p_o) {
    const double value = parse_number("protocol.p_o", *p_o);
    if (std::abs(value - config.protocol.p_o()) > 1e-12) throw ConfigError("protocol.p_o: must equal 1 - p_x");
  }

  const ValidationReport report = config.validate();
  if (!report.ok()) throw ConfigError(report.to_string());
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const Config& c) {
  pt::ptree tree;
  auto put = [&](const std::string& key, double value) { tree.put(pt::ptree::path_type(key, '.'), format_number(value)); };
  auto put_int = [&](const std::string& key, long long value) { tree.put(key, std::to_string(value)); };

  const ProtocolParams& p = c.protocol;
  put("protocol.mu_A", p.mu_A);
  put("protocol.mu_B", p.mu_B);
  put("protocol.p_x", p.p_x);
  put("protocol.N", p.N);
  put("protocol.f_ec", p.f_ec);
  put_int("protocol.d", p.d);
  put("protocol.eps_coh", p.eps_coh);
  put("protocol.eps_split_cor", p.eps_split.cor);
  put("protocol.eps_split_pa", p.eps_split.pa);
  put("protocol.eps_split_bar", p.eps_split.bar);
  put("protocol.eps_split_3eps", p.eps_split.three_eps);
  put("protocol.intensity_fluct", p.intensity_fluct);
  put("protocol.extinction_ratio_db", p.extinction_ratio_db);

  const ChannelParams& ch = c.channel;
  put("channel.distance_km", ch.distance_km);
  put("channel.atten_db_per_km", ch.atten_db_per_km);
  put("channel.extra_loss_db", ch.extra_loss_db);
  put("channel.det_efficiency", ch.det_efficiency);
  put("channel.P_dc", ch.P_dc);
  put("channel.e_d", ch.e_d);
  put("channel.clock_hz", ch.clock_hz);
  put("channel.duty_cycle", ch.duty_cycle);

  if (c.source_bounds) {
    put("source_bounds.a0", c.source_bounds->a0);
    put("source_bounds.a_o0", c.source_bounds->a_o0);
    put("source_bounds.b0", c.source_bounds->b0);
    put("source_bounds.b_o0", c.source_bounds->b_o0);
  }

  const PhaseLockConfig& pl = c.phaselock;
  put("phaselock.frame_us", pl.timing.frame_us);
  put("phaselock.reference_us", pl.timing.reference_us);
  put("phaselock.quantum_us", pl.timing.quantum_us);
  put("phaselock.recovery_us", pl.timing.recovery_us);
  put("phaselock.C0", pl.model.C0);
  put("phaselock.Cd", pl.model.Cd);
  put("phaselock.V_pi", pl.model.V_pi);
  put("phaselock.v_min", pl.model.v_min);
  put("phaselock.v_max", pl.model.v_max);
  put("phaselock.sigma_rad_per_sqrt_s", pl.drift.sigma_rad_per_sqrt_s);
  put_int("phaselock.drift_seed", static_cast<long long>(pl.drift.seed));
  put_int("phaselock.seed", static_cast<long long>(pl.seed));
  put("phaselock.sample_interval_s", pl.sample_interval_s);
  put("phaselock.e_floor", pl.e_floor);
  put("phaselock.qber_bin_s", pl.qber.bin_s);
  put("phaselock.detections_per_bin", pl.qber.detections_per_bin);

  const GridSpec& g = c.optimizer;
  put_int("optimizer.mu_points", g.mu_points);
  put_int("optimizer.px_points", g.px_points);
  put("optimizer.mu_min", g.mu_min);
  put("optimizer.mu_max", g.mu_max);
  tree.put("optimizer.log_mu", g.log_mu ? "true" : "false");
  put("optimizer.rel_tol", g.rel_tol);
  put_int("optimizer.max_iter", g.max_iter);

  pt::write_ini(out, tree);
}

void apply_override(Config& config, const std::string& dotted_key, const std::string& value) {
  if (dotted_key == "protocol.p_o") {
    config.protocol.p_x = 1.0 - parse_number(dotted_key, value);
    return;
  }
  set_field(config, dotted_key, value);
}

}  // namespace scsqkd
