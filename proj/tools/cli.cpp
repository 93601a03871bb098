#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "scsqkd/channel.hpp"
#include "scsqkd/config.hpp"
#include "scsqkd/errors.hpp"
#include "scsqkd/keyrate.hpp"
#include "scsqkd/optimizer.hpp"
#include "scsqkd/phaselock.hpp"

namespace scsqkd::cli {

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  long long seed = -1;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("-c,--config", common.config_path, "INI configuration file")->required();
  cmd->add_option("--set", common.overrides, "Override a field, e.g. --set channel.distance_km=150");
  cmd->add_option("-o,--out", common.out_path, "CSV output file");
  cmd->add_option("--seed", common.seed, "Random seed (phase-lock shot noise)");
}

Config load(const Common& common) {
  Config config = load_config(common.config_path);
  for (const auto& assignment : common.overrides) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment + ": expected section.key=value");
    apply_override(config, assignment.substr(0, eq), assignment.substr(eq + 1));
  }
  if (common.seed >= 0) config.phaselock.seed = static_cast<std::uint64_t>(common.seed);
  const ValidationReport report = config.validate();
  if (!report.ok()) throw ConfigError(report.to_string());
  return config;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  file << std::setprecision(10);
  return file;
}

void line(std::ostream& out, const std::string& name, double value, const std::string& unit = "") {
  out << "  " << std::left << std::setw(26) << name << std::right << std::setw(16) << std::setprecision(8) << value;
  if (!unit.empty()) out << "  " << unit;
  out << '\n';
}

void print_report(std::ostream& out, const KeyRateReport& r) {
  out << "observed statistics\n";
  line(out, "n_Z", r.stats.n_Z);
  line(out, "n_O", r.stats.n_O);
  line(out, "n_B", r.stats.n_B);
  line(out, "M_S", r.stats.M_S);
  line(out, "E_t", r.stats.E_t);
  out << "phase error\n";
  line(out, "mu_A (equivalent)", r.mu_A);
  line(out, "mu_B (equivalent)", r.mu_B);
  line(out, "<n_O>^U", r.n_O_exp_U);
  line(out, "<n_B>^U", r.n_B_exp_U);
  line(out, "<N_ph>", r.N_ph_expected);
  line(out, "N_ph upper", r.N_ph_bar);
  line(out, "e_ph", r.e_ph);
  out << "key length terms (bits)\n";
  line(out, "n_Z [1 - H(e_ph)]", r.cost.leading);
  line(out, "f M_S H(E_t)", r.cost.error_correction);
  line(out, "log2(2/eps_cor)", r.cost.correctness);
  line(out, "2 log2(1/eps_PA)", r.cost.privacy_amplification);
  line(out, "7 sqrt(n_Z log2(2/eps))", r.cost.smoothing);
  line(out, "postselection", r.cost.postselection);
  out << "rates\n";
  line(out, "R", r.R, "bits/window");
  line(out, "R_coh", r.R_coh, "bits/window");
  line(out, "skr", r.skr_bps, "bps");
  line(out, "log10 eps_coh", r.eps_coh.ln / std::log(10.0));
}

void write_report_csv(const std::string& path, const KeyRateReport& r) {
  auto file = open_csv(path);
  file << "n_Z,n_O,n_B,M_S,E_t,mu_A,mu_B,n_O_exp_U,n_B_exp_U,N_ph_expected,N_ph_bar,e_ph,"
          "leading,error_correction,correctness,privacy_amplification,smoothing,postselection,R,R_coh,skr_bps\n";
  file << r.stats.n_Z << ',' << r.stats.n_O << ',' << r.stats.n_B << ',' << r.stats.M_S << ',' << r.stats.E_t << ','
       << r.mu_A << ',' << r.mu_B << ',' << r.n_O_exp_U << ',' << r.n_B_exp_U << ',' << r.N_ph_expected << ','
       << r.N_ph_bar << ',' << r.e_ph << ',' << r.cost.leading << ',' << r.cost.error_correction << ','
       << r.cost.correctness << ',' << r.cost.privacy_amplification << ',' << r.cost.smoothing << ','
       << r.cost.postselection << ',' << r.R << ',' << r.R_coh << ',' << r.skr_bps << '\n';
}

int cmd_keyrate(const Common& common, std::ostream& out) {
  const Config config = load(common);
  const KeyRateReport report = evaluate(config.protocol, config.channel, config.bounds());
  out << "distance " << config.channel.distance_km << " km, total loss " << total_loss_db(config.channel)
      << " dB, N = " << config.protocol.N << '\n';
  print_report(out, report);
  if (!common.out_path.empty()) write_report_csv(common.out_path, report);
  return report.R_coh > 0.0 ? kOk : kZeroRate;
}

int cmd_sweep(const Common& common, double dmin, double dmax, double step, std::ostream& out) {
  if (!(step > 0.0) || !(dmin <= dmax) || dmin < 0.0) {
    throw ConfigError("sweep range: need 0 <= dmin <= dmax and step > 0");
  }
  const Config config = load(common);
  std::vector<double> distances;
  for (long long i = 0;; ++i) {
    const double d = dmin + static_cast<double>(i) * step;
    if (d > dmax + 1e-9 * step) break;
    distances.push_back(d);
  }
  const auto rows = sweep(config.channel, distances, config.protocol, config.optimizer);

  std::ostringstream csv;
  csv << std::setprecision(10) << "distance_km,mu,p_x,R,R_coh,skr_bps,e_ph,n_Z\n";
  for (const auto& r : rows) {
    csv << r.distance_km << ',' << r.mu << ',' << r.p_x << ',' << r.R << ',' << r.R_coh << ',' << r.skr_bps << ','
        << r.e_ph << ',' << r.n_Z << '\n';
  }
  if (common.out_path.empty()) {
    out << csv.str();
  } else {
    open_csv(common.out_path) << csv.str();
    out << "wrote " << rows.size() << " rows to " << common.out_path << '\n';
  }
  return kOk;
}

int cmd_optimize(const Common& common, double calibrate_e_ph, std::ostream& out) {
  Config config = load(common);
  if (calibrate_e_ph > 0.0) {
    config.channel.e_d = calibrate_misalignment(config.channel, config.protocol, config.optimizer, calibrate_e_ph);
    out << "calibrated e_d " << format_number(config.channel.e_d) << " for e_ph " << calibrate_e_ph << '\n';
  }
  try {
    const Optimum opt = optimize(config.channel, config.protocol, config.optimizer);
    out << "best mu " << format_number(opt.params.mu_A) << '\n';
    out << "best p_x " << format_number(opt.params.p_x) << '\n';
    print_report(out, opt.report);
    if (!common.out_path.empty()) write_report_csv(common.out_path, opt.report);
    return kOk;
  } catch (const NoPositiveRate& e) {
    out << "no positive rate: " << e.what() << '\n';
    return kZeroRate;
  }
}

int cmd_phaselock(const Common& common, const std::string& pattern, double duration, bool qber, std::ostream& out) {
  auto segments = parse_pattern(pattern);
  double cycle = 0.0;
  for (const auto& s : segments) cycle += s.second;
  if (duration < 0.0) duration = cycle;
  if (duration > 3600.0) throw ConfigError("phaselock duration must be <= 3600 s");
  const Config config = load(common);
  const PhaseLockConfig& pl = config.phaselock;
  FrameTiming timing = pl.timing;
  timing.clock_hz = config.channel.clock_hz;

  std::ostringstream csv;
  csv << std::setprecision(10);
  std::size_t rows = 0;
  if (qber) {
    csv << "time_s,qber\n";
    for (const auto& p : qber_trace(duration, timing, pl.model, pl.drift, pl.e_floor, pl.seed, pl.qber)) {
      csv << p.time_s << ',' << p.qber << '\n';
      ++rows;
    }
  } else {
    csv << "time_s,counts,phi_residual_rad,v_applied,feedback\n";
    PhaseLockSimulator sim(timing, pl.model, pl.drift, pl.seed);
    double remaining = duration;
    // The pattern repeats until the requested duration is covered.
    for (std::size_t i = 0; remaining > 0.0 && cycle > 0.0; i = (i + 1) % segments.size()) {
      const double length = std::min(segments[i].second, remaining);
      remaining -= length;
      for (const auto& p : sim.run(length, segments[i].first, pl.sample_interval_s)) {
        csv << p.time_s << ',' << p.counts << ',' << p.phi_residual << ',' << p.v_applied << ','
            << (p.enabled ? "on" : "off") << '\n';
        ++rows;
      }
    }
  }
  if (common.out_path.empty()) {
    out << csv.str();
  } else {
    open_csv(common.out_path) << csv.str();
    out << "wrote " << rows << " rows to " << common.out_path << '\n';
  }
  return kOk;
}

}  // namespace

std::vector<std::pair<bool, double>> parse_pattern(const std::string& pattern) {
  std::vector<std::pair<bool, double>> segments;
  std::stringstream in(pattern);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("pattern segment '" + item + "' lacks ':'");
    const std::string mode = item.substr(0, colon);
    if (mode != "on" && mode != "off") throw std::invalid_argument("pattern mode must be on or off, got '" + mode + "'");
    std::size_t used = 0;
    double seconds = 0.0;
    try {
      seconds = std::stod(item.substr(colon + 1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("pattern duration in '" + item + "' is not a number");
    }
    if (used != item.size() - colon - 1 || !(seconds >= 0.0)) {
      throw std::invalid_argument("pattern duration in '" + item + "' must be a number >= 0");
    }
    segments.emplace_back(mode == "on", seconds);
  }
  if (segments.empty()) throw std::invalid_argument("empty on/off pattern");
  return segments;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-key key rates, parameter optimization and phase-lock simulation for side-channel-secure QKD"};
  app.require_subcommand(1);

  Common common;
  auto* keyrate = app.add_subcommand("keyrate", "Key-rate report at the configured parameters");
  add_common(keyrate, common);

  double dmin = 0.0, dmax = 400.0, step = 10.0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Optimized key rate versus distance, as CSV");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--dmin", dmin, "First distance (km)");
  sweep_cmd->add_option("--dmax", dmax, "Last distance (km)");
  sweep_cmd->add_option("--step", step, "Distance step (km)");

  double calibrate = 0.0;
  auto* optimize_cmd = app.add_subcommand("optimize", "Optimize (mu, p_x) for the configured channel");
  add_common(optimize_cmd, common);
  optimize_cmd->add_option("--calibrate-eph", calibrate,
                           "First choose e_d so that the optimized phase-flip error bound equals this value");

  std::string pattern = "on:60,off:60";
  double duration = -1.0;
  bool qber = false;
  auto* phaselock = app.add_subcommand("phaselock", "Phase-compensation loop trace, as CSV");
  add_common(phaselock, common);
  phaselock->add_option("--pattern", pattern, "Feedback on/off schedule, e.g. on:60,off:60");
  phaselock->add_option("--duration", duration, "Total seconds (pattern repeats); default one pattern cycle");
  phaselock->add_flag("--qber", qber, "Emit the 10 s binned QBER trace instead of detector counts");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (keyrate->parsed()) return cmd_keyrate(common, out);
    if (sweep_cmd->parsed()) return cmd_sweep(common, dmin, dmax, step, out);
    if (optimize_cmd->parsed()) return cmd_optimize(common, calibrate, out);
    if (phaselock->parsed()) return cmd_phaselock(common, pattern, duration, qber, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace scsqkd::cli
