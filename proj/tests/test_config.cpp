#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "scsqkd/config.hpp"
#include "scsqkd/errors.hpp"

using namespace scsqkd;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string dump(const Config& c) {
  std::ostringstream out;
  write_config(out, c);
  return out.str();
}

}  // namespace

TEST_CASE("empty file gives defaults") {
  const Config c = parse("");
  CHECK(c.protocol.N == 1e13);
  CHECK(c.channel.det_efficiency == 0.69);
  CHECK_FALSE(c.source_bounds.has_value());
  CHECK(c.optimizer.mu_points == 32);
}

TEST_CASE("write then read is the identity") {
  Config c = parse("[protocol]\nmu_A = 0.0031\nmu_B = 0.0031\np_x = 0.3\nextinction_ratio_db = 35.7\n"
                   "[channel]\ne_d = 0.0278106689453125\n"
                   "[source_bounds]\na0 = 0.99\na_o0 = 0.9999\nb0 = 0.98\nb_o0 = 1\n"
                   "[phaselock]\ne_floor = 0.04\n[optimizer]\nlog_mu = false\nmu_points = 9\n");
  const std::string once = dump(c);
  const Config back = parse(once);
  CHECK(dump(back) == once);
  CHECK(back.channel.e_d == 0.0278106689453125);
  CHECK(back.source_bounds->a_o0 == 0.9999);
  CHECK_FALSE(back.optimizer.log_mu);
  CHECK(back.phaselock.e_floor == 0.04);
  // default infinite extinction survives the round trip too
  const std::string defaults = dump(Config{});
  CHECK(dump(parse(defaults)) == defaults);
}

TEST_CASE("malformed and unknown input is rejected") {
  CHECK_THROWS_AS(parse("[protocol\nmu_A = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[protocol]\nmu_A = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse("[protocol]\nmu_C = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[protocol]\np_x = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("[optimizer]\nmu_points = 4\n"), ConfigError);
}

TEST_CASE("p_o must agree with p_x") {
  CHECK_NOTHROW(parse("[protocol]\np_x = 0.3\np_o = 0.7\n"));
  CHECK_THROWS_AS(parse("[protocol]\np_x = 0.3\np_o = 0.6\n"), ConfigError);
}

TEST_CASE("source bounds come as a set") {
  CHECK_THROWS_AS(parse("[source_bounds]\na0 = 0.99\n"), ConfigError);
  CHECK_THROWS_AS(parse("[source_bounds]\na0 = 0.3\na_o0 = 1\nb0 = 0.99\nb_o0 = 1\n"), ConfigError);
}

TEST_CASE("dark count rate converts with the clock") {
  const Config c = parse("[channel]\ndark_rate_hz = 0.1\nclock_hz = 1e9\n");
  CHECK(c.channel.P_dc == doctest::Approx(1e-10));
}

TEST_CASE("dotted overrides") {
  Config c;
  apply_override(c, "channel.distance_km", "150");
  apply_override(c, "optimizer.px_points", "16");
  CHECK(c.channel.distance_km == 150);
  CHECK(c.optimizer.px_points == 16);
  CHECK_THROWS_AS(apply_override(c, "channel.nope", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "channel.e_d", "x"), ConfigError);
}

TEST_CASE("shipped presets load") {
  for (const char* name : {"scs_100km_N1e12.ini", "scs_150km_N1e13.ini", "scs_200km_N1e13.ini"}) {
    CAPTURE(name);
    const Config c = load_config(std::string(SCSQKD_CONFIG_DIR) + "/" + name);
    CHECK(c.validate().ok());
    CHECK(c.channel.P_dc == doctest::Approx(8e-11));
    CHECK(c.channel.e_d > 0.02);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1e13, 8e-11, 0.026664733886718757}) CHECK(std::stod(format_number(v)) == v);
}
