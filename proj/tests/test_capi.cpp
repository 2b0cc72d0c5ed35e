// Exercises the C interface through the shared library exactly as an
// external caller would: only vlaser.h, no internal headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "vlaser.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config handles carry defaults and round-trip keys") {
  vlaser_config* cfg = vlaser_config_new();
  REQUIRE(cfg != nullptr);
  char buf[64];
  REQUIRE(vlaser_config_get(cfg, "mode", buf, sizeof buf) == VLASER_OK);
  CHECK(std::string(buf) == "steady");
  REQUIRE(vlaser_config_get(cfg, "omega_p", buf, sizeof buf) == VLASER_OK);
  CHECK(std::string(buf) == "11.832159566199232");

  CHECK(vlaser_config_set(cfg, "omega_p", "4.25") == VLASER_OK);
  REQUIRE(vlaser_config_get(cfg, "omega_p", buf, sizeof buf) == VLASER_OK);
  CHECK(std::string(buf) == "4.25");

  CHECK(vlaser_config_set(cfg, "bogus", "1") == VLASER_ERR_PARSE);
  CHECK(std::strlen(vlaser_last_error()) > 0);
  CHECK(vlaser_config_set(cfg, "omega_p", "abc") == VLASER_ERR_PARSE);
  CHECK(vlaser_config_set(cfg, "omega_p", "1.5") == VLASER_OK);
  CHECK(std::strlen(vlaser_last_error()) == 0);  // success clears the message

  char tiny[3];
  CHECK(vlaser_config_get(cfg, "omega_p", tiny, sizeof tiny) ==
        VLASER_ERR_INVALID_ARGUMENT);
  vlaser_config_free(cfg);
  vlaser_config_free(nullptr);  // must be a no-op
}

TEST_CASE("string parsing reports malformed text without leaking handles") {
  vlaser_config* cfg = nullptr;
  CHECK(vlaser_config_parse_string("omega_p = 5\nmode = floquet\n", &cfg) ==
        VLASER_OK);
  REQUIRE(cfg != nullptr);
  char buf[32];
  REQUIRE(vlaser_config_get(cfg, "mode", buf, sizeof buf) == VLASER_OK);
  CHECK(std::string(buf) == "floquet");
  vlaser_config_free(cfg);

  cfg = reinterpret_cast<vlaser_config*>(0x1);  // must be overwritten with NULL
  CHECK(vlaser_config_parse_string("omega_p 5\n", &cfg) == VLASER_ERR_PARSE);
  CHECK(cfg == nullptr);
  CHECK(vlaser_config_parse_file("definitely_missing.conf", &cfg) ==
        VLASER_ERR_IO);
  CHECK(vlaser_config_parse_string(nullptr, &cfg) == VLASER_ERR_INVALID_ARGUMENT);
  CHECK(vlaser_config_parse_string("x = 1", nullptr) ==
        VLASER_ERR_INVALID_ARGUMENT);
}

TEST_CASE("closed-form estimates match their pinned values") {
  vlaser_config* cfg = vlaser_config_new();
  vlaser_estimates_result r{};
  REQUIRE(vlaser_estimates(cfg, &r) == VLASER_OK);
  CHECK(r.gamma_eff == doctest::Approx(1.174255371093750e-4).epsilon(1e-12));
  CHECK(r.threshold_population ==
        doctest::Approx(1.660626851707469e-1).epsilon(1e-12));
  CHECK(r.ac_stark_shift == doctest::Approx(8.229492187500000).epsilon(1e-12));
  CHECK(r.qualitative_threshold_n == 6643.0);
  vlaser_config_free(cfg);
}

TEST_CASE("single-point solvers work through the C surface") {
  vlaser_config* cfg = vlaser_config_new();

  vlaser_steady_result st{};
  REQUIRE(vlaser_solve_steady(cfg, &st) == VLASER_OK);
  CHECK(st.converged == 1);
  CHECK(st.re_alpha == doctest::Approx(-3.80457).epsilon(1e-4));
  CHECK(st.rho_gg + st.rho_ee + st.rho_aa == doctest::Approx(1.0).epsilon(1e-10));

  vlaser_stability_result sb{};
  REQUIRE(vlaser_solve_stability(cfg, &sb) == VLASER_OK);
  CHECK(sb.unstable == 1);
  CHECK(sb.re_s0 == doctest::Approx(0.144663).epsilon(1e-4));

  vlaser_floquet_result fl{};
  REQUIRE(vlaser_solve_floquet(cfg, &fl) == VLASER_OK);
  CHECK(fl.is_lasing == 1);
  CHECK(fl.converged == 1);
  CHECK(fl.abs_alpha_p1 == doctest::Approx(58.0056022778).epsilon(1e-6));
  CHECK(fl.omega == doctest::Approx(195.926896244).epsilon(1e-6));
  CHECK(fl.avg_intensity == doctest::Approx(3391.93373).epsilon(1e-5));

  REQUIRE(vlaser_config_set(cfg, "threshold_lo", "8000") == VLASER_OK);
  REQUIRE(vlaser_config_set(cfg, "threshold_hi", "14000") == VLASER_OK);
  double nc = 0.0;
  REQUIRE(vlaser_threshold(cfg, &nc) == VLASER_OK);
  CHECK(nc == doctest::Approx(10687.3).epsilon(1e-3));

  CHECK(vlaser_solve_steady(nullptr, &st) == VLASER_ERR_INVALID_ARGUMENT);
  CHECK(vlaser_solve_steady(cfg, nullptr) == VLASER_ERR_INVALID_ARGUMENT);
  vlaser_config_free(cfg);
}

TEST_CASE("vlaser_run writes the configured output file") {
  vlaser_config* cfg = nullptr;
  REQUIRE(vlaser_config_parse_string(
              "mode = estimates\nout = capi_run_tmp.csv\n", &cfg) == VLASER_OK);
  REQUIRE(vlaser_run(cfg) == VLASER_OK);
  const std::string text = slurp("capi_run_tmp.csv");
  CHECK(text.rfind("gamma_eff,threshold_population,ac_stark_shift,"
                   "qualitative_threshold_n\n", 0) == 0);
  std::remove("capi_run_tmp.csv");
  vlaser_config_free(cfg);

  REQUIRE(vlaser_config_parse_string(
              "mode = estimates\nout = capi_run_tmp.json\nformat = json\n",
              &cfg) == VLASER_OK);
  REQUIRE(vlaser_run(cfg) == VLASER_OK);
  const std::string js = slurp("capi_run_tmp.json");
  CHECK(js.find("\"estimates\"") != std::string::npos);
  std::remove("capi_run_tmp.json");
  vlaser_config_free(cfg);
}

TEST_CASE("invalid physics surfaces as INVALID_ARGUMENT with a message") {
  vlaser_config* cfg = vlaser_config_new();
  // bypassable only through the C++ layer, so drive it with a bad mode combo
  REQUIRE(vlaser_config_set(cfg, "mode", "sweep2d") == VLASER_OK);
  CHECK(vlaser_run(cfg) == VLASER_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vlaser_last_error()) > 0);
  vlaser_config_free(cfg);
}

TEST_CASE("status names are stable strings") {
  CHECK(std::string(vlaser_status_name(VLASER_OK)) == "VLASER_OK");
  CHECK(std::string(vlaser_status_name(VLASER_ERR_PARSE)) == "VLASER_ERR_PARSE");
  CHECK(std::string(vlaser_status_name(static_cast<vlaser_status>(99))) ==
        "VLASER_STATUS_UNKNOWN");
}
