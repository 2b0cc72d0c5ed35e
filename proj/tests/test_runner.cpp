#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/estimates.hpp"
#include "core/stability.hpp"
#include "io/runner.hpp"
#include "support.hpp"

using namespace vlaser;

namespace {

// Column lookup by name so the tests stay readable if schemas grow.
double col(const Dataset& d, std::size_t row, const std::string& name) {
  for (std::size_t i = 0; i < d.columns.size(); ++i)
    if (d.columns[i] == name) {
      REQUIRE(d.rows[row][i].present);
      return d.rows[row][i].value;
    }
  FAIL("no column named ", name);
  return 0.0;
}

bool cell_empty(const Dataset& d, std::size_t row, const std::string& name) {
  for (std::size_t i = 0; i < d.columns.size(); ++i)
    if (d.columns[i] == name) return !d.rows[row][i].present;
  FAIL("no column named ", name);
  return false;
}

}  // namespace

TEST_CASE("csv serialization uses 12 significant digits and empty cells") {
  Dataset d;
  d.mode = "demo";
  d.columns = {"a", "b", "c"};
  d.add_row({1.0 / 3.0, Cell(), -2.5e-7});
  d.add_row({std::nan(""), 42.0, 0.0});
  CHECK(d.to_csv() ==
        "a,b,c\n"
        "0.333333333333,,-2.5e-07\n"
        "nan,42,0\n");
  CHECK_THROWS_AS(d.add_row({1.0}), ValidationError);
}

TEST_CASE("json serialization mirrors the table with null for gaps") {
  Dataset d;
  d.mode = "demo";
  d.columns = {"x", "y"};
  d.add_row({1.5, Cell()});
  d.add_row({std::nan(""), 2.0});
  const nlohmann::json j = nlohmann::json::parse(d.to_json());
  CHECK(j["mode"] == "demo");
  CHECK(j["columns"] == nlohmann::json({"x", "y"}));
  CHECK(j["rows"][0][0] == 1.5);
  CHECK(j["rows"][0][1].is_null());
  CHECK(j["rows"][1][0].is_null());  // NaN is not representable in JSON
  CHECK(j["rows"][1][1] == 2.0);
}

TEST_CASE("dataset write round-trips through a file") {
  Dataset d;
  d.mode = "demo";
  d.columns = {"v"};
  d.add_row({7.25});
  const std::string path = "runner_write_tmp.csv";
  d.write(path, "csv");
  std::ifstream in(path, std::ios::binary);
  std::ostringstream got;
  got << in.rdbuf();
  CHECK(got.str() == d.to_csv());
  std::remove(path.c_str());
  CHECK_THROWS_AS(d.write("no/such/dir/out.csv", "csv"), IoError);
}

TEST_CASE("estimates mode reproduces the closed-form report") {
  RunConfig cfg;
  cfg.mode = "estimates";
  const Dataset d = run_config(cfg);
  const EstimateReport r = estimate_report(cfg.params);
  REQUIRE(d.rows.size() == 1);
  CHECK(col(d, 0, "gamma_eff") == r.gamma_eff);
  CHECK(col(d, 0, "threshold_population") == r.threshold_population);
  CHECK(col(d, 0, "ac_stark_shift") == r.ac_stark_shift);
  CHECK(col(d, 0, "qualitative_threshold_n") == r.qualitative_threshold_n);
}

TEST_CASE("steady mode emits the stationary solution") {
  RunConfig cfg;
  cfg.mode = "steady";
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 1);
  const NonLasingSolution sol = solve_nonlasing(cfg.params);
  CHECK(col(d, 0, "re_alpha") == doctest::Approx(sol.alpha_ss.real()));
  CHECK(col(d, 0, "rho_ee") == doctest::Approx(sol.rho_ss(1, 1).real()));
  CHECK(col(d, 0, "converged") == 1.0);
  const double trace =
      col(d, 0, "rho_gg") + col(d, 0, "rho_ee") + col(d, 0, "rho_aa");
  CHECK(trace == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("stability mode reports the dominant dispersion root") {
  RunConfig cfg;
  cfg.mode = "stability";
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 1);
  CHECK(col(d, 0, "re_s0") == doctest::Approx(0.144663).epsilon(1e-4));
  CHECK(std::abs(col(d, 0, "im_s0")) == doctest::Approx(193.755).epsilon(1e-4));
  CHECK(col(d, 0, "unstable") == 1.0);
  CHECK(col(d, 0, "n_roots") >= 1.0);
}

TEST_CASE("threshold mode bisects the instability edge in atom number") {
  RunConfig cfg;
  cfg.mode = "threshold";
  cfg.threshold.lo = 8000.0;
  cfg.threshold.hi = 14000.0;
  const Dataset d = run_config(cfg);
  CHECK(col(d, 0, "critical_value") == doctest::Approx(10687.3).epsilon(1e-3));
}

TEST_CASE("floquet mode emits lasing harmonics or an empty frequency") {
  RunConfig cfg;
  cfg.mode = "floquet";
  SUBCASE("above threshold") {
    const Dataset d = run_config(cfg);
    CHECK(col(d, 0, "is_lasing") == 1.0);
    CHECK(col(d, 0, "abs_alpha_p1") == doctest::Approx(58.0056).epsilon(1e-4));
    CHECK(col(d, 0, "omega") == doctest::Approx(195.9269).epsilon(1e-5));
    CHECK(col(d, 0, "avg_intensity") == doctest::Approx(3391.93).epsilon(1e-4));
    CHECK(col(d, 0, "converged") == 1.0);
  }
  SUBCASE("below threshold the frequency cell is empty") {
    cfg.params.delta_p = 10.0;
    cfg.params.omega_p = 2.0;
    const Dataset d = run_config(cfg);
    CHECK(col(d, 0, "is_lasing") == 0.0);
    CHECK(col(d, 0, "abs_alpha_p1") == 0.0);
    CHECK(cell_empty(d, 0, "omega"));
    CHECK(col(d, 0, "avg_intensity") ==
          doctest::Approx(col(d, 0, "abs_alpha_0") * col(d, 0, "abs_alpha_0")));
  }
}

TEST_CASE("trajectory mode samples on the requested stride") {
  RunConfig cfg;
  cfg.mode = "trajectory";
  cfg.trajectory_time = 10.0;
  cfg.sample_stride = 2.5;
  cfg.params.n_atoms = 500;  // light load
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 5);
  CHECK(col(d, 0, "t") == 0.0);
  CHECK(col(d, 4, "t") == doctest::Approx(10.0));
  CHECK(col(d, 2, "drive") == doctest::Approx(cfg.params.omega_p));
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const double tr =
        col(d, i, "rho_gg") + col(d, i, "rho_ee") + col(d, i, "rho_aa");
    CHECK(tr == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("ramped drive column follows the triangle") {
    cfg.trajectory_ramped = true;
    cfg.ramp.param = "omega_p";
    cfg.ramp.rate = 0.5;
    cfg.ramp.time = 5.0;  // peak 2.5 at t = 5
    const Dataset r = run_config(cfg);
    CHECK(col(r, 0, "drive") == doctest::Approx(0.0));
    CHECK(col(r, 2, "drive") == doctest::Approx(2.5));
    CHECK(col(r, 4, "drive") == doctest::Approx(0.0));
  }
}

TEST_CASE("ramp mode returns branches plus balance and stability columns") {
  RunConfig cfg;
  cfg.mode = "ramp";
  cfg.params.n_atoms = 100;  // far below threshold: cheap and single-branch
  cfg.ramp.rate = 0.1;
  cfg.ramp.time = 20.0;
  cfg.ramp.grid = 5;
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 5);
  CHECK(col(d, 0, "value") == doctest::Approx(0.0));
  CHECK(col(d, 4, "value") == doctest::Approx(2.0));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::isfinite(col(d, i, "forward")));
    CHECK(col(d, i, "forward") >= 0.0);
    CHECK(col(d, i, "backward") >= 0.0);
    // at 100 atoms every sampled point is deep below threshold
    CHECK(col(d, i, "unstable") == 0.0);
    CHECK(col(d, i, "mffm_intensity") >= 0.0);
    CHECK(col(d, i, "mffm_intensity") < 1.0);
  }
}

TEST_CASE("stability sweep is row-major and worker-count independent") {
  RunConfig cfg;
  cfg.mode = "sweep2d";
  cfg.axis1 = {"n_atoms", 8000.0, 14000.0, 3};
  cfg.axis2 = {"omega_p", 8.0, 14.0, 3};
  const Dataset d1 = run_config(cfg);
  REQUIRE(d1.rows.size() == 9);
  CHECK(col(d1, 0, "axis1") == 8000.0);
  CHECK(col(d1, 1, "axis1") == 8000.0);
  CHECK(col(d1, 3, "axis1") == 11000.0);
  CHECK(col(d1, 1, "axis2") == 11.0);
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(col(d1, i, "unstable") == (col(d1, i, "re_s0") > 0.0 ? 1.0 : 0.0));

  cfg.workers = 3;
  const Dataset d3 = run_config(cfg);
  CHECK(d1.to_csv() == d3.to_csv());
  cfg.workers = 7;  // more workers than rows
  const Dataset d7 = run_config(cfg);
  CHECK(d1.to_csv() == d7.to_csv());
}

TEST_CASE("floquet sweep seeds along rows and leaves omega empty off-lasing") {
  RunConfig cfg;
  cfg.mode = "sweep2d";
  cfg.point_mode = "floquet";
  cfg.params.delta_p = 10.0;
  cfg.axis1 = {"n_atoms", 20000.0, 20000.0, 2};  // duplicated row value is fine
  cfg.axis2 = {"omega_p", 2.0, 15.0, 3};
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 6);
  CHECK(col(d, 0, "is_lasing") == 0.0);
  CHECK(cell_empty(d, 0, "omega"));
  CHECK(col(d, 2, "is_lasing") == 1.0);
  CHECK(col(d, 2, "omega") == doctest::Approx(205.459).epsilon(1e-4));
  CHECK(col(d, 2, "abs_alpha1_sq") ==
        doctest::Approx(118.0832416 * 118.0832416).epsilon(1e-4));
  // identical rows must produce identical cells regardless of threading
  cfg.workers = 2;
  const Dataset d2 = run_config(cfg);
  CHECK(d.to_csv() == d2.to_csv());
}

TEST_CASE("combined sweep keeps the stability and balance views consistent") {
  RunConfig cfg;
  cfg.mode = "sweep2d";
  cfg.point_mode = "both";
  cfg.params.delta_p = 10.0;
  cfg.axis1 = {"n_atoms", 15000.0, 20000.0, 2};
  cfg.axis2 = {"omega_p", 9.0, 15.0, 2};
  const Dataset d = run_config(cfg);
  REQUIRE(d.rows.size() == 4);
  REQUIRE(d.columns.size() == 10);
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    // every linearly unstable stationary point must actually lase
    if (col(d, i, "unstable") == 1.0) CHECK(col(d, i, "is_lasing") == 1.0);
    if (col(d, i, "is_lasing") == 1.0) {
      CHECK(col(d, i, "abs_alpha1_sq") > 1.0);
      CHECK(std::abs(col(d, i, "omega")) > 100.0);
    }
  }
}

TEST_CASE("sweep failures become gaps up to a quota, then abort") {
  RunConfig cfg;
  cfg.mode = "sweep2d";
  cfg.params.n_atoms = 500;
  SUBCASE("within quota: failed points carry NaN but the sweep completes") {
    cfg.axis1 = {"delta_p", 0.0, 1.0, 2};
    cfg.axis2 = {"kappa", -0.05, 0.85, 10};  // exactly one invalid column
    const Dataset d = run_config(cfg);
    REQUIRE(d.rows.size() == 20);
    CHECK(col(d, 0, "axis2") == doctest::Approx(-0.05));
    CHECK(std::isnan(col(d, 0, "re_s0")));
    CHECK(std::isfinite(col(d, 1, "re_s0")));
  }
  SUBCASE("beyond quota the sweep aborts") {
    cfg.axis1 = {"delta_p", 0.0, 1.0, 2};
    cfg.axis2 = {"kappa", -0.85, 0.05, 10};  // nine invalid columns of ten
    CHECK_THROWS_AS(run_config(cfg), SolverError);
  }
}

TEST_CASE("run_config validates before running") {
  RunConfig cfg;
  cfg.mode = "sweep2d";  // axes never configured
  CHECK_THROWS_AS(run_config(cfg), ValidationError);
  cfg.mode = "steady";
  cfg.params.kappa = -0.1;
  CHECK_THROWS_AS(run_config(cfg), ValidationError);
}
