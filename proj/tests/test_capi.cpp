// Exercises the shared-library surface the way an external consumer would:
// only geomatch.h, opaque handles and status codes.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "geomatch.h"

TEST_CASE("version and status strings") {
  CHECK(std::strlen(geomatch_version()) > 0);
  CHECK(std::string(geomatch_status_name(GEOMATCH_OK)) == "ok");
  CHECK(std::string(geomatch_status_name(GEOMATCH_ERR_NOT_ON_GRID)) == "not_on_grid");
}

TEST_CASE("closed forms") {
  CHECK(geomatch_offline_fraction(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(geomatch_offline_fraction(0.0) == 0.0);
  CHECK(geomatch_stationary_density(0.0, 1.0) == doctest::Approx(0.25));
  CHECK(geomatch_stationary_density(1.0 + std::log(2.0), 1.0) ==
        doctest::Approx(0.125));
  CHECK(geomatch_metric_total_length(0.5) == doctest::Approx(0.5));
  CHECK(geomatch_metric_total_length(1.5) == -1.0);
}

TEST_CASE("instance lifecycle through the C API") {
  geomatch_instance* inst = nullptr;
  CHECK(geomatch_instance_uniform(0, 0, 1.0, 0, GEOMATCH_TOPOLOGY_LINE, 1, 0, &inst) ==
        GEOMATCH_ERR_EMPTY_ENSEMBLE);
  CHECK(std::strlen(geomatch_last_error()) > 0);

  REQUIRE(geomatch_instance_uniform(500, 400, 1.5, 0, GEOMATCH_TOPOLOGY_LINE, 7, 3,
                                    &inst) == GEOMATCH_OK);
  CHECK(geomatch_instance_offline_count(inst) == 500);
  CHECK(geomatch_instance_online_count(inst) == 400);
  CHECK(geomatch_instance_n(inst) == 500);
  CHECK(geomatch_instance_k(inst) == 0);
  int unbounded = 1;
  CHECK(geomatch_instance_c(inst, &unbounded) == doctest::Approx(1.5));
  CHECK(unbounded == 0);
  CHECK(geomatch_instance_topology(inst) == GEOMATCH_TOPOLOGY_LINE);

  // Coordinates are sorted and inside [0,1].
  double prev = -1.0;
  for (uint64_t i = 0; i < 500; ++i) {
    double x = geomatch_instance_offline_coord(inst, i);
    CHECK(x >= prev);
    CHECK(x < 1.0);
    prev = x;
  }
  CHECK(geomatch_instance_offline_coord(inst, 500) == -1.0);

  std::string path =
      (std::filesystem::temp_directory_path() / "geomatch_capi_instance.txt").string();
  REQUIRE(geomatch_instance_save(inst, path.c_str()) == GEOMATCH_OK);
  geomatch_instance* back = nullptr;
  REQUIRE(geomatch_instance_load(path.c_str(), &back) == GEOMATCH_OK);
  CHECK(geomatch_instance_offline_count(back) == 500);
  CHECK(geomatch_instance_offline_coord(back, 123) ==
        geomatch_instance_offline_coord(inst, 123));
  std::filesystem::remove(path);
  geomatch_instance* missing = nullptr;
  CHECK(geomatch_instance_load(path.c_str(), &missing) == GEOMATCH_ERR_IO);

  geomatch_instance_free(back);
  geomatch_instance_free(inst);
}

TEST_CASE("rounded instances sit on the grid and glue a vertex at 0") {
  geomatch_instance* inst = nullptr;
  REQUIRE(geomatch_instance_rounded(300, 300, 1.0, 0, 8, 11, 0, &inst) == GEOMATCH_OK);
  CHECK(geomatch_instance_topology(inst) == GEOMATCH_TOPOLOGY_CIRCLE);
  CHECK(geomatch_instance_k(inst) == 8);
  CHECK(geomatch_instance_offline_coord(inst, 0) == 0.0);
  const double grid = 300.0 * 8.0;
  for (uint64_t i = 0; i < geomatch_instance_offline_count(inst); ++i) {
    double scaled = geomatch_instance_offline_coord(inst, i) * grid;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
  }
  geomatch_instance_free(inst);
}

TEST_CASE("matchings through the C API") {
  geomatch_instance* inst = nullptr;
  REQUIRE(geomatch_instance_uniform(400, 400, 1.0, 0, GEOMATCH_TOPOLOGY_LINE, 13, 0,
                                    &inst) == GEOMATCH_OK);

  geomatch_matching* optimum = nullptr;
  REQUIRE(geomatch_small_first(inst, &optimum) == GEOMATCH_OK);
  uint64_t brute = 0;
  REQUIRE(geomatch_brute_force_max_matching(inst, &brute) == GEOMATCH_OK);
  CHECK(geomatch_matching_kappa(optimum) == brute);

  geomatch_matching* online = nullptr;
  REQUIRE(geomatch_closest(inst, 0, &online) == GEOMATCH_OK);
  CHECK(geomatch_matching_kappa(online) <= brute);
  CHECK(geomatch_matching_edge_count(online) == geomatch_matching_kappa(online));
  uint32_t off = 0, onl = 0;
  double len = -1.0;
  REQUIRE(geomatch_matching_edge(online, 0, &off, &onl, &len) == GEOMATCH_OK);
  CHECK(len >= 0.0);
  CHECK(len < 1.0 / 400.0);
  CHECK(geomatch_matching_edge(online, 1u << 30, &off, &onl, &len) ==
        GEOMATCH_ERR_INVALID_ARGUMENT);
  CHECK(geomatch_matching_rho(online) > 0.0);

  geomatch_matching_free(online);
  geomatch_matching_free(optimum);
  geomatch_instance_free(inst);
}

TEST_CASE("generative walk through the C API") {
  uint64_t tau = 0;
  double p = -1.0, mf = -1.0;
  REQUIRE(geomatch_generative_walk(1e4, 1.0, 21, 0, &tau, &p, &mf) == GEOMATCH_OK);
  CHECK(tau > 1000);
  CHECK(p > 0.4);
  CHECK(p < 0.6);
  CHECK(mf == doctest::Approx(2.0 * p / (p + 1.0)));

  uint64_t tau2 = 0;
  double p2 = 0.0, mf2 = 0.0;
  REQUIRE(geomatch_generative_walk(1e4, 1.0, 21, 0, &tau2, &p2, &mf2) == GEOMATCH_OK);
  CHECK(tau2 == tau);
  CHECK(p2 == p);

  CHECK(geomatch_generative_walk(2.0, 1.0, 1, 0, &tau, &p, &mf) ==
        GEOMATCH_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fluid handles through the C API") {
  geomatch_fluid* fl = nullptr;
  REQUIRE(geomatch_fluid_create(16, 1.0, 0, 0, GEOMATCH_FLUID_CARDINALITY,
                                GEOMATCH_INIT_EXPONENTIAL, &fl) == GEOMATCH_OK);
  const double p = -std::expm1(-1.0 / 16.0);
  CHECK(geomatch_fluid_mass(fl) ==
        doctest::Approx(16.0 * p * std::exp(-1.0 / 16.0)).epsilon(1e-9));
  CHECK(geomatch_fluid_length_sum(fl) ==
        doctest::Approx(std::exp(-1.0 / 16.0)).epsilon(1e-9));
  CHECK(geomatch_fluid_second_moment(fl) > 0.4);

  REQUIRE(geomatch_fluid_integrate(fl, 0.5, 1e-3) == GEOMATCH_OK);
  CHECK(geomatch_fluid_time(fl) == doctest::Approx(0.5));
  CHECK(geomatch_fluid_matched_fraction(fl) > 0.3);
  CHECK(geomatch_fluid_kappa_prediction(fl) > 0.2);
  CHECK(geomatch_fluid_tail_mass(fl) >= -1e-12);
  geomatch_fluid_free(fl);

  CHECK(geomatch_fluid_create(16, 1.0, 0, 0, GEOMATCH_FLUID_CARDINALITY, 99, &fl) ==
        GEOMATCH_ERR_INVALID_ARGUMENT);
  REQUIRE(geomatch_fluid_create(8, 0.0, 1, 0, GEOMATCH_FLUID_METRIC,
                                GEOMATCH_INIT_NORMALIZED, &fl) == GEOMATCH_OK);
  CHECK(geomatch_fluid_integrate(fl, 1.0, 1e-3) == GEOMATCH_ERR_SINGULAR_TIME);
  geomatch_fluid_free(fl);
}

TEST_CASE("competitive ratio through the C API") {
  double ratio = 0.0;
  REQUIRE(geomatch_competitive_ratio(1.0, 8, 1e-3, 0, &ratio) == GEOMATCH_OK);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.05);
  CHECK(geomatch_competitive_ratio(-1.0, 8, 1e-3, 0, &ratio) ==
        GEOMATCH_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiments run from config text") {
  char* json = nullptr;
  REQUIRE(geomatch_run_experiment(
              "command=offline\nn=1000\nc=1\nreps=4\nseed=3\nassert=1\n", &json) ==
          GEOMATCH_OK);
  REQUIRE(json != nullptr);
  std::string out(json);
  geomatch_string_free(json);
  CHECK(out.find("\"command\": \"offline\"") != std::string::npos);
  CHECK(out.find("\"ok\": true") != std::string::npos);
  CHECK(out.find("mean_fraction") != std::string::npos);

  json = nullptr;
  CHECK(geomatch_run_experiment("command=offline\nbad-key=1\n", &json) ==
        GEOMATCH_ERR_CONFIG);
  CHECK(json == nullptr);
  CHECK(geomatch_run_experiment(nullptr, &json) == GEOMATCH_ERR_INVALID_ARGUMENT);
}
