#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"

#include "core/instance.hpp"
#include "core/offline.hpp"
#include "core/status.hpp"

using namespace geomatch;

namespace {

GeomInstance line_instance(std::vector<double> offline, std::vector<double> online,
                           double c, uint64_t n) {
  GeomInstance inst;
  std::sort(offline.begin(), offline.end());
  inst.offline.coords = std::move(offline);
  inst.online = std::move(online);
  inst.c = c;
  inst.n = n;
  inst.topology = Topology::Line;
  return inst;
}

// Composite Simpson quadrature.
double simpson(double a, double b, int panels, const std::function<double(double)>& f) {
  double h = (b - a) / (2.0 * panels);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("small_first leftmost compatible pair") {
  // threshold c/N = 0.10
  auto inst = line_instance({0.10, 0.20}, {0.15}, 0.10, 1);
  MatchingResult m = small_first(inst);
  REQUIRE(m.kappa == 1);
  CHECK(inst.offline.coords[m.edges[0].offline_idx] == doctest::Approx(0.10));
  CHECK(m.rho == doctest::Approx(0.05));
}

TEST_CASE("small_first with no edges") {
  auto inst = line_instance({0.10}, {0.50}, 0.05, 1);
  CHECK(small_first(inst).kappa == 0);
}

TEST_CASE("small_first threshold is strict") {
  // Dyadic coordinates make the distance equal c/N exactly in binary.
  auto inst = line_instance({0.25}, {0.75}, 0.5, 1);
  CHECK(small_first(inst).kappa == 0);
}

TEST_CASE("small_first preconditions") {
  auto inst = line_instance({0.5}, {0.6}, 0.1, 1);
  inst.topology = Topology::Circle;
  CHECK_THROWS_AS(small_first(inst), Error);
  inst.topology = Topology::Line;
  inst.c_unbounded = true;
  CHECK_THROWS_AS(small_first(inst), Error);
}

TEST_CASE("small_first matches the augmenting-path oracle") {
  const double c_grid[] = {0.2, 0.5, 1.0, 2.0, 5.0};
  int checked = 0;
  for (uint64_t trial = 0; trial < 300; ++trial) {
    Rng rng(555, trial);
    uint64_t n_off = 1 + rng.next_below(12);
    uint64_t n_onl = 1 + rng.next_below(12);
    double c = c_grid[rng.next_below(5)];
    uint64_t scale = 1 + rng.next_below(12);
    GeomInstance inst;
    inst.c = c;
    inst.n = scale;  // threshold c/scale varies the edge density
    inst.topology = Topology::Line;
    for (uint64_t i = 0; i < n_off; ++i)
      inst.offline.coords.push_back(rng.next_double());
    std::sort(inst.offline.coords.begin(), inst.offline.coords.end());
    for (uint64_t i = 0; i < n_onl; ++i) inst.online.push_back(rng.next_double());

    REQUIRE(small_first(inst).kappa == brute_force_max_matching(inst));
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("small_first output has no crossing edges") {
  for (uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng(77, trial);
    GeomInstance inst = make_uniform_instance(200, 200, 1.0, false, Topology::Line, rng);
    MatchingResult m = small_first(inst);
    for (size_t i = 1; i < m.edges.size(); ++i) {
      CHECK(inst.offline.coords[m.edges[i - 1].offline_idx] <=
            inst.offline.coords[m.edges[i].offline_idx]);
      CHECK(inst.online[m.edges[i - 1].online_idx] <=
            inst.online[m.edges[i].online_idx]);
    }
    // Every edge respects the threshold.
    for (const Edge& e : m.edges) CHECK(e.length < inst.radius());
  }
}

TEST_CASE("brute force maximum matching examples") {
  // Complete bipartite 3x3.
  auto complete = line_instance({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, 10.0, 1);
  CHECK(brute_force_max_matching(complete) == 3);

  // Empty edge set.
  auto empty = line_instance({0.1, 0.2, 0.3}, {0.7, 0.8, 0.9}, 0.01, 1);
  CHECK(brute_force_max_matching(empty) == 0);

  // Both online points only reach the middle offline vertex.
  auto bottleneck = line_instance({0.1, 0.2, 0.3}, {0.19, 0.21}, 0.02, 1);
  CHECK(brute_force_max_matching(bottleneck) == 1);
}

TEST_CASE("brute force rejects oversized instances") {
  GeomInstance inst;
  inst.offline.coords.assign(2001, 0.5);
  inst.online.assign(1, 0.5);
  inst.c = 1.0;
  inst.n = 2001;
  try {
    brute_force_max_matching(inst);
    FAIL("expected size-cap error");
  } catch (const Error& e) {
    CHECK(e.status() == GEOMATCH_ERR_INSTANCE_TOO_LARGE);
  }
}

TEST_CASE("theoretical offline fraction") {
  CHECK(theoretical_offline_fraction(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(theoretical_offline_fraction(0.0) == 0.0);
  CHECK(theoretical_offline_fraction(0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(theoretical_offline_fraction(-1.0), Error);
}

TEST_CASE("stationary density values and normalization") {
  CHECK(stationary_density(0.0, 1.0) == doctest::Approx(0.25));
  CHECK(stationary_density(1.0 + std::log(2.0), 1.0) == doctest::Approx(0.125));
  CHECK(stationary_density(-2.0, 1.0) == stationary_density(2.0, 1.0));
  for (double c : {0.3, 1.0, 2.7}) {
    // Piecewise so the quadrature never straddles the kinks at +-c.
    auto f = [c](double x) { return stationary_density(x, c); };
    double mass = simpson(-(c + 50.0), -c, 4000, f) + simpson(-c, c, 4000, f) +
                  simpson(c, c + 50.0, 4000, f);
    CHECK(std::abs(mass - 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(stationary_density(0.0, 0.0), Error);
}

TEST_CASE("generative walk determinism and identities") {
  Rng a(9, 3), b(9, 3);
  WalkSummary wa = run_generative_walk(5e4, 1.0, a);
  WalkSummary wb = run_generative_walk(5e4, 1.0, b);
  CHECK(wa.tau == wb.tau);
  CHECK(wa.p_hat == wb.p_hat);
  CHECK(wa.tau >= 1);
  CHECK(wa.p_hat >= 0.0);
  CHECK(wa.p_hat <= 1.0);
  CHECK(wa.matched_fraction ==
        doctest::Approx(2.0 * wa.p_hat / (wa.p_hat + 1.0)));
}

TEST_CASE("generative walk ergodics at c=1") {
  Rng rng(42, 0);
  WalkSummary w = run_generative_walk(1e5, 1.0, rng);
  // Occupation of the matching window converges to 2c/(2c+2) = 1/2; a single
  // run stays within a few standard deviations.
  CHECK(std::abs(w.p_hat - 0.5) < 0.03);
  CHECK(std::abs(w.matched_fraction - 2.0 / 3.0) < 0.03);
}

TEST_CASE("generative walk at c=0 never matches") {
  Rng rng(7, 0);
  WalkSummary w = run_generative_walk(1e4, 0.0, rng);
  CHECK(w.p_hat == 0.0);
  CHECK(w.matched_fraction == 0.0);
}

TEST_CASE("generative walk samples the potential when asked") {
  Rng rng(11, 0);
  WalkSummary w = run_generative_walk(1e4, 1.0, rng, 128);
  CHECK(!w.psi_samples.empty());
  CHECK(w.psi_samples.size() <= 128);
}

TEST_CASE("generative walk preconditions") {
  Rng rng(1, 0);
  CHECK_THROWS_AS(run_generative_walk(5.0, 1.0, rng), Error);
  CHECK_THROWS_AS(run_generative_walk(1e4, -0.5, rng), Error);
}

TEST_CASE("matched fraction map is monotone in p") {
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    double p = double(i) / 100.0;
    double mf = 2.0 * p / (p + 1.0);
    CHECK(mf > prev);
    prev = mf;
  }
  CHECK(prev == doctest::Approx(1.0));
}
