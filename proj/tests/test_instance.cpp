#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "core/instance.hpp"
#include "core/status.hpp"

using namespace geomatch;

namespace {

// Kolmogorov distance between the sample and the uniform CDF.
double ks_uniform(const std::vector<double>& sorted) {
  double d = 0.0;
  const double n = double(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    d = std::max(d, std::abs(double(i + 1) / n - sorted[i]));
    d = std::max(d, std::abs(sorted[i] - double(i) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("gen_uniform basics") {
  Rng rng(1, 0);
  CHECK_THROWS_AS(gen_uniform(0, rng), Error);

  PointSet one = gen_uniform(1, rng);
  REQUIRE(one.coords.size() == 1);
  CHECK(one.coords[0] >= 0.0);
  CHECK(one.coords[0] < 1.0);

  PointSet ps = gen_uniform(5000, rng);
  CHECK(std::is_sorted(ps.coords.begin(), ps.coords.end()));
  CHECK(ps.arrival_order.size() == 5000);
  std::vector<double> resorted = ps.arrival_order;
  std::sort(resorted.begin(), resorted.end());
  CHECK(resorted == ps.coords);
}

TEST_CASE("gen_uniform determinism and stream separation") {
  Rng a(123, 7), b(123, 7), c(123, 8);
  PointSet pa = gen_uniform(100, a);
  PointSet pb = gen_uniform(100, b);
  PointSet pc = gen_uniform(100, c);
  CHECK(pa.coords == pb.coords);
  CHECK(pa.coords != pc.coords);
}

TEST_CASE("gen_uniform empirical CDF close to uniform") {
  Rng rng(2024, 0);
  PointSet ps = gen_uniform(10000, rng);
  CHECK(ks_uniform(ps.coords) < 0.02);
}

TEST_CASE("gen_ppp renewal construction") {
  Rng rng(5, 1);
  PointSet ps = gen_ppp(1e4, rng);
  CHECK(std::is_sorted(ps.coords.begin(), ps.coords.end()));
  CHECK(ps.coords.back() < 1.0);

  // Replay.
  Rng rng2(5, 1);
  CHECK(gen_ppp(1e4, rng2).coords == ps.coords);

  // Count concentrates at the intensity: mean of 64 replicas within
  // 4 standard errors (Poisson variance N => SE = sqrt(N/64)).
  const double n = 1e4;
  double total = 0.0;
  for (uint64_t r = 0; r < 64; ++r) {
    Rng rr(6, r);
    total += double(gen_ppp(n, rr).coords.size());
  }
  double mean = total / 64.0;
  CHECK(std::abs(mean - n) <= 4.0 * std::sqrt(n / 64.0));

  // Spacings average 1/N within 5%.
  double spacing = 0.0;
  for (size_t i = 1; i < ps.coords.size(); ++i)
    spacing += ps.coords[i] - ps.coords[i - 1];
  spacing /= double(ps.coords.size() - 1);
  CHECK(spacing == doctest::Approx(1.0 / n).epsilon(0.05));

  // An empty realization is a valid point set.
  Rng tiny(9, 0);
  CHECK_NOTHROW(gen_ppp(1e-6, tiny));
  CHECK_THROWS_AS(gen_ppp(0.0, rng), Error);
}

TEST_CASE("rounding pipeline discards to one point per cell") {
  // All inputs in the cell [0.375, 0.5) of the n=4, k=2 grid. As long as
  // Poissonization does not add points, the output is that cell's grid
  // point plus the glued vertex at 0.
  PointSet x;
  x.gen_mode = GenMode::UniformIID;
  x.n_nominal = 4;
  for (int i = 0; i < 10; ++i) x.coords.push_back(0.38 + 0.01 * i);
  x.arrival_order = x.coords;

  Rng rng(3, 0);
  RoundingReport rep;
  PointSet out = rounding_pipeline(x, 4, 2, rng, &rep);
  REQUIRE(rep.n_poisson <= 10);  // seed chosen so nothing is added
  REQUIRE(out.coords.size() == 2);
  CHECK(out.coords[0] == 0.0);
  CHECK(out.coords[1] == doctest::Approx(3.0 / 8.0));
  CHECK(rep.origin_added);
  CHECK(out.gen_mode == GenMode::RoundedGrid);
}

TEST_CASE("rounding pipeline report accounts for the poissonization delta") {
  Rng rng(11, 4);
  PointSet x = gen_uniform(1000, rng);
  RoundingReport rep;
  rounding_pipeline(x, 1000, 4, rng, &rep);
  CHECK(rep.n_input == 1000);
  CHECK(rep.added + rep.removed ==
        (rep.n_poisson > 1000 ? rep.n_poisson - 1000 : 1000 - rep.n_poisson));
  CHECK((rep.added == 0 || rep.removed == 0));
}

TEST_CASE("rounding pipeline output lives on the grid") {
  Rng rng(7, 0);
  PointSet x = gen_uniform(10000, rng);
  PointSet out = rounding_pipeline(x, 10000, 16, rng);
  const double grid = 10000.0 * 16.0;
  CHECK(out.coords.front() == 0.0);
  for (size_t i = 0; i < out.coords.size(); ++i) {
    double scaled = out.coords[i] * grid;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
    if (i) CHECK(out.coords[i] > out.coords[i - 1]);
  }
}

TEST_CASE("rounding pipeline count matches the Bernoulli-cell oracle") {
  // |output| is 1{cell 0} + sum over the other Nk-1 cells of independent
  // Bernoulli(p_k), so E = (Nk-1) p_k + 1 and Var < Nk p_k (1-p_k).
  const uint64_t n = 500;
  const uint32_t k = 4;
  const double cells = double(n) * k;
  const double p = -std::expm1(-1.0 / double(k));
  double total = 0.0;
  const int reps = 64;
  for (int r = 0; r < reps; ++r) {
    Rng rng(2025, uint64_t(r));
    PointSet x = gen_uniform(n, rng);
    total += double(rounding_pipeline(x, n, k, rng).coords.size());
  }
  const double mean = total / reps;
  const double expect = (cells - 1.0) * p + 1.0;
  const double sigma = std::sqrt(cells * p * (1.0 - p));
  CHECK(std::abs(mean - expect) <= 4.0 * sigma / std::sqrt(double(reps)));
}

TEST_CASE("rounding pipeline per-cell occupancy is Bernoulli(p_k)") {
  const uint64_t n = 500;
  const uint32_t k = 4;
  const uint64_t cells = n * k;
  const int reps = 200;
  const double p = -std::expm1(-1.0 / double(k));
  std::vector<uint32_t> hits(cells, 0);
  for (int r = 0; r < reps; ++r) {
    Rng rng(31337, uint64_t(r));
    PointSet x = gen_uniform(n, rng);
    PointSet out = rounding_pipeline(x, n, k, rng);
    for (double c : out.coords) ++hits[uint64_t(std::llround(c * double(cells)))];
  }
  const double margin = 4.0 * std::sqrt(p * (1.0 - p) / double(reps));
  uint64_t ok = 0;
  for (uint64_t cell = 0; cell < cells; ++cell)
    ok += std::abs(double(hits[cell]) / reps - p) <= margin;
  // The forced vertex at 0 pushes cell 0 out of band; 99% of cells must
  // still sit inside.
  CHECK(double(ok) >= 0.99 * double(cells));
}

TEST_CASE("rounding pipeline rejects bad arguments") {
  Rng rng(1, 0);
  PointSet x = gen_uniform(10, rng);
  try {
    rounding_pipeline(x, 1ULL << 62, 8, rng);
    FAIL("expected grid overflow error");
  } catch (const Error& e) {
    CHECK(e.status() == GEOMATCH_ERR_GRID_TOO_FINE);
  }
  CHECK_THROWS_AS(rounding_pipeline(x, 10, 0, rng), Error);
  PointSet rounded = rounding_pipeline(x, 10, 2, rng);
  CHECK_THROWS_AS(rounding_pipeline(rounded, 10, 2, rng), Error);
}

TEST_CASE("instance metric") {
  GeomInstance inst;
  inst.topology = Topology::Line;
  CHECK(inst.dist(0.1, 0.95) == doctest::Approx(0.85));
  inst.topology = Topology::Circle;
  CHECK(inst.dist(0.1, 0.95) == doctest::Approx(0.15));
  CHECK(inst.dist(0.95, 0.1) == doctest::Approx(0.15));
  CHECK(inst.dist(0.25, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("circle instances always carry the glued vertex at 0") {
  Rng rng(81, 0);
  GeomInstance uniform =
      make_uniform_instance(50, 10, 0.0, true, Topology::Circle, rng);
  CHECK(uniform.offline.coords.front() == 0.0);
  GeomInstance rounded = make_rounded_instance(50, 10, 1.0, false, 4, rng);
  CHECK(rounded.offline.coords.front() == 0.0);
}

TEST_CASE("instance serialization round trip") {
  Rng rng(77, 0);
  GeomInstance inst = make_rounded_instance(200, 150, 1.5, false, 8, rng);
  std::stringstream ss;
  write_instance(inst, ss);

  std::string header;
  std::getline(ss, header);
  CHECK(header == "geomatch-instance v1 N=200 c=1.5 k=8 topology=circle");
  ss.seekg(0);

  GeomInstance back = read_instance(ss);
  CHECK(back.n == inst.n);
  CHECK(back.k == inst.k);
  CHECK(back.c == inst.c);
  CHECK(back.c_unbounded == inst.c_unbounded);
  CHECK(back.topology == inst.topology);
  CHECK(back.offline.coords == inst.offline.coords);  // bit-exact
  CHECK(back.online == inst.online);
}

TEST_CASE("instance serialization keeps unbounded c and line topology") {
  Rng rng(78, 0);
  GeomInstance inst = make_uniform_instance(50, 40, 0.0, true, Topology::Line, rng);
  std::stringstream ss;
  write_instance(inst, ss);
  CHECK(ss.str().rfind("geomatch-instance v1 N=50 c=inf k=0 topology=line", 0) == 0);
  ss.seekg(0);
  GeomInstance back = read_instance(ss);
  CHECK(back.c_unbounded);
  CHECK(back.topology == Topology::Line);
  CHECK(back.online == inst.online);
}

TEST_CASE("instance read rejects malformed input") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_instance(empty), Error);
  std::stringstream bad("geomatch-instance v1 N=10 c=1 k=0 topology=klein\n");
  CHECK_THROWS_AS(read_instance(bad), Error);
}

TEST_CASE("instance file io") {
  Rng rng(79, 0);
  GeomInstance inst = make_uniform_instance(20, 20, 2.0, false, Topology::Line, rng);
  std::string path =
      (std::filesystem::temp_directory_path() / "geomatch_test_instance.txt").string();
  save_instance(inst, path);
  GeomInstance back = load_instance(path);
  CHECK(back.offline.coords == inst.offline.coords);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_instance(path), Error);
}
