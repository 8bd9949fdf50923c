#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace geomatch {

enum class GenMode { UniformIID, PoissonProcess, RoundedGrid };
enum class Topology { Line, Circle };

// One side of a bipartite instance: sorted coordinates in [0,1] plus the
// original draw order (arrival order when the set is used as an online side).
struct PointSet {
  std::vector<double> coords;         // sorted non-decreasing
  std::vector<double> arrival_order;  // as generated; empty for rounded sets
  GenMode gen_mode = GenMode::UniformIID;
  uint64_t n_nominal = 0;
};

PointSet gen_uniform(uint64_t n, Rng& rng);
PointSet gen_ppp(double intensity, Rng& rng);

// Per-step accounting of the rounding pipeline.
struct RoundingReport {
  uint64_t n_input = 0;     // |input set|
  uint64_t n_poisson = 0;   // Poisson(n) draw
  uint64_t added = 0;       // points added by Poissonization
  uint64_t removed = 0;     // points removed by Poissonization
  uint64_t discarded = 0;   // duplicates dropped when keeping one per cell
  bool origin_added = false;
  uint64_t final_count = 0;
};

// Poissonize, round down to the 1/(n*k) grid, keep one point per occupied
// cell, and glue: the result lives on the unit circle with a vertex at 0.
// Cell occupancy is Bernoulli(1 - exp(-1/k)), independent across cells.
PointSet rounding_pipeline(const PointSet& x, uint64_t n, uint32_t k, Rng& rng,
                           RoundingReport* report = nullptr);

struct GeomInstance {
  PointSet offline;
  std::vector<double> online;  // arrival order, never re-sorted
  double c = 1.0;
  bool c_unbounded = false;
  uint64_t n = 0;   // nominal N: sets the c/N threshold and the N*k grid
  uint32_t k = 0;   // grid factor; 0 when the offline side is unrounded
  Topology topology = Topology::Line;

  double radius() const { return c / double(n); }

  double dist(double a, double b) const {
    double d = a > b ? a - b : b - a;
    if (topology == Topology::Circle && d > 0.5) d = 1.0 - d;
    return d;
  }
};

GeomInstance make_uniform_instance(uint64_t n, uint64_t n_online, double c,
                                   bool c_unbounded, Topology topology, Rng& rng);
GeomInstance make_rounded_instance(uint64_t n, uint64_t n_online, double c,
                                   bool c_unbounded, uint32_t k, Rng& rng,
                                   RoundingReport* report = nullptr);

// Plain-text serialization:
//   geomatch-instance v1 N=<n> c=<c|inf> k=<k> topology=<line|circle>
// followed by one offline coordinate per line, a blank line, and the online
// block, 17 significant digits (round-trips doubles exactly).
void write_instance(const GeomInstance& inst, std::ostream& os);
GeomInstance read_instance(std::istream& is);
void save_instance(const GeomInstance& inst, const std::string& path);
GeomInstance load_instance(const std::string& path);

}  // namespace geomatch
