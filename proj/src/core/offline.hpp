#pragma once

#include <cstdint>
#include <vector>

#include "core/instance.hpp"

namespace geomatch {

struct Edge {
  uint32_t offline_idx;  // index into the sorted offline coordinates
  uint32_t online_idx;   // index into the online arrival sequence
  double length;
};

struct TraceRow {
  uint64_t t;           // arrivals processed
  uint64_t kappa;
  double rho;
  uint64_t free_count;
};

struct MatchingResult {
  std::vector<Edge> edges;
  uint64_t kappa = 0;
  double rho = 0.0;
  std::vector<TraceRow> trace;
};

// Offline optimum on the line: sweep both sorted sides left to right, match
// when within the c/N threshold, otherwise advance the lagging side. Produces
// a crossing-free maximum matching.
MatchingResult small_first(const GeomInstance& inst);

// Exact maximum matching size by augmenting paths on the threshold graph.
// Oracle for small_first; capped at 2000 points per side.
uint64_t brute_force_max_matching(const GeomInstance& inst);

// c/(c+1/2), the limit offline matched fraction.
double theoretical_offline_fraction(double c);

// Stationary density of the frontier-difference walk: 1/(2c+2) inside
// [-c, c], exp(-(|x|-c))/(2c+2) outside.
double stationary_density(double x, double c);

struct WalkSummary {
  uint64_t tau = 0;               // iterations until a frontier passes 1
  double p_hat = 0.0;             // fraction of matched iterations
  double matched_fraction = 0.0;  // 2*p_hat / (p_hat + 1)
  std::vector<double> psi_samples;
};

// Generates the graph together with its matching: both frontiers advance by
// Exp(N) jumps; a match happens when the frontier difference is below c/N in
// absolute value. Simulated in N-rescaled units (threshold c, Exp(1) jumps),
// whose dynamics are identical and numerically stable.
WalkSummary run_generative_walk(double n, double c, Rng& rng,
                                size_t max_psi_samples = 0);

}  // namespace geomatch
