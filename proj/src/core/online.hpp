#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "core/instance.hpp"
#include "core/offline.hpp"

namespace geomatch {

// Currently unmatched offline vertices, ordered by coordinate, with
// nearest-neighbor queries under the instance metric (wrap-around on the
// circle). O(log n) per query/removal.
class FreeSet {
 public:
  FreeSet(const std::vector<double>& coords, Topology topology);

  struct Hit {
    uint32_t index;
    double coord;
    double dist;
  };

  // Nearest free vertex to y; ties go to the smaller coordinate.
  std::optional<Hit> nearest(double y) const;

  void erase(uint32_t index, double coord);
  uint64_t size() const { return set_.size(); }
  Topology topology() const { return topology_; }

  // Free coordinates in increasing order.
  std::vector<double> sorted_coords() const;

 private:
  std::set<std::pair<double, uint32_t>> set_;
  Topology topology_;
};

struct ClosestOptions {
  uint64_t max_arrivals = 0;  // 0 => process the whole online side
  uint64_t trace_every = 0;   // 0 => final row only
  std::vector<uint64_t> checkpoints;  // arrival counts, strictly increasing
  std::function<void(uint64_t t, const FreeSet&, const MatchingResult&)> on_checkpoint;
};

// Greedy online matching: each arrival goes to its nearest free vertex.
// metric_mode matches unconditionally (and throws FreeSetExhausted on an
// empty free set); cardinality mode matches only below the c/N threshold.
MatchingResult run_closest(const GeomInstance& inst, const ClosestOptions& opt = {});

MatchingResult closest_cardinality(const GeomInstance& inst, uint64_t trace_every = 0);
MatchingResult closest_metric(const GeomInstance& inst, double t_max);

// Histogram of gaps between consecutive free vertices, in units of the
// 1/(N*k) grid, on the circle. A single free vertex owns the whole circle:
// F(N*k) = 1.
struct GapHistogram {
  uint32_t k = 0;
  uint64_t grid = 0;  // N*k
  std::map<uint64_t, uint64_t> counts;
  uint64_t free_count = 0;
};

GapHistogram gap_histogram(const FreeSet& free, uint64_t n, uint32_t k);

// M(l-, l+): how often a gap of size l- is immediately followed by one of
// size l+ when walking the free vertices in coordinate order.
struct GapPairCounts {
  std::map<std::pair<uint64_t, uint64_t>, uint64_t> counts;
};

GapPairCounts gap_pair_counts(const FreeSet& free, uint64_t n, uint32_t k);

// Expected cost of the next arrival given the gap profile:
// (1/4) * sum_l (l/(k*N))^2 * F(l).
double expected_step_cost(const GapHistogram& hist, uint64_t n);

// Incremental gap histogram: removing a free vertex merges its two adjacent
// gaps. Mirrors gap_histogram exactly (checked in tests).
class GapTracker {
 public:
  GapTracker(const std::vector<uint64_t>& positions, uint64_t grid);

  void remove(uint64_t position);
  const std::map<uint64_t, uint64_t>& counts() const { return counts_; }
  uint64_t free_count() const { return positions_.size(); }
  uint64_t grid() const { return grid_; }

  // Integer conservation: sum_l l*F(l) == grid while non-empty.
  uint64_t length_total() const;

 private:
  void add_gap(uint64_t len);
  void drop_gap(uint64_t len);

  std::set<uint64_t> positions_;
  std::map<uint64_t, uint64_t> counts_;
  uint64_t grid_;
};

}  // namespace geomatch
