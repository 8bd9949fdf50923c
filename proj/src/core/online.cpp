#include "core/online.hpp"

#include <algorithm>
#include <cmath>

#include "core/status.hpp"

namespace geomatch {

FreeSet::FreeSet(const std::vector<double>& coords, Topology topology)
    : topology_(topology) {
  for (uint32_t i = 0; i < coords.size(); ++i) set_.emplace(coords[i], i);
}

std::optional<FreeSet::Hit> FreeSet::nearest(double y) const {
  if (set_.empty()) return std::nullopt;

  const bool circle = topology_ == Topology::Circle;
  auto metric = [&](double a, double b) {
    double d = a > b ? a - b : b - a;
    if (circle && d > 0.5) d = 1.0 - d;
    return d;
  };

  auto succ = set_.lower_bound({y, 0});
  auto pred = succ;
  bool have_pred = false;
  if (succ == set_.begin()) {
    if (circle) {
      pred = std::prev(set_.end());
      have_pred = true;
    }
  } else {
    pred = std::prev(succ);
    have_pred = true;
  }
  bool have_succ = true;
  if (succ == set_.end()) {
    if (circle) {
      succ = set_.begin();
    } else {
      have_succ = false;
    }
  }

  std::optional<Hit> best;
  auto consider = [&](std::set<std::pair<double, uint32_t>>::const_iterator it) {
    Hit h{it->second, it->first, metric(it->first, y)};
    if (!best || h.dist < best->dist ||
        (h.dist == best->dist && h.coord < best->coord)) {
      best = h;
    }
  };
  if (have_succ) consider(succ);
  if (have_pred && (!have_succ || pred != succ)) consider(pred);
  return best;
}

void FreeSet::erase(uint32_t index, double coord) { set_.erase({coord, index}); }

std::vector<double> FreeSet::sorted_coords() const {
  std::vector<double> out;
  out.reserve(set_.size());
  for (const auto& [coord, idx] : set_) out.push_back(coord);
  return out;
}

MatchingResult run_closest(const GeomInstance& inst, const ClosestOptions& opt) {
  const bool metric_mode = inst.c_unbounded;
  const double r = metric_mode ? 0.0 : inst.radius();
  uint64_t arrivals = opt.max_arrivals == 0
                          ? inst.online.size()
                          : std::min<uint64_t>(opt.max_arrivals, inst.online.size());

  FreeSet free(inst.offline.coords, inst.topology);
  MatchingResult res;
  size_t next_checkpoint = 0;

  auto emit_checkpoint = [&](uint64_t t) {
    while (next_checkpoint < opt.checkpoints.size() &&
           opt.checkpoints[next_checkpoint] == t) {
      if (opt.on_checkpoint) opt.on_checkpoint(t, free, res);
      ++next_checkpoint;
    }
  };

  emit_checkpoint(0);
  for (uint64_t t = 0; t < arrivals; ++t) {
    double y = inst.online[t];
    auto hit = free.nearest(y);
    if (metric_mode) {
      if (!hit)
        fail(GEOMATCH_ERR_FREE_SET_EXHAUSTED,
             "run_closest: arrival with no free vertex left");
      res.edges.push_back({hit->index, uint32_t(t), hit->dist});
      res.rho += hit->dist;
      ++res.kappa;
      free.erase(hit->index, hit->coord);
    } else if (hit && hit->dist < r) {
      res.edges.push_back({hit->index, uint32_t(t), hit->dist});
      res.rho += hit->dist;
      ++res.kappa;
      free.erase(hit->index, hit->coord);
    }
    if (opt.trace_every && (t + 1) % opt.trace_every == 0)
      res.trace.push_back({t + 1, res.kappa, res.rho, free.size()});
    emit_checkpoint(t + 1);
  }
  if (res.trace.empty() || res.trace.back().t != arrivals)
    res.trace.push_back({arrivals, res.kappa, res.rho, free.size()});
  return res;
}

MatchingResult closest_cardinality(const GeomInstance& inst, uint64_t trace_every) {
  if (inst.c_unbounded)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "closest_cardinality: finite c required");
  ClosestOptions opt;
  opt.trace_every = trace_every;
  return run_closest(inst, opt);
}

MatchingResult closest_metric(const GeomInstance& inst, double t_max) {
  if (!inst.c_unbounded)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "closest_metric: unbounded c required");
  if (t_max < 0.0 || t_max > 1.0)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "closest_metric: t_max must be in [0,1]");
  const uint64_t arrivals = uint64_t(std::llround(t_max * double(inst.n)));
  if (arrivals == 0) {
    MatchingResult empty;
    empty.trace.push_back({0, 0, 0.0, inst.offline.coords.size()});
    return empty;
  }
  ClosestOptions opt;
  opt.max_arrivals = arrivals;
  return run_closest(inst, opt);
}

namespace {

std::vector<uint64_t> grid_positions(const FreeSet& free, uint64_t n, uint32_t k) {
  if (free.topology() != Topology::Circle)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "gap statistics need circle topology");
  if (k < 1 || n == 0) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "gap statistics: bad n or k");
  const double grid = double(n) * double(k);
  std::vector<uint64_t> pos;
  pos.reserve(free.size());
  for (double c : free.sorted_coords()) {
    double scaled = c * grid;
    double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
      fail(GEOMATCH_ERR_NOT_ON_GRID, "free coordinate off the 1/(N*k) grid");
    pos.push_back(uint64_t(rounded));
  }
  return pos;
}

}  // namespace

GapHistogram gap_histogram(const FreeSet& free, uint64_t n, uint32_t k) {
  GapHistogram h;
  h.k = k;
  h.grid = n * uint64_t(k);
  auto pos = grid_positions(free, n, k);
  h.free_count = pos.size();
  if (pos.empty()) return h;
  for (size_t i = 0; i + 1 < pos.size(); ++i) ++h.counts[pos[i + 1] - pos[i]];
  ++h.counts[h.grid - pos.back() + pos.front()];  // wrap-around gap
  return h;
}

GapPairCounts gap_pair_counts(const FreeSet& free, uint64_t n, uint32_t k) {
  GapPairCounts m;
  auto pos = grid_positions(free, n, k);
  const uint64_t grid = n * uint64_t(k);
  const size_t count = pos.size();
  if (count == 0) return m;
  auto gap_after = [&](size_t i) {
    return i + 1 < count ? pos[i + 1] - pos[i] : grid - pos.back() + pos.front();
  };
  for (size_t i = 0; i < count; ++i) {
    uint64_t before = gap_after((i + count - 1) % count);
    uint64_t after = gap_after(i);
    ++m.counts[{before, after}];
  }
  return m;
}

double expected_step_cost(const GapHistogram& hist, uint64_t n) {
  const double scale = double(hist.k) * double(n);
  double total = 0.0;
  for (const auto& [len, cnt] : hist.counts) {
    double g = double(len) / scale;
    total += g * g * double(cnt);
  }
  return 0.25 * total;
}

GapTracker::GapTracker(const std::vector<uint64_t>& positions, uint64_t grid)
    : positions_(positions.begin(), positions.end()), grid_(grid) {
  if (positions_.empty())
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "GapTracker: empty position set");
  auto it = positions_.begin();
  uint64_t prev = *it;
  for (++it; it != positions_.end(); ++it) {
    add_gap(*it - prev);
    prev = *it;
  }
  add_gap(grid_ - prev + *positions_.begin());
}

void GapTracker::add_gap(uint64_t len) { ++counts_[len]; }

void GapTracker::drop_gap(uint64_t len) {
  auto it = counts_.find(len);
  if (it == counts_.end() || it->second == 0)
    fail(GEOMATCH_ERR_INTERNAL, "GapTracker: dropping a missing gap");
  if (--it->second == 0) counts_.erase(it);
}

void GapTracker::remove(uint64_t position) {
  auto it = positions_.find(position);
  if (it == positions_.end())
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "GapTracker: unknown position");
  if (positions_.size() == 1) {
    drop_gap(grid_);
    positions_.erase(it);
    return;
  }
  auto succ = std::next(it) == positions_.end() ? positions_.begin() : std::next(it);
  auto pred = it == positions_.begin() ? std::prev(positions_.end()) : std::prev(it);
  uint64_t before = (position >= *pred) ? position - *pred : grid_ - *pred + position;
  uint64_t after = (*succ >= position) ? *succ - position : grid_ - position + *succ;
  drop_gap(before);
  drop_gap(after);
  add_gap(before + after);
  positions_.erase(it);
}

uint64_t GapTracker::length_total() const {
  uint64_t total = 0;
  for (const auto& [len, cnt] : counts_) total += len * cnt;
  return total;
}

}  // namespace geomatch
