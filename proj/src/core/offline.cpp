#include "core/offline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/status.hpp"

namespace geomatch {

MatchingResult small_first(const GeomInstance& inst) {
  if (inst.topology != Topology::Line)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "small_first: line topology required");
  if (inst.c_unbounded)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "small_first: finite c required");

  const auto& xs = inst.offline.coords;
  // Sort the online side by coordinate, remembering arrival indices.
  std::vector<uint32_t> order(inst.online.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return inst.online[a] < inst.online[b];
  });

  const double r = inst.radius();
  MatchingResult res;
  size_t i = 0, j = 0;
  while (i < xs.size() && j < order.size()) {
    double x = xs[i];
    double y = inst.online[order[j]];
    double d = std::abs(x - y);
    if (d < r) {
      res.edges.push_back({uint32_t(i), order[j], d});
      res.rho += d;
      ++i;
      ++j;
    } else if (x <= y) {
      ++i;
    } else {
      ++j;
    }
  }
  res.kappa = res.edges.size();
  return res;
}

namespace {

// Kuhn's augmenting-path matching on the threshold graph.
struct Augmenter {
  const std::vector<std::vector<uint32_t>>& adj;
  std::vector<int32_t>& match_offline;
  std::vector<char> seen;

  bool try_augment(uint32_t online_v) {
    for (uint32_t u : adj[online_v]) {
      if (seen[u]) continue;
      seen[u] = 1;
      if (match_offline[u] < 0 || try_augment(uint32_t(match_offline[u]))) {
        match_offline[u] = int32_t(online_v);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

uint64_t brute_force_max_matching(const GeomInstance& inst) {
  const auto& xs = inst.offline.coords;
  const auto& ys = inst.online;
  if (xs.size() > 2000 || ys.size() > 2000)
    fail(GEOMATCH_ERR_INSTANCE_TOO_LARGE,
         "brute_force_max_matching: more than 2000 points per side");

  const double r = inst.radius();
  std::vector<std::vector<uint32_t>> adj(ys.size());
  for (size_t j = 0; j < ys.size(); ++j) {
    for (size_t i = 0; i < xs.size(); ++i) {
      if (inst.c_unbounded || inst.dist(xs[i], ys[j]) < r) adj[j].push_back(uint32_t(i));
    }
  }

  std::vector<int32_t> match_offline(xs.size(), -1);
  Augmenter aug{adj, match_offline, {}};
  uint64_t matched = 0;
  for (uint32_t j = 0; j < ys.size(); ++j) {
    aug.seen.assign(xs.size(), 0);
    if (aug.try_augment(j)) ++matched;
  }
  return matched;
}

double theoretical_offline_fraction(double c) {
  if (c < 0.0) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "offline_fraction: c must be >= 0");
  return c / (c + 0.5);
}

double stationary_density(double x, double c) {
  if (!(c > 0.0)) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "stationary_density: c must be > 0");
  double ax = std::abs(x);
  double z = 1.0 / (2.0 * c + 2.0);
  return ax <= c ? z : std::exp(-(ax - c)) * z;
}

WalkSummary run_generative_walk(double n, double c, Rng& rng, size_t max_psi_samples) {
  if (!(n >= 10.0))
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "run_generative_walk: n must be >= 10");
  if (c < 0.0) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "run_generative_walk: c must be >= 0");

  // Rescaled by N: frontiers live in [0, n], jumps are Exp(1), the matching
  // window is [-c, c].
  double u = rng.next_exp(1.0);
  double v = rng.next_exp(1.0);
  uint64_t tau = 0;
  uint64_t matched = 0;
  WalkSummary out;
  const uint64_t sample_stride =
      max_psi_samples ? std::max<uint64_t>(1, uint64_t(2.0 * n) / max_psi_samples) : 0;

  while (u < n && v < n) {
    double psi = u - v;
    ++tau;
    if (sample_stride && tau % sample_stride == 0 &&
        out.psi_samples.size() < max_psi_samples)
      out.psi_samples.push_back(psi);
    if (std::abs(psi) < c) {
      ++matched;
      u += rng.next_exp(1.0);
      v += rng.next_exp(1.0);
    } else if (psi > c) {
      v += rng.next_exp(1.0);
    } else {
      u += rng.next_exp(1.0);
    }
  }

  out.tau = std::max<uint64_t>(tau, 1);
  out.p_hat = tau ? double(matched) / double(tau) : 0.0;
  out.matched_fraction = 2.0 * out.p_hat / (out.p_hat + 1.0);
  return out;
}

}  // namespace geomatch
