#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/rng.hpp"

namespace geomatch {

enum class FluidMode { Cardinality, Metric };

// Discrete initial profiles for the gap-density system. All three share the
// same k -> infinity limit e^{-x}; they differ in their low moments:
//   Exponential   k*p^2*e^{-l/k}       sum = k*p*(1-p),  length sum = 1-p
//   ExactGaps     k*p^2*e^{-(l-1)/k}   sum = k*p,        length sum = 1
//   Normalized    (1/k)(1-1/k)^(l-1)   sum = 1,          length sum = 1
// with p = 1-e^{-1/k}. ExactGaps is the gap law of Bernoulli(p) cell
// occupancy, i.e. the state the rounded instances actually start from;
// Normalized is the exact discrete analog of the continuum initial condition.
enum class FluidInit { Exponential, ExactGaps, Normalized };

struct FluidState {
  uint32_t k = 1;
  double c = 1.0;
  bool c_unbounded = false;
  FluidMode mode = FluidMode::Cardinality;
  FluidInit init = FluidInit::Exponential;

  std::vector<double> f;  // densities; f[0] == 0, entries 1..lmax
  double t = 0.0;

  double cum_length = 0.0;   // metric: integral of the expected cost rate
  double tail_mass = 0.0;    // count mass convected past lmax
  double tail_length = 0.0;  // length convected past lmax
  double clamp_total = 0.0;  // negative mass clamped to zero

  double sum0 = 0.0;  // initial sum of f
  double len0 = 0.0;  // initial sum of (l/k) f

  uint32_t lmax() const { return uint32_t(f.size()) - 1; }
};

// Default truncation. Cardinality runs stay exponentially concentrated, so
// gaps up to rescaled length 40 suffice (initial tail ~ e^-40). Metric runs
// spread hard as t -> 1: the tail decays like exp(-(1-sqrt(t))^2 x), scale
// ~380 at t=0.9, so their default reaches length 1000.
inline uint32_t default_lmax(uint32_t k, FluidMode mode = FluidMode::Cardinality) {
  return (mode == FluidMode::Metric ? 1000 : 40) * k;
}

FluidState init_fluid(uint32_t k, double c, bool c_unbounded, uint32_t lmax,
                      FluidMode mode, FluidInit init = FluidInit::Exponential);

// Drift of the gap-density system. Cardinality:
//   f'(l) = -min(l/k,2c) f(l) - [sum min(l'/k,2c) f(l') / sum f] f(l)
//           + [1/sum f] * sum_{l'<=l} min(l'/k,2c) f(l') f(l-l')
// Metric:
//   g'(l) = -(l/k + 1/(1-t)) g(l) + [1/(1-t)] sum_{l'<=l} (l'/k) g(l') g(l-l')
// Creation beyond lmax is dropped; its count/length rates are reported so the
// integrator can track what the truncation discards.
struct RhsFluxes {
  double tail_count = 0.0;
  double tail_length = 0.0;
  double cost_rate = 0.0;  // metric: sum (l/k)^2 f / 4
};

void rhs_cardinality(const FluidState& state, std::vector<double>& out,
                     RhsFluxes* fluxes = nullptr);
void rhs_metric(const FluidState& state, std::vector<double>& out,
                RhsFluxes* fluxes = nullptr);

struct IntegrateOptions {
  double dt = 1e-3;
  // Integration-health tolerances; exceeding them raises IntegrationDiverged.
  // Negative values pick the per-mode default: cardinality conserves length
  // to integrator precision (1e-6 relative, truncation-corrected), while
  // metric runs shed genuine tail mass past lmax as t -> 1, so their checks
  // default to loose explosion guards (2e-2 length, 2e-3 mass line) and the
  // discarded tail is reported in tail_mass / tail_length instead.
  double length_drift_tol = -1.0;
  double l1_tol = -1.0;       // metric line sum0 - (t-t0), when len0 == 1
  double nonneg_tol = 1e-12;  // clamp threshold per step
  int use_fft = -1;           // -1 auto (lmax >= 512), 0 never, 1 always
  std::vector<double> checkpoints;
  std::function<void(const FluidState&)> on_checkpoint;
};

void integrate(FluidState& state, double t_end, const IntegrateOptions& opt = {});

double sum_f(const FluidState& state);
double length_sum(const FluidState& state);  // sum (l/k) f(l)

// 1 - sum f: the limit matched fraction (cardinality mode).
double matched_fraction(const FluidState& state);
// sum f(.,0) - sum f(.,t): matched vertices per unit N predicted for the
// discrete process the state was initialized from.
double kappa_prediction(const FluidState& state);

// z(t) = sum (l/k)^2 g(l) / 4, the expected per-arrival cost rate.
double metric_second_moment(const FluidState& state);
// Closed form for the total matching length after a fraction t of arrivals.
double metric_total_length(double t);

// Online matched fraction at t=1 over the offline limit c/(c+1/2),
// both taken in the continuum normalization. lmax = 0 -> default.
double competitive_ratio(double c, uint32_t k, double dt, uint32_t lmax = 0);

}  // namespace geomatch
