#include "core/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/conv.hpp"
#include "core/offline.hpp"
#include "core/status.hpp"

namespace geomatch {

FluidState init_fluid(uint32_t k, double c, bool c_unbounded, uint32_t lmax,
                      FluidMode mode, FluidInit init) {
  if (k < 1) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "init_fluid: k must be >= 1");
  if (lmax == 0) lmax = default_lmax(k, mode);
  if (lmax < 10 * k) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "init_fluid: lmax must be >= 10k");
  if (!c_unbounded && c < 0.0)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "init_fluid: c must be >= 0 or unbounded");

  FluidState s;
  s.k = k;
  s.c = c;
  s.c_unbounded = c_unbounded || mode == FluidMode::Metric;
  s.mode = mode;
  s.init = init;
  s.f.assign(size_t(lmax) + 1, 0.0);

  const double kk = double(k);
  const double p = -std::expm1(-1.0 / kk);
  switch (init) {
    case FluidInit::Exponential:
      for (uint32_t l = 1; l <= lmax; ++l)
        s.f[l] = kk * p * p * std::exp(-double(l) / kk);
      break;
    case FluidInit::ExactGaps:
      for (uint32_t l = 1; l <= lmax; ++l)
        s.f[l] = kk * p * p * std::exp(-double(l - 1) / kk);
      break;
    case FluidInit::Normalized: {
      const double q = 1.0 - 1.0 / kk;
      double term = 1.0 / kk;
      for (uint32_t l = 1; l <= lmax; ++l) {
        s.f[l] = term;
        term *= q;
      }
      break;
    }
  }
  s.sum0 = sum_f(s);
  s.len0 = length_sum(s);
  return s;
}

namespace {

struct Scratch {
  std::vector<double> wf, conv;
};

// Shared drift evaluation. Returns false (out zeroed) when the state is
// terminal: no free mass left to match.
bool eval_rhs(const FluidState& params, const std::vector<double>& f, double t,
              bool use_fft, std::vector<double>& out, RhsFluxes* fluxes,
              Scratch& scr) {
  const size_t n = f.size();
  const double invk = 1.0 / double(params.k);
  const bool metric = params.mode == FluidMode::Metric;
  const double cap = (metric || params.c_unbounded)
                         ? std::numeric_limits<double>::infinity()
                         : 2.0 * params.c;

  scr.wf.resize(n);
  scr.conv.resize(n);
  out.resize(n);
  scr.wf[0] = 0.0;
  out[0] = 0.0;

  double S = 0.0;   // sum f
  double W = 0.0;   // sum w f
  double M1 = 0.0;  // sum (l/k) f
  double M2 = 0.0;  // sum (l/k)^2 f
  double Q = 0.0;   // sum (l/k) w f
  for (size_t l = 1; l < n; ++l) {
    const double x = double(l) * invk;
    const double w = x < cap ? x : cap;
    const double wf = w * f[l];
    scr.wf[l] = wf;
    S += f[l];
    W += wf;
    M1 += x * f[l];
    M2 += x * x * f[l];
    Q += x * wf;
  }
  if (fluxes) *fluxes = RhsFluxes{0.0, 0.0, 0.25 * M2};

  if (S <= 1e-12) {
    std::fill(out.begin(), out.end(), 0.0);
    return false;
  }

  if (use_fft)
    convolve_fft(scr.wf, f, scr.conv);
  else
    convolve_direct(scr.wf, f, scr.conv);

  double C = 0.0;   // retained created count
  double CL = 0.0;  // retained created length
  for (size_t l = 2; l < n; ++l) {
    C += scr.conv[l];
    CL += double(l) * invk * scr.conv[l];
  }

  if (metric) {
    const double inv1t = 1.0 / (1.0 - t);
    for (size_t l = 1; l < n; ++l)
      out[l] = -(double(l) * invk) * f[l] - inv1t * f[l] + inv1t * scr.conv[l];
    if (fluxes) {
      fluxes->tail_count = (W * S - C) * inv1t;
      fluxes->tail_length = (Q * S + W * M1 - CL) * inv1t;
    }
  } else {
    const double invS = 1.0 / S;
    const double ws = W * invS;
    for (size_t l = 1; l < n; ++l)
      out[l] = -scr.wf[l] - ws * f[l] + invS * scr.conv[l];
    if (fluxes) {
      fluxes->tail_count = (W * S - C) * invS;
      fluxes->tail_length = (Q * S + W * M1 - CL) * invS;
    }
  }
  return true;
}

bool resolve_fft(const FluidState& s, int use_fft) {
  if (use_fft == 0) return false;
  if (use_fft == 1) return true;
  return s.lmax() >= 512;
}

}  // namespace

void rhs_cardinality(const FluidState& state, std::vector<double>& out,
                     RhsFluxes* fluxes) {
  double S = sum_f(state);
  if (S <= 1e-12)
    fail(GEOMATCH_ERR_DEGENERATE_STATE, "rhs_cardinality: sum f below 1e-12");
  FluidState params = state;
  params.mode = FluidMode::Cardinality;
  Scratch scr;
  eval_rhs(params, state.f, state.t, resolve_fft(state, -1), out, fluxes, scr);
}

void rhs_metric(const FluidState& state, std::vector<double>& out, RhsFluxes* fluxes) {
  if (state.t >= 1.0 - 1e-9)
    fail(GEOMATCH_ERR_SINGULAR_TIME, "rhs_metric: t too close to 1");
  FluidState params = state;
  params.mode = FluidMode::Metric;
  Scratch scr;
  eval_rhs(params, state.f, state.t, resolve_fft(state, -1), out, fluxes, scr);
}

void integrate(FluidState& state, double t_end, const IntegrateOptions& opt) {
  if (!(opt.dt > 0.0)) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "integrate: dt must be > 0");
  if (t_end < state.t)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "integrate: t_end before current time");
  const bool metric = state.mode == FluidMode::Metric;
  if (metric && t_end > 1.0 - 1e-9)
    fail(GEOMATCH_ERR_SINGULAR_TIME, "integrate: metric runs must stop before t=1");
  if (!metric && t_end > 1.0 + 1e-12)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "integrate: cardinality runs end at t=1");

  const double length_tol =
      opt.length_drift_tol >= 0.0 ? opt.length_drift_tol : (metric ? 2e-2 : 1e-6);
  const double l1_tol = opt.l1_tol >= 0.0 ? opt.l1_tol : 2e-3;

  const bool use_fft = resolve_fft(state, opt.use_fft);
  const size_t n = state.f.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  Scratch scr;
  RhsFluxes x1, x2, x3, x4;

  std::vector<double> checkpoints = opt.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  size_t next_ck = 0;
  auto emit = [&]() {
    while (next_ck < checkpoints.size() && checkpoints[next_ck] <= state.t + 1e-9) {
      if (opt.on_checkpoint) opt.on_checkpoint(state);
      ++next_ck;
    }
  };
  emit();

  while (state.t < t_end - 1e-12) {
    double step = std::min(opt.dt, t_end - state.t);
    if (next_ck < checkpoints.size() && checkpoints[next_ck] > state.t + 1e-9)
      step = std::min(step, checkpoints[next_ck] - state.t);

    eval_rhs(state, state.f, state.t, use_fft, k1, &x1, scr);
    for (size_t l = 0; l < n; ++l) tmp[l] = state.f[l] + 0.5 * step * k1[l];
    eval_rhs(state, tmp, state.t + 0.5 * step, use_fft, k2, &x2, scr);
    for (size_t l = 0; l < n; ++l) tmp[l] = state.f[l] + 0.5 * step * k2[l];
    eval_rhs(state, tmp, state.t + 0.5 * step, use_fft, k3, &x3, scr);
    for (size_t l = 0; l < n; ++l) tmp[l] = state.f[l] + step * k3[l];
    eval_rhs(state, tmp, state.t + step, use_fft, k4, &x4, scr);

    const double w = step / 6.0;
    for (size_t l = 0; l < n; ++l)
      state.f[l] += w * (k1[l] + 2.0 * (k2[l] + k3[l]) + k4[l]);
    state.t += step;
    state.tail_mass += w * (x1.tail_count + 2.0 * (x2.tail_count + x3.tail_count) +
                            x4.tail_count);
    state.tail_length += w * (x1.tail_length +
                              2.0 * (x2.tail_length + x3.tail_length) +
                              x4.tail_length);
    if (metric)
      state.cum_length += w * (x1.cost_rate + 2.0 * (x2.cost_rate + x3.cost_rate) +
                               x4.cost_rate);

    for (size_t l = 1; l < n; ++l) {
      if (state.f[l] < 0.0) {
        if (state.f[l] < -opt.nonneg_tol)
          fail(GEOMATCH_ERR_INTEGRATION_DIVERGED,
               "integrate: density went negative beyond tolerance");
        state.clamp_total -= state.f[l];
        state.f[l] = 0.0;
      }
    }

    const double len_now = length_sum(state);
    if (!std::isfinite(len_now))
      fail(GEOMATCH_ERR_INTEGRATION_DIVERGED, "integrate: non-finite state");
    // Gaps only merge, so the density mass never rises; growth means the
    // step size is past the stability limit (the blowup mode conserves the
    // corrected length and stays positive, so only this check can see it).
    if (sum_f(state) > state.sum0 * (1.0 + 1e-6) + 1e-9)
      fail(GEOMATCH_ERR_INTEGRATION_DIVERGED, "integrate: density mass increased");
    const double drift =
        std::abs(len_now + state.tail_length - state.len0) / std::max(state.len0, 1e-12);
    if (drift > length_tol)
      fail(GEOMATCH_ERR_INTEGRATION_DIVERGED,
           "integrate: length invariant drift " + std::to_string(drift));
    if (metric && std::abs(state.len0 - 1.0) < 1e-9) {
      const double line = state.sum0 - state.t;
      const double gap = std::abs(sum_f(state) + state.tail_mass - line);
      if (gap > l1_tol)
        fail(GEOMATCH_ERR_INTEGRATION_DIVERGED,
             "integrate: metric mass line deviation " + std::to_string(gap));
    }
    emit();
  }
}

double sum_f(const FluidState& state) {
  double s = 0.0;
  for (size_t l = 1; l < state.f.size(); ++l) s += state.f[l];
  return s;
}

double length_sum(const FluidState& state) {
  double s = 0.0;
  const double invk = 1.0 / double(state.k);
  for (size_t l = 1; l < state.f.size(); ++l) s += double(l) * invk * state.f[l];
  return s;
}

double matched_fraction(const FluidState& state) {
  if (state.mode != FluidMode::Cardinality)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "matched_fraction: cardinality mode required");
  return 1.0 - sum_f(state);
}

double kappa_prediction(const FluidState& state) { return state.sum0 - sum_f(state); }

double metric_second_moment(const FluidState& state) {
  if (state.mode != FluidMode::Metric)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "metric_second_moment: metric mode required");
  double s = 0.0;
  const double invk = 1.0 / double(state.k);
  for (size_t l = 1; l < state.f.size(); ++l) {
    const double x = double(l) * invk;
    s += x * x * state.f[l];
  }
  return 0.25 * s;
}

double metric_total_length(double t) {
  if (t < 0.0 || t >= 1.0)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "metric_total_length: t must be in [0,1)");
  return 0.5 * (1.0 / (1.0 - t) - 1.0);
}

double competitive_ratio(double c, uint32_t k, double dt, uint32_t lmax) {
  if (!(c > 0.0)) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "competitive_ratio: c must be > 0");
  FluidState s = init_fluid(k, c, false, lmax, FluidMode::Cardinality,
                            FluidInit::Normalized);
  IntegrateOptions opt;
  opt.dt = dt;
  integrate(s, 1.0, opt);
  return matched_fraction(s) / theoretical_offline_fraction(c);
}

}  // namespace geomatch
