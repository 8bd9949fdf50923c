// extern-C surface over the geomatch core: opaque handles wrap the C++
// objects, exceptions are translated to status codes, and the last failure
// message is kept thread-locally.

#include "geomatch.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/fluid.hpp"
#include "core/harness.hpp"
#include "core/instance.hpp"
#include "core/offline.hpp"
#include "core/online.hpp"
#include "core/status.hpp"

struct geomatch_instance {
  geomatch::GeomInstance rep;
};

struct geomatch_matching {
  geomatch::MatchingResult rep;
};

struct geomatch_fluid {
  geomatch::FluidState rep;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
geomatch_status guarded(Fn&& fn) {
  try {
    fn();
    return GEOMATCH_OK;
  } catch (const geomatch::Error& e) {
    g_last_error = e.what();
    return e.status();
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GEOMATCH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GEOMATCH_ERR_INTERNAL;
  }
}

geomatch::Topology to_topology(int topology) {
  if (topology == GEOMATCH_TOPOLOGY_CIRCLE) return geomatch::Topology::Circle;
  if (topology == GEOMATCH_TOPOLOGY_LINE) return geomatch::Topology::Line;
  geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "bad topology value");
}

geomatch::FluidInit to_init(int init_kind) {
  switch (init_kind) {
    case GEOMATCH_INIT_EXPONENTIAL: return geomatch::FluidInit::Exponential;
    case GEOMATCH_INIT_EXACT_GAPS: return geomatch::FluidInit::ExactGaps;
    case GEOMATCH_INIT_NORMALIZED: return geomatch::FluidInit::Normalized;
  }
  geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "bad fluid init value");
}

}  // namespace

extern "C" {

const char* geomatch_version(void) { return geomatch::kVersion; }

const char* geomatch_status_name(geomatch_status s) { return geomatch::status_name(s); }

const char* geomatch_last_error(void) { return g_last_error.c_str(); }

double geomatch_offline_fraction(double c) {
  return c <= 0.0 ? 0.0 : c / (c + 0.5);
}

double geomatch_stationary_density(double x, double c) {
  if (!(c > 0.0)) return 0.0;
  return geomatch::stationary_density(x, c);
}

double geomatch_metric_total_length(double t) {
  if (t < 0.0 || t >= 1.0) return -1.0;
  return geomatch::metric_total_length(t);
}

geomatch_status geomatch_instance_uniform(uint64_t n, uint64_t n_online, double c,
                                          int unbounded_c, int topology,
                                          uint64_t seed, uint64_t stream,
                                          geomatch_instance** out) {
  return guarded([&] {
    if (!out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "out is null");
    geomatch::Rng rng(seed, stream);
    auto inst = geomatch::make_uniform_instance(n, n_online, c,
                                                unbounded_c != 0 || c < 0.0,
                                                to_topology(topology), rng);
    *out = new geomatch_instance{std::move(inst)};
  });
}

geomatch_status geomatch_instance_rounded(uint64_t n, uint64_t n_online, double c,
                                          int unbounded_c, uint32_t k,
                                          uint64_t seed, uint64_t stream,
                                          geomatch_instance** out) {
  return guarded([&] {
    if (!out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "out is null");
    geomatch::Rng rng(seed, stream);
    auto inst = geomatch::make_rounded_instance(n, n_online, c,
                                                unbounded_c != 0 || c < 0.0, k, rng);
    *out = new geomatch_instance{std::move(inst)};
  });
}

geomatch_status geomatch_instance_save(const geomatch_instance* inst, const char* path) {
  return guarded([&] {
    if (!inst || !path) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "null argument");
    geomatch::save_instance(inst->rep, path);
  });
}

geomatch_status geomatch_instance_load(const char* path, geomatch_instance** out) {
  return guarded([&] {
    if (!path || !out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "null argument");
    *out = new geomatch_instance{geomatch::load_instance(path)};
  });
}

uint64_t geomatch_instance_offline_count(const geomatch_instance* inst) {
  return inst ? inst->rep.offline.coords.size() : 0;
}

uint64_t geomatch_instance_online_count(const geomatch_instance* inst) {
  return inst ? inst->rep.online.size() : 0;
}

uint64_t geomatch_instance_n(const geomatch_instance* inst) {
  return inst ? inst->rep.n : 0;
}

uint32_t geomatch_instance_k(const geomatch_instance* inst) {
  return inst ? inst->rep.k : 0;
}

double geomatch_instance_c(const geomatch_instance* inst, int* unbounded) {
  if (unbounded) *unbounded = inst && inst->rep.c_unbounded ? 1 : 0;
  return inst ? inst->rep.c : 0.0;
}

int geomatch_instance_topology(const geomatch_instance* inst) {
  return inst && inst->rep.topology == geomatch::Topology::Circle
             ? GEOMATCH_TOPOLOGY_CIRCLE
             : GEOMATCH_TOPOLOGY_LINE;
}

double geomatch_instance_offline_coord(const geomatch_instance* inst, uint64_t i) {
  if (!inst || i >= inst->rep.offline.coords.size()) return -1.0;
  return inst->rep.offline.coords[i];
}

double geomatch_instance_online_coord(const geomatch_instance* inst, uint64_t i) {
  if (!inst || i >= inst->rep.online.size()) return -1.0;
  return inst->rep.online[i];
}

void geomatch_instance_free(geomatch_instance* inst) { delete inst; }

geomatch_status geomatch_small_first(const geomatch_instance* inst,
                                     geomatch_matching** out) {
  return guarded([&] {
    if (!inst || !out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "null argument");
    *out = new geomatch_matching{geomatch::small_first(inst->rep)};
  });
}

geomatch_status geomatch_closest(const geomatch_instance* inst, uint64_t max_arrivals,
                                 geomatch_matching** out) {
  return guarded([&] {
    if (!inst || !out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "null argument");
    geomatch::ClosestOptions opt;
    opt.max_arrivals = max_arrivals;
    *out = new geomatch_matching{geomatch::run_closest(inst->rep, opt)};
  });
}

geomatch_status geomatch_brute_force_max_matching(const geomatch_instance* inst,
                                                  uint64_t* out) {
  return guarded([&] {
    if (!inst || !out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "null argument");
    *out = geomatch::brute_force_max_matching(inst->rep);
  });
}

uint64_t geomatch_matching_kappa(const geomatch_matching* m) {
  return m ? m->rep.kappa : 0;
}

double geomatch_matching_rho(const geomatch_matching* m) { return m ? m->rep.rho : 0.0; }

uint64_t geomatch_matching_edge_count(const geomatch_matching* m) {
  return m ? m->rep.edges.size() : 0;
}

geomatch_status geomatch_matching_edge(const geomatch_matching* m, uint64_t i,
                                       uint32_t* offline_idx, uint32_t* online_idx,
                                       double* length) {
  return guarded([&] {
    if (!m || i >= m->rep.edges.size())
      geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "edge index out of range");
    if (offline_idx) *offline_idx = m->rep.edges[i].offline_idx;
    if (online_idx) *online_idx = m->rep.edges[i].online_idx;
    if (length) *length = m->rep.edges[i].length;
  });
}

void geomatch_matching_free(geomatch_matching* m) { delete m; }

geomatch_status geomatch_generative_walk(double n, double c, uint64_t seed,
                                         uint64_t stream, uint64_t* tau, double* p_hat,
                                         double* matched_fraction) {
  return guarded([&] {
    geomatch::Rng rng(seed, stream);
    geomatch::WalkSummary w = geomatch::run_generative_walk(n, c, rng);
    if (tau) *tau = w.tau;
    if (p_hat) *p_hat = w.p_hat;
    if (matched_fraction) *matched_fraction = w.matched_fraction;
  });
}

geomatch_status geomatch_fluid_create(uint32_t k, double c, int unbounded_c,
                                      uint32_t lmax, int mode, int init_kind,
                                      geomatch_fluid** out) {
  return guarded([&] {
    if (!out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "out is null");
    auto m = mode == GEOMATCH_FLUID_METRIC ? geomatch::FluidMode::Metric
                                           : geomatch::FluidMode::Cardinality;
    *out = new geomatch_fluid{geomatch::init_fluid(k, c, unbounded_c != 0 || c < 0.0,
                                                   lmax, m, to_init(init_kind))};
  });
}

geomatch_status geomatch_fluid_integrate(geomatch_fluid* fl, double t_end, double dt) {
  return guarded([&] {
    if (!fl) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "fluid handle is null");
    geomatch::IntegrateOptions opt;
    opt.dt = dt;
    geomatch::integrate(fl->rep, t_end, opt);
  });
}

double geomatch_fluid_time(const geomatch_fluid* fl) { return fl ? fl->rep.t : 0.0; }

double geomatch_fluid_mass(const geomatch_fluid* fl) {
  return fl ? geomatch::sum_f(fl->rep) : 0.0;
}

double geomatch_fluid_length_sum(const geomatch_fluid* fl) {
  return fl ? geomatch::length_sum(fl->rep) : 0.0;
}

double geomatch_fluid_matched_fraction(const geomatch_fluid* fl) {
  return fl ? 1.0 - geomatch::sum_f(fl->rep) : 0.0;
}

double geomatch_fluid_kappa_prediction(const geomatch_fluid* fl) {
  return fl ? geomatch::kappa_prediction(fl->rep) : 0.0;
}

double geomatch_fluid_second_moment(const geomatch_fluid* fl) {
  if (!fl) return 0.0;
  double s = 0.0;
  const double invk = 1.0 / double(fl->rep.k);
  for (size_t l = 1; l < fl->rep.f.size(); ++l) {
    double x = double(l) * invk;
    s += x * x * fl->rep.f[l];
  }
  return 0.25 * s;
}

double geomatch_fluid_cumulative_length(const geomatch_fluid* fl) {
  return fl ? fl->rep.cum_length : 0.0;
}

double geomatch_fluid_tail_mass(const geomatch_fluid* fl) {
  return fl ? fl->rep.tail_mass : 0.0;
}

void geomatch_fluid_free(geomatch_fluid* fl) { delete fl; }

geomatch_status geomatch_competitive_ratio(double c, uint32_t k, double dt,
                                           uint32_t lmax, double* out) {
  return guarded([&] {
    if (!out) geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "out is null");
    *out = geomatch::competitive_ratio(c, k, dt, lmax);
  });
}

geomatch_status geomatch_run_experiment(const char* config_text, char** json_out) {
  return guarded([&] {
    if (!config_text)
      geomatch::fail(GEOMATCH_ERR_INVALID_ARGUMENT, "config text is null");
    geomatch::Config cfg = geomatch::parse_config_text(config_text);
    geomatch::RunSummary summary = geomatch::run_experiment(cfg);
    std::string json = geomatch::summary_to_json(cfg, summary);
    if (json_out) {
      *json_out = static_cast<char*>(std::malloc(json.size() + 1));
      if (!*json_out) geomatch::fail(GEOMATCH_ERR_INTERNAL, "out of memory");
      std::memcpy(*json_out, json.c_str(), json.size() + 1);
    }
  });
}

void geomatch_string_free(char* s) { std::free(s); }

}  // extern "C"
