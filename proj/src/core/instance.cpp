#include "core/instance.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/status.hpp"

namespace geomatch {

PointSet gen_uniform(uint64_t n, Rng& rng) {
  if (n == 0) fail(GEOMATCH_ERR_EMPTY_ENSEMBLE, "gen_uniform: n must be >= 1");
  PointSet ps;
  ps.gen_mode = GenMode::UniformIID;
  ps.n_nominal = n;
  ps.arrival_order.reserve(n);
  for (uint64_t i = 0; i < n; ++i) ps.arrival_order.push_back(rng.next_double());
  ps.coords = ps.arrival_order;
  std::sort(ps.coords.begin(), ps.coords.end());
  return ps;
}

PointSet gen_ppp(double intensity, Rng& rng) {
  if (!(intensity > 0.0))
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "gen_ppp: intensity must be > 0");
  PointSet ps;
  ps.gen_mode = GenMode::PoissonProcess;
  ps.n_nominal = uint64_t(intensity);
  double u = rng.next_exp(intensity);
  while (u < 1.0) {
    ps.coords.push_back(u);
    u += rng.next_exp(intensity);
  }
  ps.arrival_order = ps.coords;  // renewal order == coordinate order
  return ps;
}

PointSet rounding_pipeline(const PointSet& x, uint64_t n, uint32_t k, Rng& rng,
                           RoundingReport* report) {
  if (k < 1) fail(GEOMATCH_ERR_INVALID_ARGUMENT, "rounding_pipeline: k must be >= 1");
  if (n == 0) fail(GEOMATCH_ERR_EMPTY_ENSEMBLE, "rounding_pipeline: n must be >= 1");
  if (x.gen_mode != GenMode::UniformIID)
    fail(GEOMATCH_ERR_INVALID_ARGUMENT, "rounding_pipeline: input must be uniform i.i.d.");
  if (n > std::numeric_limits<uint64_t>::max() / k || n * uint64_t(k) > (1ULL << 53))
    fail(GEOMATCH_ERR_GRID_TOO_FINE, "rounding_pipeline: n*k grid index overflows");

  RoundingReport rep;
  rep.n_input = x.coords.size();

  // Poissonization: resize the set to a Poisson(n) count.
  std::vector<double> u = x.coords;
  rep.n_poisson = sample_poisson(double(n), rng);
  if (rep.n_poisson > u.size()) {
    rep.added = rep.n_poisson - u.size();
    for (uint64_t i = 0; i < rep.added; ++i) u.push_back(rng.next_double());
  } else if (rep.n_poisson < u.size()) {
    rep.removed = u.size() - rep.n_poisson;
    for (uint64_t i = 0; i < rep.removed; ++i) {
      uint64_t victim = rng.next_below(u.size());
      u[victim] = u.back();
      u.pop_back();
    }
  }

  // Rounding: floor to the 1/(n*k) grid. The boundary atom u=1 goes to the
  // last cell.
  const uint64_t grid = n * uint64_t(k);
  std::vector<uint64_t> cells;
  cells.reserve(u.size());
  for (double v : u) {
    uint64_t cell = uint64_t(v * double(grid));
    if (cell >= grid) cell = grid - 1;
    cells.push_back(cell);
  }

  // Discarding: coincident rounded points collapse to one per cell. The
  // rounded coordinates are identical, so which one survives is immaterial.
  std::sort(cells.begin(), cells.end());
  uint64_t before = cells.size();
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  rep.discarded = before - cells.size();

  // Gluing: unit circle, vertex at 0.
  if (cells.empty() || cells.front() != 0) {
    cells.insert(cells.begin(), 0);
    rep.origin_added = true;
  }

  PointSet out;
  out.gen_mode = GenMode::RoundedGrid;
  out.n_nominal = n;
  out.coords.reserve(cells.size());
  for (uint64_t cell : cells) out.coords.push_back(double(cell) / double(grid));
  rep.final_count = out.coords.size();
  if (report) *report = rep;
  return out;
}

GeomInstance make_uniform_instance(uint64_t n, uint64_t n_online, double c,
                                   bool c_unbounded, Topology topology, Rng& rng) {
  GeomInstance inst;
  inst.n = n;
  inst.c = c;
  inst.c_unbounded = c_unbounded;
  inst.topology = topology;
  inst.offline = gen_uniform(n, rng);
  // Circle instances carry the glued vertex at coordinate 0.
  if (topology == Topology::Circle && inst.offline.coords.front() != 0.0)
    inst.offline.coords.insert(inst.offline.coords.begin(), 0.0);
  if (n_online > 0) inst.online = gen_uniform(n_online, rng).arrival_order;
  return inst;
}

GeomInstance make_rounded_instance(uint64_t n, uint64_t n_online, double c,
                                   bool c_unbounded, uint32_t k, Rng& rng,
                                   RoundingReport* report) {
  GeomInstance inst;
  inst.n = n;
  inst.c = c;
  inst.c_unbounded = c_unbounded;
  inst.k = k;
  inst.topology = Topology::Circle;
  PointSet raw = gen_uniform(n, rng);
  inst.offline = rounding_pipeline(raw, n, k, rng, report);
  if (n_online > 0) inst.online = gen_uniform(n_online, rng).arrival_order;
  return inst;
}

void write_instance(const GeomInstance& inst, std::ostream& os) {
  char buf[64];
  os << "geomatch-instance v1 N=" << inst.n << " c=";
  if (inst.c_unbounded) {
    os << "inf";
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", inst.c);
    os << buf;
  }
  os << " k=" << inst.k
     << " topology=" << (inst.topology == Topology::Circle ? "circle" : "line") << "\n";
  for (double v : inst.offline.coords) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << "\n";
  }
  os << "\n";
  for (double v : inst.online) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << "\n";
  }
}

GeomInstance read_instance(std::istream& is) {
  std::string header;
  if (!std::getline(is, header))
    fail(GEOMATCH_ERR_IO, "read_instance: missing header");
  GeomInstance inst;
  char cbuf[32] = {0};
  char topo[16] = {0};
  unsigned long long n = 0;
  unsigned k = 0;
  if (std::sscanf(header.c_str(), "geomatch-instance v1 N=%llu c=%31s k=%u topology=%15s",
                  &n, cbuf, &k, topo) != 4)
    fail(GEOMATCH_ERR_IO, "read_instance: bad header: " + header);
  inst.n = n;
  inst.k = k;
  if (std::strcmp(cbuf, "inf") == 0) {
    inst.c_unbounded = true;
    inst.c = 0.0;
  } else {
    inst.c = std::strtod(cbuf, nullptr);
  }
  if (std::strcmp(topo, "circle") == 0)
    inst.topology = Topology::Circle;
  else if (std::strcmp(topo, "line") == 0)
    inst.topology = Topology::Line;
  else
    fail(GEOMATCH_ERR_IO, "read_instance: bad topology: " + std::string(topo));

  std::string line;
  bool in_online = false;
  while (std::getline(is, line)) {
    if (line.empty()) {
      if (in_online) break;
      in_online = true;
      continue;
    }
    double v = std::strtod(line.c_str(), nullptr);
    if (in_online)
      inst.online.push_back(v);
    else
      inst.offline.coords.push_back(v);
  }
  if (!std::is_sorted(inst.offline.coords.begin(), inst.offline.coords.end()))
    fail(GEOMATCH_ERR_IO, "read_instance: offline block not sorted");
  inst.offline.n_nominal = inst.n;
  inst.offline.gen_mode = inst.k > 0 ? GenMode::RoundedGrid : GenMode::UniformIID;
  return inst;
}

void save_instance(const GeomInstance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(GEOMATCH_ERR_IO, "save_instance: cannot open " + path);
  write_instance(inst, os);
  if (!os) fail(GEOMATCH_ERR_IO, "save_instance: write failed for " + path);
}

GeomInstance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(GEOMATCH_ERR_IO, "load_instance: cannot open " + path);
  return read_instance(is);
}

}  // namespace geomatch
