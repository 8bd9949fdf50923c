#pragma once

#include <stdexcept>
#include <string>

#include "geomatch.h"

namespace geomatch {

// Library error: carries the C status code across the internal/external
// boundary. Thrown by core functions, translated to geomatch_status in the
// C API layer.
class Error : public std::runtime_error {
 public:
  Error(geomatch_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  geomatch_status status() const { return status_; }

 private:
  geomatch_status status_;
};

[[noreturn]] inline void fail(geomatch_status status, const std::string& what) {
  throw Error(status, what);
}

inline const char* status_name(geomatch_status s) {
  switch (s) {
    case GEOMATCH_OK: return "ok";
    case GEOMATCH_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case GEOMATCH_ERR_EMPTY_ENSEMBLE: return "empty_ensemble";
    case GEOMATCH_ERR_GRID_TOO_FINE: return "grid_too_fine";
    case GEOMATCH_ERR_INSTANCE_TOO_LARGE: return "instance_too_large";
    case GEOMATCH_ERR_NOT_ON_GRID: return "not_on_grid";
    case GEOMATCH_ERR_FREE_SET_EXHAUSTED: return "free_set_exhausted";
    case GEOMATCH_ERR_DEGENERATE_STATE: return "degenerate_state";
    case GEOMATCH_ERR_SINGULAR_TIME: return "singular_time";
    case GEOMATCH_ERR_INTEGRATION_DIVERGED: return "integration_diverged";
    case GEOMATCH_ERR_CONFIG: return "config_error";
    case GEOMATCH_ERR_IO: return "io_error";
    case GEOMATCH_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

}  // namespace geomatch
