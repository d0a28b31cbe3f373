#ifndef ENCL_ERRORS_HPP
#define ENCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace encl {

// Error categories map onto CLI exit codes: config -> 2, numerical -> 3,
// validation -> 4.
enum class Errc {
  config_error,
  underresolved_obstacle,
  non_positive_contrast,
  unsupported_surface_shape,
  out_of_bounds,
  probe_outside_grid,
  probe_intersects_surface,
  nan_detected,
  non_monotone_time,
  incomplete_run,
  singular_point,
  missing_tau,
  insufficient_data,
  sign_inconsistent,
  no_usable_probes,
  overlap_error,
  unknown_suite,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::config_error: return "config error";
    case Errc::underresolved_obstacle: return "underresolved obstacle";
    case Errc::non_positive_contrast: return "non-positive contrast";
    case Errc::unsupported_surface_shape: return "unsupported surface shape";
    case Errc::out_of_bounds: return "out of bounds";
    case Errc::probe_outside_grid: return "probe outside grid";
    case Errc::probe_intersects_surface: return "probe intersects surface";
    case Errc::nan_detected: return "non-finite field";
    case Errc::non_monotone_time: return "non-monotone time";
    case Errc::incomplete_run: return "incomplete run";
    case Errc::singular_point: return "singular point";
    case Errc::missing_tau: return "missing tau";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::sign_inconsistent: return "sign inconsistent";
    case Errc::no_usable_probes: return "no usable probes";
    case Errc::overlap_error: return "overlap";
    case Errc::unknown_suite: return "unknown suite";
    case Errc::io_error: return "io error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace encl

#endif
