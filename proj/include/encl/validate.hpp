#ifndef ENCL_VALIDATE_HPP
#define ENCL_VALIDATE_HPP

#include <string>
#include <vector>

#include "encl/config.hpp"
#include "encl/reconstruct.hpp"

#include "json.hpp"

namespace encl {

struct CheckLine {
  std::string label;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "in" ...
  bool pass = false;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<CheckLine> checks;
  nlohmann::json extra;  // suite-specific measurements
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  bool quick = false;  // shrink the long-running suites for smoke testing
};

/// Registered suites: yukawa, free-oracle, energy, prop11, lemma-bands,
/// sponge, e2e-soundhard, e2e-penetrable, time-violation, multiprobe.
/// Throws unknown_suite.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opts);
std::vector<std::string> suite_names();

nlohmann::json suite_to_json(const SuiteResult& r);
void print_suite(const SuiteResult& r);

/// Canonical end-to-end configuration: unit-sphere obstacle, spherical
/// recording surface of radius 3, probe ball of radius 1/2 centered at
/// (6,0,0); true obstacle-probe distance 4.5.
RunConfig canonical_e2e_config(bool sound_hard, double contrast, double T,
                               const SuiteOptions& opts);

/// Canonical six-probe carving configuration around the unit sphere.
RunConfig canonical_multiprobe_config(const SuiteOptions& opts);

}  // namespace encl

#endif
