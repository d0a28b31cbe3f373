#ifndef ENCL_CONFIG_HPP
#define ENCL_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "encl/fields.hpp"
#include "encl/indicator.hpp"
#include "encl/shape.hpp"
#include "encl/surface.hpp"
#include "encl/wave.hpp"

#include "json.hpp"

namespace encl {

enum class IndicatorMode { Reference, Direct };

struct TauSpec {
  double min = 4.0;
  double max = 12.0;
  int count = 9;
  bool geometric = false;
  std::vector<double> values() const;
};

struct ObstacleSpec {
  Shape shape;
  bool sound_hard = true;
  double contrast = 1.0;  // penetrable only
  ObstacleKind kind() const {
    return sound_hard ? ObstacleKind::SoundHard : penetrable_kind(contrast);
  }
};

struct GridSpec {
  double h = 0.1;
  std::optional<Vec3> lo, hi;  // explicit bounds; otherwise auto from the scene
  int margin_cells = -1;       // gap between scene hull and sponge; -1 = 2x sponge
};

struct SolverSpec {
  double cfl = 0.9;
  double T = 0.0;          // used when t_auto is false
  bool t_auto = true;      // derive T from the scene per probe
  double T_factor = 1.25;  // multiplies the minimal admissible window
  std::optional<double> distance_bound;  // obstacle distance bound when truth hidden
  SpongeSpec sponge;
  SourceSampling source_sampling = SourceSampling::SphericalMean;
  int threads = 1;
  int nan_check_every = 25;
  int energy_every = 0;
};

struct OutputSpec {
  std::string dir = "out";
  int snapshot_every = 0;
  bool write_traces = false;
  int trace_decimate = 1;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<ObstacleSpec> obstacle;  // absent = free space
  std::optional<Shape> surface;          // required for indicator/reconstruct
  GridSpec grid;
  std::vector<ProbeBall> probes;
  SolverSpec solver;
  TauSpec tau;
  int surface_resolution = 48;
  IndicatorMode mode = IndicatorMode::Reference;
  double floor_factor = 1e3;
  double safety = 0.02;
  bool oracle_check = false;
  std::vector<Vec3> record_points;  // extra sample points for the forward command
  OutputSpec output;

  static RunConfig from_json(const nlohmann::json& j, const std::string& source);
  static RunConfig from_file(const std::string& path);
  /// Fully resolved echo; feeding it back reproduces the run.
  nlohmann::json to_json() const;
};

Shape shape_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json shape_to_json(const Shape& s);

/// Materialized scene: grid sized around surface, probes and obstacle with
/// the sponge shell outside a clear margin, plus medium maps and surface
/// quadrature. Validates the geometric separation constraints.
struct Scene {
  Grid3 grid;
  std::optional<CellMask> mask;
  std::optional<ScalarField3> gamma;
  SurfacePatchSet patches;
  double surface_area = 0.0;
};

Scene build_scene(const RunConfig& cfg);

/// Observation window for one probe: explicit T, or the minimal admissible
/// window scaled by T_factor (from the true obstacle when present, from the
/// distance bound or the surface diameter otherwise).
double resolve_T(const RunConfig& cfg, const ProbeBall& probe);

SolverConfig make_solver_config(const RunConfig& cfg, const Scene& scene,
                                const ProbeBall& probe, bool with_obstacle);

}  // namespace encl

#endif
