#ifndef ENCL_IO_HPP
#define ENCL_IO_HPP

#include <string>

#include "encl/grid.hpp"
#include "encl/indicator.hpp"
#include "encl/laplace.hpp"
#include "encl/surface.hpp"
#include "encl/wave.hpp"

#include "json.hpp"

namespace encl {

/// Volume snapshots: <base>.raw holds little-endian float32, x-fastest, plus
/// a <base>.json sidecar {dims, origin, spacing, time, name}.
void write_volume(const std::string& base_path, const ScalarField3& field,
                  double time, const std::string& name);

struct VolumeData {
  ScalarField3 field;
  double time = 0.0;
  std::string name;
};
VolumeData read_volume(const std::string& base_path);

void write_traces_csv(const std::string& path, const TraceBuffer& traces,
                      const SurfacePatchSet& patches, int decimate_nodes = 1);

void write_transform_csv(const std::string& path, const SurfaceTransform& transform,
                         const SurfacePatchSet& patches);

void write_indicator_csv(const std::string& path, const IndicatorSeries& series);

nlohmann::json report_to_json(const RunReport& report);
nlohmann::json fit_to_json(const IndicatorFit& fit);
nlohmann::json series_to_json(const IndicatorSeries& series);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

void ensure_dir(const std::string& path);

}  // namespace encl

#endif
