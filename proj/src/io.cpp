#include "encl/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "encl/errors.hpp"

namespace encl {

using nlohmann::json;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail(Errc::io_error, "cannot create directory " + path);
}

void write_volume(const std::string& base_path, const ScalarField3& field,
                  double time, const std::string& name) {
  const Grid3& g = field.grid;
  std::ofstream raw(base_path + ".raw", std::ios::binary);
  if (!raw) fail(Errc::io_error, "cannot open " + base_path + ".raw");
  std::vector<float> buf(field.values.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = (float)field.values[i];
  raw.write(reinterpret_cast<const char*>(buf.data()),
            (std::streamsize)(buf.size() * sizeof(float)));
  if (!raw) fail(Errc::io_error, "short write to " + base_path + ".raw");

  json side = {
      {"dims", {g.nx, g.ny, g.nz}},
      {"origin", {g.origin.x, g.origin.y, g.origin.z}},
      {"spacing", g.h},
      {"time", time},
      {"name", name},
  };
  write_json(base_path + ".json", side);
}

VolumeData read_volume(const std::string& base_path) {
  json side = read_json(base_path + ".json");
  VolumeData out;
  Grid3 g;
  g.nx = side.at("dims")[0];
  g.ny = side.at("dims")[1];
  g.nz = side.at("dims")[2];
  g.origin = {side.at("origin")[0], side.at("origin")[1], side.at("origin")[2]};
  g.h = side.at("spacing");
  out.time = side.at("time");
  out.name = side.at("name");
  out.field = ScalarField3(g);
  std::ifstream raw(base_path + ".raw", std::ios::binary);
  if (!raw) fail(Errc::io_error, "cannot open " + base_path + ".raw");
  std::vector<float> buf(g.size());
  raw.read(reinterpret_cast<char*>(buf.data()),
           (std::streamsize)(buf.size() * sizeof(float)));
  if ((std::size_t)raw.gcount() != buf.size() * sizeof(float))
    fail(Errc::io_error, "truncated volume " + base_path + ".raw");
  for (std::size_t i = 0; i < buf.size(); ++i) out.field.values[i] = buf[i];
  return out;
}

namespace {

struct CsvFile {
  std::FILE* f;
  explicit CsvFile(const std::string& path) : f(std::fopen(path.c_str(), "w")) {
    if (!f) fail(Errc::io_error, "cannot open " + path);
  }
  ~CsvFile() { if (f) std::fclose(f); }
};

}  // namespace

void write_traces_csv(const std::string& path, const TraceBuffer& traces,
                      const SurfacePatchSet& patches, int decimate_nodes) {
  CsvFile csv(path);
  std::fprintf(csv.f, "level,t,node,u_on,u_inner,u_outer\n");
  const std::size_t nn = patches.nodes.size();
  const int step = std::max(1, decimate_nodes);
  for (int n = 0; n <= traces.n_intervals; ++n) {
    auto lv = traces.level(n);
    for (std::size_t node = 0; node < nn; node += step)
      std::fprintf(csv.f, "%d,%.17g,%zu,%.17g,%.17g,%.17g\n", n, n * traces.dt,
                   node, lv[3 * node], lv[3 * node + 1], lv[3 * node + 2]);
  }
}

void write_transform_csv(const std::string& path, const SurfaceTransform& transform,
                         const SurfacePatchSet& patches) {
  CsvFile csv(path);
  std::fprintf(csv.f, "node,x,y,z,tau,w_on,dwdn\n");
  for (std::size_t ti = 0; ti < transform.taus.size(); ++ti)
    for (std::size_t n = 0; n < transform.n_nodes; ++n) {
      const Vec3& p = patches.nodes[n].position;
      std::fprintf(csv.f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", n, p.x, p.y,
                   p.z, transform.taus[ti], transform.at_on(ti, n),
                   transform.at_dwdn(ti, n));
    }
}

void write_indicator_csv(const std::string& path, const IndicatorSeries& series) {
  CsvFile csv(path);
  std::fprintf(csv.f, "tau,indicator,log_abs,naive_d,above_floor,used_in_fit\n");
  for (const auto& e : series.entries)
    std::fprintf(csv.f, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", e.tau, e.value,
                 e.above_floor ? e.log_abs : 0.0, e.above_floor ? e.naive_d : 0.0,
                 e.above_floor ? 1 : 0, e.used_in_fit ? 1 : 0);
}

json report_to_json(const RunReport& r) {
  json e = json::array();
  for (const auto& s : r.energy) e.push_back({{"step", s.step}, {"value", s.value}});
  return json{{"steps", r.steps},
              {"dt", r.dt},
              {"T", r.T},
              {"wall_seconds", r.wall_seconds},
              {"max_abs_u", r.max_abs_u},
              {"max_abs_u_final", r.max_abs_u_final},
              {"cells", r.cells},
              {"cell_rate", r.cell_rate},
              {"energy", e}};
}

json fit_to_json(const IndicatorFit& f) {
  return json{{"d_hat", f.d_hat},       {"q_hat", f.q_hat},
              {"c_hat", f.c_hat},       {"residual", f.residual},
              {"tau_lo", f.tau_lo},     {"tau_hi", f.tau_hi},
              {"n_used", f.n_used},     {"naive_d_at_max_tau", f.naive_d_at_max_tau}};
}

json series_to_json(const IndicatorSeries& s) {
  json entries = json::array();
  for (const auto& e : s.entries) {
    json entry{{"tau", e.tau},
               {"indicator", e.value},
               {"above_floor", e.above_floor},
               {"used_in_fit", e.used_in_fit}};
    entry["naive_d"] = e.above_floor ? json(e.naive_d) : json();
    entries.push_back(entry);
  }
  json out{{"entries", entries}, {"sign_consensus", to_string(s.consensus)}};
  if (s.fit) out["fit"] = fit_to_json(*s.fit);
  return out;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) fail(Errc::io_error, "cannot open " + path);
  f << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open " + path);
  return json::parse(f);
}

}  // namespace encl
