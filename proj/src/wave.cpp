#include "encl/wave.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "encl/errors.hpp"

namespace encl {

namespace {

// Compensated accumulator; reductions keep a fixed order.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void parallel_slabs(int nz, int threads, const std::function<void(int, int)>& fn) {
  if (threads <= 1 || nz < 2 * threads) {
    fn(0, nz);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (nz + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int k0 = t * chunk, k1 = std::min(nz, k0 + chunk);
    if (k0 >= k1) break;
    pool.emplace_back(fn, k0, k1);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

WaveSolver::WaveSolver(const SolverConfig& config, const ProbeBall& probe)
    : cfg_(config) {
  const Grid3& g = cfg_.grid;
  if (g.nx < 8 || g.ny < 8 || g.nz < 8)
    fail(Errc::config_error, "grid must have at least 8 cells per axis");
  if (cfg_.cfl <= 0.0 || cfg_.cfl > 1.0)
    fail(Errc::config_error, "cfl factor must lie in (0, 1]");
  if (cfg_.T < 0.0) fail(Errc::config_error, "final time must be nonnegative");
  if (cfg_.mask && cfg_.gamma)
    fail(Errc::config_error, "mask and gamma media are exclusive");
  if (cfg_.mask && (cfg_.mask->grid.size() != g.size()))
    fail(Errc::config_error, "mask grid does not match solver grid");
  if (cfg_.gamma && (cfg_.gamma->grid.size() != g.size()))
    fail(Errc::config_error, "gamma grid does not match solver grid");

  double c_max = 1.0;
  if (cfg_.gamma) {
    double gmax = 0.0;
    for (double v : cfg_.gamma->values) gmax = std::fmax(gmax, v);
    c_max = std::fmax(1.0, std::sqrt(gmax));
  }
  double dt_max = cfg_.cfl * g.h / (std::sqrt(3.0) * c_max);
  if (cfg_.force_dt) {
    dt_ = *cfg_.force_dt;
    if (dt_ <= 0.0 || dt_ > dt_max * (1.0 + 1e-12))
      fail(Errc::config_error, "forced step violates the stability bound");
    if (cfg_.T > 0.0) {
      n_total_ = (int)std::llround(cfg_.T / dt_);
      if (n_total_ < 1 || std::fabs(n_total_ * dt_ - cfg_.T) > 1e-9 * cfg_.T)
        fail(Errc::config_error, "forced step does not divide the final time");
    } else {
      n_total_ = 0;
    }
  } else if (cfg_.T > 0.0) {
    n_total_ = (int)std::ceil(cfg_.T / dt_max - 1e-12);
    dt_ = cfg_.T / n_total_;
  } else {
    n_total_ = 0;
    dt_ = dt_max;
  }

  // Probe must sit strictly inside the undamped interior.
  const double margin = cfg_.sponge.thickness * g.h;
  Vec3 lo = g.lo(), hi = g.hi();
  Vec3 blo = probe.center - Vec3{probe.radius, probe.radius, probe.radius};
  Vec3 bhi = probe.center + Vec3{probe.radius, probe.radius, probe.radius};
  if (!(blo.x > lo.x + margin && blo.y > lo.y + margin && blo.z > lo.z + margin &&
        bhi.x < hi.x - margin && bhi.y < hi.y - margin && bhi.z < hi.z - margin))
    fail(Errc::probe_outside_grid,
         "probe ball must lie strictly inside the grid and outside the sponge");
  if (probe.amplitude == 0.0)
    fail(Errc::config_error, "probe amplitude must be nonzero");
  if (cfg_.surface && dist_sets(probe.shape(), *cfg_.surface) <= 0.0)
    fail(Errc::probe_intersects_surface,
         "probe ball must not touch the recording surface");

  u_prev_.assign(g.size(), 0.0);
  u_curr_.assign(g.size(), 0.0);
  build_coefficients();
  build_sponge_profiles();
  apply_initial_data(probe);
  n_ = 1;
}

void WaveSolver::build_coefficients() {
  const Grid3& g = cfg_.grid;
  if (!cfg_.mask && !cfg_.gamma) return;  // uniform medium
  const std::size_t n = g.size();
  gx_.assign(n, 0.0f);
  gy_.assign(n, 0.0f);
  gz_.assign(n, 0.0f);
  auto fluid = [&](std::size_t idx) {
    return cfg_.mask->labels[idx] != (std::uint8_t)CellLabel::Solid;
  };
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t idx = g.idx(i, j, k);
        if (cfg_.mask) {
          bool f0 = fluid(idx);
          if (i + 1 < g.nx) gx_[idx] = (f0 && fluid(idx + 1)) ? 1.0f : 0.0f;
          if (j + 1 < g.ny) gy_[idx] = (f0 && fluid(idx + g.nx)) ? 1.0f : 0.0f;
          if (k + 1 < g.nz)
            gz_[idx] = (f0 && fluid(idx + (std::size_t)g.nx * g.ny)) ? 1.0f : 0.0f;
        } else {
          // Harmonic means handle coefficient jumps in divergence form.
          double g0 = cfg_.gamma->values[idx];
          auto hmean = [&](double a, double b) { return 2.0 * a * b / (a + b); };
          if (i + 1 < g.nx)
            gx_[idx] = (float)hmean(g0, cfg_.gamma->values[idx + 1]);
          if (j + 1 < g.ny)
            gy_[idx] = (float)hmean(g0, cfg_.gamma->values[idx + g.nx]);
          if (k + 1 < g.nz)
            gz_[idx] = (float)hmean(g0, cfg_.gamma->values[idx + (std::size_t)g.nx * g.ny]);
        }
      }
}

void WaveSolver::build_sponge_profiles() {
  const Grid3& g = cfg_.grid;
  const int t = cfg_.sponge.thickness;
  auto profile = [&](int n) {
    std::vector<double> s(n, 0.0);
    for (int i = 0; i < n; ++i) {
      int depth = 0;
      if (i < t) depth = t - i;
      if (i >= n - t) depth = std::max(depth, i - (n - t) + 1);
      if (depth > 0) {
        double xi = (double)depth / t;
        s[i] = cfg_.sponge.strength * std::pow(xi, cfg_.sponge.exponent);
      }
    }
    return s;
  };
  if (t > 0 && 2 * t < std::min({g.nx, g.ny, g.nz})) {
    sx_ = profile(g.nx);
    sy_ = profile(g.ny);
    sz_ = profile(g.nz);
  } else {
    if (t > 0) fail(Errc::config_error, "sponge shell thicker than the grid");
    sx_.assign(g.nx, 0.0);
    sy_.assign(g.ny, 0.0);
    sz_.assign(g.nz, 0.0);
  }
}

void WaveSolver::apply_initial_data(const ProbeBall& probe) {
  const Grid3& g = cfg_.grid;
  Shape ball = probe.shape();
  // u at level 0 is zero. For the second level the naive dt*f start carries
  // an O(dt) error in the jump shell of the indicator source (the exact
  // solution at dt is the spherical mean of f, not f itself), which then
  // radiates with the wavefronts and caps trace convergence at first order.
  // The mean is available in closed form, so level 1 is seeded with the
  // exact field at t = dt.
  const double scale = dt_ * probe.amplitude;
  auto [blo, bhi] = ball.bounding_box();
  const double reach = (cfg_.source_sampling == SourceSampling::CellCenter ? 0.0 : dt_) + g.h;
  if (cfg_.radial_source) {
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          Vec3 c = g.center(i, j, k);
          double f = cfg_.radial_source((c - probe.center).norm());
          if (f != 0.0) u_curr_[g.idx(i, j, k)] = scale * f;
        }
    return;
  }
  int i0 = std::max(0, (int)std::floor((blo.x - reach - g.origin.x) / g.h) - 1);
  int j0 = std::max(0, (int)std::floor((blo.y - reach - g.origin.y) / g.h) - 1);
  int k0 = std::max(0, (int)std::floor((blo.z - reach - g.origin.z) / g.h) - 1);
  int i1 = std::min(g.nx, (int)std::ceil((bhi.x + reach - g.origin.x) / g.h) + 1);
  int j1 = std::min(g.ny, (int)std::ceil((bhi.y + reach - g.origin.y) / g.h) + 1);
  int k1 = std::min(g.nz, (int)std::ceil((bhi.z + reach - g.origin.z) / g.h) + 1);
  const bool solid_masked = cfg_.mask != nullptr;
  for (int k = k0; k < k1; ++k)
    for (int j = j0; j < j1; ++j)
      for (int i = i0; i < i1; ++i) {
        Vec3 c = g.center(i, j, k);
        double u1;
        if (cfg_.source_sampling == SourceSampling::CellCenter) {
          u1 = ball.sdf(c) < 0.0 ? scale : 0.0;
        } else {
          u1 = free_space_oracle(c, dt_, probe);
        }
        if (u1 != 0.0) {
          std::size_t idx = g.idx(i, j, k);
          if (solid_masked && cfg_.mask->labels[idx] == (std::uint8_t)CellLabel::Solid)
            continue;  // sources live in the fluid
          u_curr_[idx] = u1;
        }
      }
}

void WaveSolver::step() {
  const Grid3& g = cfg_.grid;
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  const std::size_t sx_stride = 1, sy_stride = nx, sz_stride = (std::size_t)nx * ny;
  const double lam = dt_ * dt_ / (g.h * g.h);
  const double* up = u_prev_.data();
  const double* uc = u_curr_.data();
  // The previous level is consumed exactly once per cell, so the new level
  // is written over it in place.
  double* un = u_prev_.data();
  const bool uniform = gx_.empty();
  const float* gx = gx_.data();
  const float* gy = gy_.data();
  const float* gz = gz_.data();
  const double* sxp = sx_.data();

  auto update_rows = [&](int k0, int k1) {
    for (int k = k0; k < k1; ++k) {
      for (int j = 0; j < ny; ++j) {
        const std::size_t base = (std::size_t)nx * ((std::size_t)j + (std::size_t)ny * k);
        const double syz = sy_[j] + sz_[k];
        const bool has_n = j + 1 < ny, has_s = j > 0;
        const bool has_u = k + 1 < nz, has_d = k > 0;
        auto cell = [&](int i) {
          const std::size_t c = base + i;
          const double ucc = uc[c];
          double lap = 0.0;
          if (uniform) {
            if (i + 1 < nx) lap += uc[c + sx_stride] - ucc;
            if (i > 0) lap += uc[c - sx_stride] - ucc;
            if (has_n) lap += uc[c + sy_stride] - ucc;
            if (has_s) lap += uc[c - sy_stride] - ucc;
            if (has_u) lap += uc[c + sz_stride] - ucc;
            if (has_d) lap += uc[c - sz_stride] - ucc;
          } else {
            if (i + 1 < nx) lap += gx[c] * (uc[c + sx_stride] - ucc);
            if (i > 0) lap += gx[c - sx_stride] * (uc[c - sx_stride] - ucc);
            if (has_n) lap += gy[c] * (uc[c + sy_stride] - ucc);
            if (has_s) lap += gy[c - sy_stride] * (uc[c - sy_stride] - ucc);
            if (has_u) lap += gz[c] * (uc[c + sz_stride] - ucc);
            if (has_d) lap += gz[c - sz_stride] * (uc[c - sz_stride] - ucc);
          }
          const double s = syz + sxp[i];
          if (s == 0.0)
            un[c] = 2.0 * ucc - up[c] + lam * lap;
          else
            un[c] = ((2.0 - s * s) * ucc - (1.0 - s) * up[c] + lam * lap) / (1.0 + s);
        };

        if (!has_n || !has_s || !has_u || !has_d) {
          for (int i = 0; i < nx; ++i) cell(i);
          continue;
        }
        cell(0);
        if (syz == 0.0) {
          // Interior row: branch-free sweep, damping only near the x ends.
          int i = 1;
          for (; i < nx - 1 && sxp[i] != 0.0; ++i) cell(i);
          const int x_hi = nx - 1;
          int plain_end = i;
          while (plain_end < x_hi && sxp[plain_end] == 0.0) ++plain_end;
          if (uniform) {
            const double* ucn = uc + sy_stride;
            const double* ucs = uc - sy_stride;
            const double* ucu = uc + sz_stride;
            const double* ucd = uc - sz_stride;
            for (int ii = i; ii < plain_end; ++ii) {
              const std::size_t c = base + ii;
              const double ucc = uc[c];
              const double lap = uc[c + 1] + uc[c - 1] + ucn[c] + ucs[c] +
                                 ucu[c] + ucd[c] - 6.0 * ucc;
              un[c] = 2.0 * ucc - up[c] + lam * lap;
            }
          } else {
            for (int ii = i; ii < plain_end; ++ii) {
              const std::size_t c = base + ii;
              const double ucc = uc[c];
              const double lap = gx[c] * (uc[c + 1] - ucc) +
                                 gx[c - 1] * (uc[c - 1] - ucc) +
                                 gy[c] * (uc[c + sy_stride] - ucc) +
                                 gy[c - sy_stride] * (uc[c - sy_stride] - ucc) +
                                 gz[c] * (uc[c + sz_stride] - ucc) +
                                 gz[c - sz_stride] * (uc[c - sz_stride] - ucc);
              un[c] = 2.0 * ucc - up[c] + lam * lap;
            }
          }
          for (int ii = plain_end; ii < x_hi; ++ii) cell(ii);
          cell(x_hi);
        } else {
          for (int i = 1; i < nx - 1; ++i) cell(i);
          cell(nx - 1);
        }
      }
    }
  };

  parallel_slabs(nz, cfg_.threads, update_rows);

  u_prev_.swap(u_curr_);
  ++n_;
  if (cfg_.nan_check_every > 0 && n_ % cfg_.nan_check_every == 0) scan_field(n_);
}

void WaveSolver::scan_field(int step) {
  double m = 0.0;
  for (double v : u_curr_) {
    if (!std::isfinite(v))
      fail(Errc::nan_detected, "non-finite field value at step " + std::to_string(step));
    m = std::fmax(m, std::fabs(v));
  }
  max_abs_u_ = std::fmax(max_abs_u_, m);
}

double WaveSolver::energy() const {
  const Grid3& g = cfg_.grid;
  const double h = g.h;
  const double inv_dt = 1.0 / dt_;
  Kahan kin, pot;
  const double* uc = u_curr_.data();
  const double* up = u_prev_.data();
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = (uc[i] - up[i]) * inv_dt;
    kin.add(v * v);
  }
  const bool uniform = gx_.empty();
  const std::size_t sy = g.nx, sz = (std::size_t)g.nx * g.ny;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        std::size_t c = g.idx(i, j, k);
        if (i + 1 < g.nx) {
          double gf = uniform ? 1.0 : gx_[c];
          pot.add(gf * (uc[c + 1] - uc[c]) * (up[c + 1] - up[c]));
        }
        if (j + 1 < g.ny) {
          double gf = uniform ? 1.0 : gy_[c];
          pot.add(gf * (uc[c + sy] - uc[c]) * (up[c + sy] - up[c]));
        }
        if (k + 1 < g.nz) {
          double gf = uniform ? 1.0 : gz_[c];
          pot.add(gf * (uc[c + sz] - uc[c]) * (up[c + sz] - up[c]));
        }
      }
  return 0.5 * h * h * h * kin.sum + 0.5 * h * pot.sum;
}

ScalarField3 WaveSolver::snapshot() const {
  ScalarField3 f(cfg_.grid);
  f.values = u_curr_;
  return f;
}

double WaveSolver::sample(const Vec3& p) const {
  const Grid3& g = cfg_.grid;
  double fx = (p.x - g.origin.x) / g.h - 0.5;
  double fy = (p.y - g.origin.y) / g.h - 0.5;
  double fz = (p.z - g.origin.z) / g.h - 0.5;
  int i0 = (int)std::floor(fx), j0 = (int)std::floor(fy), k0 = (int)std::floor(fz);
  if (i0 < 0 || j0 < 0 || k0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny || k0 + 1 >= g.nz)
    fail(Errc::out_of_bounds, "tap point outside the cell-center hull");
  double tx = fx - i0, ty = fy - j0, tz = fz - k0;
  const double* u = u_curr_.data();
  auto v = [&](int di, int dj, int dk) { return u[g.idx(i0 + di, j0 + dj, k0 + dk)]; };
  double c00 = v(0, 0, 0) * (1 - tx) + v(1, 0, 0) * tx;
  double c10 = v(0, 1, 0) * (1 - tx) + v(1, 1, 0) * tx;
  double c01 = v(0, 0, 1) * (1 - tx) + v(1, 0, 1) * tx;
  double c11 = v(0, 1, 1) * (1 - tx) + v(1, 1, 1) * tx;
  return (c00 * (1 - ty) + c10 * ty) * (1 - tz) + (c01 * (1 - ty) + c11 * ty) * tz;
}

RunReport WaveSolver::run() {
  RunHooks hooks;
  return run(hooks);
}

RunReport WaveSolver::run(RunHooks& hooks) {
  RunReport rep;
  rep.dt = dt_;
  rep.T = cfg_.T;
  rep.cells = cfg_.grid.size();
  if (n_total_ == 0) return rep;

  for (const auto& tap : hooks.taps)
    for (const auto& p : tap.points)
      if (!trilinear_in_range(cfg_.grid, p))
        fail(Errc::out_of_bounds, "tap point outside the grid interior");

  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> buf;
  auto fire = [&](int level, bool zeros) {
    for (auto& tap : hooks.taps) {
      if (!tap.on_sample) continue;
      buf.resize(tap.points.size());
      if (zeros)
        std::fill(buf.begin(), buf.end(), 0.0);
      else
        for (std::size_t i = 0; i < tap.points.size(); ++i) buf[i] = sample(tap.points[i]);
      tap.on_sample(level, level * dt_, buf);
    }
    if (hooks.snapshot_every > 0 && hooks.on_snapshot && level % hooks.snapshot_every == 0)
      hooks.on_snapshot(level, level * dt_, snapshot());
  };

  fire(0, true);
  fire(1, false);
  int sweeps = 0;
  while (n_ < n_total_) {
    step();
    ++sweeps;
    if (cfg_.energy_every > 0 && n_ % cfg_.energy_every == 0)
      rep.energy.push_back({n_, energy()});
    fire(n_, false);
  }
  scan_field(n_);
  rep.max_abs_u = max_abs_u_;
  double mf = 0.0;
  for (double v : u_curr_) mf = std::fmax(mf, std::fabs(v));
  rep.max_abs_u_final = mf;
  rep.steps = sweeps;
  auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.cell_rate = rep.wall_seconds > 0 ? rep.steps * (double)rep.cells / rep.wall_seconds : 0.0;
  return rep;
}

double free_space_oracle(const Vec3& x, double t, const ProbeBall& probe) {
  if (t <= 0.0) return 0.0;
  double d = (x - probe.center).norm();
  return probe.amplitude * sphere_ball_cap_area(d, t, probe.radius) / (4.0 * M_PI * t);
}

}  // namespace encl
