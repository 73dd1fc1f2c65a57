#include "lwp/verify.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace lwp {

namespace {

constexpr double kFloor = 1e-13;

ConvergenceResult slope_from(const std::array<double, 3>& h, const std::array<double, 3>& r) {
  ConvergenceResult c;
  c.h = h;
  c.residual = r;
  const bool monotone = r[1] < r[0] && r[2] < r[1];
  if (!monotone || r[2] < kFloor) {
    c.floor_limited = true;
    c.floor = *std::min_element(r.begin(), r.end());
  }
  c.order = (r[0] > 0.0 && r[2] > 0.0) ? std::log2(r[0] / r[2]) / 2.0 : 0.0;
  return c;
}

}  // namespace

ResidualReport fd_residual(const FieldFn& field, const SpacetimePoint& pt, double h, double m) {
  if (!(h > 0.0)) throw ParameterError("fd_residual: h must be > 0");
  const cplx l0 = field(pt).log_value();
  if (!std::isfinite(l0.real())) throw EvaluationError("fd_residual: center value not finite");
  auto rel = [&](const SpacetimePoint& q) {
    const cplx l = field(q).log_value();
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
      throw EvaluationError("fd_residual: stencil value not finite");
    return std::exp(l - l0);
  };
  const int n = static_cast<int>(pt.r_perp.size());
  auto second = [&](int axis) {
    SpacetimePoint a = pt, b = pt;
    if (axis == 0) {
      a.t += h;
      b.t -= h;
    } else if (axis == 1) {
      a.z += h;
      b.z -= h;
    } else {
      a.r_perp(axis - 2) += h;
      b.r_perp(axis - 2) -= h;
    }
    return (rel(a) - 2.0 + rel(b)) / (h * h);
  };
  const cplx utt = second(0);
  cplx lap = 0.0;
  for (int a = 1; a < n + 2; ++a) lap += second(a);
  ResidualReport r;
  r.point = pt;
  r.h = h;
  r.normalization = std::max({std::abs(utt), std::abs(lap), m * m});
  if (!(r.normalization > 0.0)) throw DomainError("fd_residual: degenerate point");
  r.residual = std::abs(utt - lap + m * m) / r.normalization;
  return r;
}

SpacetimePoint GridSpec::point(std::size_t idx) const {
  const std::size_t nx = static_cast<std::size_t>(x.n), nz = static_cast<std::size_t>(z.n);
  const int ix = static_cast<int>(idx % nx);
  const int iz = static_cast<int>((idx / nx) % nz);
  const int it = static_cast<int>(idx / (nx * nz));
  SpacetimePoint p = base;
  p.t = t.at(it);
  p.z = z.at(iz);
  p.r_perp(x_index) = x.at(ix);
  return p;
}

ScanResult residual_scan(const FieldFn& field, const GridSpec& grid, double h, double m,
                         int threads) {
  if (grid.t.n < 1 || grid.z.n < 1 || grid.x.n < 1)
    throw ParameterError("residual_scan: empty grid");
  if (grid.x_index < 0 || grid.x_index >= grid.base.r_perp.size())
    throw DimensionError("residual_scan: x_index out of range");
  const std::size_t total = grid.size();
  std::vector<double> res(total, 0.0);
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::max(1, std::min<int>(nt, static_cast<int>(total)));
  std::vector<std::exception_ptr> errors(nt);
  std::vector<std::size_t> error_index(nt, total);
  auto work = [&](int w) {
    for (std::size_t i = w; i < total; i += nt) {
      try {
        res[i] = fd_residual(field, grid.point(i), h, m).residual;
      } catch (...) {
        errors[w] = std::current_exception();
        error_index[w] = i;
        return;
      }
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  // Report the failure at the lowest grid index for reproducibility.
  int first = -1;
  for (int w = 0; w < nt; ++w)
    if (errors[w] && (first < 0 || error_index[w] < error_index[first])) first = w;
  if (first >= 0) std::rethrow_exception(errors[first]);

  ScanResult out;
  out.points = total;
  std::size_t worst = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    sum += res[i];
    if (res[i] > res[worst]) worst = i;
  }
  out.max_residual = res[worst];
  out.mean_residual = sum / static_cast<double>(total);
  out.worst_point = grid.point(worst);
  return out;
}

ConvergenceResult convergence_order(const FieldFn& field, const SpacetimePoint& pt, double m,
                                    double h0) {
  std::array<double, 3> h{h0, h0 / 2, h0 / 4}, r{};
  for (int i = 0; i < 3; ++i) r[i] = fd_residual(field, pt, h[i], m).residual;
  return slope_from(h, r);
}

ConvergenceResult scan_convergence(const FieldFn& field, const GridSpec& grid, double m,
                                   double h0, int threads) {
  std::array<double, 3> h{h0, h0 / 2, h0 / 4}, r{};
  for (int i = 0; i < 3; ++i) r[i] = residual_scan(field, grid, h[i], m, threads).max_residual;
  return slope_from(h, r);
}

}  // namespace lwp
