// Finite-difference residuals of the wave and Klein-Gordon-Fock operators.
#pragma once

#include "lwp/core.hpp"
#include "lwp/solutions.hpp"

#include <array>
#include <functional>
#include <optional>

namespace lwp {

using FieldFn = std::function<LogComplexField(const SpacetimePoint&)>;

struct ResidualReport {
  SpacetimePoint point;
  double h = 0.0;
  double residual = 0.0;       // |box u + m^2 u| / normalization
  double normalization = 0.0;  // max(|u_tt|, |Laplacian u|, m^2 |u|), center value scaled to 1
  std::optional<double> order_estimate;
};

// Second-order central differences of (d_tt - Laplacian + m^2) u. Stencil values are
// divided by the center value in log space before differencing.
ResidualReport fd_residual(const FieldFn& field, const SpacetimePoint& pt, double h, double m);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

// Tensor grid over (t, z, r_perp[x_index]); other coordinates are taken from base.
struct GridSpec {
  SpacetimePoint base;
  GridAxis t, z, x;
  int x_index = 0;
  std::size_t size() const {
    return static_cast<std::size_t>(t.n) * static_cast<std::size_t>(z.n) *
           static_cast<std::size_t>(x.n);
  }
  SpacetimePoint point(std::size_t idx) const;
};

struct ScanResult {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  SpacetimePoint worst_point;
  std::size_t points = 0;
};

// threads <= 0 uses std::thread::hardware_concurrency(). Reduction runs in grid-index order.
ScanResult residual_scan(const FieldFn& field, const GridSpec& grid, double h, double m,
                         int threads = 0);

struct ConvergenceResult {
  std::array<double, 3> h{};
  std::array<double, 3> residual{};
  double order = 0.0;  // log2 slope between h0 and h0/4, halved
  bool floor_limited = false;
  double floor = 0.0;  // smallest residual when floor_limited
};

// Richardson slope of the residual at h0, h0/2, h0/4.
ConvergenceResult convergence_order(const FieldFn& field, const SpacetimePoint& pt, double m,
                                    double h0);

// Same slope, using the grid-wide maximum residual at each step.
ConvergenceResult scan_convergence(const FieldFn& field, const GridSpec& grid, double m,
                                   double h0, int threads = 0);

}  // namespace lwp
