// Shared fixtures for the unit tests.
#pragma once

#include "lwp/gamma.hpp"
#include "lwp/solutions.hpp"

#include <random>

namespace lwp::test {

// Parameters of configs/fig*.json: gamma = 800, tau = 8e5, m = 1.
inline GammaCurve fig1_curve(double scale = 1.0) {
  return build_general_astigmatic(1.0 * scale, 3000.0 * scale, 14.0 * scale, 9000.0 * scale,
                                  cplx(0.0, -0.31));
}

// Same shape with gamma, tau and the Gamma0 lengths scaled so that p = target_p (m = 1).
inline PacketParams fig1_packet_at_p(double target_p, double mu = 0.5, int d = 2) {
  const double s = target_p / std::sqrt(800.0 * 8e5);
  GammaCurve c = d == 2 ? fig1_curve(s) : stigmatic_curve(d, 3000.0 * s);
  return packet_from_tau(c, mu, 800.0 * s, 8e5 * s, 1.0, 4e5 * s);
}

// |exp(a - b) - 1| for two logarithms.
inline double rel_dev(cplx log_a, cplx log_b) { return std::abs(std::exp(log_a - log_b) - 1.0); }
inline double rel_dev(const LogComplexField& a, const LogComplexField& b) {
  return rel_dev(a.log_value(), b.log_value());
}
inline double rel_dev(const LogComplexField& a, cplx log_b) { return rel_dev(a.log_value(), log_b); }

inline CMatrix diag2(cplx a, cplx b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

struct PointSampler {
  std::mt19937_64 rng;
  explicit PointSampler(unsigned seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  SpacetimePoint point(int d, double tspan, double zspan, double rspan) {
    RVector r(d);
    for (int j = 0; j < d; ++j) r(j) = uniform(-rspan, rspan);
    const double t = uniform(-tspan, tspan);
    return SpacetimePoint(t, uniform(-zspan, zspan), r);
  }
};

}  // namespace lwp::test
