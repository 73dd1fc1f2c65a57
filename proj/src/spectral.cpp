#include "lwp/spectral.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <functional>

namespace lwp {

namespace {

const double log_two_pi = std::log(2.0 * pi);

bool same_mass(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// k_z + omega without cancellation for negative k_z.
double light_cone_sum(double kperp2, double kz, double m) {
  const double kappa2 = kperp2 + m * m;
  const double omega = std::sqrt(kappa2 + kz * kz);
  if (kz >= 0.0) return kz + omega;
  return kappa2 / (omega - kz);
}

struct ImageContext {
  Family family;
  int d;
  double m;
  CMatrix g0_inv;
  cplx log_const;   // including 2^(nu+1) for packets
  double power;     // exponent of (k_z + omega) in the denominator
  double gamma = 0.0;
  double numerator = 0.0;  // tau m^2 (u_p), 4 gamma kappa^2 (phi_p), eps_m m^2 (u_b), 0 (phi_b)
};

ImageContext make_context(Family f, const BeamParams& bp) {
  if (!is_beam(f)) throw ParameterError("beam parameters given for a packet family");
  ImageContext c;
  c.family = f;
  c.d = bp.curve.dim();
  c.g0_inv = bp.curve.gamma0_inv();
  if (f == Family::phi_b) {
    c.m = 0.0;
    c.log_const = log_image_constant_we(bp.curve, bp.c_b);
    c.power = c.d / 2.0 - 1.0;
  } else {
    if (!(bp.m > 0.0)) throw ParameterError("u_b image requires m > 0");
    c.m = bp.m;
    c.log_const = log_image_constant_kgf(bp.curve, bp.c_b);
    c.power = c.d / 2.0 - 0.5;
    c.numerator = bp.eps_m * bp.m * bp.m;
  }
  return c;
}

ImageContext make_context(Family f, const PacketParams& pp) {
  if (is_beam(f)) throw ParameterError("packet parameters given for a beam family");
  ImageContext c;
  c.family = f;
  c.d = pp.curve.dim();
  c.g0_inv = pp.curve.gamma0_inv();
  c.gamma = pp.gamma;
  if (f == Family::phi_p) {
    const double nu = pp.mu;
    c.m = 0.0;
    c.log_const = (nu + 1.0) * std::log(2.0) + log_image_constant_we(pp.curve, pp.c_b);
    c.power = nu + c.d / 2.0;
    c.numerator = 4.0 * pp.gamma * pp.kappa * pp.kappa;
  } else {
    if (!(pp.m > 0.0)) throw ParameterError("u_p image requires m > 0");
    const double nu = pp.mu - 0.5;
    c.m = pp.m;
    c.log_const = (nu + 1.0) * std::log(2.0) + log_image_constant_kgf(pp.curve, pp.c_b);
    c.power = nu + c.d / 2.0 + 0.5;
    c.numerator = pp.tau() * pp.m * pp.m;
  }
  return c;
}

struct LogImage {
  cplx exponent;
  cplx log_value;
  double s;
  double omega;
};

LogImage log_image_core(const ImageContext& c, const RVector& kp, double omega, double s) {
  LogImage out;
  out.omega = omega;
  out.s = s;
  if (!(s > 0.0)) {
    out.exponent = out.log_value = cplx(-std::numeric_limits<double>::infinity(), 0.0);
    return out;
  }
  const CVector kc = kp.cast<cplx>();
  const cplx q = kc.dot(c.g0_inv * kc);
  out.exponent = -c.gamma * s / 2.0 - (c.numerator + I * q) / (2.0 * s);
  out.log_value = c.log_const + out.exponent - std::log(omega) - c.power * std::log(s);
  return out;
}

// Returns s <= 0 (and -inf modulus) instead of throwing; callers decide.
LogImage log_image(const ImageContext& c, const RVector& kp, double kz) {
  const double kp2 = kp.squaredNorm();
  return log_image_core(c, kp, std::sqrt(kp2 + kz * kz + c.m * c.m),
                        light_cone_sum(kp2, kz, c.m));
}

void check_wave_vector(const ImageContext& c, const WaveVector& k) {
  if (k.dim() != c.d) throw DimensionError("wave vector dimension mismatch");
  if (!same_mass(k.mass(), c.m))
    throw ParameterError(std::string("wave vector mass does not match family ") +
                         to_string(c.family));
}

FourierImage evaluate(const ImageContext& c, const WaveVector& k) {
  check_wave_vector(c, k);
  const LogImage li = log_image(c, k.k_perp(), k.k_z());
  if (!(li.s > 0.0)) throw DomainError("fourier_image: k_z + omega <= 0");
  FourierImage fi;
  fi.density = LogComplexField::from_log(li.log_value);
  if (is_beam(c.family)) fi.eta_constraint = li.s / 2.0;
  return fi;
}

cplx exponent_of(const ImageContext& c, const WaveVector& k) {
  check_wave_vector(c, k);
  const LogImage li = log_image(c, k.k_perp(), k.k_z());
  if (!(li.s > 0.0)) throw DomainError("fourier_exponent: k_z + omega <= 0");
  return li.exponent;
}

// Full symmetric Gauss-Legendre rule on [-1, 1].
template <int N>
void gl_rule(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(wt[i]);
    } else {
      x.push_back(a[i]);
      w.push_back(wt[i]);
      x.push_back(-a[i]);
      w.push_back(wt[i]);
    }
  }
}

void gl_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 10: gl_rule<10>(x, w); break;
    case 15: gl_rule<15>(x, w); break;
    case 20: gl_rule<20>(x, w); break;
    case 25: gl_rule<25>(x, w); break;
    case 30: gl_rule<30>(x, w); break;
    default: throw ParameterError("nodes_per_panel must be one of 10, 15, 20, 25, 30");
  }
}

struct Axis1D {
  std::vector<double> x;
  std::vector<double> w;
};

Axis1D composite(double lo, double hi, int panels, const std::vector<double>& gx,
                 const std::vector<double>& gw) {
  Axis1D a;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      a.x.push_back(c + 0.5 * h * gx[i]);
      a.w.push_back(0.5 * h * gw[i]);
    }
  }
  return a;
}

using Integrand = std::function<cplx(const std::vector<double>&)>;  // shifted, with phase

cplx tensor_sum(const std::vector<Axis1D>& axes, const Integrand& f) {
  const int n = static_cast<int>(axes.size());
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> k(n);
  cplx sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      k[j] = axes[j].x[idx[j]];
      w *= axes[j].w[idx[j]];
    }
    sum += w * f(k);
    int j = n - 1;
    while (j >= 0 && ++idx[j] == axes[j].x.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  return sum;
}

// Box [lo_j, hi_j] enlarged until log|integrand| on every face stays drop below the peak.
void secure_box(std::vector<double>& lo, std::vector<double>& hi,
                const std::function<double(const std::vector<double>&)>& logabs, double peak,
                double drop) {
  const int n = static_cast<int>(lo.size());
  const int samples = 9;
  for (int iter = 0; iter < 20; ++iter) {
    bool grown = false;
    for (int j = 0; j < n; ++j) {
      for (int side = 0; side < 2; ++side) {
        double worst = -std::numeric_limits<double>::infinity();
        std::vector<int> idx(n, 0);
        std::vector<double> k(n);
        while (true) {
          for (int i = 0; i < n; ++i) {
            if (i == j) k[i] = side ? hi[i] : lo[i];
            else k[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (samples - 1.0);
          }
          worst = std::max(worst, logabs(k));
          int i = n - 1;
          while (i >= 0 && (i == j || ++idx[i] == samples)) {
            if (i != j) idx[i] = 0;
            --i;
          }
          if (i < 0) break;
        }
        if (worst > peak - drop) {
          const double half = 0.5 * (hi[j] - lo[j]);
          if (side) hi[j] += 0.5 * half;
          else lo[j] -= 0.5 * half;
          grown = true;
        }
      }
    }
    if (!grown) return;
  }
  throw AccuracyError("inverse_ft_oracle: could not bound the image support");
}

LogComplexField integrate_box(std::vector<double> lo, std::vector<double> hi,
                              const std::function<cplx(const std::vector<double>&)>& log_f,
                              double peak, const InverseFtOptions& opt, double log_prefactor) {
  const int n = static_cast<int>(lo.size());
  secure_box(lo, hi, [&](const std::vector<double>& k) { return log_f(k).real(); }, peak,
             opt.drop);
  std::vector<double> gx, gw;
  gl_nodes(opt.nodes_per_panel, gx, gw);
  const Integrand f = [&](const std::vector<double>& k) {
    const cplx l = log_f(k);
    if (!std::isfinite(l.real())) return cplx(0.0);
    return std::exp(l - peak);
  };
  auto run = [&](int panels) {
    std::vector<Axis1D> axes;
    for (int j = 0; j < n; ++j) axes.push_back(composite(lo[j], hi[j], panels, gx, gw));
    return tensor_sum(axes, f);
  };
  const double budget = 4e7;
  int panels = std::max(1, opt.panels);
  cplx prev = run(panels);
  while (true) {
    const int next = panels * 2;
    if (next > opt.max_panels || std::pow(double(next) * gx.size(), n) > budget)
      throw AccuracyError("inverse_ft_oracle: panel doubling did not converge (panels " +
                          std::to_string(panels) + ")");
    const cplx cur = run(next);
    if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur)) {
      return LogComplexField::from_log(std::log(cur) + peak + log_prefactor);
    }
    prev = cur;
    panels = next;
  }
}

// Maximizer of g over [lo, hi] (Brent).
std::pair<double, double> maximize(const std::function<double(double)>& g, double lo, double hi) {
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -g(x); }, lo, hi, 52);
  return {r.first, -r.second};
}

double sign_of(cplx ratio, const char* what) {
  if (std::abs(ratio - 1.0) < 1e-8) return 1.0;
  if (std::abs(ratio + 1.0) < 1e-8) return -1.0;
  throw InvariantBreach(std::string(what) + ": branch ratio is not +-1");
}

LogComplexField closed_form(Family f, const PacketParams& pp, const SpacetimePoint& pt) {
  return f == Family::phi_p ? phi_packet(pt, pp) : u_packet(pt, pp);
}

LogComplexField closed_form(Family f, const BeamParams& bp, const SpacetimePoint& pt) {
  return f == Family::phi_b ? phi_beam(pt, bp) : u_beam(pt, bp);
}

template <class Params>
InverseFtCheck check_impl(Family f, const Params& params, const std::vector<SpacetimePoint>& pts,
                          const InverseFtOptions& opt) {
  InverseFtCheck out;
  const SpacetimePoint origin(0.0, 0.0, RVector::Zero(params.curve.dim()));
  const cplx l0 = closed_form(f, params, origin).log_value() -
                  inverse_ft_oracle(f, params, origin, opt).log_value();
  out.constant = std::exp(l0);
  for (const auto& pt : pts) {
    const LogComplexField exact = closed_form(f, params, pt);
    const LogComplexField num = inverse_ft_oracle(f, params, pt, opt);
    // Both normalized by |exact| so that tiny fields keep relative meaning.
    const cplx ratio = std::exp(num.log_value() + l0 - exact.log_value());
    out.deviations.push_back(std::abs(ratio - 1.0));
    out.constant_stability = std::max(out.constant_stability, std::abs(1.0 / ratio - 1.0));
  }
  for (double d : out.deviations) out.max_deviation = std::max(out.max_deviation, d);
  return out;
}

}  // namespace

WaveVector::WaveVector(RVector k_perp, double k_z, double mass)
    : k_perp_(std::move(k_perp)), k_z_(k_z), mass_(mass) {
  if (!(mass >= 0.0)) throw ParameterError("WaveVector: mass must be >= 0");
  if (!k_perp_.allFinite() || !std::isfinite(k_z)) throw ParameterError("WaveVector: non-finite");
  omega_ = std::sqrt(k_perp_.squaredNorm() + k_z * k_z + mass * mass);
}

const char* to_string(Family f) {
  switch (f) {
    case Family::phi_b: return "phi_b";
    case Family::phi_p: return "phi_p";
    case Family::u_b: return "u_b";
    case Family::u_p: return "u_p";
  }
  return "unknown";
}

bool is_beam(Family f) { return f == Family::phi_b || f == Family::u_b; }
bool is_kgf(Family f) { return f == Family::u_b || f == Family::u_p; }

cplx log_image_constant_we(const GammaCurve& curve, cplx c_b) {
  const double d = curve.dim();
  return std::log(c_b) + std::log(pi) + (1.0 + d / 2.0) * log_two_pi +
         I * delta_gamma_at(curve, 0.0);
}

cplx log_image_constant_kgf(const GammaCurve& curve, cplx c_b) {
  const double d = curve.dim();
  return std::log(c_b) + std::log(pi) + (1.5 + d / 2.0) * log_two_pi +
         I * (delta_gamma_at(curve, 0.0) + pi / 4.0);
}

FourierImage fourier_image(Family f, const BeamParams& bp, const WaveVector& k) {
  return evaluate(make_context(f, bp), k);
}

FourierImage fourier_image(Family f, const PacketParams& pp, const WaveVector& k) {
  return evaluate(make_context(f, pp), k);
}

cplx fourier_exponent(Family f, const BeamParams& bp, const WaveVector& k) {
  return exponent_of(make_context(f, bp), k);
}

cplx fourier_exponent(Family f, const PacketParams& pp, const WaveVector& k) {
  return exponent_of(make_context(f, pp), k);
}

double dispersion_hessian_det(const WaveVector& k) {
  const int n = k.dim() + 1;
  RVector kv(n);
  kv << k.k_perp(), k.k_z();
  const double w = k.omega();
  if (!(w > 0.0)) throw DomainError("dispersion_hessian_det: omega = 0");
  const RMatrix h = RMatrix::Identity(n, n) / w - kv * kv.transpose() / (w * w * w);
  return h.determinant();
}

LogComplexField inverse_ft_oracle(Family f, const PacketParams& pp, const SpacetimePoint& pt,
                                  const InverseFtOptions& opt) {
  const ImageContext c = make_context(f, pp);
  if (c.d > 2) throw ParameterError("inverse_ft_oracle: d <= 2 required");
  if (pt.r_perp.size() != c.d) throw DimensionError("point dimension mismatch");
  const int n = c.d + 1;
  const RVector zero = RVector::Zero(c.d);

  // Coordinates (q, sigma) with sigma = log(k_z + omega) and k_perp = q sqrt(s / s_ref):
  // dk_z = omega d sigma, the image is smooth in sigma even where k_z + omega -> 0, and the
  // transverse Gaussian exp(Im q/(2s)) keeps a sigma-independent width in q.
  const double s0 = f == Family::u_p ? pp.m * std::sqrt(pp.tau() / pp.gamma) : 2.0 * pp.kappa;
  const double mm = c.m * c.m;
  const double half_d = 0.5 * c.d;
  double sig_ref = std::log(s0);
  RVector kp(c.d);
  auto log_at = [&](double sigma) {
    const double s = std::exp(sigma);
    const double kappa2 = kp.squaredNorm() + mm;
    const double omega = 0.5 * (s + kappa2 / s);
    return std::make_pair(log_image_core(c, kp, omega, s), 0.5 * (s - kappa2 / s));
  };
  kp.setZero();
  auto axis_log = [&](double sigma) {
    const auto li = log_at(sigma).first;
    return (li.log_value + std::log(li.omega)).real() + half_d * (sigma - sig_ref);
  };
  sig_ref = maximize(axis_log, std::log(s0) - 15.0, std::log(s0) + 15.0).first;
  const auto [sig_peak, peak] = maximize(axis_log, sig_ref - 15.0, sig_ref + 15.0);

  auto edge = [&](double dir) {
    double step = 1e-3;
    while (axis_log(sig_peak + dir * step) > peak - opt.drop && step < 100.0) step *= 2.0;
    double a = 0.0, b = step;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (a + b);
      (axis_log(sig_peak + dir * mid) > peak - opt.drop ? a : b) = mid;
    }
    return b;
  };
  const double sig_lo = sig_peak - opt.box_margin * edge(-1.0);
  const double sig_hi = sig_peak + opt.box_margin * edge(1.0);

  const RMatrix ainv = (-pp.curve.gamma0_inv().imag()).inverse();
  const double s_ref = std::exp(sig_ref);
  std::vector<double> lo(n), hi(n);
  for (int j = 0; j < c.d; ++j) {
    const double half = opt.box_margin * std::sqrt(2.0 * s_ref * opt.drop * ainv(j, j));
    lo[j] = -half;
    hi[j] = half;
  }
  lo[c.d] = sig_lo;
  hi[c.d] = sig_hi;

  auto log_f = [&](const std::vector<double>& k) {
    const double scale = std::exp(0.5 * (k[c.d] - sig_ref));
    for (int j = 0; j < c.d; ++j) kp(j) = k[j] * scale;
    const auto [li, kz] = log_at(k[c.d]);
    double phase = kz * pt.z - li.omega * pt.t;
    for (int j = 0; j < c.d; ++j) phase += kp(j) * pt.r_perp(j);
    return li.log_value + std::log(li.omega) + half_d * (k[c.d] - sig_ref) + I * phase;
  };
  return integrate_box(lo, hi, log_f, peak, opt, -(n + 1.0) * log_two_pi);
}

LogComplexField inverse_ft_oracle(Family f, const BeamParams& bp, const SpacetimePoint& pt,
                                  const InverseFtOptions& opt) {
  const ImageContext c = make_context(f, bp);
  if (c.d > 2) throw ParameterError("inverse_ft_oracle: d <= 2 required");
  if (pt.r_perp.size() != c.d) throw DimensionError("point dimension mismatch");
  const int n = c.d + 1;
  const double eta = bp.eta;
  const double s = 2.0 * eta;
  const double mm = c.m * c.m;

  // Constraint surface k_z + omega = 2 eta; the delta contributes omega/eta.
  RVector kp(c.d);
  auto log_f = [&](const std::vector<double>& k) {
    for (int j = 0; j < c.d; ++j) kp(j) = k[j];
    const double kappa2 = kp.squaredNorm() + mm;
    const double kz = eta - kappa2 / (4.0 * eta);
    const LogImage li = log_image(c, kp, kz);
    double phase = kz * pt.z - li.omega * pt.t;
    for (int j = 0; j < c.d; ++j) phase += k[j] * pt.r_perp(j);
    return li.log_value + std::log(li.omega / eta) + I * phase;
  };
  const RMatrix ainv = (-bp.curve.gamma0_inv().imag()).inverse();
  std::vector<double> lo(c.d), hi(c.d);
  for (int j = 0; j < c.d; ++j) {
    const double half = opt.box_margin * std::sqrt(2.0 * s * opt.drop * ainv(j, j));
    lo[j] = -half;
    hi[j] = half;
  }
  const double peak = log_f(std::vector<double>(c.d, 0.0)).real();
  return integrate_box(lo, hi, log_f, peak, opt, -(n + 1.0) * log_two_pi);
}

InverseFtCheck inverse_ft_check(Family f, const PacketParams& pp,
                                const std::vector<SpacetimePoint>& points,
                                const InverseFtOptions& opt) {
  return check_impl(f, pp, points, opt);
}

InverseFtCheck inverse_ft_check(Family f, const BeamParams& bp,
                                const std::vector<SpacetimePoint>& points,
                                const InverseFtOptions& opt) {
  return check_impl(f, bp, points, opt);
}

double log_spectral_weight(double eta, double nu, double gamma, double kappa) {
  if (!(eta > 0.0)) throw DomainError("log_spectral_weight: eta must be > 0");
  return -(nu + 1.0) * std::log(eta) - gamma * (eta + kappa * kappa / eta);
}

LogComplexField superposition_integrand(Family target, const PacketParams& pp,
                                        const SpacetimePoint& pt, double eta) {
  if (target == Family::phi_p) {
    const BeamParams bp(pp.curve, eta, 0.0, 1.0, pp.c_b);
    return LogComplexField::from_log(log_spectral_weight(eta, pp.mu, pp.gamma, pp.kappa) +
                                     phi_beam(pt, bp).log_value());
  }
  if (target == Family::u_p) {
    const BeamParams bp(pp.curve, eta, pp.m, pp.eps_m, pp.c_b);
    return LogComplexField::from_log(
        log_spectral_weight(eta, pp.mu - 0.5, pp.gamma, pp.kappa) + u_beam(pt, bp).log_value());
  }
  throw ParameterError("superposition_oracle: target must be phi_p or u_p");
}

LogComplexField superposition_oracle(Family target, const PacketParams& pp,
                                     const SpacetimePoint& pt) {
  if (target != Family::phi_p && target != Family::u_p)
    throw ParameterError("superposition_oracle: target must be phi_p or u_p");
  const double nu = target == Family::phi_p ? pp.mu : pp.mu - 0.5;
  auto log_at = [&](double eta) { return superposition_integrand(target, pp, pt, eta).log_value(); };
  const double k0 = std::max(pp.kappa, 1e-300);
  const auto [lx, peak] =
      maximize([&](double x) { return log_at(std::exp(x)).real(); }, std::log(k0) - 20.0,
               std::log(k0) + 20.0);
  const double eta_peak = std::exp(lx);

  auto f = [&](double eta) -> cplx {
    if (!(eta > 0.0) || !std::isfinite(eta)) return 0.0;
    // The weight alone bounds the integrand; skip the beam where it is negligible.
    if (log_spectral_weight(eta, nu, pp.gamma, pp.kappa) + 50.0 < peak - 750.0) return 0.0;
    const cplx l = log_at(eta) - peak;
    if (l.real() < -745.0) return 0.0;
    return std::exp(l);
  };
  const double tol = 1e-13;
  boost::math::quadrature::tanh_sinh<double> ts(15);
  boost::math::quadrature::exp_sinh<double> es(15);
  double e1 = 0.0, e2 = 0.0, l1 = 0.0, l2 = 0.0;
  const cplx a = ts.integrate(f, 0.0, eta_peak, tol, &e1, &l1);
  const cplx b = es.integrate([&](double x) { return f(x); }, eta_peak,
                              std::numeric_limits<double>::infinity(), tol, &e2, &l2);
  const cplx sum = a + b;
  const double err = e1 + e2;  // absolute estimates
  if (!(std::abs(sum) > 0.0) || err > 1e-11 * std::abs(sum))
    throw AccuracyError("superposition_oracle: quadrature error estimate " + std::to_string(err));
  return LogComplexField::from_log(std::log(sum) + peak);
}

LogComplexField zeta_ft_oracle(const BeamParams& bp, const SpacetimePoint& pt) {
  const int d = bp.curve.dim();
  if (pt.r_perp.size() != d) throw DimensionError("point dimension mismatch");
  if (!(bp.eps_m > 0.0)) throw ParameterError("zeta_ft_oracle: eps_m must be > 0");
  CMatrix big = CMatrix::Zero(d + 1, d + 1);
  big.topLeftCorner(d, d) = bp.curve.gamma0();
  big(d, d) = I / bp.eps_m;
  const GammaCurve enlarged(big);
  // sqrt det of the enlarged matrix against sqrt det Gamma0 (-i eps_m)^(-1/2).
  const cplx expected = bp.curve.sqrt_det0() / std::sqrt(cplx(0.0, -bp.eps_m));
  const double sgn = sign_of(enlarged.sqrt_det0() / expected, "zeta_ft_oracle");

  const BeamParams wide(enlarged, bp.eta, 0.0, 1.0, bp.c_b);
  const double beta = pt.beta();
  const double width = std::sqrt((beta * beta + bp.eps_m * bp.eps_m) / (bp.eta * bp.eps_m));
  SpacetimePoint q(pt.t, pt.z, RVector::Zero(d + 1));
  q.r_perp.head(d) = pt.r_perp;
  const double ref = phi_beam(q, wide).log_abs;
  auto f = [&](double zeta) -> cplx {
    q.r_perp(d) = zeta;
    const cplx l = phi_beam(q, wide).log_value() - ref - I * bp.m * zeta;
    return l.real() < -745.0 ? cplx(0.0) : std::exp(l);
  };
  boost::math::quadrature::tanh_sinh<double> ts(15);
  double err = 0.0, l1 = 0.0;
  const cplx v = ts.integrate(f, -9.0 * width, 9.0 * width, 1e-13, &err, &l1);
  if (!(std::abs(v) > 0.0) || err > 1e-10 * std::abs(v))
    throw AccuracyError("zeta_ft_oracle: quadrature error estimate " + std::to_string(err));
  return LogComplexField::from_log(std::log(sgn * v) + ref);
}

StationaryPhaseResult stationary_phase_large_t(const PacketParams& pp, const SpacetimePoint& pt) {
  if (!(pp.m > 0.0))
    throw ParameterError("stationary_phase_large_t: not applicable for m = 0");
  const int d = pp.curve.dim();
  if (pt.r_perp.size() != d) throw DimensionError("point dimension mismatch");
  if (pt.t == 0.0) throw DomainError("stationary_phase_large_t: t must be nonzero");
  const int n = d + 1;
  RVector v(n);
  v << pt.r_perp / pt.t, pt.z / pt.t;
  const double v2 = v.squaredNorm();
  if (!(v2 < 1.0))
    throw DomainError("stationary_phase_large_t: validity breach, |r|/|t| >= 1");
  const double root = std::sqrt(1.0 - v2);
  StationaryPhaseResult out;
  out.k_star = pp.m * v / root;
  out.regime = regime_classify(pt.t, pp);
  if (out.regime != Regime::Large)
    out.warnings.push_back(std::string("regime ") + to_string(out.regime) +
                           ": stationary phase outside the large-time window");
  const WaveVector k(out.k_star.head(d), out.k_star(d), pp.m);
  const FourierImage img = fourier_image(Family::u_p, pp, k);
  const double sgn = pt.t > 0 ? 1.0 : -1.0;
  const cplx l = 0.5 * n * std::log(pp.m) - (0.5 * n + 1.0) * log_two_pi -
                 I * pp.m * pt.t * root - I * (n * pi * sgn / 4.0) -
                 0.5 * n * std::log(std::abs(pt.t)) - 0.25 * (n + 2.0) * std::log(1.0 - v2) +
                 img.density.log_value();
  out.field = LogComplexField::from_log(l);
  return out;
}

SaddlePhase saddle_phase(const PacketParams& pp, const CVector& chi) {
  const int d = pp.curve.dim();
  const int n = d + 1;
  if (chi.size() != n) throw DimensionError("saddle_phase: chi must have d + 1 components");
  const double tau = pp.tau();
  const cplx a = I / (2.0 * std::sqrt(pp.gamma * tau));
  const double c1 = std::sqrt(pp.gamma / tau) / 2.0;
  const double c2 = std::sqrt(tau / pp.gamma) / 2.0;
  const CMatrix& b = pp.curve.gamma0_inv();
  const CVector xp = chi.head(d);
  const CVector bx = b * xp;
  const cplx q = xp.transpose() * bx;
  const cplx varpi = std::sqrt(cplx(chi.transpose() * chi) + 1.0);
  const cplx w = varpi + chi(d);

  SaddlePhase out;
  out.value = a * q / w + c1 * w + c2 / w;
  const cplx g = -a * q / (w * w) + c1 - c2 / (w * w);
  CVector wj = chi / varpi;
  wj(d) += 1.0;
  const CMatrix wjk =
      CMatrix::Identity(n, n) / varpi - chi * chi.transpose() / (varpi * varpi * varpi);
  // Transverse vector 2 a (B chi_perp) padded with zero in the z slot.
  CVector t = CVector::Zero(n);
  t.head(d) = 2.0 * a * bx;
  out.gradient = t / w + g * wj;
  const CVector dg = -t / (w * w) + (2.0 * a * q / (w * w * w) + 2.0 * c2 / (w * w * w)) * wj;
  CMatrix h = CMatrix::Zero(n, n);
  h.topLeftCorner(d, d) = 2.0 * a * b / w;
  h += -t * wj.transpose() / (w * w) + wj * dg.transpose() + g * wjk;
  out.hessian = 0.5 * (h + h.transpose());
  return out;
}

SaddleResult saddle_point_small_t(const PacketParams& pp, const SpacetimePoint& pt) {
  const int d = pp.curve.dim();
  if (pt.r_perp.size() != d) throw DimensionError("point dimension mismatch");
  const int n = d + 1;
  const PacketCharacteristics pc = packet_characteristics(pp);
  SaddleResult out;
  if (pc.p < 10.0) out.warnings.push_back("p < 10: steepest descent is inaccurate");
  const Regime rg = regime_classify(pt.t, pp);
  if (rg != Regime::Small)
    out.warnings.push_back(std::string("regime ") + to_string(rg) +
                           ": saddle evaluation outside the small-time window");

  CVector chi = CVector::Zero(n);
  chi(d) = pc.K / pc.p;
  SaddlePhase sp = saddle_phase(pp, chi);
  int it = 0;
  const double tol = 1e-14;
  while (sp.gradient.norm() > tol) {
    if (it == 50)
      throw SaddleError("saddle_point_small_t: Newton did not converge; last |grad| = " +
                        std::to_string(sp.gradient.norm()) + " at chi_z = " +
                        std::to_string(chi(d).real()));
    const CVector step = sp.hessian.partialPivLu().solve(sp.gradient);
    double lambda = 1.0;
    CVector trial = chi - step;
    SaddlePhase tsp = saddle_phase(pp, trial);
    while (tsp.gradient.norm() >= sp.gradient.norm() && lambda > 1e-6) {
      lambda *= 0.5;
      trial = chi - lambda * step;
      tsp = saddle_phase(pp, trial);
    }
    ++it;
    if (step.norm() * lambda < 1e-16 * (1.0 + chi.norm())) {
      chi = trial;
      sp = tsp;
      break;
    }
    chi = trial;
    sp = tsp;
  }
  out.iterations = it;
  out.chi0 = chi;
  out.hessian = sp.hessian;
  if (chi.imag().norm() > 1e-10)
    throw SaddleError("saddle_point_small_t: saddle is not on the real k-space");

  const RVector chr = chi.real();
  const double varpi = std::sqrt(chr.squaredNorm() + 1.0);
  const RVector k0 = pp.m * chr;
  const double w0 = pp.m * varpi;
  const RVector vgr = chr / varpi;
  RVector r(n);
  r << pt.r_perp, pt.z;
  const CVector rr = (r - vgr * pt.t).cast<cplx>();
  const CVector hinv_r = sp.hessian.partialPivLu().solve(rr);
  out.chi1 = I * (pp.m / pc.p) * hinv_r;

  Eigen::ComplexEigenSolver<CMatrix> es(sp.hessian, false);
  cplx log_sqrt_det = 0.0;
  for (int i = 0; i < n; ++i) log_sqrt_det += std::log(std::sqrt(es.eigenvalues()(i)));

  const FourierImage img = fourier_image(Family::u_p, pp, WaveVector(k0.head(d), k0(d), pp.m));
  const cplx log_a1 = n * std::log(pp.m) - log_two_pi - 0.5 * n * std::log(2.0 * pi * pc.p) +
                      img.density.log_value() - log_sqrt_det;
  const cplx quad = rr.transpose() * hinv_r;
  const cplx l = log_a1 - I * (w0 * pt.t - k0.dot(r)) - pp.m * pp.m / (2.0 * pc.p) * quad;
  out.field = LogComplexField::from_log(l);
  return out;
}

}  // namespace lwp
