#include "lwp/solutions.hpp"

#include "lwp/specfun.hpp"

#include <functional>

namespace lwp {

namespace {

void check_point(const SpacetimePoint& pt, const GammaCurve& curve) {
  if (pt.r_perp.size() != curve.dim())
    throw DimensionError("point has " + std::to_string(pt.r_perp.size()) +
                         " transverse coordinates, curve has d = " +
                         std::to_string(curve.dim()));
}

cplx log_override(const std::optional<cplx>& c) {
  if (*c == 0.0) throw ParameterError("constant override must be nonzero");
  return std::log(*c);
}

using PhaseFn = std::function<cplx(const SpacetimePoint&)>;

SpacetimePoint shifted(const SpacetimePoint& pt, int axis, double h) {
  SpacetimePoint q = pt;
  if (axis == 0)
    q.t += h;
  else if (axis == 1)
    q.z += h;
  else
    q.r_perp(axis - 2) += h;
  return q;
}

// First derivatives along (t, z, r_1..r_d) by central differences.
std::vector<cplx> gradient(const PhaseFn& f, const SpacetimePoint& pt, double h) {
  const int n = 2 + static_cast<int>(pt.r_perp.size());
  std::vector<cplx> g(n);
  for (int a = 0; a < n; ++a)
    g[a] = (f(shifted(pt, a, h)) - f(shifted(pt, a, -h))) / (2.0 * h);
  return g;
}

// d'Alembertian d_tt - d_zz - sum d_ii by central second differences.
cplx box(const PhaseFn& f, const SpacetimePoint& pt, double h) {
  const int n = 2 + static_cast<int>(pt.r_perp.size());
  const cplx f0 = f(pt);
  cplx out = 0.0;
  for (int a = 0; a < n; ++a) {
    const cplx d2 = (f(shifted(pt, a, h)) - 2.0 * f0 + f(shifted(pt, a, -h))) / (h * h);
    out += (a == 0) ? d2 : -d2;
  }
  return out;
}

double eikonal_from(const PhaseFn& f, const SpacetimePoint& pt, double h, double sigma) {
  if (!(h > 0.0)) throw ParameterError("eikonal_residual: h must be > 0");
  const auto g = gradient(f, pt, h);
  cplx lhs = g[0] * g[0];
  for (std::size_t a = 1; a < g.size(); ++a) lhs -= g[a] * g[a];
  return std::abs(lhs - sigma) / (std::norm(g[0]) + 1.0);
}

}  // namespace

BeamParams::BeamParams(GammaCurve curve_, double eta_, double m_, double eps_m_, cplx c_b_)
    : curve(std::move(curve_)), eta(eta_), m(m_), eps_m(eps_m_), c_b(c_b_) {
  validate();
}

void BeamParams::validate() const {
  if (!(eta > 0.0)) throw ParameterError("eta must be > 0");
  if (!(m >= 0.0)) throw ParameterError("m must be >= 0");
  if (m > 0.0 && !(eps_m > 0.0)) throw ParameterError("eps_m must be > 0");
  if (c_b == 0.0) throw ParameterError("c_b must be nonzero");
}

cplx BeamParams::log_we_constant() const {
  return constant_override ? log_override(constant_override) : std::log(c_b);
}

cplx BeamParams::log_kgf_constant() const {
  if (constant_override) return log_override(constant_override);
  return std::log(c_b) - eps_m * m * m / (4.0 * eta) + I * (pi / 4) +
         0.5 * std::log(pi / eta);
}

PacketParams::PacketParams(GammaCurve curve_, double mu_, double gamma_, double kappa_,
                           double m_, double eps_m_, cplx c_b_)
    : curve(std::move(curve_)), mu(mu_), gamma(gamma_), kappa(kappa_), m(m_),
      eps_m(eps_m_), c_b(c_b_) {
  validate();
}

void PacketParams::validate() const {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be > 0");
  if (!(kappa > 0.0)) throw ParameterError("kappa must be > 0");
  if (!(m >= 0.0)) throw ParameterError("m must be >= 0");
  if (m > 0.0 && !(eps_m > 0.0)) throw ParameterError("eps_m must be > 0");
  if (!(std::abs(mu) <= 50.0)) throw ParameterError("|mu| must be <= 50");
  if (c_b == 0.0) throw ParameterError("c_b must be nonzero");
}

double PacketParams::tau() const {
  if (!(m > 0.0)) throw ParameterError("tau is defined only for m > 0");
  return 4.0 * gamma * kappa * kappa / (m * m) + eps_m;
}

cplx PacketParams::log_we_constant() const {
  if (constant_override) return log_override(constant_override);
  return std::log(2.0) - mu * std::log(2.0 * kappa * kappa * gamma) + std::log(c_b);
}

cplx PacketParams::log_kgf_constant() const {
  if (constant_override) return log_override(constant_override);
  if (!(m > 0.0)) throw ParameterError("C_p requires m > 0");
  return (mu + 1.0) * std::log(2.0) + 0.5 * std::log(pi) + I * (pi / 4) + std::log(c_b) -
         mu * std::log(m);
}

PacketParams packet_from_tau(GammaCurve curve, double mu, double gamma, double tau,
                             double m, double eps_m, cplx c_b) {
  if (!(m > 0.0)) throw ParameterError("packet_from_tau: m must be > 0");
  if (!(tau > eps_m)) throw ParameterError("packet_from_tau: tau must exceed eps_m");
  if (!(gamma > 0.0)) throw ParameterError("packet_from_tau: gamma must be > 0");
  const double kappa = m * std::sqrt((tau - eps_m) / (4.0 * gamma));
  return PacketParams(std::move(curve), mu, gamma, kappa, m, eps_m, c_b);
}

ThetaEval theta_eval(const SpacetimePoint& pt, const GammaCurve& curve) {
  check_point(pt, curve);
  GammaEval ev = gamma_eval(curve, pt.beta());
  const CVector r = pt.r_perp.cast<cplx>();
  return {pt.alpha() + r.dot(ev.matrix * r), ev.sqrt_det};
}

cplx theta(const SpacetimePoint& pt, const GammaCurve& curve) {
  return theta_eval(pt, curve).theta;
}

cplx phase_s(cplx th, double gamma, double kappa) {
  return 2.0 * kappa * gamma * std::sqrt(1.0 - I * th / gamma);
}

cplx phase_Sp(cplx th, double beta, double gamma, double tau) {
  return std::sqrt((gamma - I * th) * cplx(tau, beta));
}

cplx phase_Sb(cplx th, double beta, double eta, double m) {
  return th * eta / m - beta * m / (4.0 * eta);
}

LogComplexField phi_beam(const SpacetimePoint& pt, const BeamParams& bp) {
  const ThetaEval te = theta_eval(pt, bp.curve);
  return LogComplexField::from_log(bp.log_we_constant() + std::log(te.sqrt_det) +
                                   I * bp.eta * te.theta);
}

LogComplexField u_beam(const SpacetimePoint& pt, const BeamParams& bp) {
  if (!(bp.m > 0.0)) throw ParameterError("u_beam requires m > 0; use phi_beam");
  const ThetaEval te = theta_eval(pt, bp.curve);
  const cplx sb = phase_Sb(te.theta, pt.beta(), bp.eta, bp.m);
  return LogComplexField::from_log(bp.log_kgf_constant() + std::log(te.sqrt_det) +
                                   I * bp.m * sb);
}

LogComplexField phi_packet(const SpacetimePoint& pt, const PacketParams& pp) {
  const ThetaEval te = theta_eval(pt, pp.curve);
  const cplx s = phase_s(te.theta, pp.gamma, pp.kappa);
  if (!(s.real() > 0.0)) throw InvariantBreach("phi_packet: Re s <= 0");
  return LogComplexField::from_log(pp.log_we_constant() + std::log(te.sqrt_det) +
                                   pp.mu * std::log(s) + log_bessel_k(pp.mu, s));
}

LogComplexField u_packet(const SpacetimePoint& pt, const PacketParams& pp) {
  if (!(pp.m > 0.0)) throw ParameterError("u_packet requires m > 0; use phi_packet");
  const ThetaEval te = theta_eval(pt, pp.curve);
  const double tau = pp.tau();
  const cplx b = pp.gamma - I * te.theta;
  const cplx a = cplx(tau, pt.beta());
  if (!(b.real() > 0.0) || !(a.real() > 0.0))
    throw InvariantBreach("u_packet: factor of S_p left the right half-plane");
  const cplx sp = std::sqrt(b * a);
  if (!(sp.real() > 0.0)) throw InvariantBreach("u_packet: Re S_p <= 0");
  // (S_p/(tau+i beta))^mu with both factors in the right half-plane.
  const cplx log_ratio = 0.5 * pp.mu * (std::log(b) - std::log(a));
  return LogComplexField::from_log(pp.log_kgf_constant() + std::log(te.sqrt_det) + log_ratio +
                                   log_bessel_k(pp.mu, pp.m * sp));
}

cplx u_packet_2d_radial(cplx S_p, cplx c3, double m) {
  if (!(S_p.real() > 0.0)) throw DomainError("u_packet_2d_radial: Re S_p must be > 0");
  return c3 * std::exp(-m * S_p) / S_p;
}

double eikonal_residual(PhaseKind kind, const SpacetimePoint& pt, const BeamParams& bp,
                        double h) {
  switch (kind) {
    case PhaseKind::we_theta:
      return eikonal_from([&](const SpacetimePoint& q) { return theta(q, bp.curve); }, pt, h,
                          0.0);
    case PhaseKind::kgf_Sb:
      if (!(bp.m > 0.0)) throw ParameterError("S_b requires m > 0");
      return eikonal_from(
          [&](const SpacetimePoint& q) {
            return phase_Sb(theta(q, bp.curve), q.beta(), bp.eta, bp.m);
          },
          pt, h, 1.0);
    default:
      throw ParameterError("eikonal_residual: phase kind needs packet parameters");
  }
}

double eikonal_residual(PhaseKind kind, const SpacetimePoint& pt, const PacketParams& pp,
                        double h) {
  switch (kind) {
    case PhaseKind::we_theta:
      return eikonal_from([&](const SpacetimePoint& q) { return theta(q, pp.curve); }, pt, h,
                          0.0);
    case PhaseKind::we_s:
      return eikonal_from(
          [&](const SpacetimePoint& q) {
            return phase_s(theta(q, pp.curve), pp.gamma, pp.kappa);
          },
          pt, h, 0.0);
    case PhaseKind::kgf_Sp: {
      const double tau = pp.tau();
      return eikonal_from(
          [&](const SpacetimePoint& q) {
            // u_p ~ exp(-m S_p) = exp(i m (i S_p))
            return I * phase_Sp(theta(q, pp.curve), q.beta(), pp.gamma, tau);
          },
          pt, h, 1.0);
    }
    default:
      throw ParameterError("eikonal_residual: phase kind needs beam parameters");
  }
}

TransportResidual transport_residual(const SpacetimePoint& pt, const GammaCurve& curve,
                                     double h, bool freeze_amplitude) {
  if (!(h > 0.0)) throw ParameterError("transport_residual: h must be > 0");
  check_point(pt, curve);
  const cplx g_fixed = gamma_eval(curve, pt.beta()).sqrt_det;
  PhaseFn th = [&](const SpacetimePoint& q) { return theta(q, curve); };
  PhaseFn g = [&](const SpacetimePoint& q) {
    return freeze_amplitude ? g_fixed : gamma_eval(curve, q.beta()).sqrt_det;
  };
  const auto dth = gradient(th, pt, h);
  const auto dg = gradient(g, pt, h);
  const cplx box_th = box(th, pt, h);

  cplx r1 = g_fixed * box_th;
  double s1 = std::abs(g_fixed * box_th);
  cplx r2 = 0.0;
  double s2 = 0.0;
  for (std::size_t a = 0; a < dth.size(); ++a) {
    const double sign = (a == 0) ? 1.0 : -1.0;
    r1 += 2.0 * sign * dth[a] * dg[a];
    s1 += 2.0 * std::abs(dth[a] * dg[a]);
    r2 += sign * dg[a] * dg[a];
    s2 += std::norm(dg[a]);
  }
  TransportResidual out;
  out.first = s1 > 0.0 ? std::abs(r1) / s1 : 0.0;
  out.second = s2 > 0.0 ? std::abs(r2) / s2 : 0.0;
  return out;
}

double default_fd_step(const PacketParams& pp) {
  const double length = pp.m > 0.0 ? 1.0 / pp.m : 1.0 / pp.kappa;
  return std::max(1e-6, 1e-4 * length);
}

}  // namespace lwp
