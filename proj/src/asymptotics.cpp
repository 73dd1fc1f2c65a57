#include "lwp/asymptotics.hpp"

#include <Eigen/Eigenvalues>

#include <boost/math/tools/minima.hpp>

#include <algorithm>

namespace lwp {

namespace {

Condition make_condition(std::string name, double lhs, double rhs, double margin) {
  Condition c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = margin;
  c.satisfied = lhs * margin <= rhs;
  return c;
}

// Smallest eigenvalue of a real symmetric matrix.
double min_eigenvalue(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

RVector unit_or_default(const std::optional<RVector>& e, const RMatrix& form) {
  if (!e) return major_axis(form);
  if (e->size() != form.rows()) throw DimensionError("e_perp has the wrong dimension");
  const double n = e->norm();
  if (!(n > 0.0)) throw ParameterError("e_perp must be nonzero");
  return *e / n;
}

double quad_form(const CMatrix& m, const RVector& e, bool imag) {
  const cplx q = e.cast<cplx>().dot(m * e.cast<cplx>());
  return imag ? q.imag() : q.real();
}

cplx log_small_time_field(const SpacetimePoint& pt, const PacketParams& pp,
                          const PacketCharacteristics& pc, double zeta) {
  const double s = std::sqrt(pp.gamma * pp.tau());
  const GammaEval ge = gamma_eval(pp.curve, zeta);
  const double tt = pt.t / s, zt = pt.z / s;
  const CVector r = pt.r_perp.cast<cplx>() / s;
  const double dpar2 = pc.p / (pc.Omega * pc.Omega);
  const cplx quad = r.dot(ge.matrix * r);
  const double dz = zt - pc.v_gr * tt;
  return log_small_time_amplitude(pp, zeta) + I * (pc.K * zt - pc.Omega * tt) +
         I * (pc.p * pp.tau() / 2.0) * quad - dz * dz / (2.0 * dpar2);
}

}  // namespace

PacketCharacteristics packet_characteristics(double gamma, double tau, double m,
                                             bool allow_non_forward) {
  if (!(gamma > 0.0) || !(tau > 0.0)) throw ParameterError("gamma and tau must be > 0");
  if (!(m > 0.0)) throw ParameterError("m must be > 0");
  if (!allow_non_forward && !(gamma < tau))
    throw ParameterError("gamma >= tau: packet does not propagate forward");
  PacketCharacteristics pc;
  const double s = std::sqrt(gamma * tau);
  pc.p = m * s;
  const double a = std::sqrt(tau / gamma), b = std::sqrt(gamma / tau);
  pc.Omega = pc.p * (a + b) / 2.0;
  pc.K = pc.p * (a - b) / 2.0;
  pc.v_gr = pc.K / pc.Omega;
  pc.omega_phys = pc.Omega / s;
  pc.k_phys = pc.K / s;
  return pc;
}

PacketCharacteristics packet_characteristics(const PacketParams& pp, bool allow_non_forward) {
  return packet_characteristics(pp.gamma, pp.tau(), pp.m, allow_non_forward);
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Small: return "small";
    case Regime::Moderate: return "moderate";
    case Regime::Large: return "large";
    case Regime::Unclassified: return "unclassified";
  }
  return "unknown";
}

Regime regime_classify(double t, const PacketParams& pp, double margin) {
  const double at = std::abs(t);
  const double tau = pp.tau();
  const double g0 = pp.curve.norm();
  const double g0inv = pp.curve.inv_norm();
  if (at * g0 * margin <= 1.0 && at * margin <= tau) return Regime::Small;
  if (at >= 1.0 / g0 && at * margin <= tau) return Regime::Moderate;
  if (at >= std::max(4.0 * g0inv * tau / pp.gamma, tau) * margin) return Regime::Large;
  return Regime::Unclassified;
}

double width_parallel(const PacketCharacteristics& pc) { return std::sqrt(pc.p) / pc.Omega; }

double width_perp(const PacketParams& pp, double zeta, const RVector& e) {
  const GammaEval ge = gamma_eval(pp.curve, zeta);
  const double q = quad_form(ge.matrix, e / e.norm(), true);
  return 1.0 / std::sqrt(pp.p() * pp.tau() * q);
}

double width_radial(const PacketCharacteristics& pc) {
  return std::pow(pc.p, 1.5) / (pc.Omega * pc.Omega);
}

double width_angular(const PacketParams& pp, const RVector& e) {
  const PacketCharacteristics pc = packet_characteristics(pp);
  const double q = -quad_form(pp.curve.gamma0_inv(), e / e.norm(), true);
  return std::sqrt(pc.p * pp.tau() / (pc.K * pc.K * q));
}

RVector major_axis(const RMatrix& form) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (form + form.transpose()));
  RVector v = es.eigenvectors().col(form.rows() - 1);
  // Deterministic sign: first nonzero component positive.
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-14) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

cplx log_small_time_amplitude(const PacketParams& pp, double zeta) {
  const double tau = pp.tau();
  const GammaEval ge = gamma_eval(pp.curve, zeta);
  return pp.log_kgf_constant() + 0.5 * std::log(pi / (2.0 * pp.m)) + std::log(ge.sqrt_det) +
         (pp.mu / 2.0 - 0.25) * std::log(pp.gamma) - (pp.mu / 2.0 + 0.25) * std::log(tau) -
         pp.p();
}

EnvelopeResult envelope_small_time(const SpacetimePoint& pt, const PacketParams& pp,
                                   const SmallTimeOptions& opt) {
  if (pt.r_perp.size() != pp.curve.dim()) throw DimensionError("point dimension mismatch");
  const PacketCharacteristics pc = packet_characteristics(pp);
  EnvelopeResult out;
  out.summary.regime = regime_classify(pt.t, pp, opt.margin);
  if (opt.zeta) {
    out.zeta = *opt.zeta;
  } else if (out.summary.regime == Regime::Small) {
    out.zeta = 0.0;
  } else if (out.summary.regime == Regime::Moderate) {
    out.zeta = 2.0 * pt.t;
  } else {
    // Outside both windows: keep the branch that better matches the exact field at the center.
    const SpacetimePoint c(pt.t, pc.v_gr * pt.t, RVector::Zero(pp.curve.dim()));
    const cplx exact = u_packet(c, pp).log_value();
    const double d0 = std::abs(std::exp(log_small_time_field(c, pp, pc, 0.0) - exact) - 1.0);
    const double d1 =
        std::abs(std::exp(log_small_time_field(c, pp, pc, 2.0 * pt.t) - exact) - 1.0);
    out.zeta = d1 < d0 ? 2.0 * pt.t : 0.0;
    out.summary.warnings.push_back(std::string("regime ") + to_string(out.summary.regime) +
                                   ": zeta chosen by center discrepancy");
  }
  if (out.summary.regime == Regime::Large)
    out.summary.warnings.push_back("large-time regime: small-time envelope not applicable");
  if (pc.p < 10.0) out.summary.warnings.push_back("p < 10: asymptotics may be inaccurate");

  const GammaEval ge = gamma_eval(pp.curve, out.zeta);
  const RVector e = unit_or_default(opt.e_perp, ge.matrix.imag());
  out.field = LogComplexField::from_log(log_small_time_field(pt, pp, pc, out.zeta));
  out.g = 0.5 * pc.p * pp.tau() * quad_form(ge.matrix, e, false);
  out.summary.widths["parallel"] = width_parallel(pc);
  out.summary.widths["perp"] = width_perp(pp, out.zeta, e);
  out.summary.conditions = validity_conditions(pp, opt.margin);
  return out;
}

EnvelopeResult envelope_large_time(const SpacetimePoint& pt, const PacketParams& pp,
                                   const LargeTimeOptions& opt) {
  const int d = pp.curve.dim();
  if (pt.r_perp.size() != d) throw DimensionError("point dimension mismatch");
  if (pt.t == 0.0) throw DomainError("envelope_large_time: t must be nonzero");
  const double vz = pt.z / pt.t;
  const RVector vp = pt.r_perp / pt.t;
  const double v2 = vz * vz + vp.squaredNorm();
  if (!(v2 < 1.0)) throw DomainError("envelope_large_time: point outside the light cone");
  const double v = std::sqrt(v2);
  const PacketCharacteristics pc = packet_characteristics(pp);
  const double chi = pc.K / pc.p;
  const double tau = pp.tau();
  const double sgn = pt.t > 0 ? 1.0 : -1.0;

  EnvelopeResult out;
  out.summary.regime = regime_classify(pt.t, pp, opt.margin);
  if (out.summary.regime != Regime::Large)
    out.summary.warnings.push_back(std::string("regime ") + to_string(out.summary.regime) +
                                   ": large-time envelope outside its window");

  const double vperp = vp.norm();
  const double theta = std::atan2(vperp, vz);
  const RMatrix minus_im_inv = -pp.curve.gamma0_inv().imag();
  const RVector e_default = unit_or_default(opt.e_perp, minus_im_inv);
  const RVector e = vperp > 0.0 ? RVector(vp / vperp) : e_default;
  const cplx phi_tt = I * chi * chi * e.cast<cplx>().dot(pp.curve.gamma0_inv() * e.cast<cplx>()) / tau;
  const double dv = width_radial(pc);
  const double vg = pc.v_gr;
  const cplx log_amp = pp.log_kgf_constant() + 0.5 * std::log(pi / (2.0 * pp.m)) +
                       I * (delta_gamma_at(pp.curve, pt.beta()) - (1.0 + d) * sgn * pi / 4) +
                       (pp.mu / 2.0 - 0.25) * std::log(1.0 - vg * vg) -
                       0.5 * (d + 1.0) * std::log(std::abs(pt.t)) -
                       (pp.mu + d / 2.0) * std::log(1.0 + vg);
  const cplx lf = log_amp - pc.p - I * pp.m * pt.t * std::sqrt(1.0 - v2) -
                  pc.p * phi_tt * theta * theta / 2.0 - (v - vg) * (v - vg) / (2.0 * dv * dv);
  out.field = LogComplexField::from_log(lf);
  out.summary.widths["radial"] = dv;
  out.summary.widths["angular"] = width_angular(pp, e_default);
  out.summary.conditions = validity_conditions(pp, opt.margin);
  return out;
}

std::vector<Condition> validity_conditions(const PacketParams& pp, double margin) {
  const double tau = pp.tau();
  const PacketCharacteristics pc = packet_characteristics(pp, true);
  const double p = pc.p, om = pc.Omega, k = pc.K;
  const double dpar = width_parallel(pc);
  const RMatrix im_g0 = pp.curve.gamma0().imag();
  const RMatrix minus_im_inv = -pp.curve.gamma0_inv().imag();
  const double lam_min = min_eigenvalue(im_g0);
  const double eps_eff = min_eigenvalue(minus_im_inv);
  const double dperp_max = 1.0 / std::sqrt(p * tau * lam_min);
  const double dtheta_max = std::sqrt(p * tau / (k * k * eps_eff));
  const double dv = width_radial(pc);
  std::vector<Condition> c;
  c.push_back(make_condition("forward_propagation", pp.gamma, tau, 1.0));
  c.push_back(make_condition("large_parameter", 1.0, p, margin));
  c.push_back(make_condition("longitudinal_travel", 1.0 / p,
                             tau / (4.0 * pp.gamma) * std::pow(1.0 - pp.gamma / tau, 2), margin));
  c.push_back(make_condition("localization_small_t_parallel", dpar,
                             std::sqrt(pp.gamma / tau), margin));
  c.push_back(make_condition("localization_small_t_perp", dperp_max,
                             1.0 / std::sqrt(tau * pp.curve.norm()), margin));
  c.push_back(make_condition("travel_vs_width", dpar, pc.v_gr * std::sqrt(tau / pp.gamma),
                             margin));
  c.push_back(make_condition("moderate_window", 1.0 / pp.curve.norm(), tau, margin));
  c.push_back(make_condition("large_t_radial", dv, pc.v_gr, margin));
  c.push_back(make_condition("large_t_angular", dtheta_max, 1.0, margin));
  c.push_back(make_condition("good_localization_longitudinal", p,
                             om > k ? k * k * (om + k) / (om - k)
                                    : std::numeric_limits<double>::infinity(),
                             margin));
  c.push_back(make_condition("good_localization_spreading", p * p * p, (om * k) * (om * k),
                             margin));
  c.push_back(make_condition("good_localization_cone", p, k * k * eps_eff / tau, margin));
  return c;
}

DesignResult design_parameters(double m, double Omega, double delta_par, double delta_perp) {
  if (!(m > 0.0)) throw ParameterError("design_parameters: m must be > 0");
  if (!(Omega > 0.0) || !(delta_par > 0.0) || !(delta_perp > 0.0))
    throw ParameterError("design_parameters: Omega and widths must be > 0");
  if (!(Omega > m)) throw ParameterError("design_parameters: infeasible, Omega <= m");
  DesignResult dr;
  const double p = delta_par * delta_par * Omega * Omega;
  if (!(Omega > p))
    throw ParameterError("design_parameters: infeasible, Omega <= p = Delta_par^2 Omega^2");
  const double k = std::sqrt(Omega * Omega - p * p);
  const double v = k / Omega;
  const double s = p / m;  // sqrt(gamma tau)
  const double r = std::sqrt((1.0 - v) / (1.0 + v));  // sqrt(gamma / tau)
  dr.gamma = s * r;
  dr.tau = s / r;
  dr.eps = p * dr.tau * delta_perp * delta_perp;
  dr.characteristics = packet_characteristics(dr.gamma, dr.tau, m);
  if (p < 10.0) dr.warnings.push_back("p < 10: asymptotic widths are unreliable");
  return dr;
}

PacketParams designed_packet(const DesignResult& dr, double m, int d, double mu) {
  return packet_from_tau(stigmatic_curve(d, dr.eps), mu, dr.gamma, dr.tau, m, dr.tau / 2.0);
}

const char* to_string(FitAxis a) {
  switch (a) {
    case FitAxis::longitudinal: return "longitudinal";
    case FitAxis::transverse: return "transverse";
    case FitAxis::radial: return "radial";
    case FitAxis::angular: return "angular";
  }
  return "unknown";
}

FitResult empirical_envelope_fit(const PacketParams& pp, double t, FitAxis axis,
                                 const FitOptions& opt) {
  if (opt.samples < 8) throw ParameterError("empirical_envelope_fit: need >= 8 samples");
  const int d = pp.curve.dim();
  const PacketCharacteristics pc = packet_characteristics(pp);
  const double s = std::sqrt(pp.gamma * pp.tau());
  const double zc = pc.v_gr * t;
  const double sgn = t >= 0 ? 1.0 : -1.0;

  RVector e;
  double pred = 0.0;
  switch (axis) {
    case FitAxis::longitudinal:
      pred = width_parallel(pc) * s;
      break;
    case FitAxis::transverse: {
      const Regime rg = regime_classify(t, pp);
      const double zeta = rg == Regime::Moderate ? 2.0 * t : 0.0;
      e = unit_or_default(opt.e_perp, gamma_eval(pp.curve, zeta).matrix.imag());
      pred = width_perp(pp, zeta, e) * s;
      break;
    }
    case FitAxis::radial:
      pred = width_radial(pc) * std::abs(t);
      break;
    case FitAxis::angular:
      e = unit_or_default(opt.e_perp, -pp.curve.gamma0_inv().imag());
      pred = width_angular(pp, e);
      break;
  }

  auto point_at = [&](double x) {
    SpacetimePoint q(t, zc, RVector::Zero(d));
    switch (axis) {
      case FitAxis::longitudinal:
      case FitAxis::radial:
        q.z = zc + x;
        break;
      case FitAxis::transverse:
        q.r_perp = x * e;
        break;
      case FitAxis::angular: {
        const double rad = pc.v_gr * std::abs(t);
        q.z = sgn * rad * std::cos(x);
        q.r_perp = rad * std::sin(x) * e;
        break;
      }
    }
    return q;
  };

  const int n = opt.samples;
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double xi = opt.span * (2.0 * i / (n - 1) - 1.0);  // in predicted widths
    a(i, 0) = xi * xi;
    a(i, 1) = xi;
    a(i, 2) = 1.0;
    y(i) = u_packet(point_at(xi * pred), pp).log_abs;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  FitResult fr;
  fr.predicted = pred;
  const double range = y.maxCoeff() - y.minCoeff();
  fr.misfit = range > 0.0 ? std::sqrt((a * c - y).squaredNorm() / n) / range : 0.0;
  if (!(c(0) < 0.0))
    throw FitError(std::string("empirical_envelope_fit: ") + to_string(axis) +
                   " profile is not peaked (curvature " + std::to_string(c(0)) + ")");
  if (fr.misfit > opt.max_misfit)
    throw FitError(std::string("empirical_envelope_fit: ") + to_string(axis) +
                   " profile misfit " + std::to_string(fr.misfit) + " exceeds " +
                   std::to_string(opt.max_misfit));
  const double x0 = -c(1) / (2.0 * c(0));
  fr.width = pred / std::sqrt(-2.0 * c(0));
  fr.center = (axis == FitAxis::longitudinal || axis == FitAxis::radial) ? zc + x0 * pred
                                                                         : x0 * pred;
  return fr;
}

double empirical_group_velocity(const PacketParams& pp, double t1, double t2) {
  if (t1 == t2) throw ParameterError("empirical_group_velocity: times must differ");
  // The parabola fit locates the peak; Brent refines it to the argmax of |u|, which is free of
  // the bias that profile skewness puts into the fitted center.
  auto peak = [&](double t) {
    const FitResult f = empirical_envelope_fit(pp, t, FitAxis::longitudinal);
    RVector r = RVector::Zero(pp.curve.dim());
    auto neg = [&](double z) { return -u_packet(SpacetimePoint(t, z, r), pp).log_abs; };
    return boost::math::tools::brent_find_minima(neg, f.center - f.width, f.center + f.width, 52)
        .first;
  };
  return (peak(t2) - peak(t1)) / (t2 - t1);
}

}  // namespace lwp
