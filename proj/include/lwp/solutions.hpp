// The four closed-form solution families, evaluated in log-complex form.
#pragma once

#include "lwp/core.hpp"
#include "lwp/gamma.hpp"

#include <optional>

namespace lwp {

struct SpacetimePoint {
  double t = 0.0;
  double z = 0.0;
  RVector r_perp;

  SpacetimePoint() = default;
  SpacetimePoint(double t_, double z_, RVector r) : t(t_), z(z_), r_perp(std::move(r)) {}

  double alpha() const { return z - t; }
  double beta() const { return z + t; }
};

// Beam families. m == 0 selects the wave equation; eps_m is used only when m > 0.
struct BeamParams {
  BeamParams(GammaCurve curve, double eta, double m = 0.0, double eps_m = 1.0,
             cplx c_b = 1.0);

  GammaCurve curve;
  double eta;
  double m;
  double eps_m;
  cplx c_b;
  // Replaces the derived overall constant (C_b for u_beam, c_b for phi_beam).
  std::optional<cplx> constant_override;

  void validate() const;
  // log C_b, C_b = c_b exp(-eps_m m^2/(4 eta) + i pi/4) sqrt(pi/eta); honours the override.
  cplx log_kgf_constant() const;
  // log c_b, or the override.
  cplx log_we_constant() const;
};

// Packet families. mu is the Bessel order of both phi_packet and u_packet.
struct PacketParams {
  PacketParams(GammaCurve curve, double mu, double gamma, double kappa, double m = 0.0,
               double eps_m = 1.0, cplx c_b = 1.0);

  GammaCurve curve;
  double mu;
  double gamma;
  double kappa;
  double m;
  double eps_m;
  cplx c_b;
  std::optional<cplx> constant_override;

  void validate() const;
  // tau = 4 gamma kappa^2 / m^2 + eps_m; requires m > 0.
  double tau() const;
  bool forward() const { return m > 0.0 && tau() > gamma; }
  // p = m sqrt(gamma tau).
  double p() const { return m * std::sqrt(gamma * tau()); }
  // log c_p, c_p = 2 (2 kappa^2 gamma)^-mu c_b; honours the override.
  cplx log_we_constant() const;
  // log C_p, C_p = 2^(mu+1) sqrt(pi) e^(i pi/4) c_b / m^mu; honours the override.
  cplx log_kgf_constant() const;
};

// KGF packet with kappa chosen so that 4 gamma kappa^2/m^2 + eps_m = tau.
PacketParams packet_from_tau(GammaCurve curve, double mu, double gamma, double tau,
                             double m, double eps_m = 1.0, cplx c_b = 1.0);

// alpha + (r, Gamma(beta) r).
cplx theta(const SpacetimePoint& pt, const GammaCurve& curve);

// theta together with sqrt det Gamma(beta), sharing one Gamma evaluation.
struct ThetaEval {
  cplx theta;
  cplx sqrt_det;
};
ThetaEval theta_eval(const SpacetimePoint& pt, const GammaCurve& curve);

LogComplexField phi_beam(const SpacetimePoint& pt, const BeamParams& bp);
LogComplexField phi_packet(const SpacetimePoint& pt, const PacketParams& pp);
LogComplexField u_beam(const SpacetimePoint& pt, const BeamParams& bp);
LogComplexField u_packet(const SpacetimePoint& pt, const PacketParams& pp);

// s = 2 kappa gamma (1 - i theta/gamma)^(1/2), Re s > 0.
cplx phase_s(cplx theta, double gamma, double kappa);
// S_p = ((gamma - i theta)(tau + i beta))^(1/2), Re S_p > 0.
cplx phase_Sp(cplx theta, double beta, double gamma, double tau);
// S_b = theta eta/m - beta m/(4 eta).
cplx phase_Sb(cplx theta, double beta, double eta, double m);

// c3 e^(-m S_p) / S_p.
cplx u_packet_2d_radial(cplx S_p, cplx c3, double m);

enum class PhaseKind { we_theta, we_s, kgf_Sb, kgf_Sp };

// |(dS/dt)^2 - |grad S|^2 - sigma| / (|dS/dt|^2 + 1), central differences with step h.
// For kgf_Sp the phase is S = i S_p, since u_p ~ exp(-m S_p).
double eikonal_residual(PhaseKind kind, const SpacetimePoint& pt, const BeamParams& bp,
                        double h);
double eikonal_residual(PhaseKind kind, const SpacetimePoint& pt, const PacketParams& pp,
                        double h);

struct TransportResidual {
  double first;   // 2(theta_t g_t - grad theta . grad g) + g box theta, relative to its terms
  double second;  // (g_t)^2 - |grad g|^2, relative to its terms
};

// g = sqrt det Gamma(beta); freeze_amplitude holds g at its value at pt (negative control).
TransportResidual transport_residual(const SpacetimePoint& pt, const GammaCurve& curve,
                                     double h, bool freeze_amplitude = false);

// max(1e-6, 1e-4 sqrt(gamma tau)/p) = max(1e-6, 1e-4/m).
double default_fd_step(const PacketParams& pp);

}  // namespace lwp
