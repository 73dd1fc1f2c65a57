// Fourier images of the four families, inverse-transform / superposition / zeta oracles and
// the saddle-point and stationary-phase cross-checks.
//
// Convention: u(t, r) = (2 pi)^-(n+1) \int d^n k  u_hat(k) e^(i k.r - i omega_k t), n = d + 1,
// with r = (r_perp, z) and k = (k_perp, k_z).
#pragma once

#include "lwp/asymptotics.hpp"
#include "lwp/core.hpp"
#include "lwp/solutions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lwp {

// A point on the positive-frequency sheet; omega is always derived.
class WaveVector {
 public:
  WaveVector(RVector k_perp, double k_z, double mass = 0.0);

  const RVector& k_perp() const { return k_perp_; }
  double k_z() const { return k_z_; }
  double mass() const { return mass_; }
  double omega() const { return omega_; }
  int dim() const { return static_cast<int>(k_perp_.size()); }

 private:
  RVector k_perp_;
  double k_z_;
  double mass_;
  double omega_;
};

enum class Family { phi_b, phi_p, u_b, u_p };
const char* to_string(Family f);
bool is_beam(Family f);
bool is_kgf(Family f);

// Beam images carry delta(eta - (k_z + omega)/2); the smooth density is returned together
// with the constraint value (k_z + omega)/2 that eta must take.
struct FourierImage {
  LogComplexField density;
  std::optional<double> eta_constraint;
};

// DomainError when k_z + omega <= 0; ParameterError when family and params disagree.
FourierImage fourier_image(Family f, const BeamParams& bp, const WaveVector& k);
FourierImage fourier_image(Family f, const PacketParams& pp, const WaveVector& k);

// Exponent of the image without the algebraic prefactor.
cplx fourier_exponent(Family f, const BeamParams& bp, const WaveVector& k);
cplx fourier_exponent(Family f, const PacketParams& pp, const WaveVector& k);

// log of the image constants c_hat_b (WE) and C_hat_b (KGF).
cplx log_image_constant_we(const GammaCurve& curve, cplx c_b);
cplx log_image_constant_kgf(const GammaCurve& curve, cplx c_b);

// det of the Hessian of omega(k) = sqrt(m^2 + |k|^2), computed from the matrix.
double dispersion_hessian_det(const WaveVector& k);

struct InverseFtOptions {
  int nodes_per_panel = 20;  // Gauss-Legendre order, one of 10, 15, 20, 25, 30
  int panels = 4;            // initial panels per axis
  int max_panels = 64;
  double rel_tol = 1e-7;     // between successive panel doublings
  double drop = 40.0;        // truncate where log|image| is this far below the peak
  double box_margin = 1.5;
};

// Numerical inverse transform of the closed-form image at pt. Packets: n-dimensional
// k-integral. Beams: d-dimensional integral over k_perp on the constraint surface.
// Requires d <= 2. AccuracyError if the panel doubling does not converge.
LogComplexField inverse_ft_oracle(Family f, const PacketParams& pp, const SpacetimePoint& pt,
                                  const InverseFtOptions& opt = {});
LogComplexField inverse_ft_oracle(Family f, const BeamParams& bp, const SpacetimePoint& pt,
                                  const InverseFtOptions& opt = {});

struct InverseFtCheck {
  cplx constant;                    // closed form / integral at the origin
  double constant_stability = 0.0;  // max |c_i/c - 1| over the points
  std::vector<double> deviations;   // |closed - c integral| / |closed|
  double max_deviation = 0.0;
};

InverseFtCheck inverse_ft_check(Family f, const PacketParams& pp,
                                const std::vector<SpacetimePoint>& points,
                                const InverseFtOptions& opt = {});
InverseFtCheck inverse_ft_check(Family f, const BeamParams& bp,
                                const std::vector<SpacetimePoint>& points,
                                const InverseFtOptions& opt = {});

// eta^(-nu-1) exp(-gamma (eta + kappa^2/eta)) in log form.
double log_spectral_weight(double eta, double nu, double gamma, double kappa);

// \int_0^inf F(eta) beam(eta) d eta with nu = mu (phi_p) or mu - 1/2 (u_p). The derived
// constant chain is used, so any constant_override on pp is ignored.
// AccuracyError if the quadrature error estimate exceeds 1e-11 relative.
LogComplexField superposition_oracle(Family target, const PacketParams& pp,
                                     const SpacetimePoint& pt);

// Integrand F(eta) beam(eta) of superposition_oracle.
LogComplexField superposition_integrand(Family target, const PacketParams& pp,
                                        const SpacetimePoint& pt, double eta);

// u_beam rebuilt as \int d zeta phi_b^(d+1) e^(-i m zeta) on blockdiag(Gamma0, i/eps_m).
// InvariantBreach when the branch of the enlarged determinant root is inconsistent.
LogComplexField zeta_ft_oracle(const BeamParams& bp, const SpacetimePoint& pt);

struct StationaryPhaseResult {
  LogComplexField field;
  Regime regime = Regime::Unclassified;
  RVector k_star;  // (k_perp, k_z)
  std::vector<std::string> warnings;
};

// Large-time stationary-phase evaluation of u_packet from its image. ParameterError for
// m = 0; DomainError ("validity breach") when |r| >= |t|.
StationaryPhaseResult stationary_phase_large_t(const PacketParams& pp, const SpacetimePoint& pt);

// Phase Phi(chi) of the u_p image (log u_hat = -p Phi + prefactor), chi = k/m ordered as
// (chi_perp, chi_z), with its gradient and Hessian.
struct SaddlePhase {
  cplx value;
  CVector gradient;
  CMatrix hessian;
};
SaddlePhase saddle_phase(const PacketParams& pp, const CVector& chi);

struct SaddleResult {
  LogComplexField field;
  CVector chi0;  // saddle of Phi
  CVector chi1;  // first-order shift i (m/p) H^-1 (r - v_gr t)
  CMatrix hessian;
  int iterations = 0;
  std::vector<std::string> warnings;
};

// Small-time steepest-descent evaluation of u_packet. SaddleError if damped Newton does not
// converge in 50 iterations.
SaddleResult saddle_point_small_t(const PacketParams& pp, const SpacetimePoint& pt);

}  // namespace lwp
