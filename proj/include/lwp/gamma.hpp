// Complex symmetric Gamma(beta) = Gamma0 (E + beta Gamma0)^-1 and its determinant root.
#pragma once

#include "lwp/core.hpp"

#include <array>
#include <optional>
#include <vector>

namespace lwp {

struct ValidationReport {
  bool pass = false;
  double symmetry_defect = 0.0;
  std::vector<double> im_eigenvalues;  // ascending
  std::string message;
};

// Symmetry within 1e-12 and Im(gamma0) positive definite.
ValidationReport validate_gamma0(const CMatrix& gamma0);

// Largest singular value.
double spectral_norm(const CMatrix& m);

class GammaCurve {
 public:
  // Throws ParameterError when gamma0 fails validate_gamma0.
  explicit GammaCurve(const CMatrix& gamma0);

  const CMatrix& gamma0() const { return gamma0_; }
  const CMatrix& gamma0_inv() const { return gamma0_inv_; }
  int dim() const { return static_cast<int>(gamma0_.rows()); }
  // arg of the principal sqrt(det Gamma0).
  double branch_anchor() const { return std::arg(sqrt_det0_); }
  cplx sqrt_det0() const { return sqrt_det0_; }
  double norm() const { return norm_; }
  double inv_norm() const { return inv_norm_; }
  // Eigenvalues of Gamma0; all have positive imaginary part.
  const CVector& eigenvalues() const { return eigenvalues_; }

  // Set by build_general_astigmatic; nullopt for matrices given directly.
  std::optional<bool> localization_ok;
  std::optional<double> localization_lhs;
  std::optional<double> localization_rhs;

 private:
  CMatrix gamma0_;
  CMatrix gamma0_inv_;
  cplx sqrt_det0_;
  double norm_ = 0.0;
  double inv_norm_ = 0.0;
  CVector eigenvalues_;
};

struct GammaAt {
  double beta = 0.0;
  CMatrix matrix;
  cplx sqrt_det;       // continued from the principal branch at beta = 0
  double delta_gamma;  // arg sqrt det Gamma - arg sqrt det(-i Gamma), wrapped
};

GammaCurve stigmatic_curve(int d, double eps);

// Gamma0 = U diag(1/(-z_j - i eps_j)) U^T with U the (complex) rotation by phi.
GammaCurve build_general_astigmatic(double z1, double eps1, double z2, double eps2,
                                    cplx phi);

GammaAt gamma_at(const GammaCurve& curve, double beta);

// gamma_at without delta_gamma; used in hot loops. Each factor 1 + beta*lambda_j of
// det(E + beta Gamma0) stays off the negative real axis, so the product of principal
// roots selects the same branch as the adaptive continuation in gamma_at.
struct GammaEval {
  CMatrix matrix;
  cplx sqrt_det;
};
GammaEval gamma_eval(const GammaCurve& curve, double beta);

// sqrt det Gamma(beta) by adaptive beta-stepping with phase unwrapping (reference path).
cplx sqrt_det_continued(const GammaCurve& curve, double beta);

// arg sqrt det Gamma(beta) - sum_j arg sqrt(mu_j), mu_j eigenvalues of -i Gamma(beta).
double delta_gamma_at(const GammaCurve& curve, double beta);

// Same flow started from an arbitrary symmetric matrix (semigroup checks).
CMatrix gamma_flow(const CMatrix& start, double beta);

// Two-term expansion beta^-1 E - beta^-2 Gamma0^-1.
CMatrix gamma_large_beta(const GammaCurve& curve, double beta);

// Product of principal roots over eigenvalues of Gamma0; cross-check for gamma_at.
std::optional<cplx> sqrt_det_eigen(const GammaCurve& curve, double beta);

struct PrincipalAxes {
  double angle;                 // major axis, in (-pi/2, pi/2]
  std::array<double, 2> widths; // eigenvalues, descending
};

PrincipalAxes principal_axes(const Eigen::Matrix2d& m);

// Real symmetric imaginary part.
RMatrix im_part(const CMatrix& m);
RMatrix re_part(const CMatrix& m);

}  // namespace lwp
