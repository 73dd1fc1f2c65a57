#include "lwp/gamma.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>

namespace lwp {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPdRelTol = 1e-14;
constexpr double kMaxCond = 1e14;
constexpr int kMaxDim = 8;

cplx det_shifted(const CMatrix& g0, double beta) {
  const int d = static_cast<int>(g0.rows());
  CMatrix a = CMatrix::Identity(d, d) + beta * g0;
  return a.partialPivLu().determinant();
}

// Unwrapped arg of det(E + b Gamma0) along b in [0, beta]; halves the step until
// every accepted sub-step changes the phase by less than pi/4.
double unwrapped_det_phase(const CMatrix& g0, double beta, cplx* det_end) {
  double cur = 0.0;
  cplx fcur = 1.0;
  double phase = 0.0;
  double h = beta;
  const double min_step = 1e-300 + 1e-15 * std::abs(beta);
  while (cur != beta) {
    if ((h > 0 && cur + h > beta) || (h < 0 && cur + h < beta)) h = beta - cur;
    const double b = cur + h;
    const cplx fmid = det_shifted(g0, cur + 0.5 * h);
    const cplx fnew = det_shifted(g0, b);
    const double d1 = std::arg(fmid / fcur);
    const double d2 = std::arg(fnew / fmid);
    if (std::abs(d1) < pi / 4 && std::abs(d2) < pi / 4 && std::abs(d1 + d2) < pi / 4) {
      phase += d1 + d2;
      cur = b;
      fcur = fnew;
      h *= 2.0;
    } else {
      h *= 0.5;
      if (std::abs(h) < min_step)
        throw EvaluationError("gamma_at: branch continuation step underflow");
    }
  }
  *det_end = fcur;
  return phase;
}

CMatrix symmetrize(const CMatrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

RMatrix im_part(const CMatrix& m) { return m.imag(); }
RMatrix re_part(const CMatrix& m) { return m.real(); }

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

ValidationReport validate_gamma0(const CMatrix& gamma0) {
  if (gamma0.rows() != gamma0.cols() || gamma0.rows() < 1)
    throw DimensionError("validate_gamma0: matrix must be square with d >= 1");
  if (gamma0.rows() > kMaxDim)
    throw DimensionError("validate_gamma0: d > 8 not supported");
  ValidationReport r;
  r.symmetry_defect = (gamma0 - gamma0.transpose()).cwiseAbs().maxCoeff();
  RMatrix im = im_part(gamma0);
  im = 0.5 * (im + im.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(im, Eigen::EigenvaluesOnly);
  for (int i = 0; i < im.rows(); ++i) r.im_eigenvalues.push_back(es.eigenvalues()(i));
  const double scale = std::max(1.0, gamma0.cwiseAbs().maxCoeff());
  const double im_norm = std::max(std::abs(r.im_eigenvalues.front()),
                                  std::abs(r.im_eigenvalues.back()));
  const bool sym_ok = r.symmetry_defect <= kSymTol * scale;
  const bool pd_ok = r.im_eigenvalues.front() > kPdRelTol * im_norm && im_norm > 0.0;
  r.pass = sym_ok && pd_ok;
  if (!sym_ok)
    r.message = "gamma0 is not symmetric";
  else if (!pd_ok)
    r.message = "Im gamma0 is not positive definite";
  else
    r.message = "ok";
  return r;
}

GammaCurve::GammaCurve(const CMatrix& gamma0) {
  ValidationReport r = validate_gamma0(gamma0);
  if (!r.pass) throw ParameterError("invalid gamma0: " + r.message);
  gamma0_ = symmetrize(gamma0);
  gamma0_inv_ = symmetrize(gamma0_.inverse());
  sqrt_det0_ = std::sqrt(gamma0_.determinant());
  norm_ = spectral_norm(gamma0_);
  inv_norm_ = spectral_norm(gamma0_inv_);
  Eigen::ComplexEigenSolver<CMatrix> es(gamma0_, false);
  eigenvalues_ = es.eigenvalues();
}

GammaCurve stigmatic_curve(int d, double eps) {
  if (d < 1) throw DimensionError("stigmatic_curve: d must be >= 1");
  if (!(eps > 0.0)) throw ParameterError("stigmatic_curve: eps must be > 0");
  return GammaCurve(CMatrix::Identity(d, d) * cplx(0.0, 1.0 / eps));
}

GammaCurve build_general_astigmatic(double z1, double eps1, double z2, double eps2,
                                    cplx phi) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0))
    throw ParameterError("build_general_astigmatic: eps1 and eps2 must be > 0");
  CMatrix u(2, 2);
  u << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  CMatrix lam = CMatrix::Zero(2, 2);
  lam(0, 0) = 1.0 / cplx(-z1, -eps1);
  lam(1, 1) = 1.0 / cplx(-z2, -eps2);
  // U^-1 = U^T because cos^2 + sin^2 = 1 also for complex angles.
  CMatrix g0 = u * lam * u.transpose();
  GammaCurve curve(symmetrize(g0));
  const double c = std::cosh(2.0 * phi.imag());
  const double dz = z2 - z1;
  curve.localization_lhs = c * c * (dz * dz + (eps2 - eps1) * (eps2 - eps1));
  curve.localization_rhs = dz * dz + (eps2 + eps1) * (eps2 + eps1);
  curve.localization_ok = *curve.localization_lhs < *curve.localization_rhs;
  return curve;
}

GammaEval gamma_eval(const GammaCurve& curve, double beta) {
  const CMatrix& g0 = curve.gamma0();
  const int d = curve.dim();
  GammaEval out;
  if (beta == 0.0) {
    out.matrix = g0;
    out.sqrt_det = curve.sqrt_det0();
    return out;
  }
  const CMatrix a = CMatrix::Identity(d, d) + beta * g0;
  Eigen::PartialPivLU<CMatrix> lu(a);
  if (!(lu.rcond() > 1.0 / kMaxCond))
    throw EvaluationError("gamma_at: E + beta*Gamma0 numerically singular");
  out.matrix = symmetrize(lu.solve(g0));
  cplx root = std::sqrt(lu.determinant());
  cplx ref = 1.0;
  for (int i = 0; i < d; ++i) ref *= std::sqrt(1.0 + beta * curve.eigenvalues()(i));
  if (std::abs(root - ref) > std::abs(root + ref)) root = -root;
  out.sqrt_det = curve.sqrt_det0() / root;
  return out;
}

cplx sqrt_det_continued(const GammaCurve& curve, double beta) {
  if (beta == 0.0) return curve.sqrt_det0();
  cplx det_end;
  const double phase = unwrapped_det_phase(curve.gamma0(), beta, &det_end);
  return curve.sqrt_det0() * std::polar(1.0 / std::sqrt(std::abs(det_end)), -0.5 * phase);
}

double delta_gamma_at(const GammaCurve& curve, double beta) {
  GammaEval ev = gamma_eval(curve, beta);
  Eigen::ComplexEigenSolver<CMatrix> es(-I * ev.matrix, false);
  double s = 0.0;
  for (int i = 0; i < curve.dim(); ++i) s += 0.5 * std::arg(es.eigenvalues()(i));
  return wrap_phase(std::arg(ev.sqrt_det) - s);
}

GammaAt gamma_at(const GammaCurve& curve, double beta) {
  GammaEval ev = gamma_eval(curve, beta);
  if (beta != 0.0) {
    Eigen::JacobiSVD<CMatrix> svd(CMatrix::Identity(curve.dim(), curve.dim()) +
                                  beta * curve.gamma0());
    const auto& sv = svd.singularValues();
    if (sv(curve.dim() - 1) <= 0.0 || sv(0) / sv(curve.dim() - 1) > kMaxCond)
      throw EvaluationError("gamma_at: E + beta*Gamma0 numerically singular");
  }
  GammaAt out;
  out.beta = beta;
  out.matrix = ev.matrix;
  out.sqrt_det = sqrt_det_continued(curve, beta);
  Eigen::ComplexEigenSolver<CMatrix> es(-I * ev.matrix, false);
  double s = 0.0;
  for (int i = 0; i < curve.dim(); ++i) s += 0.5 * std::arg(es.eigenvalues()(i));
  out.delta_gamma = wrap_phase(std::arg(out.sqrt_det) - s);
  return out;
}

CMatrix gamma_flow(const CMatrix& start, double beta) {
  const int d = static_cast<int>(start.rows());
  CMatrix a = CMatrix::Identity(d, d) + beta * start;
  return symmetrize(a.partialPivLu().solve(start));
}

CMatrix gamma_large_beta(const GammaCurve& curve, double beta) {
  if (beta == 0.0) throw DomainError("gamma_large_beta: beta must be nonzero");
  const int d = curve.dim();
  return CMatrix::Identity(d, d) / beta - curve.gamma0_inv() / (beta * beta);
}

std::optional<cplx> sqrt_det_eigen(const GammaCurve& curve, double beta) {
  Eigen::ComplexEigenSolver<CMatrix> es(curve.gamma0(), true);
  if (es.info() != Eigen::Success) return std::nullopt;
  const CMatrix& v = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(v);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < 1e-8 * s(0)) return std::nullopt;
  cplx prod = 1.0;
  for (int i = 0; i < curve.dim(); ++i) {
    const cplx lam = es.eigenvalues()(i);
    prod *= std::sqrt(lam) / std::sqrt(1.0 + beta * lam);
  }
  // Product of principal roots equals the principal root of det at beta = 0 up to sign.
  cplx at0 = 1.0;
  for (int i = 0; i < curve.dim(); ++i) at0 *= std::sqrt(es.eigenvalues()(i));
  if (std::abs(at0 - curve.sqrt_det0()) > std::abs(at0 + curve.sqrt_det0())) prod = -prod;
  return prod;
}

PrincipalAxes principal_axes(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) throw DomainError("principal_axes: matrix not positive definite");
  PrincipalAxes pa;
  pa.widths = {ev(1), ev(0)};
  if (ev(1) - ev(0) <= 1e-15 * ev(1)) {
    pa.angle = 0.0;
    return pa;
  }
  Eigen::Vector2d v = es.eigenvectors().col(1);
  double a = std::atan2(v(1), v(0));
  if (a <= -pi / 2) a += pi;
  if (a > pi / 2) a -= pi;
  pa.angle = a;
  return pa;
}

}  // namespace lwp
