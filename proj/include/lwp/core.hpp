// Shared scalar/matrix types, error classes and the log-complex field value.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lwp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct EvaluationError : Error { using Error::Error; };
// Raised when a quantity that is provably in range for valid input is not.
struct InvariantBreach : Error { using Error::Error; };
struct AccuracyError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct SaddleError : Error { using Error::Error; };

// Wrap an angle into (-pi, pi].
inline double wrap_phase(double a) {
  double w = std::remainder(a, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

// Field value kept as log|u| and arg u so that e^(-25000)-sized values survive.
struct LogComplexField {
  double log_abs = -std::numeric_limits<double>::infinity();
  double phase = 0.0;
  cplx value{0.0, 0.0};

  static LogComplexField from_log(cplx log_value) {
    LogComplexField f;
    f.log_abs = log_value.real();
    f.phase = wrap_phase(log_value.imag());
    f.value = std::exp(cplx(f.log_abs, f.phase));
    return f;
  }
  static LogComplexField from_value(cplx v) {
    return from_log(std::log(v));
  }
  cplx log_value() const { return {log_abs, phase}; }
  bool representable() const { return std::abs(log_abs) < 300.0; }
};

}  // namespace lwp
