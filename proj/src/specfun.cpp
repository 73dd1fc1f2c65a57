#include "lwp/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>

namespace lwp {

namespace {

constexpr double kEps = 1e-17;
constexpr double kMaxOrder = 50.0;
constexpr double kSeriesRadius = 2.0;

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
constexpr std::array<double, 29> kRecipGamma = {
    1.00000000000000000000e+00,  5.77215664901532865549e-01,  -6.55878071520253902449e-01,
    -4.20026350340952370210e-02, 1.66538611382291479313e-01,  -4.21977345555443333902e-02,
    -9.62197152787697303211e-03, 7.21894324666309990246e-03,  -1.16516759185906516871e-03,
    -2.15241674114950975192e-04, 1.28050282388116195512e-04,  -2.01348547807882386862e-05,
    -1.25049348214267063072e-06, 1.13302723198169592860e-06,  -2.05633841697760707339e-07,
    6.11609510448141608721e-09,  5.00200764446922294544e-09,  -1.18127457048702004406e-09,
    1.04342671169110053979e-10,  7.78226343990507081432e-12,  -3.69680561864220597869e-12,
    5.10037028745447575372e-13,  -2.05832605356650663575e-14, -5.34812253942301782029e-15,
    1.22677862823826084089e-15,  -1.18125930169745883374e-16, 1.18669225475160037462e-18,
    1.41238065531803185733e-18,  -2.29874568443537021993e-19};

void check_args(double mu, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.real() > 0.0))
    throw DomainError("bessel_k: requires Re z > 0");
  if (!std::isfinite(mu) || std::abs(mu) > kMaxOrder)
    throw ParameterError("bessel_k: |mu| must be <= 50");
}

// Upward recurrence K_{v+1} = K_{v-1} + (2v/z) K_v carried with a running log scale.
cplx recur_up(cplx k_lo, cplx k_hi, double v_hi, int steps, cplx z) {
  double log_scale = 0.0;
  for (int i = 0; i < steps; ++i) {
    cplx next = k_lo + (2.0 * (v_hi + i) / z) * k_hi;
    k_lo = k_hi;
    k_hi = next;
    const double mag = std::abs(k_hi);
    if (mag > 1e200) {
      k_lo /= mag;
      k_hi /= mag;
      log_scale += std::log(mag);
    }
  }
  return std::log(k_lo) + log_scale;
}

cplx log_half_integer(double nu, cplx z) {
  // nu = n + 1/2 with n >= 0; ratios r_j = K_{j+1/2}/K_{1/2}.
  const int n = static_cast<int>(std::lround(nu - 0.5));
  const cplx base = 0.5 * std::log(pi / (2.0 * z)) - z;
  if (n == 0) return base;
  double log_scale = 0.0;
  cplx r_prev = 1.0, r_cur = 1.0;  // r_{-1} = r_0 = 1
  for (int j = 0; j < n; ++j) {
    cplx next = r_prev + (2.0 * j + 1.0) / z * r_cur;
    r_prev = r_cur;
    r_cur = next;
    const double mag = std::abs(r_cur);
    if (mag > 1e200) {
      r_prev /= mag;
      r_cur /= mag;
      log_scale += std::log(mag);
    }
  }
  return base + std::log(r_cur) + log_scale;
}

// Small-|z| series for K_mu and K_{mu+1}, |mu| <= 1/2, then upward recurrence.
cplx log_temme(double nu, cplx x, double* est_error) {
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  double gampl = 0.0, gammi = 0.0, gam1 = 0.0, gam2 = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k < kRecipGamma.size(); ++k) {
    const double c = kRecipGamma[k];
    gampl += c * pw;
    gammi += c * ((k % 2) ? -pw : pw);
    if (k % 2)
      gam1 -= c * pw / (xmu == 0.0 ? 1.0 : xmu);
    else
      gam2 += c * pw;
    pw *= xmu;
  }
  if (xmu == 0.0) gam1 = -kRecipGamma[1];
  const cplx x2 = 0.5 * x;
  const double pimu = pi * xmu;
  const double fact = std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
  cplx d = -std::log(x2);
  cplx e = xmu * d;
  const cplx fact2 = std::abs(e) < 1e-4 ? 1.0 + e * e / 6.0 + e * e * e * e / 120.0
                                        : std::sinh(e) / e;
  cplx ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  cplx sum = ff;
  const cplx ee = std::exp(e);
  cplx p = 0.5 * ee / gampl;
  cplx q = 0.5 / (ee * gammi);
  cplx c = 1.0;
  d = x2 * x2;
  cplx sum1 = p;
  int i = 1;
  for (; i <= 500; ++i) {
    ff = (double(i) * ff + p + q) / (double(i) * i - xmu2);
    c *= d / double(i);
    p /= (i - xmu);
    q /= (i + xmu);
    const cplx del = c * ff;
    sum += del;
    const cplx del1 = c * (p - double(i) * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kEps && std::abs(del1) < std::abs(sum1) * kEps) break;
  }
  if (i > 500) throw AccuracyError("bessel_k: series did not converge");
  const cplx rkmu = sum;
  const cplx rk1 = sum1 * (2.0 / x);
  if (est_error) *est_error = 1e-14 * (1.0 + nl);
  if (nl == 0) return std::log(rkmu);
  // recur_up returns log K at the lower slot after `steps` steps.
  return recur_up(rkmu, rk1, xmu + 1.0, nl, x);
}

cplx log_asymptotic(double nu, cplx z, double* est_error) {
  const double mu4 = 4.0 * nu * nu;
  cplx term = 1.0, sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    cplx next = term * (mu4 - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(next);
    if (mag == 0.0) {
      last = 0.0;
      break;
    }
    if (mag > std::abs(term)) break;
    term = next;
    sum += term;
    last = mag;
    if (mag < kEps * std::abs(sum)) break;
  }
  if (est_error) *est_error = std::max(last / std::abs(sum), 1e-16);
  return 0.5 * std::log(pi / (2.0 * z)) - z + std::log(sum);
}

// K_nu(z) = sqrt(pi/2z) e^-z / Gamma(nu+1/2) int_0^inf e^-u u^(nu-1/2) (1+u/2z)^(nu-1/2) du.
cplx log_laplace_quadrature(double nu, cplx z, double* est_error) {
  const double a = nu - 0.5;
  auto log_f = [&](double u) -> cplx {
    return a * (std::log(u) + std::log(1.0 + u / (2.0 * z))) - u;
  };
  double shift = -std::numeric_limits<double>::infinity();
  const double span = 4.0 * (nu + 2.0) + 4.0 * std::abs(z);
  for (int k = 1; k <= 64; ++k) shift = std::max(shift, log_f(span * k / 64.0).real());
  auto f = [&](double u) -> cplx {
    if (u <= 0.0) return 0.0;
    return std::exp(log_f(u) - shift);
  };
  const double split = std::max(1.0, a);
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double e1 = 0.0, e2 = 0.0, l1 = 0.0;
  cplx i1 = ts.integrate(f, 0.0, split, 1e-15, &e1, &l1);
  cplx i2 = es.integrate(f, split, std::numeric_limits<double>::infinity(), 1e-15, &e2, &l1);
  const cplx total = i1 + i2;
  const double rel = (e1 + e2) / std::abs(total);
  if (!(rel < 1e-11)) throw AccuracyError("bessel_k: quadrature did not converge");
  if (est_error) *est_error = std::max(rel, 1e-14);
  return 0.5 * std::log(pi / (2.0 * z)) - z - std::lgamma(nu + 0.5) + std::log(total) + shift;
}

}  // namespace

const char* to_string(BesselMethod m) {
  switch (m) {
    case BesselMethod::series: return "series";
    case BesselMethod::asymptotic: return "asymptotic";
    case BesselMethod::quadrature: return "quadrature";
    case BesselMethod::half_integer: return "half_integer";
  }
  return "unknown";
}

bool is_half_integer(double mu) {
  const double two = 2.0 * mu;
  const double r = std::round(two);
  return std::abs(two - r) < 1e-14 && std::fmod(std::abs(r), 2.0) == 1.0;
}

cplx log_bessel_k_half_integer(double n_plus_half, cplx z) {
  if (!is_half_integer(n_plus_half)) throw ParameterError("order is not a half-integer");
  check_args(n_plus_half, z);
  return log_half_integer(std::abs(n_plus_half), z);
}

cplx bessel_k_half_integer(double n_plus_half, cplx z) {
  return std::exp(log_bessel_k_half_integer(n_plus_half, z));
}

cplx log_bessel_k(double mu, cplx z, BesselMethod* method, double* est_error) {
  check_args(mu, z);
  const double nu = std::abs(mu);
  double err = 0.0;
  BesselMethod m;
  cplx lv;
  if (is_half_integer(nu)) {
    m = BesselMethod::half_integer;
    lv = log_half_integer(nu, z);
    err = 1e-15 * (1.0 + nu);
  } else if (std::abs(z) < kSeriesRadius) {
    m = BesselMethod::series;
    lv = log_temme(nu, z, &err);
  } else if (std::abs(z) >= std::max(30.0, 10.0 * nu * nu)) {
    m = BesselMethod::asymptotic;
    lv = log_asymptotic(nu, z, &err);
  } else {
    m = BesselMethod::quadrature;
    lv = log_laplace_quadrature(nu, z, &err);
  }
  if (method) *method = m;
  if (est_error) *est_error = err;
  return lv;
}

BesselResult bessel_k(double mu, cplx z) {
  BesselResult r;
  cplx lv = log_bessel_k(mu, z, &r.method, &r.est_error);
  r.log_value = cplx(lv.real(), wrap_phase(lv.imag()));
  r.value = std::exp(r.log_value);
  return r;
}

cplx macdonald_integral_oracle(double l, cplx a, cplx b) {
  if (!(a.real() > 0.0) || !(b.real() > 0.0))
    throw DomainError("macdonald_integral_oracle: requires Re a > 0 and Re b > 0");
  auto log_f = [&](double x) -> cplx { return (l - 1.0) * std::log(x) - a / x - b * x; };
  const double x0 = std::sqrt(std::abs(a) / std::abs(b));
  double shift = -std::numeric_limits<double>::infinity();
  for (int k = -40; k <= 40; ++k) shift = std::max(shift, log_f(x0 * std::exp(0.1 * k)).real());
  auto f = [&](double x) -> cplx {
    if (x <= 0.0) return 0.0;
    return std::exp(log_f(x) - shift);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double e1 = 0.0, e2 = 0.0, l1 = 0.0;
  cplx i1 = ts.integrate(f, 0.0, x0, 1e-14, &e1, &l1);
  cplx i2 = es.integrate(f, x0, std::numeric_limits<double>::infinity(), 1e-14, &e2, &l1);
  const cplx total = i1 + i2;
  const double rel = (e1 + e2) / std::abs(total);
  if (!(rel <= 1e-10))
    throw AccuracyError("macdonald_integral_oracle: estimated relative error " +
                        std::to_string(rel) + " exceeds 1e-10");
  return total * std::exp(shift);
}

cplx log_macdonald_closed_form(double l, cplx a, cplx b) {
  const cplx arg = 2.0 * std::sqrt(a * b);
  return std::log(2.0) + 0.5 * l * (std::log(a) - std::log(b)) + log_bessel_k(l, arg);
}

}  // namespace lwp
