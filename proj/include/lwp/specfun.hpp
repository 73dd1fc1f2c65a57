// Macdonald function K_mu(z), real order, Re z > 0, with log-space output.
#pragma once

#include "lwp/core.hpp"

namespace lwp {

enum class BesselMethod { series, asymptotic, quadrature, half_integer };

const char* to_string(BesselMethod m);

struct BesselResult {
  cplx value;
  cplx log_value;  // principal imaginary part
  BesselMethod method;
  double est_error;  // relative
};

// |mu| <= 50, Re z > 0.
BesselResult bessel_k(double mu, cplx z);

// log K_mu(z) with an unwrapped imaginary part; the building block of bessel_k.
cplx log_bessel_k(double mu, cplx z, BesselMethod* method = nullptr,
                  double* est_error = nullptr);

// K_{n+1/2}(z) by upward recurrence from K_{+-1/2}; n_plus_half must be a half-integer.
cplx bessel_k_half_integer(double n_plus_half, cplx z);
cplx log_bessel_k_half_integer(double n_plus_half, cplx z);

bool is_half_integer(double mu);

// int_0^inf x^(l-1) exp(-a/x - b x) dx by double-exponential quadrature.
cplx macdonald_integral_oracle(double l, cplx a, cplx b);

// Principal log of 2 (a/b)^(l/2) K_l(2 sqrt(ab)).
cplx log_macdonald_closed_form(double l, cplx a, cplx b);

}  // namespace lwp
