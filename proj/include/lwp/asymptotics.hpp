// Packet characteristics, regimes, small/large-time envelopes, validity conditions and
// inverse parameter design for the KGF packet u_packet.
#pragma once

#include "lwp/core.hpp"
#include "lwp/solutions.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lwp {

// Dimensionless p = m sqrt(gamma tau), Omega, K; v_gr = K/Omega.
struct PacketCharacteristics {
  double p = 0.0;
  double Omega = 0.0;
  double K = 0.0;
  double v_gr = 0.0;
  // Physical carrier frequency and wave number: Omega, K divided by sqrt(gamma tau).
  double omega_phys = 0.0;
  double k_phys = 0.0;
};

// Throws ParameterError for gamma >= tau unless allow_non_forward.
PacketCharacteristics packet_characteristics(double gamma, double tau, double m,
                                             bool allow_non_forward = false);
PacketCharacteristics packet_characteristics(const PacketParams& pp,
                                             bool allow_non_forward = false);

enum class Regime { Small, Moderate, Large, Unclassified };
const char* to_string(Regime r);

// "a << b" is realised as a * margin <= b.
Regime regime_classify(double t, const PacketParams& pp, double margin = 10.0);

struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 10.0;
  bool satisfied = false;
};

struct EnvelopeSummary {
  Regime regime = Regime::Unclassified;
  // Small/moderate: "parallel", "perp". Large: "radial", "angular". Dimensionless.
  std::map<std::string, double> widths;
  std::vector<Condition> conditions;
  std::vector<std::string> warnings;
};

// Dimensionless widths at small and moderate times.
double width_parallel(const PacketCharacteristics& pc);                      // sqrt(p)/Omega
double width_perp(const PacketParams& pp, double zeta, const RVector& e);   // along unit e
// Large-time widths.
double width_radial(const PacketCharacteristics& pc);                       // p^(3/2)/Omega^2
double width_angular(const PacketParams& pp, const RVector& e);

// Unit eigenvector of the largest eigenvalue of a real symmetric form.
RVector major_axis(const RMatrix& form);

struct EnvelopeResult {
  LogComplexField field;
  EnvelopeSummary summary;
  double zeta = 0.0;  // small-time branch only
  double g = 0.0;     // phase coefficient (p/2) tau (e, Re Gamma(zeta) e) along e
};

struct SmallTimeOptions {
  std::optional<RVector> e_perp;  // defaults to the major axis of Im Gamma(zeta)
  std::optional<double> zeta;     // overrides the regime-based choice
  double margin = 10.0;
};

// Gaussian envelope moving with v_gr. zeta = 0 for Small, 2t for Moderate; otherwise both
// are tried and the one closer to u_packet at the predicted center is kept.
EnvelopeResult envelope_small_time(const SpacetimePoint& pt, const PacketParams& pp,
                                   const SmallTimeOptions& opt = {});

// A(zeta) of the small-time envelope, in log form.
cplx log_small_time_amplitude(const PacketParams& pp, double zeta);

struct LargeTimeOptions {
  std::optional<RVector> e_perp;  // direction for the reported angular width
  double margin = 10.0;
};

// Annulus/cone envelope; DomainError when |r| >= |t|.
EnvelopeResult envelope_large_time(const SpacetimePoint& pt, const PacketParams& pp,
                                   const LargeTimeOptions& opt = {});

// Every displayed applicability inequality, evaluated with the given margin.
std::vector<Condition> validity_conditions(const PacketParams& pp, double margin = 10.0);

struct DesignResult {
  double gamma = 0.0;
  double tau = 0.0;
  double eps = 0.0;  // stigmatic Gamma0 = (i/eps) E
  PacketCharacteristics characteristics;
  std::vector<std::string> warnings;
};

// Inverse design from dimensionless Omega, Delta_par, Delta_perp and physical m.
// ParameterError when Omega <= p = Delta_par^2 Omega^2.
DesignResult design_parameters(double m, double Omega, double delta_par, double delta_perp);

// Packet built from a design: stigmatic Gamma0 in d dimensions, eps_m = tau/2.
PacketParams designed_packet(const DesignResult& dr, double m, int d = 2, double mu = 0.5);

enum class FitAxis { longitudinal, transverse, radial, angular };
const char* to_string(FitAxis a);

struct FitOptions {
  std::optional<RVector> e_perp;  // transverse/angular direction, default major axis
  int samples = 41;
  double span = 2.5;              // half-window in predicted widths
  double max_misfit = 0.02;       // rms misfit relative to the sampled log|u| range
};

struct FitResult {
  double center = 0.0;     // z (longitudinal/radial), transverse offset, or angle
  double width = 0.0;      // Gaussian sigma in physical units (radians for angular)
  double predicted = 0.0;  // asymptotic prediction in the same units
  double misfit = 0.0;
};

// Samples |u_packet| along a line or arc through the predicted center and fits log|u| to
// a parabola. FitError when the profile is not Gaussian enough.
FitResult empirical_envelope_fit(const PacketParams& pp, double t, FitAxis axis,
                                 const FitOptions& opt = {});

// Displacement of the fitted longitudinal center between t1 and t2 divided by t2 - t1.
double empirical_group_velocity(const PacketParams& pp, double t1, double t2);

}  // namespace lwp
