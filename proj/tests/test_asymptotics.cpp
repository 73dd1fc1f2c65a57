#include "helpers.hpp"

#include "lwp/asymptotics.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace lwp;
using namespace lwp::test;

namespace {

RVector v2(double x, double y) {
  RVector r(2);
  r << x, y;
  return r;
}

PacketParams figure_packet() { return packet_from_tau(fig1_curve(), 0.5, 800.0, 8e5, 1.0, 4e5); }

// gamma = 1, tau = 4, p = 100 (m = 50), stigmatic eps = 10.
PacketParams desk_packet(double eps = 10.0) {
  return packet_from_tau(stigmatic_curve(2, eps), 0.5, 1.0, 4.0, 50.0, 2.0);
}

const Condition& find(const std::vector<Condition>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return c;
  throw std::runtime_error("missing condition " + name);
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("characteristics at desk scale") {
    const PacketCharacteristics pc = packet_characteristics(1.0, 4.0, 1.0);
    CHECK(pc.p == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pc.Omega == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(pc.K == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(pc.v_gr == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("characteristics with the figure parameters") {
    const PacketCharacteristics pc = packet_characteristics(800.0, 8e5, 1.0);
    CHECK(pc.p == doctest::Approx(25298.2213).epsilon(1e-9));
    CHECK(pc.Omega == doctest::Approx(400400.0).epsilon(1e-13));
    CHECK(pc.K == doctest::Approx(399600.0).epsilon(1e-13));
    CHECK(pc.v_gr == doctest::Approx(0.998002).epsilon(1e-6));
    CHECK(pc.omega_phys == doctest::Approx(pc.Omega / std::sqrt(800.0 * 8e5)));
  }

  TEST_CASE("symmetric case and forward propagation guard") {
    const PacketCharacteristics pc = packet_characteristics(3.0, 3.0, 1.0, true);
    CHECK(pc.K == 0.0);
    CHECK(pc.v_gr == 0.0);
    CHECK_THROWS_AS(packet_characteristics(3.0, 3.0, 1.0), ParameterError);
    CHECK_THROWS_AS(packet_characteristics(5.0, 3.0, 1.0), ParameterError);
    CHECK_THROWS_AS(packet_characteristics(1.0, 3.0, 0.0), ParameterError);
  }

  TEST_CASE("dispersion identity and three forms of the group velocity") {
    for (double g : {0.1, 1.0, 800.0})
      for (double ratio : {1.5, 4.0, 1000.0})
        for (double m : {0.01, 1.0, 30.0}) {
          const double tau = g * ratio;
          const PacketCharacteristics pc = packet_characteristics(g, tau, m);
          const double lhs = pc.Omega * pc.Omega - pc.K * pc.K;
          CHECK(std::abs(lhs / (pc.p * pc.p) - 1.0) <= 1e-12);
          CHECK(std::abs(pc.v_gr - (tau - g) / (tau + g)) <= 1e-12);
          CHECK(pc.v_gr >= 0.0);
          CHECK(pc.v_gr < 1.0);
        }
    const PacketParams pp = desk_packet();
    const double v = empirical_group_velocity(pp, 0.0, 0.12);
    CHECK(std::abs(v / 0.6 - 1.0) <= 0.01);
  }

  TEST_CASE("regimes for the figure times at the default margin") {
    const PacketParams pp = figure_packet();
    CHECK(regime_classify(0.0, pp) == Regime::Small);
    // t ||Gamma0|| = 0.18 is not << 1 at margin 10.
    CHECK(regime_classify(500.0, pp) == Regime::Unclassified);
    CHECK(regime_classify(-500.0, pp) == Regime::Unclassified);
    for (double t : {3000.0, 5000.0, 10000.0}) CHECK(regime_classify(t, pp) == Regime::Moderate);
    // 4 ||Gamma0^-1|| tau/gamma = 3.97e7 exceeds tau, so tau..3 tau are not yet large.
    for (double t : {8e5, 1.6e6, 2.4e6}) CHECK(regime_classify(t, pp) == Regime::Unclassified);
    const double large = 4.0 * pp.curve.inv_norm() * pp.tau() / pp.gamma;
    CHECK(large == doctest::Approx(3.97e7).epsilon(1e-2));
    CHECK(regime_classify(large * 10.0, pp) == Regime::Large);
    CHECK(regime_classify(large * 9.9, pp) == Regime::Unclassified);
  }

  TEST_CASE("regimes for the figure times at margin 2") {
    const PacketParams pp = figure_packet();
    CHECK(regime_classify(500.0, pp, 2.0) == Regime::Small);
    CHECK(regime_classify(-500.0, pp, 2.0) == Regime::Small);
    CHECK(regime_classify(5000.0, pp, 2.0) == Regime::Moderate);
    CHECK(regime_classify(1.6e6, pp, 2.0) == Regime::Unclassified);
    CHECK(regime_classify(1e8, pp, 2.0) == Regime::Large);
  }

  TEST_CASE("small-time envelope against the exact packet at p = 100") {
    for (double eps : {10.0, 100.0}) {
      const PacketParams pp = desk_packet(eps);
      const PacketCharacteristics pc = packet_characteristics(pp);
      const double s = std::sqrt(pp.gamma * pp.tau());
      const double par = width_parallel(pc) * s;
      const RVector e = major_axis(im_part(pp.curve.gamma0()));
      const double perp = width_perp(pp, 0.0, e) * s;
      for (double fz : {0.0, 0.5, 1.0})
        for (double fx : {0.0, 0.5, 1.0}) {
          const SpacetimePoint pt(0.0, fz * par, fx * perp * e);
          const LogComplexField ex = u_packet(pt, pp);
          const EnvelopeResult en = envelope_small_time(pt, pp);
          CHECK(en.summary.regime == Regime::Small);
          CHECK(std::abs(std::exp(en.field.log_abs - ex.log_abs) - 1.0) <= 1e-2);
          if (fz <= 0.5 && fx <= 0.5) CHECK(rel_dev(en.field, ex) <= 0.05);
        }
    }
  }

  TEST_CASE("envelope at its centre equals the amplitude") {
    const PacketParams pp = desk_packet();
    const PacketCharacteristics pc = packet_characteristics(pp);
    for (double t : {0.0, 0.03}) {
      const SpacetimePoint pt(t, pc.v_gr * t, v2(0.0, 0.0));
      const EnvelopeResult en = envelope_small_time(pt, pp);
      CHECK(en.field.log_abs == doctest::Approx(log_small_time_amplitude(pp, en.zeta).real()).epsilon(1e-13));
    }
    const EnvelopeResult en = envelope_small_time(SpacetimePoint(0.0, 0.0, v2(0.0, 0.0)), pp);
    CHECK(en.summary.widths.at("parallel") == doctest::Approx(std::sqrt(pc.p) / pc.Omega));
    CHECK(en.summary.widths.at("perp") > 0.0);
    CHECK_FALSE(en.summary.conditions.empty());
  }

  TEST_CASE("low p envelope warns") {
    const PacketParams pp = packet_from_tau(stigmatic_curve(2, 10.0), 0.5, 1.0, 4.0, 2.0, 2.0);
    const EnvelopeResult en = envelope_small_time(SpacetimePoint(0.0, 0.0, v2(0.0, 0.0)), pp);
    CHECK_FALSE(en.summary.warnings.empty());
  }

  TEST_CASE("massless limit of the small-time widths") {
    const double gamma = 1.0, kappa = 2.0, eps = 3.0;
    std::vector<double> dev;
    for (double m : {1e-2, 1e-3, 1e-4}) {
      const PacketParams pp(stigmatic_curve(2, eps), 0.5, gamma, kappa, m, 1.0);
      const PacketCharacteristics pc = packet_characteristics(pp);
      const double s2 = pp.gamma * pp.tau();
      const double par2 = std::pow(width_parallel(pc), 2) * s2;
      const double perp2 = std::pow(width_perp(pp, 0.0, v2(1.0, 0.0)), 2) * s2;
      dev.push_back(std::max(std::abs(par2 / (2.0 * gamma / kappa) - 1.0),
                             std::abs(perp2 / (eps / (2.0 * kappa)) - 1.0)));
    }
    CHECK(dev[1] < dev[0]);
    CHECK(dev[2] < dev[1]);
    CHECK(dev[2] < 1e-6);
  }

  TEST_CASE("large-time widths and their relation to small-time widths") {
    const PacketCharacteristics pc = packet_characteristics(1.0, 4.0, 1.0);
    CHECK(std::pow(width_radial(pc), 2) == doctest::Approx(0.2048).epsilon(1e-14));
    for (double m : {1.0, 50.0, 3000.0}) {
      for (double eps : {0.5, 10.0}) {
        const PacketParams pp = packet_from_tau(stigmatic_curve(2, eps), 0.5, 1.0, 4.0, m, 2.0);
        const PacketCharacteristics c = packet_characteristics(pp);
        const double dv2 = std::pow(width_radial(c), 2);
        CHECK(std::abs(dv2 / (c.p * std::pow(width_parallel(c), 4)) - 1.0) <= 1e-12);
        const RVector e = v2(0.6, 0.8);
        const double dth2 = std::pow(width_angular(pp, e), 2);
        const double dperp = width_perp(pp, 0.0, e);
        CHECK(std::abs(dth2 * std::pow(c.K * dperp, 2) - 1.0) <= 1e-12);
      }
    }
  }

  TEST_CASE("large-time envelope against the exact packet") {
    const PacketParams pp = desk_packet();
    const PacketCharacteristics pc = packet_characteristics(pp);
    const double t = 20.0 * std::max(pp.tau(), 4.0 * pp.curve.inv_norm() * pp.tau() / pp.gamma);
    CHECK(regime_classify(t, pp) == Regime::Large);
    for (double x : {0.0, 5.0}) {
      const SpacetimePoint pt(t, pc.v_gr * t, v2(x, 0.0));
      const EnvelopeResult en = envelope_large_time(pt, pp);
      const LogComplexField ex = u_packet(pt, pp);
      CHECK(rel_dev(en.field, ex) <= 3.0 / pc.p);
      CHECK(en.summary.widths.count("radial") == 1);
      CHECK(en.summary.widths.count("angular") == 1);
    }
    CHECK_THROWS_AS(envelope_large_time(SpacetimePoint(t, t, v2(1.0, 0.0)), pp), DomainError);
  }

  TEST_CASE("validity conditions") {
    const std::vector<Condition> fig = validity_conditions(figure_packet());
    for (const auto& n : {"good_localization_longitudinal", "good_localization_spreading", "good_localization_cone"})
      CHECK(find(fig, n).satisfied);
    for (const auto& c : fig) CHECK(c.margin == (c.name == "forward_propagation" ? 1.0 : 10.0));

    const double tau = 4.0, gamma = 0.99 * tau;
    const double m = 100.0 / std::sqrt(gamma * tau);
    const PacketParams close = packet_from_tau(stigmatic_curve(2, 1.0), 0.5, gamma, tau, m, 2.0);
    CHECK(close.p() == doctest::Approx(100.0));
    CHECK_FALSE(find(validity_conditions(close), "good_localization_longitudinal").satisfied);

    const PacketParams huge = packet_from_tau(stigmatic_curve(2, 0.1), 0.5, 1.0, 4.0, 5e7, 2.0);
    CHECK(huge.p() == doctest::Approx(1e8));
    for (const auto& c : validity_conditions(huge)) {
      CAPTURE(c.name);
      CHECK(c.satisfied);
    }
  }

  TEST_CASE("design examples") {
    const DesignResult d = design_parameters(1.0, 2.5, std::sqrt(0.32), 1.0);
    CHECK(d.gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.tau == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(d.characteristics.p == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.characteristics.K == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(d.characteristics.v_gr == doctest::Approx(0.6).epsilon(1e-12));
    CHECK_FALSE(d.warnings.empty());
    CHECK_THROWS_AS(design_parameters(1.0, 1.0, 0.1, 1.0), ParameterError);
    CHECK_THROWS_AS(design_parameters(1.0, 2.5, 1.0, 1.0), ParameterError);
  }

  TEST_CASE("design inverts the forward map") {
    // Stigmatic version of the figure parameters.
    const PacketParams fwd = packet_from_tau(stigmatic_curve(2, 3000.0), 0.5, 800.0, 8e5, 1.0, 4e5);
    const PacketCharacteristics pc = packet_characteristics(fwd);
    const double dperp = width_perp(fwd, 0.0, v2(1.0, 0.0));
    const DesignResult d = design_parameters(1.0, pc.Omega, width_parallel(pc), dperp);
    CHECK(std::abs(d.gamma / 800.0 - 1.0) <= 1e-10);
    CHECK(std::abs(d.tau / 8e5 - 1.0) <= 1e-10);
    CHECK(std::abs(d.eps / 3000.0 - 1.0) <= 1e-10);

    PointSampler s(43);
    for (int i = 0; i < 20; ++i) {
      const double m = std::exp(s.uniform(std::log(0.1), std::log(10.0)));
      const double p = std::exp(s.uniform(std::log(10.0), std::log(1e4)));
      const double omega = p * s.uniform(1.05, 50.0);
      const double dpar = std::sqrt(p) / omega;
      const double dp = s.uniform(0.01, 2.0);
      const DesignResult r = design_parameters(m, omega, dpar, dp);
      const PacketParams pp = designed_packet(r, m, 2);
      const PacketCharacteristics c = packet_characteristics(pp);
      CHECK(std::abs(c.Omega / omega - 1.0) <= 1e-10);
      CHECK(std::abs(c.v_gr / std::sqrt(1.0 - std::pow(p / omega, 2)) - 1.0) <= 1e-10);
      CHECK(std::abs(width_parallel(c) / dpar - 1.0) <= 1e-10);
      CHECK(std::abs(width_perp(pp, 0.0, v2(1.0, 0.0)) / dp - 1.0) <= 1e-10);
    }
  }

  TEST_CASE("fitted widths and centre at p = 100") {
    const PacketParams pp = desk_packet();
    const FitResult lon = empirical_envelope_fit(pp, 0.0, FitAxis::longitudinal);
    CHECK(std::abs(lon.width / lon.predicted - 1.0) <= 0.05);
    CHECK(std::abs(lon.center) <= 0.01 * lon.width);
    const FitResult tr = empirical_envelope_fit(pp, 0.0, FitAxis::transverse);
    CHECK(std::abs(tr.width / tr.predicted - 1.0) <= 0.05);
    const PacketCharacteristics pc = packet_characteristics(pp);
    const double s = std::sqrt(pp.gamma * pp.tau());
    CHECK(lon.predicted == doctest::Approx(width_parallel(pc) * s));
  }

  TEST_CASE("fitted large-time widths") {
    const PacketParams pp = desk_packet();
    const double t = 20.0 * std::max(pp.tau(), 4.0 * pp.curve.inv_norm() * pp.tau() / pp.gamma);
    FitOptions narrow;
    narrow.span = 1.0;
    const FitResult rad = empirical_envelope_fit(pp, t, FitAxis::radial, narrow);
    CHECK(std::abs(rad.width / rad.predicted - 1.0) <= 0.1);
    const FitResult ang = empirical_envelope_fit(pp, t, FitAxis::angular);
    CHECK(std::abs(ang.width / ang.predicted - 1.0) <= 0.1);
  }

  TEST_CASE("non-Gaussian profiles are rejected") {
    const PacketParams pp = desk_packet();
    FitOptions strict;
    strict.max_misfit = 1e-6;
    CHECK_THROWS_AS(empirical_envelope_fit(pp, 0.0, FitAxis::longitudinal, strict), FitError);
  }

  TEST_CASE("amplitude decreases through the moderate window") {
    const PacketParams pp = figure_packet();
    double prev = log_small_time_amplitude(pp, 2.0 * 3000.0).real();
    for (double t = 3500.0; t <= 8e4; t += 500.0) {
      CHECK(regime_classify(t, pp) == Regime::Moderate);
      const double cur = log_small_time_amplitude(pp, 2.0 * t).real();
      CHECK(cur < prev);
      prev = cur;
    }
  }

  TEST_CASE("localization ellipse turns by a right angle between small and large times") {
    const GammaCurve rot = build_general_astigmatic(0.0, 1.0, 0.0, 2.0, 0.3);
    const RVector small = major_axis(im_part(rot.gamma0()));
    const RVector large = major_axis(-im_part(rot.gamma0_inv()));
    CHECK(std::abs(small.dot(large)) <= 1e-6);

    const GammaCurve fig = fig1_curve();
    Eigen::SelfAdjointEigenSolver<RMatrix> a(im_part(fig.gamma0())), b(-im_part(fig.gamma0_inv()));
    CHECK(a.eigenvalues().minCoeff() > 0.0);
    CHECK(b.eigenvalues().minCoeff() > 0.0);
    const double angle_small = principal_axes(Eigen::Matrix2d(im_part(fig.gamma0()))).angle;
    const double angle_large = principal_axes(Eigen::Matrix2d(-im_part(fig.gamma0_inv()))).angle;
    MESSAGE("figure axes: small-time " << angle_small << " rad, large-time " << angle_large << " rad");
  }
}
