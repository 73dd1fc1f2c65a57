// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
#include "helpers.hpp"

#include "commands.hpp"
#include "config.hpp"

#include "lwp/asymptotics.hpp"
#include "lwp/specfun.hpp"
#include "lwp/spectral.hpp"
#include "lwp/verify.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unistd.h>

using namespace lwp;
using namespace lwp::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char b[64];
  std::snprintf(b, sizeof b, f, x);
  return b;
}
std::string sci(double x) { return fmt("%.2e", x); }

struct Runner {
  int failures = 0;
  void run(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
};

// ---------------------------------------------------------------- 1: PDE residual

// Figure shape at p = 50. d = 2 is the figure's Gamma0; d = 3 appends a stigmatic
// direction with eps = 3000 s; d = 1 keeps the (1,1) entry.
GammaCurve fig_curve_d(int d, double s) {
  const CMatrix g2 = fig1_curve(s).gamma0();
  if (d == 2) return GammaCurve(g2);
  CMatrix g = CMatrix::Zero(d, d);
  if (d == 1) {
    g(0, 0) = g2(0, 0);
  } else {
    g.topLeftCorner(2, 2) = g2;
    for (int j = 2; j < d; ++j) g(j, j) = I / (3000.0 * s);
  }
  return GammaCurve(g);
}

Outcome criterion_residual() {
  const double s = 50.0 / std::sqrt(800.0 * 8e5);
  const double gamma = 800.0 * s, tau = 8e5 * s, m = 1.0, eps_m = 4e5 * s;
  int runs = 0, bad = 0;
  double worst_res = 0.0, lo_order = 10.0, hi_order = 0.0;
  std::string first_bad;
  for (int d : {1, 2, 3}) {
    for (bool astig : {false, true}) {
      const GammaCurve curve = astig ? fig_curve_d(d, s) : stigmatic_curve(d, 3000.0 * s);
      const PacketParams ref = packet_from_tau(curve, 0.5, gamma, tau, m, eps_m);
      const PacketCharacteristics pc = packet_characteristics(ref);
      const double scale = std::sqrt(gamma * tau);
      const double wl = width_parallel(pc) * scale;
      RVector e = RVector::Zero(d);
      e(0) = 1.0;
      const double wp = width_perp(ref, 0.0, e) * scale;
      const double eta = (pc.k_phys + pc.omega_phys) / 2.0;
      const double h0 = 8.0 * default_fd_step(ref);

      GridSpec g;
      g.base = SpacetimePoint(0.0, 0.0, RVector::Zero(d));
      if (d > 1) g.base.r_perp(1) = 0.3 * wp;
      const double tspan = 2.0 * wl;
      g.t = {-tspan, tspan, 21};
      g.z = {-(2.0 * wl + pc.v_gr * tspan), 2.0 * wl + pc.v_gr * tspan, 21};
      g.x = {-2.0 * wp, 2.0 * wp, 21};

      std::vector<std::pair<std::string, FieldFn>> fields;
      const BeamParams wb(curve, eta);
      const BeamParams kb(curve, eta, m, eps_m);
      const PacketParams wpk(curve, 0.5, gamma, ref.kappa);
      fields.emplace_back("phi_beam", [wb](const SpacetimePoint& q) { return phi_beam(q, wb); });
      fields.emplace_back("u_beam", [kb](const SpacetimePoint& q) { return u_beam(q, kb); });
      fields.emplace_back("phi_packet", [wpk](const SpacetimePoint& q) { return phi_packet(q, wpk); });
      for (double mu : {-0.5, 0.5, 1.5}) {
        const PacketParams kp = packet_from_tau(curve, mu, gamma, tau, m, eps_m);
        fields.emplace_back("u_packet(mu=" + fmt("%g", mu) + ")",
                            [kp](const SpacetimePoint& q) { return u_packet(q, kp); });
      }
      for (const auto& [name, f] : fields) {
        const double mass = name.rfind("u_", 0) == 0 ? m : 0.0;
        const ConvergenceResult c = scan_convergence(f, g, mass, h0, 0);
        ++runs;
        worst_res = std::max(worst_res, c.residual[2]);
        lo_order = std::min(lo_order, c.order);
        hi_order = std::max(hi_order, c.order);
        const bool ok = c.residual[2] <= 1e-6 && std::abs(c.order - 2.0) <= 0.3;
        if (!ok) {
          ++bad;
          if (first_bad.empty())
            first_bad = "; first failure " + name + " d=" + std::to_string(d) +
                        (astig ? " astigmatic" : " stigmatic") + " residual " + sci(c.residual[2]) +
                        " order " + fmt("%.2f", c.order);
        }
      }
    }
  }
  return {bad == 0, std::to_string(runs) + " scans of 21^3 points, max residual " + sci(worst_res) +
                        ", order in [" + fmt("%.2f", lo_order) + ", " + fmt("%.2f", hi_order) + "]" + first_bad};
}

// ---------------------------------------------------------------- 2: special functions

Outcome criterion_specfun() {
  double closed = 0.0;
  for (cplx z : {cplx(1.0), cplx(0.1), cplx(3.0, 4.0), cplx(20.0, -15.0), cplx(0.5, 2.0)}) {
    const cplx ref = std::sqrt(pi / (2.0 * z)) * std::exp(-z);
    closed = std::max(closed, std::abs(bessel_k(0.5, z).value / ref - 1.0));
  }
  double rec = 0.0;
  for (double mu : {0.0, 0.3, 0.5, 1.0, 2.5, 4.7}) {
    for (cplx z : {cplx(0.4), cplx(1.0), cplx(10.0), cplx(1.0, 5.0), cplx(30.0, -20.0), cplx(100.0, 3.0)}) {
      const cplx l0 = log_bessel_k(mu, z);
      const cplx kp = std::exp(log_bessel_k(mu + 1.0, z) - l0);
      const cplx km = std::exp(log_bessel_k(mu - 1.0, z) - l0);
      const double scale = std::max({std::abs(kp), std::abs(km), std::abs(2.0 * mu / z)});
      rec = std::max(rec, std::abs(kp - km - 2.0 * mu / z) / scale);
    }
  }
  double lattice = 0.0;
  for (double l : {-1.3, 0.5, 2.0})
    for (cplx a : {cplx(0.5), cplx(2.0, 1.0), cplx(1.0, -3.0)})
      for (cplx b : {cplx(1.0), cplx(0.3, 0.4), cplx(4.0, -2.0)}) {
        const cplx q = macdonald_integral_oracle(l, a, b);
        const cplx via_k = 2.0 * std::pow(a / b, l / 2.0) * bessel_k(l, 2.0 * std::sqrt(a * b)).value;
        lattice = std::max(lattice, std::abs(q / via_k - 1.0));
      }
  return {closed <= 1e-12 && rec <= 1e-9 && lattice <= 1e-8,
          "K_1/2 closed form " + sci(closed) + ", recurrence defect " + sci(rec) + ", 27-point lattice " + sci(lattice)};
}

// ---------------------------------------------------------------- 3: superposition

Outcome criterion_superposition() {
  PointSampler s(101);
  double wp = 0.0, kp = 0.0, zeta = 0.0;
  const PacketParams we(fig1_curve(1e-3), 0.5, 1.0, 1.0);
  const PacketParams kg = packet_from_tau(fig1_curve(1e-3), 1.3, 1.0, 4.0, 10.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const SpacetimePoint p = s.point(2, 1.0, 1.0, 1.0);
    wp = std::max(wp, rel_dev(superposition_oracle(Family::phi_p, we, p), phi_packet(p, we)));
    kp = std::max(kp, rel_dev(superposition_oracle(Family::u_p, kg, p), u_packet(p, kg)));
  }
  const BeamParams bp(fig1_curve(1e-3), 0.9, 1.3, 1.7, cplx(1.0, 1.0));
  for (int i = 0; i < 5; ++i) {
    const SpacetimePoint p = s.point(2, 3.0, 3.0, 2.0);
    zeta = std::max(zeta, rel_dev(zeta_ft_oracle(bp, p), u_beam(p, bp)));
  }
  return {wp <= 1e-8 && kp <= 1e-8 && zeta <= 1e-8,
          "phi_p " + sci(wp) + ", u_p (p = " + fmt("%g", kg.p()) + ") " + sci(kp) + " at 20 points; zeta " + sci(zeta)};
}

// ---------------------------------------------------------------- 4: m -> 0

Outcome criterion_massless() {
  const double gamma = 1.0, kappa = 1.5, eps_m = 2.0;
  const GammaCurve c = fig1_curve(1e-3);
  const PacketParams wp(c, 0.5, gamma, kappa);
  PointSampler s(103);
  std::vector<SpacetimePoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(s.point(2, 2.0, 2.0, 1.0));
  // u_p -> sqrt(pi) e^(i pi/4) phi_p as m -> 0 with kappa fixed.
  const cplx lc = std::log(std::sqrt(pi) * std::exp(I * pi / 4.0));
  std::vector<double> worst;
  for (double m : {0.1, 0.03, 0.01}) {
    const PacketParams kp(c, 0.5, gamma, kappa, m, eps_m);
    double w = 0.0;
    for (const auto& p : pts) w = std::max(w, rel_dev(u_packet(p, kp).log_value() - lc, phi_packet(p, wp).log_value()));
    worst.push_back(w);
  }
  return {worst[1] < worst[0] && worst[2] < worst[1] && worst[2] <= 1e-3,
          "max deviation " + sci(worst[0]) + ", " + sci(worst[1]) + ", " + sci(worst[2]) + " at m = 0.1, 0.03, 0.01"};
}

// ---------------------------------------------------------------- 5-7: envelopes

PacketParams desk_packet() { return packet_from_tau(stigmatic_curve(2, 10.0), 0.5, 1.0, 4.0, 50.0, 2.0); }

Outcome criterion_group_velocity() {
  const PacketParams pp = desk_packet();
  const double v = empirical_group_velocity(pp, 0.0, 0.12);
  const double vg = packet_characteristics(pp).v_gr;
  return {std::abs(v / vg - 1.0) <= 0.01 && std::abs(vg - 0.6) <= 1e-12,
          "p = " + fmt("%g", pp.p()) + ", argmax velocity " + fmt("%.5f", v) + " vs v_gr " + fmt("%.5f", vg)};
}

Outcome criterion_widths() {
  const PacketParams pp = desk_packet();
  const FitResult lon = empirical_envelope_fit(pp, 0.0, FitAxis::longitudinal);
  const FitResult tr = empirical_envelope_fit(pp, 0.0, FitAxis::transverse);
  const double t = 20.0 * std::max(pp.tau(), 4.0 * pp.curve.inv_norm() * pp.tau() / pp.gamma);
  // Beyond about one width the radial profile at p = 100 departs from a Gaussian.
  FitOptions narrow;
  narrow.span = 1.0;
  const FitResult rad = empirical_envelope_fit(pp, t, FitAxis::radial, narrow);
  const FitResult ang = empirical_envelope_fit(pp, t, FitAxis::angular);
  auto dev = [](const FitResult& f) { return std::abs(f.width / f.predicted - 1.0); };
  return {dev(lon) <= 0.05 && dev(tr) <= 0.05 && dev(rad) <= 0.1 && dev(ang) <= 0.1,
          "t = 0: par " + fmt("%.4f", dev(lon)) + ", perp " + fmt("%.4f", dev(tr)) + "; t = " + fmt("%g", t) +
              ": radial " + fmt("%.4f", dev(rad)) + ", angular " + fmt("%.4f", dev(ang)) + " (relative)"};
}

Outcome criterion_width_relations() {
  PointSampler s(107);
  double r1 = 0.0, r2 = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double gamma = s.uniform(0.1, 10.0);
    const double tau = gamma * s.uniform(1.5, 1e3);
    const double m = s.uniform(0.5, 50.0);
    const double eps = s.uniform(0.1, 100.0);
    const PacketParams pp = packet_from_tau(stigmatic_curve(2, eps), 0.5, gamma, tau, m, tau / 2.0);
    const PacketCharacteristics pc = packet_characteristics(pp);
    RVector e(2);
    e << 1.0, 0.0;
    const double dpar = width_parallel(pc), dv = width_radial(pc);
    const double dperp = width_perp(pp, 0.0, e), dth = width_angular(pp, e);
    r1 = std::max(r1, std::abs(dv * dv / (pc.p * std::pow(dpar, 4)) - 1.0));
    r2 = std::max(r2, std::abs(dth * dth * std::pow(pc.K * dperp, 2) - 1.0));
  }
  return {r1 <= 1e-12 && r2 <= 1e-12, "Delta_v^2 = p Delta_par^4 to " + sci(r1) + ", Delta_theta^2 = (K Delta_perp)^-2 to " + sci(r2)};
}

// ---------------------------------------------------------------- 8: Fourier consistency

Outcome criterion_fourier() {
  const PacketParams pp = packet_from_tau(stigmatic_curve(1, 10.0), 0.5, 1.0, 4.0, 10.0, 2.0);
  PointSampler s(109);
  std::vector<SpacetimePoint> pts{SpacetimePoint(0.0, 0.0, RVector::Zero(1))};
  for (int i = 0; i < 4; ++i) pts.push_back(s.point(1, 0.3, 0.3, 0.5));
  const InverseFtCheck ck = inverse_ft_check(Family::u_p, pp, pts);
  const PacketCharacteristics pc = packet_characteristics(pp);
  auto e = [&](double kz) { return fourier_exponent(Family::u_p, pp, WaveVector(RVector::Zero(1), kz, pp.m)).real(); };
  const double h = 1e-4 * pc.k_phys;
  const double deriv = std::abs(e(pc.k_phys + h) - e(pc.k_phys - h)) / (2.0 * h);
  return {ck.max_deviation <= 1e-3 && ck.constant_stability <= 1e-3 && deriv < 1e-8,
          "p = " + fmt("%g", pp.p()) + ", 5 points: deviation " + sci(ck.max_deviation) + ", constant " +
              fmt("%.6f", ck.constant.real()) + fmt("%+.1ei", ck.constant.imag()) + ", stability " +
              sci(ck.constant_stability) + "; exponent slope at K " + sci(deriv)};
}

// ---------------------------------------------------------------- 9: asymptotic identities

Outcome criterion_cross() {
  const PacketParams pp = packet_from_tau(stigmatic_curve(2, 10.0), 0.5, 1.0, 4.0, 25.0, 2.0);
  const PacketCharacteristics pc = packet_characteristics(pp);
  PointSampler s(113);
  double saddle = rel_dev(saddle_point_small_t(pp, SpacetimePoint(0.0, 0.0, RVector::Zero(2))).field,
                          envelope_small_time(SpacetimePoint(0.0, 0.0, RVector::Zero(2)), pp).field);
  for (int i = 0; i < 10; ++i) {
    const SpacetimePoint p = s.point(2, 0.05, 0.2, 0.3);
    saddle = std::max(saddle, rel_dev(saddle_point_small_t(pp, p).field, envelope_small_time(p, pp).field));
  }
  const double t = 20.0 * std::max(pp.tau(), 4.0 * pp.curve.inv_norm() * pp.tau() / pp.gamma);
  const SpacetimePoint centre(t, pc.v_gr * t, RVector::Zero(2));
  const LogComplexField spf = stationary_phase_large_t(pp, centre).field;
  const double sp = rel_dev(spf, envelope_large_time(centre, pp).field);
  const double exact = rel_dev(spf, u_packet(centre, pp));
  return {saddle <= 1e-10 && sp <= 3.0 / pc.p && exact <= 3.0 / pc.p,
          "p = " + fmt("%g", pc.p) + ": saddle vs small-time envelope " + sci(saddle) +
              ", stationary phase vs large-time envelope " + sci(sp) + " and vs exact u_p " + sci(exact) +
              " at the centre (bound " + sci(3.0 / pc.p) + ")"};
}

// ---------------------------------------------------------------- 10: design

Outcome criterion_design() {
  PointSampler s(127);
  double worst = 0.0;
  int validated = 0;
  for (int i = 0; i < 20; ++i) {
    const double m = std::exp(s.uniform(std::log(0.1), std::log(10.0)));
    const double p = std::exp(s.uniform(std::log(10.0), std::log(1e4)));
    const double omega = p * s.uniform(1.05, 50.0);
    const double dpar = std::sqrt(p) / omega;
    const double dperp = s.uniform(0.01, 2.0);
    const DesignResult r = design_parameters(m, omega, dpar, dperp);
    const PacketParams pp = designed_packet(r, m, 2);
    const PacketCharacteristics c = packet_characteristics(pp);
    RVector e(2);
    e << 1.0, 0.0;
    worst = std::max({worst, std::abs(c.Omega / omega - 1.0), std::abs(width_parallel(c) / dpar - 1.0),
                      std::abs(width_perp(pp, 0.0, e) / dperp - 1.0)});
    const cli::RunConfig cfg = cli::design_config(cli::DesignRequest{m, omega, dpar, dperp, 2, 0.5});
    if (cli::validate_config(cfg).pass) ++validated;
  }
  return {worst <= 1e-10 && validated == 20,
          "20 targets: round-trip deviation " + sci(worst) + ", " + std::to_string(validated) + "/20 configs validate"};
}

// ---------------------------------------------------------------- 11: figures

struct Slice {
  std::vector<double> a, b, lg;
  double cell_a = 0.0, cell_b = 0.0;
};

Slice read_slice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  Slice s;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string f;
    double v[4];
    for (double& x : v) {
      std::getline(ls, f, ',');
      x = std::stod(f);
    }
    s.a.push_back(v[0]);
    s.b.push_back(v[1]);
    s.lg.push_back(v[2]);
  }
  auto cell = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs.size() > 1 ? xs[1] - xs[0] : 0.0;
  };
  s.cell_a = cell(s.a);
  s.cell_b = cell(s.b);
  return s;
}

std::size_t argmax(const Slice& s) {
  return static_cast<std::size_t>(std::max_element(s.lg.begin(), s.lg.end()) - s.lg.begin());
}

// Angle in [0, 180) of the major axis of the |u|^2-weighted second moments.
double major_axis_deg(const Slice& s) {
  const double top = *std::max_element(s.lg.begin(), s.lg.end());
  double w = 0.0, ma = 0.0, mb = 0.0;
  std::vector<double> wt(s.lg.size());
  for (std::size_t i = 0; i < wt.size(); ++i) {
    wt[i] = std::pow(10.0, 2.0 * (s.lg[i] - top));
    w += wt[i];
    ma += wt[i] * s.a[i];
    mb += wt[i] * s.b[i];
  }
  ma /= w;
  mb /= w;
  double caa = 0.0, cbb = 0.0, cab = 0.0;
  for (std::size_t i = 0; i < wt.size(); ++i) {
    caa += wt[i] * (s.a[i] - ma) * (s.a[i] - ma);
    cbb += wt[i] * (s.b[i] - mb) * (s.b[i] - mb);
    cab += wt[i] * (s.a[i] - ma) * (s.b[i] - mb);
  }
  double ang = 0.5 * std::atan2(2.0 * cab, caa - cbb) * 180.0 / pi;
  if (ang < 0.0) ang += 180.0;
  return ang;
}

double axis_difference(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

Outcome criterion_figures() {
  const fs::path root = fs::temp_directory_path() / ("lwp_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream log;
  std::map<std::string, cli::FieldRun> runs;
  std::map<std::string, cli::RunConfig> cfgs;
  for (const char* name : {"fig1", "fig2", "fig3"}) {
    cfgs[name] = cli::load_config(std::string(LWP_CONFIG_DIR) + "/" + name + ".json");
    runs[name] = cli::run_field(cfgs[name], (root / name).string(), log);
  }
  bool ok = true;
  std::string detail;

  // Maxima at the envelope centre (slice axes are offsets from z = v_gr t, r_perp = 0).
  int centred = 0, slices = 0;
  for (const char* name : {"fig1", "fig2"}) {
    for (const auto& f : runs[name].files) {
      const Slice s = read_slice(f.path);
      const std::size_t i = argmax(s);
      ++slices;
      if (std::abs(s.a[i]) <= s.cell_a && std::abs(s.b[i]) <= s.cell_b) ++centred;
    }
  }
  ok = ok && centred == slices;
  detail += std::to_string(centred) + "/" + std::to_string(slices) + " small/moderate-time maxima at the centre";

  // Rotation of the xy localization ellipse from t = -500 to the large-time slices.
  auto xy_angle = [&](const std::string& fig, std::size_t time_index) {
    std::vector<const cli::FieldFile*> xy;
    for (const auto& f : runs[fig].files)
      if (f.slice == "xy") xy.push_back(&f);
    return major_axis_deg(read_slice(xy.at(time_index)->path));
  };
  const double a_small = xy_angle("fig1", 0);
  double min_turn = 180.0;
  for (std::size_t k = 0; k < 3; ++k) min_turn = std::min(min_turn, axis_difference(a_small, xy_angle("fig3", k)));
  ok = ok && min_turn >= 60.0;
  detail += "; xy major axis " + fmt("%.1f", a_small) + " deg at t = -500, turned by >= " + fmt("%.1f", min_turn) +
            " deg at t = tau..3tau";

  // Large-time maxima inside the radial/angular window.
  const cli::RunConfig& c3 = cfgs["fig3"];
  const GammaCurve curve = cli::build_curve(c3);
  const PacketParams pp = cli::build_packet(c3, curve);
  const PacketCharacteristics pc = packet_characteristics(pp);
  RVector ey = RVector::Zero(2);
  ey(1) = 1.0;
  int inside = 0, large = 0;
  for (const auto& f : runs["fig3"].files) {
    if (f.slice != "yz") continue;
    const Slice s = read_slice(f.path);
    const std::size_t i = argmax(s);
    const double radial = width_radial(pc) * f.t;
    const double angular = width_angular(pp, ey);
    ++large;
    if (std::abs(s.b[i]) <= radial && std::abs(s.a[i]) / (pc.v_gr * f.t) <= angular) ++inside;
  }
  ok = ok && inside == large && large == 3;
  detail += "; " + std::to_string(inside) + "/" + std::to_string(large) + " large-time maxima inside the Delta_v/Delta_theta window";
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main() {
  Runner r;
  r.run(1, "PDE residual", criterion_residual);
  r.run(2, "special functions", criterion_specfun);
  r.run(3, "superposition identities", criterion_superposition);
  r.run(4, "massless limit", criterion_massless);
  r.run(5, "group velocity", criterion_group_velocity);
  r.run(6, "envelope widths", criterion_widths);
  r.run(7, "width relations", criterion_width_relations);
  r.run(8, "Fourier consistency", criterion_fourier);
  r.run(9, "asymptotic cross-identities", criterion_cross);
  r.run(10, "design round-trip", criterion_design);
  r.run(11, "figure regeneration", criterion_figures);
  std::printf("%d of 11 criteria failed\n", r.failures);
  return r.failures == 0 ? 0 : 1;
}
