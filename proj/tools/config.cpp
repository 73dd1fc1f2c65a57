#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace lwp::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double get_double(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "' must be finite");
  return v;
}

double get_double_or(const json& j, const std::string& key, double def) {
  return j.contains(key) ? get_double(j, key) : def;
}

std::optional<double> get_optional(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_double(j, key);
}

AxisSpec parse_axis(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("'" + key + "' must be an object");
  AxisSpec a;
  if (!j.contains("coord") || !j.at("coord").is_string())
    throw ConfigError("'" + key + ".coord' must be a string");
  a.coord = j.at("coord").get<std::string>();
  a.lo = get_double(j, "lo");
  a.hi = get_double(j, "hi");
  if (!j.contains("n") || !j.at("n").is_number_integer())
    throw ConfigError("'" + key + ".n' must be an integer");
  a.n = j.at("n").get<int>();
  return a;
}

ordered_json axis_json(const AxisSpec& a) {
  ordered_json j;
  j["coord"] = a.coord;
  j["lo"] = a.lo;
  j["hi"] = a.hi;
  j["n"] = a.n;
  return j;
}

}  // namespace

cplx parse_complex(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (!j.is_string()) throw ConfigError("key '" + key + "' must be a complex literal");
  std::string s = j.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  static const std::string num = R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";
  static const std::regex full("^" + num + "([+-](?:\\d+\\.?\\d*|\\.\\d+)(?:[eE][+-]?\\d+)?)?[ij]$");
  static const std::regex real_only("^" + num + "$");
  static const std::regex imag_only("^" + num + "?[ij]$");
  static const std::regex unit_imag("^([+-]?)[ij]$");
  std::smatch m;
  if (std::regex_match(s, m, real_only)) return {std::stod(m[1]), 0.0};
  if (std::regex_match(s, m, unit_imag)) return {0.0, m[1] == "-" ? -1.0 : 1.0};
  if (std::regex_match(s, m, full) && m[2].matched) return {std::stod(m[1]), std::stod(m[2])};
  if (std::regex_match(s, m, imag_only) && m[1].matched) return {0.0, std::stod(m[1])};
  // "a+i" / "a-i"
  static const std::regex unit_tail("^" + num + "([+-])[ij]$");
  if (std::regex_match(s, m, unit_tail)) return {std::stod(m[1]), m[2] == "-" ? -1.0 : 1.0};
  throw ConfigError("key '" + key + "': cannot parse complex literal '" + s + "'");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

bool Gamma0Spec::operator==(const Gamma0Spec& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::matrix: return matrix.rows() == o.matrix.rows() && matrix == o.matrix;
    case Kind::builder:
      return z1 == o.z1 && eps1 == o.eps1 && z2 == o.z2 && eps2 == o.eps2 && phi == o.phi;
    case Kind::stigmatic: return eps == o.eps;
  }
  return false;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return family == o.family && d == o.d && mu == o.mu && gamma == o.gamma && tau == o.tau &&
         kappa == o.kappa && m == o.m && eps_m == o.eps_m && eta == o.eta && c_b == o.c_b &&
         constant_override == o.constant_override && gamma0 == o.gamma0 && times == o.times &&
         slices == o.slices && normalize == o.normalize && tolerances == o.tolerances &&
         oracle_max_p == o.oracle_max_p && suites == o.suites && margin == o.margin &&
         h == o.h && threads == o.threads && seed == o.seed && inject_bug == o.inject_bug;
}

const std::vector<std::string>& default_suites() {
  static const std::vector<std::string> s = {"residual",  "eikonal",    "transport",
                                             "superposition", "zeta", "inverse_ft",
                                             "envelope"};
  return s;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"residual", 1e-6},      {"order_min", 1.7},   {"order_max", 2.3},
      {"eikonal", 1e-7},       {"transport", 1e-7},  {"superposition", 1e-8},
      {"zeta", 1e-8},          {"inverse_ft", 1e-3}, {"envelope", 0.05},
      {"saddle", 1e-10}};
  return t;
}

double RunConfig::tolerance(const std::string& key) const {
  const auto it = tolerances.find(key);
  if (it != tolerances.end()) return it->second;
  return default_tolerances().at(key);
}

Family parse_family(const std::string& s) {
  if (s == "phi_b") return Family::phi_b;
  if (s == "phi_p") return Family::phi_p;
  if (s == "u_b") return Family::u_b;
  if (s == "u_p") return Family::u_p;
  throw ConfigError("unknown family '" + s + "' (expected phi_b, phi_p, u_b, u_p)");
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  if (!j.contains("family") || !j.at("family").is_string())
    throw ConfigError("key 'family' must be a string");
  c.family = parse_family(j.at("family").get<std::string>());
  if (!j.contains("d") || !j.at("d").is_number_integer())
    throw ConfigError("key 'd' must be an integer");
  c.d = j.at("d").get<int>();
  c.mu = get_double_or(j, "mu", c.mu);
  c.gamma = get_double_or(j, "gamma", c.gamma);
  c.tau = get_optional(j, "tau");
  c.kappa = get_optional(j, "kappa");
  c.m = get_double_or(j, "m", is_kgf(c.family) ? 1.0 : 0.0);
  c.eps_m = get_double_or(j, "eps_m", c.eps_m);
  c.eta = get_double_or(j, "eta", c.eta);
  if (j.contains("c_b")) c.c_b = parse_complex(j.at("c_b"), "c_b");
  if (j.contains("constant_override") && !j.at("constant_override").is_null())
    c.constant_override = parse_complex(j.at("constant_override"), "constant_override");

  if (!j.contains("gamma0") || !j.at("gamma0").is_object())
    throw ConfigError("key 'gamma0' must be an object");
  const json& g = j.at("gamma0");
  if (g.contains("matrix")) {
    const json& mj = g.at("matrix");
    if (!mj.is_array() || mj.size() != static_cast<std::size_t>(c.d * c.d))
      throw ConfigError("key 'gamma0.matrix' must list d*d entries row-major");
    c.gamma0.kind = Gamma0Spec::Kind::matrix;
    c.gamma0.matrix.resize(c.d, c.d);
    for (int r = 0; r < c.d; ++r)
      for (int col = 0; col < c.d; ++col)
        c.gamma0.matrix(r, col) = parse_complex(mj[r * c.d + col], "gamma0.matrix");
  } else if (g.contains("builder")) {
    const json& b = g.at("builder");
    c.gamma0.kind = Gamma0Spec::Kind::builder;
    c.gamma0.z1 = get_double(b, "z1");
    c.gamma0.eps1 = get_double(b, "eps1");
    c.gamma0.z2 = get_double(b, "z2");
    c.gamma0.eps2 = get_double(b, "eps2");
    if (!b.contains("phi")) throw ConfigError("missing key 'gamma0.builder.phi'");
    c.gamma0.phi = parse_complex(b.at("phi"), "gamma0.builder.phi");
  } else if (g.contains("stigmatic")) {
    c.gamma0.kind = Gamma0Spec::Kind::stigmatic;
    c.gamma0.eps = get_double(g, "stigmatic");
  } else {
    throw ConfigError("key 'gamma0' needs one of 'matrix', 'builder', 'stigmatic'");
  }

  if (j.contains("grid")) {
    const json& gr = j.at("grid");
    if (gr.contains("times")) {
      if (!gr.at("times").is_array()) throw ConfigError("key 'grid.times' must be an array");
      for (const auto& t : gr.at("times")) {
        if (!t.is_number()) throw ConfigError("key 'grid.times' must hold numbers");
        c.times.push_back(t.get<double>());
      }
    }
    if (gr.contains("slices")) {
      for (const auto& s : gr.at("slices")) {
        SliceSpec sl;
        if (!s.contains("name") || !s.at("name").is_string())
          throw ConfigError("key 'grid.slices[].name' must be a string");
        sl.name = s.at("name").get<std::string>();
        if (!s.contains("axis1") || !s.contains("axis2"))
          throw ConfigError("slice '" + sl.name + "' needs axis1 and axis2");
        sl.axis1 = parse_axis(s.at("axis1"), "grid.slices." + sl.name + ".axis1");
        sl.axis2 = parse_axis(s.at("axis2"), "grid.slices." + sl.name + ".axis2");
        sl.fix_z_at_center = s.value("fix_z_at_center", false);
        sl.relative = s.value("relative", true);
        c.slices.push_back(sl);
      }
    }
  }
  if (j.contains("normalize")) {
    c.normalize = j.at("normalize").get<std::string>();
    if (c.normalize != "center" && c.normalize != "origin" && c.normalize != "none")
      throw ConfigError("key 'normalize' must be center, origin or none");
  }
  if (j.contains("tolerances")) {
    for (const auto& [k, v] : j.at("tolerances").items()) {
      if (!default_tolerances().count(k)) throw ConfigError("unknown tolerance 'tolerances." + k + "'");
      if (!v.is_number()) throw ConfigError("key 'tolerances." + k + "' must be a number");
      c.tolerances[k] = v.get<double>();
    }
  }
  if (j.contains("oracle_scale")) c.oracle_max_p = get_double_or(j.at("oracle_scale"), "max_p", 50.0);
  if (j.contains("suites")) {
    for (const auto& s : j.at("suites")) {
      const std::string name = s.get<std::string>();
      if (std::find(default_suites().begin(), default_suites().end(), name) ==
          default_suites().end())
        throw ConfigError("unknown suite '" + name + "'");
      c.suites.push_back(name);
    }
  } else {
    c.suites = default_suites();
  }
  c.margin = get_double_or(j, "margin", c.margin);
  c.h = get_optional(j, "h");
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
  if (j.contains("inject_bug")) c.inject_bug = j.at("inject_bug").get<bool>();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ConfigError(path + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["family"] = to_string(c.family);
  j["d"] = c.d;
  j["mu"] = c.mu;
  j["gamma"] = c.gamma;
  if (c.tau) j["tau"] = *c.tau;
  if (c.kappa) j["kappa"] = *c.kappa;
  j["m"] = c.m;
  j["eps_m"] = c.eps_m;
  j["eta"] = c.eta;
  j["c_b"] = format_complex(c.c_b);
  if (c.constant_override) j["constant_override"] = format_complex(*c.constant_override);
  ordered_json g;
  switch (c.gamma0.kind) {
    case Gamma0Spec::Kind::matrix: {
      ordered_json arr = ordered_json::array();
      for (int r = 0; r < c.gamma0.matrix.rows(); ++r)
        for (int col = 0; col < c.gamma0.matrix.cols(); ++col)
          arr.push_back(format_complex(c.gamma0.matrix(r, col)));
      g["matrix"] = arr;
      break;
    }
    case Gamma0Spec::Kind::builder: {
      ordered_json b;
      b["z1"] = c.gamma0.z1;
      b["eps1"] = c.gamma0.eps1;
      b["z2"] = c.gamma0.z2;
      b["eps2"] = c.gamma0.eps2;
      b["phi"] = format_complex(c.gamma0.phi);
      g["builder"] = b;
      break;
    }
    case Gamma0Spec::Kind::stigmatic: g["stigmatic"] = c.gamma0.eps; break;
  }
  j["gamma0"] = g;
  ordered_json grid;
  grid["times"] = c.times;
  ordered_json slices = ordered_json::array();
  for (const auto& s : c.slices) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["axis1"] = axis_json(s.axis1);
    sj["axis2"] = axis_json(s.axis2);
    sj["fix_z_at_center"] = s.fix_z_at_center;
    sj["relative"] = s.relative;
    slices.push_back(sj);
  }
  grid["slices"] = slices;
  j["grid"] = grid;
  j["normalize"] = c.normalize;
  ordered_json tol = ordered_json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["oracle_scale"] = ordered_json{{"max_p", c.oracle_max_p}};
  j["suites"] = c.suites;
  j["margin"] = c.margin;
  if (c.h) j["h"] = *c.h;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["inject_bug"] = c.inject_bug;
  return j;
}

GammaCurve build_curve(const RunConfig& c) {
  switch (c.gamma0.kind) {
    case Gamma0Spec::Kind::matrix:
      if (c.gamma0.matrix.rows() != c.d) throw ConfigError("gamma0.matrix does not match d");
      return GammaCurve(c.gamma0.matrix);
    case Gamma0Spec::Kind::builder:
      if (c.d != 2) throw ConfigError("gamma0.builder requires d = 2");
      return build_general_astigmatic(c.gamma0.z1, c.gamma0.eps1, c.gamma0.z2, c.gamma0.eps2,
                                      c.gamma0.phi);
    case Gamma0Spec::Kind::stigmatic: return stigmatic_curve(c.d, c.gamma0.eps);
  }
  throw ConfigError("invalid gamma0 entry");
}

PacketParams build_packet(const RunConfig& c, const GammaCurve& curve) {
  if (is_beam(c.family)) throw ConfigError("family is a beam; packet parameters requested");
  std::optional<PacketParams> pp;
  if (c.family == Family::u_p && c.tau) {
    pp = packet_from_tau(curve, c.mu, c.gamma, *c.tau, c.m, c.eps_m, c.c_b);
  } else {
    if (!c.kappa) throw ConfigError("missing key 'kappa' (or 'tau' for u_p)");
    pp = PacketParams(curve, c.mu, c.gamma, *c.kappa, c.family == Family::u_p ? c.m : 0.0,
                      c.eps_m, c.c_b);
  }
  pp->constant_override = c.constant_override;
  return *pp;
}

BeamParams build_beam(const RunConfig& c, const GammaCurve& curve) {
  if (!is_beam(c.family)) throw ConfigError("family is a packet; beam parameters requested");
  BeamParams bp(curve, c.eta, c.family == Family::u_b ? c.m : 0.0, c.eps_m, c.c_b);
  bp.constant_override = c.constant_override;
  return bp;
}

}  // namespace lwp::cli
