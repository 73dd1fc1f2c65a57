// Run configuration: JSON ingestion, validation helpers and lossless serialization.
#pragma once

#include "lwp/gamma.hpp"
#include "lwp/solutions.hpp"
#include "lwp/spectral.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lwp::cli {

// Malformed configuration; maps to exit code 3.
struct ConfigError : Error {
  using Error::Error;
};

// "a+bi", "a-bi", "bi", "a" or a two-element [re, im] array.
cplx parse_complex(const nlohmann::json& j, const std::string& key);
std::string format_complex(cplx z);
std::string format_double(double x);

struct Gamma0Spec {
  enum class Kind { matrix, builder, stigmatic };
  Kind kind = Kind::stigmatic;
  CMatrix matrix;  // Kind::matrix
  double z1 = 0.0, eps1 = 1.0, z2 = 0.0, eps2 = 1.0;
  cplx phi = 0.0;  // Kind::builder
  double eps = 1.0;  // Kind::stigmatic
  bool operator==(const Gamma0Spec& o) const;
};

struct AxisSpec {
  std::string coord;  // "x", "y", ... (transverse index 0, 1, ...) or "z"
  double lo = 0.0;
  double hi = 0.0;
  int n = 2;
  bool operator==(const AxisSpec& o) const = default;
};

// A 2D slice at fixed time. Coordinates not on an axis are fixed: transverse ones at 0,
// z at the envelope center when fix_z_at_center, else at 0. With relative, axis values
// are offsets from the envelope center.
struct SliceSpec {
  std::string name;
  AxisSpec axis1;
  AxisSpec axis2;
  bool fix_z_at_center = false;
  bool relative = true;
  bool operator==(const SliceSpec& o) const = default;
};

struct RunConfig {
  Family family = Family::u_p;
  int d = 2;
  double mu = 0.5;
  double gamma = 1.0;
  std::optional<double> tau;
  std::optional<double> kappa;
  double m = 1.0;
  double eps_m = 1.0;
  double eta = 1.0;
  cplx c_b = 1.0;
  std::optional<cplx> constant_override;
  Gamma0Spec gamma0;

  std::vector<double> times;
  std::vector<SliceSpec> slices;
  std::string normalize = "center";  // center | origin | none

  std::map<std::string, double> tolerances;
  double oracle_max_p = 50.0;
  std::vector<std::string> suites;
  double margin = 10.0;
  std::optional<double> h;
  int threads = 0;
  unsigned seed = 1;
  bool inject_bug = false;

  bool operator==(const RunConfig& o) const;

  double tolerance(const std::string& key) const;
};

const std::vector<std::string>& default_suites();
const std::map<std::string, double>& default_tolerances();

RunConfig parse_config(const nlohmann::json& j);
// Reads and parses a file; ConfigError carries the line of a JSON syntax error.
RunConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& c);

Family parse_family(const std::string& s);

GammaCurve build_curve(const RunConfig& c);
PacketParams build_packet(const RunConfig& c, const GammaCurve& curve);
BeamParams build_beam(const RunConfig& c, const GammaCurve& curve);

}  // namespace lwp::cli
