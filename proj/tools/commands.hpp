// The four CLI commands. Each returns the process exit code and writes human output to `out`.
#pragma once

#include "config.hpp"

#include "lwp/asymptotics.hpp"
#include "lwp/verify.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace lwp::cli {

enum ExitCode { exit_ok = 0, exit_validation = 1, exit_oracle = 2, exit_io = 3 };

struct IoError : Error {
  using Error::Error;
};

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<double> margin;
  std::optional<double> h;
  std::optional<int> threads;
  std::optional<unsigned> seed;
};
void apply_overrides(RunConfig& c, const Overrides& o);

struct ValidationOutcome {
  bool pass = false;
  std::vector<std::string> failures;  // hard failures
  std::vector<std::string> warnings;
  std::vector<Condition> conditions;  // soft applicability table (packets with m > 0)
};
ValidationOutcome validate_config(const RunConfig& c);
int cmd_validate(const RunConfig& c, std::ostream& out);

// Field evaluator for the configured family; with inject_bug a c_b-scaled plane-wave phase
// error is multiplied in (negative control for the verifier).
FieldFn make_field(const RunConfig& c, const GammaCurve& curve);
// Speed of the envelope center along z: v_gr for u_p, 1 otherwise.
double center_velocity(const RunConfig& c, const GammaCurve& curve);

struct FieldFile {
  std::string path;
  std::string slice;
  double t = 0.0;
  double center_z = 0.0;
};
struct FieldRun {
  std::vector<FieldFile> files;
  std::string metadata_path;
};
// Throws IoError when the output directory is unwritable.
FieldRun run_field(const RunConfig& c, const std::string& out_dir, std::ostream& log);
int cmd_field(const RunConfig& c, const std::string& out_dir, std::ostream& out);

// Machine-readable report with a top-level "pass".
nlohmann::ordered_json run_verify(const RunConfig& c);
int cmd_verify(const RunConfig& c, const std::string& out_dir, std::ostream& out);

struct DesignRequest {
  double m = 1.0;
  double omega = 2.5;
  double delta_par = 0.5;
  double delta_perp = 1.0;
  int d = 2;
  double mu = 0.5;
};
// Ready-to-run u_p config; ParameterError when infeasible.
RunConfig design_config(const DesignRequest& r, std::vector<std::string>* warnings = nullptr);
int cmd_design(const DesignRequest& r, const std::string& out_path, std::ostream& out);

}  // namespace lwp::cli
