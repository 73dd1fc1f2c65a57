#include "commands.hpp"

#include "lwp/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace lwp::cli;
  CLI::App app{"Localized wave packet solutions: validate, export, verify and design"};
  app.set_version_flag("--version", std::string(lwp::version));
  app.require_subcommand(1);

  std::string config_path, out;
  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--config,-c", config_path, "JSON run configuration")->required();
    sub->add_option("--margin", ov.margin, "factor realising a << b as a * margin <= b");
    sub->add_option("--h", ov.h, "finite-difference base step");
    sub->add_option("--threads", ov.threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", ov.seed, "seed for random test points");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a configuration");
  add_common(validate);
  CLI::App* field = app.add_subcommand("field", "write field slices as CSV");
  add_common(field);
  field->add_option("--out,-o", out, "output directory")->required();
  CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
  add_common(verify);
  verify->add_option("--out,-o", out, "directory for verify_report.json");
  CLI::App* design = app.add_subcommand("design", "derive packet parameters from target widths");
  DesignRequest dr;
  design->add_option("--m", dr.m, "mass")->required();
  design->add_option("--omega", dr.omega, "dimensionless carrier frequency")->required();
  design->add_option("--dpar", dr.delta_par, "longitudinal width")->required();
  design->add_option("--dperp", dr.delta_perp, "transverse width")->required();
  design->add_option("--d", dr.d, "transverse dimension");
  design->add_option("--mu", dr.mu, "spectral exponent");
  design->add_option("--out,-o", out, "write the config here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(exit_io);
  }

  if (design->parsed()) return cmd_design(dr, out, std::cout);

  RunConfig c;
  try {
    c = load_config(config_path);
  } catch (const lwp::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_io;
  }
  apply_overrides(c, ov);
  if (validate->parsed()) return cmd_validate(c, std::cout);
  if (field->parsed()) return cmd_field(c, out, std::cout);
  return cmd_verify(c, out, std::cout);
}
