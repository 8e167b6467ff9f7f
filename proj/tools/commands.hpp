#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wgf/wgf.hpp"

namespace wgf::cli {

enum ExitCode : int { ok = 0, oracle_failure = 1, config_error = 2, monotonicity_abort = 3, io_error = 4 };

struct InitialSpec {
  std::string type = "profile";
  double a = 0.0;
  double b = 1.0;
  std::filesystem::path csv;
};

struct ReportSpec {
  bool energy = true;
  bool fourier = false;
  bool wasserstein = true;
  bool moments = true;
  std::optional<double> moment_r;
};

struct OracleSpec {
  std::size_t states = 10;
  std::vector<std::pair<double, double>> exponents{{1.7, 1.3}, {1.8, 1.4}, {1.5, 1.5}, {2.0, 1.5}};
  double tolerance = 1e-12;
};

struct RunConfig {
  ReferenceProfile profile = ReferenceProfile::uniform(0.0, 1.0, 1.0);
  Exponents exps{2.0, 2.0};
  std::size_t n = 200;
  std::size_t quadrature_nodes = 0;
  InitialSpec initial;
  IntegratorConfig integrator;
  ReportSpec reports;
  std::optional<std::pair<double, double>> fit_window;
  OracleSpec oracle;

  std::size_t quadrature() const { return quadrature_nodes == 0 ? n : quadrature_nodes; }
  double moment_order() const { return reports.moment_r.value_or(0.5 * exps.q_a() - 0.1); }
};

/// Parses a run configuration; relative paths resolve against base_dir.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

InverseCDF initial_datum(const RunConfig& cfg);

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_steady(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_oracle_check(const RunConfig& cfg, const std::filesystem::path& out, std::uint64_t seed, std::ostream& log);
int cmd_energy_audit(const std::filesystem::path& dir, const std::filesystem::path& out, std::ostream& log);

/// Full command line entry point; maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace wgf::cli
