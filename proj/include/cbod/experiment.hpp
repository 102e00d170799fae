#pragma once

// Declarative experiments behind the command-line tool: config resolution, sweeps and result tables.

#include "cbod/dynamics.hpp"
#include "cbod/params.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbod {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { staticFidelity, rampFidelity, timeSweep, coulombReport, oracleCheck };

ExperimentKind parse_experiment(const std::string& name);
std::string to_string(ExperimentKind k);

struct SweepSpec {
  std::string parameter;
  bool log = true;
  double min = 1e-3;
  double max = 1.0;
  int points = 25;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::staticFidelity;

  // [params]; mS follows from the mass ratio mF/mS.
  double mF = 1.0;
  double kappaS = 100.0;
  double kappaF = 100.0;
  double kI = 50.0;
  double hbar = 1.0;
  double massRatio = 0.01; // fixed ratio for time sweeps

  SweepSpec sweep;

  // [curves] of static-fidelity
  std::string curveParameter = "kappaS";
  std::vector<double> curveValues;
  bool decoupledControl = true;

  // [ramp]
  std::string rampSpring = "kappaS";
  double k0 = 50.0;
  std::vector<double> k1;
  double Tf = 1.0;

  // [evolution]
  EvolutionOptions evolution;

  // [coulomb]
  double g = 1.0;
  double coulombMass = 1.0;
  int maxN = 4;

  // [oracle]
  bool oracleFull = true;

  /// Every key actually used, defaults included, as TOML.
  std::string resolved;
};

/// Defaults for `kind`, overlaid by the file (if any) and then by `key=value` overrides with dotted keys.
/// Unknown keys and type mismatches throw ConfigError.
ExperimentConfig load_config(ExperimentKind kind, const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Series> series;
  std::string xLabel;
  std::string yLabel;
  bool logX = true;
  bool allPassed = true; // oracle-check only
};

/// Runs the sweep on `jobs` threads; rows come out sorted by curve and sweep coordinate.
/// Physics failures surface as ValidityError / DomainError / SingularityError.
ResultTable run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Shortest round-trip decimal form.
std::string format_number(double v);
std::string to_csv(const ResultTable& t);
std::string to_svg(const ResultTable& t);

/// Writes <experiment>.csv, <experiment>.svg (when the table has series) and config.resolved.toml.
void emit_outputs(const ResultTable& t, const ExperimentConfig& cfg, const std::filesystem::path& dir);

} // namespace cbod
