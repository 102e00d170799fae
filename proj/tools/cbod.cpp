#include "cbod/errors.hpp"
#include "cbod/experiment.hpp"
#include "cbod/oracle_suite.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

enum Exit { ok = 0, configError = 1, validityError = 2, oracleFailure = 3 };

void print_check(const cbod::OracleCheck& c) {
  std::cout << (c.pass ? "PASS" : "FAIL") << "  [" << c.criterion << "] " << c.name << ": "
            << cbod::format_number(c.value) << (c.atLeast ? " >= " : " <= ") << cbod::format_number(c.tolerance);
  if (!c.detail.empty()) {
    std::cout << "  (" << c.detail << ")";
  }
  std::cout << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterdiabatic Born-Oppenheimer dynamics of coupled oscillators"};
  std::string experiment;
  std::optional<std::string> config;
  std::vector<std::string> overrides;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out = "out";

  app.add_option("experiment", experiment,
                 "static-fidelity | ramp-fidelity | time-sweep | coulomb-report | oracle-check")
      ->required();
  app.add_option("--config,-c", config, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--set,-s", overrides, "override a configuration value, e.g. --set params.kI=30")
      ->allow_extra_args(false);
  app.add_option("--jobs,-j", jobs, "worker threads for sweep points")->check(CLI::PositiveNumber);
  app.add_option("--out,-o", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : configError;
  }

  try {
    const auto kind = cbod::parse_experiment(experiment);
    std::optional<std::filesystem::path> file;
    if (config) {
      file = *config;
    }
    const auto cfg = cbod::load_config(kind, file, overrides);

    cbod::ResultTable table;
    if (kind == cbod::ExperimentKind::oracleCheck) {
      const auto checks = cbod::run_oracle_suite({cfg.oracleFull, jobs}, print_check);
      table.columns = {"criterion", "check", "value", "tolerance", "relation", "pass", "detail"};
      for (const auto& c : checks) {
        table.rows.push_back({std::to_string(c.criterion), c.name, cbod::format_number(c.value),
                              cbod::format_number(c.tolerance), c.atLeast ? ">=" : "<=", c.pass ? "pass" : "FAIL",
                              c.detail});
        table.allPassed = table.allPassed && c.pass;
      }
    } else {
      table = cbod::run_experiment(cfg, jobs);
    }
    cbod::emit_outputs(table, cfg, out);
    std::cout << "wrote " << table.rows.size() << " rows to " << (std::filesystem::path(out) / (experiment + ".csv")).string()
              << "\n";
    if (!table.allPassed) {
      std::cerr << "oracle-check: some invariants failed\n";
      return oracleFailure;
    }
    return ok;
  } catch (const cbod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return configError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return configError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return configError;
  } catch (const cbod::ValidityError& e) {
    std::cerr << "validity error: " << e.what() << "\n";
    return validityError;
  } catch (const cbod::DomainError& e) {
    std::cerr << "validity error: " << e.what() << "\n";
    return validityError;
  } catch (const cbod::SingularityError& e) {
    std::cerr << "validity error: " << e.what() << "\n";
    return validityError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return validityError;
  }
}
