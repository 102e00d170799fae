#pragma once

// Cross-module oracle checks, grouped by acceptance criterion.

#include <functional>
#include <string>
#include <vector>

namespace cbod {

struct OracleCheck {
  int criterion = 0;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool atLeast = false; // pass when value >= tolerance, otherwise when value <= tolerance
  bool pass = false;
  std::string detail;
};

struct OracleSettings {
  bool full = true; // acceptance-size grids; otherwise reduced sizes for a fast smoke run
  int jobs = 1;
};

using OracleProgress = std::function<void(const OracleCheck&)>;

std::vector<OracleCheck> check_ramp_regime(const OracleSettings& s);        // 1
std::vector<OracleCheck> check_time_sweep(const OracleSettings& s);         // 2
std::vector<OracleCheck> check_static_trends(const OracleSettings& s);      // 3
std::vector<OracleCheck> check_static_oracles(const OracleSettings& s);     // 4
std::vector<OracleCheck> check_cd_oracles(const OracleSettings& s);         // 5
std::vector<OracleCheck> check_dynamics_oracles(const OracleSettings& s);   // 6
std::vector<OracleCheck> check_coulomb(const OracleSettings& s);            // 7
std::vector<OracleCheck> check_determinism(const OracleSettings& s);        // 8

/// All of the above in criterion order; `progress` sees each check as it finishes.
std::vector<OracleCheck> run_oracle_suite(const OracleSettings& s, const OracleProgress& progress = {});

} // namespace cbod
