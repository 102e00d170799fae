#include "cbod/experiment.hpp"

#include "cbod/coulomb.hpp"
#include "cbod/errors.hpp"
#include "cbod/oracle_suite.hpp"
#include "cbod/oscillators.hpp"
#include "parallel.hpp"

#include <tomlplusplus/toml.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cbod {

namespace {

constexpr std::string_view kParams = R"(
[params]
mF = 1.0
kappaS = 100.0
kappaF = 100.0
kI = 50.0
hbar = 1.0
)";

constexpr std::string_view kEvolution = R"(
[evolution]
method = "coupled"
initial = "exact"
steps_per_unit_time = 10000.0
min_steps = 1000
refine = true
residual_tol = 1e-6
)";

std::string defaults_for(ExperimentKind k) {
  std::string s = "experiment = \"" + to_string(k) + "\"\n";
  switch (k) {
  case ExperimentKind::staticFidelity:
    s += kParams;
    s += R"(
[sweep]
parameter = "mass_ratio"
scale = "log"
min = 0.001
max = 1.0
points = 25

[curves]
parameter = "kappaS"
values = [50.0, 100.0, 200.0]
decoupled_control = true
)";
    break;
  case ExperimentKind::rampFidelity:
    s += kParams;
    s += kEvolution;
    s += R"(
[sweep]
parameter = "mass_ratio"
scale = "log"
min = 0.001
max = 1.0
points = 25

[ramp]
spring = "kappaS"
k0 = 50.0
k1 = [10.0, 25.0, 40.0]
Tf = 1.0
)";
    break;
  case ExperimentKind::timeSweep:
    s += kParams;
    s += "mass_ratio = 0.01\n";
    s += kEvolution;
    s += R"(
[sweep]
parameter = "Tf"
scale = "log"
min = 0.05
max = 1.0
points = 20

[ramp]
spring = "kappaS"
k0 = 50.0
k1 = [10.0, 25.0, 40.0]
)";
    break;
  case ExperimentKind::coulombReport:
    s += R"(
[coulomb]
g = 1.0
mF = 1.0
hbar = 1.0
max_n = 4
)";
    break;
  case ExperimentKind::oracleCheck:
    s += R"(
[oracle]
level = "full"
)";
    break;
  }
  return s;
}

void overlay(toml::table& base, const toml::table& over, const std::string& prefix, std::set<std::string>& touched) {
  for (auto&& [key, node] : over) {
    const std::string path = prefix.empty() ? std::string(key.str()) : prefix + "." + std::string(key.str());
    toml::node* target = base.get(key.str());
    if (target == nullptr) {
      throw ConfigError("unknown configuration key '" + path + "'");
    }
    if (target->is_table()) {
      if (!node.is_table()) {
        throw ConfigError("'" + path + "' must be a table");
      }
      overlay(*target->as_table(), *node.as_table(), path, touched);
      continue;
    }
    touched.insert(path);
    if (target->is_floating_point()) {
      const auto v = node.value<double>();
      if (!v || !(node.is_floating_point() || node.is_integer())) {
        throw ConfigError("'" + path + "' must be a number");
      }
      base.insert_or_assign(key.str(), *v);
    } else if (target->is_integer()) {
      if (!node.is_integer()) {
        throw ConfigError("'" + path + "' must be an integer");
      }
      base.insert_or_assign(key.str(), *node.value<int64_t>());
    } else if (target->is_boolean()) {
      if (!node.is_boolean()) {
        throw ConfigError("'" + path + "' must be true or false");
      }
      base.insert_or_assign(key.str(), *node.value<bool>());
    } else if (target->is_string()) {
      if (!node.is_string()) {
        throw ConfigError("'" + path + "' must be a string");
      }
      base.insert_or_assign(key.str(), *node.value<std::string>());
    } else if (target->is_array()) {
      if (!node.is_array()) {
        throw ConfigError("'" + path + "' must be an array of numbers");
      }
      toml::array arr;
      for (auto&& el : *node.as_array()) {
        const auto v = el.value<double>();
        if (!v || !(el.is_floating_point() || el.is_integer())) {
          throw ConfigError("'" + path + "' must be an array of numbers");
        }
        arr.push_back(*v);
      }
      base.insert_or_assign(key.str(), std::move(arr));
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

toml::table parse_override(const std::string& text) {
  const auto eq = text.find('=');
  const std::string key = eq == std::string::npos ? std::string() : trim(text.substr(0, eq));
  if (key.empty()) {
    throw ConfigError("override '" + text + "' is not of the form key=value");
  }
  const std::string raw = trim(text.substr(eq + 1));

  toml::table leaf;
  try {
    leaf = toml::parse("v = " + raw);
  } catch (const toml::parse_error&) {
    leaf = toml::table{{"v", raw}}; // bare words are strings
  }

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) {
      throw ConfigError("override key '" + key + "' has an empty component");
    }
    parts.push_back(part);
  }
  toml::table root;
  toml::table* cur = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    cur->insert_or_assign(parts[i], toml::table{});
    cur = cur->get(parts[i])->as_table();
  }
  leaf["v"].visit([&](auto&& n) { cur->insert_or_assign(parts.back(), n); });
  return root;
}

double num(const toml::table& t, std::string_view section, std::string_view key) {
  return *t[section][key].value<double>();
}

std::string str(const toml::table& t, std::string_view section, std::string_view key) {
  return *t[section][key].value<std::string>();
}

std::vector<double> numbers(const toml::table& t, std::string_view section, std::string_view key) {
  std::vector<double> out;
  for (auto&& el : *t[section][key].as_array()) {
    out.push_back(*el.value<double>());
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) {
    throw ConfigError(msg);
  }
}

SweepSpec read_sweep(const toml::table& t, const std::string& expected) {
  SweepSpec s;
  s.parameter = str(t, "sweep", "parameter");
  require(s.parameter == expected, "sweep.parameter must be \"" + expected + "\" for this experiment");
  const std::string scale = str(t, "sweep", "scale");
  require(scale == "log" || scale == "linear", "sweep.scale must be \"log\" or \"linear\"");
  s.log = scale == "log";
  s.min = num(t, "sweep", "min");
  s.max = num(t, "sweep", "max");
  s.points = static_cast<int>(*t["sweep"]["points"].value<int64_t>());
  require(s.points >= 1, "sweep.points must be at least 1");
  require(s.min <= s.max, "sweep.min must not exceed sweep.max");
  require(!s.log || s.min > 0.0, "log sweeps need sweep.min > 0");
  return s;
}

void read_params(const toml::table& t, ExperimentConfig& c) {
  c.mF = num(t, "params", "mF");
  c.kappaS = num(t, "params", "kappaS");
  c.kappaF = num(t, "params", "kappaF");
  c.kI = num(t, "params", "kI");
  c.hbar = num(t, "params", "hbar");
  require(c.mF > 0.0, "params.mF must be positive");
  require(c.hbar > 0.0, "params.hbar must be positive");
}

void read_evolution(const toml::table& t, ExperimentConfig& c) {
  const std::string method = str(t, "evolution", "method");
  require(method == "coupled" || method == "instantaneous", "evolution.method must be coupled or instantaneous");
  c.evolution.frame = method == "coupled" ? ModeFrame::coupled : ModeFrame::instantaneous;
  const std::string initial = str(t, "evolution", "initial");
  require(initial == "exact" || initial == "boa", "evolution.initial must be exact or boa");
  c.evolution.initial = initial == "exact" ? InitialState::exact : InitialState::boa;
  c.evolution.stepsPerUnitTime = num(t, "evolution", "steps_per_unit_time");
  c.evolution.minSteps = static_cast<int>(*t["evolution"]["min_steps"].value<int64_t>());
  c.evolution.refine = *t["evolution"]["refine"].value<bool>();
  c.evolution.residualTol = num(t, "evolution", "residual_tol");
  require(c.evolution.stepsPerUnitTime > 0.0, "evolution.steps_per_unit_time must be positive");
  require(c.evolution.minSteps >= 100, "evolution.min_steps must be at least 100");
}

void read_ramp(toml::table& t, ExperimentConfig& c, const std::set<std::string>& touched, bool withTf) {
  c.rampSpring = str(t, "ramp", "spring");
  require(c.rampSpring == "kappaS" || c.rampSpring == "kappaF" || c.rampSpring == "kI",
          "ramp.spring must be kappaS, kappaF or kI");
  require(!touched.contains("params." + c.rampSpring),
          "params." + c.rampSpring + " is ramped; set ramp.k0 and ramp.k1 instead");
  // The ramped spring lives in [ramp] only.
  t["params"].as_table()->erase(c.rampSpring);
  if (c.rampSpring == "kI") {
    // Interaction ramps start near zero coupling.
    if (!touched.contains("ramp.k0")) {
      t["ramp"].as_table()->insert_or_assign("k0", 1.0);
    }
    if (!touched.contains("ramp.k1")) {
      t["ramp"].as_table()->insert_or_assign("k1", toml::array{10.0, 20.0, 30.0});
    }
  }
  c.k0 = num(t, "ramp", "k0");
  c.k1 = numbers(t, "ramp", "k1");
  require(!c.k1.empty(), "ramp.k1 needs at least one value");
  if (withTf) {
    c.Tf = num(t, "ramp", "Tf");
    require(c.Tf > 0.0, "ramp.Tf must be positive");
  }
}

OscillatorParams base_params(const ExperimentConfig& c, double ratio) {
  OscillatorParams p;
  p.mF = c.mF;
  p.mS = c.mF / ratio;
  p.kappaS = c.kappaS;
  p.kappaF = c.kappaF;
  p.kI = c.kI;
  p.units.hbar = c.hbar;
  return p;
}

void set_spring(OscillatorParams& p, const std::string& name, SpringProfile v) {
  if (name == "kappaS") {
    p.kappaS = v;
  } else if (name == "kappaF") {
    p.kappaF = v;
  } else {
    p.kI = v;
  }
}

using detail::parallel_for;

struct Point {
  std::size_t curve;
  double x;
  std::vector<std::string> cells;
  double y;
};

void finish(ResultTable& t, std::vector<Point>& points, const std::vector<std::string>& labels) {
  std::stable_sort(points.begin(), points.end(),
                   [](const Point& a, const Point& b) { return a.curve != b.curve ? a.curve < b.curve : a.x < b.x; });
  t.series.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    t.series[i].label = labels[i];
  }
  for (auto& p : points) {
    t.rows.push_back(std::move(p.cells));
    t.series[p.curve].x.push_back(p.x);
    t.series[p.curve].y.push_back(p.y);
  }
}

std::string curve_label(const std::string& name, double v) {
  return name + "=" + format_number(v);
}

ResultTable run_static(const ExperimentConfig& c, int jobs) {
  struct Curve {
    std::string label;
    std::string parameter;
    double value;
  };
  std::vector<Curve> curves;
  for (const double v : c.curveValues) {
    curves.push_back({curve_label(c.curveParameter, v), c.curveParameter, v});
  }
  if (c.decoupledControl) {
    curves.push_back({"kI=0", "kI", 0.0});
  }
  for (const auto& cv : curves) {
    auto p = base_params(c, 1.0);
    set_spring(p, cv.parameter, cv.value);
    if (auto v = validate(p, 1.0, 2)) {
      throw ValidityError("curve " + cv.label + ": " + v->reason);
    }
  }

  const auto xs = c.sweep.values();
  std::vector<Point> points(curves.size() * xs.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    const std::size_t ci = i / xs.size();
    const double ratio = xs[i % xs.size()];
    auto p = base_params(c, ratio);
    set_spring(p, curves[ci].parameter, curves[ci].value);
    const auto k = springs_at(p, 0.0);
    const double F = static_fidelity(p, 0.0);
    points[i] = {ci,
                 ratio,
                 {format_number(ratio), curves[ci].label, format_number(k.kappaS.value), format_number(k.kappaF.value),
                  format_number(k.kI.value), format_number(F)},
                 F};
  });

  ResultTable t;
  t.columns = {"mass_ratio", "curve", "kappaS", "kappaF", "kI", "fidelity"};
  t.xLabel = "mF/mS";
  t.yLabel = "static fidelity";
  std::vector<std::string> labels;
  for (const auto& cv : curves) {
    labels.push_back(cv.label);
  }
  finish(t, points, labels);
  return t;
}

ResultTable run_ramp(const ExperimentConfig& c, int jobs, bool timeSweep) {
  const auto xs = c.sweep.values();
  const auto ramped = [&](double k1, double Tf, double ratio) {
    auto p = base_params(c, ratio);
    set_spring(p, c.rampSpring, RampSchedule{c.k0, k1, Tf});
    return p;
  };
  for (const double k1 : c.k1) {
    const double Tf = timeSweep ? c.sweep.max : c.Tf;
    if (auto v = validate(ramped(k1, Tf, 1.0), Tf, 1025)) {
      std::ostringstream msg;
      msg << "k1=" << format_number(k1) << " at t=" << format_number(v->time) << ": " << v->reason;
      throw ValidityError(msg.str());
    }
  }

  std::vector<Point> points(c.k1.size() * xs.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    const std::size_t ci = i / xs.size();
    const double x = xs[i % xs.size()];
    const double k1 = c.k1[ci];
    const double ratio = timeSweep ? c.massRatio : x;
    const double Tf = timeSweep ? x : c.Tf;
    const auto r = evolve_cbod(ramped(k1, Tf, ratio), Tf, c.evolution);
    points[i] = {ci,
                 x,
                 {format_number(ratio), format_number(k1), format_number(Tf), format_number(r.fidelity),
                  format_number(r.residual), r.gammaReal ? "ok" : "gamma_inverted", c.rampSpring,
                  std::to_string(r.steps), to_string(r.frame)},
                 r.fidelity};
  });

  ResultTable t;
  t.columns = {"mass_ratio", "k1", "Tf", "fidelity", "ermakov_residual", "validity_flag", "ramped", "steps", "method"};
  t.xLabel = timeSweep ? "Tf" : "mF/mS";
  t.yLabel = "fidelity";
  std::vector<std::string> labels;
  for (const double k1 : c.k1) {
    labels.push_back(curve_label("k1", k1));
  }
  finish(t, points, labels);
  return t;
}

ResultTable run_coulomb(const ExperimentConfig& c) {
  const UnitSystem units{c.hbar};
  ResultTable t;
  t.columns = {"n", "l", "formula_berry", "numeric_berry", "diagonal_cd", "printed_max_diff", "has_printed", "flags"};
  for (const auto& row : coulomb_report(c.g, c.coulombMass, units, c.maxN)) {
    t.rows.push_back({std::to_string(row.n), std::to_string(row.l), format_number(row.formulaBerry),
                      format_number(row.numericBerry), format_number(row.diagonalCD),
                      format_number(row.printedMaxDiff), row.hasPrinted ? "true" : "false",
                      row.flags.empty() ? "none" : row.flags});
  }

  // Canonical and printed brackets of the low states against r.
  t.logX = false;
  t.xLabel = "r";
  t.yLabel = "CD bracket";
  const double a = c.hbar * c.hbar / (c.coulombMass * c.g);
  for (const auto& [n, l] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}}) {
    const HydrogenicState s{n, l, c.g, c.coulombMass, units};
    Series canonical{"(" + std::to_string(n) + "," + std::to_string(l) + ") canonical", {}, {}};
    Series printed{"(" + std::to_string(n) + "," + std::to_string(l) + ") printed", {}, {}};
    for (int i = 1; i <= 240; ++i) {
      const double r = 8.0 * a * i / 240.0;
      double b;
      try {
        b = radial_g_derivative(s, r);
      } catch (const PoleError&) {
        b = std::nan("");
      }
      const double pr = *printed_cd_bracket(s, r);
      canonical.x.push_back(r);
      canonical.y.push_back(std::abs(b) <= 10.0 ? b : std::nan(""));
      printed.x.push_back(r);
      printed.y.push_back(std::abs(pr) <= 10.0 ? pr : std::nan(""));
    }
    t.series.push_back(std::move(canonical));
    t.series.push_back(std::move(printed));
  }
  return t;
}

ResultTable run_oracle(const ExperimentConfig& c, int jobs) {
  ResultTable t;
  t.columns = {"criterion", "check", "value", "tolerance", "relation", "pass", "detail"};
  const auto checks = run_oracle_suite({c.oracleFull, jobs});
  for (const auto& chk : checks) {
    t.rows.push_back({std::to_string(chk.criterion), chk.name, format_number(chk.value), format_number(chk.tolerance),
                      chk.atLeast ? ">=" : "<=", chk.pass ? "pass" : "FAIL", chk.detail});
    t.allPassed = t.allPassed && chk.pass;
  }
  return t;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (const char ch : s) {
    out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += ch;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

} // namespace

ExperimentKind parse_experiment(const std::string& name) {
  for (const auto k : {ExperimentKind::staticFidelity, ExperimentKind::rampFidelity, ExperimentKind::timeSweep,
                       ExperimentKind::coulombReport, ExperimentKind::oracleCheck}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::staticFidelity: return "static-fidelity";
  case ExperimentKind::rampFidelity: return "ramp-fidelity";
  case ExperimentKind::timeSweep: return "time-sweep";
  case ExperimentKind::coulombReport: return "coulomb-report";
  case ExperimentKind::oracleCheck: return "oracle-check";
  }
  return "unknown";
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  if (points == 1) {
    return {min};
  }
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    out.push_back(log ? min * std::pow(max / min, f) : min + (max - min) * f);
  }
  out.back() = max;
  return out;
}

ExperimentConfig load_config(ExperimentKind kind, const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides) {
  toml::table t = toml::parse(defaults_for(kind));
  std::set<std::string> touched;
  try {
    if (file) {
      const toml::table user = toml::parse_file(file->string());
      if (const auto* e = user.get("experiment"); e && e->value<std::string>() != to_string(kind)) {
        throw ConfigError("config file is for experiment '" + e->value<std::string>().value_or("?") + "', not '" +
                          to_string(kind) + "'");
      }
      overlay(t, user, "", touched);
    }
    for (const auto& o : overrides) {
      overlay(t, parse_override(o), "", touched);
    }
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "cannot parse configuration: " << e.description() << " (" << e.source().begin << ")";
    throw ConfigError(msg.str());
  }
  require(*t["experiment"].value<std::string>() == to_string(kind), "the experiment key cannot be overridden");

  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
  case ExperimentKind::staticFidelity:
    read_params(t, c);
    c.sweep = read_sweep(t, "mass_ratio");
    c.curveParameter = str(t, "curves", "parameter");
    require(c.curveParameter == "kappaS" || c.curveParameter == "kappaF" || c.curveParameter == "kI",
            "curves.parameter must be kappaS, kappaF or kI");
    c.curveValues = numbers(t, "curves", "values");
    c.decoupledControl = *t["curves"]["decoupled_control"].value<bool>();
    require(!c.curveValues.empty() || c.decoupledControl, "static-fidelity needs at least one curve");
    break;
  case ExperimentKind::rampFidelity:
    read_params(t, c);
    read_evolution(t, c);
    c.sweep = read_sweep(t, "mass_ratio");
    read_ramp(t, c, touched, true);
    break;
  case ExperimentKind::timeSweep:
    read_params(t, c);
    c.massRatio = num(t, "params", "mass_ratio");
    require(c.massRatio > 0.0, "params.mass_ratio must be positive");
    read_evolution(t, c);
    c.sweep = read_sweep(t, "Tf");
    require(c.sweep.min > 0.0, "ramp durations must be positive");
    read_ramp(t, c, touched, false);
    break;
  case ExperimentKind::coulombReport:
    c.g = num(t, "coulomb", "g");
    c.coulombMass = num(t, "coulomb", "mF");
    c.hbar = num(t, "coulomb", "hbar");
    c.maxN = static_cast<int>(*t["coulomb"]["max_n"].value<int64_t>());
    require(c.g > 0.0 && c.coulombMass > 0.0 && c.hbar > 0.0, "coulomb.g, coulomb.mF and coulomb.hbar must be positive");
    require(c.maxN >= 2 && c.maxN <= 12, "coulomb.max_n must be between 2 and 12");
    break;
  case ExperimentKind::oracleCheck: {
    const std::string level = str(t, "oracle", "level");
    require(level == "full" || level == "quick", "oracle.level must be full or quick");
    c.oracleFull = level == "full";
    break;
  }
  }

  std::ostringstream os;
  os << t << "\n";
  c.resolved = os.str();
  return c;
}

ResultTable run_experiment(const ExperimentConfig& cfg, int jobs) {
  switch (cfg.kind) {
  case ExperimentKind::staticFidelity: return run_static(cfg, jobs);
  case ExperimentKind::rampFidelity: return run_ramp(cfg, jobs, false);
  case ExperimentKind::timeSweep: return run_ramp(cfg, jobs, true);
  case ExperimentKind::coulombReport: return run_coulomb(cfg);
  case ExperimentKind::oracleCheck: return run_oracle(cfg, jobs);
  }
  throw ConfigError("unhandled experiment");
}

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const ResultTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + csv_cell(t.columns[i]);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + csv_cell(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string to_svg(const ResultTable& t) {
  constexpr double W = 720.0, H = 480.0, left = 80.0, right = 190.0, top = 30.0, bottom = 60.0;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : t.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (t.logX && !(s.x[i] > 0.0))) {
        continue;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 1.0;
    xmax = 10.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  const auto fx = [&](double x) { return t.logX ? std::log10(x) : x; };
  double x0 = fx(xmin), x1 = fx(xmax);
  if (t.logX) {
    x0 = std::floor(x0);
    x1 = std::ceil(x1);
  }
  if (x1 <= x0) {
    x1 = x0 + 1.0;
  }
  const double pad = ymax > ymin ? 0.05 * (ymax - ymin) : 0.05 * std::max(1.0, std::abs(ymax));
  const double y0 = ymin - pad, y1 = ymax + pad;
  const auto px = [&](double x) { return left + (fx(x) - x0) / (x1 - x0) * (W - left - right); };
  const auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks: decades on log axes, five intervals otherwise.
  std::vector<double> xt;
  if (t.logX) {
    for (double e = x0; e <= x1 + 1e-9; e += 1.0) {
      xt.push_back(std::pow(10.0, e));
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      xt.push_back(x0 + (x1 - x0) * i / 5.0);
    }
  }
  for (const double x : xt) {
    const double X = px(x);
    os << "<line x1=\"" << fixed(X, 2) << "\" y1=\"" << H - bottom << "\" x2=\"" << fixed(X, 2) << "\" y2=\""
       << H - bottom + 5 << "\" stroke=\"black\"/>\n";
    const std::string label = t.logX ? "1e" + std::to_string(static_cast<int>(std::lround(std::log10(x))))
                                     : format_number(std::round(x * 1e6) / 1e6);
    os << "<text x=\"" << fixed(X, 2) << "\" y=\"" << H - bottom + 20 << "\" text-anchor=\"middle\">" << label
       << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = y0 + (y1 - y0) * i / 5.0;
    const double Y = py(y);
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(Y, 2) << "\" x2=\"" << left << "\" y2=\"" << fixed(Y, 2)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << fixed(Y + 4, 2) << "\" text-anchor=\"end\">" << fixed(y, 4)
       << "</text>\n";
  }
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
     << xml_escape(t.xLabel) << "</text>\n";
  os << "<text transform=\"translate(18," << (top + H - bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << xml_escape(t.yLabel) << "</text>\n";

  for (std::size_t si = 0; si < t.series.size(); ++si) {
    const auto& s = t.series[si];
    const char* color = palette[si % std::size(palette)];
    std::string pts;
    const auto flush = [&]() {
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (t.logX && !(s.x[i] > 0.0))) {
        flush();
        continue;
      }
      pts += (pts.empty() ? "" : " ") + fixed(px(s.x[i]), 2) + "," + fixed(py(s.y[i]), 2);
    }
    flush();
    const double ly = top + 15.0 + 18.0 * static_cast<double>(si);
    os << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 36 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - right + 42 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_outputs(const ResultTable& t, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
      throw std::ios_base::failure("cannot write " + path.string());
    }
  };
  const std::string name = to_string(cfg.kind);
  write(dir / (name + ".csv"), to_csv(t));
  if (!t.series.empty()) {
    write(dir / (name + ".svg"), to_svg(t));
  }
  write(dir / "config.resolved.toml", cfg.resolved);
}

} // namespace cbod
