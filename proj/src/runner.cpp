#include "specop/runner.hpp"

#include "specop/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace specop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view cell) {
  const std::string text = trim(cell);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

bool looks_like_grid(const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] < 0.0 || row[i] > 1.0) return false;
    if (i > 0 && !(row[i] > row[i - 1])) return false;
  }
  return true;
}

std::ofstream open_for_writing(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) {
    const auto v = parse_double(cell);
    if (!v) throw InputError("not a number list: '" + text + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

FunctionalSample ingest_csv(const fs::path& path, HeaderMode header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) {
      const auto v = parse_double(cell);
      if (!v) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": non-numeric cell '" + trim(cell) + "'");
      }
      if (!std::isfinite(*v)) {
        throw InputError(path.string() + ":" + std::to_string(line_no) +
                         ": NaN or Inf value");
      }
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": ragged row (" + std::to_string(row.size()) +
                       " cells, expected " +
                       std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path.string() + ": no data");

  bool has_header = header == HeaderMode::present;
  if (header == HeaderMode::automatic) {
    has_header = rows.size() >= 5 && looks_like_grid(rows.front());
  }
  std::vector<double> grid;
  if (has_header) {
    grid = rows.front();
    rows.erase(rows.begin());
  }
  const auto T = static_cast<Index>(rows.size());
  const auto k = static_cast<Index>(rows.front().size());
  if (T < 4 || k < 2) {
    throw InputError(path.string() + ": need at least 4 rows and 2 columns, got " +
                     std::to_string(T) + "x" + std::to_string(k));
  }
  RealMatrix values(T, k);
  for (Index t = 0; t < T; ++t) {
    for (Index i = 0; i < k; ++i) {
      values(t, i) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
    }
  }
  if (!has_header) grid = uniform_grid(k);
  return FunctionalSample(std::move(values), std::move(grid));
}

void validate(const RunConfig& config) {
  if (!config.asymptotic && config.replicates < 99) {
    throw InputError("--bootstrap must be >= 99");
  }
  if (config.alphas.empty()) throw InputError("at least one alpha is required");
  for (double a : config.alphas) {
    if (!(a > 0.0 && a <= 0.5)) {
      throw InputError("alpha values must lie in (0, 0.5]");
    }
  }
  if (config.bandwidth && !(*config.bandwidth > 0.0 && *config.bandwidth < 1.0)) {
    throw InputError("--bandwidth must lie in (0,1)");
  }
  if (!config.bandwidth && config.cv_grid.empty()) {
    throw InputError("cross-validation grid is empty");
  }
}

AnalysisOptions analysis_options(const RunConfig& config) {
  AnalysisOptions options;
  options.bandwidth = config.bandwidth;
  options.cv_grid = config.cv_grid;
  options.kernel = config.kernel;
  BootstrapOptions boot;
  boot.replicates = config.replicates;
  boot.master_seed = config.seed;
  boot.alphas = config.alphas;
  boot.statistic = config.statistic;
  if (config.asymptotic) {
    options.bootstrap.reset();
    options.asymptotic_alphas = config.alphas;
  } else {
    options.bootstrap = boot;
  }
  return options;
}

json make_report(const TwoSampleTest& test, const RunConfig& config) {
  json r;
  r["schema_version"] = kReportSchemaVersion;
  r["tool_version"] = kToolVersion;
  r["T"] = test.sample_length;
  r["k"] = test.grid_size;
  r["kernel"] = std::string(to_string(config.kernel));
  r["bandwidth"] = test.bandwidth;
  r["bandwidth_source"] = test.cv_curve ? "cv" : "fixed";
  if (test.cv_curve) {
    json curve = json::array();
    for (std::size_t i = 0; i < test.cv_curve->candidates.size(); ++i) {
      curve.push_back({{"b", test.cv_curve->candidates[i]},
                       {"score", number_or_null(test.cv_curve->scores[i])}});
    }
    r["cv_curve"] = curve;
  } else {
    r["cv_curve"] = nullptr;
  }
  const auto& s = test.statistic;
  r["u_stat"] = s.u_stat;
  r["mu0_hat"] = s.mu0_hat;
  r["theta0_hat"] = s.theta0_hat;
  r["t_stat"] = s.t_stat;

  json cvs = json::array();
  if (test.bootstrap) {
    const auto& boot = *test.bootstrap;
    r["decision_basis"] = "bootstrap";
    r["statistic"] = std::string(to_string(boot.statistic));
    r["bootstrap_replicates"] = boot.replicates;
    r["seed"] = boot.master_seed;
    r["p_value"] = boot.p_value;
    for (const auto& cv : boot.critical_values) {
      cvs.push_back({{"alpha", cv.alpha}, {"value", cv.value}});
    }
    r["clipped_mass"] = boot.clipped_mass;
    r["rejected_draws"] = boot.rejected_draws;
  } else {
    r["decision_basis"] = "asymptotic";
    r["statistic"] = nullptr;
    r["bootstrap_replicates"] = nullptr;
    r["seed"] = config.seed;
    r["p_value"] = test.asymptotic_p_value.value_or(1.0);
    for (const auto& d : test.decisions) {
      cvs.push_back({{"alpha", d.alpha}, {"value", d.critical_value}});
    }
    r["clipped_mass"] = nullptr;
    r["rejected_draws"] = nullptr;
  }
  r["critical_values"] = cvs;
  json decisions = json::array();
  for (const auto& d : test.decisions) {
    decisions.push_back({{"alpha", d.alpha},
                         {"critical_value", d.critical_value},
                         {"reject", d.reject}});
  }
  r["decisions"] = decisions;

  json q = json::array();
  for (const auto& c : s.per_frequency_q) {
    q.push_back({{"lambda", c.lambda}, {"q", c.q}});
  }
  r["per_frequency_q"] = q;
  return r;
}

std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> problems;
  const auto fail = [&problems](std::string msg) {
    problems.push_back(std::move(msg));
  };
  for (const char* key :
       {"schema_version", "T", "k", "bandwidth", "u_stat", "mu0_hat",
        "theta0_hat", "t_stat", "p_value", "critical_values", "decisions",
        "per_frequency_q", "seed", "tool_version"}) {
    if (!r.contains(key)) fail(std::string("missing field ") + key);
  }
  if (!problems.empty()) return problems;
  if (r["schema_version"] != kReportSchemaVersion) {
    fail("unsupported schema_version");
  }

  const double T = r["T"].get<double>();
  const double b = r["bandwidth"].get<double>();
  const double u = r["u_stat"].get<double>();
  const double mu0 = r["mu0_hat"].get<double>();
  const double theta0 = r["theta0_hat"].get<double>();
  const double t = r["t_stat"].get<double>();
  const double p = r["p_value"].get<double>();

  if (!(b > 0.0 && b < 1.0)) fail("bandwidth outside (0,1)");
  if (u < 0.0) fail("u_stat negative");
  if (!(theta0 > 0.0)) fail("theta0_hat not positive");
  // A normal tail probability can underflow to 0; bootstrap p-values cannot.
  const bool asymptotic = r.value("decision_basis", "bootstrap") == "asymptotic";
  if (!(p <= 1.0 && (p > 0.0 || (asymptotic && p == 0.0)))) {
    fail("p_value outside (0,1]");
  }
  const double expected_t =
      (std::sqrt(b) * T * u - mu0 / std::sqrt(b)) / theta0;
  if (std::abs(expected_t - t) > 1e-12 * (1.0 + std::abs(t))) {
    fail("t_stat inconsistent with u_stat, mu0_hat, theta0_hat");
  }

  std::map<double, double> cv;
  for (const auto& c : r["critical_values"]) {
    cv[c["alpha"].get<double>()] = c["value"].get<double>();
  }
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& [alpha, value] : cv) {
    if (value > previous) fail("critical values not monotone in alpha");
    previous = value;
  }
  for (const auto& d : r["decisions"]) {
    const double alpha = d["alpha"].get<double>();
    const auto it = cv.find(alpha);
    if (it == cv.end()) {
      fail("decision without critical value");
      continue;
    }
    if (d["critical_value"].get<double>() != it->second) {
      fail("decision critical value differs from critical_values");
    }
    if (d["reject"].get<bool>() != (t >= it->second)) {
      fail("decision does not equal t_stat >= critical value");
    }
  }

  double weighted = 0.0;
  std::size_t j = 0;
  for (const auto& c : r["per_frequency_q"]) {
    const double q = c["q"].get<double>();
    if (q < 0.0) fail("negative per-frequency q");
    weighted += q_weight(static_cast<Index>(j++)) * q;
  }
  if (theta0 > 0.0) {
    const double target = std::sqrt(b) * T * u / theta0;
    if (std::abs(weighted - target) > 1e-10 * (1.0 + std::abs(target))) {
      fail("per-frequency q does not decompose sqrt(b) T u / theta0");
    }
  }
  return problems;
}

void write_diagnostics(const TwoSampleTest& test, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_for_writing(dir / "cv_curve.csv");
    out << "b,score\n";
    if (test.cv_curve) {
      for (std::size_t i = 0; i < test.cv_curve->candidates.size(); ++i) {
        out << format_double(test.cv_curve->candidates[i]) << ','
            << format_double(test.cv_curve->scores[i]) << '\n';
      }
    }
  }
  {
    auto out = open_for_writing(dir / "q_curve.csv");
    out << "lambda,q\n";
    for (const auto& c : test.statistic.per_frequency_q) {
      out << format_double(c.lambda) << ',' << format_double(c.q) << '\n';
    }
  }
  if (test.bootstrap) {
    auto out = open_for_writing(dir / "bootstrap_replicates.csv");
    out << "replicate,t_star,t_plus\n";
    for (std::size_t i = 0; i < test.bootstrap->t_star.size(); ++i) {
      out << i << ',' << format_double(test.bootstrap->t_star[i]) << ','
          << format_double(test.bootstrap->t_plus[i]) << '\n';
    }
  }
}

json run(const RunConfig& config) {
  validate(config);
  const FunctionalSample x = ingest_csv(config.x_path, config.header);
  const FunctionalSample y = ingest_csv(config.y_path, config.header);
  if (x.length() != y.length() || x.grid_size() != y.grid_size()) {
    throw InputError("X and Y tables differ in shape");
  }
  if (!x.has_equidistant_grid()) {
    std::cerr << "warning: grid is not equidistant; grid averages are used "
                 "as [0,1] integrals regardless\n";
  }
  const TwoSampleTest test =
      run_two_sample_test(x, y, analysis_options(config));
  json report = make_report(test, config);
  if (!config.report_path.empty()) {
    if (config.report_path.has_parent_path()) {
      fs::create_directories(config.report_path.parent_path());
    }
    auto out = open_for_writing(config.report_path);
    out << report.dump(2) << '\n';
  }
  if (config.diagnostics_dir) write_diagnostics(test, *config.diagnostics_dir);
  return report;
}

SimulationPlan parse_simulation_plan(const std::string& text) {
  SimulationPlan plan;
  BootstrapOptions boot;
  boot.replicates = 1000;
  plan.analysis.bandwidth = 0.2;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("plan line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto integer = [&]() -> Index {
      const auto v = parse_double(value);
      if (!v || *v != std::floor(*v) || *v < 0) {
        throw InputError("plan key " + key + " needs a non-negative integer");
      }
      return static_cast<Index>(*v);
    };
    const auto number = [&]() {
      const auto v = parse_double(value);
      if (!v) throw InputError("plan key " + key + " needs a number");
      return *v;
    };

    if (key == "T") {
      plan.length = integer();
    } else if (key == "k") {
      plan.grid_size = integer();
    } else if (key == "a1") {
      plan.a1 = number();
    } else if (key == "a2") {
      plan.a2_values = parse_number_list(value);
    } else if (key == "bandwidth") {
      if (value == "cv") {
        plan.analysis.bandwidth.reset();
      } else {
        plan.analysis.bandwidth = number();
      }
    } else if (key == "cv_grid") {
      plan.analysis.cv_grid = parse_number_list(value);
    } else if (key == "kernel") {
      const auto name = parse_kernel_name(value);
      if (!name) throw InputError("unknown kernel '" + value + "'");
      plan.analysis.kernel = *name;
    } else if (key == "B") {
      boot.replicates = integer();
    } else if (key == "R") {
      plan.repetitions = integer();
    } else if (key == "alphas") {
      boot.alphas = parse_number_list(value);
    } else if (key == "seed") {
      const auto v = parse_double(value);
      if (!v || *v < 0 || *v != std::floor(*v)) {
        throw InputError("plan key seed needs a non-negative integer");
      }
      std::uint64_t seed = 0;
      const auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError("plan key seed needs a non-negative integer");
      }
      plan.seed = seed;
    } else if (key == "statistic") {
      const auto s = parse_statistic(value);
      if (!s) throw InputError("unknown statistic '" + value + "'");
      boot.statistic = *s;
    } else {
      throw InputError("unknown plan key '" + key + "'");
    }
  }

  if (boot.replicates < 99) throw InputError("plan needs B >= 99");
  if (plan.repetitions < 1) throw InputError("plan needs R >= 1");
  for (double a : boot.alphas) {
    if (!(a > 0.0 && a <= 0.5)) throw InputError("alphas must lie in (0, 0.5]");
  }
  if (plan.analysis.bandwidth &&
      !(*plan.analysis.bandwidth > 0.0 && *plan.analysis.bandwidth < 1.0)) {
    throw InputError("plan bandwidth must lie in (0,1)");
  }
  plan.analysis.bootstrap = boot;
  return plan;
}

SimulationPlan load_simulation_plan(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open plan " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_simulation_plan(text.str());
}

ExperimentPlan experiment_for_row(const SimulationPlan& plan, std::size_t row) {
  ExperimentPlan e;
  e.x = MaProcessSpec{{plan.a1, plan.a2_values.at(row)}, plan.length,
                      plan.grid_size};
  e.y = MaProcessSpec{{plan.a1}, plan.length, plan.grid_size};
  e.analysis = plan.analysis;
  e.repetitions = plan.repetitions;
  e.master_seed = derive_seed(plan.seed, "row", row);
  return e;
}

json run_simulation(const SimulationPlan& plan, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto& alphas = plan.analysis.bootstrap.value().alphas;

  auto rates = open_for_writing(out_dir / "rejection_rates.csv");
  auto errors = open_for_writing(out_dir / "standard_errors.csv");
  auto runs = open_for_writing(out_dir / "runs.csv");
  std::vector<double> sorted_alphas = alphas;
  std::sort(sorted_alphas.begin(), sorted_alphas.end());
  rates << "a2";
  errors << "a2";
  for (double a : sorted_alphas) {
    rates << ",alpha=" << format_double(a);
    errors << ",alpha=" << format_double(a);
  }
  rates << '\n';
  errors << '\n';
  runs << "a2,repetition,failed,t_stat,p_value,bandwidth\n";

  json summary;
  summary["schema_version"] = kReportSchemaVersion;
  summary["tool_version"] = kToolVersion;
  summary["T"] = plan.length;
  summary["k"] = plan.grid_size;
  summary["a1"] = plan.a1;
  summary["bandwidth"] = plan.analysis.bandwidth
                             ? json(*plan.analysis.bandwidth)
                             : json("cv");
  summary["kernel"] = std::string(to_string(plan.analysis.kernel));
  summary["B"] = plan.analysis.bootstrap->replicates;
  summary["R"] = plan.repetitions;
  summary["seed"] = plan.seed;
  summary["statistic"] =
      std::string(to_string(plan.analysis.bootstrap->statistic));
  summary["alphas"] = sorted_alphas;
  summary["rows"] = json::array();

  for (std::size_t row = 0; row < plan.a2_values.size(); ++row) {
    const double a2 = plan.a2_values[row];
    const ExperimentResult result = run_experiment(experiment_for_row(plan, row));
    rates << format_double(a2);
    errors << format_double(a2);
    json se = json::array();
    for (std::size_t a = 0; a < result.alphas.size(); ++a) {
      rates << ',' << format_double(result.rejection_rate[a]);
      errors << ','
             << (result.standard_error[a] ? format_double(*result.standard_error[a])
                                          : std::string("NA"));
      se.push_back(result.standard_error[a] ? json(*result.standard_error[a])
                                            : json(nullptr));
    }
    rates << '\n';
    errors << '\n';
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      const auto& run = result.runs[r];
      runs << format_double(a2) << ',' << r << ',' << (run.failed ? 1 : 0)
           << ',' << format_double(run.t_stat) << ','
           << format_double(run.p_value) << ','
           << format_double(run.bandwidth) << '\n';
    }
    summary["rows"].push_back({{"a2", a2},
                               {"rejection_rate", result.rejection_rate},
                               {"standard_error", se},
                               {"completed", result.completed},
                               {"failures", result.failures}});
  }
  auto out = open_for_writing(out_dir / "summary.json");
  out << summary.dump(2) << '\n';
  return summary;
}

}  // namespace specop
