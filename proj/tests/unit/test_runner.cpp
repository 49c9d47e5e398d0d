#include "specop/error.hpp"
#include "specop/runner.hpp"
#include "specop/simulation.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace specop;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("specop_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_matrix(const fs::path& path, const RealMatrix& m,
                  const std::vector<double>* header = nullptr) {
  std::ofstream out(path);
  out.precision(17);
  if (header) {
    for (std::size_t i = 0; i < header->size(); ++i) out << (i ? "," : "") << (*header)[i];
    out << '\n';
  }
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv_body(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

RunConfig small_config(const fs::path& dir) {
  RunConfig c;
  c.x_path = dir / "x.csv";
  c.y_path = dir / "y.csv";
  c.report_path = dir / "report.json";
  c.bandwidth = 0.2;
  c.replicates = 199;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("CSV ingest") {
  const auto dir = scratch_dir("csv");
  const RealMatrix m = oracle::random_matrix(10, 3, 1);
  const std::vector<double> header = {0.0, 0.5, 1.0};
  write_matrix(dir / "h.csv", m, &header);
  const auto with_header = ingest_csv(dir / "h.csv");
  CHECK(with_header.grid() == header);
  CHECK(with_header.length() == 10);
  CHECK((with_header.values() - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ingest_csv(dir / "h.csv", HeaderMode::absent).length() == 11);

  write_matrix(dir / "plain.csv", m);
  const auto plain = ingest_csv(dir / "plain.csv");
  CHECK(plain.length() == 10);
  CHECK(plain.grid() == uniform_grid(3));

  write_matrix(dir / "wide.csv", oracle::random_matrix(92, 96, 2));
  const auto wide = ingest_csv(dir / "wide.csv");
  CHECK(wide.length() == 92);
  CHECK(wide.grid_size() == 96);

  write_matrix(dir / "tiny.csv", oracle::random_matrix(3, 2, 3));
  CHECK_THROWS_AS(ingest_csv(dir / "tiny.csv"), InputError);

  std::ofstream(dir / "ragged.csv") << "1,2,3\n4,5\n6,7,8\n9,10,11\n1,2,3\n";
  CHECK_THROWS_AS(ingest_csv(dir / "ragged.csv"), InputError);
  std::ofstream(dir / "junk.csv") << "1,2\n3,x\n5,6\n7,8\n9,1\n";
  CHECK_THROWS_AS(ingest_csv(dir / "junk.csv"), InputError);
  std::ofstream(dir / "nan.csv") << "1,2\n3,nan\n5,6\n7,8\n9,1\n";
  CHECK_THROWS_AS(ingest_csv(dir / "nan.csv"), InputError);
  CHECK_THROWS_AS(ingest_csv(dir / "missing.csv"), InputError);
}

TEST_CASE("run configuration validation") {
  RunConfig c = small_config(scratch_dir("cfg"));
  CHECK_NOTHROW(validate(c));
  c.replicates = 50;
  CHECK_THROWS_AS(validate(c), InputError);
  c.replicates = 199;
  c.alphas = {0.6};
  CHECK_THROWS_AS(validate(c), InputError);
  c.alphas = {0.05};
  c.bandwidth = 1.2;
  CHECK_THROWS_AS(validate(c), InputError);
  CHECK(parse_number_list("0.1, 0.2,0.3") == std::vector<double>{0.1, 0.2, 0.3});
  CHECK_THROWS_AS(parse_number_list("0.1,abc"), InputError);
}

TEST_CASE("report round trip and determinism") {
  const auto dir = scratch_dir("report");
  Rng rng(3);
  write_matrix(dir / "x.csv", generate_ma({{0.8, 1.0}, 60, 11}, rng).values());
  write_matrix(dir / "y.csv", generate_ma({{0.8}, 60, 11}, rng).values());
  RunConfig c = small_config(dir);
  c.diagnostics_dir = dir / "diag";

  const auto report = run(c);
  CHECK(validate_report(report).empty());
  const auto reread = nlohmann::json::parse(slurp(c.report_path));
  CHECK(reread == report);
  CHECK(validate_report(reread).empty());
  CHECK(reread["schema_version"] == kReportSchemaVersion);
  CHECK(reread["T"] == 60);
  CHECK(reread["k"] == 11);
  CHECK(reread["bandwidth_source"] == "fixed");

  const std::string first = slurp(c.report_path);
  run(c);
  CHECK(slurp(c.report_path) == first);

  auto broken = report;
  broken["t_stat"] = report["t_stat"].get<double>() + 1.0;
  CHECK(!validate_report(broken).empty());

  const auto q = read_csv_body(dir / "diag" / "q_curve.csv");
  CHECK(q.size() == 30);
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) sum += q_weight(static_cast<Index>(j)) * q[j][1];
  const double target = std::sqrt(0.2) * 60.0 * report["u_stat"].get<double>() /
                        report["theta0_hat"].get<double>();
  CHECK(std::abs(sum - target) < 1e-9 * (1.0 + target));
  CHECK(read_csv_body(dir / "diag" / "bootstrap_replicates.csv").size() == 199);
  CHECK(fs::exists(dir / "diag" / "cv_curve.csv"));

  c.bandwidth.reset();
  c.cv_grid = {0.1, 0.2, 0.4};
  const auto cv = run(c);
  CHECK(cv["bandwidth_source"] == "cv");
  CHECK(cv["cv_curve"].size() == 3);
  CHECK(cv["cv_curve"][1]["b"] == 0.2);
  CHECK(validate_report(cv).empty());
  CHECK(read_csv_body(dir / "diag" / "cv_curve.csv").size() == 3);
}

TEST_CASE("identical inputs are never rejected") {
  const auto dir = scratch_dir("same");
  Rng rng(4);
  const RealMatrix v = generate_ma({{0.8}, 50, 9}, rng).values();
  write_matrix(dir / "x.csv", v);
  write_matrix(dir / "y.csv", v);
  for (auto stat : {BootstrapStatistic::t_star, BootstrapStatistic::t_plus}) {
    RunConfig c = small_config(dir);
    c.statistic = stat;
    const auto report = run(c);
    CHECK(report["u_stat"].get<double>() == 0.0);
    CHECK(report["p_value"].get<double>() == 1.0);
    for (const auto& d : report["decisions"]) CHECK(!d["reject"].get<bool>());
  }
}

TEST_CASE("simulation plan parsing") {
  const auto plan = parse_simulation_plan(
      "# size and power\n"
      "T = 120\nk = 15\na1 = 0.5\na2 = 0, 0.5\n"
      "bandwidth = cv\ncv_grid = 0.1,0.2\nkernel = uniform-pi\n"
      "B = 199\nR = 20\nalphas = 0.05\nseed = 9\nstatistic = t_plus\n");
  CHECK(plan.length == 120);
  CHECK(plan.grid_size == 15);
  CHECK(plan.a1 == 0.5);
  CHECK(plan.a2_values == std::vector<double>{0.0, 0.5});
  CHECK(!plan.analysis.bandwidth);
  CHECK(plan.analysis.cv_grid == std::vector<double>{0.1, 0.2});
  CHECK(plan.analysis.kernel == KernelName::uniform_pi);
  CHECK(plan.analysis.bootstrap->replicates == 199);
  CHECK(plan.analysis.bootstrap->statistic == BootstrapStatistic::t_plus);
  CHECK(plan.repetitions == 20);
  CHECK(plan.seed == 9);

  const auto row = experiment_for_row(plan, 1);
  CHECK(row.x.coefficients == std::vector<double>{0.5, 0.5});
  CHECK(row.y.coefficients == std::vector<double>{0.5});
  CHECK(experiment_for_row(plan, 0).master_seed != row.master_seed);

  CHECK(*parse_simulation_plan("").analysis.bandwidth == 0.2);
  CHECK_THROWS_AS(parse_simulation_plan("colour = blue\n"), InputError);
  CHECK_THROWS_AS(parse_simulation_plan("T = ten\n"), InputError);
}

TEST_CASE("simulation output files") {
  const auto dir = scratch_dir("sim");
  const auto plan = parse_simulation_plan("T = 30\nk = 5\na2 = 0, 1\nB = 99\nR = 3\nalphas = 0.05, 0.1\n");
  const auto summary = run_simulation(plan, dir);
  CHECK(summary["rows"].size() == 2);
  for (const char* f : {"rejection_rates.csv", "standard_errors.csv", "runs.csv", "summary.json"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(read_csv_body(dir / "rejection_rates.csv").size() == 2);
  CHECK(read_csv_body(dir / "runs.csv").size() == 6);
}

TEST_CASE("asymptotic decisions skip the bootstrap") {
  const auto dir = scratch_dir("asym");
  Rng rng(6);
  write_matrix(dir / "x.csv", generate_ma({{0.8, 1.0}, 80, 9}, rng).values());
  write_matrix(dir / "y.csv", generate_ma({{0.8}, 80, 9}, rng).values());
  RunConfig c = small_config(dir);
  c.asymptotic = true;
  c.replicates = 0;
  c.alphas = {0.10, 0.05};
  c.diagnostics_dir = dir / "diag";
  const auto report = run(c);
  CHECK(validate_report(report).empty());
  CHECK(report["decision_basis"] == "asymptotic");
  CHECK(report["bootstrap_replicates"].is_null());
  CHECK(report["critical_values"][0]["value"].get<double>() ==
        doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK(report["critical_values"][1]["value"].get<double>() ==
        doctest::Approx(1.2815515655446004).epsilon(1e-12));
  const double t = report["t_stat"].get<double>();
  CHECK(report["p_value"].get<double>() ==
        doctest::Approx(0.5 * std::erfc(t / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(!fs::exists(dir / "diag" / "bootstrap_replicates.csv"));
}
