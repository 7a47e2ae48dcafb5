#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "uip/commands.hpp"
#include "uip/config.hpp"

using namespace uip;

namespace {

struct Run {
  int code;
  std::string csv;
  std::string log;
};

Run run(const std::string& command, const ExperimentConfig& cfg) {
  std::ostringstream csv, log;
  CommandContext ctx{csv, log, true};
  const int code = run_command(command, cfg, ctx);
  return {code, csv.str(), log.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream cell_in(line);
    std::string cell;
    while (std::getline(cell_in, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

const char* kTwoDim = R"(
# two assets
model.d = 2
model.s0 = 1, 2
model.mu = 0.1, 0
model.sigma = 1, 0.2, 0.2, 0.5
model.T = 0.5
payoff.kind = straddle
payoff.a = 1, -1
payoff.b = 0.25
impact.A = 2
impact.lambda = 0.3, 0.1
impact.phi0 = 0.5, 0
numerics.seed = 7
numerics.n_steps = 120
price.x = 1, 2; 1.5, 1.5
dual.specs = zero, random:3
dual.constant = 0.1, 0.1
)";

}  // namespace

TEST_CASE("config round-trip") {
  const ExperimentConfig a = parse_config(kTwoDim);
  CHECK(a.d == 2);
  CHECK(a.price_points.size() == 2);
  CHECK(a.n_steps == 120);
  const std::string text = emit_config(a);
  const ExperimentConfig b = parse_config(text);
  CHECK(emit_config(b) == text);
  CHECK(config_hash(a) == config_hash(b));
  const ExperimentConfig defaults;
  CHECK(emit_config(parse_config(emit_config(defaults))) == emit_config(defaults));
}

TEST_CASE("config diagnostics") {
  auto code = [](const std::string& text) { return error_code_of([&] { parse_config(text); }); };
  CHECK(code("numerics.seed = 1\nmodel.bogus = 3\n") == ErrorCode::Config);
  CHECK(code("model.T = 1\n") == ErrorCode::Config);  // no seed
  CHECK(code("numerics.seed = 1\nmodel.T = abc\n") == ErrorCode::Config);
  CHECK(code("numerics.seed = 1\nmodel.T = 1\nmodel.T = 2\n") == ErrorCode::Config);
  CHECK(code("numerics.seed = 1\nmodel.s0 = 1, 2\n") == ErrorCode::Config);
  CHECK(code("numerics.seed = 1\nmodel.sigma = -1\n") == ErrorCode::NotPositiveDefinite);
  try {
    parse_config("numerics.seed = 1\n\nimpact.lambdas = 0.1\n");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("impact.lambdas") != std::string::npos);
  }
}

TEST_CASE("worker count is not part of the configuration identity") {
  ExperimentConfig a;
  ExperimentConfig b;
  b.workers = 8;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("price command") {
  ExperimentConfig cfg;
  cfg.A_grid = {0.25, 1.0, 4.0};
  const Run r = run("price", cfg);
  REQUIRE(r.code == 0);
  const auto table = rows(r.csv);
  REQUIRE(table.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double A = std::stod(table[i][0]);
    CHECK(std::stod(table[i][3]) == doctest::Approx(oracle::call_unit(0.5 * std::sqrt(A))).epsilon(1e-8));
    CHECK(std::abs(std::stod(table[i][5])) <= 1e-3);
  }
  cfg.payoff_kind = "zero";
  for (const auto& row : rows(run("price", cfg).csv)) CHECK(std::stod(row[3]) == 0.0);
}

TEST_CASE("figure command") {
  ExperimentConfig cfg;
  cfg.A_grid = {1e-14, 0.5, 1.0, 2.0};
  const auto table = rows(run("figure", cfg).csv);
  REQUIRE(table.size() == 4);
  CHECK(std::stod(table[0][1]) == doctest::Approx(0.3989423).epsilon(1e-6));
  CHECK(std::stod(table[2][1]) == doctest::Approx(0.6977965).epsilon(1e-7));
  for (std::size_t i = 1; i < table.size(); ++i) CHECK(std::stod(table[i][1]) > std::stod(table[i - 1][1]));
}

TEST_CASE("converge command on the zero payoff") {
  ExperimentConfig cfg;
  cfg.payoff_kind = "zero";
  cfg.n_paths = 200;
  const Run r = run("converge", cfg);
  REQUIRE(r.code == 0);
  CHECK(r.csv.find("# n_steps[lambda=0.05]=1000") != std::string::npos);
  for (const auto& row : rows(r.csv)) CHECK(std::stod(row[2]) == 0.0);
}

TEST_CASE("dual command") {
  ExperimentConfig cfg;
  cfg.payoff_kind = "zero";
  cfg.dual_specs = {"zero", "constant"};
  const auto table = rows(run("dual", cfg).csv);
  REQUIRE(table.size() == 2);
  CHECK(std::stod(table[0][1]) == 0.0);
  CHECK(std::stod(table[1][1]) <= 0.0);
  ExperimentConfig call;
  call.dual_specs = {"zero", "optimal"};
  const auto t2 = rows(run("dual", call).csv);
  CHECK(std::stod(t2[0][1]) == doctest::Approx(0.3989423).epsilon(1e-6));
  CHECK(std::stod(t2[1][1]) == doctest::Approx(0.6977965).epsilon(1e-5));
}

TEST_CASE("two-dimensional generic config runs every command") {
  // Generic payoffs price by quadrature over a searched sup-convolution;
  // keep the rule and the grids small.
  ExperimentConfig cfg = parse_config(kTwoDim);
  cfg.n_paths = 4;
  cfg.n_steps = 10;
  cfg.quadrature = "hermite";
  cfg.quad_m = 6;
  cfg.A_grid = {0.5, 2.0};
  for (const char* cmd : {"price", "figure", "hedge", "converge", "dual"}) {
    const Run r = run(cmd, cfg);
    CHECK_MESSAGE(r.code == 0, cmd << ": " << r.log);
  }
}

TEST_CASE("check command and exit codes") {
  ExperimentConfig cfg;
  cfg.n_paths = 500;
  const Run ok = run("check", cfg);
  CHECK(ok.code == 0);
  CHECK(ok.csv.find("FAIL") == std::string::npos);
  cfg.lambdas = {0.2, 0.01};
  cfg.n_paths = 50;
  const Run warned = run("check", cfg);
  CHECK(warned.log.find("below the floor") != std::string::npos);
  CHECK(run("nonsense", cfg).code == 1);
}

TEST_CASE("csv formatting") {
  CHECK(format_number(0.69779655743, 9) == "0.697796557");
  CHECK(format_number(1e-20, 9) == "1e-20");
  std::ostringstream out;
  CsvWriter csv(out, 4);
  csv.meta("k", "v");
  csv.header({"a", "b"});
  csv.cell(1.23456).cell(std::size_t{3});
  csv.end_row();
  CHECK(out.str() == "# k=v\na,b\n1.235,3\n");
}
