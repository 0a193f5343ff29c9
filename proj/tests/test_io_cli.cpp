#include "mrta/cli.hpp"
#include "mrta/io.hpp"
#include "mrta/scenario_gen.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mrta;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mrta_tests_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario text round trip is exact") {
  GenParams g;
  g.seed = 42;
  const auto s = generate_scenario(g);
  const auto back = scenario_from_text(scenario_to_text(s));
  CHECK(back == s);
  CHECK(scenario_to_text(back) == scenario_to_text(s));
}

TEST_CASE("scenario parse errors") {
  CHECK_THROWS_AS(scenario_from_text("{"), ParseError);
  CHECK_THROWS_AS(scenario_from_text("[]"), ParseError);
  auto text = scenario_to_text(swap_scenario());
  const auto pos = text.find("\"dt\"");
  REQUIRE(pos != std::string::npos);
  CHECK_THROWS_AS(scenario_from_text(text.substr(0, pos) + "\"bogus\": 1, " + text.substr(pos)), ParseError);
  CHECK_THROWS_AS(read_scenario_file("/nonexistent/x.json"), ParseError);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("trace csv round trip") {
  const auto vs = validate_scenario(swap_scenario());
  auto c = config_from(vs.get());
  c.max_time = 0.5;
  const auto tr = run(vs, c);
  std::ostringstream a;
  write_trace_csv(a, tr);
  std::istringstream in(a.str());
  const auto back = read_trace_csv(in);
  CHECK(back.size() == tr.size());
  std::ostringstream b;
  write_trace_csv(b, back);
  CHECK(a.str() == b.str());
  std::istringstream bad("t,x0\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ParseError);
}

TEST_CASE("cost matrix reader") {
  std::istringstream ok("2\n1 2\n3 4\n");
  const auto c = read_cost_matrix(ok);
  CHECK(c(1, 0) == 3.0);
  std::ostringstream out;
  write_cost_matrix(out, c);
  std::istringstream again(out.str());
  CHECK(read_cost_matrix(again) == c);

  std::istringstream short_row("2\n1 2\n3\n");
  CHECK_THROWS_AS(read_cost_matrix(short_row), ParseError);
  std::istringstream junk("2\n1 x\n3 4\n");
  CHECK_THROWS_AS(read_cost_matrix(junk), ParseError);
  std::istringstream nan_entry("1\nnan\n");
  CHECK_THROWS(read_cost_matrix(nan_entry));
}

TEST_CASE("cli run exit codes") {
  const auto dir = scratch("run");
  write_scenario_file((dir / "swap.json").string(), swap_scenario());
  std::ostringstream out, err;

  cli::RunRequest req{(dir / "swap.json").string(), (dir / "ok").string(), {}};
  CHECK(cli::cmd_run(req, out, err) == cli::kConverged);
  CHECK(fs::exists(dir / "ok" / "trace.csv"));
  CHECK(fs::exists(dir / "ok" / "decisions.csv"));
  CHECK(slurp(dir / "ok" / "metrics.txt").find("CONVERGED") != std::string::npos);
  CHECK(slurp(dir / "ok" / "effective_config.txt").find("lr_law: nearest") != std::string::npos);

  req.out_dir = (dir / "nolr").string();
  req.overrides.disable_lr = true;
  CHECK(cli::cmd_run(req, out, err) == cli::kBreach);

  req.out_dir = (dir / "short").string();
  req.overrides = {};
  req.overrides.max_time = 0.5;
  CHECK(cli::cmd_run(req, out, err) == cli::kTimeout);

  auto bad = swap_scenario();
  bad.workspace_radius = 2.0;
  write_scenario_file((dir / "bad.json").string(), bad);
  std::ostringstream err2;
  req = {(dir / "bad.json").string(), (dir / "bad").string(), {}};
  CHECK(cli::cmd_run(req, out, err2) == cli::kInvalidInput);
  CHECK(err2.str().find("R_0") != std::string::npos);

  req = {(dir / "missing.json").string(), (dir / "m").string(), {}};
  CHECK(cli::cmd_run(req, out, err) == cli::kInvalidInput);

  req = {(dir / "swap.json").string(), (dir / "dt").string(), {}};
  req.overrides.dt = 0.1;  // lambda_max * dt = 1
  CHECK(cli::cmd_run(req, out, err) == cli::kInvalidInput);
}

TEST_CASE("cli gen and assign") {
  const auto dir = scratch("gen");
  GenParams g;
  g.seed = 5;
  std::ostringstream out, err;
  CHECK(cli::cmd_gen(g, (dir / "s.json").string(), out, err) == cli::kConverged);
  CHECK(read_scenario_file((dir / "s.json").string()) == generate_scenario(g));

  g.n_agents = 60;
  g.spawn_radius = 2.0;
  g.retry_budget = 1000;
  CHECK(cli::cmd_gen(g, (dir / "t.json").string(), out, err) == cli::kInvalidInput);

  {
    std::ofstream f(dir / "m.txt");
    f << "2\n1.4142135623730951 1\n1 1.4142135623730951\n";
  }
  std::ostringstream aout;
  CHECK(cli::cmd_assign((dir / "m.txt").string(), aout, err) == cli::kConverged);
  CHECK(aout.str().find("0→1 1→0") != std::string::npos);
  CHECK(aout.str().find("cost=2") != std::string::npos);
  {
    std::ofstream f(dir / "bad.txt");
    f << "2\n1 2 3\n";
  }
  CHECK(cli::cmd_assign((dir / "bad.txt").string(), aout, err) == cli::kInvalidInput);
}

TEST_CASE("cli batch writes a summary") {
  const auto dir = scratch("batch");
  cli::BatchRequest b;
  b.count = 2;
  b.gen.n_agents = 4;
  b.gen.seed = 10;
  b.workers = 2;
  b.out_dir = dir.string();
  std::ostringstream out, err;
  CHECK(cli::cmd_batch(b, out, err) == cli::kConverged);
  const auto summary = slurp(dir / "summary.csv");
  CHECK(summary.find("run_0,10,CONVERGED") != std::string::npos);
  CHECK(summary.find("run_1,11,CONVERGED") != std::string::npos);
}

TEST_CASE("cli argument errors map to invalid input") {
  const char* argv[] = {"mrta", "run", "--scenario", "x.json"};
  CHECK(cli::main_entry(4, const_cast<char**>(argv)) == cli::kInvalidInput);
  const char* argv2[] = {"mrta", "run", "--scenario", "x", "--out", "y", "--lr-law", "bogus"};
  CHECK(cli::main_entry(8, const_cast<char**>(argv2)) == cli::kInvalidInput);
}
