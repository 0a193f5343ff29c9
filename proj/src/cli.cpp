#include "mrta/cli.hpp"

#include "mrta/assignment.hpp"
#include "mrta/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace mrta::cli {

std::pair<Scenario, SimConfig> effective_setup(Scenario s, const Overrides& o) {
  if (o.dt) s.dt = *o.dt;
  if (o.max_time) s.max_time = *o.max_time;
  if (o.aggregation_power) s.aggregation_power = *o.aggregation_power;
  if (o.q_band) s.q_band = *o.q_band;
  SimConfig c = config_from(s);
  if (o.seed) c.seed = *o.seed;
  if (o.convergence_tol) c.convergence_tol = *o.convergence_tol;
  if (o.min_dwell_steps) c.min_dwell_steps = *o.min_dwell_steps;
  if (o.min_oga_dwell_steps) c.min_oga_dwell_steps = *o.min_oga_dwell_steps;
  if (o.lr_cap_length) c.lr_cap_length = *o.lr_cap_length;
  c.supervisor_enabled = !o.disable_lr;
  c.lr_law = o.lr_law;
  c.integrator = o.integrator;
  c.neighbor_velocity = o.neighbor_velocity;
  validate_scenario(s);
  validate_config(c, s);
  return {std::move(s), c};
}

int exit_code_for(Termination t) {
  switch (t) {
    case Termination::Converged: return kConverged;
    case Termination::Breach: return kBreach;
    case Termination::Timeout: return kTimeout;
    case Termination::Running: break;
  }
  return kInternalError;
}

namespace {

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw std::invalid_argument("output directory is required");
  fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

const char* law_name(LrLaw l) {
  switch (l) {
    case LrLaw::Componentwise: return "componentwise";
    case LrLaw::Projected: return "projected";
    case LrLaw::NearestToOga: return "nearest";
  }
  return "?";
}

void write_config(std::ostream& os, const SimConfig& c) {
  os << "dt: " << format_double(c.dt) << '\n'
     << "max_time: " << format_double(c.max_time) << '\n'
     << "convergence_tol: " << format_double(c.convergence_tol) << '\n'
     << "integrator: " << (c.integrator == Integrator::Euler ? "euler" : "rk4-frozen") << '\n'
     << "supervisor: " << (c.supervisor_enabled ? "on" : "off") << '\n'
     << "lr_law: " << law_name(c.lr_law) << '\n'
     << "lr_cap_length: " << format_double(c.lr_cap_length) << '\n'
     << "min_dwell_steps: " << c.min_dwell_steps << '\n'
     << "min_oga_dwell_steps: " << c.min_oga_dwell_steps << '\n'
     << "neighbor_velocity: "
     << (c.neighbor_velocity == NeighborVelocity::PreviousCommand ? "previous" : "oga") << '\n'
     << "seed: " << c.seed << '\n';
}

struct RunOutcome {
  SimTrace trace;
  Metrics m;
};

RunOutcome run_and_write(const Scenario& s, const SimConfig& c, const std::string& out_dir) {
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  const ValidatedScenario vs = validate_scenario(s);
  write_scenario_file((dir / "effective_scenario.json").string(), s);
  {
    auto f = open_out(dir / "effective_config.txt");
    write_config(f, c);
  }
  RunOutcome r{run(vs, c), {}};
  r.m = metrics(r.trace);
  {
    auto f = open_out(dir / "trace.csv");
    write_trace_csv(f, r.trace);
  }
  {
    auto f = open_out(dir / "decisions.csv");
    write_decisions_csv(f, r.trace);
  }
  {
    auto f = open_out(dir / "metrics.txt");
    write_metrics(f, r.trace, r.m);
  }
  return r;
}

}  // namespace

int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err) {
  Scenario s;
  SimConfig c;
  try {
    std::tie(s, c) = effective_setup(read_scenario_file(req.scenario_path), req.overrides);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ValidationError& e) {
    err << "error: invalid scenario: " << e.what() << '\n';
    return kInvalidInput;
  }
  try {
    const RunOutcome r = run_and_write(s, c, req.out_dir);
    write_metrics(out, r.trace, r.m);
    return exit_code_for(r.trace.termination);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

int cmd_gen(const GenParams& params, const std::string& out_path, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = generate_scenario(params);
  } catch (const GenerationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return cmd_gen_scenario(s, out_path, out, err);
}

int cmd_gen_scenario(const Scenario& s, const std::string& out_path, std::ostream& out, std::ostream& err) {
  try {
    validate_scenario(s);
    if (out_path.empty() || out_path == "-") {
      out << scenario_to_text(s);
    } else {
      if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
      write_scenario_file(out_path, s);
      out << "wrote " << out_path << '\n';
    }
    return kConverged;
  } catch (const ValidationError& e) {
    err << "error: invalid scenario: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

int cmd_assign(const std::string& matrix_path, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(matrix_path);
    if (!in) throw ParseError("cannot open '" + matrix_path + "'");
    const CostMatrix c = read_cost_matrix(in);
    const AssignmentResult r = solve_hungarian(c);
    for (std::size_t i = 0; i < r.perm.size(); ++i) out << i << "→" << r.perm[i] << ' ';
    out << "cost=" << format_double(r.total_cost) << '\n';
    return kConverged;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

std::vector<BenchRow> bench_hungarian(const std::vector<std::size_t>& sizes, std::size_t repeats,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    std::vector<double> times;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
      CostMatrix c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = unit(rng);
      const auto t0 = std::chrono::steady_clock::now();
      const AssignmentResult res = solve_hungarian(c);
      const auto t1 = std::chrono::steady_clock::now();
      if (res.perm.size() != n) throw std::logic_error("bench: solver returned wrong size");
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    BenchRow row;
    row.n = n;
    row.mean_s = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    std::sort(times.begin(), times.end());
    const std::size_t h = times.size() / 2;
    row.median_s = times.size() % 2 ? times[h] : 0.5 * (times[h - 1] + times[h]);
    rows.push_back(row);
  }
  return rows;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
  for (std::size_t n : sizes)
    if (n < 2) {
      err << "error: bench sizes must be >= 2\n";
      return kInvalidInput;
    }
  const auto rows = bench_hungarian(sizes, repeats, seed);
  std::ostringstream table;
  table << "n mean_s median_s\n";
  for (const auto& r : rows)
    table << r.n << ' ' << format_double(r.mean_s) << ' ' << format_double(r.median_s) << '\n';
  out << table.str();
  if (!out_dir.empty()) {
    try {
      ensure_dir(out_dir);
      auto f = open_out(fs::path(out_dir) / "bench.txt");
      f << table.str();
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kInternalError;
    }
  }
  return kConverged;
}

int cmd_batch(const BatchRequest& req, std::ostream& out, std::ostream& err) {
  struct Job {
    std::string label;
    std::uint64_t seed = 0;
    Scenario scenario;
    SimConfig config;
  };
  std::vector<Job> jobs;
  try {
    if (!req.scenario_paths.empty()) {
      for (std::size_t k = 0; k < req.scenario_paths.size(); ++k) {
        auto [s, c] = effective_setup(read_scenario_file(req.scenario_paths[k]), req.overrides);
        jobs.push_back({"run_" + std::to_string(k), c.seed, std::move(s), c});
      }
    } else {
      for (std::size_t k = 0; k < req.count; ++k) {
        GenParams g = req.gen;
        g.seed = req.gen.seed + k;
        Overrides o = req.overrides;
        if (!o.seed) o.seed = g.seed;
        auto [s, c] = effective_setup(generate_scenario(g), o);
        jobs.push_back({"run_" + std::to_string(k), g.seed, std::move(s), c});
      }
    }
    ensure_dir(req.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  std::vector<int> codes(jobs.size(), kInternalError);
  std::vector<std::string> lines(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& j = jobs[k];
      try {
        const RunOutcome r = run_and_write(j.scenario, j.config, (fs::path(req.out_dir) / j.label).string());
        codes[k] = exit_code_for(r.trace.termination);
        std::ostringstream ss;
        ss << j.label << ',' << j.seed << ',' << to_string(r.trace.termination) << ','
           << format_double(r.trace.times.back()) << ',' << format_double(r.m.min_clearance) << ','
           << format_double(r.m.lr_fraction) << ',' << r.m.decision_count;
        lines[k] = ss.str();
      } catch (const std::exception& e) {
        lines[k] = j.label + ',' + std::to_string(j.seed) + ",ERROR,,,,";
      }
    }
  };
  const std::size_t nworkers = std::clamp<std::size_t>(req.workers, 1, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < nworkers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream summary;
  summary << "run,seed,termination,final_time,min_clearance,lr_fraction,decisions\n";
  for (const auto& l : lines) summary << l << '\n';
  out << summary.str();
  try {
    auto f = open_out(fs::path(req.out_dir) / "summary.csv");
    f << summary.str();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  int worst = kConverged;
  for (int c : codes) worst = std::max(worst, c == kConverged ? 0 : c);
  return worst;
}

namespace {

// Raw option values shared by run and batch.
struct OverrideArgs {
  std::optional<double> dt, tmax, agg, eps, tol, cap;
  std::optional<std::size_t> dwell, oga_dwell;
  std::optional<std::uint64_t> seed;
  std::string law = "nearest", integ = "euler", nbv = "previous";
  bool no_lr = false;

  Overrides finish() const {
    Overrides ov;
    ov.dt = dt;
    ov.max_time = tmax;
    ov.aggregation_power = agg;
    ov.q_band = eps;
    ov.seed = seed;
    ov.convergence_tol = tol;
    ov.min_dwell_steps = dwell;
    ov.min_oga_dwell_steps = oga_dwell;
    ov.lr_cap_length = cap;
    ov.disable_lr = no_lr;
    ov.lr_law = law == "projected"       ? LrLaw::Projected
                : law == "componentwise" ? LrLaw::Componentwise
                                         : LrLaw::NearestToOga;
    ov.integrator = integ == "rk4-frozen" ? Integrator::Rk4FrozenInputs : Integrator::Euler;
    ov.neighbor_velocity = nbv == "oga" ? NeighborVelocity::OgaCommand : NeighborVelocity::PreviousCommand;
    return ov;
  }
};

void add_overrides(CLI::App* app, OverrideArgs& a, bool with_seed) {
  app->add_option("--dt", a.dt, "integration step [s]");
  app->add_option("--max-time", a.tmax, "simulated time limit [s]");
  app->add_option("--delta-aggregation", a.agg, "aggregation power delta >= 1");
  app->add_option("--eps-q", a.eps, "hysteresis half-width on the supervisor surface");
  if (with_seed) app->add_option("--seed", a.seed, "seed recorded with the run");
  app->add_option("--tol", a.tol, "convergence tolerance [m]");
  app->add_flag("--no-lr", a.no_lr, "pin every agent to the OGA law");
  app->add_option("--lr-law", a.law, "nearest | componentwise | projected")
      ->check(CLI::IsMember({"nearest", "componentwise", "projected"}));
  app->add_option("--lr-cap-length", a.cap, "LR speed limit is lambda_i times this [m]; 0 disables")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--dwell-steps", a.dwell, "minimum steps in LR before leaving it");
  app->add_option("--oga-dwell-steps", a.oga_dwell, "minimum steps in OGA after leaving LR");
  app->add_option("--integrator", a.integ, "euler | rk4-frozen")->check(CLI::IsMember({"euler", "rk4-frozen"}));
  app->add_option("--neighbor-velocity", a.nbv, "previous | oga")->check(CLI::IsMember({"previous", "oga"}));
}

void add_gen_options(CLI::App* app, GenParams& gp) {
  app->add_option("--robot-radius", gp.robot_radius, "R; Delta = 2R, R_c = 5R");
  app->add_option("--workspace-radius", gp.workspace_radius, "R_0");
  app->add_option("--spawn-radius", gp.spawn_radius, "starts and goals are drawn inside this disc");
  app->add_option("--spacing", gp.spacing, "minimum point spacing in units of Delta");
  app->add_option("--goal-spacing", gp.goal_spacing, "minimum goal spacing in units of Delta");
  app->add_option("--path-clearance", gp.path_clearance,
                  "optimal paths keep this far from other goals, in units of Delta");
  app->add_option("--lambda", gp.lambda, "OGA gain");
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Decentralized goal assignment and collision-safe trajectories for planar robot teams"};
  app.require_subcommand(1);

  OverrideArgs run_args;
  RunRequest run_req;
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario file");
  run_cmd->add_option("--scenario", run_req.scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", run_req.out_dir, "output directory")->required();
  add_overrides(run_cmd, run_args, true);

  GenParams gp;
  std::string gen_out = "-";
  auto* gen_cmd = app.add_subcommand("gen", "write a random scenario");
  gen_cmd->add_option("--agents,-n", gp.n_agents, "number of agents")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gp.seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output file ('-' for stdout)");
  bool gen_swap = false;
  gen_cmd->add_flag("--swap", gen_swap, "write the fixed two-robot goal swap scenario instead");
  add_gen_options(gen_cmd, gp);
  gen_cmd->add_option("--dt", gp.dt, "integration step [s]");
  gen_cmd->add_option("--max-time", gp.max_time, "simulated time limit [s]");

  std::string matrix_path;
  auto* assign_cmd = app.add_subcommand("assign", "solve an assignment problem from a cost-matrix file");
  assign_cmd->add_option("matrix", matrix_path, "cost matrix file")->required();

  std::vector<std::size_t> sizes{50, 100, 200};
  std::size_t repeats = 5;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "time the Hungarian solver on random matrices");
  bench_cmd->add_option("--sizes", sizes, "matrix sizes")->delimiter(',');
  bench_cmd->add_option("--repeats", repeats, "solves per size");
  bench_cmd->add_option("--seed", bench_seed, "matrix generator seed");
  bench_cmd->add_option("--out", bench_out, "directory for bench.txt");

  BatchRequest batch;
  batch.count = 10;
  OverrideArgs batch_args;
  auto* batch_cmd = app.add_subcommand("batch", "run many scenarios, optionally in parallel");
  batch_cmd->add_option("--scenario", batch.scenario_paths, "scenario files (omit to generate)");
  batch_cmd->add_option("--count", batch.count, "generated scenario count");
  batch_cmd->add_option("--agents,-n", batch.gen.n_agents, "agents per generated scenario");
  batch_cmd->add_option("--seed", batch.gen.seed, "first generator seed");
  batch_cmd->add_option("--workers", batch.workers, "parallel workers");
  batch_cmd->add_option("--out", batch.out_dir, "output directory")->required();
  add_gen_options(batch_cmd, batch.gen);
  add_overrides(batch_cmd, batch_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kConverged : kInvalidInput;
  }

  if (*run_cmd) {
    run_req.overrides = run_args.finish();
    return cmd_run(run_req, std::cout, std::cerr);
  }
  if (*gen_cmd) return gen_swap ? cmd_gen_scenario(swap_scenario(), gen_out, std::cout, std::cerr)
                                : cmd_gen(gp, gen_out, std::cout, std::cerr);
  if (*assign_cmd) return cmd_assign(matrix_path, std::cout, std::cerr);
  if (*bench_cmd) return cmd_bench(sizes, repeats, bench_seed, bench_out, std::cout, std::cerr);
  if (*batch_cmd) {
    batch.overrides = batch_args.finish();
    return cmd_batch(batch, std::cout, std::cerr);
  }
  return kInvalidInput;
}

}  // namespace mrta::cli
