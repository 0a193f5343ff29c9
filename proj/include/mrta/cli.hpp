#pragma once

#include "mrta/scenario_gen.hpp"
#include "mrta/sim.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrta::cli {

// Process exit codes.
enum ExitCode : int {
  kConverged = 0,
  kInternalError = 1,
  kInvalidInput = 2,
  kBreach = 3,
  kTimeout = 4,
};

struct Overrides {
  std::optional<double> dt;
  std::optional<double> max_time;
  std::optional<double> aggregation_power;
  std::optional<double> q_band;
  std::optional<std::uint64_t> seed;
  std::optional<double> convergence_tol;
  std::optional<std::size_t> min_dwell_steps;
  std::optional<std::size_t> min_oga_dwell_steps;
  std::optional<double> lr_cap_length;
  bool disable_lr = false;
  LrLaw lr_law = LrLaw::NearestToOga;
  Integrator integrator = Integrator::Euler;
  NeighborVelocity neighbor_velocity = NeighborVelocity::PreviousCommand;
};

struct RunRequest {
  std::string scenario_path;
  std::string out_dir;
  Overrides overrides;
};

/// Applies overrides (file < command line) and validates the merged result.
std::pair<Scenario, SimConfig> effective_setup(Scenario s, const Overrides& o);

int exit_code_for(Termination t);

/// Writes trace.csv, decisions.csv, metrics.txt and effective_scenario.json.
int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err);

int cmd_gen(const GenParams& params, const std::string& out_path, std::ostream& out, std::ostream& err);
int cmd_gen_scenario(const Scenario& s, const std::string& out_path, std::ostream& out, std::ostream& err);

int cmd_assign(const std::string& matrix_path, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::size_t n = 0;
  double mean_s = 0.0;
  double median_s = 0.0;
};

std::vector<BenchRow> bench_hungarian(const std::vector<std::size_t>& sizes, std::size_t repeats,
                                      std::uint64_t seed);

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t repeats, std::uint64_t seed,
              const std::string& out_dir, std::ostream& out, std::ostream& err);

struct BatchRequest {
  std::vector<std::string> scenario_paths;  // if empty, scenarios are generated
  GenParams gen;                            // gen.seed is the first seed
  std::size_t count = 0;
  std::size_t workers = 1;
  std::string out_dir;
  Overrides overrides;
};

int cmd_batch(const BatchRequest& req, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int main_entry(int argc, char** argv);

}  // namespace mrta::cli
