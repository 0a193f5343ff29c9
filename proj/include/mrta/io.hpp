#pragma once

#include "mrta/assignment.hpp"
#include "mrta/core.hpp"
#include "mrta/sim.hpp"
#include "mrta/trace.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace mrta {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Scenario files are JSON objects whose keys are exactly the Scenario fields.
std::string scenario_to_text(const Scenario& s);
Scenario scenario_from_text(const std::string& text);
Scenario read_scenario_file(const std::string& path);
void write_scenario_file(const std::string& path, const Scenario& s);

// Columns: t, then x<i>,y<i>,mode<i>,goal<i> per agent, then V_total,min_clearance.
void write_trace_csv(std::ostream& os, const SimTrace& trace);
SimTrace read_trace_csv(std::istream& is);

// Columns: t,members,old_cost,new_cost,changed (members space-separated).
void write_decisions_csv(std::ostream& os, const SimTrace& trace);

void write_metrics(std::ostream& os, const SimTrace& trace, const Metrics& m);

// First line n, then n rows of n whitespace-separated numbers.
CostMatrix read_cost_matrix(std::istream& is);
void write_cost_matrix(std::ostream& os, const CostMatrix& c);

}  // namespace mrta
