#include "mrta/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

namespace mrta {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

void require_keys(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [k, _] : j.items())
    if (!keys.count(k)) throw ParseError(where + ": unknown field '" + k + "'");
  for (const auto& k : keys)
    if (!j.contains(k)) throw ParseError(where + ": missing field '" + k + "'");
}

double num(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError("field '" + field + "' must be a number");
  return j.get<double>();
}

std::size_t index(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) throw ParseError("field '" + field + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

Vec2 vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw ParseError("field '" + field + "' must be a [x, y] pair");
  return {num(j[0], field), num(j[1], field)};
}

const std::set<std::string> kScenarioKeys = {
    "agents",         "goals",        "comm_range",        "comm_band", "min_separation",
    "workspace_center", "workspace_radius", "aggregation_power", "lr_gains",  "q_band",
    "grad_floor",     "dt",           "max_time"};
const std::set<std::string> kAgentKeys = {"id", "position", "goal_index", "mode", "lambda", "last_velocity"};

}  // namespace

std::string scenario_to_text(const Scenario& s) {
  json j;
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    j["agents"].push_back({{"id", a.id},
                           {"position", vec_json(a.position)},
                           {"goal_index", a.goal_index},
                           {"mode", to_string(a.mode)},
                           {"lambda", a.lambda},
                           {"last_velocity", vec_json(a.last_velocity)}});
  }
  j["goals"] = json::array();
  for (const auto& g : s.goals) j["goals"].push_back(vec_json(g));
  j["comm_range"] = s.comm_range;
  j["comm_band"] = s.comm_band;
  j["min_separation"] = s.min_separation;
  j["workspace_center"] = vec_json(s.workspace_center);
  j["workspace_radius"] = s.workspace_radius;
  j["aggregation_power"] = s.aggregation_power;
  j["lr_gains"] = s.lr_gains;
  j["q_band"] = s.q_band;
  j["grad_floor"] = s.grad_floor;
  j["dt"] = s.dt;
  j["max_time"] = s.max_time;
  return j.dump(2) + "\n";
}

Scenario scenario_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  require_keys(j, kScenarioKeys, "scenario");

  Scenario s;
  if (!j["agents"].is_array()) throw ParseError("field 'agents' must be an array");
  for (std::size_t i = 0; i < j["agents"].size(); ++i) {
    const json& a = j["agents"][i];
    require_keys(a, kAgentKeys, "agents[" + std::to_string(i) + "]");
    AgentState st;
    st.id = index(a["id"], "id");
    st.position = vec(a["position"], "position");
    st.goal_index = index(a["goal_index"], "goal_index");
    if (!a["mode"].is_string()) throw ParseError("field 'mode' must be \"OGA\" or \"LR\"");
    try {
      st.mode = mode_from_string(a["mode"].get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(e.what());
    }
    st.lambda = num(a["lambda"], "lambda");
    st.last_velocity = vec(a["last_velocity"], "last_velocity");
    s.agents.push_back(st);
  }
  if (!j["goals"].is_array()) throw ParseError("field 'goals' must be an array");
  for (const auto& g : j["goals"]) s.goals.push_back(vec(g, "goals"));
  s.comm_range = num(j["comm_range"], "comm_range");
  s.comm_band = num(j["comm_band"], "comm_band");
  s.min_separation = num(j["min_separation"], "min_separation");
  s.workspace_center = vec(j["workspace_center"], "workspace_center");
  s.workspace_radius = num(j["workspace_radius"], "workspace_radius");
  s.aggregation_power = num(j["aggregation_power"], "aggregation_power");
  if (!j["lr_gains"].is_array()) throw ParseError("field 'lr_gains' must be an array");
  for (const auto& k : j["lr_gains"]) s.lr_gains.push_back(num(k, "lr_gains"));
  s.q_band = num(j["q_band"], "q_band");
  s.grad_floor = num(j["grad_floor"], "grad_floor");
  s.dt = num(j["dt"], "dt");
  s.max_time = num(j["max_time"], "max_time");
  return s;
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_text(ss.str());
}

void write_scenario_file(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file '" + path + "'");
  out << scenario_to_text(s);
}

void write_trace_csv(std::ostream& os, const SimTrace& tr) {
  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i << ",y" << i << ",mode" << i << ",goal" << i;
  os << ",V_total,min_clearance\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_double(tr.times[k]);
    for (const auto& a : tr.states[k])
      os << ',' << format_double(a.position.x()) << ',' << format_double(a.position.y()) << ','
         << to_string(a.mode) << ',' << a.goal_index;
    os << ',' << format_double(tr.lyapunov_total[k]) << ',' << format_double(tr.min_clearance[k]) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError(where + ": bad number '" + s + "'");
  return v;
}

}  // namespace

SimTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("trace: missing header");
  const auto header = split(line, ',');
  if (header.size() < 3 || (header.size() - 3) % 4 != 0 || header.front() != "t")
    throw ParseError("trace: malformed header");
  const std::size_t n = (header.size() - 3) / 4;

  SimTrace tr;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "trace row " + std::to_string(row);
    if (f.size() != header.size()) throw ParseError(where + ": wrong column count");
    tr.times.push_back(parse_double(f[0], where));
    std::vector<AgentState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& a = states[i];
      a.id = i;
      a.position = {parse_double(f[1 + 4 * i], where), parse_double(f[2 + 4 * i], where)};
      try {
        a.mode = mode_from_string(f[3 + 4 * i]);
      } catch (const ValidationError& e) {
        throw ParseError(where + ": " + e.what());
      }
      a.goal_index = static_cast<std::size_t>(parse_double(f[4 + 4 * i], where));
    }
    tr.states.push_back(std::move(states));
    tr.lyapunov_total.push_back(parse_double(f[f.size() - 2], where));
    tr.min_clearance.push_back(parse_double(f.back(), where));
  }
  return tr;
}

void write_decisions_csv(std::ostream& os, const SimTrace& tr) {
  os << "t,members,old_cost,new_cost,changed\n";
  for (const auto& d : tr.assignments) {
    os << format_double(d.time) << ',';
    for (std::size_t k = 0; k < d.members.size(); ++k) os << (k ? " " : "") << d.members[k];
    os << ',' << format_double(d.old_cost) << ',' << format_double(d.new_cost) << ',' << (d.changed ? 1 : 0) << '\n';
  }
}

void write_metrics(std::ostream& os, const SimTrace& tr, const Metrics& m) {
  double min_gap = 0.0;
  if (!m.switch_intervals.empty())
    min_gap = *std::min_element(m.switch_intervals.begin(), m.switch_intervals.end());
  os << "termination: " << to_string(tr.termination) << '\n';
  if (!tr.termination_detail.empty()) os << "termination_detail: " << tr.termination_detail << '\n';
  os << "final_time: " << format_double(tr.times.back()) << '\n';
  os << "total_path_length: " << format_double(m.total_path_length) << '\n';
  os << "lr_fraction: " << format_double(m.lr_fraction) << '\n';
  os << "decision_count: " << m.decision_count << '\n';
  os << "min_clearance: " << format_double(m.min_clearance) << '\n';
  os << "switch_count: " << m.switch_intervals.size() << '\n';
  os << "min_switch_interval: " << format_double(min_gap) << '\n';
  os << "flag_count: " << tr.flags.size() << '\n';
  std::size_t by_kind[4] = {0, 0, 0, 0};
  for (const auto& f : tr.flags) ++by_kind[static_cast<int>(f.flag)];
  os << "flags_barrier_clamped: " << by_kind[0] << '\n'
     << "flags_degenerate_lr: " << by_kind[1] << '\n'
     << "flags_lr_saturated: " << by_kind[2] << '\n'
     << "flags_lr_entry_delayed: " << by_kind[3] << '\n';
  os << "seed: " << tr.seed << '\n';
}

CostMatrix read_cost_matrix(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("cost matrix: missing dimension line");
  std::istringstream head(line);
  long long n = -1;
  std::string extra;
  if (!(head >> n) || n < 0 || (head >> extra)) throw ParseError("cost matrix: first line must be the dimension n");

  CostMatrix c(n, n);
  for (long long r = 0; r < n; ++r) {
    if (!next_line()) throw ParseError("cost matrix: missing row " + std::to_string(r));
    std::istringstream ss(line);
    std::string tok;
    long long col = 0;
    while (ss >> tok) {
      const std::string where = "cost matrix row " + std::to_string(r) + " column " + std::to_string(col);
      if (col >= n) throw ParseError(where + ": too many entries");
      c(r, col) = parse_double(tok, where);
      if (!std::isfinite(c(r, col))) throw ParseError(where + ": entry must be finite");
      ++col;
    }
    if (col != n)
      throw ParseError("cost matrix row " + std::to_string(r) + " column " + std::to_string(col) +
                       ": expected " + std::to_string(n) + " entries");
  }
  return c;
}

void write_cost_matrix(std::ostream& os, const CostMatrix& c) {
  os << c.rows() << '\n';
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) os << (k ? " " : "") << format_double(c(r, k));
    os << '\n';
  }
}

}  // namespace mrta
