#include "memtp/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace memtp::io {
namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

std::string type_name(const json& v) { return v.type_name(); }

// Collects field diagnostics instead of stopping at the first one.
class FieldReader {
 public:
  std::vector<std::string> errors;

  std::optional<double> number(const json& v, const std::string& path) {
    if (!v.is_number()) {
      errors.push_back(fmt::format("{}: expected a number, got {}", path, type_name(v)));
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      errors.push_back(fmt::format("{}: value is not finite", path));
      return std::nullopt;
    }
    return d;
  }

  std::optional<Vector> vector(const json& v, const std::string& path, std::optional<Eigen::Index> length) {
    if (!v.is_array()) {
      errors.push_back(fmt::format("{}: expected an array, got {}", path, type_name(v)));
      return std::nullopt;
    }
    if (length && static_cast<Eigen::Index>(v.size()) != *length) {
      errors.push_back(fmt::format("{}: expected {} entries, got {}", path, *length, v.size()));
      return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    bool ok = true;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto d = number(v[k], fmt::format("{}[{}]", path, k));
      if (d)
        out[static_cast<Eigen::Index>(k)] = *d;
      else
        ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<Matrix> square(const json& v, const std::string& path, Eigen::Index side) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != side) {
      errors.push_back(fmt::format("{}: expected an array of {} rows", path, side));
      return std::nullopt;
    }
    Matrix out(side, side);
    bool ok = true;
    for (Eigen::Index i = 0; i < side; ++i) {
      const auto row = vector(v[static_cast<std::size_t>(i)], fmt::format("{}[{}]", path, i), side);
      if (row)
        out.row(i) = row->transpose();
      else
        ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }
};

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw InputError(source, {fmt::format("line {}, column {}: {}", line, col, what)});
  }
}

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::vector<std::string> errors;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(value)) {
        errors.push_back(fmt::format("line {}: '{}' is not a finite number", lineno, token));
        continue;
      }
      row.push_back(value);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (!errors.empty()) throw InputError(path.string(), errors);
  if (rows.empty()) throw InputError(path.string(), {"no numbers found"});
  return rows;
}

std::vector<std::string> pin_names(const std::vector<Pin>& pins) {
  std::vector<std::string> out;
  out.reserve(pins.size());
  for (Pin p : pins) out.emplace_back(to_string(p));
  return out;
}

double residual_of(const TransportProblem& problem, const Vector& x) {
  if (x.size() != problem.cells()) return std::numeric_limits<double>::quiet_NaN();
  const AugmentedSystem system = augment_constraints(problem, problem.cost_target);
  return (system.apply(x) - system.data()).lpNorm<Eigen::Infinity>();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

InputError::InputError(std::string source, std::vector<std::string> diagnostics)
    : std::runtime_error(fmt::format("{}: {}", source, join(diagnostics, "; "))),
      diagnostics_(std::move(diagnostics)) {}

TransportProblem parse_problem(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw InputError(source, {"top level: expected an object"});
  FieldReader r;
  static const std::vector<std::string> known{"N", "p", "q", "W", "bounds", "extra", "cost"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      r.errors.push_back(fmt::format("{}: unknown field", key));

  if (!doc.contains("N")) throw InputError(source, {"N: required field missing"});
  const json& jn = doc["N"];
  if (!jn.is_number_integer() || jn.get<long long>() < 1 || jn.get<long long>() > kMaxDenseSide)
    throw InputError(source, {fmt::format("N: expected an integer in [1, {}]", kMaxDenseSide)});
  const int side = jn.get<int>();
  const Eigen::Index cells = Eigen::Index(side) * side;

  TransportProblem problem;
  problem.side = side;
  problem.bounds = BoxBounds::uniform(cells);
  for (const char* key : {"p", "q"}) {
    if (!doc.contains(key)) {
      r.errors.push_back(fmt::format("{}: required field missing", key));
      continue;
    }
    if (auto v = r.vector(doc[key], key, side)) (key[0] == 'p' ? problem.p : problem.q) = *v;
  }
  if (doc.contains("W"))
    if (auto w = r.square(doc["W"], "W", side)) problem.cost = *w;
  if (doc.contains("bounds")) {
    const json& jb = doc["bounds"];
    if (!jb.is_array() || static_cast<Eigen::Index>(jb.size()) != cells) {
      r.errors.push_back(fmt::format("bounds: expected an array of {} [a, b] pairs", cells));
    } else {
      for (Eigen::Index k = 0; k < cells; ++k) {
        const auto path = fmt::format("bounds[{}]", k);
        if (auto pair = r.vector(jb[static_cast<std::size_t>(k)], path, 2)) {
          problem.bounds.lower[k] = (*pair)[0];
          problem.bounds.upper[k] = (*pair)[1];
        }
      }
    }
  }
  if (doc.contains("extra")) {
    const json& je = doc["extra"];
    if (!je.is_array()) {
      r.errors.push_back("extra: expected an array of {\"v\", \"value\"} objects");
    } else {
      for (std::size_t k = 0; k < je.size(); ++k) {
        const auto path = fmt::format("extra[{}]", k);
        if (!je[k].is_object() || !je[k].contains("v") || !je[k].contains("value")) {
          r.errors.push_back(fmt::format("{}: expected an object with \"v\" and \"value\"", path));
          continue;
        }
        auto v = r.vector(je[k]["v"], path + ".v", cells);
        auto value = r.number(je[k]["value"], path + ".value");
        if (v && value) problem.extra.push_back({*v, *value});
      }
    }
  }
  if (doc.contains("cost"))
    if (auto c = r.number(doc["cost"], "cost")) problem.cost_target = *c;
  if (problem.cost_target && !doc.contains("W")) r.errors.push_back("cost: given without a cost matrix W");

  if (!r.errors.empty()) throw InputError(source, r.errors);
  return problem;
}

TransportProblem load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path), path.string()); }

Vector read_csv_vector(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path);
  std::vector<double> all;
  for (const auto& row : rows) all.insert(all.end(), row.begin(), row.end());
  return Eigen::Map<const Vector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path);
  const std::size_t width = rows.front().size();
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width)
      throw InputError(path.string(), {fmt::format("row {}: expected {} values, got {}", i + 1, width, rows[i].size())});
    for (std::size_t j = 0; j < width; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), {"cannot open file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / fmt::format(".{}.tmp.{}", path.filename().string(), ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error(fmt::format("cannot move output into place at {}: {}", path.string(), ec.message()));
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number_or_null(v[k]));
  return out;
}

json plan_json(const Vector& x, int side) {
  json out = json::array();
  for (int i = 1; i <= side; ++i) {
    json row = json::array();
    for (int j = 1; j <= side; ++j) row.push_back(number_or_null(x[lex_index(i, j, side) - 1]));
    out.push_back(std::move(row));
  }
  return out;
}

json solve_report(const TransportProblem& problem, const SolveOutcome& outcome) {
  json r;
  r["status"] = std::string(to_string(outcome.status));
  r["N"] = problem.side;
  if (outcome.solution) {
    const MaxentSolution& s = *outcome.solution;
    r["x"] = vector_json(s.x);
    r["plan"] = plan_json(s.x, problem.side);
    r["lambda"] = vector_json(s.lambda);
    r["dual_value"] = number_or_null(s.dual_value);
    r["entropy"] = number_or_null(s.entropy);
    r["residual"] = number_or_null(s.residual);
  } else {
    // Last iterate: the plan the diverging multipliers are heading to.
    r["x"] = vector_json(outcome.last_x);
    r["plan"] = outcome.last_x.size() == problem.cells() ? plan_json(outcome.last_x, problem.side) : json::array();
    r["lambda"] = vector_json(outcome.last.lambda);
    r["dual_value"] = number_or_null(outcome.last.objective);
    double entropy = std::numeric_limits<double>::quiet_NaN();
    try {
      BoxBounds bounds = problem.bounds;
      eliminate_zero_marginals(problem, bounds);
      entropy = entropy_of_plan(outcome.last_x, bounds);
    } catch (const std::exception&) {
    }
    r["entropy"] = number_or_null(entropy);
    r["residual"] = number_or_null(residual_of(problem, outcome.last_x));
  }
  r["iterations"] = outcome.iterations;
  if (!outcome.pins.empty()) r["pins"] = pin_names(outcome.pins);
  r["eliminated_cells"] = outcome.eliminated_cells;
  r["message"] = outcome.message;
  return r;
}

std::string solve_csv(const TransportProblem& problem, const SolveOutcome& outcome) {
  const Vector& x = outcome.solution ? outcome.solution->x : outcome.last_x;
  std::string out = "n,i,j,x,pin\n";
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto [i, j] = unlex_index(static_cast<int>(k) + 1, problem.side);
    const std::string_view pin = outcome.pins.empty() ? "" : to_string(outcome.pins[static_cast<std::size_t>(k)]);
    out += fmt::format("{},{},{},{},{}\n", k + 1, i, j, format_double(x[k]), pin);
  }
  return out;
}

json sweep_report(const TransportProblem& problem, const SweepResult& sweep, const std::optional<GapReport>& gap) {
  json r;
  r["c0"] = sweep.c0;
  r["c_star"] = sweep.c_star;
  r["n_star"] = sweep.n_star;
  r["delta"] = sweep.delta;
  r["x"] = vector_json(sweep.plan());
  r["plan"] = plan_json(sweep.plan(), problem.side);
  r["lambda"] = vector_json(sweep.solution.lambda);
  r["entropy"] = sweep.solution.entropy;
  r["eliminated_cells"] = sweep.eliminated_cells;
  r["stop_status"] = sweep.trace.empty() ? "" : std::string(to_string(sweep.trace.back().status));
  if (gap) {
    r["oracle_cost"] = gap->oracle_cost;
    r["gap"] = gap->gap;
    r["gap_within"] = gap->within;
    r["plan_sup_distance"] = number_or_null(gap->plan_sup_distance);
  } else {
    r["oracle_cost"] = nullptr;
    r["gap"] = nullptr;
  }
  auto steps = [](const std::vector<SweepStep>& list) {
    json out = json::array();
    for (const auto& s : list)
      out.push_back({{"step", s.step},
                     {"c_n", s.c},
                     {"status", std::string(to_string(s.status))},
                     {"achieved_cost", number_or_null(s.achieved_cost)},
                     {"iterations", s.iterations},
                     {"grad_norm", number_or_null(s.grad_norm)},
                     {"entropy", number_or_null(s.entropy)},
                     {"max_pin_distance", number_or_null(s.max_pin_distance)}});
    return out;
  };
  r["trace"] = steps(sweep.trace);
  if (!sweep.refinement.empty()) r["refinement"] = steps(sweep.refinement);
  return r;
}

std::string sweep_trace_csv(const SweepResult& sweep) {
  std::string out = "step,c_n,status,iterations,grad_norm,entropy,max_pin_distance\n";
  // Bisection steps live only in the JSON report; the CSV ends at the first non-Converged step.
  for (const auto& s : sweep.trace)
    out += fmt::format("{},{},{},{},{},{},{}\n", s.step, format_double(s.c), to_string(s.status), s.iterations,
                       format_double(s.grad_norm), format_double(s.entropy), format_double(s.max_pin_distance));
  return out;
}

json lp_report(const TransportProblem& problem, const LpSolution& lp) {
  return {{"cost", lp.cost},
          {"x", vector_json(lp.x)},
          {"plan", plan_json(lp.x, problem.side)},
          {"basis", lp.basis},
          {"row_potential", vector_json(lp.row_potential)},
          {"col_potential", vector_json(lp.col_potential)},
          {"min_reduced_cost", lp.min_reduced_cost},
          {"marginal_residual", lp.marginal_residual},
          {"pivots", lp.pivots}};
}

std::string lp_csv(const TransportProblem& problem, const LpSolution& lp) {
  std::string out = "n,i,j,x,basic\n";
  for (Eigen::Index k = 0; k < lp.x.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const auto [i, j] = unlex_index(n, problem.side);
    const bool basic = std::binary_search(lp.basis.begin(), lp.basis.end(), n);
    out += fmt::format("{},{},{},{},{}\n", n, i, j, format_double(lp.x[k]), basic ? 1 : 0);
  }
  return out;
}

json distance_json(const DistanceRecord& record) {
  json per = json::array();
  for (const auto& c : record.per_coordinate) per.push_back({{"n", c.n + 1}, {"dh", c.dh}, {"dk", c.dk}});
  return {{"d_M", record.d_M}, {"d_G", record.d_G}, {"per_coordinate", per}};
}

std::string distance_csv(const DistanceRecord& record) {
  std::string out = "n,dh,dk\n";
  for (const auto& c : record.per_coordinate)
    out += fmt::format("{},{},{}\n", c.n + 1, format_double(c.dh), format_double(c.dk));
  return out;
}

std::string interpolation_csv(const std::vector<double>& ts, const std::vector<Vector>& plans) {
  std::string out = "t,n,xi\n";
  for (std::size_t s = 0; s < ts.size(); ++s)
    for (Eigen::Index k = 0; k < plans[s].size(); ++k)
      out += fmt::format("{},{},{}\n", format_double(ts[s]), k + 1, format_double(plans[s][k]));
  return out;
}

json interpolation_json(const std::vector<double>& ts, const std::vector<Vector>& plans, int side) {
  json out = json::array();
  for (std::size_t s = 0; s < ts.size(); ++s)
    out.push_back({{"t", ts[s]}, {"x", vector_json(plans[s])}, {"plan", plan_json(plans[s], side)}});
  return out;
}

std::string bounds_csv(const BoundBatch& batch) {
  std::string out = "pair_id,lhs_l2,lhs_l1_scaled,lhs_sup,rhs,naive_rhs,ok\n";
  for (std::size_t k = 0; k < batch.reports.size(); ++k) {
    const BoundReport& r = batch.reports[k];
    out += fmt::format("{},{},{},{},{},{},{}\n", k, format_double(r.lhs_l2), format_double(r.lhs_l1_scaled),
                       format_double(r.lhs_sup), format_double(r.rhs_geodesic), format_double(r.naive_rhs),
                       r.satisfied() ? 1 : 0);
  }
  return out;
}

PlanInput parse_plan_input(std::string_view text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw InputError(source, {"top level: expected an object"});
  FieldReader r;
  PlanInput in;
  if (doc.contains("x")) {
    in.x = r.vector(doc["x"], "x", std::nullopt);
  } else if (doc.contains("plan")) {
    const json& jp = doc["plan"];
    const auto side = static_cast<Eigen::Index>(jp.is_array() ? jp.size() : 0);
    if (auto m = r.square(jp, "plan", side)) in.x = flatten(*m);
  }
  if (doc.contains("lambda")) in.lambda = r.vector(doc["lambda"], "lambda", std::nullopt);
  if (!in.x && !in.lambda && r.errors.empty()) r.errors.push_back("expected one of \"x\", \"plan\" or \"lambda\"");
  if (!r.errors.empty()) throw InputError(source, r.errors);
  return in;
}

PlanInput load_plan_input(const std::filesystem::path& path) {
  return parse_plan_input(read_file(path), path.string());
}

}  // namespace memtp::io
