#pragma once

#include "memtp/bounds.hpp"
#include "memtp/dual_solver.hpp"
#include "memtp/geometry.hpp"
#include "memtp/lp_oracle.hpp"
#include "memtp/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memtp::io {

using json = nlohmann::json;

/// Malformed input. Each diagnostic names a field path or a line.
class InputError : public std::runtime_error {
 public:
  InputError(std::string source, std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Problem document:
///   {"N": int, "p": [...], "q": [...], "W": [[...], ...],
///    "bounds": [[a, b], ...], "extra": [{"v": [...], "value": r}], "cost": r}
/// Only N, p and q are required. Shape errors are InputError; the marginal
/// and box rules are left to validate_problem.
TransportProblem parse_problem(std::string_view text, const std::string& source = "<input>");
TransportProblem load_problem(const std::filesystem::path& path);

/// Comma or whitespace separated numbers; blank lines and '#' comments skipped.
Vector read_csv_vector(const std::filesystem::path& path);
Matrix read_csv_matrix(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

json vector_json(const Vector& v);
/// N x N nested array through the lexicographic relabeling.
json plan_json(const Vector& x, int side);

json solve_report(const TransportProblem& problem, const SolveOutcome& outcome);
std::string solve_csv(const TransportProblem& problem, const SolveOutcome& outcome);

json sweep_report(const TransportProblem& problem, const SweepResult& sweep, const std::optional<GapReport>& gap);
std::string sweep_trace_csv(const SweepResult& sweep);

json lp_report(const TransportProblem& problem, const LpSolution& lp);
std::string lp_csv(const TransportProblem& problem, const LpSolution& lp);

json distance_json(const DistanceRecord& record);
std::string distance_csv(const DistanceRecord& record);

/// Rows (t, n, xi) with n 1-based.
std::string interpolation_csv(const std::vector<double>& ts, const std::vector<Vector>& plans);
json interpolation_json(const std::vector<double>& ts, const std::vector<Vector>& plans, int side);

std::string bounds_csv(const BoundBatch& batch);

/// A plan or multiplier vector read from a report or a bare document with
/// any of "x" (flat), "plan" (N x N) or "lambda".
struct PlanInput {
  std::optional<Vector> x;
  std::optional<Vector> lambda;
};
PlanInput parse_plan_input(std::string_view text, const std::string& source = "<input>");
PlanInput load_plan_input(const std::filesystem::path& path);

}  // namespace memtp::io
