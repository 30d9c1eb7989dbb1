#pragma once

// Command implementations behind the `cxorder` executable. Each command
// maps a parsed problem to a JSON report; run_cli adds argument parsing,
// file I/O and the exit-code contract.

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "cxorder/bures.hpp"
#include "cxorder/discrete_wot.hpp"
#include "cxorder/gauss_project.hpp"

namespace cxorder::cli {

using Json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kParseError = 2,
  kSolverFailure = 3,
};

/// Input that does not describe a valid problem.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  SolveMethod method = SolveMethod::automatic;
  std::optional<double> eta;
  std::optional<int> max_iter;
  std::optional<double> tol;
  bool record_trace = false;
};

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what);

/// {"mean": [...], "cov": [[...]]}
GaussianMeasure gaussian_from_json(const Json& j);
Json gaussian_to_json(const Vector& mean, const Matrix& cov);
/// {"points": [[...]] or [...], "weights": [...]}
DiscreteMeasure discrete_from_json(const Json& j);
Json discrete_to_json(const DiscreteMeasure& m);

bool is_gaussian(const Json& j);

/// Canonical text: sorted keys, two-space indent, shortest round-trip
/// doubles, trailing newline.
std::string dump(const Json& j);

struct GaussianReport {
  Json json;
  PgdTrace trace;
};

GaussianReport cmd_project_gaussian(const Json& problem,
                                    const SolverOptions& opts);
Json cmd_project_1d(const Json& problem);
struct DiscreteReport {
  Json json;
  Matrix coupling;
  bool converged = true;
};
DiscreteReport cmd_project_discrete(const Json& problem,
                                    const SolverOptions& opts,
                                    std::size_t budget, bool away_steps);
Json cmd_distance(const Json& problem);
/// `claims`, when present, may hold "I" and/or "J" measures that replace
/// the solver output in every check.
Json cmd_check(const Json& problem, const std::optional<Json>& claims,
               const SolverOptions& opts);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace cxorder::cli
