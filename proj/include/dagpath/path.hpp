#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <dagpath/dataset.hpp>
#include <dagpath/graph.hpp>
#include <dagpath/penalty.hpp>

namespace dagpath {

enum class GridScale { linear, log };

/// Knobs shared by both structure learners.
///
/// Regularization levels are on the sqrt(n) scale: the learners minimize the
/// per-observation negative log-likelihood plus rho_{lambda / sqrt(n)}, so on
/// standardized continuous data lambda = sqrt(n) always yields the empty
/// graph. When `lambdas` is empty a log grid of `lambdas_length` values is
/// generated from `lambda_max` (default: data-driven) down to
/// lambda_max * lambda_ratio.
struct LearnOptions {
  std::vector<double> lambdas;
  std::size_t lambdas_length = 20;
  std::optional<double> lambda_max;
  double lambda_ratio = 0.01;
  GridScale scale = GridScale::log;

  PenaltyKind penalty = PenaltyKind::mcp;  // continuous data only
  double concavity = 2.0;
  double weight_scale = 1.0;  // discrete group weights
  double upperbound = 100.0;  // discrete coefficient magnitude cap

  double error_tol = 1e-4;
  std::optional<std::size_t> max_iters;       // default max(10, 2p)
  std::optional<std::size_t> edge_threshold;  // default 10p continuous, 3p discrete
  double var_floor = 0.01;

  // Recompute the full objective around every accepted update and count
  // increases in SolutionPath::descent_violations. Expensive.
  bool check_descent = false;
  bool verbose = false;
};

struct PathEstimate {
  Dag dag;
  double lambda = 0.0;
  std::size_t nedge = 0;
  std::size_t pp = 0;
  std::size_t nn = 0;
  double seconds = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Estimates for a strictly decreasing lambda grid, sparsest first.
struct SolutionPath {
  std::vector<std::string> nodes;
  std::size_t n = 0;
  std::size_t p = 0;
  DataKind kind = DataKind::continuous;
  std::vector<PathEstimate> estimates;
  std::size_t descent_violations = 0;

  std::size_t size() const { return estimates.size(); }
  const PathEstimate& operator[](std::size_t i) const { return estimates.at(i); }
};

// Path JSON: {"kind","n","p","nodes","estimates":[{"lambda","nedge","seconds",
// "converged","iterations","edges":[[parent,child],...]}]}. Timings are
// rounded to milliseconds.
std::string path_to_json(const SolutionPath& path, int indent = 1);
SolutionPath path_from_json(const std::string& text);
void write_path_json(std::ostream& out, const SolutionPath& path);
SolutionPath read_path_json(std::istream& in);

// Same document with every "seconds" field zeroed; for determinism checks.
std::string path_to_json_without_timing(const SolutionPath& path);

}  // namespace dagpath
