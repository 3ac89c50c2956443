#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <dagpath/dataset.hpp>
#include <dagpath/path.hpp>
#include <dagpath/prior.hpp>

namespace dagpath {

// Descending grid from lambda_max to lambda_max * ratio, both endpoints
// exact. ratio = 1 yields a constant grid. Throws std::invalid_argument for
// lambda_max <= 0, ratio outside (0, 1], or length < 2.
std::vector<double> generate_lambdas(double lambda_max, double ratio, std::size_t length, GridScale scale);

// Log grid with ratio 0.01. Continuous: lambda_max = sqrt(n). Discrete:
// discrete_lambda_max().
std::vector<double> default_lambdas(const Dataset& ds, std::size_t length = 20, const LearnOptions& opts = {},
                                    const PriorKnowledge& prior = {});

// The grid a learner will run: opts.lambdas if given (checked to be
// positive and strictly decreasing), otherwise generated from the options
// and the data-driven lambda_max.
std::vector<double> resolve_lambdas(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior = {});

// Dispatches on the data kind.
SolutionPath estimate_dag(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior = {});

struct ByEdges {
  std::size_t edges;
};
struct ByLambda {
  double lambda;
};
// 1-based.
struct ByIndex {
  std::size_t index;
};
using Criterion = std::variant<ByEdges, ByLambda, ByIndex>;

// 0-based position of the estimate matching `criterion`. Edges and lambda
// pick the closest value, ties going to the earlier (sparser) estimate.
// Throws std::out_of_range for an empty path or a bad index.
std::size_t select_position(const SolutionPath& path, const Criterion& criterion);
const PathEstimate& select(const SolutionPath& path, const Criterion& criterion);

// Elbow rule over per-estimate log-likelihoods L and edge counts E. For
// every step m with E_m > E_{m-1} the gain is
// g_m = (L_m - L_{m-1}) / max(1, E_m - E_{m-1}); the result is the largest
// 1-based m with g_m >= threshold * max g, or 1 when no step adds edges or
// no gain is positive. Among m and the estimates right after it with the same
// edge count, the one with the highest L is returned (earliest on ties).
std::size_t select_parameter(const std::vector<double>& loglik, const std::vector<std::size_t>& edges,
                             double threshold = 0.5);
// Same rule with L from refits of every path estimate on `ds`.
std::size_t select_parameter(const SolutionPath& path, const Dataset& ds, double threshold = 0.5,
                             std::size_t threads = 1);

}  // namespace dagpath
