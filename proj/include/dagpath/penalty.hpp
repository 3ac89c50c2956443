#pragma once

#include <string>

#include <Eigen/Core>

namespace dagpath {

enum class PenaltyKind { l1, mcp, group_lasso };

std::string to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(const std::string& s);

struct Penalty {
  PenaltyKind kind = PenaltyKind::l1;
  double lambda = 0.0;
  double gamma = 2.0;         // MCP concavity, must exceed 1
  double group_weight = 1.0;  // group lasso weight scale
};

// Throws std::invalid_argument for negative lambda, gamma <= 1 under MCP, or
// a negative group weight.
void validate(const Penalty& pen);

// Effective group weight: group_weight * sqrt(dim).
double group_weight(const Penalty& pen, Eigen::Index dim);

// L1: lambda |b|. MCP: lambda |b| - b^2 / (2 gamma) up to |b| = gamma lambda,
// then gamma lambda^2 / 2.
double penalty_value(const Penalty& pen, double coeff);

// lambda * w * ||coeff||_2. `dim` sets the group size used for the weight and
// defaults to coeff.size().
double penalty_value(const Penalty& pen, const Eigen::Ref<const Eigen::VectorXd>& coeff, Eigen::Index dim = -1);

// Minimizer of (c/2)(b - z)^2 + rho(b) for L1 or MCP and curvature c > 0.
double scalar_threshold(const Penalty& pen, double z, double curvature);

// Block soft threshold max(0, 1 - step lambda w / ||z||) z, the proximal map
// of step * lambda * w * ||.||_2.
Eigen::VectorXd group_threshold(const Penalty& pen, const Eigen::Ref<const Eigen::VectorXd>& z, double step,
                                Eigen::Index dim = -1);

// The multiplier group_threshold applies to a vector of the given norm.
double group_shrink_factor(const Penalty& pen, double norm, double step, Eigen::Index dim);

}  // namespace dagpath
