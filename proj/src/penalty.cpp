#include <dagpath/penalty.hpp>

#include <dagpath/error.hpp>

#include <cmath>
#include <stdexcept>

namespace dagpath {

namespace {

double soft(double z, double t) {
  const double a = std::abs(z) - t;
  return a > 0 ? std::copysign(a, z) : 0.0;
}

double mcp_value(double lambda, double gamma, double b) {
  const double a = std::abs(b);
  if (a <= gamma * lambda) return lambda * a - b * b / (2 * gamma);
  return gamma * lambda * lambda / 2;
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::l1: return "l1";
    case PenaltyKind::mcp: return "mcp";
    case PenaltyKind::group_lasso: return "group";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(const std::string& s) {
  if (s == "l1") return PenaltyKind::l1;
  if (s == "mcp") return PenaltyKind::mcp;
  if (s == "group") return PenaltyKind::group_lasso;
  throw InputError("unknown penalty '" + s + "' (expected l1 or mcp)");
}

void validate(const Penalty& pen) {
  if (!(pen.lambda >= 0)) throw std::invalid_argument("penalty lambda must be nonnegative");
  if (pen.kind == PenaltyKind::mcp && !(pen.gamma > 1)) throw std::invalid_argument("MCP concavity must exceed 1");
  if (!(pen.group_weight >= 0)) throw std::invalid_argument("group weight must be nonnegative");
}

double group_weight(const Penalty& pen, Eigen::Index dim) {
  return pen.group_weight * std::sqrt(static_cast<double>(dim));
}

double penalty_value(const Penalty& pen, double coeff) {
  validate(pen);
  switch (pen.kind) {
    case PenaltyKind::l1: return pen.lambda * std::abs(coeff);
    case PenaltyKind::mcp: return mcp_value(pen.lambda, pen.gamma, coeff);
    case PenaltyKind::group_lasso: return pen.lambda * group_weight(pen, 1) * std::abs(coeff);
  }
  return 0.0;
}

double penalty_value(const Penalty& pen, const Eigen::Ref<const Eigen::VectorXd>& coeff, Eigen::Index dim) {
  validate(pen);
  if (pen.kind != PenaltyKind::group_lasso) {
    double total = 0;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) total += penalty_value(pen, coeff(i));
    return total;
  }
  if (dim < 0) dim = coeff.size();
  return pen.lambda * group_weight(pen, dim) * coeff.norm();
}

double scalar_threshold(const Penalty& pen, double z, double curvature) {
  if (!(curvature > 0)) throw std::invalid_argument("threshold curvature must be positive");
  const double c = curvature;
  const double lambda = pen.lambda;
  switch (pen.kind) {
    case PenaltyKind::l1:
    case PenaltyKind::group_lasso:
      return soft(z, lambda / c);
    case PenaltyKind::mcp: {
      const double gamma = pen.gamma;
      if (c * gamma > 1) {
        if (std::abs(z) <= gamma * lambda) return soft(z, lambda / c) / (1 - 1 / (c * gamma));
        return z;
      }
      // Concave on [-gamma lambda, gamma lambda]: the minimizer is 0 or lies
      // on the flat part, whose best point is z clipped to |b| >= gamma lambda.
      const double flat = std::abs(z) > gamma * lambda ? z : std::copysign(gamma * lambda, z);
      const double f_zero = 0.5 * c * z * z;
      const double f_flat = 0.5 * c * (flat - z) * (flat - z) + mcp_value(lambda, gamma, flat);
      return f_flat < f_zero ? flat : 0.0;
    }
  }
  return 0.0;
}

double group_shrink_factor(const Penalty& pen, double norm, double step, Eigen::Index dim) {
  if (!(step > 0)) throw std::invalid_argument("proximal step must be positive");
  const double t = step * pen.lambda * group_weight(pen, dim);
  if (norm <= t) return 0.0;
  return 1 - t / norm;
}

Eigen::VectorXd group_threshold(const Penalty& pen, const Eigen::Ref<const Eigen::VectorXd>& z, double step,
                                Eigen::Index dim) {
  if (dim < 0) dim = z.size();
  return group_shrink_factor(pen, z.norm(), step, dim) * z;
}

}  // namespace dagpath
