#include <dagpath/fit.hpp>

#include <dagpath/error.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace dagpath {

namespace {

constexpr double kSeparationBound = 1e3;

// Runs body(k) for k in [0, count) on up to `threads` workers and rethrows
// the first exception.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void check_path_matches(const SolutionPath& path, const Dataset& ds) {
  if (path.nodes != ds.names()) throw InputError("path nodes do not match the dataset columns");
  if (path.kind != ds.kind()) throw InputError("path data type does not match the dataset");
}

struct LogitFit {
  Eigen::MatrixXd theta;  // (1 + sum d_i) x (r - 1)
  bool separated = false;
};

// Newton's method for the multinomial logit with the last level as
// reference. `design` rows are [1, dummies...].
LogitFit fit_logit(const Eigen::MatrixXd& design, const std::vector<int>& y, int r) {
  const Eigen::Index k = design.cols();
  const Eigen::Index q = r - 1;
  const Eigen::Index dim = k * q;
  LogitFit fit{Eigen::MatrixXd::Zero(k, q), false};
  const auto rows = design.rows();

  auto negloglik = [&](const Eigen::MatrixXd& theta) {
    double total = 0;
    for (Eigen::Index h = 0; h < rows; ++h) {
      Eigen::RowVectorXd eta = Eigen::RowVectorXd::Zero(r);
      eta.head(q) = design.row(h) * theta;
      const double m = eta.maxCoeff();
      total += m + std::log((eta.array() - m).exp().sum()) - eta(y[h]);
    }
    return total;
  };

  double loss = negloglik(fit.theta);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index h = 0; h < rows; ++h) {
      Eigen::RowVectorXd eta = Eigen::RowVectorXd::Zero(r);
      eta.head(q) = design.row(h) * fit.theta;
      Eigen::RowVectorXd prob = (eta.array() - eta.maxCoeff()).exp();
      prob /= prob.sum();
      Eigen::VectorXd resid = prob.head(q).transpose();
      if (y[h] < q) resid(y[h]) -= 1.0;
      const Eigen::VectorXd z = design.row(h).transpose();
      for (Eigen::Index u = 0; u < q; ++u) grad.segment(u * k, k) += resid(u) * z;
      const Eigen::MatrixXd zz = z * z.transpose();
      for (Eigen::Index u = 0; u < q; ++u) {
        for (Eigen::Index v = 0; v < q; ++v) {
          const double w = (u == v ? prob(u) : 0.0) - prob(u) * prob(v);
          hess.block(u * k, v * k, k, k) += w * zz;
        }
      }
    }
    if (grad.norm() < 1e-8) {
      converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = ldlt.solve(-grad);
    if (step.size() == 0 || !step.allFinite()) {
      const double ridge = 1e-8 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      step = (hess + ridge * Eigen::MatrixXd::Identity(dim, dim)).ldlt().solve(-grad);
    }
    Eigen::Map<const Eigen::MatrixXd> step_mat(step.data(), k, q);
    bool improved = false;
    for (double s = 1.0; s > 1e-12; s *= 0.5) {
      Eigen::MatrixXd next = fit.theta + s * step_mat;
      const bool clamp = next.cwiseAbs().maxCoeff() > kSeparationBound;
      if (clamp) next = next.cwiseMax(-kSeparationBound).cwiseMin(kSeparationBound);
      const double l = negloglik(next);
      if (l <= loss) {
        improved = l < loss || clamp;
        fit.theta = std::move(next);
        loss = l;
        fit.separated = fit.separated || clamp;
        break;
      }
    }
    if (!improved || fit.separated) break;
  }
  if (converged) {
    // The gradient also vanishes numerically as coefficients run off to
    // infinity; a finite optimum never fits an observed level this tightly.
    for (Eigen::Index h = 0; h < rows && !fit.separated; ++h) {
      Eigen::RowVectorXd eta = Eigen::RowVectorXd::Zero(r);
      eta.head(q) = design.row(h) * fit.theta;
      const double m = eta.maxCoeff();
      const double nll = m + std::log((eta.array() - m).exp().sum()) - eta(y[h]);
      if (nll < 1e-7) fit.separated = true;
    }
  }
  if (!converged && !fit.separated) {
    // Stalled without meeting the gradient tolerance: the MLE is at infinity
    // or numerically so.
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index h = 0; h < rows; ++h) {
      Eigen::RowVectorXd eta = Eigen::RowVectorXd::Zero(r);
      eta.head(q) = design.row(h) * fit.theta;
      Eigen::RowVectorXd prob = (eta.array() - eta.maxCoeff()).exp();
      prob /= prob.sum();
      Eigen::VectorXd resid = prob.head(q).transpose();
      if (y[h] < q) resid(y[h]) -= 1.0;
      for (Eigen::Index u = 0; u < q; ++u) grad.segment(u * k, k) += resid(u) * design.row(h).transpose();
    }
    if (grad.norm() >= 1e-6 * std::max<double>(1.0, static_cast<double>(rows))) fit.separated = true;
  }
  return fit;
}

}  // namespace

GaussianParams refit_gaussian(const Dag& dag, const Dataset& ds, const RowPartition& part) {
  if (ds.kind() != DataKind::continuous) throw InputError("Gaussian refits need continuous data");
  if (dag.size() != ds.cols()) throw InputError("graph and dataset have different node counts");
  const std::size_t p = ds.cols();
  GaussianParams out = GaussianParams::empty(p);
  std::vector<Eigen::Triplet<double>> coefs;
  for (std::size_t jj = 0; jj < p; ++jj) {
    const int j = static_cast<int>(jj);
    const auto& rows = part.observed[jj];
    const auto& pa = dag.parents(j);
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto k = static_cast<Eigen::Index>(pa.size()) + 1;
    if (m < 2 || k >= m)
      throw InputError("node '" + ds.names()[jj] + "' has " + std::to_string(pa.size()) + " parents but only " +
                       std::to_string(rows.size()) + " usable rows");
    Eigen::MatrixXd design(m, k);
    Eigen::VectorXd y(m);
    for (Eigen::Index t = 0; t < m; ++t) {
      design(t, 0) = 1.0;
      for (Eigen::Index c = 1; c < k; ++c) design(t, c) = ds.values()(rows[t], pa[c - 1]);
      y(t) = ds.values()(rows[t], j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k) throw InputError("node '" + ds.names()[jj] + "': parent design is rank-deficient");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - design * beta;
    out.intercepts(j) = beta(0);
    for (Eigen::Index c = 1; c < k; ++c) coefs.emplace_back(pa[c - 1], j, beta(c));
    const double mean = resid.mean();
    out.vars(j) = std::max((resid.array() - mean).square().sum() / static_cast<double>(m - 1),
                           std::numeric_limits<double>::min());
  }
  out.coefs.setFromTriplets(coefs.begin(), coefs.end());
  return out;
}

DiscreteParams refit_discrete(const Dag& dag, const Dataset& ds, const RowPartition& part) {
  if (ds.kind() != DataKind::discrete) throw InputError("multi-logit refits need discrete data");
  if (dag.size() != ds.cols()) throw InputError("graph and dataset have different node counts");
  const std::size_t p = ds.cols();
  std::vector<int> levels;
  for (std::size_t j = 0; j < p; ++j) levels.push_back(ds.num_levels(j));
  DiscreteParams out = DiscreteParams::empty(levels);
  for (std::size_t jj = 0; jj < p; ++jj) {
    const int j = static_cast<int>(jj);
    const auto& rows = part.observed[jj];
    const auto& pa = dag.parents(j);
    const int r = levels[jj];
    Eigen::Index k = 1;
    for (int i : pa) k += levels[i] - 1;
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(m, k);
    std::vector<int> y(rows.size());
    for (Eigen::Index t = 0; t < m; ++t) {
      design(t, 0) = 1.0;
      Eigen::Index offset = 1;
      for (int i : pa) {
        const int level = ds.level(rows[t], i);
        if (level < levels[i] - 1) design(t, offset + level) = 1.0;
        offset += levels[i] - 1;
      }
      y[t] = ds.level(rows[t], jj);
    }
    for (int i : pa) out.block(i, j) = Eigen::MatrixXd::Zero(levels[i] - 1, r);
    if (m == 0) continue;
    const LogitFit fit = fit_logit(design, y, r);
    out.intercepts[jj].head(r - 1) = fit.theta.row(0).transpose();
    Eigen::Index offset = 1;
    for (int i : pa) {
      out.block(i, j).leftCols(r - 1) = fit.theta.middleRows(offset, levels[i] - 1);
      offset += levels[i] - 1;
    }
    out.separated[jj] = fit.separated;
  }
  return out;
}

std::vector<GaussianParams> estimate_parameters_gaussian(const SolutionPath& path, const Dataset& ds,
                                                         std::size_t threads) {
  check_path_matches(path, ds);
  const RowPartition part = row_partition(ds);
  std::vector<GaussianParams> out(path.size());
  parallel_for(path.size(), threads, [&](std::size_t m) { out[m] = refit_gaussian(path[m].dag, ds, part); });
  return out;
}

std::vector<DiscreteParams> estimate_parameters_discrete(const SolutionPath& path, const Dataset& ds,
                                                         std::size_t threads) {
  check_path_matches(path, ds);
  const RowPartition part = row_partition(ds);
  std::vector<DiscreteParams> out(path.size());
  parallel_for(path.size(), threads, [&](std::size_t m) { out[m] = refit_discrete(path[m].dag, ds, part); });
  return out;
}

Eigen::MatrixXd implied_covariance(const GaussianParams& params) {
  const auto p = static_cast<Eigen::Index>(params.size());
  if (params.coefs.rows() != p || params.coefs.cols() != p) throw std::invalid_argument("coefficient matrix is not p x p");
  if ((params.vars.array() <= 0).any()) throw std::invalid_argument("conditional variances must be positive");
  const Dag dag = params.support(Dag::with_size(static_cast<std::size_t>(p)).names());
  const Eigen::MatrixXd B = params.coefs;
  if (B.diagonal().cwiseAbs().maxCoeff() != 0) throw std::invalid_argument("coefficient matrix has a nonzero diagonal");
  // Row j of T = (I - B^T)^{-1} expresses X_j in terms of the noise terms.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p, p);
  for (int j : dag.topological_sort()) {
    T(j, j) = 1.0;
    for (int i : dag.parents(j)) T.row(j) += B(i, j) * T.row(i);
  }
  Eigen::MatrixXd sigma = T * params.vars.asDiagonal() * T.transpose();
  return (sigma + sigma.transpose()) / 2;
}

Eigen::MatrixXd implied_precision(const GaussianParams& params) {
  const auto p = static_cast<Eigen::Index>(params.size());
  if (params.coefs.rows() != p || params.coefs.cols() != p) throw std::invalid_argument("coefficient matrix is not p x p");
  if ((params.vars.array() <= 0).any()) throw std::invalid_argument("conditional variances must be positive");
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(p, p) - Eigen::MatrixXd(params.coefs);
  Eigen::MatrixXd gamma = A * params.vars.cwiseInverse().asDiagonal() * A.transpose();
  return (gamma + gamma.transpose()) / 2;
}

std::vector<Eigen::MatrixXd> estimate_covariance(const Dataset& ds, const LearnOptions& opts,
                                                 const PriorKnowledge& prior, std::size_t threads) {
  const SolutionPath path = estimate_dag_gaussian(ds, opts, prior);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& params : estimate_parameters_gaussian(path, ds, threads)) out.push_back(implied_covariance(params));
  return out;
}

std::vector<Eigen::MatrixXd> estimate_precision(const Dataset& ds, const LearnOptions& opts,
                                                const PriorKnowledge& prior, std::size_t threads) {
  const SolutionPath path = estimate_dag_gaussian(ds, opts, prior);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& params : estimate_parameters_gaussian(path, ds, threads)) out.push_back(implied_precision(params));
  return out;
}

double refit_loglik(const Dag& dag, const Dataset& ds, const RowPartition& part) {
  if (ds.kind() == DataKind::continuous) return -gaussian_negloglik(refit_gaussian(dag, ds, part), ds, part);
  const DiscreteParams params = refit_discrete(dag, ds, part);
  double total = 0;
  for (std::size_t j = 0; j < ds.cols(); ++j) total -= multilogit_negloglik(params, ds, part, static_cast<int>(j));
  return total;
}

std::vector<double> path_loglik(const SolutionPath& path, const Dataset& ds, std::size_t threads) {
  check_path_matches(path, ds);
  const RowPartition part = row_partition(ds);
  std::vector<double> out(path.size());
  parallel_for(path.size(), threads, [&](std::size_t m) { out[m] = refit_loglik(path[m].dag, ds, part); });
  return out;
}

}  // namespace dagpath
