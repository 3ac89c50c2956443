#include <dagpath/gaussian.hpp>

#include <dagpath/error.hpp>
#include <dagpath/selection.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace dagpath {

namespace {

void check_dims(const GaussianParams& params, const Dataset& ds, const RowPartition& part) {
  const auto p = static_cast<Eigen::Index>(ds.cols());
  if (ds.kind() != DataKind::continuous) throw std::invalid_argument("Gaussian likelihood needs continuous data");
  if (params.coefs.rows() != p || params.coefs.cols() != p || params.vars.size() != p ||
      (params.intercepts.size() != 0 && params.intercepts.size() != p) ||
      part.observed.size() != static_cast<std::size_t>(p))
    throw std::invalid_argument("parameter dimensions do not match the dataset");
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(params.vars(j) > 0)) throw std::invalid_argument("conditional variances must be positive");
  }
}

Eigen::MatrixXd residuals(const GaussianParams& params, const Dataset& ds) {
  Eigen::MatrixXd r = ds.values() - ds.values() * params.coefs;
  if (params.intercepts.size() != 0) r.rowwise() -= params.intercepts.transpose();
  return r;
}

}  // namespace

GaussianParams GaussianParams::empty(std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  return {Eigen::SparseMatrix<double>(n, n), Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)};
}

Dag GaussianParams::support(const std::vector<std::string>& names) const {
  Eigen::SparseMatrix<int> adj(coefs.rows(), coefs.cols());
  std::vector<Eigen::Triplet<int>> t;
  for (Eigen::Index col = 0; col < coefs.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(coefs, col); it; ++it) {
      if (it.value() != 0) t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), 1);
    }
  }
  adj.setFromTriplets(t.begin(), t.end());
  return dag_from_adjacency(names, adj);
}

double gaussian_negloglik(const GaussianParams& params, const Dataset& ds, const RowPartition& part) {
  check_dims(params, ds, part);
  const Eigen::MatrixXd r = residuals(params, ds);
  double total = 0;
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    double rss = 0;
    for (int h : part.observed[j]) rss += r(h, j) * r(h, j);
    const double v = params.vars(j);
    total += 0.5 * static_cast<double>(part.observed[j].size()) * std::log(v) + rss / (2 * v);
  }
  return total;
}

Eigen::MatrixXd gaussian_negloglik_gradient(const GaussianParams& params, const Dataset& ds, const RowPartition& part) {
  check_dims(params, ds, part);
  const Eigen::MatrixXd r = residuals(params, ds);
  const auto p = static_cast<Eigen::Index>(ds.cols());
  Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(r.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (int h : part.observed[j]) masked(h, j) = r(h, j);
  }
  Eigen::MatrixXd grad = -ds.values().transpose() * masked;
  for (Eigen::Index j = 0; j < p; ++j) grad.col(j) /= params.vars(j);
  return grad;
}

GaussianLearner::GaussianLearner(const Dataset& data, const LearnOptions& opts, const PriorKnowledge& prior)
    : opts_(opts), n_(data.rows()), p_(data.cols()), x_(data.values()), dag_(data.names()) {
  if (data.kind() != DataKind::continuous) throw InputError("the Gaussian learner needs continuous data");
  if (n_ < 2) throw InputError("structure learning needs at least 2 observations");
  const PriorKnowledge checked = validate_prior(prior, data.names());
  mask_ = PriorMask(checked, p_);

  const auto p = static_cast<Eigen::Index>(p_);
  const RowPartition part = row_partition(data);
  intervened_ = part.intervened;
  observed_count_.resize(p);
  const Eigen::VectorXd full_sq = x_.colwise().squaredNorm().transpose();
  sq_.resize(p, p);
  resid_ = x_;
  for (Eigen::Index j = 0; j < p; ++j) {
    observed_count_(j) = static_cast<double>(part.observed[j].size());
    sq_.col(j) = full_sq;
    for (int h : intervened_[j]) {
      sq_.col(j) -= x_.row(h).transpose().cwiseAbs2();
      resid_(h, j) = 0;
    }
  }
  coef_ = Eigen::MatrixXd::Zero(p, p);
  vars_.resize(p);
  rss_.resize(p);
  zero_loss_.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    rss_(j) = resid_.col(j).squaredNorm();
    zero_loss_(j) = profiled_loss(static_cast<int>(j), rss_(j));
    vars_(j) = observed_count_(j) > 0 ? std::max(rss_(j) / observed_count_(j), opts_.var_floor) : 1.0;
  }
  reach_ = ReachabilityIndex(p_);
  for (const Edge& e : checked.whitelist) reach_.add_edge(dag_, e.parent, e.child);

  pen_.kind = opts_.penalty;
  pen_.gamma = opts_.concavity;
  if (pen_.kind == PenaltyKind::group_lasso) throw InputError("continuous data supports the l1 and mcp penalties");
  set_lambda(0.0);
  snapshot_gradients();
}

void GaussianLearner::set_lambda(double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be nonnegative");
  lambda_ = lambda;
  pen_.lambda = lambda / std::sqrt(static_cast<double>(n_));
  validate(pen_);
}

double GaussianLearner::objective() const {
  double total = 0;
  for (std::size_t j = 0; j < p_; ++j) {
    const double rss = resid_.col(static_cast<Eigen::Index>(j)).squaredNorm();
    total += 0.5 * observed_count_(j) * std::log(vars_(j)) + rss / (2 * vars_(j));
  }
  total /= static_cast<double>(n_);
  for (const Edge& e : dag_.edges()) {
    if (!mask_.required(e.parent, e.child)) total += penalty_value(pen_, coef_(e.parent, e.child));
  }
  return total;
}

double GaussianLearner::partial_target(int parent, int child, double* curvature) const {
  const double s = sq_(parent, child);
  *curvature = s / (static_cast<double>(n_) * vars_(child));
  return x_.col(parent).dot(resid_.col(child)) / s + coef_(parent, child);
}

GaussianLearner::Candidate GaussianLearner::candidate(int parent, int child) const {
  const double rss = rss_(child);
  const double s = sq_(parent, child);
  if (!(s > 0)) return {0.0, rss, rss};
  double c = 0;
  // The snapshot is current for a child whose residual has not moved.
  const double z = drift_(child) == 0 ? gram_(parent, child) / s + coef_(parent, child)
                                      : partial_target(parent, child, &c);
  c = s / (static_cast<double>(n_) * vars_(child));
  const double current = coef_(parent, child);
  const double dot = (z - current) * s;
  auto rss_at = [&](double beta) {
    const double d = beta - current;
    return std::max(rss - 2 * d * dot + d * d * s, 0.0);
  };
  const double beta = scalar_threshold(pen_, z, c);
  return {beta, rss_at(0.0), rss_at(beta)};
}

double GaussianLearner::profiled_loss(int child, double rss) const {
  const double m = observed_count_(child);
  if (m == 0) return 0.0;
  const double v = std::max(rss / m, opts_.var_floor);
  return (0.5 * m * std::log(v) + rss / (2 * v)) / static_cast<double>(n_);
}

void GaussianLearner::set_coef(int parent, int child, double value) {
  const double delta = value - coef_(parent, child);
  if (delta == 0) return;
  resid_.col(child) -= delta * x_.col(parent);
  for (int h : intervened_[child]) resid_(h, child) = 0;
  drift_(child) += std::abs(delta) * std::sqrt(sq_(parent, child));
  rss_(child) = resid_.col(child).squaredNorm();
  zero_loss_(child) = profiled_loss(child, rss_(child));
  coef_(parent, child) = value;
  max_change_ = std::max(max_change_, std::abs(delta));
}

void GaussianLearner::refit_required(int parent, int child) {
  if (!(sq_(parent, child) > 0)) return;
  double c = 0;
  set_coef(parent, child, partial_target(parent, child, &c));
}

void GaussianLearner::check_descent(double before) {
  const double after = objective();
  if (after > before + 1e-10 * std::max(1.0, std::abs(before))) ++violations_;
}

bool GaussianLearner::edge_block_update(int a, int b) {
  if (a == b) throw std::invalid_argument("edge block update needs two distinct nodes");
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= p_ || static_cast<std::size_t>(b) >= p_)
    throw std::out_of_range("node index out of range");
  if (a > b) std::swap(a, b);
  // A skipped pair has no edge and no admissible nonzero candidate, so the
  // update would leave every parameter as it is.
  if (screened_out(a, b)) return false;
  const double before = opts_.check_descent ? objective() : 0.0;

  if (mask_.required(a, b) || mask_.required(b, a)) {
    mask_.required(a, b) ? refit_required(a, b) : refit_required(b, a);
    if (opts_.check_descent) check_descent(before);
    return false;
  }
  const bool ab_allowed = !mask_.forbidden(a, b);
  const bool ba_allowed = !mask_.forbidden(b, a);
  if (!ab_allowed && !ba_allowed) return false;

  enum Option { kNone, kAB, kBA };
  const Option incumbent = coef_(a, b) != 0 ? kAB : coef_(b, a) != 0 ? kBA : kNone;
  if (incumbent == kAB) reach_.remove_edge(dag_, a, b);
  if (incumbent == kBA) reach_.remove_edge(dag_, b, a);

  // Each option is scored with the noise variances of a and b profiled out.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Candidate ab = candidate(a, b);
  const Candidate ba = candidate(b, a);
  const bool try_ab = ab_allowed && ab.value != 0;
  const bool try_ba = ba_allowed && ba.value != 0;
  if (incumbent == kNone && !try_ab && !try_ba) return false;
  // With the coefficient already at zero, rss_zero is the cached RSS.
  const double zero_a = incumbent == kBA ? profiled_loss(a, ba.rss_zero) : zero_loss_(a);
  const double zero_b = incumbent == kAB ? profiled_loss(b, ab.rss_zero) : zero_loss_(b);
  std::array<double, 3> score{zero_a + zero_b, kInf, kInf};
  if (try_ab) score[kAB] = zero_a + profiled_loss(b, ab.rss) + penalty_value(pen_, ab.value);
  if (try_ba) score[kBA] = profiled_loss(a, ba.rss) + zero_b + penalty_value(pen_, ba.value);

  // Ties go to the incumbent, then to no edge, then to low -> high. A
  // direction that would close a cycle is dropped, checked only when it
  // would otherwise win.
  std::array<Option, 3> preference{kNone, kAB, kBA};
  if (incumbent == kAB) preference = {kAB, kNone, kBA};
  if (incumbent == kBA) preference = {kBA, kNone, kAB};
  Option choice = kNone;
  for (;;) {
    const double best = *std::min_element(score.begin(), score.end());
    for (Option o : preference) {
      if (score[o] == best) {
        choice = o;
        break;
      }
    }
    if (choice == kAB && reach_.has_path(dag_, b, a)) score[kAB] = kInf;
    else if (choice == kBA && reach_.has_path(dag_, a, b)) score[kBA] = kInf;
    else break;
  }

  set_coef(a, b, choice == kAB ? ab.value : 0.0);
  set_coef(b, a, choice == kBA ? ba.value : 0.0);
  if (choice == kAB) reach_.add_edge(dag_, a, b);
  if (choice == kBA) reach_.add_edge(dag_, b, a);
  for (int j : {a, b}) {
    if (observed_count_(j) > 0)
      vars_(j) = std::max(rss_(j) / observed_count_(j), opts_.var_floor);
  }

  if (opts_.check_descent) check_descent(before);
  return choice != incumbent;
}

double GaussianLearner::node_pass(int j) {
  const double before = opts_.check_descent ? objective() : 0.0;
  double change = 0;
  const std::vector<int> parents = dag_.parents(j);
  for (int k : parents) {
    const double old = coef_(k, j);
    if (mask_.required(k, j)) {
      refit_required(k, j);
    } else {
      double c = 0;
      const double z = partial_target(k, j, &c);
      const double beta = scalar_threshold(pen_, z, c);
      set_coef(k, j, beta);
      if (beta == 0) reach_.remove_edge(dag_, k, j);
    }
    change = std::max(change, std::abs(coef_(k, j) - old));
  }
  if (observed_count_(j) > 0) {
    const double v = std::max(rss_(j) / observed_count_(j), opts_.var_floor);
    change = std::max(change, std::abs(v - vars_(j)));
    vars_(j) = v;
  }
  if (opts_.check_descent) check_descent(before);
  return change;
}

std::size_t GaussianLearner::inner_sweep() {
  constexpr std::size_t kMaxPasses = 1000;
  std::size_t most = 0;
  for (std::size_t jj = 0; jj < p_; ++jj) {
    const int j = static_cast<int>(jj);
    std::size_t passes = 0;
    while (passes < kMaxPasses) {
      ++passes;
      if (node_pass(j) < opts_.error_tol || dag_.parents(j).empty()) break;
    }
    most = std::max(most, passes);
  }
  return most;
}

void GaussianLearner::snapshot_gradients() {
  reach_.rebuild(dag_);
  gram_ = x_.transpose() * resid_;
  drift_.setZero(static_cast<Eigen::Index>(p_));
}

bool GaussianLearner::screened_out(int a, int b) const {
  if (coef_(a, b) != 0 || coef_(b, a) != 0 || mask_.pair_fixed(a, b)) return false;
  // |x_parent . r_child| is at most the snapshot value plus the drift bound;
  // thresholding is monotone in |z|, so a zero at the bound is a zero for
  // the true target.
  auto surely_zero = [&](int parent, int child) {
    if (mask_.forbidden(parent, child)) return true;
    const double s = sq_(parent, child);
    if (!(s > 0)) return true;
    const double bound = std::abs(gram_(parent, child)) + std::sqrt(s) * drift_(child);
    const double c = s / (static_cast<double>(n_) * vars_(child));
    return scalar_threshold(pen_, bound / s, c) == 0;
  };
  return surely_zero(a, b) && surely_zero(b, a);
}

PathEstimate GaussianLearner::solve(double lambda) {
  const auto start = std::chrono::steady_clock::now();
  set_lambda(lambda);
  const std::size_t max_iters = opts_.max_iters.value_or(std::max<std::size_t>(10, 2 * p_));
  const int p = static_cast<int>(p_);
  bool converged = false;
  std::size_t iters = 0;
  while (iters < max_iters) {
    ++iters;
    max_change_ = 0;
    bool changed = false;
    snapshot_gradients();
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) changed |= edge_block_update(a, b);
    }
    const double outer_change = max_change_;
    inner_sweep();
    if (!changed && outer_change < opts_.error_tol) {
      converged = true;
      break;
    }
  }
  if (!converged && opts_.verbose)
    std::clog << "warning: lambda " << lambda << " stopped after " << iters << " outer iterations\n";
  PathEstimate est;
  est.dag = dag_;
  est.lambda = lambda;
  est.nedge = dag_.num_edges();
  est.pp = p_;
  est.nn = n_;
  est.converged = converged;
  est.iterations = iters;
  est.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

GaussianParams GaussianLearner::params() const {
  GaussianParams out = GaussianParams::empty(p_);
  std::vector<Eigen::Triplet<double>> t;
  for (const Edge& e : dag_.edges()) t.emplace_back(e.parent, e.child, coef_(e.parent, e.child));
  out.coefs.setFromTriplets(t.begin(), t.end());
  out.vars = vars_;
  return out;
}

SolutionPath estimate_dag_gaussian(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior) {
  if (ds.kind() != DataKind::continuous) throw InputError("estimate_dag_gaussian needs continuous data");
  if (ds.rows() < 2) throw InputError("structure learning needs at least 2 observations");
  const Standardization st = standardize(ds);
  const std::vector<double> lambdas = resolve_lambdas(ds, opts, prior);
  GaussianLearner learner(st.data, opts, prior);

  SolutionPath path;
  path.nodes = ds.names();
  path.n = ds.rows();
  path.p = ds.cols();
  path.kind = DataKind::continuous;
  const std::size_t threshold = opts.edge_threshold.value_or(10 * ds.cols());
  for (double lambda : lambdas) {
    path.estimates.push_back(learner.solve(lambda));
    if (opts.verbose)
      std::clog << "lambda " << lambda << ": " << path.estimates.back().nedge << " edges\n";
    if (path.estimates.back().nedge > threshold) break;
  }
  path.descent_violations = learner.descent_violations();
  return path;
}

}  // namespace dagpath
