#include <dagpath/discrete.hpp>

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

Eigen::RowVectorXd softmax(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  Eigen::RowVectorXd e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

void check_params(const DiscreteParams& params, const Dataset& ds, const RowPartition& part, int j) {
  if (ds.kind() != DataKind::discrete) throw std::invalid_argument("multi-logit likelihood needs discrete data");
  const std::size_t p = ds.cols();
  if (params.size() != p || params.blocks.size() != p * p || params.intercepts.size() != p ||
      part.observed.size() != p)
    throw std::invalid_argument("parameter dimensions do not match the dataset");
  if (j < 0 || static_cast<std::size_t>(j) >= p) throw std::out_of_range("node index out of range");
  for (std::size_t i = 0; i < p; ++i) {
    if (params.levels[i] != ds.num_levels(i)) throw std::invalid_argument("parameter levels do not match the dataset");
  }
}

}  // namespace

DiscreteParams DiscreteParams::empty(const std::vector<int>& levels) {
  DiscreteParams out;
  out.levels = levels;
  for (int r : levels) out.intercepts.push_back(Eigen::VectorXd::Zero(r));
  out.blocks.resize(levels.size() * levels.size());
  out.separated.assign(levels.size(), false);
  return out;
}

bool DiscreteParams::has_block(int parent, int child) const {
  const auto& b = block(parent, child);
  return b.size() != 0 && b.cwiseAbs().maxCoeff() != 0;
}

Dag DiscreteParams::support(const std::vector<std::string>& names) const {
  Dag dag(names);
  const int p = static_cast<int>(size());
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      if (i != j && has_block(i, j) && dag.add_edge_checked(i, j) == EdgeOutcome::would_cycle)
        throw InputError("discrete parameters have a cyclic support");
    }
  }
  return dag;
}

Eigen::VectorXd multilogit_prob(const DiscreteParams& params, int j, const Eigen::Ref<const Eigen::VectorXi>& row) {
  const int p = static_cast<int>(params.size());
  if (j < 0 || j >= p) throw std::out_of_range("node index out of range");
  if (row.size() != p) throw std::invalid_argument("row length does not match the parameters");
  Eigen::RowVectorXd eta = params.intercepts[j].transpose();
  for (int i = 0; i < p; ++i) {
    const auto& b = params.block(i, j);
    if (i == j || b.size() == 0) continue;
    const int k = row(i);
    if (k < 0 || k >= params.levels[i]) throw std::out_of_range("level out of range for node " + std::to_string(i));
    if (k < params.levels[i] - 1) eta += b.row(k);
  }
  return softmax(eta).transpose();
}

double multilogit_negloglik(const DiscreteParams& params, const Dataset& ds, const RowPartition& part, int j) {
  check_params(params, ds, part, j);
  double total = 0;
  for (int h : part.observed[j]) {
    const Eigen::VectorXi row = ds.values().row(h).transpose().cast<int>();
    const Eigen::VectorXd prob = multilogit_prob(params, j, row);
    total -= std::log(prob(row(j)));
  }
  return total;
}

DiscreteParams multilogit_negloglik_gradient(const DiscreteParams& params, const Dataset& ds,
                                             const RowPartition& part, int j) {
  check_params(params, ds, part, j);
  const int p = static_cast<int>(params.size());
  DiscreteParams grad = DiscreteParams::empty(params.levels);
  for (int i = 0; i < p; ++i) {
    if (i != j && params.block(i, j).size() != 0) grad.block(i, j) = Eigen::MatrixXd::Zero(params.levels[i] - 1, params.levels[j]);
  }
  for (int h : part.observed[j]) {
    const Eigen::VectorXi row = ds.values().row(h).transpose().cast<int>();
    Eigen::VectorXd resid = multilogit_prob(params, j, row);
    resid(row(j)) -= 1.0;
    grad.intercepts[j] += resid;
    for (int i = 0; i < p; ++i) {
      auto& g = grad.block(i, j);
      if (g.size() != 0 && row(i) < params.levels[i] - 1) g.row(row(i)) += resid.transpose();
    }
  }
  return grad;
}

DiscreteLearner::DiscreteLearner(const Dataset& data, const LearnOptions& opts, const PriorKnowledge& prior)
    : opts_(opts), n_(data.rows()), p_(data.cols()), dag_(data.names()) {
  if (data.kind() != DataKind::discrete) throw InputError("the discrete learner needs discrete data");
  if (n_ < 2) throw InputError("structure learning needs at least 2 observations");
  if (!(opts_.upperbound > 0)) throw InputError("upperbound must be positive");
  if (!(opts_.weight_scale >= 0)) throw InputError("weight scale must be nonnegative");
  const PriorKnowledge checked = validate_prior(prior, data.names());
  mask_ = PriorMask(checked, p_);

  x_ = data.values().cast<int>();
  observed_ = row_partition(data).observed;
  for (std::size_t j = 0; j < p_; ++j) levels_.push_back(data.num_levels(j));
  blocks_.resize(p_ * p_);
  intercept_.resize(p_);
  eta_.resize(p_);
  resid_.resize(p_);
  loss_.assign(p_, 0.0);
  for (std::size_t jj = 0; jj < p_; ++jj) {
    const int j = static_cast<int>(jj);
    const int r = levels_[jj];
    // Null-model intercepts: log odds of each level against the reference.
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(r);
    for (int h : observed_[jj]) counts(x_(h, j)) += 1;
    intercept_[jj] = Eigen::VectorXd::Zero(r);
    for (int u = 0; u + 1 < r && !observed_[jj].empty(); ++u) {
      const double tiny = std::numeric_limits<double>::min();
      const double v = std::log(std::max(counts(u), tiny) / std::max(counts(r - 1), tiny));
      intercept_[jj](u) = std::clamp(v, -opts_.upperbound, opts_.upperbound);
    }
    eta_[jj] = intercept_[jj].transpose().replicate(static_cast<Eigen::Index>(observed_[jj].size()), 1);
    loss_[jj] = node_loss(j, eta_[jj]);
    resid_[jj] = residuals(j, eta_[jj]);
  }
  for (const Edge& e : checked.whitelist) dag_.add_edge_checked(e.parent, e.child);
  set_lambda(0.0);
}

void DiscreteLearner::set_lambda(double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be nonnegative");
  lambda_ = lambda;
  lambda_eff_ = lambda / std::sqrt(static_cast<double>(n_));
}

double DiscreteLearner::weight(int parent, int child) const {
  return opts_.weight_scale * std::sqrt(static_cast<double>((levels_[parent] - 1) * levels_[child]));
}

double DiscreteLearner::node_loss(int child, const Eigen::MatrixXd& eta) const {
  const auto& rows = observed_[child];
  if (rows.empty()) return 0.0;
  const Eigen::VectorXd top = eta.rowwise().maxCoeff();
  double total = (top.array() + (eta.colwise() - top).array().exp().rowwise().sum().log()).sum();
  for (std::size_t t = 0; t < rows.size(); ++t) total -= eta(static_cast<Eigen::Index>(t), x_(rows[t], child));
  return total;
}

Eigen::MatrixXd DiscreteLearner::residuals(int child, const Eigen::MatrixXd& eta) const {
  Eigen::MatrixXd prob = (eta.colwise() - eta.rowwise().maxCoeff()).array().exp().matrix();
  prob.array().colwise() /= prob.rowwise().sum().array();
  const auto& rows = observed_[child];
  for (std::size_t t = 0; t < rows.size(); ++t) prob(static_cast<Eigen::Index>(t), x_(rows[t], child)) -= 1.0;
  return prob;
}

Eigen::MatrixXd DiscreteLearner::scatter_gradient(int parent, int child, const Eigen::MatrixXd& resid) const {
  const int d = levels_[parent] - 1;
  const int r = levels_[child];
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, r);
  const auto& rows = observed_[child];
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const int k = x_(rows[t], parent);
    if (k < d) g.row(k) += resid.row(static_cast<Eigen::Index>(t));
  }
  g.col(r - 1).setZero();
  return g;
}

void DiscreteLearner::add_block_scores(int parent, int child, const Eigen::MatrixXd& delta, Eigen::MatrixXd& eta) const {
  const int d = levels_[parent] - 1;
  const auto& rows = observed_[child];
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const int k = x_(rows[t], parent);
    if (k < d) eta.row(static_cast<Eigen::Index>(t)) += delta.row(k);
  }
}

DiscreteLearner::BlockFit DiscreteLearner::fit_block(int parent, int child, bool penalized,
                                                     std::size_t max_steps) const {
  const double n = static_cast<double>(n_);
  const int d = levels_[parent] - 1;
  const int r = levels_[child];
  const double w = weight(parent, child);
  Penalty pen{PenaltyKind::group_lasso, penalized ? lambda_eff_ : 0.0, 2.0, opts_.weight_scale};
  auto pen_value = [&](const Eigen::MatrixXd& W) { return penalized ? lambda_eff_ * w * W.norm() : 0.0; };

  const Eigen::MatrixXd& current = blocks_[static_cast<std::size_t>(parent) * p_ + child];
  BlockFit fit;
  if (current.size() == 0 && penalized) {
    // Zero block already optimal for this block: skip the prox iterations.
    const Eigen::MatrixXd g0 = scatter_gradient(parent, child, resid_[child]) / n;
    if (g0.norm() <= lambda_eff_ * w) {
      fit.eta = eta_[child];
      fit.loss = loss_[child];
      return fit;
    }
  }
  Eigen::MatrixXd W = current.size() != 0 ? current : Eigen::MatrixXd::Zero(d, r);
  fit.eta = eta_[child];
  fit.loss = loss_[child];
  Eigen::MatrixXd eta_zero = eta_[child];
  double loss_zero = loss_[child];
  if (current.size() != 0) {
    add_block_scores(parent, child, -current, eta_zero);
    loss_zero = node_loss(child, eta_zero);
  }

  double smooth = fit.loss / n;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Eigen::MatrixXd G = block_gradient(parent, child, fit.eta) / n;
    double t = 1.0;
    Eigen::MatrixXd W_new, eta_new;
    double loss_new = 0;
    bool accepted = false;
    while (t > 1e-12) {
      Eigen::MatrixXd Z = W - t * G;
      Eigen::Map<Eigen::VectorXd> zv(Z.data(), Z.size());
      W_new = Z;
      if (penalized) {
        W_new *= group_shrink_factor(pen, zv.norm(), t, static_cast<Eigen::Index>(d) * r);
      }
      W_new = W_new.cwiseMax(-opts_.upperbound).cwiseMin(opts_.upperbound);
      W_new.col(r - 1).setZero();
      const Eigen::MatrixXd D = W_new - W;
      eta_new = fit.eta;
      add_block_scores(parent, child, D, eta_new);
      loss_new = node_loss(child, eta_new);
      const double bound = smooth + (G.array() * D.array()).sum() + D.squaredNorm() / (2 * t);
      if (loss_new / n <= bound + 1e-12 * std::max(1.0, std::abs(smooth))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    if (loss_new / n + pen_value(W_new) > smooth + pen_value(W)) break;
    const double change = (W_new - W).cwiseAbs().maxCoeff();
    W = std::move(W_new);
    fit.eta = std::move(eta_new);
    fit.loss = loss_new;
    smooth = loss_new / n;
    if (change < opts_.error_tol) break;
  }

  if (W.cwiseAbs().maxCoeff() == 0) {
    fit.value.resize(0, 0);
    fit.eta = std::move(eta_zero);
    fit.loss = loss_zero;
    fit.delta = 0;
    return fit;
  }
  fit.value = std::move(W);
  fit.delta = (fit.loss - loss_zero) / n + pen_value(fit.value);
  return fit;
}

void DiscreteLearner::apply_block(int parent, int child, BlockFit fit) {
  Eigen::MatrixXd& slot = blocks_[static_cast<std::size_t>(parent) * p_ + child];
  const int d = levels_[parent] - 1;
  const int r = levels_[child];
  const Eigen::MatrixXd before = slot.size() != 0 ? slot : Eigen::MatrixXd::Zero(d, r);
  const Eigen::MatrixXd after = fit.value.size() != 0 ? fit.value : Eigen::MatrixXd::Zero(d, r);
  max_change_ = std::max(max_change_, (after - before).cwiseAbs().maxCoeff());
  slot = std::move(fit.value);
  eta_[child] = std::move(fit.eta);
  resid_[child] = residuals(child, eta_[child]);
  loss_[child] = fit.loss;
}

double DiscreteLearner::refresh_intercept(int child) {
  const auto& rows = observed_[child];
  if (rows.empty()) return 0;
  const int r = levels_[child];
  const double n = static_cast<double>(n_);
  double change = 0;
  for (int iter = 0; iter < 20; ++iter) {
    const Eigen::MatrixXd& resid = resid_[child];
    Eigen::VectorXd g = resid.colwise().sum().transpose();
    Eigen::VectorXd h = Eigen::VectorXd::Zero(r);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      Eigen::RowVectorXd prob = resid.row(ti);
      prob(x_(rows[t], child)) += 1.0;
      h += (prob.array() * (1 - prob.array())).matrix().transpose();
    }
    g(r - 1) = 0;
    if (g.cwiseAbs().maxCoeff() / n < 0.1 * opts_.error_tol) break;
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(r);
    for (int u = 0; u + 1 < r; ++u) dir(u) = -g(u) / std::max(h(u), 1e-12);
    bool improved = false;
    for (double s = 1.0; s > 1e-10; s *= 0.5) {
      const Eigen::VectorXd next =
          (intercept_[child] + s * dir).cwiseMax(-opts_.upperbound).cwiseMin(opts_.upperbound);
      const Eigen::VectorXd delta = next - intercept_[child];
      Eigen::MatrixXd eta = eta_[child];
      eta.rowwise() += delta.transpose();
      const double loss = node_loss(child, eta);
      if (loss < loss_[child]) {
        change = std::max(change, delta.cwiseAbs().maxCoeff());
        intercept_[child] = next;
        eta_[child] = std::move(eta);
        resid_[child] = residuals(child, eta_[child]);
        loss_[child] = loss;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return change;
}

double DiscreteLearner::objective() const {
  double total = 0;
  for (double l : loss_) total += l;
  total /= static_cast<double>(n_);
  for (const Edge& e : dag_.edges()) {
    const auto& b = blocks_[static_cast<std::size_t>(e.parent) * p_ + e.child];
    if (!mask_.required(e.parent, e.child) && b.size() != 0) total += lambda_eff_ * weight(e.parent, e.child) * b.norm();
  }
  return total;
}

void DiscreteLearner::check_descent(double before) {
  const double after = objective();
  if (after > before + 1e-10 * std::max(1.0, std::abs(before))) ++violations_;
}

bool DiscreteLearner::edge_group_update(int a, int b) {
  if (a == b) throw std::invalid_argument("edge group update needs two distinct nodes");
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= p_ || static_cast<std::size_t>(b) >= p_)
    throw std::out_of_range("node index out of range");
  if (a > b) std::swap(a, b);
  constexpr std::size_t kBlockSteps = 50;
  const double before = opts_.check_descent ? objective() : 0.0;

  if (mask_.pair_fixed(a, b)) {
    const bool ab = mask_.required(a, b);
    apply_block(ab ? a : b, ab ? b : a, fit_block(ab ? a : b, ab ? b : a, false, kBlockSteps));
    if (opts_.check_descent) check_descent(before);
    return false;
  }
  const bool ab_allowed = !mask_.forbidden(a, b);
  const bool ba_allowed = !mask_.forbidden(b, a);
  if (!ab_allowed && !ba_allowed) return false;

  enum Option { kNone, kAB, kBA };
  const auto slot = [&](int i, int j) -> const Eigen::MatrixXd& { return blocks_[static_cast<std::size_t>(i) * p_ + j]; };
  const Option incumbent = slot(a, b).size() != 0 ? kAB : slot(b, a).size() != 0 ? kBA : kNone;
  if (incumbent == kAB) dag_.remove_edge(a, b);
  if (incumbent == kBA) dag_.remove_edge(b, a);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<BlockFit, 3> cand{};
  std::array<double, 3> delta{0.0, kInf, kInf};
  if (ab_allowed && !dag_.has_path(b, a)) {
    cand[kAB] = fit_block(a, b, true, kBlockSteps);
    if (cand[kAB].value.size() != 0) delta[kAB] = cand[kAB].delta;
  }
  if (ba_allowed && !dag_.has_path(a, b)) {
    cand[kBA] = fit_block(b, a, true, kBlockSteps);
    if (cand[kBA].value.size() != 0) delta[kBA] = cand[kBA].delta;
  }

  const double best_delta = *std::min_element(delta.begin(), delta.end());
  std::array<Option, 3> preference{kNone, kAB, kBA};
  if (incumbent == kAB) preference = {kAB, kNone, kBA};
  if (incumbent == kBA) preference = {kBA, kNone, kAB};
  Option choice = kNone;
  for (Option o : preference) {
    if (delta[o] == best_delta) {
      choice = o;
      break;
    }
  }

  auto zero_block = [&](int i, int j) {
    BlockFit fit;
    fit.eta = eta_[j];
    add_block_scores(i, j, -slot(i, j), fit.eta);
    fit.loss = node_loss(j, fit.eta);
    apply_block(i, j, std::move(fit));
  };
  if (incumbent == kAB && choice != kAB) zero_block(a, b);
  if (incumbent == kBA && choice != kBA) zero_block(b, a);
  if (choice == kAB) {
    apply_block(a, b, std::move(cand[kAB]));
    dag_.add_edge_checked(a, b);
  }
  if (choice == kBA) {
    apply_block(b, a, std::move(cand[kBA]));
    dag_.add_edge_checked(b, a);
  }

  if (opts_.check_descent) check_descent(before);
  return choice != incumbent;
}

double DiscreteLearner::inner_pass() {
  constexpr std::size_t kBlockSteps = 10;
  const double before = opts_.check_descent ? objective() : 0.0;
  const double saved = max_change_;
  max_change_ = 0;
  for (std::size_t jj = 0; jj < p_; ++jj) {
    const int j = static_cast<int>(jj);
    const std::vector<int> parents = dag_.parents(j);
    for (int i : parents) {
      const bool required = mask_.required(i, j);
      BlockFit fit = fit_block(i, j, !required, kBlockSteps);
      const bool dropped = fit.value.size() == 0 && !required;
      apply_block(i, j, std::move(fit));
      if (dropped) dag_.remove_edge(i, j);
    }
  }
  for (std::size_t j = 0; j < p_; ++j) max_change_ = std::max(max_change_, refresh_intercept(static_cast<int>(j)));
  const double change = max_change_;
  max_change_ = std::max(saved, change);
  if (opts_.check_descent) check_descent(before);
  return change;
}

std::size_t DiscreteLearner::inner_sweep() {
  constexpr std::size_t kMaxPasses = 1000;
  std::size_t passes = 0;
  while (passes < kMaxPasses) {
    ++passes;
    if (inner_pass() < opts_.error_tol) break;
  }
  return passes;
}

PathEstimate DiscreteLearner::solve(double lambda) {
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
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) changed |= edge_group_update(a, b);
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

double DiscreteLearner::max_zero_block_gradient() const {
  const double n = static_cast<double>(n_);
  double best = 0;
  for (std::size_t jj = 0; jj < p_; ++jj) {
    const int j = static_cast<int>(jj);
    if (observed_[jj].empty()) continue;
    for (std::size_t ii = 0; ii < p_; ++ii) {
      const int i = static_cast<int>(ii);
      if (i == j || mask_.forbidden(i, j) || mask_.required(i, j)) continue;
      if (blocks_[ii * p_ + jj].size() != 0) continue;
      const double w = weight(i, j);
      if (w == 0) continue;
      best = std::max(best, scatter_gradient(i, j, resid_[jj]).norm() / n / w);
    }
  }
  return best;
}

DiscreteParams DiscreteLearner::params() const {
  DiscreteParams out = DiscreteParams::empty(levels_);
  out.intercepts = intercept_;
  for (const Edge& e : dag_.edges()) {
    const auto& b = blocks_[static_cast<std::size_t>(e.parent) * p_ + e.child];
    out.block(e.parent, e.child) =
        b.size() != 0 ? b : Eigen::MatrixXd::Zero(levels_[e.parent] - 1, levels_[e.child]);
  }
  return out;
}

double discrete_lambda_max(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior) {
  DiscreteLearner learner(ds, opts, prior);
  learner.set_lambda(std::numeric_limits<double>::max());
  learner.inner_sweep();
  const double g = learner.max_zero_block_gradient();
  const double root_n = std::sqrt(static_cast<double>(ds.rows()));
  if (!(g > 0)) return root_n;
  return root_n * g * (1 + 1e-9);
}

SolutionPath estimate_dag_discrete(const Dataset& ds, const LearnOptions& opts, const PriorKnowledge& prior) {
  if (ds.kind() != DataKind::discrete) throw InputError("estimate_dag_discrete needs discrete data");
  const std::vector<double> lambdas = resolve_lambdas(ds, opts, prior);
  DiscreteLearner learner(ds, opts, prior);

  SolutionPath path;
  path.nodes = ds.names();
  path.n = ds.rows();
  path.p = ds.cols();
  path.kind = DataKind::discrete;
  const std::size_t threshold = opts.edge_threshold.value_or(3 * ds.cols());
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
