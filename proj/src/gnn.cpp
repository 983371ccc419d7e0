#include "mfstab/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfstab/errors.hpp"

namespace mfstab {

namespace {

Eigen::VectorXd random_ball_point(std::size_t dim, double radius, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v * (radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)) / norm);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void GnnProblem::validate() const {
  const auto n = y.size();
  if (x.rows() != n) throw InvalidInput("feature matrix rows do not match the label count");
  if (x.cols() != w.size()) throw InvalidInput("weight length does not match the feature width");
  if (mask.size() != static_cast<std::size_t>(n)) throw InvalidInput("mask size mismatch");
  if (!(gamma_reg > 0.0)) throw InvalidInput("gamma_reg must be positive");
  if (!x.allFinite() || !y.allFinite() || !w.allFinite())
    throw InvalidInput("non-finite GNN problem data");
}

const char* gnn_method_name(GnnMethod m) {
  return m == GnnMethod::masked_closed_form ? "masked-closed-form" : "exact-rowwise";
}

Eigen::MatrixXd mask_matrix(const ReceptiveFieldMap& mask) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < mask.size(); ++i)
    for (std::size_t j : mask.field(i))
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

GnnSolution fit_masked_closed_form(const GnnProblem& p) {
  p.validate();
  const Eigen::VectorXd v = p.v();
  GnnSolution s;
  s.method = GnnMethod::masked_closed_form;
  // Index-order sum.
  double den = p.gamma_reg;
  for (Eigen::Index k = 0; k < v.size(); ++k) den += v[k] * v[k];
  s.a = mask_matrix(p.mask).cwiseProduct(p.y * v.transpose()) / den;
  s.objective = gnn_objective(p, s.a);
  return s;
}

GnnSolution fit_exact_rowwise(const GnnProblem& p) {
  p.validate();
  const Eigen::VectorXd v = p.v();
  const auto n = static_cast<Eigen::Index>(p.size());
  GnnSolution s;
  s.method = GnnMethod::exact_rowwise;
  s.a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    double den = p.gamma_reg;
    for (std::size_t k : p.mask.field(i)) den += v[static_cast<Eigen::Index>(k)] * v[static_cast<Eigen::Index>(k)];
    for (std::size_t j : p.mask.field(i)) {
      const auto col = static_cast<Eigen::Index>(j);
      s.a(row, col) = p.y[row] * v[col] / den;
    }
  }
  s.objective = gnn_objective(p, s.a);
  return s;
}

GnnSolution fit_gnn(const GnnProblem& p, GnnMethod method) {
  return method == GnnMethod::masked_closed_form ? fit_masked_closed_form(p) : fit_exact_rowwise(p);
}

double gnn_objective(const GnnProblem& p, const Eigen::MatrixXd& a) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (a.rows() != n || a.cols() != n) throw InvalidInput("A must be N x N");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) != 0.0 && !p.mask.contains(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
        throw InvalidInput("A has support outside the mask at (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")");
  const Eigen::VectorXd r = p.y - a * p.v();
  return 0.5 * r.squaredNorm() + 0.5 * p.gamma_reg * a.squaredNorm();
}

Eigen::MatrixXd gnn_gradient(const GnnProblem& p, const Eigen::MatrixXd& a) {
  const Eigen::VectorXd v = p.v();
  return -(p.y - a * v) * v.transpose() + p.gamma_reg * a;
}

GnnProblem random_gnn_problem(const ReceptiveFieldMap& mask, const GnnInstanceLaw& law,
                              std::uint64_t seed) {
  if (law.feature_dim == 0) throw InvalidInput("feature dimension must be positive");
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(mask.size());
  GnnProblem p;
  p.mask = mask;
  p.gamma_reg = law.gamma_reg;
  p.x.resize(n, static_cast<Eigen::Index>(law.feature_dim));
  for (Eigen::Index i = 0; i < n; ++i)
    p.x.row(i) = random_ball_point(law.feature_dim, law.feature_bound, rng).transpose();
  p.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.y[i] = rng.uniform(-law.label_bound, law.label_bound);
  p.w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(law.feature_dim),
                                  law.weight_norm / std::sqrt(static_cast<double>(law.feature_dim)));
  return p;
}

Eigen::MatrixXd random_test_vectors(std::size_t n, std::size_t count, const GnnInstanceLaw& law,
                                    const Eigen::VectorXd& w, Rng& rng) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      v(i, c) = random_ball_point(law.feature_dim, law.feature_bound, rng).dot(w);
  return v;
}

std::vector<double> test_loss_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_prime,
                                  const Eigen::MatrixXd& test_v, double v_bound,
                                  double label_bound) {
  const Eigen::Index n = a.rows();
  std::vector<double> gap(static_cast<std::size_t>(n), 0.0);
  const Eigen::MatrixXd diff = a - a_prime;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index j = 0; j < n; ++j)
    if (diff.row(j).cwiseAbs().maxCoeff() > 0.0) rows.push_back(j);
  if (rows.empty()) return gap;
  const Eigen::MatrixXd sum = a + a_prime;
  Eigen::MatrixXd d_rows(static_cast<Eigen::Index>(rows.size()), n);
  Eigen::MatrixXd s_rows(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    d_rows.row(static_cast<Eigen::Index>(r)) = diff.row(rows[r]);
    s_rows.row(static_cast<Eigen::Index>(r)) = sum.row(rows[r]);
  }
  // (p - y')^2 - (p' - y')^2 = (p - p')(p + p' - 2y'); its sup over
  // |y'| <= B_y is |p - p'| (|p + p'| + 2 B_y).
  auto value = [label_bound](double dp, double sp) {
    return std::abs(dp) * (std::abs(sp) + 2.0 * label_bound);
  };
  if (test_v.cols() > 0) {
    const Eigen::MatrixXd dp = d_rows * test_v;
    const Eigen::MatrixXd sp = s_rows * test_v;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double best = 0.0;
      for (Eigen::Index c = 0; c < test_v.cols(); ++c)
        best = std::max(best, value(dp(static_cast<Eigen::Index>(r), c), sp(static_cast<Eigen::Index>(r), c)));
      gap[static_cast<std::size_t>(rows[r])] = best;
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto d = d_rows.row(static_cast<Eigen::Index>(r));
    const auto s = s_rows.row(static_cast<Eigen::Index>(r));
    Eigen::VectorXd corner_d(n), corner_s(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      corner_d[k] = v_bound * sign_of(d[k]);
      corner_s[k] = v_bound * sign_of(s[k]);
    }
    double& best = gap[static_cast<std::size_t>(rows[r])];
    best = std::max(best, value(d.dot(corner_d), s.dot(corner_d)));
    best = std::max(best, value(d.dot(corner_s), s.dot(corner_s)));
  }
  return gap;
}

GnnStabilityResult gnn_stability_experiment(const Graph& g, GnnPerturbation kind,
                                            std::size_t trials,
                                            const GnnExperimentOptions& opt,
                                            std::uint64_t seed) {
  const auto& law = opt.law;
  if (trials == 0) throw InvalidInput("need at least one trial");
  if (kind == GnnPerturbation::feature &&
      !(opt.epsilon_feature > 0.0 && opt.epsilon_feature < 0.1 * law.feature_bound))
    throw InvalidInput("feature perturbation epsilon must lie in (0, 0.1 B_X)");
  const auto rf = ReceptiveFieldMap::one_hop(g);
  const std::size_t n = g.size();
  const auto stats = sparsity_stats(rf);
  GnnStabilityResult res;
  res.n = n;
  res.sup_d = stats.sup_d;
  res.inf_d = stats.inf_d;
  res.kind = kind;
  res.trials = trials;
  res.seed = seed;
  res.beta1_i.assign(n, 0.0);
  res.beta2_i.assign(n, 0.0);
  const double v_bound = law.feature_bound * law.weight_norm;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const GnnProblem p = random_gnn_problem(rf, law, derive_seed(seed, "gnn/instance", {trial}));
    const GnnSolution base = fit_gnn(p, opt.method);
    Rng test_rng(derive_seed(seed, "gnn/test", {trial}));
    const Eigen::MatrixXd test_v = random_test_vectors(n, opt.test_draws, law, p.w, test_rng);
    const Eigen::VectorXd w_hat = p.w.normalized();
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (double sgn : {1.0, -1.0}) {
        GnnProblem q = p;
        if (kind == GnnPerturbation::label)
          q.y[row] = sgn * law.label_bound;
        else
          q.x.row(row) += sgn * opt.epsilon_feature * w_hat.transpose();
        const GnnSolution moved = fit_gnn(q, opt.method);
        const auto gap = test_loss_gap(base.a, moved.a, test_v, v_bound, law.label_bound);
        for (std::size_t j = 0; j < n; ++j) {
          res.beta2_i[i] = std::max(res.beta2_i[i], gap[j]);
          if (!rf.contains(i, j)) res.beta1_i[i] = std::max(res.beta1_i[i], gap[j]);
        }
      }
    }
  }
  res.gap_inf = std::numeric_limits<double>::infinity();
  res.gap_sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    res.beta1 = std::max(res.beta1, res.beta1_i[i]);
    res.beta2 = std::max(res.beta2, res.beta2_i[i]);
    res.gap_inf = std::min(res.gap_inf, res.beta2_i[i] - res.beta1_i[i]);
    res.gap_sup = std::max(res.gap_sup, res.beta2_i[i] - res.beta1_i[i]);
  }
  res.discrepancy = res.beta2 - res.beta1;
  return res;
}

}  // namespace mfstab
