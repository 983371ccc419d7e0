#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mfstab/graph.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

/// One-layer linear GNN y_hat = A X w with A supported on `mask`.
struct GnnProblem {
  Eigen::MatrixXd x;  ///< N x m features
  Eigen::VectorXd y;  ///< labels
  Eigen::VectorXd w;  ///< fixed weight, length m
  ReceptiveFieldMap mask;
  double gamma_reg = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  Eigen::VectorXd v() const { return x * w; }
  void validate() const;
};

enum class GnnMethod { masked_closed_form, exact_rowwise };

const char* gnn_method_name(GnnMethod m);

struct GnnSolution {
  Eigen::MatrixXd a;
  GnnMethod method = GnnMethod::masked_closed_form;
  double objective = 0.0;
};

/// 0/1 matrix of the mask support.
Eigen::MatrixXd mask_matrix(const ReceptiveFieldMap& mask);

/// Pi (x) (y v^T / (gamma + ||v||^2)), v = X w.
GnnSolution fit_masked_closed_form(const GnnProblem& p);

/// Support-constrained minimizer; rows decouple:
/// A_ij = y_i v_j 1[j in Xi(i)] / (gamma + sum_{k in Xi(i)} v_k^2).
GnnSolution fit_exact_rowwise(const GnnProblem& p);

GnnSolution fit_gnn(const GnnProblem& p, GnnMethod method);

/// 1/2 ||y - A v||^2 + gamma/2 ||A||_F^2. Throws InvalidInput when A has
/// support off the mask.
double gnn_objective(const GnnProblem& p, const Eigen::MatrixXd& a);

/// Unmasked gradient -(y - A v) v^T + gamma A.
Eigen::MatrixXd gnn_gradient(const GnnProblem& p, const Eigen::MatrixXd& a);

struct GnnInstanceLaw {
  std::size_t feature_dim = 3;
  double feature_bound = 1.0;
  double label_bound = 1.0;
  double weight_norm = 1.0;
  double gamma_reg = 1.0;
};

/// Random problem on `mask`: rows of X uniform in the B_X ball, labels
/// uniform in [-B_y, B_y], w of norm `weight_norm` along a fixed direction.
GnnProblem random_gnn_problem(const ReceptiveFieldMap& mask, const GnnInstanceLaw& law,
                              std::uint64_t seed);

/// N x K matrix whose columns are test vectors v' = X' w for random
/// test feature matrices X'.
Eigen::MatrixXd random_test_vectors(std::size_t n, std::size_t count, const GnnInstanceLaw& law,
                                    const Eigen::VectorXd& w, Rng& rng);

/// Per test vertex j, the sup over the test label y'_j in [-B_y, B_y] and
/// over the supplied test vectors plus sign corners of
/// |(A v')_j - y'_j|^2 - |(A' v')_j - y'_j|^2.
std::vector<double> test_loss_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_prime,
                                  const Eigen::MatrixXd& test_v, double v_bound,
                                  double label_bound);

enum class GnnPerturbation { label, feature };

struct GnnExperimentOptions {
  GnnInstanceLaw law;
  GnnMethod method = GnnMethod::masked_closed_form;
  std::size_t test_draws = 256;
  double epsilon_feature = 1e-3;
};

struct GnnStabilityResult {
  std::size_t n = 0;
  double sup_d = 0.0;
  double inf_d = 0.0;
  GnnPerturbation kind = GnnPerturbation::label;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double discrepancy = 0.0;
  double gap_inf = 0.0;  ///< inf_i (beta2_i - beta1_i)
  double gap_sup = 0.0;  ///< sup_i (beta2_i - beta1_i)
  std::vector<double> beta1_i;
  std::vector<double> beta2_i;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Fits the GNN on `trials` random instances on the one-hop mask of g,
/// perturbs every vertex in turn and measures the loss gaps.
/// Feature mode rejects epsilon_feature >= 0.1 B_X.
GnnStabilityResult gnn_stability_experiment(const Graph& g, GnnPerturbation kind,
                                            std::size_t trials,
                                            const GnnExperimentOptions& opt,
                                            std::uint64_t seed);

}  // namespace mfstab
