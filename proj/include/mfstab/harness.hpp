#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfstab/gnn.hpp"
#include "mfstab/graph.hpp"
#include "mfstab/objective.hpp"
#include "mfstab/sampler.hpp"
#include "mfstab/sgd.hpp"

namespace mfstab {

/// A deterministic learning algorithm A: Z -> h_Z. Parameters are returned
/// as a flat vector so that determinism can be checked bitwise.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string id() const = 0;
  /// Trains on one or more sample sets (pooled when more than one).
  virtual Eigen::VectorXd fit(std::span<const SampleSet> train) const = 0;
  /// L(h(T_j), Y_j) for every vertex j of `test`.
  virtual std::vector<double> vertex_losses(const Eigen::VectorXd& params,
                                            const SampleSet& test) const = 0;
  virtual double loss_bound() const = 0;

  Eigen::VectorXd fit(const SampleSet& z) const { return fit(std::span<const SampleSet>(&z, 1)); }
};

/// SGD on the receptive-field objective; the loss is the objective itself.
class SgdLearner final : public Learner {
 public:
  SgdLearner(Objective obj, ReceptiveFieldMap rf, SgdConfig cfg)
      : obj_(std::move(obj)), rf_(std::move(rf)), cfg_(std::move(cfg)) {}
  std::string id() const override { return "sgd-" + obj_.name(); }
  Eigen::VectorXd fit(std::span<const SampleSet> train) const override;
  std::vector<double> vertex_losses(const Eigen::VectorXd& params,
                                    const SampleSet& test) const override;
  double loss_bound() const override { return obj_.constants().loss_bound; }
  const Objective& objective() const { return obj_; }
  const SgdConfig& config() const { return cfg_; }

 private:
  Objective obj_;
  ReceptiveFieldMap rf_;
  SgdConfig cfg_;
};

/// Ignores the training data: h(T_j) = prediction, squared loss.
class ConstantLearner final : public Learner {
 public:
  ConstantLearner(double prediction, double label_bound)
      : prediction_(prediction), label_bound_(label_bound) {}
  std::string id() const override { return "constant"; }
  Eigen::VectorXd fit(std::span<const SampleSet> train) const override;
  std::vector<double> vertex_losses(const Eigen::VectorXd& params,
                                    const SampleSet& test) const override;
  double loss_bound() const override;

 private:
  double prediction_;
  double label_bound_;
};

/// The closed-form GNN on a single sample set, squared loss
/// ((A X' w)_j - y'_j)^2.
class GnnLearner final : public Learner {
 public:
  GnnLearner(ReceptiveFieldMap mask, Eigen::VectorXd w, double gamma_reg, GnnMethod method,
             double feature_bound, double label_bound)
      : mask_(std::move(mask)), w_(std::move(w)), gamma_reg_(gamma_reg), method_(method),
        feature_bound_(feature_bound), label_bound_(label_bound) {}
  std::string id() const override { return std::string("gnn-") + gnn_method_name(method_); }
  Eigen::VectorXd fit(std::span<const SampleSet> train) const override;
  std::vector<double> vertex_losses(const Eigen::VectorXd& params,
                                    const SampleSet& test) const override;
  double loss_bound() const override;
  const ReceptiveFieldMap& mask() const { return mask_; }

 private:
  ReceptiveFieldMap mask_;
  Eigen::VectorXd w_;
  double gamma_reg_;
  GnnMethod method_;
  double feature_bound_;
  double label_bound_;
};

/// Throws InvalidInput when two fits on the same data disagree.
void require_deterministic(const Learner& alg, const SampleSet& z);

struct HarnessOptions {
  std::size_t k = 8;        ///< training perturbation draws K
  std::size_t k_test = 8;   ///< test-set draws K'
  ReplaceMode mode = ReplaceMode::fresh_conditional;
  bool extreme_tests = true;  ///< also test on the sampler's extreme candidates
  std::size_t workers = 1;
};

struct VertexStability {
  double beta1 = 0.0;
  double beta2 = 0.0;
};

struct StabilityEstimate {
  std::vector<double> beta1_i;
  std::vector<double> beta2_i;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double mu = -1.0;  ///< negative when not estimated
  double discrepancy = 0.0;
  std::size_t k = 0;
  std::size_t k_test = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
};

/// Lower estimates of beta_{1,i} and beta_{2,i}: maxima of the per-vertex
/// loss differences between h_Z and h_{Z^i} over K perturbation pairs and
/// K' test sets (seed streams are nested in K and K').
VertexStability estimate_vertex_stability(const Learner& alg, const Sampler& sampler,
                                          const ReceptiveFieldMap& rf, std::size_t i,
                                          const HarnessOptions& opt, std::uint64_t seed);

StabilityEstimate estimate_stability(const Learner& alg, const Sampler& sampler,
                                     const ReceptiveFieldMap& rf, const HarnessOptions& opt,
                                     std::uint64_t seed);

/// m-graph stability: one vertex of one of the m pooled training sets is
/// replaced. Returns the max over m' = 1..m, so m = 1 reproduces the beta_2
/// pipeline on the same seeds.
double estimate_mu(const Learner& alg, const Sampler& sampler, std::size_t m,
                   const HarnessOptions& opt, std::uint64_t seed);

struct GapSample {
  double phi = 0.0;
  double train_risk = 0.0;
  double test_risk = 0.0;
  std::size_t test_graphs = 0;
  std::uint64_t seed = 0;
};

std::vector<GapSample> estimate_generalization_gap(const Learner& alg, const Sampler& sampler,
                                                   std::size_t test_graphs, std::size_t trials,
                                                   std::uint64_t seed);

constexpr std::size_t kMaxExhaustive = 8;

/// Exact oracle for binary-spin instances: fits on every configuration and
/// tabulates the losses on every test configuration.
class ExhaustiveOracle {
 public:
  ExhaustiveOracle(const Learner& alg, const IsingSpec& spec);

  std::size_t size() const { return n_; }
  std::size_t configurations() const { return configs_; }
  /// Exact beta_{1,i}, beta_{2,i} over the full cube (Z^i flips spin i).
  VertexStability vertex_stability(const ReceptiveFieldMap& rf, std::size_t i) const;
  StabilityEstimate stability(const ReceptiveFieldMap& rf) const;
  /// Largest loss change between h_Z and h_{Z^Lambda}, Lambda a bit mask,
  /// over all Z, test sets and test vertices.
  double shift(std::size_t lambda_mask) const;
  /// R(h_Z) under the Gibbs measure and R_hat_Z(h_Z) for configuration c.
  double risk(std::size_t c) const;
  double empirical_risk(std::size_t c) const;
  const std::vector<double>& probabilities() const { return prob_; }

 private:
  double loss(std::size_t fit, std::size_t test, std::size_t j) const {
    return losses_[(fit * configs_ + test) * n_ + j];
  }

  std::size_t n_;
  std::size_t configs_;
  std::vector<double> losses_;
  std::vector<double> prob_;
};

/// CSV: i, beta1_i, beta2_i, K, K', seed.
void write_stability_csv(std::ostream& out, const StabilityEstimate& est);

}  // namespace mfstab
