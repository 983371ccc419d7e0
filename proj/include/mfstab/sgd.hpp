#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfstab/graph.hpp"
#include "mfstab/objective.hpp"
#include "mfstab/sampler.hpp"

namespace mfstab {

struct SgdConfig {
  double alpha = 0.1;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  bool project = true;
  /// Initial weight; zero when unset.
  std::optional<Eigen::VectorXd> w0;
  /// Step-size schedule hook alpha_t = schedule(t), t = 1..T. Bound
  /// evaluation refuses configs that set it.
  std::function<double(std::size_t)> schedule;

  double step_size(std::size_t t) const { return schedule ? schedule(t) : alpha; }
  bool fixed_step() const { return !schedule; }
};

struct Trajectory {
  std::vector<Eigen::VectorXd> weights;  ///< w_0 .. w_T
  std::vector<std::size_t> indices;      ///< n_1 .. n_T
};

enum class StepCase {
  neighbor,  ///< i in Xi(n_t), n_t != i
  self,      ///< n_t == i
  outside,   ///< i not in Xi(n_t)
};

const char* step_case_name(StepCase c);

struct CoupledTrace {
  std::size_t vertex = 0;
  Trajectory base;
  Trajectory perturbed;
  std::vector<double> delta_norms;  ///< ||w_t - w_t^i||, t = 0..T
  std::vector<StepCase> cases;      ///< per step t = 1..T
};

/// Per-vertex inputs (mean field feature, label) of a sample set.
std::vector<FieldInput> field_inputs(const SampleSet& z, const ReceptiveFieldMap& rf);

/// G(w, alpha, i) followed by projection onto the admissible ball.
Eigen::VectorXd sgd_step(const Eigen::VectorXd& w, double alpha, std::size_t i,
                         const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj);
Eigen::VectorXd sgd_step(const Eigen::VectorXd& w, double alpha, const FieldInput& in,
                         const Objective& obj, bool project = true);

Trajectory train(const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj,
                 const SgdConfig& cfg);

/// Runs SGD on z and z_i with the same w_0 and index stream. z_i may differ
/// from z only at `vertex`.
CoupledTrace coupled_train(const SampleSet& z, const SampleSet& z_i, std::size_t vertex,
                           const ReceptiveFieldMap& rf, const Objective& obj,
                           const SgdConfig& cfg);

double empirical_risk(const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj,
                      const Eigen::VectorXd& w);
Eigen::VectorXd empirical_gradient(const SampleSet& z, const ReceptiveFieldMap& rf,
                                   const Objective& obj, const Eigen::VectorXd& w);

/// alpha^4 lambda^2 + 2 alpha lambda gamma / (lambda + gamma).
double step_condition_value(double alpha, double lambda, double gamma);

/// Right-hand side of the per-step recursion for ||delta w_t|| given
/// ||delta w_{t-1}||. Strongly convex certificates use the contraction
/// cases; gamma = 0 uses the expansive (1 + alpha lambda) cases.
double step_envelope(const ConstantsCertificate& k, double alpha, StepCase c, double prev);

/// First step t >= 1 at which n_t lies in Xi(vertex); T + 1 if never.
std::size_t first_visit_time(const std::vector<std::size_t>& indices, const ReceptiveFieldMap& rf,
                             std::size_t vertex);

struct ContractionReport {
  double max_ratio = 0.0;
  std::size_t trials = 0;
  double expansive_bound = 0.0;  ///< 1 + alpha lambda
  bool expansive_ok = true;
  bool nonexpansive_applies = false;  ///< convex and alpha <= 2 / lambda
  bool nonexpansive_ok = true;
  bool strong_applies = false;  ///< gamma > 0 and alpha <= 2 / (lambda + gamma)
  double strong_bound = 0.0;    ///< 1 - alpha lambda gamma / (lambda + gamma)
  bool strong_ok = true;
};

/// Empirical Lipschitz ratio of the unprojected update map over random
/// (w, w', field) triples, checked against the three contraction clauses.
ContractionReport contraction_check(const Objective& obj, double alpha, std::size_t trials,
                                    std::uint64_t seed, double slack = 1e-9);

/// CSV: t, n_t, w_norm, delta_norm, case.
void write_trace_csv(std::ostream& out, const CoupledTrace& trace);

}  // namespace mfstab
