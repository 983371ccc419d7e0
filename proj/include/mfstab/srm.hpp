#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mfstab/gnn.hpp"
#include "mfstab/graph.hpp"
#include "mfstab/sampler.hpp"

namespace mfstab {

struct DegreeClass {
  std::size_t d = 1;
  ReceptiveFieldMap fields;  ///< base fields truncated to index radius d
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// H_1 ⊆ H_2 ⊆ ... ⊆ H_{d_max}; class d keeps the members j of each base
/// field with |i - j| < d.
struct DegreeClassFamily {
  std::vector<DegreeClass> classes;

  static DegreeClassFamily truncations(const ReceptiveFieldMap& base, std::size_t d_max);
  std::size_t d_max() const { return classes.size(); }
};

struct ClassFit {
  Eigen::VectorXd params;
  double empirical_risk = 0.0;
};

using ClassTrainer = std::function<ClassFit(const SampleSet&, const DegreeClass&)>;

/// Row-wise GNN fit on the class fields; R_hat is the training mean squared error.
ClassTrainer gnn_class_trainer(Eigen::VectorXd w, double gamma_reg,
                               GnnMethod method = GnnMethod::exact_rowwise);

enum class SrmMode {
  penalized,  ///< argmin_d R_hat(h_d) + 2 lambda d beta2(d)
  truncated,  ///< ERM inside one fixed class
};

struct SrmRow {
  std::size_t d = 0;
  double risk = 0.0;
  double penalty = 0.0;
  double penalized = 0.0;
  bool selected = false;
};

struct SrmSelection {
  std::size_t d = 0;
  Eigen::VectorXd params;
  double penalized_risk = 0.0;
  std::vector<SrmRow> rows;
  std::vector<Eigen::VectorXd> class_params;
};

/// Ties go to the smaller d. In truncated mode `truncate_degree` names the class.
SrmSelection select_sparse(const DegreeClassFamily& family, const SampleSet& z,
                           double lambda_slack, const ClassTrainer& trainer,
                           SrmMode mode = SrmMode::penalized, std::size_t truncate_degree = 0);

struct SrmReport {
  std::size_t d = 0;
  double epsilon = 0.0;
  double epsilon_floor = 0.0;
  double failure_probability = 1.0;
  double lhs = 0.0;  ///< R(h_sparse)
  double rhs = 0.0;  ///< min_d (R(h_d) + (lambda + 2) d beta2(d)) + epsilon
  bool holds = true;
};

/// Pairs a selection with its confidence. `class_risks` are R(h_d) for the
/// per-class ERMs (held-out or exact); the infimum on the right is taken
/// over those candidates.
SrmReport srm_report(const DegreeClassFamily& family, const SrmSelection& sel,
                     const std::vector<double>& class_risks, double lambda_slack,
                     double loss_bound, std::size_t n, double epsilon);

/// CSV: d, class_risk, penalty, penalized_risk, selected.
void write_srm_csv(std::ostream& out, const SrmSelection& sel);

}  // namespace mfstab
