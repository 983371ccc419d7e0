#include "mfstab/srm.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "mfstab/bounds.hpp"
#include "mfstab/errors.hpp"

namespace mfstab {

DegreeClassFamily DegreeClassFamily::truncations(const ReceptiveFieldMap& base, std::size_t d_max) {
  if (d_max == 0) throw InvalidInput("d_max must be at least 1");
  DegreeClassFamily fam;
  for (std::size_t d = 1; d <= d_max; ++d) fam.classes.push_back({d, base.truncated(d), 0.0, 0.0});
  return fam;
}

ClassTrainer gnn_class_trainer(Eigen::VectorXd w, double gamma_reg, GnnMethod method) {
  return [w = std::move(w), gamma_reg, method](const SampleSet& z, const DegreeClass& cls) {
    GnnProblem p;
    p.mask = cls.fields;
    p.w = w;
    p.gamma_reg = gamma_reg;
    const auto n = static_cast<Eigen::Index>(z.size());
    p.x.resize(n, static_cast<Eigen::Index>(z.dim()));
    p.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p.x.row(i) = z.samples[static_cast<std::size_t>(i)].x.transpose();
      p.y[i] = z.samples[static_cast<std::size_t>(i)].y;
    }
    const Eigen::MatrixXd a = fit_gnn(p, method).a;
    ClassFit fit;
    fit.params = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
    fit.empirical_risk = (p.y - a * p.v()).squaredNorm() / static_cast<double>(n);
    return fit;
  };
}

SrmSelection select_sparse(const DegreeClassFamily& family, const SampleSet& z,
                           double lambda_slack, const ClassTrainer& trainer, SrmMode mode,
                           std::size_t truncate_degree) {
  if (family.classes.empty()) throw InvalidInput("empty hypothesis family");
  if (lambda_slack < 0.0) throw InvalidInput("lambda_slack must be non-negative");
  if (mode == SrmMode::truncated && (truncate_degree < 1 || truncate_degree > family.d_max()))
    throw InvalidInput("truncated mode needs a degree in [1, d_max]");
  SrmSelection sel;
  std::size_t best = 0;
  for (std::size_t c = 0; c < family.classes.size(); ++c) {
    const auto& cls = family.classes[c];
    ClassFit fit = trainer(z, cls);
    SrmRow row;
    row.d = cls.d;
    row.risk = fit.empirical_risk;
    row.penalty = mode == SrmMode::penalized
                      ? 2.0 * lambda_slack * static_cast<double>(cls.d) * cls.beta2
                      : 0.0;
    row.penalized = row.risk + row.penalty;
    sel.rows.push_back(row);
    sel.class_params.push_back(std::move(fit.params));
    if (mode == SrmMode::truncated) {
      if (cls.d == truncate_degree) best = c;
    } else if (row.penalized < sel.rows[best].penalized) {
      best = c;
    }
  }
  sel.rows[best].selected = true;
  sel.d = sel.rows[best].d;
  sel.params = sel.class_params[best];
  sel.penalized_risk = sel.rows[best].penalized;
  return sel;
}

SrmReport srm_report(const DegreeClassFamily& family, const SrmSelection& sel,
                     const std::vector<double>& class_risks, double lambda_slack,
                     double loss_bound, std::size_t n, double epsilon) {
  if (class_risks.size() != family.classes.size())
    throw InvalidInput("need one risk per degree class");
  double beta1 = 0.0, beta2 = 0.0;
  for (const auto& c : family.classes) {
    beta1 = std::max(beta1, c.beta1);
    beta2 = std::max(beta2, c.beta2);
  }
  SrmReport rep;
  rep.d = sel.d;
  rep.epsilon = epsilon;
  rep.epsilon_floor = srm_epsilon_floor(beta2, lambda_slack, family.d_max());
  rep.failure_probability =
      srm_confidence(beta1, beta2, loss_bound, lambda_slack, family.d_max(), n, epsilon);
  rep.rhs = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < family.classes.size(); ++c) {
    const auto& cls = family.classes[c];
    rep.rhs = std::min(rep.rhs, class_risks[c] + (lambda_slack + 2.0) * static_cast<double>(cls.d) * cls.beta2);
    if (cls.d == sel.d) rep.lhs = class_risks[c];
  }
  rep.rhs += epsilon;
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

void write_srm_csv(std::ostream& out, const SrmSelection& sel) {
  out << "d,class_risk,penalty,penalized_risk,selected\n";
  out.precision(17);
  for (const auto& r : sel.rows)
    out << r.d << ',' << r.risk << ',' << r.penalty << ',' << r.penalized << ',' << (r.selected ? 1 : 0)
        << '\n';
}

}  // namespace mfstab
