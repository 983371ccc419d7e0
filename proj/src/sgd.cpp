#include "mfstab/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

namespace {

Eigen::VectorXd initial_weight(const Objective& obj, const SgdConfig& cfg) {
  if (!cfg.w0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj.dim()));
  if (cfg.w0->size() != static_cast<Eigen::Index>(obj.dim()))
    throw InvalidInput("initial weight has the wrong dimension");
  return cfg.project ? obj.project(*cfg.w0) : *cfg.w0;
}

void check_config(const SgdConfig& cfg, std::size_t n) {
  if (n == 0) throw InvalidInput("cannot train on an empty sample set");
  if (cfg.fixed_step() && !(cfg.alpha >= 0.0)) throw InvalidInput("step size must be non-negative");
}

}  // namespace

const char* step_case_name(StepCase c) {
  switch (c) {
    case StepCase::neighbor: return "neighbor";
    case StepCase::self: return "self";
    case StepCase::outside: return "outside";
  }
  return "?";
}

std::vector<FieldInput> field_inputs(const SampleSet& z, const ReceptiveFieldMap& rf) {
  if (rf.size() != z.size()) throw InvalidInput("receptive fields do not match the sample set");
  std::vector<FieldInput> out;
  out.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out.push_back(field_input(z, rf, i));
  return out;
}

Eigen::VectorXd sgd_step(const Eigen::VectorXd& w, double alpha, const FieldInput& in,
                         const Objective& obj, bool project) {
  const Eigen::VectorXd g = obj.gradient(in, w);
  if (!g.allFinite()) throw NumericalError("non-finite gradient at ||w|| = " + std::to_string(w.norm()));
  Eigen::VectorXd next = w - alpha * g;
  return project ? obj.project(std::move(next)) : next;
}

Eigen::VectorXd sgd_step(const Eigen::VectorXd& w, double alpha, std::size_t i,
                         const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj) {
  if (i >= z.size()) throw InvalidInput("vertex index out of range");
  return sgd_step(w, alpha, field_input(z, rf, i), obj);
}

Trajectory train(const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj,
                 const SgdConfig& cfg) {
  check_config(cfg, z.size());
  const auto inputs = field_inputs(z, rf);
  Rng rng(cfg.seed);
  Trajectory tr;
  tr.weights.reserve(cfg.steps + 1);
  tr.indices.reserve(cfg.steps);
  tr.weights.push_back(initial_weight(obj, cfg));
  for (std::size_t t = 1; t <= cfg.steps; ++t) {
    const std::size_t n = rng.index(z.size());
    tr.indices.push_back(n);
    tr.weights.push_back(sgd_step(tr.weights.back(), cfg.step_size(t), inputs[n], obj, cfg.project));
  }
  return tr;
}

CoupledTrace coupled_train(const SampleSet& z, const SampleSet& z_i, std::size_t vertex,
                           const ReceptiveFieldMap& rf, const Objective& obj,
                           const SgdConfig& cfg) {
  check_config(cfg, z.size());
  if (vertex >= z.size()) throw InvalidInput("perturbed vertex out of range");
  const auto diff = differing_vertices(z, z_i);
  if (diff.size() > 1 || (diff.size() == 1 && diff[0] != vertex))
    throw InvalidInput("coupled runs need sample sets that differ at most at vertex " +
                       std::to_string(vertex));
  const auto in_a = field_inputs(z, rf);
  const auto in_b = field_inputs(z_i, rf);
  Rng rng(cfg.seed);
  CoupledTrace tr;
  tr.vertex = vertex;
  const Eigen::VectorXd w0 = initial_weight(obj, cfg);
  tr.base.weights.push_back(w0);
  tr.perturbed.weights.push_back(w0);
  tr.delta_norms.push_back(0.0);
  for (std::size_t t = 1; t <= cfg.steps; ++t) {
    const std::size_t n = rng.index(z.size());
    const double a = cfg.step_size(t);
    tr.base.indices.push_back(n);
    tr.perturbed.indices.push_back(n);
    tr.base.weights.push_back(sgd_step(tr.base.weights.back(), a, in_a[n], obj, cfg.project));
    tr.perturbed.weights.push_back(
        sgd_step(tr.perturbed.weights.back(), a, in_b[n], obj, cfg.project));
    tr.delta_norms.push_back((tr.base.weights.back() - tr.perturbed.weights.back()).norm());
    tr.cases.push_back(n == vertex             ? StepCase::self
                       : rf.contains(n, vertex) ? StepCase::neighbor
                                                : StepCase::outside);
  }
  return tr;
}

double empirical_risk(const SampleSet& z, const ReceptiveFieldMap& rf, const Objective& obj,
                      const Eigen::VectorXd& w) {
  double s = 0.0;
  for (const auto& in : field_inputs(z, rf)) s += obj.evaluate(in, w);
  return s / static_cast<double>(z.size());
}

Eigen::VectorXd empirical_gradient(const SampleSet& z, const ReceptiveFieldMap& rf,
                                   const Objective& obj, const Eigen::VectorXd& w) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  for (const auto& in : field_inputs(z, rf)) g += obj.gradient(in, w);
  return g / static_cast<double>(z.size());
}

double step_condition_value(double alpha, double lambda, double gamma) {
  return std::pow(alpha, 4) * lambda * lambda + 2.0 * alpha * lambda * gamma / (lambda + gamma);
}

double step_envelope(const ConstantsCertificate& k, double alpha, StepCase c, double prev) {
  const double data_term = alpha * k.sample_diameter * k.zeta;
  if (k.gamma > 0.0) {
    const double contraction = 1.0 - alpha * k.lambda * k.gamma / (k.lambda + k.gamma);
    switch (c) {
      case StepCase::neighbor:
        if (step_condition_value(alpha, k.lambda, k.gamma) <= 1.0)
          return alpha * alpha * k.lambda * prev + data_term;
        return contraction * prev + data_term;
      case StepCase::self: return prev + 2.0 * alpha * k.lipschitz;
      case StepCase::outside: return contraction * prev;
    }
  }
  const double expansion = 1.0 + alpha * k.lambda;
  switch (c) {
    case StepCase::neighbor: return expansion * prev + data_term;
    case StepCase::self: return prev + 2.0 * alpha * k.lipschitz;
    case StepCase::outside: return expansion * prev;
  }
  return prev;
}

std::size_t first_visit_time(const std::vector<std::size_t>& indices, const ReceptiveFieldMap& rf,
                             std::size_t vertex) {
  for (std::size_t t = 0; t < indices.size(); ++t)
    if (rf.contains(vertex, indices[t])) return t + 1;
  return indices.size() + 1;
}

ContractionReport contraction_check(const Objective& obj, double alpha, std::size_t trials,
                                    std::uint64_t seed, double slack) {
  if (alpha < 0.0) throw InvalidInput("step size must be non-negative");
  const auto& k = obj.constants();
  ContractionReport rep;
  rep.trials = trials;
  rep.expansive_bound = 1.0 + alpha * k.lambda;
  rep.nonexpansive_applies = k.convex && alpha <= 2.0 / k.lambda;
  rep.strong_applies = k.gamma > 0.0 && alpha <= 2.0 / (k.lambda + k.gamma);
  rep.strong_bound = k.gamma > 0.0 ? 1.0 - alpha * k.lambda * k.gamma / (k.lambda + k.gamma) : 1.0;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const FieldInput in = random_field(obj, rng).input();
    const Eigen::VectorXd w = obj.random_weight(rng);
    const Eigen::VectorXd wp = obj.random_weight(rng);
    const double dw = (w - wp).norm();
    if (dw == 0.0) continue;
    const double ratio =
        (sgd_step(w, alpha, in, obj, false) - sgd_step(wp, alpha, in, obj, false)).norm() / dw;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.expansive_ok = rep.max_ratio <= rep.expansive_bound + slack;
  if (rep.nonexpansive_applies) rep.nonexpansive_ok = rep.max_ratio <= 1.0 + slack;
  if (rep.strong_applies) rep.strong_ok = rep.max_ratio <= rep.strong_bound + slack;
  return rep;
}

void write_trace_csv(std::ostream& out, const CoupledTrace& trace) {
  out << "t,n_t,w_norm,delta_norm,case\n";
  out.precision(17);
  for (std::size_t t = 0; t < trace.delta_norms.size(); ++t) {
    out << t << ',';
    if (t > 0) out << trace.base.indices[t - 1];
    out << ',' << trace.base.weights[t].norm() << ',' << trace.delta_norms[t] << ',';
    if (t > 0) out << step_case_name(trace.cases[t - 1]);
    out << '\n';
  }
}

}  // namespace mfstab
