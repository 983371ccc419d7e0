#include "mfstab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfstab/errors.hpp"
#include "mfstab/sgd.hpp"

namespace mfstab {

namespace {

constexpr double kSingularWidth = 1e-9;

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
}

void check_dobrushin(double alpha_dob) {
  if (!(alpha_dob >= 0.0)) throw InvalidInput("Dobrushin coefficient must be non-negative");
  if (alpha_dob >= 1.0)
    throw InvalidInput("Dobrushin condition violated: alpha = " + std::to_string(alpha_dob) +
                       " >= 1");
}

double d_bar(const std::vector<double>& d) {
  double s = 0.0;
  for (double x : d) s += x;
  return s;
}

}  // namespace

double geometric_series(double x, std::size_t t) {
  if (t == 0) return 0.0;
  const double n = static_cast<double>(t);
  const double h = x - 1.0;
  if (std::abs(h) < kSingularWidth) return n + 0.5 * n * (n - 1.0) * h;
  if (x > 0.0) return std::expm1(n * std::log1p(h)) / h;
  return (std::pow(x, n) - 1.0) / h;
}

double geometric_companion(double x, std::size_t t) {
  if (t == 0) return 0.0;
  return std::pow(x, static_cast<double>(t - 1)) * geometric_series(x, t);
}

const char* regime_name(Regime r) {
  return r == Regime::strongly_convex ? "strongly-convex" : "non-convex";
}

void SgdBoundParams::validate() const {
  const auto& k = constants;
  if (n == 0) throw InvalidInput("N must be positive");
  if (field_sizes.size() != n) throw InvalidInput("need one receptive-field size per vertex");
  for (std::size_t s : field_sizes)
    if (s < 1 || s > n) throw InvalidInput("receptive-field sizes must lie in [1, N]");
  if (!(alpha_step > 0.0)) throw InvalidInput("step size must be positive");
  if (!(k.lambda > 0.0) || k.gamma < 0.0 || k.gamma > k.lambda)
    throw InvalidInput("need lambda > 0 and 0 <= gamma <= lambda");
  if (k.lipschitz < 0.0 || k.zeta < 0.0 || k.sample_diameter < 0.0 || k.loss_bound < 0.0)
    throw InvalidInput("constants must be non-negative");
  if (regime == Regime::strongly_convex && !(k.gamma > 0.0))
    throw InvalidInput("strongly convex regime needs gamma > 0");
}

SgdBoundParams bound_params(const ConstantsCertificate& k, double alpha, std::size_t steps,
                            const ReceptiveFieldMap& rf, Regime regime) {
  SgdBoundParams p;
  p.constants = k;
  p.alpha_step = alpha;
  p.steps = steps;
  p.n = rf.size();
  for (std::size_t i = 0; i < rf.size(); ++i) p.field_sizes.push_back(rf.cardinality(i));
  p.regime = regime;
  p.validate();
  return p;
}

std::vector<Condition> regime_conditions(const SgdBoundParams& p) {
  p.validate();
  const auto& k = p.constants;
  const double a = p.alpha_step;
  std::vector<Condition> out;
  if (p.regime == Regime::strongly_convex) {
    const double v = step_condition_value(a, k.lambda, k.gamma);
    out.push_back({"alpha^4 lambda^2 + 2 alpha lambda gamma/(lambda+gamma) <= 1", v, 1.0, v <= 1.0, true});
    const double lim = 2.0 / (k.lambda + k.gamma);
    out.push_back({"alpha <= 2/(lambda+gamma)", a, lim, a <= lim, false});
  } else {
    const double pm = nonconvex_recursion_constants(p, 0).pz;
    out.push_back({"PM <= 1", pm, 1.0, pm <= 1.0, false});
  }
  return out;
}

bool conditions_pass(const SgdBoundParams& p) {
  for (const auto& c : regime_conditions(p))
    if (c.gating && !c.passed) return false;
  return true;
}

RecursionConstants convex_recursion_constants(const SgdBoundParams& p, std::size_t i) {
  p.validate();
  const auto& k = p.constants;
  const double a = p.alpha_step, l = k.lambda, g = k.gamma;
  const double n = static_cast<double>(p.n);
  const double ratio = g / (l + g);
  RecursionConstants rc;
  rc.pz = p.sparsity(i) * a * l * (ratio - a) + a * a * l / n + (1.0 - a * l * ratio);
  rc.py = a * k.sample_diameter * k.zeta * (static_cast<double>(p.field_sizes[i]) - 1.0) / n +
          2.0 * a * k.lipschitz / n;
  return rc;
}

RecursionConstants nonconvex_recursion_constants(const SgdBoundParams& p, std::size_t i) {
  RecursionConstants rc;
  const double n = static_cast<double>(p.n);
  rc.pz = (n - 1.0) / n * p.alpha_step * p.constants.lambda;
  rc.py = p.alpha_step * p.constants.sample_diameter * p.constants.zeta *
              (static_cast<double>(p.field_sizes[i]) - 1.0) / n +
          2.0 * p.alpha_step * p.constants.lipschitz / n;
  return rc;
}

RecursionConstants recursion_constants(const SgdBoundParams& p, std::size_t i) {
  return p.regime == Regime::strongly_convex ? convex_recursion_constants(p, i)
                                             : nonconvex_recursion_constants(p, i);
}

std::optional<double> expected_stability_bound(const SgdBoundParams& p, std::size_t i) {
  if (i >= p.n) throw InvalidInput("vertex index out of range");
  if (!conditions_pass(p)) return std::nullopt;
  const auto rc = recursion_constants(p, i);
  return p.constants.lipschitz * geometric_series(rc.pz, p.steps) * rc.py;
}

std::optional<double> expected_stability_bound(const SgdBoundParams& p) {
  if (!conditions_pass(p)) return std::nullopt;
  double best = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) best = std::max(best, *expected_stability_bound(p, i));
  return best;
}

std::optional<double> printed_variance_term(double z, double y, std::size_t t) {
  if (t == 0 || y == 0.0) return 0.0;
  // (1 - Z^T)/(1 - Z)^2 = geometric_series(Z, T)/(1 - Z).
  const double tail = geometric_series(z, t) / (1.0 - z);
  const double v = 2.0 * y * y * geometric_companion(z, t) + y * y * tail;
  if (!std::isfinite(v) || v < 0.0 || std::abs(1.0 - z) < kSingularWidth) return std::nullopt;
  return v;
}

VarianceBound variance_bound(const SgdBoundParams& p) {
  p.validate();
  VarianceBound vb;
  vb.printed_sum = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto rc = recursion_constants(p, i);
    const double e = rc.py * geometric_series(rc.pz, p.steps);
    vb.recursion_i.push_back(e * e);
    vb.recursion_sum += e * e;
    const auto printed = printed_variance_term(rc.pz, rc.py, p.steps);
    vb.printed_i.push_back(printed);
    if (printed && vb.printed_sum)
      *vb.printed_sum += *printed;
    else
      vb.printed_sum.reset();
  }
  return vb;
}

std::optional<double> highprob_stability_bound(const SgdBoundParams& p, double delta) {
  check_delta(delta);
  if (!conditions_pass(p)) return std::nullopt;
  const auto vb = variance_bound(p);
  if (!vb.printed_sum) return std::nullopt;
  const auto& k = p.constants;
  const double log_term = std::log(2.0 / delta);
  if (p.regime == Regime::strongly_convex) {
    double sup = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
      const auto rc = convex_recursion_constants(p, i);
      sup = std::max(sup, geometric_series(rc.pz, p.steps) * rc.py);
    }
    const double s = std::sqrt(log_term / 8.0);
    const double inner = sup + std::sqrt(*vb.printed_sum / delta);
    return (k.lipschitz + (k.lambda - k.gamma) * s) * sup + (k.lambda - k.gamma) * s * inner * inner;
  }
  double sup_y = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) sup_y = std::max(sup_y, nonconvex_recursion_constants(p, i).py);
  const double pm = nonconvex_recursion_constants(p, 0).pz;
  return k.lipschitz * geometric_series(pm, p.steps) * sup_y * (1.0 + std::sqrt(log_term / 2.0)) +
         k.lipschitz * std::sqrt(log_term / delta * *vb.printed_sum);
}

std::optional<double> sgd_generalization_bound(const SgdBoundParams& p, double delta) {
  check_delta(delta);
  if (!conditions_pass(p)) return std::nullopt;
  const auto& k = p.constants;
  const double n = static_cast<double>(p.n);
  const double root = std::sqrt(2.0 * n * std::log(2.0 / delta));
  double sup = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto rc = recursion_constants(p, i);
    const auto var = printed_variance_term(rc.pz, rc.py, p.steps);
    if (!var) return std::nullopt;
    const double first = k.lipschitz * geometric_series(rc.pz, p.steps) * rc.py;
    double env = 0.0;
    if (p.regime == Regime::strongly_convex)
      env = first + std::sqrt(1.0 / (4.0 * delta)) * (k.lambda - k.gamma) * (4.0 / delta * *var);
    else
      env = first * (1.0 + std::sqrt(1.0 / delta)) + std::sqrt(4.0 / delta * *var);
    sup = std::max(sup, env);
  }
  return ((2.0 - 1.0 / n) * root + 2.0) * sup + k.loss_bound / n * root;
}

double generalization_bound_single(double beta1, double beta2, double loss_bound,
                                   const std::vector<double>& d, double alpha_dob, double delta) {
  check_delta(delta);
  check_dobrushin(alpha_dob);
  if (beta1 < 0.0 || beta1 > beta2) throw InvalidInput("need 0 <= beta1 <= beta2");
  double sum = 0.0;
  for (double di : d) {
    const double c = (2.0 - 2.0 * di) * beta1 + di * (beta2 + loss_bound);
    sum += c * c;
  }
  return 2.0 * d_bar(d) * beta2 + std::sqrt(2.0 * sum) * std::sqrt(std::log(1.0 / delta) / (1.0 - alpha_dob));
}

double generalization_bound_mgraph(double mu, double loss_bound, const std::vector<double>& d,
                                   std::size_t m, double alpha_dob, double delta) {
  check_delta(delta);
  check_dobrushin(alpha_dob);
  if (m == 0) throw InvalidInput("m must be at least 1");
  if (mu < 0.0) throw InvalidInput("mu must be non-negative");
  const double mm = static_cast<double>(m);
  double sum = 0.0;
  for (double di : d) {
    const double c = (2.0 - di / mm) * mu + di * loss_bound / mm;
    sum += c * c;
  }
  return static_cast<double>(d.size()) * mu +
         std::sqrt(2.0 * mm * sum) * std::sqrt(std::log(1.0 / delta) / (1.0 - alpha_dob));
}

TailBound concentration_tail(const std::vector<double>& c, double alpha_dob, double t) {
  check_dobrushin(alpha_dob);
  if (!(t >= 0.0)) throw InvalidInput("t must be non-negative");
  double sum = 0.0;
  for (double x : c) {
    if (!(x >= 0.0)) throw InvalidInput("bounded-difference constants must be non-negative");
    sum += x * x;
  }
  TailBound tb;
  if (t == 0.0) return tb;
  if (sum == 0.0) {
    tb.probability = 0.0;
    tb.degenerate = true;
    return tb;
  }
  tb.probability = std::clamp(std::exp(-(1.0 - alpha_dob) * t * t / (2.0 * sum)), 0.0, 1.0);
  return tb;
}

double srm_epsilon_floor(double beta2, double lambda_slack, std::size_t d_max) {
  if (d_max == 0) throw InvalidInput("d_max must be at least 1");
  double floor = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d <= d_max; ++d)
    floor = std::max(floor, 2.0 * (2.0 - lambda_slack) * static_cast<double>(d) * beta2);
  return floor;
}

double srm_confidence(double beta1, double beta2, double loss_bound, double lambda_slack,
                      std::size_t d_max, std::size_t n, double epsilon) {
  if (n == 0) throw InvalidInput("N must be positive");
  const double floor = srm_epsilon_floor(beta2, lambda_slack, d_max);
  if (epsilon < floor)
    throw InvalidInput("epsilon " + std::to_string(epsilon) + " is below the floor " +
                       std::to_string(floor));
  double sum = 0.0;
  for (std::size_t di = 1; di <= d_max; ++di) {
    const double d = static_cast<double>(di);
    const double num = epsilon / 2.0 + (lambda_slack - 2.0) * d * beta2;
    const double c = (2.0 - 2.0 * d) * beta1 + d * (beta2 + loss_bound);
    const double den = 2.0 * static_cast<double>(n) * c * c;
    sum += den > 0.0 ? std::exp(-num * num / den) : (num == 0.0 ? 1.0 : 0.0);
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

BoundReport evaluate_bounds(const SgdBoundParams& p, double delta) {
  p.validate();
  check_delta(delta);
  BoundReport r;
  r.regime = p.regime;
  r.delta = delta;
  r.conditions = regime_conditions(p);
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto rc = recursion_constants(p, i);
    r.pz_i.push_back(rc.pz);
    r.py_i.push_back(rc.py);
    r.expected_beta2_i.push_back(expected_stability_bound(p, i));
  }
  if (p.regime == Regime::non_convex) {
    r.pm = r.pz_i.front();
    r.divergent = r.pm > 1.0;
  }
  r.expected_beta2 = expected_stability_bound(p);
  r.variance = variance_bound(p);
  r.highprob_beta2 = highprob_stability_bound(p, delta);
  r.generalization = sgd_generalization_bound(p, delta);
  return r;
}

}  // namespace mfstab
