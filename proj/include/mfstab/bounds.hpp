#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfstab/objective.hpp"

namespace mfstab {

/// (x^T - 1)/(x - 1), stable near x = 1; returns T when |x - 1| < 1e-9.
double geometric_series(double x, std::size_t t);

/// (x^{2T} - x^T)/(x^2 - x) = x^{T-1} geometric_series(x, T); T near x = 1.
double geometric_companion(double x, std::size_t t);

enum class Regime { strongly_convex, non_convex };

const char* regime_name(Regime r);

struct SgdBoundParams {
  ConstantsCertificate constants;
  double alpha_step = 0.1;
  std::size_t steps = 0;
  std::size_t n = 0;
  std::vector<std::size_t> field_sizes;  ///< N_i per vertex
  Regime regime = Regime::strongly_convex;

  /// Throws InvalidInput on non-positive sizes, a field size outside
  /// [1, N] or a regime that contradicts gamma.
  void validate() const;
  double sparsity(std::size_t i) const {
    return static_cast<double>(field_sizes[i]) / static_cast<double>(n);
  }
};

/// Parameters with N_i taken from a receptive-field map.
SgdBoundParams bound_params(const ConstantsCertificate& k, double alpha, std::size_t steps,
                            const ReceptiveFieldMap& rf, Regime regime);

struct Condition {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = true;
  /// Failing gating conditions make dependent bounds not-applicable.
  bool gating = true;
};

/// Strongly convex: the step-size condition
/// alpha^4 lambda^2 + 2 alpha lambda gamma/(lambda+gamma) <= 1 (gating) and
/// alpha <= 2/(lambda + gamma) (reported). Non-convex: PM <= 1 (reported).
std::vector<Condition> regime_conditions(const SgdBoundParams& p);
bool conditions_pass(const SgdBoundParams& p);

struct RecursionConstants {
  double pz = 0.0;  ///< PZ_i, or PM in the non-convex regime
  double py = 0.0;
};

/// PZ_i = d_i a l (g/(l+g) - a) + a^2 l / N + 1 - a l g/(l+g),
/// PY_i = a B_Z zeta (N_i - 1)/N + 2 a L / N.
RecursionConstants convex_recursion_constants(const SgdBoundParams& p, std::size_t i);
/// PM = (N-1)/N a l, same PY_i.
RecursionConstants nonconvex_recursion_constants(const SgdBoundParams& p, std::size_t i);
RecursionConstants recursion_constants(const SgdBoundParams& p, std::size_t i);

/// L geometric_series(PZ_i, T) PY_i; nullopt when a gating condition fails.
std::optional<double> expected_stability_bound(const SgdBoundParams& p, std::size_t i);
/// Supremum over vertices.
std::optional<double> expected_stability_bound(const SgdBoundParams& p);

struct VarianceBound {
  /// Exact solution of V_t = Z^2 V_{t-1} + 2 Y Z E_{t-1} + Y^2 with
  /// E_t = Z E_{t-1} + Y, V_0 = E_0 = 0; equals (Y geometric_series(Z, T))^2.
  std::vector<double> recursion_i;
  double recursion_sum = 0.0;
  /// Printed closed form 2Y^2 (Z^{2T} - Z^T)/(Z^2 - Z) + Y^2 (1 - Z^T)/(1 - Z)^2.
  /// nullopt where it is negative, non-finite or singular (Z = 1).
  std::vector<std::optional<double>> printed_i;
  std::optional<double> printed_sum;
};

VarianceBound variance_bound(const SgdBoundParams& p);

/// The printed per-vertex variance term for one (Z, Y, T).
std::optional<double> printed_variance_term(double z, double y, std::size_t t);

/// High-probability bound on beta_2 at confidence delta for the active regime.
std::optional<double> highprob_stability_bound(const SgdBoundParams& p, double delta);

/// Prefactor [(2 - 1/N) sqrt(2N log(2/delta)) + 2] times the regime's
/// per-vertex envelope, plus (B_L/N) sqrt(2N log(2/delta)).
std::optional<double> sgd_generalization_bound(const SgdBoundParams& p, double delta);

/// 2 d_bar beta2 + sqrt(2 sum((2 - 2d_i) beta1 + d_i (beta2 + B_L))^2)
///   * sqrt(log(1/delta)/(1 - alpha_dob)).
double generalization_bound_single(double beta1, double beta2, double loss_bound,
                                   const std::vector<double>& d, double alpha_dob, double delta);

/// N mu + sqrt(2m sum((2 - d_i/m) mu + d_i B_L/m)^2) sqrt(log(1/delta)/(1 - alpha_dob)).
double generalization_bound_mgraph(double mu, double loss_bound, const std::vector<double>& d,
                                   std::size_t m, double alpha_dob, double delta);

struct TailBound {
  double probability = 1.0;
  bool degenerate = false;  ///< all c_i = 0 with t > 0
};

/// exp(-(1 - alpha_dob) t^2 / (2 sum c_i^2)), clipped to [0, 1].
TailBound concentration_tail(const std::vector<double>& c, double alpha_dob, double t);

/// sup_d 2 (2 - lambda_slack) d beta2 over d = 1..d_max.
double srm_epsilon_floor(double beta2, double lambda_slack, std::size_t d_max);

/// 2 sum_{d=1}^{d_max} exp(-(eps/2 + (lambda-2) d beta2)^2
///   / (2N ((2-2d) beta1 + d (beta2 + B_L))^2)), clipped to [0, 1].
double srm_confidence(double beta1, double beta2, double loss_bound, double lambda_slack,
                      std::size_t d_max, std::size_t n, double epsilon);

struct BoundReport {
  Regime regime = Regime::strongly_convex;
  std::vector<double> pz_i;  ///< PZ_i, or PM repeated
  std::vector<double> py_i;
  double pm = 0.0;  ///< non-convex only
  std::vector<std::optional<double>> expected_beta2_i;
  std::optional<double> expected_beta2;
  VarianceBound variance;
  double delta = 0.1;
  std::optional<double> highprob_beta2;
  std::optional<double> generalization;
  std::vector<Condition> conditions;
  bool divergent = false;
};

BoundReport evaluate_bounds(const SgdBoundParams& p, double delta);

}  // namespace mfstab
