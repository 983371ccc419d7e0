#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfstab/graph.hpp"
#include "mfstab/rng.hpp"
#include "mfstab/sampler.hpp"

namespace mfstab {

/// Certified constants of an objective on the admissible ball ||w|| <= radius.
struct ConstantsCertificate {
  double lambda = 0.0;       ///< smoothness
  double gamma = 0.0;        ///< strong convexity (0 when non-convex)
  double lipschitz = 0.0;    ///< |f(w) - f(w')| <= lipschitz * ||w - w'||
  double zeta = 0.0;         ///< gradient Lipschitzness in one vertex sample
  double loss_bound = 0.0;   ///< B_L
  double sample_diameter = 0.0;  ///< B_Z
  double radius = 0.0;       ///< W
  bool convex = true;
};

/// What f sees of a receptive field: the mean member feature and the
/// label of the centre vertex.
struct FieldInput {
  Eigen::VectorXd m;
  double y = 0.0;
};

FieldInput field_input(const SampleSet& z, const ReceptiveFieldMap& rf, std::size_t i);

enum class ObjectiveFamily { quadratic, ripple };

/// quadratic: f = 1/2 (c <w, m> - y)^2 + gamma/2 ||w||^2
/// ripple:    f = 1/2 (c <w, m> - y)^2 + a (1 - cos <u, w>)
/// with c chosen so the Hessian spectrum fits inside the declared bounds.
class Objective {
 public:
  ObjectiveFamily family() const { return family_; }
  std::string name() const;
  std::size_t dim() const { return dim_; }
  const ConstantsCertificate& constants() const { return cert_; }
  double feature_bound() const { return feature_bound_; }
  double label_bound() const { return label_bound_; }
  double scale() const { return c_; }
  double ripple_amplitude() const { return a_; }
  const Eigen::VectorXd& ripple_direction() const { return u_; }

  double predict(const Eigen::VectorXd& m, const Eigen::VectorXd& w) const;
  double evaluate(const FieldInput& in, const Eigen::VectorXd& w) const;
  Eigen::VectorXd gradient(const FieldInput& in, const Eigen::VectorXd& w) const;
  Eigen::MatrixXd hessian(const FieldInput& in, const Eigen::VectorXd& w) const;

  /// Projection onto the admissible ball.
  Eigen::VectorXd project(Eigen::VectorXd w) const;

  /// Uniform point of the admissible ball.
  Eigen::VectorXd random_weight(Rng& rng) const;

 private:
  friend Objective make_strongly_convex_objective(std::size_t, double, double, double, double,
                                                  double);
  friend Objective make_nonconvex_objective(std::size_t, double, double, double, double, double);

  ObjectiveFamily family_ = ObjectiveFamily::quadratic;
  std::size_t dim_ = 0;
  double c_ = 0.0;
  double a_ = 0.0;
  double feature_bound_ = 1.0;
  double label_bound_ = 1.0;
  Eigen::VectorXd u_;
  ConstantsCertificate cert_;
};

Objective make_strongly_convex_objective(std::size_t dim, double lambda, double gamma,
                                         double feature_bound, double label_bound,
                                         double radius = 2.0);

/// Ripple direction u = e_0. The radius should exceed pi/2 for the ripple
/// to bend the objective.
Objective make_nonconvex_objective(std::size_t dim, double lambda, double feature_bound,
                                   double label_bound, double ripple_amplitude,
                                   double radius = 4.0);

/// A random receptive field: 1 to 4 member features in the ball of radius
/// B_X plus a label, with the position of the centre vertex among them.
struct RandomField {
  std::vector<Eigen::VectorXd> members;
  double y = 0.0;
  FieldInput input() const;
};

RandomField random_field(const Objective& obj, Rng& rng);

struct CertificationWitness {
  std::string constant;
  double ratio = 0.0;
  double declared = 0.0;
  FieldInput input;
  Eigen::VectorXd w;
  Eigen::VectorXd w_prime;
};

struct EmpiricalCertificate {
  double smoothness = 0.0;
  double lipschitz = 0.0;
  double zeta = 0.0;
  double loss_max = 0.0;
  std::size_t trials = 0;
  bool passed = true;
  std::optional<CertificationWitness> witness;
};

/// Empirical maxima of the smoothness, Lipschitz and gradient-vs-sample
/// ratios over `trials` random pairs, plus one adversarial pair along the
/// top Hessian direction. Fails when a ratio exceeds `declared` by > 1e-9.
EmpiricalCertificate certify_constants(const Objective& obj, const ConstantsCertificate& declared,
                                       std::size_t trials, std::uint64_t seed);
EmpiricalCertificate certify_constants(const Objective& obj, std::size_t trials,
                                       std::uint64_t seed);

struct CocoercivityReport {
  double max_violation = 0.0;
  std::size_t trials = 0;
  std::optional<CertificationWitness> witness;
};

/// max of (1/lambda)||grad f(v) - grad f(w)||^2 - <grad f(v) - grad f(w), v - w>
/// over random pairs and a grid on the 1-D slice along the ripple direction.
CocoercivityReport cocoercivity_check(const Objective& obj, std::size_t trials,
                                      std::uint64_t seed);

/// max ||grad f - FD(f)|| / max(1, ||grad f||) at random admissible points,
/// central differences with step 1e-5 * max(1, radius).
double gradient_check(const Objective& obj, std::size_t points, std::uint64_t seed);

}  // namespace mfstab
