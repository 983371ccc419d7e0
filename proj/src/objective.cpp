#include "mfstab/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfstab/errors.hpp"

namespace mfstab {

namespace {

Eigen::VectorXd random_in_ball(std::size_t dim, double radius, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  return v * (r / norm);
}

void check_common(std::size_t dim, double feature_bound, double label_bound, double radius) {
  if (dim == 0) throw InvalidInput("objective dimension must be positive");
  if (!(feature_bound > 0.0) || !(label_bound > 0.0))
    throw InvalidInput("feature and label bounds must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidInput("admissible radius must be positive and finite");
}

void track(EmpiricalCertificate& cert, const char* name, double ratio, double declared,
           const FieldInput& in, const Eigen::VectorXd& w, const Eigen::VectorXd& wp) {
  if (ratio > declared + 1e-9 && !cert.witness) {
    cert.passed = false;
    cert.witness = CertificationWitness{name, ratio, declared, in, w, wp};
  }
}

}  // namespace

FieldInput field_input(const SampleSet& z, const ReceptiveFieldMap& rf, std::size_t i) {
  FieldInput in;
  in.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z.dim()));
  const auto members = rf.field(i);
  for (std::size_t j : members) in.m += z.samples[j].x;
  in.m /= static_cast<double>(members.size());
  in.y = z.samples[i].y;
  return in;
}

std::string Objective::name() const {
  return family_ == ObjectiveFamily::quadratic ? "quadratic" : "ripple";
}

double Objective::predict(const Eigen::VectorXd& m, const Eigen::VectorXd& w) const {
  return c_ * m.dot(w);
}

double Objective::evaluate(const FieldInput& in, const Eigen::VectorXd& w) const {
  const double r = predict(in.m, w) - in.y;
  double f = 0.5 * r * r;
  if (family_ == ObjectiveFamily::quadratic)
    f += 0.5 * cert_.gamma * w.squaredNorm();
  else
    f += a_ * (1.0 - std::cos(u_.dot(w)));
  return f;
}

Eigen::VectorXd Objective::gradient(const FieldInput& in, const Eigen::VectorXd& w) const {
  const double r = predict(in.m, w) - in.y;
  Eigen::VectorXd g = (c_ * r) * in.m;
  if (family_ == ObjectiveFamily::quadratic)
    g += cert_.gamma * w;
  else
    g += (a_ * std::sin(u_.dot(w))) * u_;
  return g;
}

Eigen::MatrixXd Objective::hessian(const FieldInput& in, const Eigen::VectorXd& w) const {
  Eigen::MatrixXd h = (c_ * c_) * in.m * in.m.transpose();
  if (family_ == ObjectiveFamily::quadratic)
    h.diagonal().array() += cert_.gamma;
  else
    h += (a_ * std::cos(u_.dot(w))) * u_ * u_.transpose();
  return h;
}

Eigen::VectorXd Objective::project(Eigen::VectorXd w) const {
  const double n = w.norm();
  if (n > cert_.radius) w *= cert_.radius / n;
  return w;
}

Eigen::VectorXd Objective::random_weight(Rng& rng) const {
  return random_in_ball(dim_, cert_.radius, rng);
}

Objective make_strongly_convex_objective(std::size_t dim, double lambda, double gamma,
                                         double feature_bound, double label_bound,
                                         double radius) {
  check_common(dim, feature_bound, label_bound, radius);
  if (!(gamma > 0.0)) throw InvalidInput("strong convexity gamma must be positive");
  if (lambda < gamma) throw InvalidInput("smoothness lambda must be at least gamma");
  Objective o;
  o.family_ = ObjectiveFamily::quadratic;
  o.dim_ = dim;
  o.feature_bound_ = feature_bound;
  o.label_bound_ = label_bound;
  o.c_ = std::sqrt(lambda - gamma) / feature_bound;
  o.u_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  const double c = o.c_, bx = feature_bound, w = radius;
  const double residual = c * w * bx + label_bound;
  auto& k = o.cert_;
  k.lambda = lambda;
  k.gamma = gamma;
  k.radius = radius;
  k.convex = true;
  k.lipschitz = c * residual * bx + gamma * w;
  k.loss_bound = 0.5 * residual * residual + 0.5 * gamma * w * w;
  k.zeta = c * std::hypot(residual + c * w * bx, bx);
  k.sample_diameter = 2.0 * std::hypot(feature_bound, label_bound);
  return o;
}

Objective make_nonconvex_objective(std::size_t dim, double lambda, double feature_bound,
                                   double label_bound, double ripple_amplitude, double radius) {
  check_common(dim, feature_bound, label_bound, radius);
  if (ripple_amplitude < 0.0) throw InvalidInput("ripple amplitude must be non-negative");
  if (ripple_amplitude > lambda)
    throw InvalidInput("ripple amplitude " + std::to_string(ripple_amplitude) +
                       " pushes the curvature bound above lambda = " + std::to_string(lambda));
  Objective o;
  o.family_ = ObjectiveFamily::ripple;
  o.dim_ = dim;
  o.feature_bound_ = feature_bound;
  o.label_bound_ = label_bound;
  o.a_ = ripple_amplitude;
  o.c_ = std::sqrt(lambda - ripple_amplitude) / feature_bound;
  o.u_ = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(dim), 0);
  const double c = o.c_, bx = feature_bound, w = radius, a = ripple_amplitude;
  const double residual = c * w * bx + label_bound;
  auto& k = o.cert_;
  k.lambda = lambda;
  k.gamma = 0.0;
  k.radius = radius;
  k.convex = a == 0.0;
  k.lipschitz = c * residual * bx + a;
  k.loss_bound = 0.5 * residual * residual + 2.0 * a;
  k.zeta = c * std::hypot(residual + c * w * bx, bx);
  k.sample_diameter = 2.0 * std::hypot(feature_bound, label_bound);
  return o;
}

FieldInput RandomField::input() const {
  FieldInput in;
  in.m = Eigen::VectorXd::Zero(members.front().size());
  for (const auto& x : members) in.m += x;
  in.m /= static_cast<double>(members.size());
  in.y = y;
  return in;
}

RandomField random_field(const Objective& obj, Rng& rng) {
  RandomField f;
  const std::size_t k = 1 + rng.index(4);
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::VectorXd x = random_in_ball(obj.dim(), obj.feature_bound(), rng);
    // Every other draw sits on the sphere, where the constants are tight.
    if (rng.bernoulli(0.5)) x *= obj.feature_bound() / x.norm();
    f.members.push_back(std::move(x));
  }
  f.y = rng.uniform(-obj.label_bound(), obj.label_bound());
  return f;
}

EmpiricalCertificate certify_constants(const Objective& obj, const ConstantsCertificate& declared,
                                       std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidInput("certification needs at least one trial");
  EmpiricalCertificate cert;
  cert.trials = trials;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    RandomField field = random_field(obj, rng);
    const FieldInput in = field.input();
    const Eigen::VectorXd w = obj.random_weight(rng);
    Eigen::VectorXd wp = obj.random_weight(rng);
    if (rng.bernoulli(0.5)) wp = obj.project(w + 1e-3 * (wp - w));
    const double dw = (w - wp).norm();
    const Eigen::VectorXd g = obj.gradient(in, w);
    const double fw = obj.evaluate(in, w);
    cert.loss_max = std::max(cert.loss_max, fw);
    track(cert, "loss_bound", fw, declared.loss_bound, in, w, w);
    if (dw > 0.0) {
      const double smooth = (g - obj.gradient(in, wp)).norm() / dw;
      const double lip = std::abs(fw - obj.evaluate(in, wp)) / dw;
      cert.smoothness = std::max(cert.smoothness, smooth);
      cert.lipschitz = std::max(cert.lipschitz, lip);
      track(cert, "lambda", smooth, declared.lambda, in, w, wp);
      track(cert, "lipschitz", lip, declared.lipschitz, in, w, wp);
    }
    // Replace one member; the label moves only when the centre (member 0) does.
    RandomField moved = field;
    const std::size_t j = rng.index(field.members.size());
    RandomField fresh = random_field(obj, rng);
    moved.members[j] = fresh.members[0];
    if (j == 0) moved.y = fresh.y;
    const double dz = std::sqrt((moved.members[j] - field.members[j]).squaredNorm() +
                                (moved.y - field.y) * (moved.y - field.y));
    if (dz > 0.0) {
      const double zeta = (g - obj.gradient(moved.input(), w)).norm() / dz;
      cert.zeta = std::max(cert.zeta, zeta);
      track(cert, "zeta", zeta, declared.zeta, in, w, w);
    }
  }
  // Adversarial pair along the top Hessian direction at a maximal-norm field.
  FieldInput in;
  in.m = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(obj.dim()), 0) * obj.feature_bound();
  const Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj.dim()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(obj.hessian(in, w));
  Eigen::Index top = 0;
  eig.eigenvalues().cwiseAbs().maxCoeff(&top);
  const Eigen::VectorXd wp = 1e-4 * obj.constants().radius * eig.eigenvectors().col(top);
  const double smooth = (obj.gradient(in, w) - obj.gradient(in, wp)).norm() / wp.norm();
  cert.smoothness = std::max(cert.smoothness, smooth);
  track(cert, "lambda", smooth, declared.lambda, in, w, wp);
  return cert;
}

EmpiricalCertificate certify_constants(const Objective& obj, std::size_t trials,
                                       std::uint64_t seed) {
  return certify_constants(obj, obj.constants(), trials, seed);
}

CocoercivityReport cocoercivity_check(const Objective& obj, std::size_t trials,
                                      std::uint64_t seed) {
  CocoercivityReport rep;
  rep.trials = trials;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  const double lambda = obj.constants().lambda;
  auto consider = [&](const FieldInput& in, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    const Eigen::VectorXd dg = obj.gradient(in, v) - obj.gradient(in, w);
    const double viol = dg.squaredNorm() / lambda - dg.dot(v - w);
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      if (viol > 1e-9) rep.witness = CertificationWitness{"cocoercivity", viol, 0.0, in, v, w};
    }
  };
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const FieldInput in = random_field(obj, rng).input();
    const Eigen::VectorXd v = obj.random_weight(rng);
    const Eigen::VectorXd w = obj.random_weight(rng);
    consider(in, v, w);
  }
  if (obj.family() == ObjectiveFamily::ripple) {
    // 1-D slice along u with the data term switched off.
    FieldInput in;
    in.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj.dim()));
    const double r = obj.constants().radius;
    constexpr int kGrid = 41;
    for (int s = 0; s < kGrid; ++s)
      for (int q = 0; q < kGrid; ++q) {
        const double a = -r + 2.0 * r * s / (kGrid - 1);
        const double b = -r + 2.0 * r * q / (kGrid - 1);
        consider(in, a * obj.ripple_direction(), b * obj.ripple_direction());
      }
  }
  if (!std::isfinite(rep.max_violation)) rep.max_violation = 0.0;
  return rep;
}

double gradient_check(const Objective& obj, std::size_t points, std::uint64_t seed) {
  Rng rng(seed);
  const double h = 1e-5 * std::max(1.0, obj.constants().radius);
  double worst = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    const FieldInput in = random_field(obj, rng).input();
    Eigen::VectorXd w = obj.random_weight(rng);
    const Eigen::VectorXd g = obj.gradient(in, w);
    Eigen::VectorXd fd(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      const double keep = w[k];
      w[k] = keep + h;
      const double up = obj.evaluate(in, w);
      w[k] = keep - h;
      const double down = obj.evaluate(in, w);
      w[k] = keep;
      fd[k] = (up - down) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

}  // namespace mfstab
