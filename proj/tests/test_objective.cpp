#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfstab/errors.hpp"
#include "mfstab/objective.hpp"

using namespace mfstab;

TEST_CASE("declared constants of the quadratic family") {
  const Objective q = make_strongly_convex_objective(2, 1.0, 0.5, 1.0, 1.0, 2.0);
  const auto& k = q.constants();
  CHECK(q.scale() == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(k.lipschitz == doctest::Approx(2.7071067811865475).epsilon(1e-12));
  CHECK(k.loss_bound == doctest::Approx(3.914213562373095).epsilon(1e-12));
  CHECK(k.zeta == doctest::Approx(2.7979326519318137).epsilon(1e-12));
  CHECK(k.sample_diameter == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(k.convex);
}

TEST_CASE("declared constants of the ripple family") {
  const Objective r = make_nonconvex_objective(2, 1.0, 1.0, 1.0, 0.5, 4.0);
  const auto& k = r.constants();
  CHECK(k.gamma == 0.0);
  CHECK_FALSE(k.convex);
  CHECK(k.lipschitz == doctest::Approx(3.207106781186548).epsilon(1e-12));
  CHECK(k.loss_bound == doctest::Approx(8.328427124746192).epsilon(1e-12));
  CHECK(k.zeta == doctest::Approx(4.759921664218056).epsilon(1e-12));
}

TEST_CASE("bad construction parameters are rejected") {
  CHECK_THROWS_AS(make_strongly_convex_objective(2, 1.0, 1.5, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_strongly_convex_objective(0, 1.0, 0.5, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(make_nonconvex_objective(2, 1.0, 1.0, 1.0, 1.5), InvalidInput);
}

TEST_CASE("empirical certification stays inside the declared constants") {
  for (const Objective& obj : {make_strongly_convex_objective(3, 1.0, 0.5, 1.0, 1.0),
                               make_strongly_convex_objective(2, 2.0, 0.1, 1.5, 0.5, 3.0),
                               make_nonconvex_objective(2, 1.0, 1.0, 1.0, 0.5)}) {
    const auto cert = certify_constants(obj, 3000, 17);
    CHECK(cert.passed);
    CHECK_FALSE(cert.witness.has_value());
    CHECK(cert.smoothness <= obj.constants().lambda + 1e-9);
    CHECK(cert.smoothness >= 0.9 * obj.constants().lambda);
    CHECK(gradient_check(obj, 200, 3) < 1e-6);
  }
}

TEST_CASE("understated constants produce a witness") {
  const Objective q = make_strongly_convex_objective(2, 1.0, 0.5, 1.0, 1.0);
  ConstantsCertificate wrong = q.constants();
  wrong.lambda = 0.5;
  const auto cert = certify_constants(q, wrong, 2000, 5);
  CHECK_FALSE(cert.passed);
  REQUIRE(cert.witness.has_value());
  CHECK(cert.witness->ratio > 0.5);
}

TEST_CASE("hessian spectrum") {
  const Objective q = make_strongly_convex_objective(3, 1.0, 0.25, 1.0, 1.0);
  const Objective r = make_nonconvex_objective(3, 1.0, 1.0, 1.0, 0.5);
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const RandomField f = random_field(q, rng);
    const Eigen::VectorXd w = q.random_weight(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(q.hessian(f.input(), w));
    CHECK(eq.eigenvalues().minCoeff() >= 0.25 - 1e-12);
    CHECK(eq.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(r.hessian(f.input(), r.random_weight(rng)));
    CHECK(er.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("co-coercivity") {
  const auto convex = cocoercivity_check(make_strongly_convex_objective(2, 1.0, 0.5, 1.0, 1.0), 5000, 1);
  CHECK(convex.max_violation <= 1e-9);
  const auto ripple = cocoercivity_check(make_nonconvex_objective(2, 1.0, 1.0, 1.0, 0.5), 5000, 1);
  CHECK(ripple.max_violation > 1e-3);
  CHECK(ripple.witness.has_value());
}

TEST_CASE("projection and field inputs") {
  const Objective q = make_strongly_convex_objective(2, 1.0, 0.5, 1.0, 1.0, 2.0);
  const Eigen::VectorXd far = Eigen::Vector2d(3.0, 4.0);
  CHECK(q.project(far).norm() == doctest::Approx(2.0));
  const Eigen::VectorXd near = Eigen::Vector2d(0.3, 0.4);
  CHECK(q.project(near) == near);

  SampleSet z;
  for (int i = 0; i < 3; ++i) z.samples.push_back({Eigen::Vector2d(i, 2.0 * i), static_cast<double>(i)});
  const auto rf = ReceptiveFieldMap::one_hop(path_graph(3));
  const FieldInput in = field_input(z, rf, 0);
  CHECK(in.m(0) == doctest::Approx(0.5));
  CHECK(in.m(1) == doctest::Approx(1.0));
  CHECK(in.y == 0.0);
  CHECK(field_input(z, rf, 1).m(0) == doctest::Approx(1.0));
}
