#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfstab/errors.hpp"
#include "mfstab/gnn.hpp"

using namespace mfstab;

namespace {

GnnProblem path_problem() {
  GnnProblem p;
  p.x = Eigen::MatrixXd(3, 1);
  p.x << 1, 2, 1;
  p.w = Eigen::VectorXd::Ones(1);
  p.y = Eigen::Vector3d(1.0, -1.0, 0.5);
  p.mask = ReceptiveFieldMap::one_hop(path_graph(3));
  p.gamma_reg = 1.0;
  return p;
}

}  // namespace

TEST_CASE("full-mask closed form on two vertices") {
  GnnProblem p;
  p.x = Eigen::MatrixXd::Ones(2, 1);
  p.w = Eigen::VectorXd::Ones(1);
  p.y = Eigen::Vector2d(1.0, 0.0);
  p.mask = ReceptiveFieldMap::one_hop(complete_graph(2));
  p.gamma_reg = 1.0;
  const auto s = fit_gnn(p, GnnMethod::masked_closed_form);
  Eigen::MatrixXd expect(2, 2);
  expect << 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0;
  CHECK((s.a - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(gnn_gradient(p, s.a).norm() < 1e-12);
  CHECK((fit_gnn(p, GnnMethod::exact_rowwise).a - s.a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("masked solutions on a path") {
  const GnnProblem p = path_problem();
  const auto row = fit_exact_rowwise(p).a;
  Eigen::MatrixXd expect_row(3, 3);
  expect_row << 1.0 / 6, 2.0 / 6, 0, -1.0 / 7, -2.0 / 7, -1.0 / 7, 0, 1.0 / 6, 0.5 / 6;
  CHECK((row - expect_row).cwiseAbs().maxCoeff() < 1e-15);
  const auto masked = fit_masked_closed_form(p).a;
  Eigen::MatrixXd expect_masked(3, 3);
  expect_masked << 1.0 / 7, 2.0 / 7, 0, -1.0 / 7, -2.0 / 7, -1.0 / 7, 0, 1.0 / 7, 0.5 / 7;
  CHECK((masked - expect_masked).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(gnn_objective(p, row) <= gnn_objective(p, masked));
  const Eigen::MatrixXd grad = gnn_gradient(p, row).cwiseProduct(mask_matrix(p.mask));
  CHECK(grad.norm() < 1e-12);
}

TEST_CASE("row-wise optimum on random masked instances") {
  GnnInstanceLaw law;
  law.gamma_reg = 0.5;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = erdos_renyi_graph(12, 0.3, seed);
    const GnnProblem p = random_gnn_problem(ReceptiveFieldMap::one_hop(g), law, seed);
    const auto row = fit_exact_rowwise(p);
    const auto masked = fit_masked_closed_form(p);
    CHECK(row.objective <= masked.objective + 1e-12);
    CHECK(gnn_gradient(p, row.a).cwiseProduct(mask_matrix(p.mask)).norm() < 1e-10);
  }
}

TEST_CASE("objective rejects support off the mask") {
  const GnnProblem p = path_problem();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 2) = 1.0;
  CHECK_THROWS_AS(gnn_objective(p, a), InvalidInput);
  GnnProblem bad = p;
  bad.gamma_reg = 0.0;
  CHECK_THROWS_AS(fit_exact_rowwise(bad), InvalidInput);
}

TEST_CASE("test loss gap") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 1);
  const auto gap = test_loss_gap(a, b, Eigen::MatrixXd::Constant(1, 1, 0.2), 0.5, 1.0);
  CHECK(gap[0] == doctest::Approx(1.25));
  CHECK(test_loss_gap(a, a, Eigen::MatrixXd::Constant(1, 1, 0.2), 0.5, 1.0)[0] == 0.0);
}

TEST_CASE("label perturbations leave other rows untouched") {
  GnnExperimentOptions opt;
  opt.method = GnnMethod::exact_rowwise;
  opt.test_draws = 32;
  const auto res = gnn_stability_experiment(cycle_graph(10), GnnPerturbation::label, 2, opt, 3);
  CHECK(res.beta1 == 0.0);
  CHECK(res.beta2 > 0.0);
  CHECK(res.discrepancy == res.beta2);
  CHECK(res.sup_d == doctest::Approx(0.3));
  const auto again = gnn_stability_experiment(cycle_graph(10), GnnPerturbation::label, 2, opt, 3);
  CHECK(again.beta2 == res.beta2);
}

TEST_CASE("feature perturbations") {
  GnnExperimentOptions opt;
  opt.test_draws = 32;
  opt.epsilon_feature = 1e-3;
  const auto res = gnn_stability_experiment(cycle_graph(10), GnnPerturbation::feature, 2, opt, 4);
  CHECK(res.beta2 > 0.0);
  CHECK(res.beta1 <= res.beta2);
  opt.epsilon_feature = 0.2;
  CHECK_THROWS_AS(gnn_stability_experiment(cycle_graph(10), GnnPerturbation::feature, 1, opt, 4), InvalidInput);
}
