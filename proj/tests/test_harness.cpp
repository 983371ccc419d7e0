#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mfstab/errors.hpp"
#include "mfstab/harness.hpp"

using namespace mfstab;

namespace {

SgdLearner sgd_learner(const ReceptiveFieldMap& rf, std::size_t dim, std::size_t steps) {
  SgdConfig cfg;
  cfg.alpha = 0.5;
  cfg.steps = steps;
  cfg.seed = 13;
  return SgdLearner(make_strongly_convex_objective(dim, 1.0, 0.5, 1.0, 1.0), rf, cfg);
}

HarnessOptions options(std::size_t k, std::size_t k_test) {
  HarnessOptions opt;
  opt.k = k;
  opt.k_test = k_test;
  return opt;
}

}  // namespace

TEST_CASE("a data-independent learner is perfectly stable") {
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(6));
  const IidSampler s(6, IidLaw{});
  const ConstantLearner c(0.1, 1.0);
  const auto est = estimate_stability(c, s, rf, options(4, 4), 1);
  CHECK(est.beta1 == 0.0);
  CHECK(est.beta2 == 0.0);
  CHECK(estimate_mu(c, s, 3, options(4, 4), 1) == 0.0);
  const ExhaustiveOracle oracle(c, ising_on_graph(cycle_graph(4), 0.3, 0.0));
  CHECK(oracle.stability(ReceptiveFieldMap::one_hop(cycle_graph(4))).beta2 == 0.0);
  CHECK(oracle.shift(0b1111) == 0.0);
}

TEST_CASE("estimates are nested in K and K'") {
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(8));
  const IidSampler s(8, IidLaw{});
  const auto alg = sgd_learner(rf, 2, 40);
  const auto small = estimate_stability(alg, s, rf, options(2, 2), 5);
  const auto large = estimate_stability(alg, s, rf, options(6, 6), 5);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(small.beta1_i[i] <= large.beta1_i[i]);
    CHECK(small.beta2_i[i] <= large.beta2_i[i]);
    CHECK(large.beta1_i[i] <= large.beta2_i[i]);
  }
  CHECK(large.beta2 > 0.0);
  CHECK(large.discrepancy == doctest::Approx(large.beta2 - large.beta1));
  CHECK(estimate_mu(alg, s, 1, options(6, 6), 5) == doctest::Approx(large.beta2));
  CHECK(estimate_mu(alg, s, 3, options(6, 6), 5) >= estimate_mu(alg, s, 1, options(6, 6), 5));
}

TEST_CASE("results do not depend on the worker count") {
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(8));
  const IidSampler s(8, IidLaw{});
  const auto alg = sgd_learner(rf, 2, 20);
  auto opt = options(3, 3);
  const auto one = estimate_stability(alg, s, rf, opt, 9);
  opt.workers = 3;
  const auto three = estimate_stability(alg, s, rf, opt, 9);
  CHECK(one.beta2_i == three.beta2_i);
  CHECK(one.beta1_i == three.beta1_i);
}

TEST_CASE("monte carlo estimates never exceed the exhaustive values") {
  const IsingSpec spec = ising_on_graph(cycle_graph(5), 0.4, 0.1, 1);
  const IsingSampler s(spec, 50);
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(5));
  const auto alg = sgd_learner(rf, 1, 30);
  const ExhaustiveOracle oracle(alg, spec);
  CHECK(oracle.configurations() == 32);
  const auto exact = oracle.stability(rf);
  const auto mc = estimate_stability(alg, s, rf, options(8, 8), 2);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(mc.beta1_i[i] <= exact.beta1_i[i] + 1e-12);
    CHECK(mc.beta2_i[i] <= exact.beta2_i[i] + 1e-12);
  }
  CHECK(exact.beta2 > 0.0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(oracle.shift(std::size_t{1} << i) == doctest::Approx(exact.beta2_i[i]));
}

TEST_CASE("exhaustive risk of a constant predictor") {
  const IsingSpec spec = ising_on_graph(path_graph(3), 0.5, 0.2);
  const ConstantLearner c(0.25, 1.0);
  const ExhaustiveOracle oracle(c, spec);
  double sum = 0.0, expect = 0.0;
  for (double p : oracle.probabilities()) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  const auto probs = gibbs_probabilities(spec);
  for (std::size_t cfg = 0; cfg < probs.size(); ++cfg) {
    const SampleSet z = samples_from_spins(spec, spins_from_index(cfg, 3));
    double loss = 0.0;
    for (const auto& v : z.samples) loss += (0.25 - v.y) * (0.25 - v.y) / 3.0;
    expect += probs[cfg] * loss;
  }
  CHECK(oracle.risk(0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(ExhaustiveOracle(c, ising_on_graph(cycle_graph(9), 0.1, 0.0)), CapacityError);
}

TEST_CASE("determinism check and generalization gap") {
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(6));
  const IidSampler s(6, IidLaw{});
  const auto alg = sgd_learner(rf, 2, 20);
  CHECK_NOTHROW(require_deterministic(alg, s.draw(1)));
  const auto gaps = estimate_generalization_gap(alg, s, 4, 3, 8);
  REQUIRE(gaps.size() == 3);
  for (const auto& g : gaps) CHECK(g.phi == doctest::Approx(g.test_risk - g.train_risk));
}

TEST_CASE("stability csv") {
  StabilityEstimate est;
  est.beta1_i = {0.0, 0.1};
  est.beta2_i = {0.2, 0.3};
  std::ostringstream out;
  write_stability_csv(out, est);
  CHECK(out.str().rfind("i,beta1_i,beta2_i,K,K_test,seed\n", 0) == 0);
}
