#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"
#include "mfstab/sampler.hpp"

using namespace mfstab;

namespace {

IsingSpec random_spec(std::size_t n, Rng& rng) {
  IsingSpec s;
  s.coupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  s.field = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    s.field(static_cast<Eigen::Index>(i)) = rng.uniform(-0.5, 0.5);
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(0.5)) {
        const double J = rng.uniform(-0.6, 0.6);
        s.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = J;
        s.coupling(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = J;
      }
  }
  return s;
}

}  // namespace

TEST_CASE("rng streams") {
  CHECK(derive_seed(1, "sampler/") == derive_seed(1, "sampler/"));
  CHECK(derive_seed(1, "sampler/", {2}) != derive_seed(1, "sampler/", {3}));
  CHECK(derive_seed(1, "sampler/") != derive_seed(1, "sgd/"));
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(3);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto k = r.index(7);
    CHECK(k < 7);
    mean += r.normal() / 20000.0;
  }
  CHECK(std::abs(mean) < 0.03);
}

TEST_CASE("two-vertex ising oracle") {
  const IsingSpec spec = ising_on_graph(path_graph(2), 0.5, 0.0);
  const std::vector<int> up = {1, 1};
  CHECK(conditional_up_probability(spec, up, 0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  const auto p = gibbs_probabilities(spec);
  REQUIRE(p.size() == 4);
  CHECK(p[0] + p[3] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(dobrushin_exact(spec) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
  CHECK(dobrushin_exact(spec) == doctest::Approx(0.46211715726000974).epsilon(1e-12));
  CHECK(spins_from_index(2, 2) == std::vector<int>{-1, 1});
}

TEST_CASE("dobrushin coefficient") {
  CHECK(dobrushin_exact(ising_on_graph(cycle_graph(6), 0.0, 0.3)) == 0.0);
  CHECK_THROWS_AS(dobrushin_exact(ising_on_graph(cycle_graph(13), 0.1, 0.0)), CapacityError);
  Rng rng(21);
  for (int k = 0; k < 100; ++k) {
    const IsingSpec s = random_spec(2 + rng.index(7), rng);
    CHECK(dobrushin_upper_bound(s) >= dobrushin_exact(s) - 1e-12);
  }
}

TEST_CASE("glauber chain matches the gibbs measure") {
  const IsingSpec spec = ising_on_graph(path_graph(2), 0.5, 0.0);
  const auto draws = glauber_draws(spec, 20000, 100, 2, 7);
  double agree = 0.0;
  for (const auto& z : draws) agree += z[0] == z[1] ? 1.0 : 0.0;
  CHECK(agree / 20000.0 == doctest::Approx(0.7310585786300049).epsilon(0.03));

  const IsingSpec ring = ising_on_graph(cycle_graph(5), 0.3, 0.2);
  const auto exact = gibbs_probabilities(ring);
  double m_exact = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) m_exact += exact[c] * spins_from_index(c, 5)[0];
  const auto chain = glauber_draws(ring, 20000, 100, 2, 8);
  double m_chain = 0.0;
  for (const auto& z : chain) m_chain += z[0] / 20000.0;
  CHECK(std::abs(m_chain - m_exact) < 0.03);
}

TEST_CASE("features and labels from spins") {
  IsingSpec spec = ising_on_graph(path_graph(3), 0.2, 0.0, 2, 1.5, 1.0);
  const SampleSet z = samples_from_spins(spec, {1, -1, 1});
  CHECK(z.samples[0].x(0) == 1.5);
  CHECK(z.samples[0].x(1) == 0.0);
  CHECK(z.samples[1].x(1) == -1.5);
  CHECK(z.samples[2].x(0) == 1.5);
  CHECK(z.samples[0].y == doctest::Approx(0.0));
  CHECK(z.samples[1].y == doctest::Approx(1.0 / 3.0));
  spec.label_rule = LabelRule::own_spin;
  CHECK(samples_from_spins(spec, {1, -1, 1}).samples[1].y == -1.0);
}

TEST_CASE("spec validation") {
  IsingSpec s = ising_on_graph(path_graph(3), 0.2, 0.0);
  s.coupling(0, 1) = 0.4;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = ising_on_graph(path_graph(3), 0.2, 0.0);
  s.field(1) = NAN;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("iid sampler respects its bounds") {
  IidLaw law;
  law.dim = 3;
  law.feature_bound = 2.0;
  law.label_bound = 0.5;
  const IidSampler s(20, law);
  const SampleSet z = s.draw(4);
  CHECK(z.size() == 20);
  for (const auto& v : z.samples) {
    CHECK(v.x.norm() <= 2.0 + 1e-12);
    CHECK(std::abs(v.y) <= 0.5);
  }
  CHECK(s.sample_diameter() == doctest::Approx(2.0 * std::hypot(2.0, 0.5)));
  const SampleSet again = s.draw(4);
  CHECK(again.samples[7].x == z.samples[7].x);
}

TEST_CASE("replacement changes only the chosen vertices") {
  const IsingSampler ising(ising_on_graph(cycle_graph(8), 0.4, 0.1), 200);
  const IidSampler iid(8, IidLaw{});
  for (const Sampler* s : {static_cast<const Sampler*>(&ising), static_cast<const Sampler*>(&iid)}) {
    const SampleSet z = s->draw(1);
    for (ReplaceMode mode : {ReplaceMode::fresh_marginal, ReplaceMode::fresh_conditional}) {
      const std::vector<std::size_t> lambda = {2, 5};
      const SampleSet zl = s->replace(z, lambda, mode, 99);
      CHECK(zl.perturbed == lambda);
      for (std::size_t j : differing_vertices(z, zl)) CHECK((j == 2 || j == 5));
      const SampleSet same = s->replace(z, std::vector<std::size_t>{}, mode, 99);
      CHECK(same.unchanged_copy);
      CHECK(differing_vertices(z, same).empty());
    }
    const std::vector<std::size_t> bad = {8};
    CHECK_THROWS_AS(s->replace(z, bad, ReplaceMode::fresh_marginal, 1), InvalidInput);
  }
}

TEST_CASE("samples csv") {
  const IidSampler s(2, IidLaw{});
  std::ostringstream out;
  write_samples_csv(out, s.draw(1));
  const std::string text = out.str();
  CHECK(text.rfind("vertex,x0,x1,label,perturbed\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
