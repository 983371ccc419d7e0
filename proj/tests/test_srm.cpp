#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mfstab/bounds.hpp"
#include "mfstab/errors.hpp"
#include "mfstab/srm.hpp"

using namespace mfstab;

namespace {

DegreeClassFamily family(std::size_t n, std::size_t d_max, double beta2_per_d) {
  auto f = DegreeClassFamily::truncations(ReceptiveFieldMap::one_hop(complete_graph(n)), d_max);
  for (auto& c : f.classes) c.beta2 = beta2_per_d * static_cast<double>(c.d);
  return f;
}

ClassTrainer fixed_risks(std::vector<double> risks) {
  return [risks](const SampleSet&, const DegreeClass& c) {
    return ClassFit{Eigen::VectorXd::Constant(1, static_cast<double>(c.d)), risks[c.d - 1]};
  };
}

}  // namespace

TEST_CASE("classes are nested truncations") {
  const auto f = family(8, 4, 0.0);
  REQUIRE(f.d_max() == 4);
  for (std::size_t k = 1; k < 4; ++k)
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        if (f.classes[k - 1].fields.contains(i, j)) CHECK(f.classes[k].fields.contains(i, j));
  CHECK(f.classes[0].fields.max_sparsity() == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("penalized selection") {
  const auto f = family(8, 4, 0.01);
  const SampleSet z = sample_iid(complete_graph(8), 2, 1);
  const auto trainer = fixed_risks({0.5, 0.4, 0.35, 0.34});
  CHECK(select_sparse(f, z, 0.0, trainer).d == 4);
  std::size_t last = 5;
  for (double lam : {0.0, 0.1, 1.0, 10.0}) {
    const auto sel = select_sparse(f, z, lam, trainer);
    CHECK(sel.d <= last);
    last = sel.d;
    for (const auto& row : sel.rows) {
      CHECK(row.penalty == doctest::Approx(2.0 * lam * row.d * 0.01 * row.d));
      CHECK(sel.penalized_risk <= row.penalized);
      CHECK(row.selected == (row.d == sel.d));
    }
  }
  CHECK(last == 1);
}

TEST_CASE("ties go to the smaller degree") {
  const auto f = family(6, 3, 0.0);
  const SampleSet z = sample_iid(complete_graph(6), 2, 1);
  CHECK(select_sparse(f, z, 1.0, fixed_risks({0.2, 0.2, 0.2})).d == 1);
}

TEST_CASE("truncated mode and rejection") {
  const auto f = family(6, 3, 0.01);
  const SampleSet z = sample_iid(complete_graph(6), 2, 1);
  CHECK(select_sparse(f, z, 10.0, fixed_risks({0.5, 0.4, 0.1}), SrmMode::truncated, 2).d == 2);
  CHECK_THROWS_AS(select_sparse(DegreeClassFamily{}, z, 1.0, fixed_risks({})), InvalidInput);
  CHECK_THROWS_AS(select_sparse(f, z, -1.0, fixed_risks({0.5, 0.4, 0.1})), InvalidInput);
}

TEST_CASE("gnn trainer risk is non-increasing in the degree") {
  const auto f = family(8, 8, 0.0);
  const auto trainer = gnn_class_trainer(Eigen::VectorXd::Constant(3, 1.0 / std::sqrt(3.0)), 1.0);
  IidLaw law;
  law.dim = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SampleSet z = sample_iid(8, law, seed);
    double prev = 1e300;
    for (const auto& c : f.classes) {
      const double r = trainer(z, c).empirical_risk;
      CHECK(r <= prev + 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("report at the epsilon floor with one class") {
  auto f = family(6, 1, 0.05);
  const SampleSet z = sample_iid(complete_graph(6), 2, 1);
  const auto sel = select_sparse(f, z, 0.5, fixed_risks({0.3}));
  const double floor = srm_epsilon_floor(0.05, 0.5, 1);
  const auto rep = srm_report(f, sel, {0.4}, 0.5, 1.0, 6, floor);
  CHECK(rep.epsilon_floor == doctest::Approx(0.15));
  CHECK(rep.failure_probability == srm_confidence(0.0, 0.05, 1.0, 0.5, 1, 6, floor));
  CHECK(rep.lhs == 0.4);
  CHECK(rep.rhs == doctest::Approx(0.4 + 2.5 * 0.05 + 0.15));
  CHECK(rep.holds);
  CHECK_THROWS_AS(srm_report(f, sel, {0.4}, 0.5, 1.0, 6, 0.1), InvalidInput);
}

TEST_CASE("srm csv") {
  const auto f = family(4, 2, 0.01);
  const auto sel = select_sparse(f, sample_iid(complete_graph(4), 2, 1), 1.0, fixed_risks({0.3, 0.2}));
  std::ostringstream out;
  write_srm_csv(out, sel);
  CHECK(out.str().rfind("d,class_risk,penalty,penalized_risk,selected\n", 0) == 0);
}
