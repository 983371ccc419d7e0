#include "mfstab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <thread>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

std::vector<SampleSet> test_sets(const Sampler& sampler, const HarnessOptions& opt,
                                 std::uint64_t seed) {
  std::vector<SampleSet> tests;
  for (std::size_t k = 0; k < opt.k_test; ++k)
    tests.push_back(sampler.draw(derive_seed(seed, "harness/test", {k})));
  if (opt.extreme_tests)
    for (auto& z : sampler.extreme_candidates()) tests.push_back(std::move(z));
  return tests;
}

std::vector<VertexStability> measure(const Learner& alg, const Sampler& sampler,
                                     const ReceptiveFieldMap& rf,
                                     const std::vector<std::size_t>& vertices,
                                     const HarnessOptions& opt, std::uint64_t seed) {
  if (opt.k == 0 || opt.k_test == 0) throw InvalidInput("K and K' must be at least 1");
  if (rf.size() != sampler.size()) throw InvalidInput("receptive fields do not match the sampler");
  const auto tests = test_sets(sampler, opt, seed);
  std::vector<VertexStability> out(vertices.size());
  for (std::size_t k = 0; k < opt.k; ++k) {
    const SampleSet z = sampler.draw(derive_seed(seed, "harness/train", {k}));
    if (k == 0) require_deterministic(alg, z);
    const Eigen::VectorXd a = alg.fit(z);
    std::vector<std::vector<double>> base;
    for (const auto& t : tests) base.push_back(alg.vertex_losses(a, t));
    parallel_for(vertices.size(), opt.workers, [&](std::size_t slot) {
      const std::size_t i = vertices[slot];
      const std::size_t lambda[] = {i};
      const SampleSet zi =
          sampler.replace(z, lambda, opt.mode, derive_seed(seed, "harness/replace", {k, i}));
      const Eigen::VectorXd b = alg.fit(zi);
      auto& v = out[slot];
      for (std::size_t t = 0; t < tests.size(); ++t) {
        const auto moved = alg.vertex_losses(b, tests[t]);
        for (std::size_t j = 0; j < moved.size(); ++j) {
          const double d = std::abs(base[t][j] - moved[j]);
          v.beta2 = std::max(v.beta2, d);
          if (!rf.contains(i, j)) v.beta1 = std::max(v.beta1, d);
        }
      }
    });
  }
  return out;
}

}  // namespace

Eigen::VectorXd SgdLearner::fit(std::span<const SampleSet> train) const {
  if (train.empty()) throw InvalidInput("no training data");
  std::vector<FieldInput> inputs;
  for (const auto& z : train) {
    auto part = field_inputs(z, rf_);
    inputs.insert(inputs.end(), part.begin(), part.end());
  }
  Eigen::VectorXd w = cfg_.w0 ? obj_.project(*cfg_.w0)
                              : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(obj_.dim()));
  Rng rng(cfg_.seed);
  for (std::size_t t = 1; t <= cfg_.steps; ++t)
    w = sgd_step(w, cfg_.step_size(t), inputs[rng.index(inputs.size())], obj_, cfg_.project);
  return w;
}

std::vector<double> SgdLearner::vertex_losses(const Eigen::VectorXd& params,
                                              const SampleSet& test) const {
  std::vector<double> out;
  out.reserve(test.size());
  for (const auto& in : field_inputs(test, rf_)) out.push_back(obj_.evaluate(in, params));
  return out;
}

Eigen::VectorXd ConstantLearner::fit(std::span<const SampleSet>) const {
  return Eigen::VectorXd::Constant(1, prediction_);
}

std::vector<double> ConstantLearner::vertex_losses(const Eigen::VectorXd& params,
                                                   const SampleSet& test) const {
  std::vector<double> out;
  for (const auto& s : test.samples) out.push_back((params[0] - s.y) * (params[0] - s.y));
  return out;
}

double ConstantLearner::loss_bound() const {
  return (std::abs(prediction_) + label_bound_) * (std::abs(prediction_) + label_bound_);
}

Eigen::VectorXd GnnLearner::fit(std::span<const SampleSet> train) const {
  if (train.size() != 1) throw InvalidInput("the GNN learner trains on exactly one sample set");
  const SampleSet& z = train[0];
  GnnProblem p;
  p.mask = mask_;
  p.w = w_;
  p.gamma_reg = gamma_reg_;
  p.x.resize(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(z.dim()));
  p.y.resize(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    p.x.row(static_cast<Eigen::Index>(i)) = z.samples[i].x.transpose();
    p.y[static_cast<Eigen::Index>(i)] = z.samples[i].y;
  }
  const Eigen::MatrixXd a = fit_gnn(p, method_).a;
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

std::vector<double> GnnLearner::vertex_losses(const Eigen::VectorXd& params,
                                              const SampleSet& test) const {
  const auto n = static_cast<Eigen::Index>(test.size());
  const Eigen::Map<const Eigen::MatrixXd> a(params.data(), n, n);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = test.samples[static_cast<std::size_t>(j)].x.dot(w_);
  const Eigen::VectorXd pred = a * v;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = pred[j] - test.samples[static_cast<std::size_t>(j)].y;
    out[static_cast<std::size_t>(j)] = r * r;
  }
  return out;
}

double GnnLearner::loss_bound() const {
  // |A_jk| <= B_y B_v / gamma and |v'_k| <= B_v with B_v = B_X ||w||.
  const double bv = feature_bound_ * w_.norm();
  std::size_t widest = 0;
  for (std::size_t i = 0; i < mask_.size(); ++i) widest = std::max(widest, mask_.cardinality(i));
  const double pred = static_cast<double>(widest) * label_bound_ * bv * bv / gamma_reg_;
  return (pred + label_bound_) * (pred + label_bound_);
}

void require_deterministic(const Learner& alg, const SampleSet& z) {
  if (!bitwise_equal(alg.fit(z), alg.fit(z)))
    throw InvalidInput("algorithm " + alg.id() + " is not deterministic given its data and seed");
}

VertexStability estimate_vertex_stability(const Learner& alg, const Sampler& sampler,
                                          const ReceptiveFieldMap& rf, std::size_t i,
                                          const HarnessOptions& opt, std::uint64_t seed) {
  if (i >= sampler.size()) throw InvalidInput("vertex index out of range");
  return measure(alg, sampler, rf, {i}, opt, seed)[0];
}

StabilityEstimate estimate_stability(const Learner& alg, const Sampler& sampler,
                                     const ReceptiveFieldMap& rf, const HarnessOptions& opt,
                                     std::uint64_t seed) {
  std::vector<std::size_t> all(sampler.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto per = measure(alg, sampler, rf, all, opt, seed);
  StabilityEstimate est;
  est.k = opt.k;
  est.k_test = opt.k_test;
  est.seed = seed;
  est.algorithm = alg.id();
  for (const auto& v : per) {
    est.beta1_i.push_back(v.beta1);
    est.beta2_i.push_back(v.beta2);
    est.beta1 = std::max(est.beta1, v.beta1);
    est.beta2 = std::max(est.beta2, v.beta2);
  }
  est.discrepancy = est.beta2 - est.beta1;
  return est;
}

double estimate_mu(const Learner& alg, const Sampler& sampler, std::size_t m,
                   const HarnessOptions& opt, std::uint64_t seed) {
  if (m == 0) throw InvalidInput("m must be at least 1");
  if (opt.k == 0 || opt.k_test == 0) throw InvalidInput("K and K' must be at least 1");
  const auto tests = test_sets(sampler, opt, seed);
  auto set_seed = [&](std::size_t k, std::size_t g) {
    return g == 0 ? derive_seed(seed, "harness/train", {k}) : derive_seed(seed, "harness/train", {k, g});
  };
  auto replace_seed = [&](std::size_t k, std::size_t i, std::size_t g) {
    return g == 0 ? derive_seed(seed, "harness/replace", {k, i})
                  : derive_seed(seed, "harness/replace", {k, i, g});
  };
  double mu = 0.0;
  for (std::size_t mp = 1; mp <= m; ++mp) {
    for (std::size_t k = 0; k < opt.k; ++k) {
      std::vector<SampleSet> pool;
      for (std::size_t g = 0; g < mp; ++g) pool.push_back(sampler.draw(set_seed(k, g)));
      const Eigen::VectorXd a = alg.fit(pool);
      std::vector<std::vector<double>> base;
      for (const auto& t : tests) base.push_back(alg.vertex_losses(a, t));
      for (std::size_t g = 0; g < mp; ++g)
        for (std::size_t i = 0; i < sampler.size(); ++i) {
          std::vector<SampleSet> moved_pool = pool;
          const std::size_t lambda[] = {i};
          moved_pool[g] = sampler.replace(pool[g], lambda, opt.mode, replace_seed(k, i, g));
          const Eigen::VectorXd b = alg.fit(moved_pool);
          for (std::size_t t = 0; t < tests.size(); ++t) {
            const auto moved = alg.vertex_losses(b, tests[t]);
            for (std::size_t j = 0; j < moved.size(); ++j)
              mu = std::max(mu, std::abs(base[t][j] - moved[j]));
          }
        }
    }
  }
  return mu;
}

std::vector<GapSample> estimate_generalization_gap(const Learner& alg, const Sampler& sampler,
                                                   std::size_t test_graphs, std::size_t trials,
                                                   std::uint64_t seed) {
  if (test_graphs == 0) throw InvalidInput("need at least one test graph");
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<GapSample> out;
  for (std::size_t tr = 0; tr < trials; ++tr) {
    GapSample g;
    g.seed = derive_seed(seed, "harness/gap", {tr});
    g.test_graphs = test_graphs;
    const SampleSet z = sampler.draw(g.seed);
    const Eigen::VectorXd params = alg.fit(z);
    g.train_risk = mean(alg.vertex_losses(params, z));
    for (std::size_t t = 0; t < test_graphs; ++t)
      g.test_risk += mean(alg.vertex_losses(params, sampler.draw(derive_seed(seed, "harness/gap-test", {tr, t}))));
    g.test_risk /= static_cast<double>(test_graphs);
    g.phi = g.test_risk - g.train_risk;
    out.push_back(g);
  }
  return out;
}

ExhaustiveOracle::ExhaustiveOracle(const Learner& alg, const IsingSpec& spec) : n_(spec.size()) {
  spec.validate();
  if (n_ > kMaxExhaustive)
    throw CapacityError("exhaustive mode enumerates at most " + std::to_string(kMaxExhaustive) +
                        " vertices (got " + std::to_string(n_) + ")");
  configs_ = std::size_t{1} << n_;
  std::vector<SampleSet> sets;
  for (std::size_t c = 0; c < configs_; ++c)
    sets.push_back(samples_from_spins(spec, spins_from_index(c, n_)));
  losses_.resize(configs_ * configs_ * n_);
  for (std::size_t c = 0; c < configs_; ++c) {
    const Eigen::VectorXd params = alg.fit(sets[c]);
    for (std::size_t t = 0; t < configs_; ++t) {
      const auto l = alg.vertex_losses(params, sets[t]);
      std::copy(l.begin(), l.end(), losses_.begin() + static_cast<std::ptrdiff_t>((c * configs_ + t) * n_));
    }
  }
  prob_ = gibbs_probabilities(spec);
}

VertexStability ExhaustiveOracle::vertex_stability(const ReceptiveFieldMap& rf, std::size_t i) const {
  if (i >= n_) throw InvalidInput("vertex index out of range");
  VertexStability v;
  const std::size_t bit = std::size_t{1} << i;
  for (std::size_t c = 0; c < configs_; ++c)
    for (std::size_t t = 0; t < configs_; ++t)
      for (std::size_t j = 0; j < n_; ++j) {
        const double d = std::abs(loss(c, t, j) - loss(c ^ bit, t, j));
        v.beta2 = std::max(v.beta2, d);
        if (!rf.contains(i, j)) v.beta1 = std::max(v.beta1, d);
      }
  return v;
}

StabilityEstimate ExhaustiveOracle::stability(const ReceptiveFieldMap& rf) const {
  StabilityEstimate est;
  est.algorithm = "exhaustive";
  for (std::size_t i = 0; i < n_; ++i) {
    const auto v = vertex_stability(rf, i);
    est.beta1_i.push_back(v.beta1);
    est.beta2_i.push_back(v.beta2);
    est.beta1 = std::max(est.beta1, v.beta1);
    est.beta2 = std::max(est.beta2, v.beta2);
  }
  est.discrepancy = est.beta2 - est.beta1;
  return est;
}

double ExhaustiveOracle::shift(std::size_t lambda_mask) const {
  double worst = 0.0;
  for (std::size_t c = 0; c < configs_; ++c)
    for (std::size_t t = 0; t < configs_; ++t)
      for (std::size_t j = 0; j < n_; ++j)
        worst = std::max(worst, std::abs(loss(c, t, j) - loss(c ^ lambda_mask, t, j)));
  return worst;
}

double ExhaustiveOracle::empirical_risk(std::size_t c) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += loss(c, c, j);
  return s / static_cast<double>(n_);
}

double ExhaustiveOracle::risk(std::size_t c) const {
  double r = 0.0;
  for (std::size_t t = 0; t < configs_; ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += loss(c, t, j);
    r += prob_[t] * s / static_cast<double>(n_);
  }
  return r;
}

void write_stability_csv(std::ostream& out, const StabilityEstimate& est) {
  out << "i,beta1_i,beta2_i,K,K_test,seed\n";
  out.precision(17);
  for (std::size_t i = 0; i < est.beta2_i.size(); ++i)
    out << i << ',' << est.beta1_i[i] << ',' << est.beta2_i[i] << ',' << est.k << ','
        << est.k_test << ',' << est.seed << '\n';
}

}  // namespace mfstab
