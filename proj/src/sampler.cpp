#include "mfstab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double local_field(const IsingSpec& spec, std::span<const int> spins, std::size_t i) {
  double s = spec.field[static_cast<Eigen::Index>(i)];
  const auto row = spec.coupling.row(static_cast<Eigen::Index>(i));
  for (std::size_t k = 0; k < spins.size(); ++k)
    if (k != i) s += row[static_cast<Eigen::Index>(k)] * spins[k];
  return s;
}

Eigen::VectorXd spin_feature(const IsingSpec& spec, std::size_t i, int spin) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim));
  x[static_cast<Eigen::Index>(i % spec.dim)] = spec.feature_bound * spin;
  return x;
}

double spin_label(const IsingSpec& spec, std::span<const int> spins, std::size_t i) {
  double y = 0.0;
  if (spec.label_rule == LabelRule::own_spin || spec.label_fields.size() == 0) {
    y = spins[i];
  } else {
    const auto members = spec.label_fields.field(i);
    for (std::size_t k : members) y += spins[k];
    y /= static_cast<double>(members.size());
  }
  return std::clamp(y, -spec.label_bound, spec.label_bound);
}

std::vector<std::size_t> checked_lambda(std::span<const std::size_t> lambda, std::size_t n) {
  std::vector<std::size_t> out(lambda.begin(), lambda.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (std::size_t i : out)
    if (i >= n) throw InvalidInput("replacement index " + std::to_string(i) + " out of range");
  return out;
}

void heat_bath_update(const IsingSpec& spec, std::vector<int>& spins, std::size_t i, Rng& rng) {
  const double p = sigmoid(2.0 * local_field(spec, spins, i));
  spins[i] = rng.uniform() < p ? 1 : -1;
}

void sweep(const IsingSpec& spec, std::vector<int>& spins, Rng& rng) {
  const std::size_t n = spins.size();
  for (std::size_t k = 0; k < n; ++k) heat_bath_update(spec, spins, rng.index(n), rng);
}

VertexSample iid_vertex(const IidLaw& law, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(law.dim);
  const double half = law.feature_bound / std::sqrt(static_cast<double>(law.dim));
  VertexSample v;
  v.x.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) v.x[k] = rng.uniform(-half, half);
  const double proj = v.x.sum() / std::sqrt(static_cast<double>(law.dim));
  const double noise = law.label_noise * law.label_bound * rng.uniform(-1.0, 1.0);
  v.y = std::clamp(law.label_bound * proj / law.feature_bound + noise, -law.label_bound,
                   law.label_bound);
  return v;
}

}  // namespace

std::vector<std::size_t> differing_vertices(const SampleSet& a, const SampleSet& b) {
  if (a.size() != b.size()) throw InvalidInput("sample sets have different sizes");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool spin_differs =
        !a.spins.empty() && !b.spins.empty() && a.spins[i] != b.spins[i];
    if (spin_differs || a.samples[i].y != b.samples[i].y || a.samples[i].x != b.samples[i].x)
      out.push_back(i);
  }
  return out;
}

void IsingSpec::validate() const {
  const auto n = field.size();
  if (coupling.rows() != n || coupling.cols() != n)
    throw InvalidInput("coupling matrix must be N x N");
  if (dim == 0) throw InvalidInput("feature dimension must be positive");
  if (!field.allFinite() || !coupling.allFinite())
    throw InvalidInput("non-finite coupling or external field");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (coupling(i, i) != 0.0) throw InvalidInput("coupling diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (coupling(i, j) != coupling(j, i)) throw InvalidInput("coupling matrix must be symmetric");
  }
  if (label_fields.size() != 0 && label_fields.size() != static_cast<std::size_t>(n))
    throw InvalidInput("label fields do not match the vertex count");
  if (!(feature_bound > 0.0) || !(label_bound > 0.0))
    throw InvalidInput("feature and label bounds must be positive");
}

IsingSpec ising_on_graph(const Graph& g, double coupling, double field, std::size_t dim,
                         double feature_bound, double label_bound) {
  const auto n = static_cast<Eigen::Index>(g.size());
  IsingSpec spec;
  spec.coupling = Eigen::MatrixXd::Zero(n, n);
  for (auto [a, b] : g.edges()) {
    spec.coupling(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = coupling;
    spec.coupling(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = coupling;
  }
  spec.field = Eigen::VectorXd::Constant(n, field);
  spec.dim = dim;
  spec.feature_bound = feature_bound;
  spec.label_bound = label_bound;
  spec.label_fields = ReceptiveFieldMap::one_hop(g);
  spec.validate();
  return spec;
}

double conditional_up_probability(const IsingSpec& spec, std::span<const int> spins,
                                  std::size_t i) {
  return sigmoid(2.0 * local_field(spec, spins, i));
}

SampleSet samples_from_spins(const IsingSpec& spec, std::vector<int> spins) {
  SampleSet z;
  z.samples.resize(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) {
    z.samples[i].x = spin_feature(spec, i, spins[i]);
    z.samples[i].y = spin_label(spec, spins, i);
  }
  z.spins = std::move(spins);
  z.sampler_id = "ising";
  return z;
}

SampleSet sample_iid(std::size_t n, const IidLaw& law, std::uint64_t seed) {
  if (law.dim == 0) throw InvalidInput("feature dimension must be at least 1");
  Rng rng(seed);
  SampleSet z;
  z.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) z.samples.push_back(iid_vertex(law, rng));
  z.sampler_id = "iid";
  z.seed = seed;
  return z;
}

SampleSet sample_iid(const Graph& g, std::size_t dim, std::uint64_t seed, const IidLaw& law) {
  IidLaw l = law;
  l.dim = dim;
  return sample_iid(g.size(), l, seed);
}

SampleSet glauber_sample(const IsingSpec& spec, std::size_t sweeps, std::uint64_t seed,
                         std::size_t burn_in) {
  spec.validate();
  if (sweeps < burn_in)
    throw InvalidInput("glauber_sample needs at least " + std::to_string(burn_in) + " sweeps");
  Rng rng(seed);
  std::vector<int> spins(spec.size());
  for (auto& s : spins) s = rng.sign();
  for (std::size_t t = 0; t < sweeps; ++t) sweep(spec, spins, rng);
  SampleSet z = samples_from_spins(spec, std::move(spins));
  z.seed = seed;
  return z;
}

std::vector<std::vector<int>> glauber_draws(const IsingSpec& spec, std::size_t count,
                                            std::size_t burn_in, std::size_t thin,
                                            std::uint64_t seed) {
  spec.validate();
  if (thin == 0) throw InvalidInput("thinning interval must be positive");
  Rng rng(seed);
  std::vector<int> spins(spec.size());
  for (auto& s : spins) s = rng.sign();
  for (std::size_t t = 0; t < burn_in; ++t) sweep(spec, spins, rng);
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t t = 0; t < thin; ++t) sweep(spec, spins, rng);
    out.push_back(spins);
  }
  return out;
}

double dobrushin_exact(const IsingSpec& spec) {
  spec.validate();
  const std::size_t n = spec.size();
  if (n > kMaxExactDobrushin)
    throw CapacityError("dobrushin_exact enumerates at most " + std::to_string(kMaxExactDobrushin) +
                        " vertices (got " + std::to_string(n) + "); use dobrushin_upper_bound");
  if (n < 2) return 0.0;
  double alpha = 0.0;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double jij = spec.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      others.clear();
      for (std::size_t k = 0; k < n; ++k)
        if (k != i && k != j) others.push_back(k);
      const std::size_t configs = std::size_t{1} << others.size();
      for (std::size_t c = 0; c < configs; ++c) {
        double s = spec.field[static_cast<Eigen::Index>(i)];
        for (std::size_t b = 0; b < others.size(); ++b) {
          const int z = (c >> b) & 1U ? 1 : -1;
          s += spec.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(others[b])) * z;
        }
        // Binary conditionals: TV is the gap between the two up-probabilities.
        const double tv = std::abs(sigmoid(2.0 * (s + jij)) - sigmoid(2.0 * (s - jij)));
        alpha = std::max(alpha, tv);
      }
    }
  }
  return alpha;
}

double dobrushin_upper_bound(const IsingSpec& spec) {
  spec.validate();
  double best = 0.0;
  for (Eigen::Index i = 0; i < spec.coupling.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < spec.coupling.cols(); ++j)
      if (j != i) row += std::tanh(std::abs(spec.coupling(i, j)));
    best = std::max(best, row);
  }
  return best;
}

std::vector<int> spins_from_index(std::size_t config, std::size_t n) {
  std::vector<int> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (config >> i) & 1U ? 1 : -1;
  return s;
}

std::vector<double> gibbs_probabilities(const IsingSpec& spec) {
  spec.validate();
  const std::size_t n = spec.size();
  if (n > 20) throw CapacityError("gibbs_probabilities enumerates at most 20 vertices");
  const std::size_t configs = std::size_t{1} << n;
  std::vector<double> energy(configs);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < configs; ++c) {
    const auto z = spins_from_index(c, n);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e += spec.field[static_cast<Eigen::Index>(i)] * z[i];
      for (std::size_t j = i + 1; j < n; ++j)
        e += spec.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[i] * z[j];
    }
    energy[c] = e;
    top = std::max(top, e);
  }
  double total = 0.0;
  for (auto& e : energy) {
    e = std::exp(e - top);
    total += e;
  }
  for (auto& e : energy) e /= total;
  return energy;
}

SampleSet IidSampler::draw(std::uint64_t seed) const { return sample_iid(n_, law_, seed); }

SampleSet IidSampler::replace(const SampleSet& z, std::span<const std::size_t> lambda,
                              ReplaceMode, std::uint64_t seed) const {
  // Product measure: the conditional law of Z_i equals its marginal.
  SampleSet out = z;
  out.perturbed = checked_lambda(lambda, z.size());
  out.unchanged_copy = out.perturbed.empty();
  Rng rng(seed);
  for (std::size_t i : out.perturbed) out.samples[i] = iid_vertex(law_, rng);
  return out;
}

std::vector<SampleSet> IidSampler::extreme_candidates() const {
  std::vector<SampleSet> out;
  const double half = law_.feature_bound / std::sqrt(static_cast<double>(law_.dim));
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0}) {
      SampleSet z;
      z.sampler_id = "iid-extreme";
      z.samples.resize(n_);
      for (auto& v : z.samples) {
        v.x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(law_.dim), sx * half);
        v.y = sy * law_.label_bound;
      }
      out.push_back(std::move(z));
    }
  return out;
}

double IidSampler::sample_diameter() const {
  return 2.0 * std::hypot(law_.feature_bound, law_.label_bound);
}

IsingSampler::IsingSampler(IsingSpec spec, std::size_t sweeps)
    : spec_(std::move(spec)), sweeps_(sweeps) {
  spec_.validate();
}

SampleSet IsingSampler::draw(std::uint64_t seed) const {
  return glauber_sample(spec_, sweeps_, seed, std::min(sweeps_, kDefaultBurnIn));
}

SampleSet IsingSampler::replace(const SampleSet& z, std::span<const std::size_t> lambda,
                                ReplaceMode mode, std::uint64_t seed) const {
  if (z.spins.size() != spec_.size()) throw InvalidInput("sample set carries no spin state");
  SampleSet out = z;
  out.perturbed = checked_lambda(lambda, z.size());
  out.unchanged_copy = out.perturbed.empty();
  if (out.perturbed.empty()) return out;
  std::vector<int> spins = z.spins;
  if (mode == ReplaceMode::fresh_conditional) {
    Rng rng(seed);
    for (std::size_t i : out.perturbed) heat_bath_update(spec_, spins, i, rng);
  } else {
    const SampleSet fresh = draw(seed);
    for (std::size_t i : out.perturbed) spins[i] = fresh.spins[i];
  }
  // Only the replaced vertices change: neighbours keep their labels.
  for (std::size_t i : out.perturbed) {
    out.samples[i].x = spin_feature(spec_, i, spins[i]);
    out.samples[i].y = spin_label(spec_, spins, i);
  }
  out.spins = std::move(spins);
  return out;
}

std::vector<SampleSet> IsingSampler::extreme_candidates() const {
  std::vector<SampleSet> out;
  for (int s : {1, -1}) out.push_back(samples_from_spins(spec_, std::vector<int>(spec_.size(), s)));
  return out;
}

double IsingSampler::label_bound() const { return std::min(spec_.label_bound, 1.0); }

double IsingSampler::sample_diameter() const {
  return 2.0 * std::hypot(spec_.feature_bound, label_bound());
}

SampleSet replace_vertices(const Sampler& sampler, const SampleSet& z,
                           std::span<const std::size_t> lambda, ReplaceMode mode,
                           std::uint64_t seed) {
  return sampler.replace(z, lambda, mode, seed);
}

void write_samples_csv(std::ostream& out, const SampleSet& z) {
  out << "vertex";
  for (std::size_t k = 0; k < z.dim(); ++k) out << ",x" << k;
  out << ",label,perturbed\n";
  out.precision(17);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < z.samples[i].x.size(); ++k) out << ',' << z.samples[i].x[k];
    const bool p = std::binary_search(z.perturbed.begin(), z.perturbed.end(), i);
    out << ',' << z.samples[i].y << ',' << (p ? 1 : 0) << '\n';
  }
}

}  // namespace mfstab
