#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfstab/graph.hpp"

namespace mfstab {

struct VertexSample {
  Eigen::VectorXd x;
  double y = 0.0;
};

/// Z = (Z_1, ..., Z_N) plus lineage. `spins` is filled by binary-spin
/// samplers and empty otherwise.
struct SampleSet {
  std::vector<VertexSample> samples;
  std::vector<int> spins;
  std::string sampler_id;
  std::uint64_t seed = 0;
  /// Lambda: vertices replaced relative to the parent set (sorted).
  std::vector<std::size_t> perturbed;
  /// Set when a replacement was requested with an empty Lambda.
  bool unchanged_copy = false;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples[0].x.size()); }
};

/// Vertices at which the two sets differ (features, label or spin).
std::vector<std::size_t> differing_vertices(const SampleSet& a, const SampleSet& b);

enum class ReplaceMode { fresh_marginal, fresh_conditional };

/// Law of the i.i.d. sampler: features uniform on the cube
/// [-B_X/sqrt(dim), B_X/sqrt(dim)]^dim, label
/// y = clamp(B_y <u, x>/B_X + noise * B_y * U(-1, 1), +-B_y) with u the
/// normalized all-ones direction.
struct IidLaw {
  std::size_t dim = 2;
  double feature_bound = 1.0;
  double label_bound = 1.0;
  double label_noise = 0.25;
};

enum class LabelRule {
  field_mean,  ///< y_i = clamp(mean spin over label_fields(i), +-B_y)
  own_spin,    ///< y_i = clamp(z_i, +-B_y); Z_i then depends on z_i only
};

/// Binary-spin Gibbs measure P(z) ~ exp(sum_{i<j} J_ij z_i z_j + sum_i h_i z_i)
/// on {-1, +1}^N, with the feature map x_i = B_X z_i e_{i mod dim}.
struct IsingSpec {
  Eigen::MatrixXd coupling;
  Eigen::VectorXd field;
  std::size_t dim = 1;
  double feature_bound = 1.0;
  double label_bound = 1.0;
  LabelRule label_rule = LabelRule::field_mean;
  /// Fields used by LabelRule::field_mean; empty means Xi(i) = {i}.
  ReceptiveFieldMap label_fields;

  std::size_t size() const { return static_cast<std::size_t>(field.size()); }
  /// Throws InvalidInput on asymmetric / non-finite couplings or bad shapes.
  void validate() const;
};

/// Uniform coupling on the edges of `g`, uniform external field, labels
/// averaged over the one-hop receptive fields.
IsingSpec ising_on_graph(const Graph& g, double coupling, double field, std::size_t dim = 1,
                         double feature_bound = 1.0, double label_bound = 1.0);

/// P(z_i = +1 | all other spins).
double conditional_up_probability(const IsingSpec& spec, std::span<const int> spins, std::size_t i);

/// Features and labels derived from a spin configuration.
SampleSet samples_from_spins(const IsingSpec& spec, std::vector<int> spins);

SampleSet sample_iid(const Graph& g, std::size_t dim, std::uint64_t seed, const IidLaw& law = {});
SampleSet sample_iid(std::size_t n, const IidLaw& law, std::uint64_t seed);

constexpr std::size_t kDefaultBurnIn = 1000;

/// Glauber (random-site heat-bath) chain run for `sweeps` sweeps of N
/// single-site updates from a uniformly random start.
SampleSet glauber_sample(const IsingSpec& spec, std::size_t sweeps, std::uint64_t seed,
                         std::size_t burn_in = kDefaultBurnIn);

/// `count` spin configurations from a single chain: `burn_in` sweeps, then
/// one configuration every `thin` sweeps.
std::vector<std::vector<int>> glauber_draws(const IsingSpec& spec, std::size_t count,
                                            std::size_t burn_in, std::size_t thin,
                                            std::uint64_t seed);

constexpr std::size_t kMaxExactDobrushin = 12;

/// Exact Dobrushin coefficient: max over ordered pairs (i, j) and all
/// conditioning configurations of the total variation between the two
/// single-site conditionals of z_i obtained by flipping z_j.
/// Throws CapacityError for N > 12.
double dobrushin_exact(const IsingSpec& spec);

/// max_i sum_{j != i} tanh|J_ij|; dominates dobrushin_exact for binary Gibbs
/// measures and is cheap for any N.
double dobrushin_upper_bound(const IsingSpec& spec);

/// Exact Gibbs probabilities of all 2^N configurations; configuration c has
/// spin i = +1 iff bit i of c is set. Throws CapacityError for N > 20.
std::vector<double> gibbs_probabilities(const IsingSpec& spec);
std::vector<int> spins_from_index(std::size_t config, std::size_t n);

/// A source of vertex samples with a replacement law for Z^Lambda.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual std::string id() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual SampleSet draw(std::uint64_t seed) const = 0;
  /// Z^Lambda: identical to z outside Lambda, resampled inside.
  virtual SampleSet replace(const SampleSet& z, std::span<const std::size_t> lambda,
                            ReplaceMode mode, std::uint64_t seed) const = 0;
  /// Deterministic extreme test sets used alongside random draws when
  /// estimating suprema.
  virtual std::vector<SampleSet> extreme_candidates() const { return {}; }
  /// B_Z: sup_{i,j} ||Z_i - Z_j|| over the sample space.
  virtual double sample_diameter() const = 0;
  virtual double feature_bound() const = 0;
  virtual double label_bound() const = 0;
};

class IidSampler final : public Sampler {
 public:
  IidSampler(std::size_t n, IidLaw law) : n_(n), law_(law) {}

  std::string id() const override { return "iid"; }
  std::size_t size() const override { return n_; }
  std::size_t dim() const override { return law_.dim; }
  SampleSet draw(std::uint64_t seed) const override;
  SampleSet replace(const SampleSet& z, std::span<const std::size_t> lambda, ReplaceMode mode,
                    std::uint64_t seed) const override;
  std::vector<SampleSet> extreme_candidates() const override;
  double sample_diameter() const override;
  double feature_bound() const override { return law_.feature_bound; }
  double label_bound() const override { return law_.label_bound; }
  const IidLaw& law() const { return law_; }

 private:
  std::size_t n_;
  IidLaw law_;
};

class IsingSampler final : public Sampler {
 public:
  explicit IsingSampler(IsingSpec spec, std::size_t sweeps = kDefaultBurnIn);

  std::string id() const override { return "ising"; }
  std::size_t size() const override { return spec_.size(); }
  std::size_t dim() const override { return spec_.dim; }
  SampleSet draw(std::uint64_t seed) const override;
  SampleSet replace(const SampleSet& z, std::span<const std::size_t> lambda, ReplaceMode mode,
                    std::uint64_t seed) const override;
  std::vector<SampleSet> extreme_candidates() const override;
  double sample_diameter() const override;
  double feature_bound() const override { return spec_.feature_bound; }
  double label_bound() const override;
  const IsingSpec& spec() const { return spec_; }

 private:
  IsingSpec spec_;
  std::size_t sweeps_;
};

SampleSet replace_vertices(const Sampler& sampler, const SampleSet& z,
                           std::span<const std::size_t> lambda, ReplaceMode mode,
                           std::uint64_t seed);

/// CSV: vertex, x0..x{d-1}, label, perturbed.
void write_samples_csv(std::ostream& out, const SampleSet& z);

}  // namespace mfstab
