#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfstab {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph with a dense boolean adjacency matrix.
/// Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on `n` vertices. Duplicate pairs (in either orientation)
  /// are merged; out-of-range indices and self loops are rejected.
  static Graph build(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const { return n_; }
  bool adjacent(std::size_t i, std::size_t j) const { return adjacency_[i * n_ + j] != 0; }
  std::size_t degree(std::size_t i) const;
  std::vector<std::size_t> neighbors(std::size_t i) const;

  /// Canonical edge list: each undirected edge once as (min, max), sorted.
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<Edge> edges_;
};

Graph build_graph(std::size_t n, std::span<const Edge> edges);

Graph empty_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph star_graph(std::size_t n);
Graph complete_graph(std::size_t n);
/// G(n, p) with each pair included independently with probability p.
Graph erdos_renyi_graph(std::size_t n, double p, std::uint64_t seed);

/// Reads the edge-list text format: one "i j" pair per line, 0-indexed,
/// blank lines and '#' comments ignored. When `n` is 0 the vertex count is
/// one more than the largest index seen.
Graph read_edge_list(std::istream& in, std::size_t n = 0);
Graph read_edge_list_file(const std::string& path, std::size_t n = 0);
void write_edge_list(std::ostream& out, const Graph& g);

/// Receptive fields Xi(i) with the cardinalities and normalized sparsities
/// derived from them. Every field contains its own vertex and membership is
/// symmetric.
class ReceptiveFieldMap {
 public:
  ReceptiveFieldMap() = default;

  /// Xi(i) = {i} union neighbors(i).
  static ReceptiveFieldMap one_hop(const Graph& g);

  /// Explicit fields; validated for range, self-inclusion and symmetry.
  static ReceptiveFieldMap from_sets(std::vector<std::vector<std::size_t>> fields);

  std::size_t size() const { return fields_.size(); }
  std::span<const std::size_t> field(std::size_t i) const { return fields_[i]; }
  bool contains(std::size_t i, std::size_t j) const { return member_[i * size() + j] != 0; }
  std::size_t cardinality(std::size_t i) const { return fields_[i].size(); }

  /// d_i = N_i / N.
  double sparsity(std::size_t i) const;
  /// Sum over vertices of d_i.
  double average_sparsity() const;
  double max_sparsity() const;
  double min_sparsity() const;

  /// Restriction to members within index distance < radius of the centre
  /// vertex. Stays symmetric and self-inclusive; nested in the radius.
  ReceptiveFieldMap truncated(std::size_t radius) const;

 private:
  explicit ReceptiveFieldMap(std::vector<std::vector<std::size_t>> fields);

  std::vector<std::vector<std::size_t>> fields_;
  std::vector<std::uint8_t> member_;
};

ReceptiveFieldMap one_hop_receptive_fields(const Graph& g);

struct SparsityStats {
  std::vector<double> d;
  double d_bar = 0.0;
  double sup_d = 0.0;
  double inf_d = 0.0;
};

SparsityStats sparsity_stats(const ReceptiveFieldMap& rf);

}  // namespace mfstab
