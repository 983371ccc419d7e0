#include "mfstab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

Graph Graph::build(std::size_t n, std::span<const Edge> edges) {
  Graph g;
  g.n_ = n;
  g.adjacency_.assign(n * n, 0);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InvalidInput("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                         ") out of range for " + std::to_string(n) + " vertices");
    }
    if (a == b) throw InvalidInput("self loop at vertex " + std::to_string(a));
    g.adjacency_[a * n + b] = 1;
    g.adjacency_[b * n + a] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.adjacency_[i * n + j]) g.edges_.emplace_back(i, j);
  return g;
}

std::size_t Graph::degree(std::size_t i) const {
  return static_cast<std::size_t>(
      std::count(adjacency_.begin() + i * n_, adjacency_.begin() + (i + 1) * n_, 1));
}

std::vector<std::size_t> Graph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (adjacent(i, j)) out.push_back(j);
  return out;
}

Graph build_graph(std::size_t n, std::span<const Edge> edges) { return Graph::build(n, edges); }

Graph empty_graph(std::size_t n) { return Graph::build(n, {}); }

Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::build(n, e);
}

Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  if (n > 2) e.emplace_back(n - 1, 0);
  return Graph::build(n, e);
}

Graph star_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph::build(n, e);
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::build(n, e);
}

Graph erdos_renyi_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) e.emplace_back(i, j);
  return Graph::build(n, e);
}

Graph read_edge_list(std::istream& in, std::size_t n) {
  std::vector<Edge> edges;
  std::size_t max_index = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long a = 0, b = 0;
    if (!(ls >> a)) continue;  // blank
    std::string rest;
    if (!(ls >> b) || (ls >> rest) || a < 0 || b < 0) {
      throw InvalidInput("edge list line " + std::to_string(line_no) + ": expected \"i j\"");
    }
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    max_index = std::max({max_index, edges.back().first, edges.back().second});
    any = true;
  }
  if (n == 0) n = any ? max_index + 1 : 0;
  return Graph::build(n, edges);
}

Graph read_edge_list_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open edge list: " + path);
  return read_edge_list(in, n);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

ReceptiveFieldMap::ReceptiveFieldMap(std::vector<std::vector<std::size_t>> fields)
    : fields_(std::move(fields)) {
  const std::size_t n = fields_.size();
  member_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& f = fields_[i];
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    for (std::size_t j : f) {
      if (j >= n) throw InvalidInput("receptive field member out of range");
      member_[i * n + j] = 1;
    }
  }
}

ReceptiveFieldMap ReceptiveFieldMap::one_hop(const Graph& g) {
  std::vector<std::vector<std::size_t>> fields(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    fields[i] = g.neighbors(i);
    fields[i].push_back(i);
  }
  return ReceptiveFieldMap(std::move(fields));
}

ReceptiveFieldMap ReceptiveFieldMap::from_sets(std::vector<std::vector<std::size_t>> fields) {
  ReceptiveFieldMap rf(std::move(fields));
  const std::size_t n = rf.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!rf.contains(i, i))
      throw InvalidInput("receptive field of vertex " + std::to_string(i) + " must contain itself");
    for (std::size_t j : rf.field(i))
      if (!rf.contains(j, i))
        throw InvalidInput("receptive fields not symmetric: " + std::to_string(j) + " in Xi(" +
                           std::to_string(i) + ") but not the converse");
  }
  return rf;
}

double ReceptiveFieldMap::sparsity(std::size_t i) const {
  return static_cast<double>(cardinality(i)) / static_cast<double>(size());
}

double ReceptiveFieldMap::average_sparsity() const {
  std::size_t total = 0;
  for (const auto& f : fields_) total += f.size();
  return size() == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(size());
}

double ReceptiveFieldMap::max_sparsity() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, sparsity(i));
  return m;
}

double ReceptiveFieldMap::min_sparsity() const {
  if (size() == 0) return 0.0;
  double m = 1.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::min(m, sparsity(i));
  return m;
}

ReceptiveFieldMap ReceptiveFieldMap::truncated(std::size_t radius) const {
  std::vector<std::vector<std::size_t>> out(size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j : fields_[i]) {
      const std::size_t dist = i > j ? i - j : j - i;
      if (dist < radius || j == i) out[i].push_back(j);
    }
  return ReceptiveFieldMap(std::move(out));
}

ReceptiveFieldMap one_hop_receptive_fields(const Graph& g) { return ReceptiveFieldMap::one_hop(g); }

SparsityStats sparsity_stats(const ReceptiveFieldMap& rf) {
  SparsityStats s;
  s.d.resize(rf.size());
  for (std::size_t i = 0; i < rf.size(); ++i) s.d[i] = rf.sparsity(i);
  s.d_bar = rf.average_sparsity();
  s.sup_d = rf.max_sparsity();
  s.inf_d = rf.min_sparsity();
  return s;
}

}  // namespace mfstab
