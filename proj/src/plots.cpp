#include "mfstab/plots.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mfstab/errors.hpp"

namespace mfstab {

namespace {

namespace fs = std::filesystem;

struct Table {
  std::string hash_line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw InvalidInput("missing column '" + name + "'");
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.hash_line = line;
      continue;
    }
    if (t.header.empty())
      t.header = split(line);
    else
      t.rows.push_back(split(line));
  }
  return t;
}

double num(const std::string& s) { return std::stod(s); }

std::ofstream open_out(const fs::path& path, const Table& src) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  if (!src.hash_line.empty()) out << src.hash_line << '\n';
  out.precision(17);
  return out;
}

std::string scaling(const fs::path& dir) {
  const Table t = read_csv(dir / "gnn.csv");
  const auto cn = t.column("N"), cs = t.column("sup_d"), c1 = t.column("beta1"), c2 = t.column("beta2"),
             ck = t.column("kind"), cd = t.column("density");
  auto out = open_out(dir / "plot_scaling.csv", t);
  out << "kind,N,density,sup_d,log_sup_d,beta1,beta2,log_beta1,log_beta2\n";
  for (const auto& r : t.rows) {
    const double s = num(r[cs]), b1 = num(r[c1]), b2 = num(r[c2]);
    out << r[ck] << ',' << r[cn] << ',' << r[cd] << ',' << s << ',' << std::log(s) << ',' << b1 << ',' << b2
        << ',' << std::log(b1) << ',' << std::log(b2) << '\n';
  }
  return "plot_scaling.csv";
}

std::string envelope(const fs::path& dir) {
  const Table t = read_csv(dir / "trace.csv");
  const auto ct = t.column("t"), cd = t.column("delta_norm"), ce = t.column("expected_envelope");
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  std::map<std::size_t, double> env;
  for (const auto& r : t.rows) {
    const auto step = static_cast<std::size_t>(num(r[ct]));
    auto& a = acc[step];
    a.first += num(r[cd]);
    ++a.second;
    env[step] = num(r[ce]);
  }
  auto out = open_out(dir / "plot_envelope.csv", t);
  out << "t,mean_delta,expected_envelope,runs\n";
  for (const auto& [step, a] : acc)
    out << step << ',' << a.first / static_cast<double>(a.second) << ',' << env[step] << ',' << a.second << '\n';
  return "plot_envelope.csv";
}

std::string tail(const fs::path& dir) {
  const Table t = read_csv(dir / "tail.csv");
  const auto ct = t.column("t"), ce = t.column("empirical"), cb = t.column("bound");
  auto out = open_out(dir / "plot_tail.csv", t);
  out << "t,empirical,bound,log_empirical,log_bound\n";
  for (const auto& r : t.rows) {
    const double e = num(r[ce]), b = num(r[cb]);
    out << r[ct] << ',' << e << ',' << b << ',' << (e > 0 ? std::log(e) : -INFINITY) << ',' << std::log(b) << '\n';
  }
  return "plot_tail.csv";
}

std::string discrepancy(const fs::path& dir) {
  const Table t = read_csv(dir / "gnn.csv");
  const auto cn = t.column("N"), ck = t.column("kind"), cd = t.column("discrepancy"), ci = t.column("inf_d");
  auto out = open_out(dir / "plot_discrepancy.csv", t);
  out << "kind,N,discrepancy,normalized\n";
  for (const auto& r : t.rows) {
    const double disc = num(r[cd]);
    const double norm = r[ck] == "label" ? num(r[cn]) * disc : disc / num(r[ci]);
    out << r[ck] << ',' << r[cn] << ',' << disc << ',' << norm << '\n';
  }
  return "plot_discrepancy.csv";
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::string& dir, const std::string& kind) {
  const fs::path d(dir);
  if (kind == "scaling") return {scaling(d)};
  if (kind == "envelope") return {envelope(d)};
  if (kind == "tail") return {tail(d)};
  if (kind == "discrepancy") return {discrepancy(d)};
  if (kind == "all") {
    std::vector<std::string> out;
    if (fs::exists(d / "gnn.csv")) {
      out.push_back(scaling(d));
      out.push_back(discrepancy(d));
    }
    if (fs::exists(d / "trace.csv")) out.push_back(envelope(d));
    if (fs::exists(d / "tail.csv")) out.push_back(tail(d));
    return out;
  }
  throw InvalidInput("unknown plot kind '" + kind + "'");
}

}  // namespace mfstab
