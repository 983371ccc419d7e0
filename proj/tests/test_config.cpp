#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "mfstab/config.hpp"
#include "mfstab/errors.hpp"

using namespace mfstab;

namespace {
Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}
}  // namespace

TEST_CASE("typed accessors") {
  const Config c = parse(
      "# header\nseed = 17\nexperiment = gnn\nsgd.alpha = 0.25\nsgd.project = false\n"
      "gnn.densities = 0.1, 0.2,0.4\n");
  CHECK(c.seed() == 17);
  CHECK(c.get("experiment", "") == "gnn");
  CHECK(c.get_double("sgd.alpha", 0) == 0.25);
  CHECK_FALSE(c.get_bool("sgd.project", true));
  CHECK(c.get_list("gnn.densities", {}) == std::vector<double>{0.1, 0.2, 0.4});
  CHECK(c.get_size("harness.k", 5) == 5);
  CHECK_THROWS_AS(c.require("graph.kind"), InvalidInput);
}

TEST_CASE("schema violations are rejected") {
  CHECK_THROWS_AS(parse("experiment = gnn\n"), InvalidInput);
  CHECK_THROWS_AS(parse("seed = 1\nnot.a.key = 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse("seed = 1\nseed = 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse("seed = 1\njust text\n"), InvalidInput);
  const Config c = parse("seed = 1\nsgd.alpha = fast\nharness.k = -3\nsgd.project = maybe\n");
  CHECK_THROWS_AS(c.get_double("sgd.alpha", 0), InvalidInput);
  CHECK_THROWS_AS(c.get_size("harness.k", 0), InvalidInput);
  CHECK_THROWS_AS(c.get_bool("sgd.project", true), InvalidInput);
}

TEST_CASE("hash ignores order comments and spacing") {
  const Config a = parse("seed = 3\nsgd.alpha=0.5\n");
  const Config b = parse("# x\nsgd.alpha = 0.5   \n\nseed=3\n");
  const Config c = parse("seed = 4\nsgd.alpha=0.5\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.canonical() == "seed=3\nsgd.alpha=0.5\n");
}

TEST_CASE("loose parsing skips the schema") {
  std::istringstream in("objective.lambda = 2\n");
  const Config c = Config::parse_loose(in);
  CHECK(c.get_double("objective.lambda", 0) == 2.0);
}

TEST_CASE("every documented key is known") {
  const auto& keys = known_config_keys();
  for (const char* k : {"seed", "experiment", "graph.kind", "sampler.coupling", "objective.kind", "sgd.alpha",
                        "harness.k", "bounds.delta", "gnn.densities", "srm.lambda", "concentration.grid"})
    CHECK(std::find(keys.begin(), keys.end(), std::string(k)) != keys.end());
}
