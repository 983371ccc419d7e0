#include "mfstab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mfstab/errors.hpp"
#include "mfstab/gnn.hpp"
#include "mfstab/harness.hpp"
#include "mfstab/rng.hpp"
#include "mfstab/srm.hpp"

namespace mfstab {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class ResultWriter {
 public:
  ResultWriter(const Config& cfg, std::string dir, RunResult& res)
      : hash_(cfg.hash()), dir_(std::move(dir)), res_(res) {}

  std::ofstream open(const std::string& name) {
    std::ofstream out(fs::path(dir_) / name);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << "# config_hash=" << hash_ << '\n';
    out.precision(17);
    res_.files.push_back(name);
    return out;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream out(fs::path(dir_) / name);
    if (!out) throw std::runtime_error("cannot write " + name);
    json copy = j;
    copy["config_hash"] = hash_;
    out << copy.dump(2) << '\n';
    res_.files.push_back(name);
  }

 private:
  std::string hash_;
  std::string dir_;
  RunResult& res_;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json("not-applicable"); }

std::string optional_csv(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s.precision(17);
  s << *v;
  return s.str();
}

HarnessOptions harness_from_config(const Config& cfg, std::size_t workers) {
  HarnessOptions opt;
  opt.k = cfg.get_size("harness.k", 8);
  opt.k_test = cfg.get_size("harness.k_test", 8);
  opt.mode = replace_mode_from_config(cfg);
  opt.workers = workers;
  return opt;
}

Regime regime_of(const Objective& obj) {
  return obj.family() == ObjectiveFamily::quadratic ? Regime::strongly_convex : Regime::non_convex;
}

GnnExperimentOptions gnn_options(const Config& cfg) {
  GnnExperimentOptions opt;
  opt.law.feature_dim = cfg.get_size("gnn.feature_dim", 3);
  opt.law.feature_bound = cfg.get_double("sampler.feature_bound", 1.0);
  opt.law.label_bound = cfg.get_double("sampler.label_bound", 1.0);
  opt.law.weight_norm = cfg.get_double("gnn.weight_norm", 1.0);
  opt.law.gamma_reg = cfg.get_double("gnn.gamma_reg", 1.0);
  opt.test_draws = cfg.get_size("gnn.test_draws", 256);
  opt.epsilon_feature = cfg.get_double("gnn.epsilon", 1e-3);
  const std::string method = cfg.get("gnn.method", "masked");
  if (method == "masked")
    opt.method = GnnMethod::masked_closed_form;
  else if (method == "rowwise")
    opt.method = GnnMethod::exact_rowwise;
  else
    throw InvalidInput("gnn.method must be masked or rowwise");
  return opt;
}

GnnPerturbation gnn_kind(const Config& cfg) {
  const std::string k = cfg.get("gnn.kind", "label");
  if (k == "label") return GnnPerturbation::label;
  if (k == "feature") return GnnPerturbation::feature;
  throw InvalidInput("gnn.kind must be label or feature");
}

void run_sample(const Config& cfg, ResultWriter& w) {
  const Graph g = graph_from_config(cfg);
  const auto sampler = sampler_from_config(cfg, g);
  const SampleSet z = sampler->draw(derive_seed(cfg.seed(), "sampler/draw"));
  auto out = w.open("samples.csv");
  write_samples_csv(out, z);
  json summary = {{"sampler", sampler->id()}, {"n", g.size()}, {"sample_diameter", sampler->sample_diameter()}};
  if (auto* ising = dynamic_cast<const IsingSampler*>(sampler.get())) {
    summary["dobrushin_upper_bound"] = dobrushin_upper_bound(ising->spec());
    if (g.size() <= kMaxExactDobrushin) summary["dobrushin_exact"] = dobrushin_exact(ising->spec());
  } else {
    summary["dobrushin_exact"] = 0.0;
  }
  w.write_json("summary.json", summary);
}

void run_train(const Config& cfg, ResultWriter& w) {
  const Graph g = graph_from_config(cfg);
  const auto rf = ReceptiveFieldMap::one_hop(g);
  const auto sampler = sampler_from_config(cfg, g);
  const Objective obj = objective_from_config(cfg, sampler->dim());
  SgdConfig sgd = sgd_from_config(cfg);
  const std::size_t vertex = cfg.get_size("harness.vertex", 0);
  if (vertex >= g.size()) throw InvalidInput("harness.vertex out of range");
  const std::size_t runs = cfg.get_size("harness.trials", 1);
  const auto params = bound_params(obj.constants(), sgd.alpha, sgd.steps, rf, regime_of(obj));
  const auto rc = recursion_constants(params, vertex);
  const ReplaceMode mode = replace_mode_from_config(cfg);
  auto out = w.open("trace.csv");
  out << "run,t,n_t,w_norm,delta_norm,case,step_envelope,expected_envelope\n";
  std::size_t violations = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const SampleSet z = sampler->draw(derive_seed(cfg.seed(), "sampler/train", {r}));
    const std::size_t lambda[] = {vertex};
    const SampleSet zi = sampler->replace(z, lambda, mode, derive_seed(cfg.seed(), "sampler/replace", {r}));
    sgd.seed = derive_seed(cfg.seed(), "sgd/index", {r});
    const CoupledTrace tr = coupled_train(z, zi, vertex, rf, obj, sgd);
    for (std::size_t t = 0; t < tr.delta_norms.size(); ++t) {
      out << r << ',' << t << ',';
      if (t > 0) out << tr.base.indices[t - 1];
      out << ',' << tr.base.weights[t].norm() << ',' << tr.delta_norms[t] << ',';
      if (t > 0) {
        const double env = step_envelope(obj.constants(), sgd.alpha, tr.cases[t - 1], tr.delta_norms[t - 1]);
        if (tr.delta_norms[t] > env + 1e-9) ++violations;
        out << step_case_name(tr.cases[t - 1]) << ',' << env;
      } else {
        out << ',';
      }
      out << ',' << rc.py * geometric_series(rc.pz, t) << '\n';
    }
  }
  w.write_json("summary.json", {{"runs", runs},
                                {"vertex", vertex},
                                {"objective", obj.name()},
                                {"step_condition", step_condition_value(sgd.alpha, obj.constants().lambda, obj.constants().gamma)},
                                {"envelope_violations", violations}});
}

void run_stability(const Config& cfg, ResultWriter& w, std::size_t workers) {
  const Graph g = graph_from_config(cfg);
  const auto rf = ReceptiveFieldMap::one_hop(g);
  const auto sampler = sampler_from_config(cfg, g);
  const Objective obj = objective_from_config(cfg, sampler->dim());
  SgdConfig sgd = sgd_from_config(cfg);
  sgd.seed = derive_seed(cfg.seed(), "sgd/index");
  const SgdLearner alg(obj, rf, sgd);
  const auto opt = harness_from_config(cfg, workers);
  StabilityEstimate est = estimate_stability(alg, *sampler, rf, opt, derive_seed(cfg.seed(), "harness/"));
  if (cfg.has("harness.m"))
    est.mu = estimate_mu(alg, *sampler, cfg.get_size("harness.m", 1), opt, derive_seed(cfg.seed(), "harness/"));
  auto out = w.open("stability.csv");
  write_stability_csv(out, est);
  json summary = {{"algorithm", est.algorithm}, {"beta1", est.beta1}, {"beta2", est.beta2},
                  {"discrepancy", est.discrepancy}, {"K", est.k}, {"K_test", est.k_test},
                  {"loss_bound", alg.loss_bound()}};
  summary["mu"] = est.mu >= 0.0 ? json(est.mu) : json(nullptr);
  w.write_json("summary.json", summary);
}

void run_gnn(const Config& cfg, ResultWriter& w) {
  const auto opt = gnn_options(cfg);
  const auto kind = gnn_kind(cfg);
  const std::size_t trials = cfg.get_size("harness.trials", 4);
  auto out = w.open("gnn.csv");
  out << "N,sup_d,inf_d,kind,beta1,beta2,discrepancy,trials,seed,density,replicate,gap_inf,gap_sup\n";
  auto emit = [&](const GnnStabilityResult& r, double density, std::size_t rep) {
    out << r.n << ',' << r.sup_d << ',' << r.inf_d << ',' << (kind == GnnPerturbation::label ? "label" : "feature")
        << ',' << r.beta1 << ',' << r.beta2 << ',' << r.discrepancy << ',' << r.trials << ',' << r.seed << ','
        << density << ',' << rep << ',' << r.gap_inf << ',' << r.gap_sup << '\n';
  };
  const std::size_t reps = cfg.get_size("gnn.replicates", 1);
  const auto densities = cfg.get_list("gnn.densities", {});
  const auto sizes = cfg.get_list("gnn.sizes", {});
  if (!densities.empty()) {
    const std::size_t n = cfg.get_size("graph.n", 64);
    for (std::size_t di = 0; di < densities.size(); ++di)
      for (std::size_t r = 0; r < reps; ++r) {
        const Graph g = erdos_renyi_graph(n, densities[di], derive_seed(cfg.seed(), "gnn/graph", {di, r}));
        emit(gnn_stability_experiment(g, kind, trials, opt, derive_seed(cfg.seed(), "gnn/run", {di, r})),
             densities[di], r);
      }
  } else if (!sizes.empty()) {
    for (std::size_t si = 0; si < sizes.size(); ++si)
      for (std::size_t r = 0; r < reps; ++r) {
        const Graph g = cycle_graph(static_cast<std::size_t>(sizes[si]));
        emit(gnn_stability_experiment(g, kind, trials, opt, derive_seed(cfg.seed(), "gnn/run", {si, r})), 0.0, r);
      }
  } else {
    const Graph g = graph_from_config(cfg);
    for (std::size_t r = 0; r < reps; ++r)
      emit(gnn_stability_experiment(g, kind, trials, opt, derive_seed(cfg.seed(), "gnn/run", {r})), 0.0, r);
  }
}

void run_bounds(const Config& cfg, ResultWriter& w) {
  const auto p = bound_params_from_config(cfg);
  const double delta = cfg.get_double("bounds.delta", 0.1);
  const auto report = evaluate_bounds(p, delta);
  auto out = w.open("bounds.csv");
  out << "i,N_i,pz,py,expected_beta2_i,printed_variance_i,recursion_variance_i\n";
  for (std::size_t i = 0; i < p.n; ++i)
    out << i << ',' << p.field_sizes[i] << ',' << report.pz_i[i] << ',' << report.py_i[i] << ','
        << optional_csv(report.expected_beta2_i[i]) << ',' << optional_csv(report.variance.printed_i[i]) << ','
        << report.variance.recursion_i[i] << '\n';
  w.write_json("bounds.json", json::parse(bound_report_json(p, report)));
}

void run_compare(const Config& cfg, ResultWriter& w, std::size_t workers) {
  const Graph g = graph_from_config(cfg);
  const auto rf = ReceptiveFieldMap::one_hop(g);
  const auto sampler = sampler_from_config(cfg, g);
  const Objective obj = objective_from_config(cfg, sampler->dim());
  SgdConfig sgd = sgd_from_config(cfg);
  const auto opt = harness_from_config(cfg, workers);
  const double delta = cfg.get_double("bounds.delta", 0.1);
  const auto params = bound_params(obj.constants(), sgd.alpha, sgd.steps, rf, regime_of(obj));
  const auto expected = expected_stability_bound(params);
  const auto highprob = highprob_stability_bound(params, delta);
  auto out = w.open("compare.csv");
  out << "replicate,beta2_empirical,expected_bound,highprob_bound,dominated\n";
  const std::size_t reps = cfg.get_size("harness.trials", 4);
  for (std::size_t r = 0; r < reps; ++r) {
    sgd.seed = derive_seed(cfg.seed(), "sgd/index", {r});
    const SgdLearner alg(obj, rf, sgd);
    const auto est = estimate_stability(alg, *sampler, rf, opt, derive_seed(cfg.seed(), "harness/", {r}));
    out << r << ',' << est.beta2 << ',' << optional_csv(expected) << ',' << optional_csv(highprob) << ','
        << (highprob ? (est.beta2 <= *highprob ? "1" : "0") : "NA") << '\n';
  }
}

void run_srm(const Config& cfg, ResultWriter& w, std::size_t workers) {
  const Graph g = graph_from_config(cfg);
  const auto rf = ReceptiveFieldMap::one_hop(g);
  const auto sampler = sampler_from_config(cfg, g);
  const std::size_t d_max = cfg.get_size("srm.d_max", 3);
  const double gamma_reg = cfg.get_double("gnn.gamma_reg", 1.0);
  const Eigen::VectorXd wv = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sampler->dim()),
                                                        cfg.get_double("gnn.weight_norm", 1.0) /
                                                            std::sqrt(static_cast<double>(sampler->dim())));
  auto family = DegreeClassFamily::truncations(rf, d_max);
  const auto opt = harness_from_config(cfg, workers);
  double loss_bound = 0.0;
  for (auto& cls : family.classes) {
    const GnnLearner alg(cls.fields, wv, gamma_reg, GnnMethod::exact_rowwise, sampler->feature_bound(),
                         sampler->label_bound());
    const auto est = estimate_stability(alg, *sampler, cls.fields, opt, derive_seed(cfg.seed(), "harness/srm", {cls.d}));
    cls.beta1 = est.beta1;
    cls.beta2 = est.beta2;
    loss_bound = std::max(loss_bound, alg.loss_bound());
  }
  const auto trainer = gnn_class_trainer(wv, gamma_reg);
  const SampleSet z = sampler->draw(derive_seed(cfg.seed(), "sampler/srm"));
  const auto lambdas = cfg.get_list("srm.lambda", {0.0, 0.1, 1.0, 10.0});
  const std::size_t test_graphs = cfg.get_size("harness.test_graphs", 16);
  auto out = w.open("srm.csv");
  out << "lambda,d,class_risk,penalty,penalized_risk,selected\n";
  json reports = json::array();
  for (double lam : lambdas) {
    const auto sel = select_sparse(family, z, lam, trainer);
    for (const auto& row : sel.rows)
      out << lam << ',' << row.d << ',' << row.risk << ',' << row.penalty << ',' << row.penalized << ','
          << (row.selected ? 1 : 0) << '\n';
    std::vector<double> risks;
    for (std::size_t c = 0; c < family.classes.size(); ++c) {
      const GnnLearner alg(family.classes[c].fields, wv, gamma_reg, GnnMethod::exact_rowwise,
                           sampler->feature_bound(), sampler->label_bound());
      double r = 0.0;
      for (std::size_t t = 0; t < test_graphs; ++t) {
        const auto l = alg.vertex_losses(sel.class_params[c], sampler->draw(derive_seed(cfg.seed(), "sampler/srm-test", {t})));
        for (double x : l) r += x / static_cast<double>(l.size());
      }
      risks.push_back(r / static_cast<double>(test_graphs));
    }
    double beta2 = 0.0;
    for (const auto& c : family.classes) beta2 = std::max(beta2, c.beta2);
    const double eps = std::max(cfg.get_double("srm.epsilon", 1.0), srm_epsilon_floor(beta2, lam, d_max));
    const auto rep = srm_report(family, sel, risks, lam, loss_bound, g.size(), eps);
    reports.push_back({{"lambda", lam}, {"d", rep.d}, {"epsilon", rep.epsilon}, {"epsilon_floor", rep.epsilon_floor},
                       {"failure_probability", rep.failure_probability}, {"lhs", rep.lhs}, {"rhs", rep.rhs},
                       {"holds", rep.holds}});
  }
  w.write_json("srm_report.json", {{"reports", reports}});
}

void run_concentration(const Config& cfg, ResultWriter& w) {
  const Graph g = graph_from_config(cfg);
  const IsingSpec spec = ising_from_config(cfg, g);
  const double alpha = dobrushin_exact(spec);
  const std::size_t n = spec.size();
  // Phi(z) = sum z_i / 2 changes by at most 1 per coordinate.
  double mean = 0.0;
  const auto probs = gibbs_probabilities(spec);
  for (std::size_t c = 0; c < probs.size(); ++c) {
    double phi = 0.0;
    for (int s : spins_from_index(c, n)) phi += 0.5 * s;
    mean += probs[c] * phi;
  }
  const std::size_t count = cfg.get_size("concentration.draws", 100000);
  const auto draws = glauber_draws(spec, count, kDefaultBurnIn, cfg.get_size("concentration.thin", 2),
                                   derive_seed(cfg.seed(), "sampler/concentration"));
  std::vector<double> dev;
  dev.reserve(draws.size());
  for (const auto& z : draws) {
    double phi = 0.0;
    for (int s : z) phi += 0.5 * s;
    dev.push_back(phi - mean);
  }
  const std::vector<double> c(n, 1.0);
  auto out = w.open("tail.csv");
  out << "t,empirical,bound,draws,alpha\n";
  for (double t : cfg.get_list("concentration.grid", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})) {
    const auto hits = std::count_if(dev.begin(), dev.end(), [t](double d) { return d >= t; });
    out << t << ',' << static_cast<double>(hits) / static_cast<double>(dev.size()) << ','
        << concentration_tail(c, alpha, t).probability << ',' << dev.size() << ',' << alpha << '\n';
  }
}

}  // namespace

Graph graph_from_config(const Config& cfg) {
  const std::string kind = cfg.get("graph.kind", "cycle");
  const std::size_t n = cfg.get_size("graph.n", 16);
  if (kind == "file") return read_edge_list_file(cfg.resolve_path(cfg.require("graph.path")), cfg.get_size("graph.n", 0));
  if (kind == "cycle") return cycle_graph(n);
  if (kind == "path") return path_graph(n);
  if (kind == "star") return star_graph(n);
  if (kind == "complete") return complete_graph(n);
  if (kind == "empty") return empty_graph(n);
  if (kind == "erdos_renyi")
    return erdos_renyi_graph(n, cfg.get_double("graph.p", 0.1), derive_seed(cfg.seed(), "sampler/graph"));
  throw InvalidInput("unknown graph.kind '" + kind + "'");
}

IsingSpec ising_from_config(const Config& cfg, const Graph& g) {
  IsingSpec spec = ising_on_graph(g, cfg.get_double("sampler.coupling", 0.2), cfg.get_double("sampler.field", 0.0),
                                  cfg.get_size("sampler.dim", 1), cfg.get_double("sampler.feature_bound", 1.0),
                                  cfg.get_double("sampler.label_bound", 1.0));
  const std::string rule = cfg.get("sampler.label_rule", "field_mean");
  if (rule == "own_spin")
    spec.label_rule = LabelRule::own_spin;
  else if (rule != "field_mean")
    throw InvalidInput("sampler.label_rule must be field_mean or own_spin");
  return spec;
}

std::unique_ptr<Sampler> sampler_from_config(const Config& cfg, const Graph& g) {
  const std::string kind = cfg.get("sampler.kind", "iid");
  if (kind == "iid") {
    IidLaw law;
    law.dim = cfg.get_size("sampler.dim", 2);
    law.feature_bound = cfg.get_double("sampler.feature_bound", 1.0);
    law.label_bound = cfg.get_double("sampler.label_bound", 1.0);
    law.label_noise = cfg.get_double("sampler.noise", 0.25);
    if (law.dim == 0) throw InvalidInput("sampler.dim must be at least 1");
    return std::make_unique<IidSampler>(g.size(), law);
  }
  if (kind == "ising")
    return std::make_unique<IsingSampler>(ising_from_config(cfg, g), cfg.get_size("sampler.sweeps", kDefaultBurnIn));
  throw InvalidInput("unknown sampler.kind '" + kind + "'");
}

ReplaceMode replace_mode_from_config(const Config& cfg) {
  const std::string m = cfg.get("sampler.replace", "conditional");
  if (m == "conditional") return ReplaceMode::fresh_conditional;
  if (m == "marginal") return ReplaceMode::fresh_marginal;
  throw InvalidInput("sampler.replace must be conditional or marginal");
}

Objective objective_from_config(const Config& cfg, std::size_t dim) {
  const std::string kind = cfg.get("objective.kind", "quadratic");
  const double bx = cfg.get_double("sampler.feature_bound", 1.0);
  const double by = cfg.get_double("sampler.label_bound", 1.0);
  const double lambda = cfg.get_double("objective.lambda", 1.0);
  if (kind == "quadratic")
    return make_strongly_convex_objective(dim, lambda, cfg.get_double("objective.gamma", 0.5), bx, by,
                                          cfg.get_double("objective.radius", 2.0));
  if (kind == "ripple")
    return make_nonconvex_objective(dim, lambda, bx, by, cfg.get_double("objective.amplitude", 0.5),
                                    cfg.get_double("objective.radius", 4.0));
  throw InvalidInput("unknown objective.kind '" + kind + "'");
}

SgdConfig sgd_from_config(const Config& cfg) {
  SgdConfig s;
  s.alpha = cfg.get_double("sgd.alpha", 0.5);
  s.steps = cfg.get_size("sgd.steps", 200);
  s.project = cfg.get_bool("sgd.project", true);
  s.seed = derive_seed(cfg.seed(), "sgd/index");
  if (!(s.alpha > 0.0)) throw InvalidInput("sgd.alpha must be positive");
  return s;
}

SgdBoundParams bound_params_from_config(const Config& cfg) {
  const Graph g = graph_from_config(cfg);
  const std::string kind = cfg.get("sampler.kind", "iid");
  const std::size_t dim = kind == "ising" ? cfg.get_size("sampler.dim", 1) : cfg.get_size("sampler.dim", 2);
  const Objective obj = objective_from_config(cfg, dim);
  const SgdConfig sgd = sgd_from_config(cfg);
  ConstantsCertificate k = obj.constants();
  if (kind == "ising")
    k.sample_diameter = 2.0 * std::hypot(cfg.get_double("sampler.feature_bound", 1.0),
                                         std::min(cfg.get_double("sampler.label_bound", 1.0), 1.0));
  return bound_params(k, sgd.alpha, sgd.steps, ReceptiveFieldMap::one_hop(g),
                      obj.family() == ObjectiveFamily::quadratic ? Regime::strongly_convex : Regime::non_convex);
}

std::string bound_report_json(const SgdBoundParams& p, const BoundReport& r) {
  const auto& k = p.constants;
  json j;
  j["inputs"] = {{"regime", regime_name(p.regime)}, {"lambda", k.lambda}, {"gamma", k.gamma},
                 {"lipschitz", k.lipschitz}, {"zeta", k.zeta}, {"sample_diameter", k.sample_diameter},
                 {"loss_bound", k.loss_bound}, {"radius", k.radius}, {"alpha_step", p.alpha_step},
                 {"steps", p.steps}, {"n", p.n}, {"field_sizes", p.field_sizes}, {"delta", r.delta}};
  json conds = json::array();
  for (const auto& c : r.conditions)
    conds.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}, {"gating", c.gating}});
  j["conditions"] = conds;
  j["pz_i"] = r.pz_i;
  j["py_i"] = r.py_i;
  if (p.regime == Regime::non_convex) {
    j["pm"] = r.pm;
    j["divergent_in_T"] = r.divergent;
  }
  json exp_i = json::array();
  for (const auto& e : r.expected_beta2_i) exp_i.push_back(optional_json(e));
  j["expected_beta2_i"] = exp_i;
  j["expected_beta2"] = optional_json(r.expected_beta2);
  j["variance_recursion_sum"] = r.variance.recursion_sum;
  j["variance_printed_sum"] = optional_json(r.variance.printed_sum);
  j["highprob_beta2"] = optional_json(r.highprob_beta2);
  j["generalization_surplus"] = optional_json(r.generalization);
  return j.dump(2);
}

RunResult run_experiment(const Config& cfg, const std::string& out_dir, std::size_t workers) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  res.experiment = cfg.require("experiment");
  fs::create_directories(out_dir);
  ResultWriter w(cfg, out_dir, res);
  const std::string& e = res.experiment;
  if (e == "sample")
    run_sample(cfg, w);
  else if (e == "train")
    run_train(cfg, w);
  else if (e == "stability")
    run_stability(cfg, w, workers);
  else if (e == "gnn")
    run_gnn(cfg, w);
  else if (e == "bounds")
    run_bounds(cfg, w);
  else if (e == "compare")
    run_compare(cfg, w, workers);
  else if (e == "srm")
    run_srm(cfg, w, workers);
  else if (e == "concentration")
    run_concentration(cfg, w);
  else
    throw InvalidInput("unknown experiment kind '" + e + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["experiment"] = e;
  manifest["config"] = cfg.values();
  manifest["config_hash"] = cfg.hash();
  manifest["seed"] = cfg.seed();
  manifest["version"] = kVersion;
  manifest["workers"] = workers;
  manifest["wall_time_s"] = wall;
  manifest["files"] = res.files;
  std::ofstream(fs::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
  return res;
}

}  // namespace mfstab
