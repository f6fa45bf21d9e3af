// stratinf: generate influence networks, compute influenceability exactly or
// by sampling, and run estimator comparison suites.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stratinf/errors.hpp"
#include "stratinf/estimators.hpp"
#include "stratinf/evaluation.hpp"
#include "stratinf/ingest.hpp"

namespace {

using namespace stratinf;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct GraphFlags {
  std::string input;
  std::string value_kind = "probability";
  GeneratorSpec gen;
  std::string prob_law = "uniform";
  bool generated = false;
};

struct LoadedGraph {
  InfluenceNetwork network;
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
};

ProbLaw parse_law(const std::string& name) {
  if (name == "uniform") return ProbLaw::Uniform01;
  if (name == "constant") return ProbLaw::Constant;
  if (name == "weights") return ProbLaw::FromWeights;
  throw InputError("unknown probability law '" + name + "' (uniform, constant, weights)");
}

void add_generator_flags(CLI::App* cmd, GraphFlags& g, const std::string& seed_flag) {
  cmd->add_option("--nodes", g.gen.nodes, "Node count")->check(CLI::PositiveNumber);
  cmd->add_option("--density", g.gen.density, "Mean out-edges per node");
  cmd->add_option("--prob-law", g.prob_law, "uniform, constant or weights")
      ->check(CLI::IsMember({"uniform", "constant", "weights"}));
  cmd->add_option("--constant", g.gen.constant, "Probability for --prob-law constant");
  cmd->add_option(seed_flag, g.gen.seed, "Generator seed");
}

void add_graph_flags(CLI::App* cmd, GraphFlags& g) {
  cmd->add_option("-i,--input", g.input, "Edge list: 'src dst value' per line");
  cmd->add_option("--value-kind", g.value_kind, "probability or weight")
      ->check(CLI::IsMember({"probability", "weight"}));
  add_generator_flags(cmd, g, "--gen-seed");
}

LoadedGraph load_graph(const GraphFlags& g, const CLI::App* cmd) {
  const bool gen = cmd->count("--nodes") > 0;
  if (g.input.empty() == !gen) {
    throw InputError("give exactly one of --input or --nodes/--density");
  }
  LoadedGraph out;
  if (!g.input.empty()) {
    const ValueKind kind = g.value_kind == "weight" ? ValueKind::Weight : ValueKind::Probability;
    auto ln = load_edge_list(g.input, kind);
    out.network = std::move(ln.network);
    out.labels = std::move(ln.labels);
    out.index = std::move(ln.index);
    return out;
  }
  GeneratorSpec spec = g.gen;
  spec.prob_law = parse_law(g.prob_law);
  out.network = generate_er(spec);
  for (NodeId v = 0; v < out.network.node_count(); ++v) {
    out.labels.push_back(std::to_string(v));
    out.index.emplace(out.labels.back(), v);
  }
  return out;
}

NodeId lookup(const LoadedGraph& g, const std::string& label) {
  const auto it = g.index.find(label);
  if (it == g.index.end()) throw InputError("unknown seed node '" + label + "'");
  return it->second;
}

// One seed node is used directly; several are joined through a virtual hub.
NodeId resolve_seed(LoadedGraph& g, const std::vector<std::string>& labels) {
  if (labels.empty()) throw InputError("--seed-node is required");
  if (labels.size() == 1) return lookup(g, labels.front());
  std::vector<NodeId> ids;
  for (const auto& l : labels) ids.push_back(lookup(g, l));
  auto vs = add_virtual_seed(g.network, ids);
  g.network = std::move(vs.network);
  std::cerr << "note: " << ids.size() << " seed nodes joined through virtual node "
            << vs.seed << "; the estimate counts the seed nodes themselves\n";
  return vs.seed;
}

struct EstimatorFlags {
  std::string estimator = "nmc";
  std::size_t samples = 1000;
  std::optional<std::size_t> r;
  std::size_t tau = 10;
  std::string strategy = "bfs";
  std::uint64_t seed = 0;
  bool lazy = false;
};

EstimatorConfig to_config(const EstimatorFlags& f) {
  EstimatorConfig cfg;
  const auto kind = parse_estimator_kind(f.estimator);
  if (!kind) throw InputError("unknown estimator '" + f.estimator + "'");
  const auto strategy = parse_selection_kind(f.strategy);
  if (!strategy) throw InputError("unknown strategy '" + f.strategy + "'");
  cfg.kind = *kind;
  cfg.strategy = *strategy;
  cfg.samples = f.samples;
  cfg.r = f.r.value_or(cfg.kind == EstimatorKind::Bss2 || cfg.kind == EstimatorKind::Rss2 ? 50 : 5);
  cfg.tau = f.tau;
  cfg.seed = f.seed;
  cfg.lazy_bfs_sampling = f.lazy;
  cfg.validate();
  return cfg;
}

// Suite token: kind[-strategy][:r], e.g. "nmc", "bss1-bfs", "rss1-rm:1".
SuiteEntry parse_suite_token(const std::string& token, const EstimatorConfig& base,
                             std::size_t r1, std::size_t r2) {
  std::string head = token;
  std::optional<std::size_t> r;
  if (const auto colon = token.find(':'); colon != std::string::npos) {
    head = token.substr(0, colon);
    const std::string rs = token.substr(colon + 1);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(rs, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rs.size()) throw InputError("bad r in estimator '" + token + "'");
    r = v;
  }
  std::string kind_name = head;
  std::string strategy_name = "bfs";
  if (const auto dash = head.find('-'); dash != std::string::npos) {
    kind_name = head.substr(0, dash);
    strategy_name = head.substr(dash + 1);
  }
  const auto kind = parse_estimator_kind(kind_name);
  const auto strategy = parse_selection_kind(strategy_name);
  if (!kind || !strategy) throw InputError("unknown estimator '" + token + "'");
  EstimatorConfig cfg = base;
  cfg.kind = *kind;
  cfg.strategy = *strategy;
  const bool type_two = *kind == EstimatorKind::Bss2 || *kind == EstimatorKind::Rss2;
  cfg.r = r.value_or(type_two ? r2 : r1);
  cfg.validate();
  return {token, cfg};
}

unsigned default_threads() {
  if (const char* env = std::getenv("STRATINF_THREADS")) {
    try {
      const unsigned long v = std::stoul(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring STRATINF_THREADS='" << env << "'\n";
  }
  return 1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << std::showpoint << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influenceability of seed nodes under the independent cascade model"};
  app.require_subcommand(1);

  // generate
  GraphFlags gen_flags;
  std::string gen_output;
  auto* generate = app.add_subcommand("generate", "Write a directed Erdos-Renyi influence network");
  add_generator_flags(generate, gen_flags, "--seed");
  generate->get_option("--nodes")->required();
  generate->get_option("--density")->required();
  generate->add_option("-o,--output", gen_output, "Output path (default stdout)");

  // exact
  GraphFlags exact_graph;
  std::vector<std::string> exact_seeds;
  std::string method = "dc";
  std::size_t exact_r = 5;
  auto* exact = app.add_subcommand("exact", "Exact influenceability by enumeration");
  add_graph_flags(exact, exact_graph);
  exact->add_option("-s,--seed-node", exact_seeds, "Seed node label (repeat for a seed set)")
      ->required();
  exact->add_option("--method", method, "brute or dc")->check(CLI::IsMember({"brute", "dc"}));
  exact->add_option("--r", exact_r, "Edges fixed per level for dc")->check(CLI::PositiveNumber);

  // estimate
  GraphFlags est_graph;
  std::vector<std::string> est_seeds;
  EstimatorFlags est;
  auto* estimate_cmd = app.add_subcommand("estimate", "One sampling estimate");
  add_graph_flags(estimate_cmd, est_graph);
  estimate_cmd->add_option("-s,--seed-node", est_seeds, "Seed node label (repeat for a seed set)")
      ->required();
  estimate_cmd->add_option("-e,--estimator", est.estimator, "nmc, bss1, rss1, bss2, rss2, dc, brute");
  estimate_cmd->add_option("-N,--samples", est.samples, "Sample budget");
  estimate_cmd->add_option("--r", est.r, "Stratification width (default 5, or 50 for bss2/rss2)");
  estimate_cmd->add_option("--tau", est.tau, "Recursion cutoff");
  estimate_cmd->add_option("--strategy", est.strategy, "Edge selection: random (rm) or bfs");
  estimate_cmd->add_option("--seed", est.seed, "RNG seed");
  estimate_cmd->add_flag("--lazy", est.lazy, "Flip coins only for edges the traversal reaches");

  // evaluate
  GraphFlags eval_graph;
  std::vector<std::string> eval_seeds;
  std::string roster =
      "nmc,rss1-rm:1,bss1-rm,bss1-bfs,rss1-rm,rss1-bfs,bss2-rm,bss2-bfs,rss2-rm,rss2-bfs";
  std::size_t trials = 500;
  std::size_t seed_count = 20;
  std::size_t eval_samples = 1000;
  std::size_t r1 = 5;
  std::size_t r2 = 50;
  std::size_t eval_tau = 10;
  std::uint64_t master_seed = 0;
  std::string csv_path;
  std::string json_path;
  bool timings = false;
  bool eval_lazy = false;
  unsigned threads = default_threads();
  auto* evaluate = app.add_subcommand("evaluate", "Relative variance of an estimator roster");
  add_graph_flags(evaluate, eval_graph);
  evaluate->add_option("--estimators", roster,
                       "Comma-separated kind[-rm|-bfs][:r] tokens; nmc is added if missing");
  evaluate->add_option("--trials", trials, "Trials per estimator and seed node");
  evaluate->add_option("--seed-nodes", seed_count, "Number of random seed nodes");
  evaluate->add_option("-s,--seed-node", eval_seeds, "Explicit seed node (repeatable)");
  evaluate->add_option("-N,--samples", eval_samples, "Sample budget N");
  evaluate->add_option("--r1", r1, "Default r for bss1/rss1");
  evaluate->add_option("--r2", r2, "Default r for bss2/rss2");
  evaluate->add_option("--tau", eval_tau, "Recursion cutoff");
  evaluate->add_option("--seed", master_seed, "Master seed");
  evaluate->add_option("--csv", csv_path, "CSV report path (default stdout)");
  evaluate->add_option("--json", json_path, "JSON report path");
  evaluate->add_flag("--timings", timings, "Record mean runtimes (output no longer reproducible)");
  evaluate->add_flag("--lazy", eval_lazy, "Flip coins only for edges the traversal reaches");
  evaluate->add_option("--threads", threads, "Worker threads (default $STRATINF_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) {
      GeneratorSpec spec = gen_flags.gen;
      spec.prob_law = parse_law(gen_flags.prob_law);
      const auto net = generate_er(spec);
      std::ostringstream os;
      os << "# stratinf generate nodes=" << spec.nodes << " density=" << spec.density
         << " prob_law=" << to_string(spec.prob_law);
      if (spec.prob_law == ProbLaw::Constant) os << " constant=" << spec.constant;
      os << " seed=" << spec.seed << " edges=" << net.edge_count() << '\n';
      write_edge_list(os, net);
      if (gen_output.empty()) {
        std::cout << os.str();
      } else {
        write_file(gen_output, os.str());
      }
    } else if (*exact) {
      auto g = load_graph(exact_graph, exact);
      const NodeId s = resolve_seed(g, exact_seeds);
      const double v = method == "brute" ? brute_force_exact(g.network, s)
                                         : exact_dc(g.network, s, exact_r);
      std::cout << format_value(v) << '\n';
    } else if (*estimate_cmd) {
      const EstimatorConfig cfg = to_config(est);
      auto g = load_graph(est_graph, estimate_cmd);
      const NodeId s = resolve_seed(g, est_seeds);
      const Estimate e = estimate(g.network, s, cfg);
      std::cout << "value " << format_value(e.value) << '\n'
                << "samples " << e.samples_used << '\n'
                << "elapsed_s " << e.elapsed_seconds << '\n';
    } else if (*evaluate) {
      EstimatorConfig base;
      base.samples = eval_samples;
      base.tau = eval_tau;
      base.lazy_bfs_sampling = eval_lazy;
      std::vector<SuiteEntry> suite;
      std::stringstream tokens(roster);
      for (std::string tok; std::getline(tokens, tok, ',');) {
        if (!tok.empty()) suite.push_back(parse_suite_token(tok, base, r1, r2));
      }
      if (suite.empty()) throw InputError("--estimators is empty");
      if (trials < 2) throw InputError("--trials must be at least 2");

      auto g = load_graph(eval_graph, evaluate);
      std::vector<NodeId> seeds;
      if (!eval_seeds.empty()) {
        for (const auto& l : eval_seeds) seeds.push_back(lookup(g, l));
      } else {
        seeds = pick_seed_nodes(g.network, seed_count, derive_seed(master_seed, 0, ~0ULL));
        if (seeds.empty()) throw InputError("network has no node with an outgoing edge");
      }
      const auto report = evaluate_suite(g.network, seeds, suite, trials, master_seed, threads);
      if (report.baseline_added) {
        std::cerr << "note: nmc baseline added for relative variance\n";
      }
      std::ostringstream csv;
      write_report_csv(csv, report, timings);
      if (csv_path.empty()) {
        std::cout << csv.str();
      } else {
        write_file(csv_path, csv.str());
      }
      if (!json_path.empty()) {
        std::ostringstream js;
        write_report_json(js, report, timings, g.labels);
        write_file(json_path, js.str());
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const stratinf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
