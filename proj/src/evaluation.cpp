#include "stratinf/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "stratinf/errors.hpp"
#include "stratinf/rng.hpp"

namespace stratinf {

namespace {

double average(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

}  // namespace

double TrialBatch::mean() const { return average(estimates); }
double TrialBatch::mean_elapsed() const { return average(elapsed_seconds); }
double TrialBatch::mean_samples() const {
  if (samples_used.empty()) return 0.0;
  const double total = std::accumulate(samples_used.begin(), samples_used.end(), 0.0);
  return total / static_cast<double>(samples_used.size());
}

TrialBatch run_trials(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                      std::size_t R, std::uint64_t master_seed, std::uint64_t stream,
                      unsigned threads) {
  if (R < 2) throw InputError("a trial batch needs at least 2 trials");
  cfg.validate();
  if (!net.contains(s)) throw InputError("seed node out of range");
  TrialBatch batch{cfg, master_seed, std::vector<double>(R), std::vector<double>(R),
                   std::vector<std::size_t>(R)};
  parallel_for(R, threads, [&](std::size_t i) {
    EstimatorConfig trial = cfg;
    trial.seed = derive_seed(master_seed, i, stream);
    const Estimate est = estimate(net, s, trial);
    batch.estimates[i] = est.value;
    batch.elapsed_seconds[i] = est.elapsed_seconds;
    batch.samples_used[i] = est.samples_used;
  });
  return batch;
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InputError("sample variance needs at least 2 values");
  const double mu = average(xs);
  double sq = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double d = x - mu;
    sq += d * d;
    comp += d;
  }
  const auto n = static_cast<double>(xs.size());
  // Corrected two-pass: the second term removes rounding error left in mu.
  const double v = (sq - comp * comp / n) / (n - 1.0);
  return std::max(v, 0.0);
}

double sample_variance(const TrialBatch& batch) { return sample_variance(batch.estimates); }

double relative_variance(const TrialBatch& batch, const TrialBatch& baseline) {
  const double base = sample_variance(baseline);
  if (base == 0.0) throw UndefinedRatioError("baseline (NMC) variance is zero");
  if (&batch == &baseline) return 1.0;
  return sample_variance(batch) / base;
}

EvaluationReport evaluate_suite(const InfluenceNetwork& net, std::span<const NodeId> seed_nodes,
                                std::span<const SuiteEntry> entries, std::size_t trials,
                                std::uint64_t master_seed, unsigned threads) {
  if (seed_nodes.empty()) throw InputError("evaluation needs at least one seed node");
  if (entries.empty()) throw InputError("evaluation needs at least one estimator");
  if (trials < 2) throw InputError("evaluation needs at least 2 trials");
  for (NodeId s : seed_nodes) {
    if (!net.contains(s)) throw InputError("seed node " + std::to_string(s) + " out of range");
  }

  EvaluationReport report;
  report.node_count = net.node_count();
  report.edge_count = net.edge_count();
  report.seed_nodes.assign(seed_nodes.begin(), seed_nodes.end());
  report.trials = trials;
  report.master_seed = master_seed;

  std::vector<SuiteEntry> suite(entries.begin(), entries.end());
  auto base_it = std::find_if(suite.begin(), suite.end(),
                              [](const SuiteEntry& e) { return e.config.kind == EstimatorKind::Nmc; });
  if (base_it == suite.end()) {
    EstimatorConfig nmc;
    nmc.kind = EstimatorKind::Nmc;
    nmc.samples = suite.front().config.samples;
    nmc.lazy_bfs_sampling = suite.front().config.lazy_bfs_sampling;
    suite.insert(suite.begin(), SuiteEntry{"nmc", nmc});
    report.baseline_added = true;
    base_it = suite.begin();
  }
  const auto base = static_cast<std::size_t>(base_it - suite.begin());
  for (const auto& e : suite) {
    e.config.validate();
    if (e.config.kind == EstimatorKind::ExactDc || e.config.kind == EstimatorKind::BruteForce) {
      throw InputError("suite entry '" + e.name + "' is not a sampling estimator");
    }
  }

  const std::size_t K = seed_nodes.size();
  const std::size_t C = suite.size();
  // batches[c * K + k]
  std::vector<TrialBatch> batches(C * K);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      auto& b = batches[c * K + k];
      b.config = suite[c].config;
      b.master_seed = mix64(master_seed + c);
      b.estimates.resize(trials);
      b.elapsed_seconds.resize(trials);
      b.samples_used.resize(trials);
    }
  }
  parallel_for(C * K * trials, threads, [&](std::size_t item) {
    const std::size_t i = item % trials;
    const std::size_t ck = item / trials;
    const std::size_t k = ck % K;
    const std::size_t c = ck / K;
    auto& b = batches[ck];
    EstimatorConfig cfg = b.config;
    cfg.seed = derive_seed(b.master_seed, i, k);
    try {
      const Estimate est = estimate(net, seed_nodes[k], cfg);
      b.estimates[i] = est.value;
      b.elapsed_seconds[i] = est.elapsed_seconds;
      b.samples_used[i] = est.samples_used;
    } catch (const std::exception& ex) {
      throw std::runtime_error("estimator '" + suite[c].name + "' on seed node " +
                               std::to_string(seed_nodes[k]) + ", trial " + std::to_string(i) +
                               ": " + ex.what());
    }
  });

  for (std::size_t c = 0; c < C; ++c) {
    ReportRow row;
    row.name = suite[c].name;
    row.config = suite[c].config;
    std::vector<double> times;
    std::vector<double> samples;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& b = batches[c * K + k];
      const auto& nmc = batches[base * K + k];
      double ratio = 1.0;
      if (c != base) {
        try {
          ratio = relative_variance(b, nmc);
        } catch (const UndefinedRatioError&) {
          throw UndefinedRatioError("NMC variance is zero on seed node " +
                                    std::to_string(seed_nodes[k]) +
                                    "; relative variance is undefined");
        }
      }
      row.per_seed_relative_variance.push_back(ratio);
      row.per_seed_mean.push_back(b.mean());
      row.per_seed_variance.push_back(sample_variance(b));
      times.push_back(b.mean_elapsed());
      samples.push_back(b.mean_samples());
    }
    row.mean = average(row.per_seed_mean);
    row.variance = average(row.per_seed_variance);
    row.relative_variance = average(row.per_seed_relative_variance);
    row.mean_time_s = average(times);
    row.mean_samples = average(samples);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<NodeId> pick_seed_nodes(const InfluenceNetwork& net, std::size_t k,
                                    std::uint64_t seed) {
  std::vector<NodeId> pool;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (net.out_degree(v) > 0) pool.push_back(v);
  }
  Rng rng(seed);
  const std::size_t take = std::min(k, pool.size());
  for (std::size_t j = 0; j < take; ++j) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(j, pool.size() - 1)(rng);
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(take);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void write_report_csv(std::ostream& out, const EvaluationReport& report, bool include_timing) {
  out << "estimator,r,tau,N,seed_count,trials,mean,variance,relative_variance,mean_time_s\n";
  for (const auto& row : report.rows) {
    out << row.name << ',' << row.config.r << ',' << row.config.tau << ','
        << row.config.samples << ',' << report.seed_nodes.size() << ',' << report.trials << ','
        << format_number(row.mean) << ',' << format_number(row.variance) << ','
        << format_number(row.relative_variance) << ','
        << (include_timing ? format_number(row.mean_time_s) : std::string("NA")) << '\n';
  }
}

void write_report_json(std::ostream& out, const EvaluationReport& report, bool include_timing,
                       std::span<const std::string> labels) {
  using nlohmann::json;
  json doc;
  doc["network"] = {{"nodes", report.node_count}, {"edges", report.edge_count}};
  json seeds = json::array();
  for (NodeId s : report.seed_nodes) {
    if (labels.empty()) {
      seeds.push_back(s);
    } else {
      seeds.push_back(labels[s]);
    }
  }
  doc["seed_nodes"] = seeds;
  doc["trials"] = report.trials;
  doc["master_seed"] = report.master_seed;
  doc["baseline_added"] = report.baseline_added;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r = {
        {"estimator", row.name},
        {"kind", to_string(row.config.kind)},
        {"strategy", to_string(row.config.strategy)},
        {"r", row.config.r},
        {"tau", row.config.tau},
        {"N", row.config.samples},
        {"mean", row.mean},
        {"variance", row.variance},
        {"relative_variance", row.relative_variance},
        {"mean_samples_used", row.mean_samples},
        {"per_seed_relative_variance", row.per_seed_relative_variance},
    };
    r["mean_time_s"] = include_timing ? json(row.mean_time_s) : json(nullptr);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

}  // namespace stratinf
