#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stratinf/estimators.hpp"
#include "stratinf/graph.hpp"

namespace stratinf {

struct TrialBatch {
  EstimatorConfig config;
  std::uint64_t master_seed = 0;
  std::vector<double> estimates;
  std::vector<double> elapsed_seconds;
  std::vector<std::size_t> samples_used;

  std::size_t trials() const noexcept { return estimates.size(); }
  double mean() const;
  double mean_elapsed() const;
  double mean_samples() const;
};

// Runs R >= 2 independent estimator runs. Trial i is seeded with
// derive_seed(master_seed, i, stream), so its result depends only on
// (master_seed, stream, i). `threads` > 1 fans trials out over workers.
TrialBatch run_trials(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                      std::size_t R, std::uint64_t master_seed, std::uint64_t stream = 0,
                      unsigned threads = 1);

// Unbiased (R - 1 denominator) variance, two-pass. Throws InputError for R < 2.
double sample_variance(std::span<const double> xs);
double sample_variance(const TrialBatch& batch);

// sample_variance(batch) / sample_variance(baseline). Throws
// UndefinedRatioError when the baseline variance is zero.
double relative_variance(const TrialBatch& batch, const TrialBatch& baseline);

/// One named estimator configuration in a suite.
struct SuiteEntry {
  std::string name;
  EstimatorConfig config;
};

struct ReportRow {
  std::string name;
  EstimatorConfig config;
  double mean = 0.0;               // averaged over seed nodes
  double variance = 0.0;           // averaged per-seed sample variance
  double relative_variance = 0.0;  // averaged per-seed ratio against the baseline
  double mean_time_s = 0.0;
  double mean_samples = 0.0;
  std::vector<double> per_seed_relative_variance;
  std::vector<double> per_seed_mean;
  std::vector<double> per_seed_variance;
};

struct EvaluationReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<NodeId> seed_nodes;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  bool baseline_added = false;  // NMC row inserted because the suite lacked one
  std::vector<ReportRow> rows;
};

// The first Nmc entry is the relative-variance baseline; if there is none, an
// Nmc row with the first entry's budget is prepended. Every entry runs
// `trials` trials per seed node. Trial seeds for entry c and seed node k come
// from derive_seed(mix64(master_seed + c), i, k).
EvaluationReport evaluate_suite(const InfluenceNetwork& net, std::span<const NodeId> seed_nodes,
                                std::span<const SuiteEntry> entries, std::size_t trials,
                                std::uint64_t master_seed, unsigned threads = 1);

// Uniform sample without replacement of up to k nodes with out-degree >= 1,
// returned in ascending id order.
std::vector<NodeId> pick_seed_nodes(const InfluenceNetwork& net, std::size_t k,
                                    std::uint64_t seed);

// CSV columns: estimator,r,tau,N,seed_count,trials,mean,variance,relative_variance,mean_time_s.
// With include_timing false the timing column is written as NA so output is
// reproducible byte for byte.
void write_report_csv(std::ostream& out, const EvaluationReport& report, bool include_timing);
void write_report_json(std::ostream& out, const EvaluationReport& report, bool include_timing,
                       std::span<const std::string> labels = {});

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn);

}  // namespace stratinf

#include "stratinf/detail/parallel.hpp"
