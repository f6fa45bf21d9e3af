#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratinf/graph.hpp"
#include "stratinf/rng.hpp"

namespace stratinf {

// Exact methods enumerate 2^m worlds; larger networks are refused.
inline constexpr std::size_t kExactEdgeLimit = 25;
// Type-I stratification builds 2^r strata.
inline constexpr std::size_t kTypeOneMaxWidth = 20;

enum class EstimatorKind { Nmc, ExactDc, BruteForce, Bss1, Rss1, Bss2, Rss2 };
enum class SelectionKind { Random, Bfs };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Nmc;
  std::size_t samples = 1000;  // N
  std::size_t r = 5;           // stratification width
  std::size_t tau = 10;        // recursion cutoff
  SelectionKind strategy = SelectionKind::Bfs;
  std::uint64_t seed = 0;
  bool lazy_bfs_sampling = false;

  // Throws InputError on N, r or tau below 1, or r above kTypeOneMaxWidth for
  // the type-I estimators.
  void validate() const;
};

struct Estimate {
  double value = 0.0;
  std::size_t samples_used = 0;
  double elapsed_seconds = 0.0;
};

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(SelectionKind kind);
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);
std::optional<SelectionKind> parse_selection_kind(std::string_view name);

// Sum over all 2^m worlds of Pr[G] * f_s(G). Throws LimitError above kExactEdgeLimit.
double brute_force_exact(const InfluenceNetwork& net, NodeId s);

// Divide-and-conquer enumeration fixing up to r edges per level. Edges are
// taken in `order` when given (must be a permutation of the edge ids),
// otherwise in ascending id order. Throws LimitError above kExactEdgeLimit.
double exact_dc(const InfluenceNetwork& net, NodeId s, std::size_t r,
                std::span<const EdgeId> order = {});

// Mass of the type-I stratum fixing edges T to `pattern` (no Star entries).
double stratum_prob_t1(const InfluenceNetwork& net, std::span<const EdgeId> T,
                       std::span<const EdgeStatus> pattern);

// Mass of type-II stratum i over T: i = 0 fixes all of T absent; i >= 1 fixes
// the first i - 1 absent and edge i present. Throws InputError if i > |T|.
double stratum_prob_t2(const InfluenceNetwork& net, std::span<const EdgeId> T, std::size_t i);

// Status pattern of type-I stratum `index`: bit j of the index is edge j's status.
std::vector<EdgeStatus> type_one_pattern(std::size_t width, std::size_t index);
// Status pattern of type-II stratum i over width edges (Star beyond edge i).
std::vector<EdgeStatus> type_two_pattern(std::size_t width, std::size_t i);

// Largest-remainder apportionment of N proportional to pis, then every stratum
// with positive mass raised to at least one sample. The total may exceed N.
std::vector<std::size_t> allocate_samples(std::span<const double> pis, std::size_t N);

// Neyman allocation N * pi_i * sqrt(sigma_i) / sum_j pi_j * sqrt(sigma_j), with
// sigma_i the within-stratum variance. Reference only: sigma_i is unknown in
// practice.
std::vector<double> optimal_allocation(std::span<const double> pis,
                                       std::span<const double> sigmas, std::size_t N);

/// Chooses stratification edges among the currently undetermined ones.
///
/// Random draws uniformly without replacement from the undetermined set.
/// Bfs uses the BFS edge order from the seed, computed once, and takes its
/// first entries that are still undetermined; since every selected edge becomes
/// determined, the order is consumed monotonically down any recursion path.
class EdgeSelector {
 public:
  EdgeSelector(const InfluenceNetwork& net, NodeId s, SelectionKind kind);

  // Up to r distinct undetermined edges (fewer when fewer remain).
  std::vector<EdgeId> select(const StatusAssignment& assign, std::size_t r, Rng& rng);

  SelectionKind kind() const noexcept { return kind_; }

 private:
  SelectionKind kind_;
  std::vector<EdgeId> order_;
  std::vector<EdgeId> scratch_;
};

Estimate nmc_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);
Estimate bss1_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);
Estimate rss1_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);
Estimate bss2_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);
Estimate rss2_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);

// Dispatches on cfg.kind (exact kinds report zero samples).
Estimate estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg);

/// Split record of a recursive estimator run, used to inspect which edges
/// each level stratified on.
struct SplitTrace {
  std::size_t depth;
  std::vector<EdgeId> edges;
  std::size_t budget;
};

// rss1/rss2 variants that also record every split in visiting order.
Estimate rss1_estimate_traced(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                              std::vector<SplitTrace>& trace);
Estimate rss2_estimate_traced(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                              std::vector<SplitTrace>& trace);

}  // namespace stratinf
