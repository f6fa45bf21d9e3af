#include "stratinf/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stratinf/errors.hpp"

namespace stratinf {

namespace {

using Clock = std::chrono::steady_clock;

void require_seed(const InfluenceNetwork& net, NodeId s) {
  if (!net.contains(s)) throw InputError("seed node " + std::to_string(s) + " out of range");
}

void require_exact_size(const InfluenceNetwork& net) {
  if (net.edge_count() > kExactEdgeLimit) {
    throw LimitError("exact evaluation enumerates 2^m worlds; m = " +
                     std::to_string(net.edge_count()) + " exceeds the limit of " +
                     std::to_string(kExactEdgeLimit) + " edges");
  }
}

bool is_type_one(EstimatorKind k) { return k == EstimatorKind::Bss1 || k == EstimatorKind::Rss1; }

// Masses of all 2^|T| type-I strata, index bit j = status of T[j].
std::vector<double> type_one_masses(const InfluenceNetwork& net, std::span<const EdgeId> T) {
  std::vector<double> mass{1.0};
  mass.reserve(std::size_t{1} << T.size());
  for (EdgeId e : T) {
    const double p = net.edge(e).prob;
    const std::size_t half = mass.size();
    mass.resize(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
      mass[half + i] = mass[i] * p;
      mass[i] *= 1.0 - p;
    }
  }
  return mass;
}

// Masses of the |T| + 1 type-II strata.
std::vector<double> type_two_masses(const InfluenceNetwork& net, std::span<const EdgeId> T) {
  std::vector<double> mass(T.size() + 1);
  double none_yet = 1.0;
  for (std::size_t j = 0; j < T.size(); ++j) {
    const double p = net.edge(T[j]).prob;
    mass[j + 1] = p * none_yet;
    none_yet *= 1.0 - p;
  }
  mass[0] = none_yet;
  return mass;
}

void apply_type_one(StatusAssignment& assign, std::span<const EdgeId> T, std::size_t index) {
  for (std::size_t j = 0; j < T.size(); ++j) {
    assign.set(T[j], (index >> j) & 1U ? EdgeStatus::One : EdgeStatus::Zero);
  }
}

void apply_type_two(StatusAssignment& assign, std::span<const EdgeId> T, std::size_t i) {
  const std::size_t fixed_absent = i == 0 ? T.size() : i - 1;
  for (std::size_t j = 0; j < T.size(); ++j) {
    EdgeStatus st = EdgeStatus::Star;
    if (j < fixed_absent) {
      st = EdgeStatus::Zero;
    } else if (i != 0 && j == i - 1) {
      st = EdgeStatus::One;
    }
    assign.set(T[j], st);
  }
}

void clear(StatusAssignment& assign, std::span<const EdgeId> T) {
  for (EdgeId e : T) assign.set(e, EdgeStatus::Star);
}

double enumerate_dc(const InfluenceNetwork& net, NodeId s, std::size_t r,
                    std::span<const EdgeId> order, std::size_t pos, StatusAssignment& assign,
                    ReachSampler& reach) {
  if (pos == order.size()) return static_cast<double>(reach.count_determined(assign, s));
  const std::size_t l = std::min(r, order.size() - pos);
  const auto T = order.subspan(pos, l);
  const auto mass = type_one_masses(net, T);
  double total = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) continue;
    apply_type_one(assign, T, i);
    total += mass[i] * enumerate_dc(net, s, r, order, pos + l, assign, reach);
  }
  clear(assign, T);
  return total;
}

/// State of one sampling-estimator run: a single RNG stream, the current
/// partial assignment, and the sample counter.
class StratifiedRun {
 public:
  StratifiedRun(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                std::vector<SplitTrace>* trace = nullptr)
      : net_(net),
        s_(s),
        cfg_(cfg),
        rng_(cfg.seed),
        reach_(net),
        assign_(net.edge_count()),
        selector_(net, s, cfg.strategy),
        trace_(trace) {
    const std::size_t m = net.edge_count();
    max_depth_ = (m + cfg.r - 1) / cfg.r + 1;
  }

  std::size_t samples_used() const noexcept { return used_; }

  // Mean f_s over n worlds drawn conditional on the current assignment.
  double conditional_mean(std::size_t n) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      total += reach_.sample(assign_, s_, rng_, cfg_.lazy_bfs_sampling);
    }
    used_ += n;
    return static_cast<double>(total) / static_cast<double>(n);
  }

  double basic(bool type_two) {
    const auto T = selector_.select(assign_, cfg_.r, rng_);
    record(0, T, cfg_.samples);
    return split(T, type_two, cfg_.samples, [&](std::size_t n) { return conditional_mean(n); });
  }

  double recursive(bool type_two, std::size_t budget, std::size_t depth) {
    if (budget < cfg_.tau || assign_.undetermined_count() < cfg_.r || depth >= max_depth_) {
      return conditional_mean(budget);
    }
    const auto T = selector_.select(assign_, cfg_.r, rng_);
    record(depth, T, budget);
    return split(T, type_two, budget,
                 [&](std::size_t n) { return recursive(type_two, n, depth + 1); });
  }

 private:
  // Strata whose proportional share pi_i * budget is below one sample are
  // merged into a single pooled stratum before apportionment, so the min-1
  // rule adds at most one sample per split (plus one per point-mass stratum). A pooled draw first picks member i
  // with probability pi_i / pi_pool, then samples conditional on its pattern;
  // that is an unbiased draw from the union, and pooled strata never recurse.
  template <class Child>
  double split(const std::vector<EdgeId>& T, bool type_two, std::size_t budget, Child&& child) {
    const auto mass = type_two ? type_two_masses(net_, T) : type_one_masses(net_, T);
    const double n = static_cast<double>(budget);
    // When T covers every undetermined edge, type-I strata (and type-II
    // stratum 0) are single worlds; they are never pooled so that such a
    // split stays exact.
    const bool covers_all = T.size() == assign_.undetermined_count();
    auto point_mass = [&](std::size_t i) { return covers_all && (!type_two || i == 0); };
    std::vector<std::size_t> big;
    std::vector<std::size_t> small;
    std::vector<double> small_mass;
    double pool = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] == 0.0) continue;
      if (mass[i] * n < 1.0 && !point_mass(i)) {
        small.push_back(i);
        small_mass.push_back(mass[i]);
        pool += mass[i];
      } else {
        big.push_back(i);
      }
    }
    if (small.size() == 1) {
      big.push_back(small.front());
      small.clear();
    }
    std::vector<double> shares;
    shares.reserve(big.size() + 1);
    for (std::size_t i : big) shares.push_back(mass[i]);
    if (!small.empty()) shares.push_back(pool);
    // Renormalise so rounding in the masses never trips the sum check.
    const double total_mass = std::accumulate(shares.begin(), shares.end(), 0.0);
    for (double& x : shares) x /= total_mass;
    const auto alloc = allocate_samples(shares, budget);

    auto apply = [&](std::size_t i) {
      if (type_two) {
        apply_type_two(assign_, T, i);
      } else {
        apply_type_one(assign_, T, i);
      }
    };
    double total = 0.0;
    for (std::size_t k = 0; k < big.size(); ++k) {
      apply(big[k]);
      total += mass[big[k]] * child(alloc[k]);
    }
    if (!small.empty()) {
      std::discrete_distribution<std::size_t> pick(small_mass.begin(), small_mass.end());
      const std::size_t draws = alloc.back();
      std::uint64_t sum = 0;
      for (std::size_t j = 0; j < draws; ++j) {
        apply(small[pick(rng_)]);
        sum += reach_.sample(assign_, s_, rng_, cfg_.lazy_bfs_sampling);
      }
      used_ += draws;
      total += pool * static_cast<double>(sum) / static_cast<double>(draws);
    }
    clear(assign_, T);
    return total;
  }

  void record(std::size_t depth, const std::vector<EdgeId>& T, std::size_t budget) {
    if (trace_ != nullptr) trace_->push_back({depth, T, budget});
  }

  const InfluenceNetwork& net_;
  NodeId s_;
  const EstimatorConfig& cfg_;
  Rng rng_;
  ReachSampler reach_;
  StatusAssignment assign_;
  EdgeSelector selector_;
  std::vector<SplitTrace>* trace_;
  std::size_t max_depth_ = 0;
  std::size_t used_ = 0;
};

template <class Body>
Estimate timed(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg, Body&& body) {
  cfg.validate();
  require_seed(net, s);
  const auto start = Clock::now();
  Estimate out = body();
  out.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

Estimate run_recursive(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                       bool type_two, std::vector<SplitTrace>* trace) {
  return timed(net, s, cfg, [&] {
    StratifiedRun run(net, s, cfg, trace);
    const double v = run.recursive(type_two, cfg.samples, 0);
    return Estimate{v, run.samples_used(), 0.0};
  });
}

Estimate run_basic(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                   bool type_two) {
  return timed(net, s, cfg, [&] {
    StratifiedRun run(net, s, cfg);
    const double v = run.basic(type_two);
    return Estimate{v, run.samples_used(), 0.0};
  });
}

}  // namespace

void EstimatorConfig::validate() const {
  if (samples < 1) throw InputError("sample budget N must be at least 1");
  if (r < 1) throw InputError("stratification width r must be at least 1");
  if (tau < 1) throw InputError("recursion cutoff tau must be at least 1");
  if (is_type_one(kind) && r > kTypeOneMaxWidth) {
    throw InputError("type-I estimators build 2^r strata; r = " + std::to_string(r) +
                     " exceeds " + std::to_string(kTypeOneMaxWidth));
  }
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Nmc: return "nmc";
    case EstimatorKind::ExactDc: return "dc";
    case EstimatorKind::BruteForce: return "brute";
    case EstimatorKind::Bss1: return "bss1";
    case EstimatorKind::Rss1: return "rss1";
    case EstimatorKind::Bss2: return "bss2";
    case EstimatorKind::Rss2: return "rss2";
  }
  return "?";
}

std::string_view to_string(SelectionKind kind) {
  return kind == SelectionKind::Random ? "rm" : "bfs";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
  for (auto k : {EstimatorKind::Nmc, EstimatorKind::ExactDc, EstimatorKind::BruteForce,
                 EstimatorKind::Bss1, EstimatorKind::Rss1, EstimatorKind::Bss2,
                 EstimatorKind::Rss2}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<SelectionKind> parse_selection_kind(std::string_view name) {
  if (name == "rm" || name == "random") return SelectionKind::Random;
  if (name == "bfs") return SelectionKind::Bfs;
  return std::nullopt;
}

double brute_force_exact(const InfluenceNetwork& net, NodeId s) {
  require_seed(net, s);
  require_exact_size(net);
  const std::size_t m = net.edge_count();
  StatusAssignment assign(m);
  ReachSampler reach(net);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double pr = 1.0;
    for (EdgeId e = 0; e < m; ++e) {
      const bool on = (mask >> e) & 1U;
      assign.set(e, on ? EdgeStatus::One : EdgeStatus::Zero);
      pr *= on ? net.edge(e).prob : 1.0 - net.edge(e).prob;
    }
    if (pr == 0.0) continue;
    total += pr * static_cast<double>(reach.count_determined(assign, s));
  }
  return total;
}

double exact_dc(const InfluenceNetwork& net, NodeId s, std::size_t r,
                std::span<const EdgeId> order) {
  require_seed(net, s);
  require_exact_size(net);
  if (r < 1) throw InputError("r must be at least 1");
  std::vector<EdgeId> ids;
  if (order.empty()) {
    ids.resize(net.edge_count());
    std::iota(ids.begin(), ids.end(), EdgeId{0});
  } else {
    ids.assign(order.begin(), order.end());
    std::vector<EdgeId> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != i || sorted.size() != net.edge_count()) {
        throw InputError("enumeration order must be a permutation of the edge ids");
      }
    }
  }
  StatusAssignment assign(net.edge_count());
  ReachSampler reach(net);
  return enumerate_dc(net, s, r, ids, 0, assign, reach);
}

double stratum_prob_t1(const InfluenceNetwork& net, std::span<const EdgeId> T,
                       std::span<const EdgeStatus> pattern) {
  if (pattern.size() != T.size()) throw InputError("pattern length differs from |T|");
  double pr = 1.0;
  for (std::size_t j = 0; j < T.size(); ++j) {
    const double p = net.edge(T[j]).prob;
    switch (pattern[j]) {
      case EdgeStatus::One: pr *= p; break;
      case EdgeStatus::Zero: pr *= 1.0 - p; break;
      case EdgeStatus::Star: throw InputError("type-I pattern must be fully determined");
    }
  }
  return pr;
}

double stratum_prob_t2(const InfluenceNetwork& net, std::span<const EdgeId> T, std::size_t i) {
  if (i > T.size()) {
    throw InputError("type-II stratum " + std::to_string(i) + " out of range for r = " +
                     std::to_string(T.size()));
  }
  const std::size_t absent = i == 0 ? T.size() : i - 1;
  double pr = i == 0 ? 1.0 : net.edge(T[i - 1]).prob;
  for (std::size_t j = 0; j < absent; ++j) pr *= 1.0 - net.edge(T[j]).prob;
  return pr;
}

std::vector<EdgeStatus> type_one_pattern(std::size_t width, std::size_t index) {
  std::vector<EdgeStatus> out(width);
  for (std::size_t j = 0; j < width; ++j) {
    out[j] = (index >> j) & 1U ? EdgeStatus::One : EdgeStatus::Zero;
  }
  return out;
}

std::vector<EdgeStatus> type_two_pattern(std::size_t width, std::size_t i) {
  if (i > width) throw InputError("type-II stratum index out of range");
  std::vector<EdgeStatus> out(width, EdgeStatus::Star);
  const std::size_t absent = i == 0 ? width : i - 1;
  for (std::size_t j = 0; j < absent; ++j) out[j] = EdgeStatus::Zero;
  if (i != 0) out[i - 1] = EdgeStatus::One;
  return out;
}

std::vector<std::size_t> allocate_samples(std::span<const double> pis, std::size_t N) {
  const double sum = std::accumulate(pis.begin(), pis.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError("stratum masses sum to " + std::to_string(sum) + ", expected 1");
  }
  std::vector<std::size_t> out(pis.size());
  std::vector<double> frac(pis.size());
  std::size_t given = 0;
  for (std::size_t i = 0; i < pis.size(); ++i) {
    const double exact = pis[i] * static_cast<double>(N);
    const double whole = std::floor(exact);
    out[i] = static_cast<std::size_t>(whole);
    frac[i] = exact - whole;
    given += out[i];
  }
  if (given < N) {
    std::vector<std::size_t> idx(pis.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; k < N - given && k < idx.size(); ++k) ++out[idx[k]];
  }
  for (std::size_t i = 0; i < pis.size(); ++i) {
    if (pis[i] > 0.0 && out[i] == 0) out[i] = 1;
  }
  return out;
}

std::vector<double> optimal_allocation(std::span<const double> pis,
                                       std::span<const double> sigmas, std::size_t N) {
  if (pis.size() != sigmas.size()) throw InputError("pis and sigmas differ in length");
  double denom = 0.0;
  for (std::size_t i = 0; i < pis.size(); ++i) denom += pis[i] * std::sqrt(sigmas[i]);
  std::vector<double> out(pis.size(), 0.0);
  if (denom == 0.0) return out;
  for (std::size_t i = 0; i < pis.size(); ++i) {
    out[i] = static_cast<double>(N) * pis[i] * std::sqrt(sigmas[i]) / denom;
  }
  return out;
}

EdgeSelector::EdgeSelector(const InfluenceNetwork& net, NodeId s, SelectionKind kind)
    : kind_(kind) {
  if (kind_ == SelectionKind::Bfs) order_ = bfs_edge_order(net, s);
}

std::vector<EdgeId> EdgeSelector::select(const StatusAssignment& assign, std::size_t r,
                                         Rng& rng) {
  std::vector<EdgeId> picked;
  if (kind_ == SelectionKind::Bfs) {
    for (EdgeId e : order_) {
      if (picked.size() == r) break;
      if (assign[e] == EdgeStatus::Star) picked.push_back(e);
    }
    return picked;
  }
  scratch_.clear();
  for (EdgeId e = 0; e < assign.size(); ++e) {
    if (assign[e] == EdgeStatus::Star) scratch_.push_back(e);
  }
  const std::size_t l = std::min(r, scratch_.size());
  for (std::size_t j = 0; j < l; ++j) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(j, scratch_.size() - 1)(rng);
    std::swap(scratch_[j], scratch_[k]);
    picked.push_back(scratch_[j]);
  }
  return picked;
}

Estimate nmc_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  return timed(net, s, cfg, [&] {
    StratifiedRun run(net, s, cfg);
    const double v = run.conditional_mean(cfg.samples);
    return Estimate{v, run.samples_used(), 0.0};
  });
}

Estimate bss1_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  return run_basic(net, s, cfg, false);
}

Estimate rss1_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  return run_recursive(net, s, cfg, false, nullptr);
}

Estimate bss2_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  return run_basic(net, s, cfg, true);
}

Estimate rss2_estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  return run_recursive(net, s, cfg, true, nullptr);
}

Estimate rss1_estimate_traced(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                              std::vector<SplitTrace>& trace) {
  return run_recursive(net, s, cfg, false, &trace);
}

Estimate rss2_estimate_traced(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg,
                              std::vector<SplitTrace>& trace) {
  return run_recursive(net, s, cfg, true, &trace);
}

Estimate estimate(const InfluenceNetwork& net, NodeId s, const EstimatorConfig& cfg) {
  switch (cfg.kind) {
    case EstimatorKind::Nmc: return nmc_estimate(net, s, cfg);
    case EstimatorKind::Bss1: return bss1_estimate(net, s, cfg);
    case EstimatorKind::Rss1: return rss1_estimate(net, s, cfg);
    case EstimatorKind::Bss2: return bss2_estimate(net, s, cfg);
    case EstimatorKind::Rss2: return rss2_estimate(net, s, cfg);
    case EstimatorKind::ExactDc:
      return timed(net, s, cfg, [&] { return Estimate{exact_dc(net, s, cfg.r), 0, 0.0}; });
    case EstimatorKind::BruteForce:
      return timed(net, s, cfg, [&] { return Estimate{brute_force_exact(net, s), 0, 0.0}; });
  }
  throw InputError("unknown estimator kind");
}

}  // namespace stratinf
