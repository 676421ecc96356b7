#ifndef DAGCACHE_SIMULATOR_HPP
#define DAGCACHE_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dagcache/dag.hpp"
#include "dagcache/policy.hpp"
#include "dagcache/trace.hpp"

namespace dagcache {

// Flat per-event costs in abstract time units. A miss stands for a disk
// reload, not a recursive recomputation of the lineage.
struct CostModel {
  std::uint64_t hit_cost = 1;
  std::uint64_t miss_cost = 25;
  std::uint64_t compute_cost = 5;
};

enum class Mode { Offline, Online };

Mode mode_from_name(const std::string& name);  // throws invalid_argument
const char* mode_name(Mode mode);

struct RankPercentiles {
  std::uint64_t access_index = 0;
  double recency_pct = 0;
  double frequency_pct = 0;
  double refcount_pct = 0;
};

struct TenantStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double hit_ratio = 0;
};

struct SimReport {
  std::string policy;
  std::uint64_t capacity_bytes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double hit_ratio = 0;
  std::uint64_t runtime = 0;

  AccessTrace trace;
  // (tasks completed, fraction of resident bytes with zero true refcount)
  std::vector<std::pair<std::uint64_t, double>> inactive_fraction_series;
  std::vector<RankPercentiles> rank_percentile_log;
  std::vector<TenantStats> per_tenant;  // multi-tenant runs only
};

// Deterministically executes `dag` against one cache.
//
// Inputs are preloaded at t=0 in lexicographic order. Tasks run in runnable
// order; each task accesses its parents lexicographically (hit pins the
// block, miss pays the reload cost and inserts), then materializes its
// target: parents are unpinned, their reference counts drop, and the target
// is inserted. In online mode a job's edges become visible only at its
// submission, and job j+1 is submitted once job j's targets are all
// materialized. MIN requires offline mode.
SimReport run(const DagSpec& dag, PolicyKind policy,
              std::uint64_t capacity_bytes, const CostModel& cost, Mode mode);

// One shared cache over several tenants with disjoint block namespaces.
// Jobs are interleaved round-robin, one job per tenant per cycle, with the
// tenant order reshuffled each cycle by `interleave_seed`. Mode is forced
// online: the merged submission order exists only at runtime.
SimReport run_multi_tenant(const std::vector<DagSpec>& dags, PolicyKind policy,
                           std::uint64_t capacity_bytes, const CostModel& cost,
                           std::uint64_t interleave_seed);

void write_report_csv(const std::vector<SimReport>& reports, std::ostream& out);

}  // namespace dagcache

#endif  // DAGCACHE_SIMULATOR_HPP
