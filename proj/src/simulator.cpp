#include "dagcache/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dagcache/errors.hpp"
#include "dagcache/metrics.hpp"
#include "dagcache/refcount.hpp"

namespace dagcache {

Mode mode_from_name(const std::string& name) {
  if (name == "offline") return Mode::Offline;
  if (name == "online") return Mode::Online;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

const char* mode_name(Mode mode) {
  return mode == Mode::Offline ? "offline" : "online";
}

namespace {

bool uses_profile(PolicyKind policy) {
  return policy == PolicyKind::Lrc || policy == PolicyKind::LrcOnline;
}

// The parent-access sequence is policy independent: runnable order and the
// lexicographic within-task order never depend on cache contents. MIN's
// future knowledge is exactly this sequence.
std::vector<BlockId> future_access_sequence(const DagSpec& dag) {
  std::vector<BlockId> accesses;
  std::set<BlockId> materialized;
  for (const auto& id : dag.input_ids()) materialized.insert(id);
  while (true) {
    auto runnable = runnable_blocks(dag, dag.jobs().size(), materialized);
    if (runnable.empty()) break;
    const BlockId& target = runnable.front();
    for (const auto& parent : dag.parents(target))
      accesses.push_back(parent);
    materialized.insert(target);
  }
  return accesses;
}

std::vector<BlockId> unmaterialized_blocks(const DagSpec& dag,
                                           const std::set<BlockId>& done) {
  std::vector<BlockId> missing;
  for (const auto& b : dag.blocks())
    if (!done.count(b.id)) missing.push_back(b.id);
  return missing;
}

struct Engine {
  const DagSpec& dag;
  PolicyKind policy;
  std::uint64_t capacity;
  const CostModel& cost;
  Mode mode;
  const std::vector<std::size_t>* tenant_of_job = nullptr;

  BlockCache cache;
  RefCountProfile profile;  // the policy-visible profile for lrc flavors
  std::set<BlockId> materialized;
  std::size_t visible = 0;
  SimReport report;

  Engine(const DagSpec& dag, PolicyKind policy, std::uint64_t capacity,
         const CostModel& cost, Mode mode)
      : dag(dag), policy(policy), capacity(capacity), cost(cost), mode(mode),
        cache(policy, capacity) {}

  void append_evictions(const std::optional<EvictionDecision>& decision) {
    if (!decision) return;
    for (const auto& v : decision->victims)
      report.trace.events.push_back(
          TraceEvent::evict(v.block, v.key, v.key_is_infinite));
  }

  void sync_counts(const std::vector<BlockId>& blocks) {
    std::map<BlockId, std::int64_t> updates;
    for (const auto& b : blocks)
      updates[b] = static_cast<std::int64_t>(profile.count(b));
    cache.sync_profile(updates);
  }

  void submit_job(std::size_t index) {
    if (uses_profile(policy)) {
      auto affected = on_job_submitted(profile, dag, index, materialized);
      sync_counts(affected);
    }
    visible = index + 1;
  }

  bool visible_jobs_complete() const {
    for (std::size_t j = 0; j < visible; ++j)
      for (const auto& target : dag.jobs()[j].targets)
        if (!materialized.count(target)) return false;
    return true;
  }

  void preload_inputs() {
    for (const auto& id : dag.input_ids()) {
      std::uint64_t size = dag.block(id).size_bytes;
      if (size <= capacity) append_evictions(cache.insert(id, size));
      materialized.insert(id);
    }
  }

  void account_access(std::size_t job_index, bool hit) {
    if (hit)
      ++report.hits;
    else
      ++report.misses;
    report.runtime += hit ? cost.hit_cost : cost.miss_cost;
    if (tenant_of_job != nullptr) {
      auto& stats = report.per_tenant[(*tenant_of_job)[job_index]];
      if (hit)
        ++stats.hits;
      else
        ++stats.misses;
    }
  }

  void run_task(const BlockId& target) {
    report.trace.events.push_back(TraceEvent::task_start(target));
    std::size_t job_index = *dag.job_of(target);
    for (const auto& parent : dag.parents(target)) {
      bool hit = cache.resident(parent);
      report.trace.events.push_back(TraceEvent::access(parent, hit));
      cache.record_access(parent, hit);
      account_access(job_index, hit);
      if (!hit) {
        std::uint64_t size = dag.block(parent).size_bytes;
        if (size > capacity) continue;  // bypasses the cache entirely
        append_evictions(cache.insert(parent, size));
      }
      cache.pin(parent);
    }

    report.runtime += cost.compute_cost;
    cache.unpin_all();
    if (uses_profile(policy)) {
      on_block_materialized(profile, dag, target);
      sync_counts(dag.parents(target));
    }
    materialized.insert(target);
    report.trace.events.push_back(TraceEvent::materialize(target));
    std::uint64_t size = dag.block(target).size_bytes;
    if (size <= capacity) append_evictions(cache.insert(target, size));
  }

  SimReport run() {
    report.policy = policy_name(policy);
    report.capacity_bytes = capacity;
    report.trace.policy = report.policy;
    report.trace.capacity_bytes = capacity;

    if (policy == PolicyKind::Min) {
      if (mode != Mode::Offline)
        throw std::invalid_argument("min requires offline mode");
      cache.set_future(future_access_sequence(dag));
    }

    if (mode == Mode::Offline) {
      visible = dag.jobs().size();
      if (uses_profile(policy)) {
        profile = compute_reference_counts(dag, visible, {});
        std::vector<BlockId> all;
        for (const auto& b : dag.blocks()) all.push_back(b.id);
        sync_counts(all);
      }
    } else if (uses_profile(policy)) {
      // Before any submission only the input blocks are known.
      for (const auto& b : dag.blocks())
        if (b.is_input) profile.set(b.id, 0);
      std::vector<BlockId> inputs = dag.input_ids();
      sync_counts(inputs);
    }

    // The first job is what starts the application, so its DAG is visible
    // by the time the preloaded inputs can face eviction.
    if (mode == Mode::Online && !dag.jobs().empty()) submit_job(0);
    preload_inputs();

    std::size_t total_targets = 0;
    for (const auto& job : dag.jobs()) total_targets += job.targets.size();

    while (materialized.size() < dag.input_ids().size() + total_targets) {
      auto runnable = runnable_blocks(dag, visible, materialized);
      if (runnable.empty()) {
        if (mode == Mode::Online && visible < dag.jobs().size() &&
            visible_jobs_complete()) {
          submit_job(visible);
          continue;
        }
        std::string names;
        for (const auto& b : unmaterialized_blocks(dag, materialized))
          names += names.empty() ? b : ", " + b;
        throw DeadlockError("execution stalled; never-runnable blocks: " +
                            names);
      }
      run_task(runnable.front());
    }

    std::uint64_t accesses = report.hits + report.misses;
    report.hit_ratio =
        accesses == 0 ? 1.0 : static_cast<double>(report.hits) / accesses;
    for (auto& stats : report.per_tenant) {
      std::uint64_t n = stats.hits + stats.misses;
      stats.hit_ratio = n == 0 ? 1.0 : static_cast<double>(stats.hits) / n;
    }
    report.inactive_fraction_series =
        measure_inactive_fraction(report.trace, dag);
    report.rank_percentile_log = measure_rank_percentiles(report.trace, dag);
    return report;
  }
};

}  // namespace

SimReport run(const DagSpec& dag, PolicyKind policy,
              std::uint64_t capacity_bytes, const CostModel& cost, Mode mode) {
  if (cost.miss_cost < cost.hit_cost)
    throw std::invalid_argument("miss cost below hit cost");
  // lrc-online is lrc with online DAG visibility, whatever the caller said.
  if (policy == PolicyKind::LrcOnline) mode = Mode::Online;
  Engine engine(dag, policy, capacity_bytes, cost, mode);
  return engine.run();
}

SimReport run_multi_tenant(const std::vector<DagSpec>& dags, PolicyKind policy,
                           std::uint64_t capacity_bytes, const CostModel& cost,
                           std::uint64_t interleave_seed) {
  if (dags.empty()) throw std::invalid_argument("no tenants");
  if (policy == PolicyKind::Min)
    throw std::invalid_argument("min is unavailable online; future accesses "
                                "of interleaved tenants are unknown");

  std::set<BlockId> block_ids;
  std::set<std::string> job_ids;
  for (const auto& dag : dags) {
    for (const auto& b : dag.blocks())
      if (!block_ids.insert(b.id).second)
        throw std::invalid_argument("tenant namespace collision on block '" +
                                    b.id + "'");
    for (const auto& job : dag.jobs())
      if (!job_ids.insert(job.job_id).second)
        throw std::invalid_argument("tenant namespace collision on job '" +
                                    job.job_id + "'");
  }

  // Round-robin interleaving; the round order is reshuffled every cycle.
  std::vector<BlockMeta> blocks;
  std::vector<Edge> edges;
  for (const auto& dag : dags) {
    blocks.insert(blocks.end(), dag.blocks().begin(), dag.blocks().end());
    edges.insert(edges.end(), dag.edges().begin(), dag.edges().end());
  }
  std::vector<JobSpec> jobs;
  std::vector<std::size_t> tenant_of_job;
  std::vector<std::size_t> next_job(dags.size(), 0);
  std::mt19937_64 rng(interleave_seed);
  for (;;) {
    std::vector<std::size_t> round;
    for (std::size_t t = 0; t < dags.size(); ++t)
      if (next_job[t] < dags[t].jobs().size()) round.push_back(t);
    if (round.empty()) break;
    std::shuffle(round.begin(), round.end(), rng);
    for (std::size_t t : round) {
      jobs.push_back(dags[t].jobs()[next_job[t]++]);
      tenant_of_job.push_back(t);
    }
  }

  DagSpec merged(std::move(blocks), std::move(edges), std::move(jobs));
  Engine engine(merged, policy, capacity_bytes, cost, Mode::Online);
  engine.tenant_of_job = &tenant_of_job;
  engine.report.per_tenant.resize(dags.size());
  SimReport report = engine.run();
  report.trace.policy = report.policy;
  return report;
}

void write_report_csv(const std::vector<SimReport>& reports,
                      std::ostream& out) {
  out << "policy,capacity_bytes,hits,misses,hit_ratio,runtime\n";
  char ratio[32];
  for (const auto& r : reports) {
    std::snprintf(ratio, sizeof(ratio), "%.6f", r.hit_ratio);
    out << r.policy << ',' << r.capacity_bytes << ',' << r.hits << ','
        << r.misses << ',' << ratio << ',' << r.runtime << '\n';
  }
}

}  // namespace dagcache
