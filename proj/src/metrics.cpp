#include "dagcache/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "dagcache/errors.hpp"
#include "dagcache/refcount.hpp"

namespace dagcache {

namespace {

void check_replay(bool ok, const char* what) {
  if (!ok) throw ConsistencyError(std::string("trace replay: ") + what);
}

}  // namespace

std::vector<std::pair<std::uint64_t, double>> measure_inactive_fraction(
    const AccessTrace& trace, const DagSpec& dag) {
  const std::uint64_t capacity = trace.capacity_bytes;
  std::set<BlockId> materialized;
  for (const auto& id : dag.input_ids()) materialized.insert(id);
  RefCountProfile truth =
      compute_reference_counts(dag, dag.jobs().size(), materialized);

  // Outputs of the last job stay "pending emission" and never count inactive.
  std::set<BlockId> final_outputs;
  if (!dag.jobs().empty())
    for (const auto& t : dag.jobs().back().targets) final_outputs.insert(t);

  std::map<BlockId, std::uint64_t> resident;
  std::uint64_t used = 0;
  const auto& events = trace.events;
  std::size_t pos = 0;

  // Every insert consumes the evictions it caused, which directly follow the
  // event that triggered it.
  auto insert_block = [&](const BlockId& b) {
    std::uint64_t size = dag.block(b).size_bytes;
    if (size > capacity) return;  // bypassed the cache
    while (used + size > capacity) {
      check_replay(pos < events.size() &&
                       events[pos].kind == TraceEvent::Kind::Evict,
                   "expected an eviction to make room");
      auto it = resident.find(events[pos].block);
      check_replay(it != resident.end(), "evicted block is not resident");
      used -= it->second;
      resident.erase(it);
      ++pos;
    }
    resident[b] = size;
    used += size;
  };

  for (const auto& id : dag.input_ids()) insert_block(id);

  std::vector<std::pair<std::uint64_t, double>> series;
  std::uint64_t tasks_completed = 0;
  while (pos < events.size()) {
    const TraceEvent& ev = events[pos];
    switch (ev.kind) {
      case TraceEvent::Kind::TaskStart:
        ++pos;
        break;
      case TraceEvent::Kind::ParentAccess:
        ++pos;
        if (!ev.hit) insert_block(ev.block);
        break;
      case TraceEvent::Kind::Materialize: {
        ++pos;
        on_block_materialized(truth, dag, ev.block);
        materialized.insert(ev.block);
        insert_block(ev.block);
        ++tasks_completed;
        std::uint64_t inactive = 0;
        for (const auto& [id, size] : resident)
          if (truth.count(id) == 0 && !final_outputs.count(id))
            inactive += size;
        double fraction =
            used == 0 ? 0.0 : static_cast<double>(inactive) / used;
        series.emplace_back(tasks_completed, fraction);
        break;
      }
      case TraceEvent::Kind::Evict:
        check_replay(false, "eviction outside any insert");
        break;
    }
  }
  return series;
}

std::vector<RankPercentiles> measure_rank_percentiles(const AccessTrace& trace,
                                                      const DagSpec& dag) {
  std::set<BlockId> materialized;
  RefCountProfile truth = compute_reference_counts(dag, dag.jobs().size(), {});

  std::unordered_map<BlockId, std::uint64_t> last_touch;
  std::unordered_map<BlockId, std::uint64_t> frequency;
  std::uint64_t clock = 0;
  for (const auto& id : dag.input_ids()) {
    materialized.insert(id);
    last_touch[id] = ++clock;
  }

  std::vector<RankPercentiles> log;
  std::uint64_t access_index = 0;
  for (const auto& ev : trace.events) {
    switch (ev.kind) {
      case TraceEvent::Kind::ParentAccess: {
        // Rank before this access is applied, among live blocks: those
        // materialized with a child still pending.
        std::vector<BlockId> candidates;
        for (const auto& id : materialized)
          if (truth.count(id) > 0) candidates.push_back(id);
        const BlockId& b = ev.block;
        std::uint64_t b_touch = last_touch[b];
        std::uint64_t b_freq = frequency[b];
        std::uint64_t b_count = truth.count(b);
        std::size_t recency_le = 0, freq_le = 0, count_le = 0;
        for (const auto& c : candidates) {
          if (last_touch[c] <= b_touch) ++recency_le;
          if (frequency[c] <= b_freq) ++freq_le;
          if (truth.count(c) <= b_count) ++count_le;
        }
        double n = static_cast<double>(candidates.size());
        log.push_back({access_index++, 100.0 * recency_le / n,
                       100.0 * freq_le / n, 100.0 * count_le / n});
        last_touch[b] = ++clock;
        ++frequency[b];
        break;
      }
      case TraceEvent::Kind::Materialize:
        on_block_materialized(truth, dag, ev.block);
        materialized.insert(ev.block);
        last_touch[ev.block] = ++clock;
        break;
      default:
        break;
    }
  }
  return log;
}

ReferenceDistances reference_distances(const DagSpec& dag,
                                       const AccessTrace& trace) {
  ReferenceDistances result;
  std::optional<std::size_t> current_job;
  std::uint64_t access_index = 0;
  double sum = 0;
  for (const auto& ev : trace.events) {
    if (ev.kind == TraceEvent::Kind::TaskStart) {
      current_job = dag.job_of(ev.block);
      check_replay(current_job.has_value(), "task for a non-job block");
    } else if (ev.kind == TraceEvent::Kind::ParentAccess) {
      std::uint64_t index = access_index++;
      if (dag.block(ev.block).is_input) continue;  // no source job
      auto source = dag.job_of(ev.block);
      check_replay(source.has_value() && current_job.has_value(),
                   "access outside a task");
      std::uint64_t distance = *current_job - *source;
      result.entries.push_back(
          {index, ev.block, *source, *current_job, distance});
      sum += static_cast<double>(distance);
    }
  }
  result.mean = result.entries.empty()
                    ? 0.0
                    : sum / static_cast<double>(result.entries.size());
  return result;
}

void write_inactive_fraction_csv(
    const std::vector<std::pair<std::uint64_t, double>>& series,
    std::ostream& out) {
  out << "tasks_completed,inactive_fraction\n";
  char buf[32];
  for (const auto& [tasks, fraction] : series) {
    std::snprintf(buf, sizeof(buf), "%.6f", fraction);
    out << tasks << ',' << buf << '\n';
  }
}

void write_rank_percentiles_csv(const std::vector<RankPercentiles>& log,
                                std::ostream& out) {
  out << "access_index,recency_pct,frequency_pct,refcount_pct\n";
  char r[32], f[32], c[32];
  for (const auto& row : log) {
    std::snprintf(r, sizeof(r), "%.6f", row.recency_pct);
    std::snprintf(f, sizeof(f), "%.6f", row.frequency_pct);
    std::snprintf(c, sizeof(c), "%.6f", row.refcount_pct);
    out << row.access_index << ',' << r << ',' << f << ',' << c << '\n';
  }
}

void write_reference_distances_csv(const ReferenceDistances& distances,
                                   std::ostream& out) {
  out << "access_index,block,source_job,destination_job,distance\n";
  for (const auto& e : distances.entries)
    out << e.access_index << ',' << e.block << ',' << e.source_job << ','
        << e.destination_job << ',' << e.distance << '\n';
}

}  // namespace dagcache
