#ifndef DAGCACHE_METRICS_HPP
#define DAGCACHE_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "dagcache/dag.hpp"
#include "dagcache/simulator.hpp"
#include "dagcache/trace.hpp"

namespace dagcache {

// After each materialization (once its insert settles): the fraction of
// resident bytes whose whole-application reference count is zero. The final
// job's outputs are still pending emission and never count as inactive.
// Ground truth uses the full DAG even when the run was online.
std::vector<std::pair<std::uint64_t, double>> measure_inactive_fraction(
    const AccessTrace& trace, const DagSpec& dag);

// At each parent access: the accessed block's percentile rank among all
// materialized, not-yet-fully-consumed blocks under recency of last access,
// historical access frequency, and current reference count. 100 = most
// cache-worthy. Ranks are taken before the access itself is applied.
std::vector<RankPercentiles> measure_rank_percentiles(const AccessTrace& trace,
                                                      const DagSpec& dag);

// Job-index gap between where a block was produced and where it is used.
struct ReferenceDistances {
  struct Entry {
    std::uint64_t access_index;  // position among ParentAccess events
    BlockId block;
    std::size_t source_job;
    std::size_t destination_job;
    std::uint64_t distance;  // destination index - source index
  };
  std::vector<Entry> entries;  // accesses of input blocks are excluded
  double mean = 0;             // 0 when there are no entries
};

ReferenceDistances reference_distances(const DagSpec& dag,
                                       const AccessTrace& trace);

void write_inactive_fraction_csv(
    const std::vector<std::pair<std::uint64_t, double>>& series,
    std::ostream& out);
void write_rank_percentiles_csv(const std::vector<RankPercentiles>& log,
                                std::ostream& out);
void write_reference_distances_csv(const ReferenceDistances& distances,
                                   std::ostream& out);

}  // namespace dagcache

#endif  // DAGCACHE_METRICS_HPP
