#ifndef DAGCACHE_REFCOUNT_HPP
#define DAGCACHE_REFCOUNT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dagcache/dag.hpp"

namespace dagcache {

// Per-block count of unmaterialized children, restricted to the jobs visible
// to the profile's scope. Counts never go negative; a decrement below zero
// throws ConsistencyError instead of clamping.
class RefCountProfile {
 public:
  bool contains(const BlockId& b) const { return counts_.count(b) != 0; }
  std::uint64_t count(const BlockId& b) const;  // throws invalid_argument

  void set(const BlockId& b, std::uint64_t value) { counts_[b] = value; }
  void increment(const BlockId& b, std::uint64_t delta = 1);
  void decrement(const BlockId& b);  // throws ConsistencyError at zero/missing
  void erase(const BlockId& b) { counts_.erase(b); }

  const std::map<BlockId, std::uint64_t>& counts() const { return counts_; }
  bool operator==(const RefCountProfile&) const = default;

 private:
  std::map<BlockId, std::uint64_t> counts_;
};

// Reference counts for every block of `dag` over the first `visible_jobs`
// jobs: counts[b] = number of distinct children of b that belong to a visible
// job and are not in `materialized`. Offline callers pass dag.jobs().size().
RefCountProfile compute_reference_counts(const DagSpec& dag,
                                         std::size_t visible_jobs,
                                         const std::set<BlockId>& materialized);

// Incremental maintenance: block b was just materialized, so each parent of b
// loses one pending child. Only edges into b are touched; b's own job must
// have been visible for it to run, so all of them are visible by definition.
void on_block_materialized(RefCountProfile& profile, const DagSpec& dag,
                           const BlockId& b);

// Incremental maintenance for online visibility: the job at `job_index` was
// just submitted, so every parent of its not-yet-materialized targets gains
// one pending child. New targets get profile entries (initially the count of
// their unmaterialized children inside the newly visible job set).
// Returns the blocks whose counts changed or were created.
std::vector<BlockId> on_job_submitted(RefCountProfile& profile,
                                      const DagSpec& dag, std::size_t job_index,
                                      const std::set<BlockId>& materialized);

// Unmaterialized blocks of visible jobs whose parents are all materialized,
// ordered by (job submission order, position in the job's target list).
std::vector<BlockId> runnable_blocks(const DagSpec& dag,
                                     std::size_t visible_jobs,
                                     const std::set<BlockId>& materialized);

}  // namespace dagcache

#endif  // DAGCACHE_REFCOUNT_HPP
