#include "dagcache/refcount.hpp"

#include <algorithm>
#include <stdexcept>

#include "dagcache/errors.hpp"

namespace dagcache {

std::uint64_t RefCountProfile::count(const BlockId& b) const {
  auto it = counts_.find(b);
  if (it == counts_.end())
    throw std::invalid_argument("no reference count entry for '" + b + "'");
  return it->second;
}

void RefCountProfile::increment(const BlockId& b, std::uint64_t delta) {
  counts_[b] += delta;
}

void RefCountProfile::decrement(const BlockId& b) {
  auto it = counts_.find(b);
  if (it == counts_.end())
    throw ConsistencyError("decrement of untracked block '" + b + "'");
  if (it->second == 0)
    throw ConsistencyError("reference count of '" + b + "' would go negative");
  --it->second;
}

RefCountProfile compute_reference_counts(
    const DagSpec& dag, std::size_t visible_jobs,
    const std::set<BlockId>& materialized) {
  if (visible_jobs > dag.jobs().size())
    throw std::invalid_argument("visible_jobs exceeds job count");
  for (const auto& b : materialized)
    if (!dag.has_block(b))
      throw std::invalid_argument("materialized set names unknown block '" +
                                  b + "'");

  RefCountProfile profile;
  for (const auto& b : dag.blocks()) profile.set(b.id, 0);
  for (const auto& [parent, child] : dag.edges()) {
    auto job = dag.job_of(child);
    if (!job || *job >= visible_jobs) continue;
    if (materialized.count(child)) continue;
    profile.increment(parent);
  }
  return profile;
}

void on_block_materialized(RefCountProfile& profile, const DagSpec& dag,
                           const BlockId& b) {
  for (const auto& parent : dag.parents(b)) profile.decrement(parent);
}

std::vector<BlockId> on_job_submitted(RefCountProfile& profile,
                                      const DagSpec& dag,
                                      std::size_t job_index,
                                      const std::set<BlockId>& materialized) {
  if (job_index >= dag.jobs().size())
    throw std::invalid_argument("job index out of range");
  std::vector<BlockId> affected;
  for (const auto& target : dag.jobs()[job_index].targets) {
    if (!profile.contains(target)) {
      profile.set(target, 0);
      affected.push_back(target);
    }
    if (materialized.count(target)) continue;
    for (const auto& parent : dag.parents(target)) {
      profile.increment(parent);
      affected.push_back(parent);
    }
  }
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()),
                 affected.end());
  return affected;
}

std::vector<BlockId> runnable_blocks(const DagSpec& dag,
                                     std::size_t visible_jobs,
                                     const std::set<BlockId>& materialized) {
  std::vector<BlockId> runnable;
  std::size_t limit = std::min(visible_jobs, dag.jobs().size());
  for (std::size_t j = 0; j < limit; ++j) {
    for (const auto& target : dag.jobs()[j].targets) {
      if (materialized.count(target)) continue;
      bool ready = true;
      for (const auto& parent : dag.parents(target)) {
        if (!materialized.count(parent)) {
          ready = false;
          break;
        }
      }
      if (ready) runnable.push_back(target);
    }
  }
  return runnable;
}

}  // namespace dagcache
