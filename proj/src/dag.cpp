#include "dagcache/dag.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <stdexcept>

#include "dagcache/errors.hpp"

namespace dagcache {

DagSpec::DagSpec(std::vector<BlockMeta> blocks, std::vector<Edge> edges,
                 std::vector<JobSpec> jobs)
    : blocks_(std::move(blocks)), edges_(std::move(edges)),
      jobs_(std::move(jobs)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  build_index();
  validate();
}

void DagSpec::build_index() {
  block_index_.clear();
  job_index_.clear();
  parents_.clear();
  children_.clear();
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (b.id.empty()) throw SchemaError("block with empty id");
    if (!block_index_.emplace(b.id, i).second)
      throw SchemaError("duplicate block id '" + b.id + "'");
  }
  for (const auto& [parent, child] : edges_) {
    if (!block_index_.count(parent))
      throw SchemaError("edge references unknown parent '" + parent + "'");
    if (!block_index_.count(child))
      throw SchemaError("edge references unknown child '" + child + "'");
    if (parent == child)
      throw SchemaError("self edge on block '" + parent + "'");
    parents_[child].push_back(parent);
    children_[parent].push_back(child);
  }
  for (auto& [id, v] : parents_) std::sort(v.begin(), v.end());
  for (auto& [id, v] : children_) std::sort(v.begin(), v.end());
  for (std::size_t j = 0; j < jobs_.size(); ++j) {
    for (const auto& target : jobs_[j].targets) {
      if (!block_index_.count(target))
        throw SchemaError("job '" + jobs_[j].job_id +
                          "' targets unknown block '" + target + "'");
      if (!job_index_.emplace(target, j).second)
        throw SchemaError("block '" + target + "' targeted by more than one job");
    }
  }
}

void DagSpec::validate() const {
  std::set<std::string> job_ids;
  for (const auto& job : jobs_) {
    if (job.job_id.empty()) throw SchemaError("job with empty id");
    if (!job_ids.insert(job.job_id).second)
      throw SchemaError("duplicate job id '" + job.job_id + "'");
  }
  for (const auto& b : blocks_) {
    if (b.size_bytes < 1)
      throw SchemaError("block '" + b.id + "' has size_bytes < 1");
    bool in_job = job_index_.count(b.id) != 0;
    if (b.is_input) {
      if (parents_.count(b.id))
        throw SchemaError("input block '" + b.id + "' has parents");
      if (in_job)
        throw SchemaError("input block '" + b.id + "' is a job target");
    } else if (!in_job) {
      throw SchemaError("non-input block '" + b.id + "' belongs to no job");
    }
  }

  // Kahn's algorithm; leftovers sit on a cycle.
  std::unordered_map<BlockId, std::size_t> indegree;
  for (const auto& b : blocks_) indegree[b.id] = 0;
  for (const auto& [parent, child] : edges_) ++indegree[child];
  std::deque<BlockId> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push_back(id);
  std::size_t visited = 0;
  while (!ready.empty()) {
    BlockId id = ready.front();
    ready.pop_front();
    ++visited;
    auto it = children_.find(id);
    if (it == children_.end()) continue;
    for (const auto& child : it->second)
      if (--indegree[child] == 0) ready.push_back(child);
  }
  if (visited != blocks_.size()) throw SchemaError("dependency cycle detected");
}

bool DagSpec::has_block(const BlockId& id) const {
  return block_index_.count(id) != 0;
}

const BlockMeta& DagSpec::block(const BlockId& id) const {
  auto it = block_index_.find(id);
  if (it == block_index_.end())
    throw std::invalid_argument("unknown block id '" + id + "'");
  return blocks_[it->second];
}

const std::vector<BlockId>& DagSpec::parents(const BlockId& id) const {
  static const std::vector<BlockId> kEmpty;
  auto it = parents_.find(id);
  return it == parents_.end() ? kEmpty : it->second;
}

const std::vector<BlockId>& DagSpec::children(const BlockId& id) const {
  static const std::vector<BlockId> kEmpty;
  auto it = children_.find(id);
  return it == children_.end() ? kEmpty : it->second;
}

std::optional<std::size_t> DagSpec::job_of(const BlockId& id) const {
  auto it = job_index_.find(id);
  if (it == job_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<BlockId> DagSpec::input_ids() const {
  std::vector<BlockId> ids;
  for (const auto& b : blocks_)
    if (b.is_input) ids.push_back(b.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::uint64_t DagSpec::total_bytes() const {
  return std::accumulate(blocks_.begin(), blocks_.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const BlockMeta& b) {
                           return acc + b.size_bytes;
                         });
}

}  // namespace dagcache
