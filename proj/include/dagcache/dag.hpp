#ifndef DAGCACHE_DAG_HPP
#define DAGCACHE_DAG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dagcache {

// Opaque block identifier, unique within an application namespace.
// Multi-tenant runs prefix ids with a tenant namespace ("t0/...").
using BlockId = std::string;

struct BlockMeta {
  BlockId id;
  std::uint64_t size_bytes = 1;
  bool is_input = false;  // materialized before execution starts

  bool operator==(const BlockMeta&) const = default;
};

struct JobSpec {
  std::string job_id;
  std::vector<BlockId> targets;  // blocks this job materializes, in order

  bool operator==(const JobSpec&) const = default;
};

using Edge = std::pair<BlockId, BlockId>;  // parent -> child

// The application dependency graph: blocks, parent->child edges, and the
// ordered list of jobs that partition the non-input blocks.
//
// Validated on construction:
//   - ids non-empty and unique, edge endpoints exist, graph acyclic
//   - input blocks have no parents
//   - every non-input block belongs to exactly one job, job ids unique
//
// Edges are a set: duplicates collapse, order is irrelevant. Job order is
// significant (it is the submission order).
class DagSpec {
 public:
  DagSpec() = default;
  DagSpec(std::vector<BlockMeta> blocks, std::vector<Edge> edges,
          std::vector<JobSpec> jobs);  // throws SchemaError

  const std::vector<BlockMeta>& blocks() const { return blocks_; }
  const std::vector<Edge>& edges() const { return edges_; }  // sorted, deduped
  const std::vector<JobSpec>& jobs() const { return jobs_; }

  bool has_block(const BlockId& id) const;
  const BlockMeta& block(const BlockId& id) const;  // throws invalid_argument
  const std::vector<BlockId>& parents(const BlockId& id) const;
  const std::vector<BlockId>& children(const BlockId& id) const;

  // Index into jobs() of the job that materializes `id`; nullopt for inputs.
  std::optional<std::size_t> job_of(const BlockId& id) const;

  std::vector<BlockId> input_ids() const;  // lexicographic
  std::uint64_t total_bytes() const;

  bool operator==(const DagSpec& other) const {
    return blocks_ == other.blocks_ && edges_ == other.edges_ &&
           jobs_ == other.jobs_;
  }

 private:
  void validate() const;
  void build_index();

  std::vector<BlockMeta> blocks_;
  std::vector<Edge> edges_;
  std::vector<JobSpec> jobs_;

  std::unordered_map<BlockId, std::size_t> block_index_;
  std::unordered_map<BlockId, std::size_t> job_index_;
  std::unordered_map<BlockId, std::vector<BlockId>> parents_;   // sorted
  std::unordered_map<BlockId, std::vector<BlockId>> children_;  // sorted
};

}  // namespace dagcache

#endif  // DAGCACHE_DAG_HPP
