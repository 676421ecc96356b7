#ifndef DAGCACHE_WORKLOADS_HPP
#define DAGCACHE_WORKLOADS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dagcache/dag.hpp"

namespace dagcache {

enum class Family { Iterative, PregelLike, LayeredRandom };

const char* family_name(Family family);
Family family_from_name(const std::string& name);  // throws invalid_argument

// Everything the generator needs; the seed fully determines the output.
//
// iterative: each iteration is one job of blocks_per_stage blocks wired to
//   fan_in blocks of the previous iteration. With static_block_reuse a shared
//   input block is referenced once per iteration, so its initial reference
//   count equals the iteration count (a PageRank-style long-lived block).
// pregel_like: per superstep, blocks_per_stage message blocks fed by the
//   previous superstep's aggregate, plus an aggregate combining them within
//   the same job.
// layered_random: each layer is one job whose blocks draw fan_in parents at
//   random from the previous layer.
// skip_edges adds one extra parent two jobs back (reference distance 2).
struct GeneratorParams {
  Family family = Family::Iterative;
  std::uint32_t iterations = 1;  // or layers
  std::uint32_t blocks_per_stage = 1;
  std::uint32_t fan_in = 1;
  bool static_block_reuse = false;
  bool skip_edges = false;
  std::uint64_t seed = 0;
  std::uint64_t size_min_bytes = 1;
  std::uint64_t size_max_bytes = 1;
};

DagSpec generate(const GeneratorParams& params);  // throws invalid_argument

GeneratorParams params_from_json_file(const std::string& path);

// JSON DAG file format:
//   { "blocks": [{"id": str, "size_bytes": int, "is_input": bool}...],
//     "edges":  [["parent","child"]...],
//     "jobs":   [{"job_id": str, "targets": ["id"...]}...] }
// Unknown fields are rejected. Edge order is irrelevant, job order is not.
DagSpec load_dag(const std::string& path);           // throws SchemaError
void save_dag(const DagSpec& dag, const std::string& path);

// Rewrites block and job ids of each DAG with the matching prefix so the
// results can share one cache without colliding.
std::vector<DagSpec> compose_tenants(const std::vector<DagSpec>& dags,
                                     const std::vector<std::string>& prefixes);

}  // namespace dagcache

#endif  // DAGCACHE_WORKLOADS_HPP
