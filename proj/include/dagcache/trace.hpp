#ifndef DAGCACHE_TRACE_HPP
#define DAGCACHE_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dagcache {

// One simulator event. Event order within a task is:
//   TaskStart, ParentAccess..., Materialize, then the Evicts caused by
//   inserting the materialized block. Evicts caused by a miss reload follow
//   the ParentAccess that missed. Preload evictions precede all TaskStarts.
struct TraceEvent {
  enum class Kind { TaskStart, ParentAccess, Materialize, Evict };

  Kind kind;
  std::string block;
  bool hit = false;               // ParentAccess only
  std::uint64_t key = 0;          // Evict only: the policy's eviction key
  bool key_is_infinite = false;   // Evict only: MIN "never used again"

  static TraceEvent task_start(std::string b) {
    return {Kind::TaskStart, std::move(b)};
  }
  static TraceEvent access(std::string b, bool hit) {
    return {Kind::ParentAccess, std::move(b), hit};
  }
  static TraceEvent materialize(std::string b) {
    return {Kind::Materialize, std::move(b)};
  }
  static TraceEvent evict(std::string b, std::uint64_t key, bool infinite) {
    return {Kind::Evict, std::move(b), false, key, infinite};
  }

  bool operator==(const TraceEvent&) const = default;
};

// Full event log of one run plus the configuration needed to replay it.
struct AccessTrace {
  std::string policy;
  std::uint64_t capacity_bytes = 0;
  std::vector<TraceEvent> events;

  bool operator==(const AccessTrace&) const = default;
};

// Decision-log CSV, one line per event:
//   step,policy,event,block,key_value
// event is task_start | access_hit | access_miss | materialize | evict;
// key_value is the eviction key for evict rows ("inf" when the block is
// never referenced again) and empty otherwise.
void write_trace_csv(const AccessTrace& trace, std::ostream& out);
AccessTrace read_trace_csv(std::istream& in,
                           std::uint64_t capacity_bytes);  // throws SchemaError

}  // namespace dagcache

#endif  // DAGCACHE_TRACE_HPP
