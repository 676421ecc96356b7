#ifndef DAGCACHE_POLICY_HPP
#define DAGCACHE_POLICY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagcache/dag.hpp"
#include "dagcache/refcount.hpp"

namespace dagcache {

enum class PolicyKind { Lru, Lfu, Lrc, LrcOnline, Min };

const char* policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);  // throws invalid_argument

struct EvictionDecision {
  struct Victim {
    BlockId block;
    std::uint64_t key = 0;        // recency stamp, frequency, refcount, or
    bool key_is_infinite = false; // next-use distance; MIN uses infinite for
  };                              // "never referenced again"
  std::string policy;
  std::vector<Victim> victims;
};

// A bounded block store driven by one eviction policy. Single-owner mutable;
// the simulator drives one cache per run (or per worker) serially.
//
// Recency is tracked for every policy: it is LRU's key and the first
// tie-breaker for the others (then lexicographic id). Frequency and recency
// survive eviction; they describe the block's history, not its slot.
class BlockCache {
 public:
  BlockCache(PolicyKind kind, std::uint64_t capacity_bytes);

  PolicyKind kind() const { return kind_; }
  std::uint64_t capacity_bytes() const { return capacity_; }
  std::uint64_t used_bytes() const { return used_; }
  bool resident(const BlockId& b) const { return resident_.count(b) != 0; }
  const std::map<BlockId, std::uint64_t>& resident_blocks() const {
    return resident_;
  }

  // MIN only: the known future sequence of parent accesses.
  void set_future(std::vector<BlockId> future);

  // LRC / LRC-Online only: overwrite the listed profile entries.
  // Negative counts are rejected with invalid_argument.
  void sync_profile(const std::map<BlockId, std::int64_t>& updates);
  const RefCountProfile& profile() const { return profile_; }

  // LRU moves b to the MRU position; LFU bumps its frequency; MIN advances
  // its cursor in the future sequence; LRC only refreshes recency (its key
  // changes arrive via sync_profile when a child materializes).
  void record_access(const BlockId& b, bool hit);

  // Makes b resident, evicting per policy until it fits. Returns the victims,
  // or nullopt if nothing was evicted. Throws UncacheableError if b can never
  // fit and EvictionImpossibleError if everything evictable is pinned.
  std::optional<EvictionDecision> insert(const BlockId& b, std::uint64_t size);

  // The single worst unpinned resident block under the active policy.
  BlockId evict_candidate() const;  // throws EvictionImpossibleError

  void pin(const BlockId& b);
  void unpin_all() { pinned_.clear(); }
  const std::set<BlockId>& pinned() const { return pinned_; }

 private:
  struct Key;  // eviction key with policy-specific ordering
  Key key_of(const BlockId& b) const;
  std::uint64_t next_use_distance(const BlockId& b, bool* infinite) const;
  void touch(const BlockId& b) { last_touch_[b] = ++clock_; }

  PolicyKind kind_;
  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
  std::map<BlockId, std::uint64_t> resident_;  // block -> size
  std::set<BlockId> pinned_;

  std::uint64_t clock_ = 0;
  std::unordered_map<BlockId, std::uint64_t> last_touch_;
  std::unordered_map<BlockId, std::uint64_t> frequency_;
  RefCountProfile profile_;

  std::vector<BlockId> future_;
  std::size_t future_pos_ = 0;
  std::unordered_map<BlockId, std::vector<std::size_t>> future_occurrences_;
};

}  // namespace dagcache

#endif  // DAGCACHE_POLICY_HPP
