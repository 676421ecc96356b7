#include "dagcache/policy.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dagcache/errors.hpp"

namespace dagcache {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Lru: return "lru";
    case PolicyKind::Lfu: return "lfu";
    case PolicyKind::Lrc: return "lrc";
    case PolicyKind::LrcOnline: return "lrc-online";
    case PolicyKind::Min: return "min";
  }
  return "?";
}

PolicyKind policy_from_name(const std::string& name) {
  if (name == "lru") return PolicyKind::Lru;
  if (name == "lfu") return PolicyKind::Lfu;
  if (name == "lrc") return PolicyKind::Lrc;
  if (name == "lrc-online") return PolicyKind::LrcOnline;
  if (name == "min") return PolicyKind::Min;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

// Smaller key = evicted first. `primary` is the policy metric oriented so
// that less cache-worthy blocks compare smaller; ties fall back to least
// recent, then lexicographic id.
struct BlockCache::Key {
  std::uint64_t primary;
  std::uint64_t last_touch;
  const BlockId* id;

  bool operator<(const Key& other) const {
    if (primary != other.primary) return primary < other.primary;
    if (last_touch != other.last_touch) return last_touch < other.last_touch;
    return *id < *other.id;
  }
};

BlockCache::BlockCache(PolicyKind kind, std::uint64_t capacity_bytes)
    : kind_(kind), capacity_(capacity_bytes) {
  if (capacity_bytes < 1)
    throw std::invalid_argument("capacity_bytes must be positive");
}

void BlockCache::set_future(std::vector<BlockId> future) {
  if (kind_ != PolicyKind::Min)
    throw std::invalid_argument("future sequence is only meaningful for min");
  future_ = std::move(future);
  future_pos_ = 0;
  future_occurrences_.clear();
  for (std::size_t i = 0; i < future_.size(); ++i)
    future_occurrences_[future_[i]].push_back(i);
}

void BlockCache::sync_profile(const std::map<BlockId, std::int64_t>& updates) {
  if (kind_ != PolicyKind::Lrc && kind_ != PolicyKind::LrcOnline)
    throw std::invalid_argument("profile sync applies only to lrc policies");
  for (const auto& [id, count] : updates)
    if (count < 0)
      throw std::invalid_argument("negative reference count for '" + id + "'");
  for (const auto& [id, count] : updates)
    profile_.set(id, static_cast<std::uint64_t>(count));
}

void BlockCache::record_access(const BlockId& b, bool hit) {
  (void)hit;
  touch(b);
  switch (kind_) {
    case PolicyKind::Lfu:
      ++frequency_[b];
      break;
    case PolicyKind::Min: {
      if (future_pos_ >= future_.size() || future_[future_pos_] != b)
        throw ConsistencyError("access of '" + b +
                               "' does not match the known future sequence");
      ++future_pos_;
      break;
    }
    default:
      break;
  }
}

std::uint64_t BlockCache::next_use_distance(const BlockId& b,
                                            bool* infinite) const {
  auto it = future_occurrences_.find(b);
  if (it != future_occurrences_.end()) {
    const auto& occ = it->second;
    auto next = std::lower_bound(occ.begin(), occ.end(), future_pos_);
    if (next != occ.end()) {
      *infinite = false;
      return *next - future_pos_;
    }
  }
  *infinite = true;
  return std::numeric_limits<std::uint64_t>::max();
}

BlockCache::Key BlockCache::key_of(const BlockId& b) const {
  auto touch_it = last_touch_.find(b);
  std::uint64_t stamp = touch_it == last_touch_.end() ? 0 : touch_it->second;
  Key key{0, stamp, &b};
  switch (kind_) {
    case PolicyKind::Lru:
      key.primary = stamp;
      break;
    case PolicyKind::Lfu: {
      auto it = frequency_.find(b);
      key.primary = it == frequency_.end() ? 0 : it->second;
      break;
    }
    case PolicyKind::Lrc:
    case PolicyKind::LrcOnline:
      key.primary = profile_.count(b);  // missing entry is a profile bug
      break;
    case PolicyKind::Min: {
      // Farthest next use goes first, so invert the distance.
      bool infinite = false;
      std::uint64_t dist = next_use_distance(b, &infinite);
      key.primary = infinite ? 0
                             : std::numeric_limits<std::uint64_t>::max() - dist;
      break;
    }
  }
  return key;
}

BlockId BlockCache::evict_candidate() const {
  const BlockId* victim = nullptr;
  Key best{};
  for (const auto& [id, size] : resident_) {
    if (pinned_.count(id)) continue;
    Key key = key_of(id);
    if (victim == nullptr || key < best) {
      victim = &id;
      best = key;
    }
  }
  if (victim == nullptr)
    throw EvictionImpossibleError("all resident blocks are pinned");
  return *victim;
}

std::optional<EvictionDecision> BlockCache::insert(const BlockId& b,
                                                   std::uint64_t size) {
  if (size > capacity_)
    throw UncacheableError("block '" + b + "' (" + std::to_string(size) +
                           " bytes) exceeds cache capacity");
  if (resident_.count(b))
    throw std::invalid_argument("block '" + b + "' is already resident");

  EvictionDecision decision;
  decision.policy = policy_name(kind_);
  while (used_ + size > capacity_) {
    BlockId victim = evict_candidate();
    EvictionDecision::Victim entry{victim, 0, false};
    switch (kind_) {
      case PolicyKind::Lru:
        entry.key = last_touch_.at(victim);
        break;
      case PolicyKind::Lfu: {
        auto it = frequency_.find(victim);
        entry.key = it == frequency_.end() ? 0 : it->second;
        break;
      }
      case PolicyKind::Lrc:
      case PolicyKind::LrcOnline:
        entry.key = profile_.count(victim);
        break;
      case PolicyKind::Min:
        entry.key = next_use_distance(victim, &entry.key_is_infinite);
        break;
    }
    used_ -= resident_.at(victim);
    resident_.erase(victim);
    decision.victims.push_back(std::move(entry));
  }

  resident_[b] = size;
  used_ += size;
  touch(b);  // enters at the MRU position
  if (decision.victims.empty()) return std::nullopt;
  return decision;
}

void BlockCache::pin(const BlockId& b) {
  if (!resident_.count(b))
    throw std::invalid_argument("cannot pin non-resident block '" + b + "'");
  pinned_.insert(b);
}

}  // namespace dagcache
