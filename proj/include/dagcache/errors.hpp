#ifndef DAGCACHE_ERRORS_HPP
#define DAGCACHE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dagcache {

// Malformed DAG input: bad schema, dangling edge, cycle, duplicate id.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Profile/DAG mismatch, e.g. a reference count driven below zero.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// Block larger than the whole cache; it bypasses the cache entirely.
class UncacheableError : public std::runtime_error {
 public:
  explicit UncacheableError(const std::string& what) : std::runtime_error(what) {}
};

// Every resident block is pinned; nothing can be evicted.
class EvictionImpossibleError : public std::runtime_error {
 public:
  explicit EvictionImpossibleError(const std::string& what)
      : std::runtime_error(what) {}
};

// Execution stalled: some blocks can never become runnable.
class DeadlockError : public std::runtime_error {
 public:
  explicit DeadlockError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dagcache

#endif  // DAGCACHE_ERRORS_HPP
