#ifndef DAGCACHE_CLUSTER_HPP
#define DAGCACHE_CLUSTER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dagcache/dag.hpp"
#include "dagcache/policy.hpp"
#include "dagcache/refcount.hpp"

namespace dagcache {

// The DAG information that arrives with one job submission: the job itself,
// any blocks not seen before, and the edges into the job's targets.
struct JobFragment {
  JobSpec job;
  std::vector<BlockMeta> new_blocks;
  std::vector<Edge> edges;
};

enum class MsgKind {
  ParseDag,                // driver -> master: a job fragment
  UpdateReferenceCount,    // master -> worker: pushed count overwrites
  ReportRDDStatus,         // worker -> master: block materialized/cached
  GetReferenceCount,       // worker -> master: count lookup (reply inline)
  DecrementReferenceCount, // master -> replica holder: mirrored decrement
  EvictNotice,             // worker -> master: block left the local cache
};

const char* msg_kind_name(MsgKind kind);

struct ParseDagPayload {
  JobFragment fragment;
};
struct UpdateCountsPayload {
  std::map<BlockId, std::uint64_t> counts;
};
struct BlockStatusPayload {
  enum class Status { Materialized, Cached };
  BlockId block;
  Status status;
};
struct GetCountPayload {
  BlockId block;
};
struct DecrementPayload {
  BlockId block;
};
struct EvictNoticePayload {
  BlockId block;
  std::string reason;
};

struct Message {
  MsgKind kind;
  std::string from;
  std::string to;
  std::variant<ParseDagPayload, UpdateCountsPayload, BlockStatusPayload,
               GetCountPayload, DecrementPayload, EvictNoticePayload>
      payload;
};

// In-memory transport with per-(from, to) FIFO ordering; delivery follows
// send order globally, which preserves it. Supports dropping messages for
// fault injection and logs every delivered message.
class Transport {
 public:
  struct LogEntry {
    std::uint64_t step;
    Message message;
  };

  void send(Message msg);
  bool deliver_one(const std::function<void(const Message&)>& sink);
  void deliver_all(const std::function<void(const Message&)>& sink);
  bool idle() const { return queue_.empty(); }

  // Drops the next `count` sends of the given kind (lost on the wire).
  void drop_next(MsgKind kind, int count = 1);

  std::uint64_t delivered_count(MsgKind kind) const;
  std::uint64_t delivered_total() const { return log_.size(); }
  const std::vector<LogEntry>& log() const { return log_; }

 private:
  std::vector<Message> queue_;
  std::vector<LogEntry> log_;
  std::map<MsgKind, int> pending_drops_;
  std::uint64_t step_ = 0;
};

void write_message_log_csv(const std::vector<Transport::LogEntry>& log,
                           std::ostream& out);

class Master;

// One worker: a local cache plus the slice of the reference-count profile
// covering locally resident blocks. Eviction decisions are made locally.
class Worker {
 public:
  Worker(std::string id, std::uint64_t capacity_bytes);

  const std::string& id() const { return id_; }
  BlockCache& cache() { return cache_; }
  const BlockCache& cache() const { return cache_; }
  const RefCountProfile& local_profile() const { return local_profile_; }

  // Caches `b`, pulling its count from the master first if the local profile
  // has no entry. Evictions are announced with EvictNotice messages.
  void insert_block(const BlockId& b, std::uint64_t size, Master& master,
                    Transport& net);

  // A local cache hit on `b`; pins it for the task in flight.
  void serve_access(const BlockId& b);

  // The in-flight task finished; unpin everything it held.
  void task_done();

  // Parent `b` was consumed by a newly materialized child: decrement the
  // local count. Underflow means the profile diverged from the DAG.
  void apply_decrement(const BlockId& b);  // throws ConsistencyError

  void handle(const Message& msg);  // UpdateReferenceCount / Decrement

 private:
  std::string id_;
  BlockCache cache_;
  RefCountProfile local_profile_;
};

// The master: global reference-count profile over the jobs submitted so far,
// seen job ids for re-execution detection, block placement, and the update
// fan-out rules. Profile pushes go only to workers hosting affected blocks;
// decrement mirroring is skipped entirely when replication is off.
class Master {
 public:
  Master(std::size_t worker_count, std::size_t replication_factor);

  // Routes one job submission. Unseen job id: merge the fragment, bump the
  // parents of unmaterialized targets, push updates to hosting workers.
  // Seen job id: the job will be re-executed, so its targets count as
  // unmaterialized again and the whole profile is recomputed; workers hosting
  // blocks whose counts changed get corrective updates.
  void submit_job(const JobFragment& fragment, Transport& net);  // SchemaError

  std::uint64_t reference_count(const BlockId& b) const;  // 0 if unknown

  // Block `b` materialized on `worker`: record placement, decrement the
  // global counts of b's visible parents, and mirror those decrements to
  // replica holders other than the worker that served each parent access.
  void on_materialized(const BlockId& b, const std::string& worker,
                       const std::map<BlockId, std::string>& serving_hosts,
                       Transport& net);

  void on_cached(const BlockId& b, const std::string& worker);
  void on_evicted(const BlockId& b, const std::string& worker);

  void handle(const Message& msg, Transport& net);

  const RefCountProfile& global_profile() const { return global_profile_; }
  const std::set<std::string>& seen_job_ids() const { return seen_job_ids_; }
  const std::map<BlockId, std::set<std::string>>& placement() const {
    return placement_;
  }
  std::size_t replication_factor() const { return replication_; }

  std::string home_worker(const BlockId& b) const;
  std::vector<std::string> replica_workers(const BlockId& b) const;

 private:
  void recompute_profile();
  void push_updates(const std::vector<BlockId>& blocks, Transport& net);

  std::size_t worker_count_;
  std::size_t replication_;

  // Online-visible DAG accumulated from fragments.
  std::map<BlockId, BlockMeta> known_blocks_;
  std::set<Edge> edges_;
  std::vector<JobSpec> submitted_jobs_;
  std::set<std::string> seen_job_ids_;
  std::set<BlockId> materialized_;

  RefCountProfile global_profile_;
  std::map<BlockId, std::set<std::string>> placement_;
};

struct ConsistencyVerdict {
  bool consistent = true;
  std::vector<std::string> divergences;  // "worker/block: local=x master=y"
};

// True iff every worker's local count for each locally resident block equals
// the master's. Only meaningful when the transport is idle.
ConsistencyVerdict quiesce_check(const Master& master,
                                 const std::vector<std::unique_ptr<Worker>>& workers);

// Drives a whole application over the master/worker protocol: submits jobs
// online, runs tasks on the home worker of each target, and lets the message
// layer keep profiles in sync. Execution is serial and deterministic.
class ClusterSim {
 public:
  ClusterSim(DagSpec dag, std::size_t workers,
             std::uint64_t capacity_per_worker, std::size_t replication = 1);

  // Submits and executes jobs [0, dag.jobs().size()), draining the transport
  // after every submission and every task.
  void run_all();

  // Finer-grained driving for tests.
  void submit_next_job();
  void resubmit_job(std::size_t job_index);
  bool step_task();  // runs one task; false when nothing is runnable
  void drain();

  Master& master() { return master_; }
  Transport& transport() { return net_; }
  const std::vector<std::unique_ptr<Worker>>& workers() const {
    return workers_;
  }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  JobFragment fragment_for(std::size_t job_index) const;
  void dispatch(const Message& msg);

  DagSpec dag_;
  std::vector<std::unique_ptr<Worker>> workers_;
  Master master_;
  Transport net_;

  std::size_t submitted_ = 0;
  std::set<BlockId> materialized_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace dagcache

#endif  // DAGCACHE_CLUSTER_HPP
