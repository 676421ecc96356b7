#include "dagcache/cluster.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "dagcache/errors.hpp"

namespace dagcache {

const char* msg_kind_name(MsgKind kind) {
  switch (kind) {
    case MsgKind::ParseDag: return "parse_dag";
    case MsgKind::UpdateReferenceCount: return "update_reference_count";
    case MsgKind::ReportRDDStatus: return "report_rdd_status";
    case MsgKind::GetReferenceCount: return "get_reference_count";
    case MsgKind::DecrementReferenceCount: return "decrement_reference_count";
    case MsgKind::EvictNotice: return "evict_notice";
  }
  return "?";
}

namespace {

// Stable across builds and platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string worker_name(std::size_t index) {
  return "worker" + std::to_string(index);
}

}  // namespace

void Transport::send(Message msg) {
  auto it = pending_drops_.find(msg.kind);
  if (it != pending_drops_.end() && it->second > 0) {
    --it->second;  // lost on the wire
    return;
  }
  queue_.push_back(std::move(msg));
}

bool Transport::deliver_one(const std::function<void(const Message&)>& sink) {
  if (queue_.empty()) return false;
  Message msg = std::move(queue_.front());
  queue_.erase(queue_.begin());
  log_.push_back({step_++, msg});
  sink(msg);
  return true;
}

void Transport::deliver_all(const std::function<void(const Message&)>& sink) {
  while (deliver_one(sink)) {
  }
}

void Transport::drop_next(MsgKind kind, int count) {
  pending_drops_[kind] += count;
}

std::uint64_t Transport::delivered_count(MsgKind kind) const {
  std::uint64_t n = 0;
  for (const auto& entry : log_)
    if (entry.message.kind == kind) ++n;
  return n;
}

void write_message_log_csv(const std::vector<Transport::LogEntry>& log,
                           std::ostream& out) {
  out << "step,from,to,kind,block_or_job,value\n";
  for (const auto& entry : log) {
    const Message& m = entry.message;
    out << entry.step << ',' << m.from << ',' << m.to << ','
        << msg_kind_name(m.kind) << ',';
    switch (m.kind) {
      case MsgKind::ParseDag: {
        const auto& p = std::get<ParseDagPayload>(m.payload);
        out << p.fragment.job.job_id << ','
            << p.fragment.edges.size() << " edges";
        break;
      }
      case MsgKind::UpdateReferenceCount: {
        const auto& p = std::get<UpdateCountsPayload>(m.payload);
        std::string blocks, values;
        for (const auto& [b, v] : p.counts) {
          blocks += blocks.empty() ? b : "|" + b;
          std::string v_str = std::to_string(v);
          values += values.empty() ? v_str : "|" + v_str;
        }
        out << blocks << ',' << values;
        break;
      }
      case MsgKind::ReportRDDStatus: {
        const auto& p = std::get<BlockStatusPayload>(m.payload);
        out << p.block << ','
            << (p.status == BlockStatusPayload::Status::Materialized
                    ? "materialized"
                    : "cached");
        break;
      }
      case MsgKind::GetReferenceCount:
        out << std::get<GetCountPayload>(m.payload).block << ',';
        break;
      case MsgKind::DecrementReferenceCount:
        out << std::get<DecrementPayload>(m.payload).block << ',';
        break;
      case MsgKind::EvictNotice: {
        const auto& p = std::get<EvictNoticePayload>(m.payload);
        out << p.block << ',' << p.reason;
        break;
      }
    }
    out << '\n';
  }
}

Worker::Worker(std::string id, std::uint64_t capacity_bytes)
    : id_(std::move(id)), cache_(PolicyKind::LrcOnline, capacity_bytes) {}

void Worker::insert_block(const BlockId& b, std::uint64_t size, Master& master,
                          Transport& net) {
  if (cache_.resident(b)) {
    cache_.record_access(b, true);
    return;
  }
  if (!local_profile_.contains(b)) {
    // Count lookup is a synchronous exchange with the master.
    net.send({MsgKind::GetReferenceCount, id_, "master", GetCountPayload{b}});
    local_profile_.set(b, master.reference_count(b));
  }
  cache_.sync_profile(
      {{b, static_cast<std::int64_t>(local_profile_.count(b))}});
  auto decision = cache_.insert(b, size);
  if (decision) {
    for (const auto& victim : decision->victims) {
      local_profile_.erase(victim.block);
      net.send({MsgKind::EvictNotice, id_, "master",
                EvictNoticePayload{victim.block,
                                   "refcount=" + std::to_string(victim.key)}});
    }
  }
  net.send({MsgKind::ReportRDDStatus, id_, "master",
            BlockStatusPayload{b, BlockStatusPayload::Status::Cached}});
}

void Worker::serve_access(const BlockId& b) {
  cache_.record_access(b, true);
  cache_.pin(b);
}

void Worker::task_done() { cache_.unpin_all(); }

void Worker::apply_decrement(const BlockId& b) {
  local_profile_.decrement(b);
  cache_.sync_profile(
      {{b, static_cast<std::int64_t>(local_profile_.count(b))}});
}

void Worker::handle(const Message& msg) {
  switch (msg.kind) {
    case MsgKind::UpdateReferenceCount: {
      const auto& p = std::get<UpdateCountsPayload>(msg.payload);
      for (const auto& [b, v] : p.counts) {
        local_profile_.set(b, v);
        cache_.sync_profile({{b, static_cast<std::int64_t>(v)}});
      }
      break;
    }
    case MsgKind::DecrementReferenceCount: {
      const auto& p = std::get<DecrementPayload>(msg.payload);
      // A mirror for a block this worker already dropped is stale; ignore it.
      if (local_profile_.contains(p.block)) apply_decrement(p.block);
      break;
    }
    default:
      throw std::invalid_argument("worker cannot handle message kind");
  }
}

Master::Master(std::size_t worker_count, std::size_t replication_factor)
    : worker_count_(worker_count), replication_(replication_factor) {
  if (worker_count_ == 0)
    throw std::invalid_argument("cluster needs at least one worker");
  if (replication_ < 1 || replication_ > worker_count_)
    throw std::invalid_argument("replication factor out of range");
}

std::string Master::home_worker(const BlockId& b) const {
  return worker_name(fnv1a(b) % worker_count_);
}

std::vector<std::string> Master::replica_workers(const BlockId& b) const {
  std::vector<std::string> hosts;
  std::size_t home = fnv1a(b) % worker_count_;
  for (std::size_t k = 0; k < replication_; ++k)
    hosts.push_back(worker_name((home + k) % worker_count_));
  return hosts;
}

std::uint64_t Master::reference_count(const BlockId& b) const {
  return global_profile_.contains(b) ? global_profile_.count(b) : 0;
}

void Master::submit_job(const JobFragment& fragment, Transport& net) {
  const JobSpec& job = fragment.job;
  if (job.job_id.empty()) throw SchemaError("job fragment with empty job id");
  bool seen = seen_job_ids_.count(job.job_id) != 0;

  // Validate fully before touching any state.
  std::set<BlockId> incoming;
  for (const auto& meta : fragment.new_blocks) {
    if (meta.id.empty() || meta.size_bytes < 1)
      throw SchemaError("job fragment with malformed block meta");
    if (!incoming.insert(meta.id).second)
      throw SchemaError("job fragment repeats block '" + meta.id + "'");
    if (!seen && known_blocks_.count(meta.id))
      throw SchemaError("job fragment redefines block '" + meta.id + "'");
  }
  std::set<BlockId> targets(job.targets.begin(), job.targets.end());
  for (const auto& t : job.targets)
    if (!incoming.count(t) && !known_blocks_.count(t))
      throw SchemaError("job fragment targets undeclared block '" + t + "'");
  for (const auto& [parent, child] : fragment.edges) {
    if (!incoming.count(parent) && !known_blocks_.count(parent))
      throw SchemaError("job fragment edge from undeclared block '" + parent +
                        "'");
    if (!targets.count(child))
      throw SchemaError("job fragment edge into non-target block '" + child +
                        "'");
  }

  if (!seen) {
    for (const auto& meta : fragment.new_blocks) {
      known_blocks_.emplace(meta.id, meta);
      global_profile_.set(meta.id, reference_count(meta.id));
    }
    edges_.insert(fragment.edges.begin(), fragment.edges.end());
    submitted_jobs_.push_back(job);
    seen_job_ids_.insert(job.job_id);

    std::vector<BlockId> affected;
    for (const auto& t : job.targets) {
      if (materialized_.count(t)) continue;
      for (const auto& [parent, child] : fragment.edges) {
        if (child != t) continue;
        global_profile_.increment(parent);
        affected.push_back(parent);
      }
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());
    push_updates(affected, net);
    return;
  }

  // Re-execution: the job's targets will be recomputed, so they no longer
  // count as materialized. Recompute everything and correct the divergence.
  RefCountProfile before = global_profile_;
  for (const auto& t : job.targets) materialized_.erase(t);
  recompute_profile();
  std::vector<BlockId> changed;
  for (const auto& [b, count] : global_profile_.counts())
    if (!before.contains(b) || before.count(b) != count) changed.push_back(b);
  push_updates(changed, net);
}

void Master::recompute_profile() {
  RefCountProfile fresh;
  for (const auto& [id, meta] : known_blocks_) fresh.set(id, 0);
  for (const auto& [parent, child] : edges_)
    if (!materialized_.count(child)) fresh.increment(parent);
  global_profile_ = fresh;
}

void Master::push_updates(const std::vector<BlockId>& blocks, Transport& net) {
  std::map<std::string, std::map<BlockId, std::uint64_t>> per_worker;
  for (const auto& b : blocks) {
    auto it = placement_.find(b);
    if (it == placement_.end()) continue;  // nobody hosts it, nothing to push
    for (const auto& w : it->second)
      per_worker[w][b] = global_profile_.count(b);
  }
  for (auto& [worker, counts] : per_worker)
    net.send({MsgKind::UpdateReferenceCount, "master", worker,
              UpdateCountsPayload{std::move(counts)}});
}

void Master::on_materialized(const BlockId& b, const std::string& worker,
                             Transport& net) {
  materialized_.insert(b);
  for (const auto& [parent, child] : edges_) {
    if (child != b) continue;
    global_profile_.decrement(parent);
    auto it = placement_.find(parent);
    if (replication_ > 1 && it != placement_.end() && it->second.size() > 1) {
      // The smallest host served the access and already decremented locally;
      // mirror the decrement to the other replica holders.
      auto serving = it->second.begin();
      for (auto host = std::next(serving); host != it->second.end(); ++host)
        net.send({MsgKind::DecrementReferenceCount, "master", *host,
                  DecrementPayload{parent}});
    }
  }
  (void)worker;
}

void Master::on_cached(const BlockId& b, const std::string& worker) {
  placement_[b].insert(worker);
}

void Master::on_evicted(const BlockId& b, const std::string& worker) {
  auto it = placement_.find(b);
  if (it == placement_.end()) return;
  it->second.erase(worker);
  if (it->second.empty()) placement_.erase(it);
}

void Master::handle(const Message& msg, Transport& net) {
  switch (msg.kind) {
    case MsgKind::ParseDag:
      submit_job(std::get<ParseDagPayload>(msg.payload).fragment, net);
      break;
    case MsgKind::ReportRDDStatus: {
      const auto& p = std::get<BlockStatusPayload>(msg.payload);
      if (p.status == BlockStatusPayload::Status::Materialized)
        on_materialized(p.block, msg.from, net);
      else
        on_cached(p.block, msg.from);
      break;
    }
    case MsgKind::EvictNotice:
      on_evicted(std::get<EvictNoticePayload>(msg.payload).block, msg.from);
      break;
    case MsgKind::GetReferenceCount:
      break;  // answered synchronously; the message is logged for accounting
    default:
      throw std::invalid_argument("master cannot handle message kind");
  }
}

ConsistencyVerdict quiesce_check(
    const Master& master, const std::vector<std::unique_ptr<Worker>>& workers) {
  ConsistencyVerdict verdict;
  for (const auto& worker : workers) {
    for (const auto& [b, size] : worker->cache().resident_blocks()) {
      if (!worker->local_profile().contains(b)) {
        verdict.consistent = false;
        verdict.divergences.push_back(worker->id() + "/" + b +
                                      ": no local entry");
        continue;
      }
      std::uint64_t local = worker->local_profile().count(b);
      std::uint64_t global = master.reference_count(b);
      if (local != global) {
        verdict.consistent = false;
        verdict.divergences.push_back(
            worker->id() + "/" + b + ": local=" + std::to_string(local) +
            " master=" + std::to_string(global));
      }
    }
  }
  return verdict;
}

ClusterSim::ClusterSim(DagSpec dag, std::size_t workers,
                       std::uint64_t capacity_per_worker,
                       std::size_t replication)
    : dag_(std::move(dag)), master_(workers, replication) {
  for (std::size_t i = 0; i < workers; ++i)
    workers_.push_back(
        std::make_unique<Worker>(worker_name(i), capacity_per_worker));
  // Inputs are in memory before the first job arrives.
  for (const auto& id : dag_.input_ids()) {
    for (const auto& host : master_.replica_workers(id))
      worker_by_name(host).insert_block(id, dag_.block(id).size_bytes, master_,
                                        net_);
    materialized_.insert(id);
  }
  drain();
}

Worker& ClusterSim::worker_by_name(const std::string& name) {
  for (auto& w : workers_)
    if (w->id() == name) return *w;
  throw std::invalid_argument("no such worker '" + name + "'");
}

JobFragment ClusterSim::fragment_for(std::size_t job_index) const {
  JobFragment fragment;
  fragment.job = dag_.jobs()[job_index];
  std::set<BlockId> declared;
  for (const auto& t : fragment.job.targets) {
    for (const auto& p : dag_.parents(t)) {
      fragment.edges.emplace_back(p, t);
      // Parents the master has not seen yet (the first job's inputs) ride
      // along with the fragment.
      if (!registered_.count(p) && declared.insert(p).second)
        fragment.new_blocks.push_back(dag_.block(p));
    }
    if (declared.insert(t).second) fragment.new_blocks.push_back(dag_.block(t));
  }
  return fragment;
}

void ClusterSim::submit_next_job() {
  if (submitted_ >= dag_.jobs().size())
    throw std::invalid_argument("all jobs already submitted");
  JobFragment fragment = fragment_for(submitted_);
  for (const auto& meta : fragment.new_blocks) registered_.insert(meta.id);
  net_.send({MsgKind::ParseDag, "driver", "master",
             ParseDagPayload{std::move(fragment)}});
  ++submitted_;
  drain();
}

void ClusterSim::resubmit_job(std::size_t job_index) {
  if (job_index >= submitted_)
    throw std::invalid_argument("cannot resubmit an unsubmitted job");
  net_.send({MsgKind::ParseDag, "driver", "master",
             ParseDagPayload{fragment_for(job_index)}});
  drain();
}

bool ClusterSim::step_task() {
  auto runnable = runnable_blocks(dag_, submitted_, materialized_);
  if (runnable.empty()) return false;
  const BlockId target = runnable.front();

  std::map<BlockId, std::string> serving;
  for (const auto& parent : dag_.parents(target)) {
    auto it = master_.placement().find(parent);
    if (it != master_.placement().end() && !it->second.empty()) {
      const std::string& host = *it->second.begin();
      worker_by_name(host).serve_access(parent);
      serving[parent] = host;
      ++hits_;
    } else {
      const std::string host = master_.home_worker(parent);
      Worker& w = worker_by_name(host);
      w.cache().record_access(parent, false);
      w.insert_block(parent, dag_.block(parent).size_bytes, master_, net_);
      w.cache().pin(parent);
      serving[parent] = host;
      ++misses_;
    }
    drain();
  }

  for (const auto& [parent, host] : serving)
    worker_by_name(host).apply_decrement(parent);
  for (auto& w : workers_) w->task_done();

  for (const auto& host : master_.replica_workers(target))
    worker_by_name(host).insert_block(target, dag_.block(target).size_bytes,
                                      master_, net_);
  materialized_.insert(target);
  net_.send({MsgKind::ReportRDDStatus, master_.home_worker(target), "master",
             BlockStatusPayload{target,
                                BlockStatusPayload::Status::Materialized}});
  drain();
  return true;
}

void ClusterSim::run_all() {
  while (submitted_ < dag_.jobs().size()) {
    submit_next_job();
    bool progressed = true;
    while (progressed) {
      progressed = step_task();
    }
  }
  for (const auto& job : dag_.jobs())
    for (const auto& t : job.targets)
      if (!materialized_.count(t))
        throw DeadlockError("cluster execution stalled at block '" + t + "'");
}

void ClusterSim::drain() {
  net_.deliver_all([this](const Message& msg) { dispatch(msg); });
}

void ClusterSim::dispatch(const Message& msg) {
  if (msg.to == "master") {
    master_.handle(msg, net_);
  } else {
    worker_by_name(msg.to).handle(msg);
  }
}

}  // namespace dagcache
