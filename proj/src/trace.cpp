#include "dagcache/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "dagcache/errors.hpp"

namespace dagcache {

namespace {

const char* event_name(TraceEvent::Kind kind, bool hit) {
  switch (kind) {
    case TraceEvent::Kind::TaskStart: return "task_start";
    case TraceEvent::Kind::ParentAccess: return hit ? "access_hit" : "access_miss";
    case TraceEvent::Kind::Materialize: return "materialize";
    case TraceEvent::Kind::Evict: return "evict";
  }
  return "?";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

void write_trace_csv(const AccessTrace& trace, std::ostream& out) {
  out << "step,policy,event,block,key_value\n";
  std::uint64_t step = 0;
  for (const auto& ev : trace.events) {
    out << step++ << ',' << trace.policy << ','
        << event_name(ev.kind, ev.hit) << ',' << ev.block << ',';
    if (ev.kind == TraceEvent::Kind::Evict) {
      if (ev.key_is_infinite)
        out << "inf";
      else
        out << ev.key;
    }
    out << '\n';
  }
}

AccessTrace read_trace_csv(std::istream& in, std::uint64_t capacity_bytes) {
  AccessTrace trace;
  trace.capacity_bytes = capacity_bytes;
  std::string line;
  if (!std::getline(in, line) || split_fields(line) !=
      std::vector<std::string>{"step", "policy", "event", "block", "key_value"})
    throw SchemaError("trace file: bad or missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 5)
      throw SchemaError("trace file line " + std::to_string(line_no) +
                        ": expected 5 fields");
    trace.policy = fields[1];
    const std::string& event = fields[2];
    const std::string& block = fields[3];
    if (event == "task_start") {
      trace.events.push_back(TraceEvent::task_start(block));
    } else if (event == "access_hit" || event == "access_miss") {
      trace.events.push_back(TraceEvent::access(block, event == "access_hit"));
    } else if (event == "materialize") {
      trace.events.push_back(TraceEvent::materialize(block));
    } else if (event == "evict") {
      if (fields[4] == "inf") {
        trace.events.push_back(TraceEvent::evict(block, 0, true));
      } else {
        try {
          trace.events.push_back(
              TraceEvent::evict(block, std::stoull(fields[4]), false));
        } catch (const std::exception&) {
          throw SchemaError("trace file line " + std::to_string(line_no) +
                            ": bad key_value '" + fields[4] + "'");
        }
      }
    } else {
      throw SchemaError("trace file line " + std::to_string(line_no) +
                        ": unknown event '" + event + "'");
    }
  }
  return trace;
}

}  // namespace dagcache
