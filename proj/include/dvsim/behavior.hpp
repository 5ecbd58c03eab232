#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvsim/messages.hpp"
#include "dvsim/topology.hpp"
#include "dvsim/types.hpp"

namespace dvsim {

// One routing-table row as exposed to snapshots and checkers.  Protocols fill
// only the fields they have; metric uses kMetricInf for unreachable and
// next_hop uses the kNoRouter/kLocal sentinels.
struct Row {
  enum class DestKind : std::uint8_t { Subnet, Router } dest_kind = DestKind::Subnet;
  std::uint32_t dest = 0;
  std::int64_t metric = kMetricInf;
  std::int32_t next_hop = kNoRouter;
  bool valid = false;
  std::uint32_t seq = 0;       // AODV/Babel sequence number
  std::int64_t fd = 0;         // EIGRP feasible distance (composite)
  std::int64_t aux = 0;        // protocol-specific (hold-down expiry, Babel FD metric, ...)
  char state = '-';            // 'P'assive/'A'ctive, tree phase, ...
};

inline bool operator==(const Row& a, const Row& b) {
  return a.dest_kind == b.dest_kind && a.dest == b.dest && a.metric == b.metric &&
         a.next_hop == b.next_hop && a.valid == b.valid && a.seq == b.seq &&
         a.fd == b.fd && a.aux == b.aux && a.state == b.state;
}

// String key/value parameters with typed accessors; unknown keys are the
// caller's problem, missing keys fall back to the given default.
class Params {
public:
  Params() = default;
  explicit Params(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  void set(const std::string& k, const std::string& v) { kv_[k] = v; }
  bool has(const std::string& k) const { return kv_.count(k) != 0; }

  std::string get(const std::string& k, const std::string& dflt) const {
    auto it = kv_.find(k);
    return it == kv_.end() ? dflt : it->second;
  }
  std::int64_t get_int(const std::string& k, std::int64_t dflt) const {
    auto it = kv_.find(k);
    return it == kv_.end() ? dflt : std::stoll(it->second);
  }
  double get_double(const std::string& k, double dflt) const {
    auto it = kv_.find(k);
    return it == kv_.end() ? dflt : std::stod(it->second);
  }
  bool get_bool(const std::string& k, bool dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    return it->second == "1" || it->second == "true" || it->second == "on" ||
           it->second == "yes";
  }
  const std::map<std::string, std::string>& raw() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

// What a behavior callback wants the engine to do.  Collected, then executed
// in order after the callback returns; ordering inside one callback is the
// emission order.
struct SendOp {
  SubnetIx subnet;
  std::int32_t to_router; // kNoRouter = broadcast to everyone else on the subnet
  Message msg;
};

struct TimerOp {
  Tick delay; // >= 1
  std::string tag;
  std::int64_t payload;
};

class Context {
public:
  Context(const Topology& topo, Tick now, RouterIx self)
      : topo_(topo), now_(now), self_(self) {}

  const Topology& topo() const { return topo_; }
  Tick now() const { return now_; }
  RouterIx self() const { return self_; }

  void broadcast(SubnetIx subnet, Message msg) {
    sends.push_back({subnet, kNoRouter, std::move(msg)});
  }
  void unicast(SubnetIx subnet, RouterIx to, Message msg) {
    sends.push_back({subnet, static_cast<std::int32_t>(to), std::move(msg)});
  }
  // Unicast over any shared live subnet (lowest index); drops silently when
  // no such subnet exists — mirrors a link-layer send to a vanished neighbor.
  void unicast_any(RouterIx to, Message msg);
  void arm_timer(Tick delay, std::string tag, std::int64_t payload = 0) {
    if (delay < 1) throw std::invalid_argument("timer delay must be >= 1");
    timers.push_back({delay, std::move(tag), payload});
  }
  void annotate(std::string s) { notes.push_back(std::move(s)); }

  std::vector<SendOp> sends;
  std::vector<TimerOp> timers;
  std::vector<std::string> notes;

private:
  const Topology& topo_;
  Tick now_;
  RouterIx self_;
};

// Adjacency change delivered to a behavior when links/routers flip.
struct AdjacencyEvent {
  SubnetIx subnet;
  bool up;
  bool attached_to_me; // subnet has an interface on this router
  std::vector<RouterIx> lost_neighbors;   // neighbors reachable only before
  std::vector<RouterIx> gained_neighbors; // neighbors reachable only after
};

class ProtocolBehavior {
public:
  virtual ~ProtocolBehavior() = default;

  virtual void on_init(Context& ctx) = 0;
  virtual void on_message(const Message& msg, InterfaceIx in_interface,
                          RouterIx from_router, Context& ctx) = 0;
  virtual void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) = 0;
  virtual void on_adjacency(const AdjacencyEvent& ev, Context& ctx) {
    (void)ev;
    (void)ctx;
  }
  // Synchronous-mode hook: called once per router per tick, in router-index
  // order, after all deliveries of the tick.  Unused in event-driven mode.
  virtual void on_round(Context& ctx) {
    (void)ctx;
  }
  // A local application wants to reach dest (AODV route solicitation).
  virtual void on_data(RouterIx dest, Context& ctx) {
    (void)dest;
    (void)ctx;
  }

  virtual void snapshot(std::vector<Row>& out) const = 0;
  virtual std::string name() const = 0;
};

using BehaviorFactory =
    std::function<std::unique_ptr<ProtocolBehavior>(const Topology&, RouterIx)>;

} // namespace dvsim
