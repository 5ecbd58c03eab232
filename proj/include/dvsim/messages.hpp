#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dvsim/types.hpp"

namespace dvsim {

// ---- RIP family -----------------------------------------------------------

struct RipEntry {
  SubnetIx dest;
  std::int64_t metric; // wire metric, 16 = unreachable
};

struct RipUpdate {
  bool triggered = false;
  std::vector<RipEntry> entries;
};

// ---- AODV ------------------------------------------------------------------

struct AodvRreq {
  RouterIx origin;
  std::uint32_t rreq_id;
  RouterIx dest;
  std::uint32_t dest_seq; // last known; 0 + unknown flag below
  bool dest_seq_known = true;
  std::uint32_t origin_seq;
  std::int64_t hop_count = 0; // hops travelled so far
};

struct AodvRrep {
  RouterIx dest;          // route target this reply describes
  std::uint32_t dest_seq;
  std::int64_t hop_count; // hops from sender to dest
  RouterIx origin;        // requester the reply travels back to
};

struct AodvRerrEntry {
  RouterIx dest;
  std::uint32_t dest_seq;
};

struct AodvRerr {
  std::vector<AodvRerrEntry> unreachable;
};

struct AodvHello {
  std::uint32_t seq;
};

// ---- EIGRP ------------------------------------------------------------------

// Vector metric carried on the wire; composite cost is derived, never sent.
struct DualVector {
  std::uint64_t bandwidth = 0;  // scaled inverse-min-bandwidth term
  std::uint64_t delay = 0;      // cumulative
  std::uint32_t load = 0;       // max along path, 0..255
  std::uint32_t reliability = 255; // min along path, 0..255
  std::int64_t hops = 0;
  bool unreachable = false;
};

struct DualUpdate {
  SubnetIx dest;
  DualVector vec;
};

struct DualQuery {
  SubnetIx dest;
  DualVector vec; // querier's best-known distance (may be unreachable)
};

struct DualReply {
  SubnetIx dest;
  DualVector vec;
};

// ---- Babel ------------------------------------------------------------------

struct BabelUpdate {
  RouterIx source; // route originator (destination of the route)
  std::uint32_t seqno;
  std::int64_t metric; // advertised distance, pre link cost; kMetricInf = retraction
};

struct BabelSeqnoRequest {
  RouterIx source;
  std::uint32_t seqno;    // requested: source must reach at least this
  std::int64_t hop_limit; // decremented per forward
  RouterIx requester;
  std::uint32_t attempt;  // retry counter, distinguishes retransmissions
};

// ---- Tree-scoped invalidation ------------------------------------------------

struct TreeInvalidRoute {
  SubnetIx dest;
  std::uint32_t seq; // invalidation wave id, per (origin, dest)
  RouterIx origin;
};

struct TreeInvalidRelay {
  SubnetIx dest;
  std::uint32_t seq;
  RouterIx origin;
};

struct TreeNotChild {
  SubnetIx dest;
  std::uint32_t seq;
  RouterIx origin;
};

struct TreeInvalidComplete {
  SubnetIx dest;
  std::uint32_t seq;
  RouterIx origin;
};

struct TreeStartRouting {
  SubnetIx dest;
  std::uint32_t seq;
  RouterIx origin;
};

// ---- Data plane --------------------------------------------------------------

struct DataPacket {
  RouterIx src;
  RouterIx dest;
  std::uint64_t id;
  std::int64_t ttl = 64;
};

using Message = std::variant<RipUpdate, AodvRreq, AodvRrep, AodvRerr, AodvHello,
                             DualUpdate, DualQuery, DualReply, BabelUpdate,
                             BabelSeqnoRequest, TreeInvalidRoute, TreeInvalidRelay,
                             TreeNotChild, TreeInvalidComplete, TreeStartRouting,
                             DataPacket>;

// Stable short label per alternative, used in traffic counters.
const char* kind_name(const Message& m);

} // namespace dvsim
