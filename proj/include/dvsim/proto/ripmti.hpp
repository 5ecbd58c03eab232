#pragma once

#include <map>
#include <utility>

#include "dvsim/proto/rip.hpp"

namespace dvsim {

// RIP extended with per-interface-pair loop metrics.  While two routes for
// any destination coexist through different interfaces, the router learns the
// metric of the loop their combination would form; provided the loop passes
// both source-loop tests it is a simple loop and its metric feeds two tables:
//
//   msilm[A][B]  minimal simple-loop metric seen for the interface pair
//   mrpm[A]      row minimum of msilm over all partners of A
//
// All internal loop math is in path hops (table metric + 1); the wire format
// is plain RIP.  After losing a route via interface B, an offer arriving via
// interface A is screened:
//
//   1. no msilm entry for (A,B)            -> reject (no simple path exists)
//   2. m_A + m_B - 1 < msilm[A,B]          -> reject (cheaper than any simple
//                                             loop: must run through self)
//   3. m_A >= mrpm[A] + m_B - 1            -> uncertain; mode decides:
//        normal   accept
//        strict   reject
//        careful  accept and mark suspect; a later metric climb through the
//                 route's own next hop evicts it
//   4. otherwise                           -> accept
//
// mode=off disables learning and screening entirely (plain RIP).  Split
// horizon defaults on (the substrate this extension targets runs it).
class RipMtiBehavior : public RipBehavior {
public:
  enum class Mode { Off, Normal, Strict, Careful };

  RipMtiBehavior(const Topology& topo, RouterIx self, const Params& p);

  std::string name() const override { return "rip-mti"; }

  const std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t>& msilm() const {
    return msilm_;
  }
  std::int64_t mrpm(InterfaceIx a) const; // kMetricInf when the row is empty

protected:
  void observe_update(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                      RouterIx from, Context& ctx) override;
  bool allow_switch(SubnetIx dest, std::int64_t wire, InterfaceIx in_if,
                    RouterIx from, Context& ctx) override;
  void install(SubnetIx dest, std::int64_t metric, std::int32_t next_hop,
               SubnetIx via_subnet) override;
  void invalidate(SubnetIx dest, bool local_trigger, Context& ctx) override;
  char row_state(SubnetIx dest, const Route& r) const override;

private:
  std::optional<InterfaceIx> self_interface_on(SubnetIx s) const;
  void learn(InterfaceIx a, InterfaceIx b, std::int64_t loop_metric, Context& ctx);

  Mode mode_;
  std::map<std::pair<InterfaceIx, InterfaceIx>, std::int64_t> msilm_;
  // Last valid (interface, table metric) per destination; the m_B source once
  // the route itself is gone.
  std::map<SubnetIx, std::pair<InterfaceIx, std::int64_t>> last_valid_;
  std::map<SubnetIx, bool> suspect_;
  bool pending_suspect_ = false;
};

std::unique_ptr<ProtocolBehavior> make_ripmti(const Topology& topo, RouterIx self,
                                              const Params& p);

} // namespace dvsim
