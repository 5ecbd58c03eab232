#pragma once

#include <map>
#include <memory>
#include <set>
#include <utility>

#include "dvsim/proto/rip.hpp"

namespace dvsim {

// Hop-count routing where a failure is withdrawn by an explicit tree-scoped
// invalidation instead of counting to infinity.  The router that loses a
// destination (its attached link, or its adjacency to the next hop) becomes
// the wave root: it invalidates the route, quiesces the destination, and
// floods an invalidation notice.  A receiver whose next hop is the sender
// joins the wave (once per (origin, seq)): it invalidates, records the sender
// as parent, confirms with a relay notice, and forwards the wave to every
// other neighbor; anyone else answers not-a-child.  A relay is complete when
// every queried neighbor has answered and every confirmed child has reported
// completion — leaves complete immediately — and reports completion to its
// parent.  When the root completes, the stale routed-through-me tree is
// provably gone; it resumes routing and releases the tree along the recorded
// child links.  While quiesced a router ignores received entries for the
// destination and omits it from advertisements; a safety timer bounds the
// quiescence if the wave is cut mid-flight.
class RipTreeBehavior : public RipBehavior {
public:
  RipTreeBehavior(const Topology& topo, RouterIx self, const Params& p);

  void on_message(const Message& msg, InterfaceIx in_interface, RouterIx from_router,
                  Context& ctx) override;
  void on_timer(const std::string& tag, std::int64_t payload, Context& ctx) override;
  void on_adjacency(const AdjacencyEvent& ev, Context& ctx) override;
  std::string name() const override { return "rip-tree"; }

protected:
  char row_state(SubnetIx dest, const Route& r) const override;
  bool advertise_dest(SubnetIx dest) const override;

private:
  struct TreeState {
    bool quiesced = false;
    RouterIx origin = 0;
    std::uint32_t seq = 0;
    std::int32_t parent = kNoRouter; // kLocal at the wave root
    std::set<RouterIx> awaiting;     // notified neighbors yet to answer
    std::set<RouterIx> children;     // confirmed children yet to complete
    std::set<RouterIx> child_links;  // confirmed children (kept for release)
    Tick resume_at = -1;
  };

  void begin_invalidation(SubnetIx dest, Context& ctx);
  void join_wave(SubnetIx dest, std::uint32_t seq, RouterIx origin, RouterIx parent,
                 Context& ctx);
  void check_completion(SubnetIx dest, Context& ctx);
  void resume(SubnetIx dest, bool release_children, Context& ctx);
  bool same_wave(const TreeState& st, std::uint32_t seq, RouterIx origin) const {
    return st.quiesced && st.seq == seq && st.origin == origin;
  }

  Tick safety_;
  std::uint32_t wave_seq_ = 0;
  std::map<SubnetIx, TreeState> tree_;
  std::map<SubnetIx, std::set<std::pair<RouterIx, std::uint32_t>>> joined_; // per dest
};

std::unique_ptr<ProtocolBehavior> make_riptree(const Topology& topo, RouterIx self,
                                               const Params& p);

} // namespace dvsim
