#pragma once

// Transaction propagation: per-epoch routing state, stem relay under the four
// forwarding schemes, exponential-delay diffusion and the embargo-timer fail-safe.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dandelion/observation.hpp"
#include "dandelion/rng.hpp"
#include "dandelion/topology.hpp"

namespace dandelion {

struct Tx {
    TxId id = 0;
    NodeId source = kNoNode;
    std::uint32_t source_seq = 0;
    double created_at = 0.0;
};

enum class ForwardingScheme { per_transaction, one_to_one, all_to_one, per_incoming_edge };

std::string_view to_string(ForwardingScheme scheme);
ForwardingScheme parse_scheme(std::string_view s);

inline bool is_pseudorandom(ForwardingScheme s) { return s != ForwardingScheme::per_transaction; }

// Routing decisions a relay makes; implemented by a fixed epoch table and by
// lazily sampled routing used when the adversary simulates unknown epochs.
class Router {
  public:
    virtual ~Router() = default;
    virtual ForwardingScheme scheme() const = 0;
    // Outbound anonymity edge for the node's own transactions.
    virtual NodeId own_target(NodeId v) = 0;
    // Outbound edge for a transaction that arrived from `from`; kNoNode if unmapped.
    virtual NodeId relay_target(NodeId v, NodeId from) = 0;
    virtual bool is_diffuser(NodeId v) const = 0;
};

// Local routing of one node: inbound neighbors (sorted) with their outbound
// targets, plus the own-transaction edge.
struct NodeRouting {
    std::vector<NodeId> inbound;
    std::vector<NodeId> relay_to;
    NodeId own = kNoNode;
};

NodeRouting sample_node_routing(std::span<const NodeId> inbound, std::span<const NodeId> outbound,
                                ForwardingScheme scheme, Rng& rng);

class EpochRouting final : public Router {
  public:
    EpochRouting() = default;
    EpochRouting(ForwardingScheme scheme, std::uint64_t epoch, std::vector<NodeRouting> nodes,
                 std::vector<bool> diffusers);

    ForwardingScheme scheme() const override { return scheme_; }
    std::uint64_t epoch() const { return epoch_; }
    NodeId own_target(NodeId v) override { return nodes_[v].own; }
    NodeId own_target(NodeId v) const { return nodes_[v].own; }
    NodeId relay_target(NodeId v, NodeId from) override { return lookup(v, from); }
    NodeId relay_target(NodeId v, NodeId from) const { return lookup(v, from); }
    bool is_diffuser(NodeId v) const override { return diffusers_[v]; }
    const NodeRouting& node(NodeId v) const { return nodes_[v]; }
    std::size_t node_count() const { return nodes_.size(); }

  private:
    NodeId lookup(NodeId v, NodeId from) const;

    ForwardingScheme scheme_ = ForwardingScheme::per_transaction;
    std::uint64_t epoch_ = 0;
    std::vector<NodeRouting> nodes_;
    std::vector<bool> diffusers_;
};

// Per-transaction scheme leaves relay maps empty (a fresh uniform choice is made
// per hop); own edges are still drawn. Diffuser flags are a pseudorandom function
// of (salt, node, epoch), set with probability `diffuser_probability`.
// Throws InvalidParameters if an honest node has no outbound edge.
EpochRouting sample_epoch_routing(const Digraph& h, ForwardingScheme scheme, std::uint64_t epoch, Rng& rng,
                                  double diffuser_probability = 0.0);

// Routing for a single simulated transaction where each visited node's local
// routing is drawn on first visit (the adversary's view of an unknown epoch).
class LazyRouting final : public Router {
  public:
    LazyRouting(const Digraph& h, std::span<const std::vector<NodeId>> in_adj, ForwardingScheme scheme, Rng& rng);

    ForwardingScheme scheme() const override { return scheme_; }
    NodeId own_target(NodeId v) override { return local(v).own; }
    NodeId relay_target(NodeId v, NodeId from) override;
    bool is_diffuser(NodeId) const override { return false; }
    void reset();

  private:
    const NodeRouting& local(NodeId v);

    const Digraph* h_;
    std::span<const std::vector<NodeId>> in_adj_;
    ForwardingScheme scheme_;
    Rng* rng_;
    std::vector<std::pair<NodeId, NodeRouting>> cache_;
};

enum class StemTerminator { per_hop_coin, epoch_diffuser };

enum class StemTermination { first_spy_hit, fluff_entry, loop_detected, hop_cap, dropped };

std::string_view to_string(StemTermination t);

struct StemObservation {
    TxId tx = 0;
    NodeId deliverer = kNoNode;
    NodeId spy = kNoNode;
    std::uint32_t hop = 0;
};

struct StemOutcome {
    std::vector<NodeId> path;  // stem nodes, path[0] is the source
    std::size_t stem_length = 0;  // number of stem hops taken
    StemTermination termination = StemTermination::fluff_entry;
    NodeId fluff_origin = kNoNode;
    std::vector<StemObservation> observations;
};

struct StemOptions {
    double q = 0.1;
    StemTerminator terminator = StemTerminator::per_hop_coin;
    // Stop at the first spy. When false, spies relay like honest nodes and later
    // spy deliveries are recorded too.
    bool stop_at_first_spy = true;
    // Spies swallow stem transactions (black-hole behavior).
    bool spies_drop = false;
    // 0 selects the default 50 * ceil(1 / max(q, 0.01)).
    std::size_t hop_cap = 0;
};

std::size_t default_hop_cap(double q);

StemOutcome stem_route(const Tx& tx, const Digraph& h, Router& routing, const StemOptions& options, Rng& rng);

struct FluffObservation {
    TxId tx = 0;
    NodeId deliverer = kNoNode;
    NodeId spy = kNoNode;
    double time = 0.0;
};

struct DiffusionOptions {
    double rate = 1.0;  // per-edge delay ~ Exp(rate)
    // Stop at the first honest-to-spy delivery instead of flooding the whole graph.
    bool stop_at_first_spy = true;
};

// Continuous-time flooding from `origin` starting at `start_time`. Records, for
// every spy, its first delivery from an honest node (spies relay as well).
std::vector<FluffObservation> diffuse(const Tx& tx, NodeId origin, const UndirectedView& g, double start_time,
                                      const DiffusionOptions& options, Rng& rng);

struct PropagationConfig {
    StemOptions stem;
    DiffusionOptions fluff;
    double delta_hop = 0.3;
};

struct Propagation {
    StemOutcome stem;
    std::vector<Observation> records;
};

// Stem relay then (unless the stem already reached a spy under the first-spy
// cutoff) diffusion from the fluff origin. Stem records are stamped hop * delta_hop;
// fluff records are offset by the stem duration.
Propagation propagate(const Tx& tx, const Digraph& h, const UndirectedView& g, Router& routing,
                      const PropagationConfig& config, Rng& rng);

enum class DropPolicy { relay, drop_all };

std::string_view to_string(DropPolicy policy);
DropPolicy parse_drop_policy(std::string_view s);

struct TimerConfig {
    double t_base = 1.0;
    double delta_hop = 0.3;
};

struct BlackHoleOutcome {
    bool dropped = false;   // a spy swallowed the stem
    bool diffused = false;  // diffusion started somewhere
    bool premature = false;  // some timer fired before the stem finished or stalled
    NodeId diffusing_relay = kNoNode;
    std::size_t diffusing_index = 0;  // position of the diffusing relay in the stem
    std::size_t relay_count = 0;  // honest stem nodes holding armed timers
    double stall_time = 0.0;  // receipt time at the last honest relay
    double diffusion_time = 0.0;
    double extra_delay = 0.0;  // diffusion_time - stall_time
};

// Each honest stem relay i (source = 0) receives the transaction at i * delta_hop
// and arms an Exp(mean t_base) embargo timer; the first timer to expire before the
// relay sees the fluff announcement starts diffusion.
BlackHoleOutcome simulate_black_hole(const Tx& tx, const Digraph& h, Router& routing, const StemOptions& stem,
                                     const TimerConfig& timers, DropPolicy drop_policy, Rng& rng);

}  // namespace dandelion
