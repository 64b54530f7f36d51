#include "dandelion/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_set>

#include "dandelion/errors.hpp"

namespace dandelion {

std::string_view to_string(ForwardingScheme scheme) {
    switch (scheme) {
        case ForwardingScheme::per_transaction: return "per-transaction";
        case ForwardingScheme::one_to_one: return "one-to-one";
        case ForwardingScheme::all_to_one: return "all-to-one";
        case ForwardingScheme::per_incoming_edge: return "per-incoming-edge";
    }
    return "unknown";
}

ForwardingScheme parse_scheme(std::string_view s) {
    if (s == "per-transaction") return ForwardingScheme::per_transaction;
    if (s == "one-to-one") return ForwardingScheme::one_to_one;
    if (s == "all-to-one") return ForwardingScheme::all_to_one;
    if (s == "per-incoming-edge") return ForwardingScheme::per_incoming_edge;
    throw InvalidParameters("unknown forwarding scheme '" + std::string(s) + "'");
}

std::string_view to_string(StemTermination t) {
    switch (t) {
        case StemTermination::first_spy_hit: return "first-spy-hit";
        case StemTermination::fluff_entry: return "fluff-entry";
        case StemTermination::loop_detected: return "loop-detected";
        case StemTermination::hop_cap: return "hop-cap";
        case StemTermination::dropped: return "dropped";
    }
    return "unknown";
}

std::string_view to_string(DropPolicy policy) {
    return policy == DropPolicy::drop_all ? "drop-all" : "relay";
}

DropPolicy parse_drop_policy(std::string_view s) {
    if (s == "relay" || s == "none") return DropPolicy::relay;
    if (s == "drop-all") return DropPolicy::drop_all;
    throw InvalidParameters("unknown drop policy '" + std::string(s) + "'");
}

NodeRouting sample_node_routing(std::span<const NodeId> inbound, std::span<const NodeId> outbound,
                                ForwardingScheme scheme, Rng& rng) {
    NodeRouting r;
    if (outbound.empty()) return r;
    r.own = outbound[uniform_index(rng, outbound.size())];
    if (scheme == ForwardingScheme::per_transaction) return r;

    r.inbound.assign(inbound.begin(), inbound.end());
    r.relay_to.resize(inbound.size());
    switch (scheme) {
        case ForwardingScheme::all_to_one: {
            const NodeId target = outbound[uniform_index(rng, outbound.size())];
            std::fill(r.relay_to.begin(), r.relay_to.end(), target);
            break;
        }
        case ForwardingScheme::per_incoming_edge:
            for (auto& t : r.relay_to) t = outbound[uniform_index(rng, outbound.size())];
            break;
        case ForwardingScheme::one_to_one: {
            // Inbound edges in random order dealt round-robin over shuffled
            // outbound edges: an injection whenever in-degree <= out-degree.
            std::vector<NodeId> outs(outbound.begin(), outbound.end());
            std::shuffle(outs.begin(), outs.end(), rng);
            std::vector<std::size_t> order(inbound.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t k = 0; k < order.size(); ++k) r.relay_to[order[k]] = outs[k % outs.size()];
            break;
        }
        case ForwardingScheme::per_transaction: break;
    }
    return r;
}

EpochRouting::EpochRouting(ForwardingScheme scheme, std::uint64_t epoch, std::vector<NodeRouting> nodes,
                           std::vector<bool> diffusers)
    : scheme_(scheme), epoch_(epoch), nodes_(std::move(nodes)), diffusers_(std::move(diffusers)) {}

NodeId EpochRouting::lookup(NodeId v, NodeId from) const {
    const auto& node = nodes_[v];
    const auto it = std::lower_bound(node.inbound.begin(), node.inbound.end(), from);
    if (it == node.inbound.end() || *it != from) return kNoNode;
    return node.relay_to[static_cast<std::size_t>(it - node.inbound.begin())];
}

EpochRouting sample_epoch_routing(const Digraph& h, ForwardingScheme scheme, std::uint64_t epoch, Rng& rng,
                                  double diffuser_probability) {
    const auto in_adj = h.in_adjacency();
    std::vector<NodeRouting> nodes(h.node_count());
    for (NodeId v = 0; v < h.node_count(); ++v) {
        if (h.out_degree(v) == 0) {
            if (h.is_honest(v) && h.supports(v)) {
                throw InvalidParameters("honest node " + std::to_string(v) + " has no anonymity out-edges");
            }
            continue;
        }
        nodes[v] = sample_node_routing(in_adj[v], h.out(v), scheme, rng);
    }
    const std::uint64_t salt = rng();
    std::vector<bool> diffusers(h.node_count(), false);
    if (diffuser_probability > 0.0) {
        for (NodeId v = 0; v < h.node_count(); ++v)
            diffusers[v] = hash_to_unit(derive_seed(salt, v, epoch)) < diffuser_probability;
    }
    return EpochRouting(scheme, epoch, std::move(nodes), std::move(diffusers));
}

LazyRouting::LazyRouting(const Digraph& h, std::span<const std::vector<NodeId>> in_adj, ForwardingScheme scheme,
                         Rng& rng)
    : h_(&h), in_adj_(in_adj), scheme_(scheme), rng_(&rng) {}

void LazyRouting::reset() { cache_.clear(); }

const NodeRouting& LazyRouting::local(NodeId v) {
    for (const auto& [node, routing] : cache_)
        if (node == v) return routing;
    cache_.emplace_back(v, sample_node_routing(in_adj_[v], h_->out(v), scheme_, *rng_));
    return cache_.back().second;
}

NodeId LazyRouting::relay_target(NodeId v, NodeId from) {
    const auto& node = local(v);
    const auto it = std::lower_bound(node.inbound.begin(), node.inbound.end(), from);
    if (it == node.inbound.end() || *it != from) return kNoNode;
    return node.relay_to[static_cast<std::size_t>(it - node.inbound.begin())];
}

std::size_t default_hop_cap(double q) {
    return 50 * static_cast<std::size_t>(std::ceil(1.0 / std::max(q, 0.01) - 1e-12));
}

namespace {

// (node, inbound neighbor) pairs already traversed; linear scan for short stems.
class VisitedEdges {
  public:
    bool insert(NodeId node, NodeId from) {
        const std::uint64_t key = (static_cast<std::uint64_t>(node) << 32) | from;
        if (set_.empty()) {
            if (std::find(small_.begin(), small_.end(), key) != small_.end()) return false;
            small_.push_back(key);
            if (small_.size() > 32) {
                set_.insert(small_.begin(), small_.end());
                small_.clear();
            }
            return true;
        }
        return set_.insert(key).second;
    }

  private:
    std::vector<std::uint64_t> small_;
    std::unordered_set<std::uint64_t> set_;
};

}  // namespace

StemOutcome stem_route(const Tx& tx, const Digraph& h, Router& routing, const StemOptions& options, Rng& rng) {
    if (tx.source >= h.node_count()) throw InvalidParameters("transaction source is not a node of the graph");
    StemOutcome out;
    out.path.push_back(tx.source);
    if (!h.supports(tx.source) || h.out_degree(tx.source) == 0) {
        out.fluff_origin = tx.source;
        out.termination = StemTermination::fluff_entry;
        return out;
    }

    const bool per_tx = routing.scheme() == ForwardingScheme::per_transaction;
    const std::size_t cap = options.hop_cap != 0 ? options.hop_cap : default_hop_cap(options.q);
    VisitedEdges visited;
    bool spy_hit = false;
    NodeId head = tx.source;
    NodeId from = kNoNode;
    std::uint32_t hop = 0;

    auto finish = [&](StemTermination t, NodeId origin) {
        out.stem_length = hop;
        out.termination = spy_hit && t != StemTermination::dropped ? StemTermination::first_spy_hit : t;
        out.fluff_origin = origin;
        return out;
    };

    for (;;) {
        const auto outs = h.out(head);
        if (outs.empty()) return finish(StemTermination::fluff_entry, head);
        NodeId next = kNoNode;
        if (!per_tx) next = hop == 0 ? routing.own_target(head) : routing.relay_target(head, from);
        if (next == kNoNode) next = outs[uniform_index(rng, outs.size())];
        ++hop;

        if (h.is_spy(next)) {
            if (h.is_honest(head)) out.observations.push_back({tx.id, head, next, hop});
            if (options.spies_drop) return finish(StemTermination::dropped, kNoNode);
            if (options.stop_at_first_spy) {
                spy_hit = true;
                return finish(StemTermination::first_spy_hit, kNoNode);
            }
            spy_hit = true;
        }
        out.path.push_back(next);

        if (!h.supports(next)) return finish(StemTermination::fluff_entry, next);
        if (!per_tx && !visited.insert(next, head)) return finish(StemTermination::loop_detected, next);
        const bool terminate = options.terminator == StemTerminator::per_hop_coin ? uniform01(rng) < options.q
                                                                                    : routing.is_diffuser(next);
        if (terminate) return finish(StemTermination::fluff_entry, next);
        if (hop >= cap) return finish(StemTermination::hop_cap, next);
        from = head;
        head = next;
    }
}

std::vector<FluffObservation> diffuse(const Tx& tx, NodeId origin, const UndirectedView& g, double start_time,
                                      const DiffusionOptions& options, Rng& rng) {
    struct Event {
        double time;
        NodeId from;
        NodeId to;
        bool operator>(const Event& o) const {
            if (time != o.time) return time > o.time;
            if (to != o.to) return to > o.to;
            return from > o.from;
        }
    };
    std::vector<FluffObservation> observed;
    const std::size_t n = g.node_count();
    std::vector<char> received(n, 0);
    std::vector<char> recorded(n, 0);
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;

    auto relay_from = [&](NodeId u, double t) {
        const bool honest = !g.is_spy(u);
        for (NodeId w : g.neighbors(u)) {
            if (received[w] && !(honest && g.is_spy(w) && !recorded[w])) continue;
            queue.push({t + exponential(rng, options.rate), u, w});
        }
    };

    received[origin] = 1;
    relay_from(origin, start_time);
    while (!queue.empty()) {
        const Event e = queue.top();
        queue.pop();
        if (g.is_spy(e.to) && !g.is_spy(e.from) && !recorded[e.to]) {
            recorded[e.to] = 1;
            observed.push_back({tx.id, e.from, e.to, e.time});
            if (options.stop_at_first_spy) break;
        }
        if (received[e.to]) continue;
        received[e.to] = 1;
        relay_from(e.to, e.time);
    }
    return observed;
}

Propagation propagate(const Tx& tx, const Digraph& h, const UndirectedView& g, Router& routing,
                      const PropagationConfig& config, Rng& rng) {
    Propagation result;
    result.stem = stem_route(tx, h, routing, config.stem, rng);
    for (const auto& s : result.stem.observations) {
        result.records.push_back(
            {tx.id, s.deliverer, s.spy, tx.created_at + s.hop * config.delta_hop, Phase::stem});
    }
    const bool caught = config.stem.stop_at_first_spy && !result.stem.observations.empty();
    if (!caught && result.stem.fluff_origin != kNoNode) {
        const double start = tx.created_at + static_cast<double>(result.stem.stem_length) * config.delta_hop;
        for (const auto& f : diffuse(tx, result.stem.fluff_origin, g, start, config.fluff, rng))
            result.records.push_back({tx.id, f.deliverer, f.spy, f.time, Phase::fluff});
    }
    return result;
}

BlackHoleOutcome simulate_black_hole(const Tx& tx, const Digraph& h, Router& routing, const StemOptions& stem,
                                     const TimerConfig& timers, DropPolicy drop_policy, Rng& rng) {
    if (!(timers.t_base > 0.0) || !(timers.delta_hop > 0.0)) {
        throw InvalidParameters("timer parameters t_base and delta_hop must be positive");
    }
    StemOptions options = stem;
    options.spies_drop = drop_policy == DropPolicy::drop_all;
    options.stop_at_first_spy = false;
    const StemOutcome route = stem_route(tx, h, routing, options, rng);

    BlackHoleOutcome out;
    out.dropped = route.termination == StemTermination::dropped;
    const std::size_t last = route.path.size() - 1;
    // The fluff origin diffuses on receipt, so only earlier relays can fire early.
    const std::size_t armed = out.dropped ? route.path.size() : last;
    out.stall_time = tx.created_at + static_cast<double>(last) * timers.delta_hop;

    double first_fire = std::numeric_limits<double>::infinity();
    std::size_t first_index = 0;
    for (std::size_t i = 0; i < armed; ++i) {
        if (!h.is_honest(route.path[i])) continue;
        ++out.relay_count;
        const double fire =
            tx.created_at + static_cast<double>(i) * timers.delta_hop + exponential(rng, 1.0 / timers.t_base);
        if (fire < first_fire) {
            first_fire = fire;
            first_index = i;
        }
    }

    out.premature = first_fire < out.stall_time;
    if (out.dropped || out.premature) {
        out.diffused = out.relay_count > 0;
        out.diffusing_index = first_index;
        out.diffusing_relay = out.diffused ? route.path[first_index] : kNoNode;
        out.diffusion_time = first_fire;
    } else {
        out.diffused = true;
        out.diffusing_index = last;
        out.diffusing_relay = route.fluff_origin;
        out.diffusion_time = out.stall_time;
    }
    out.extra_delay = out.diffusion_time - out.stall_time;
    return out;
}

}  // namespace dandelion
