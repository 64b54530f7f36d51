#include "dandelion/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "dandelion/errors.hpp"

namespace dandelion {

Digraph::Digraph(std::size_t n) : out_(n), profiles_(n) {}

Digraph::Digraph(std::size_t n, std::vector<NodeProfile> profiles) : out_(n), profiles_(std::move(profiles)) {
    if (profiles_.size() != n) {
        throw InvalidParameters("profile count " + std::to_string(profiles_.size()) + " != node count " +
                                std::to_string(n));
    }
}

std::size_t Digraph::edge_count() const noexcept {
    std::size_t total = 0;
    for (const auto& targets : out_) total += targets.size();
    return total;
}

bool Digraph::has_edge(NodeId from, NodeId to) const {
    const auto& targets = out_[from];
    return std::find(targets.begin(), targets.end(), to) != targets.end();
}

void Digraph::add_edge(NodeId from, NodeId to) {
    if (from >= node_count() || to >= node_count()) throw InvalidParameters("edge endpoint out of range");
    if (from == to) throw InvalidParameters("self-loop at node " + std::to_string(from));
    if (has_edge(from, to)) {
        throw InvalidParameters("duplicate edge " + std::to_string(from) + "->" + std::to_string(to));
    }
    out_[from].push_back(to);
}

void Digraph::set_out(NodeId v, std::vector<NodeId> targets) {
    out_[v].clear();
    out_[v].reserve(targets.size());
    for (NodeId t : targets) add_edge(v, t);
}

void Digraph::set_profiles(std::vector<NodeProfile> profiles) {
    if (profiles.size() != node_count()) throw InvalidParameters("profile count mismatch");
    profiles_ = std::move(profiles);
}

std::vector<NodeId> Digraph::honest_nodes() const {
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < node_count(); ++v)
        if (is_honest(v)) nodes.push_back(v);
    return nodes;
}

std::vector<NodeId> Digraph::spy_nodes() const {
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < node_count(); ++v)
        if (is_spy(v)) nodes.push_back(v);
    return nodes;
}

std::vector<std::vector<NodeId>> Digraph::in_adjacency() const {
    std::vector<std::vector<NodeId>> in(node_count());
    for (NodeId v = 0; v < node_count(); ++v)
        for (NodeId t : out_[v]) in[t].push_back(v);
    // sources are visited in increasing order, so each list is already sorted
    return in;
}

void Digraph::validate() const {
    if (profiles_.size() != out_.size()) throw InvalidParameters("profile count mismatch");
    for (NodeId v = 0; v < node_count(); ++v) {
        std::vector<NodeId> sorted(out_[v]);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidParameters("duplicate edge at node " + std::to_string(v));
        for (NodeId t : sorted) {
            if (t >= node_count()) throw InvalidParameters("edge target out of range at node " + std::to_string(v));
            if (t == v) throw InvalidParameters("self-loop at node " + std::to_string(v));
        }
    }
}

UndirectedView::UndirectedView(const Digraph& g)
    : offsets_(g.node_count() + 1, 0), profiles_(g.profiles().begin(), g.profiles().end()) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId v = 0; v < n; ++v) {
        for (NodeId t : g.out(v)) {
            adj[v].push_back(t);
            adj[t].push_back(v);
        }
    }
    for (NodeId v = 0; v < n; ++v) {
        auto& a = adj[v];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        offsets_[v + 1] = offsets_[v] + a.size();
    }
    targets_.reserve(offsets_[n]);
    for (const auto& a : adj) targets_.insert(targets_.end(), a.begin(), a.end());
}

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::approx_regular: return "approx-regular";
        case TopologyKind::exact_regular: return "exact-regular";
        case TopologyKind::line_cycle: return "line-cycle";
        case TopologyKind::approx_4_regular: return "approx-4-regular";
    }
    return "unknown";
}

std::string_view to_string(DeploymentMode mode) {
    switch (mode) {
        case DeploymentMode::full: return "full";
        case DeploymentMode::version_checking: return "version-checking";
        case DeploymentMode::no_version_checking: return "no-version-checking";
    }
    return "unknown";
}

TopologyKind parse_topology(std::string_view s) {
    if (s == "approx-regular") return TopologyKind::approx_regular;
    if (s == "exact-regular" || s == "exact-d-regular") return TopologyKind::exact_regular;
    if (s == "line-cycle" || s == "line") return TopologyKind::line_cycle;
    if (s == "approx-4-regular" || s == "approx4") return TopologyKind::approx_4_regular;
    throw InvalidParameters("unknown topology '" + std::string(s) + "'");
}

DeploymentMode parse_deployment(std::string_view s) {
    if (s == "full") return DeploymentMode::full;
    if (s == "version-checking") return DeploymentMode::version_checking;
    if (s == "no-version-checking") return DeploymentMode::no_version_checking;
    throw InvalidParameters("unknown deployment mode '" + std::string(s) + "'");
}

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

RoleCounts role_counts(std::size_t n, double p, double beta) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameters("spy fraction p must lie in [0,1]");
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameters("support fraction beta must lie in [0,1]");
    RoleCounts counts;
    counts.spies = std::min(n, round_half_up(p * static_cast<double>(n)));
    counts.honest_supporters =
        std::min(n - counts.spies, round_half_up(beta * (1.0 - p) * static_cast<double>(n)));
    return counts;
}

std::vector<NodeProfile> sample_profiles(std::size_t n, double p, double beta, Rng& rng) {
    const RoleCounts counts = role_counts(n, p, beta);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<NodeProfile> profiles(n, NodeProfile{Role::honest, false});
    for (std::size_t i = 0; i < n; ++i) {
        NodeProfile& prof = profiles[order[i]];
        if (i < counts.spies) {
            prof = {Role::spy, true};
        } else if (i < counts.spies + counts.honest_supporters) {
            prof = {Role::honest, true};
        }
    }
    return profiles;
}

namespace {

// k distinct values from [0, n) excluding `self`, uniformly without replacement.
std::vector<NodeId> sample_targets(std::size_t n, NodeId self, std::size_t k, Rng& rng) {
    std::vector<NodeId> picked;
    picked.reserve(k);
    if (k * 4 < n) {
        while (picked.size() < k) {
            const auto t = static_cast<NodeId>(uniform_index(rng, n));
            if (t == self || std::find(picked.begin(), picked.end(), t) != picked.end()) continue;
            picked.push_back(t);
        }
        return picked;
    }
    std::vector<NodeId> pool;
    pool.reserve(n - 1);
    for (NodeId t = 0; t < n; ++t)
        if (t != self) pool.push_back(t);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

// k elements of `from` uniformly without replacement.
std::vector<NodeId> sample_subset(std::span<const NodeId> from, std::size_t k, Rng& rng) {
    std::vector<NodeId> pool(from.begin(), from.end());
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::vector<NodeId> random_derangement(std::size_t n, Rng& rng) {
    std::vector<NodeId> perm(n);
    for (;;) {
        std::iota(perm.begin(), perm.end(), NodeId{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        bool fixed = false;
        for (NodeId v = 0; v < n && !fixed; ++v) fixed = perm[v] == v;
        if (!fixed) return perm;
    }
}

}  // namespace

Digraph gen_p2p_approx_regular(std::size_t n, std::size_t eta, Rng& rng) {
    if (eta < 1 || n < eta + 1) {
        throw InvalidParameters("approx-regular graph needs eta >= 1 and n >= eta + 1 (n=" + std::to_string(n) +
                                ", eta=" + std::to_string(eta) + ")");
    }
    Digraph g(n);
    for (NodeId v = 0; v < n; ++v) g.set_out(v, sample_targets(n, v, eta, rng));
    return g;
}

Digraph gen_exact_d_regular(std::size_t n, std::size_t d, Rng& rng, std::size_t max_resamples) {
    if (d < 2 || d % 2 != 0) throw InvalidParameters("exact regular degree d must be even and >= 2");
    if (d > n - 1 || n < 2) throw InvalidParameters("exact regular degree d must satisfy d <= n - 1");
    const std::size_t layers = d / 2;
    std::vector<std::vector<NodeId>> succ(layers);
    for (std::size_t layer = 0; layer < layers; ++layer) {
        std::size_t attempts = 0;
        for (;;) {
            if (attempts++ >= max_resamples) {
                throw ResamplingExhausted("could not place permutation layer " + std::to_string(layer) +
                                          " without duplicate edges (n=" + std::to_string(n) + ", d=" +
                                          std::to_string(d) + ")");
            }
            auto perm = random_derangement(n, rng);
            bool collision = false;
            for (std::size_t prev = 0; prev < layer && !collision; ++prev)
                for (NodeId v = 0; v < n && !collision; ++v) collision = succ[prev][v] == perm[v];
            if (!collision) {
                succ[layer] = std::move(perm);
                break;
            }
        }
    }
    Digraph g(n);
    for (NodeId v = 0; v < n; ++v) {
        std::vector<NodeId> targets(layers);
        for (std::size_t layer = 0; layer < layers; ++layer) targets[layer] = succ[layer][v];
        g.set_out(v, std::move(targets));
    }
    return g;
}

Digraph gen_line_cycle(std::size_t n, Rng& rng) {
    if (n < 2) throw InvalidParameters("line-cycle needs n >= 2");
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    Digraph g(n);
    for (std::size_t i = 0; i < n; ++i) g.add_edge(order[i], order[(i + 1) % n]);
    return g;
}

Digraph gen_anonymity_approx4(std::span<const NodeProfile> profiles, Rng& rng) {
    const std::size_t n = profiles.size();
    if (n < 3) throw InvalidParameters("approximate 4-regular graph needs n >= 3");
    Digraph h(n, std::vector<NodeProfile>(profiles.begin(), profiles.end()));
    for (NodeId v = 0; v < n; ++v) h.set_out(v, sample_targets(n, v, 2, rng));
    return h;
}

Digraph embed_partial_deployment(const Digraph& g, DeploymentMode mode, std::size_t d, Rng& rng) {
    if (d < 2 || d % 2 != 0) throw InvalidParameters("anonymity degree d must be even and >= 2");
    const std::size_t half = d / 2;
    Digraph h(g.node_count(), std::vector<NodeProfile>(g.profiles().begin(), g.profiles().end()));
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto out = g.out(v);
        if (out.size() < half) {
            throw InvalidParameters("node " + std::to_string(v) + " has " + std::to_string(out.size()) +
                                    " outbound edges, fewer than d/2 = " + std::to_string(half));
        }
        if (mode == DeploymentMode::version_checking) {
            std::vector<NodeId> supporters;
            for (NodeId t : out)
                if (g.supports(t)) supporters.push_back(t);
            if (supporters.empty()) {
                h.set_out(v, sample_subset(out, half, rng));
            } else if (supporters.size() < half) {
                h.set_out(v, std::move(supporters));
            } else {
                h.set_out(v, sample_subset(supporters, half, rng));
            }
        } else {
            h.set_out(v, sample_subset(out, half, rng));
        }
    }
    return h;
}

Digraph apply_supernode_edges(const Digraph& h) {
    Digraph out = h;
    const auto honest = h.honest_nodes();
    for (NodeId v = 0; v < h.node_count(); ++v)
        if (h.is_spy(v)) out.set_out(v, honest);
    return out;
}

std::optional<std::size_t> shortest_path_hops(const Digraph& h, NodeId u, NodeId v) {
    if (u >= h.node_count() || v >= h.node_count()) throw InvalidParameters("node id out of range");
    if (u == v) return 0;
    std::vector<int> dist(h.node_count(), kUnreachable);
    std::deque<NodeId> queue{u};
    dist[u] = 0;
    while (!queue.empty()) {
        const NodeId x = queue.front();
        queue.pop_front();
        for (NodeId t : h.out(x)) {
            if (dist[t] != kUnreachable) continue;
            dist[t] = dist[x] + 1;
            if (t == v) return static_cast<std::size_t>(dist[t]);
            queue.push_back(t);
        }
    }
    return std::nullopt;
}

std::vector<int> honest_distances_to(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                     NodeId target) {
    std::vector<int> dist(h.node_count(), kUnreachable);
    std::deque<NodeId> queue{target};
    dist[target] = 0;
    while (!queue.empty()) {
        const NodeId x = queue.front();
        queue.pop_front();
        if (x != target && !h.is_honest(x)) continue;
        for (NodeId w : in_adj[x]) {
            if (dist[w] != kUnreachable) continue;
            dist[w] = dist[x] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

}  // namespace dandelion
