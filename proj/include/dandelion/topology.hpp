#pragma once

// Graph families for stem/fluff simulation: the P2P graph G, anonymity graphs H,
// exact regular baselines, partial-deployment embeddings and supernode rewiring.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dandelion/rng.hpp"

namespace dandelion {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class Role : std::uint8_t { honest, spy };

struct NodeProfile {
    Role role = Role::honest;
    bool supports_protocol = true;

    friend bool operator==(const NodeProfile&, const NodeProfile&) = default;
};

// Directed graph with per-node roles. Out-adjacency lists keep insertion order.
class Digraph {
  public:
    Digraph() = default;
    explicit Digraph(std::size_t n);
    Digraph(std::size_t n, std::vector<NodeProfile> profiles);

    std::size_t node_count() const noexcept { return out_.size(); }
    std::size_t edge_count() const noexcept;

    std::span<const NodeId> out(NodeId v) const { return out_[v]; }
    std::size_t out_degree(NodeId v) const { return out_[v].size(); }
    bool has_edge(NodeId from, NodeId to) const;

    // Throws InvalidParameters on self-loops, duplicates or out-of-range targets.
    void add_edge(NodeId from, NodeId to);
    void set_out(NodeId v, std::vector<NodeId> targets);

    const NodeProfile& profile(NodeId v) const { return profiles_[v]; }
    std::span<const NodeProfile> profiles() const noexcept { return profiles_; }
    void set_profile(NodeId v, NodeProfile p) { profiles_[v] = p; }
    void set_profiles(std::vector<NodeProfile> profiles);

    bool is_spy(NodeId v) const { return profiles_[v].role == Role::spy; }
    bool is_honest(NodeId v) const { return profiles_[v].role == Role::honest; }
    bool supports(NodeId v) const { return profiles_[v].supports_protocol; }

    std::vector<NodeId> honest_nodes() const;
    std::vector<NodeId> spy_nodes() const;

    // In-neighbors of every node, each list sorted ascending.
    std::vector<std::vector<NodeId>> in_adjacency() const;

    void validate() const;

    friend bool operator==(const Digraph&, const Digraph&) = default;

  private:
    std::vector<std::vector<NodeId>> out_;
    std::vector<NodeProfile> profiles_;
};

// Compressed undirected view used for diffusion (union of in and out edges).
class UndirectedView {
  public:
    UndirectedView() = default;
    explicit UndirectedView(const Digraph& g);

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::span<const NodeId> neighbors(NodeId v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::span<const NodeProfile> profiles() const noexcept { return profiles_; }
    bool is_spy(NodeId v) const { return profiles_[v].role == Role::spy; }

  private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
    std::vector<NodeProfile> profiles_;
};

enum class TopologyKind { approx_regular, exact_regular, line_cycle, approx_4_regular };
enum class DeploymentMode { full, version_checking, no_version_checking };

std::string_view to_string(TopologyKind kind);
std::string_view to_string(DeploymentMode mode);
TopologyKind parse_topology(std::string_view s);
DeploymentMode parse_deployment(std::string_view s);

struct RoleCounts {
    std::size_t spies = 0;
    std::size_t honest_supporters = 0;
};

// Nearest integer, ties rounded up.
std::size_t round_half_up(double x);

// spies = round(p n); supporters among honest = round(beta (1 - p) n), capped at honest count.
RoleCounts role_counts(std::size_t n, double p, double beta);

// Uniform spy subset and uniform supporter subset among the honest nodes.
// Spies always support the protocol.
std::vector<NodeProfile> sample_profiles(std::size_t n, double p, double beta, Rng& rng);

// Each node opens eta distinct outbound connections to uniform non-self targets.
Digraph gen_p2p_approx_regular(std::size_t n, std::size_t eta, Rng& rng);

// Superposition of d/2 random derangements; in- and out-degree d/2 at every node.
Digraph gen_exact_d_regular(std::size_t n, std::size_t d, Rng& rng, std::size_t max_resamples = 10000);

// Single directed Hamiltonian cycle over a random node order.
Digraph gen_line_cycle(std::size_t n, Rng& rng);

// Every node picks two distinct uniform targets other than itself.
Digraph gen_anonymity_approx4(std::span<const NodeProfile> profiles, Rng& rng);

// Anonymity graph with out-degree up to d/2 embedded in the out-edges of g.
Digraph embed_partial_deployment(const Digraph& g, DeploymentMode mode, std::size_t d, Rng& rng);

// Spies connect outbound to every honest node; honest adjacency is untouched.
Digraph apply_supernode_edges(const Digraph& h);

// Directed BFS distance; nullopt when v is unreachable from u.
std::optional<std::size_t> shortest_path_hops(const Digraph& h, NodeId u, NodeId v);

inline constexpr int kUnreachable = -1;

// Distance from every node to target where all intermediate relays are honest
// (the source itself may be anything). kUnreachable when no such path exists.
std::vector<int> honest_distances_to(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                     NodeId target);

}  // namespace dandelion
