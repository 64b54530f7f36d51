#pragma once

// Source estimators over the adversary's observation log: first-spy,
// shortest-path matching (graph known), routing-aware matching (relay maps
// known) and the first-spy signature intersection attack.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dandelion/observation.hpp"
#include "dandelion/parallel.hpp"
#include "dandelion/protocol.hpp"
#include "dandelion/topology.hpp"

namespace dandelion {

// Transaction -> accused honest node; kNoNode marks an unassigned transaction.
struct Mapping {
    std::vector<NodeId> accused;

    Mapping() = default;
    explicit Mapping(std::size_t tx_count) : accused(tx_count, kNoNode) {}

    std::size_t size() const noexcept { return accused.size(); }
    bool assigned(TxId tx) const { return accused[tx] != kNoNode; }
    std::size_t assigned_count() const;

    friend bool operator==(const Mapping&, const Mapping&) = default;
};

// Accuse the deliverer of each transaction's earliest record.
Mapping first_spy_estimate(ObservationLog& log, std::size_t tx_count);

// Max-likelihood assignment under shortest-path likelihoods
// ((1-q)/outdeg)^(h-1) * (1/outdeg) from each honest candidate to the first spy,
// entering it over the observed deliverer edge when that edge is in H.
// Falls back to first-spy when every weight is zero.
Mapping matching_estimate(ObservationLog& log, const Digraph& h, double q, std::size_t tx_count);

// Like matching_estimate, but candidate scores follow the known deterministic
// relay maps from each of the candidate's out-edges to the observed spy edge.
Mapping routing_aware_estimate(ObservationLog& log, const Digraph& h, const EpochRouting& routing, double q,
                               std::size_t tx_count);

// Log-likelihood that a transaction created at each node reaches `spy` first via
// a shortest path of honest protocol-supporting relays; kForbidden if impossible.
// With a deliverer, paths must enter the spy over the edge deliverer -> spy.
std::vector<double> shortest_path_log_likelihood(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                                 NodeId spy, double q, NodeId deliverer = kNoNode);

// Log-likelihood that a transaction created at each node ends its stem at
// `origin` and starts diffusion there.
std::vector<double> fluff_origin_log_likelihood(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                                NodeId origin, double q);

struct SignatureTable {
    std::vector<NodeId> candidates;
    std::vector<NodeId> spies;
    std::vector<double> pmf;  // candidates x spies, row-major
    std::size_t training_count = 0;
    double epsilon = 0.0;

    std::span<const double> signature(std::size_t candidate_index) const {
        return {pmf.data() + candidate_index * spies.size(), spies.size()};
    }
    std::size_t spy_index(NodeId spy) const;
};

// For each honest candidate, simulate `simulations` transactions (fresh routing
// per transaction for pseudorandom schemes) and record the first spy. Signatures
// use add-epsilon smoothing with epsilon = 1 / (simulations * spy count).
SignatureTable train_signatures(const Digraph& h, const UndirectedView& g, const PropagationConfig& config,
                                ForwardingScheme scheme, std::size_t simulations, std::uint64_t seed,
                                ExecutionPolicy policy = ExecutionPolicy::serial);

struct Classification {
    NodeId accused = kNoNode;
    bool random_guess = false;
    double divergence = 0.0;
};

// argmin over candidates of KL(smoothed histogram || signature); ties go to the
// lowest candidate index. An empty histogram yields a uniform random accusation.
Classification intersection_classify(std::span<const std::uint32_t> histogram, const SignatureTable& table,
                                     Rng& rng);

// First-spy histogram (indexed like `spies`) of each source's linked transactions.
std::vector<std::vector<std::uint32_t>> per_source_histograms(ObservationLog& log, std::span<const NodeId> truth,
                                                              std::span<const NodeId> sources,
                                                              std::span<const NodeId> spies);

}  // namespace dandelion
