#pragma once

// Monte Carlo driver: one trial builds fresh graphs and routing, spreads m
// transactions per honest node, runs the configured estimator and scores it.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dandelion/config.hpp"
#include "dandelion/parallel.hpp"
#include "dandelion/topology.hpp"

namespace dandelion {

struct TrialRow {
    std::string experiment;
    std::string topology;
    std::size_t n = 0;
    std::size_t eta = 0;
    std::size_t d = 0;
    double p = 0.0;
    double q = 0.0;
    double beta = 0.0;
    std::string scheme;
    std::string estimator;
    std::string mode;
    std::size_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double avg_precision = 0.0;
    double avg_recall = 0.0;
    std::vector<std::pair<std::string, double>> aux;

    std::optional<double> find_aux(const std::string& key) const;
};

struct TrialGraphs {
    Digraph h;                // anonymity graph
    std::optional<Digraph> g; // P2P graph when it differs from h

    const Digraph& p2p() const { return g ? *g : h; }
};

// Roles are sampled first, then the topology; supernode rewiring applies to both graphs.
TrialGraphs build_graphs(const ExperimentConfig& config, Rng& rng);

// k honest relays 0 -> 1 -> ... -> k-1 followed by a single spy k.
Digraph black_hole_line(std::size_t k);

TrialRow run_trial(const ExperimentConfig& config, std::size_t trial);

// Validates, then runs every trial; rows are ordered by trial index whatever the policy.
std::vector<TrialRow> run_experiment(ExperimentConfig config,
                                     ExecutionPolicy policy = ExecutionPolicy::parallel);

}  // namespace dandelion
