#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dandelion/protocol.hpp"
#include "dandelion/topology.hpp"

namespace dandelion {

enum class EstimatorKind { first_spy, matching, routing_aware, intersection };
enum class ExperimentKind { dissemination, black_hole };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(ExperimentKind kind);
EstimatorKind parse_estimator(std::string_view s);
ExperimentKind parse_experiment_kind(std::string_view s);

struct ExperimentConfig {
    std::string experiment = "run";
    ExperimentKind kind = ExperimentKind::dissemination;
    std::size_t n = 100;
    std::size_t eta = 8;
    std::size_t d = 4;
    double p = 0.1;
    double q = 0.0;
    double beta = 1.0;
    std::size_t m = 1;
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    TopologyKind topology = TopologyKind::exact_regular;
    DeploymentMode mode = DeploymentMode::full;
    ForwardingScheme scheme = ForwardingScheme::per_transaction;
    EstimatorKind estimator = EstimatorKind::first_spy;
    StemTerminator terminator = StemTerminator::per_hop_coin;
    bool supernode = false;
    bool graph_known = false;
    bool routing_known = false;
    bool stem_only = false;         // ignore fluff-phase sightings
    bool full_propagation = false;  // keep spreading past the first spy
    double diffusion_rate = 1.0;
    double delta_hop = 0.3;
    std::size_t training = 2000;
    // black-hole experiments
    std::size_t k = 10;
    double epsilon = 0.1;
    double t_base = 0.0;  // 0 selects timer_threshold(k, delta_hop, epsilon)
    DropPolicy drop_policy = DropPolicy::drop_all;
    std::string out = "results";
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Set one `key = value` field; ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

// Flat `key = value` lines; `#` starts a comment.
Overrides parse_config_text(std::string_view text, const std::string& origin);
Overrides read_config_file(const std::string& path);

const std::vector<std::string>& config_keys();

// Knowledge flags follow from the estimator; then range checks (ConfigError).
void normalize(ExperimentConfig& config);
void validate(const ExperimentConfig& config);

}  // namespace dandelion
