#pragma once

// Precision/recall metrics and closed-form anonymity bounds, with Monte Carlo
// counterparts for the ward-size distributions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dandelion/adversary.hpp"
#include "dandelion/rng.hpp"
#include "dandelion/topology.hpp"

namespace dandelion {

struct PrecisionRecallReport {
    std::vector<NodeId> nodes;
    std::vector<double> precision;  // D(v), aligned with nodes
    std::vector<double> recall;     // R(v)
    double avg_precision = 0.0;
    double avg_recall = 0.0;
    std::size_t assigned = 0;
    std::size_t unassigned = 0;
};

// D(v) = correct / accused-to-v (0 if nothing maps to v); R(v) = fraction of v's
// own transactions mapped to v (0 if v created none). Averages run over `nodes`.
PrecisionRecallReport precision_recall(const Mapping& mapping, std::span<const NodeId> truth,
                                       std::span<const NodeId> nodes);

// (precision floor p^2, recall floor p)
std::pair<double, double> fundamental_bounds(double p);

// 2p^2/(1-p) ln((1+p)/(2p)); limits 0 at p=0 and 1 at p=1 raise DomainError.
double oto_first_spy_precision(double p);

enum class WardScheme { one_to_one, all_to_one };

double ward_pmf(WardScheme scheme, std::size_t w, double p);
double ward_log_pmf(WardScheme scheme, std::size_t w, double p);

// Closed-form pmf on 1..max_w where max_w is the first size with remaining tail
// mass < tail (index 0 unused).
std::vector<double> ward_pmf_table(WardScheme scheme, double p, double tail = 1e-12);

// Empirical |W_v| pmf (index = ward size, index 0 unused).
std::vector<double> simulate_ward_size(WardScheme scheme, double p, std::size_t trials, Rng& rng);

double total_variation(std::span<const double> a, std::span<const double> b);

// Leading-order (p/4, e^2/(2 pi) p).
std::pair<double, double> ato_precision_bounds(double p);

struct MatchingBounds {
    double lower = 0.0;
    double upper = 0.0;  // clamped to 1
    double upper_raw = 0.0;
};

MatchingBounds matching_precision_bounds(double p);

struct OptimalPrecisionCheck {
    bool passed = false;
    double margin = 0.0;  // bound - measured
};

OptimalPrecisionCheck optimal_precision_check(double d_opt, double d_fs, double p, double slack = 0.0);

double timer_threshold(std::size_t k, double delta_hop, double epsilon);
double expected_extra_delay(double t_base, std::size_t k);

struct PartialDeploymentBounds {
    double f = 0.0;
    double phi = 0.0;
    double zeta = 0.0;
    double c = 0.0;
    double lower = 0.0;
    double upper = 0.0;          // asymptotic upper
    double refined_upper = 0.0;  // q-dependent asymptotic upper (version-checking)
    double finite_upper = 0.0;   // finite-n upper used for comparisons with simulation
};

PartialDeploymentBounds partial_deployment_recall_bounds(std::size_t n, double p, double beta, double q,
                                                         std::size_t eta, DeploymentMode mode);

struct BoundsParameters {
    double p = 0.2;
    double q = 0.2;
    std::size_t n = 1000;
    std::size_t eta = 8;
    double beta = 1.0;
    std::size_t k = 10;
    double epsilon = 0.1;
    double delta_hop = 0.3;
    double t_base = 0.0;  // 0 selects timer_threshold(k, delta_hop, epsilon)
};

struct BoundsReport {
    BoundsParameters params;
    std::vector<std::pair<std::string, double>> values;

    double at(const std::string& name) const;
};

// Every closed form at one parameter point, parameters echoed first.
BoundsReport bounds_report(const BoundsParameters& params);

}  // namespace dandelion
