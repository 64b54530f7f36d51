#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dandelion/topology.hpp"

namespace dandelion::testing {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    if (xs.empty()) return r;
    for (double x : xs) r.mean += x;
    r.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    return r;
}

// Pearson statistic against expected counts; true when it stays below the
// (1 - alpha) quantile.
inline bool chi_square_passes(std::span<const double> observed, std::span<const double> expected, double alpha) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return stat < boost::math::quantile(boost::math::complement(dist, alpha));
}

inline Digraph from_edges(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
    Digraph g(n);
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    return g;
}

inline void make_spy(Digraph& g, NodeId v) { g.set_profile(v, {Role::spy, true}); }

}  // namespace dandelion::testing
