#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "doctest.h"

#include "dandelion/adversary.hpp"
#include "dandelion/analytics.hpp"
#include "dandelion/assignment.hpp"
#include "test_util.hpp"

using namespace dandelion;
using namespace dandelion::testing;

namespace {

// Shortest walk length from x into `target` through honest supporting relays,
// optionally forcing the last edge to start at `last`; exhaustive DFS.
std::optional<std::size_t> brute_hops(const Digraph& h, NodeId x, NodeId target, NodeId last = kNoNode) {
    std::optional<std::size_t> best;
    std::vector<bool> seen(h.node_count(), false);
    std::function<void(NodeId, std::size_t)> walk = [&](NodeId at, std::size_t len) {
        for (NodeId y : h.out(at)) {
            if (y == target) {
                if ((last == kNoNode || at == last) && (!best || len + 1 < *best)) best = len + 1;
                continue;
            }
            if (seen[y] || !h.is_honest(y) || !h.supports(y)) continue;
            seen[y] = true;
            walk(y, len + 1);
            seen[y] = false;
        }
    };
    seen[x] = true;
    walk(x, 0);
    return best;
}

Digraph random_regular_with_spies(std::size_t n, double p, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    auto h = gen_exact_d_regular(n, 4, rng);
    h.set_profiles(sample_profiles(n, p, 1.0, rng));
    return h;
}

}  // namespace

TEST_CASE("first-spy estimator") {
    SUBCASE("source caught at hop 1") {
        ObservationLog log;
        log.add({0, 4, 7, 0.3, Phase::stem});
        const auto m = first_spy_estimate(log, 2);
        CHECK(m.accused[0] == 4);
        CHECK_FALSE(m.assigned(1));
        std::vector<NodeId> truth{4, 5};
        std::vector<NodeId> nodes{4, 5};
        const auto report = precision_recall(m, truth, nodes);
        CHECK(report.recall[0] == 1.0);
        CHECK(report.unassigned == 1);
    }
    SUBCASE("earlier record wins") {
        ObservationLog log;
        log.add({0, 2, 9, 4.1, Phase::fluff});
        log.add({0, 3, 8, 3.2, Phase::stem});
        CHECK(first_spy_estimate(log, 1).accused[0] == 3);
    }
    SUBCASE("ties go to the lowest deliverer") {
        ObservationLog log;
        log.add({0, 6, 9, 1.0, Phase::fluff});
        log.add({0, 2, 8, 1.0, Phase::fluff});
        CHECK(first_spy_estimate(log, 1).accused[0] == 2);
    }
}

TEST_CASE("shortest-path likelihood agrees with exhaustive paths") {
    const double q = 0.2;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto h = random_regular_with_spies(8, 0.25, seed);
        const auto in = h.in_adjacency();
        for (NodeId spy : h.spy_nodes()) {
            const auto ll = shortest_path_log_likelihood(h, in, spy, q);
            for (NodeId x : h.honest_nodes()) {
                const auto hops = brute_hops(h, x, spy);
                if (!hops) {
                    CHECK(ll[x] == kForbidden);
                    continue;
                }
                const double expect = (static_cast<double>(*hops) - 1.0) * std::log((1 - q) / 2.0) + std::log(0.5);
                CHECK(ll[x] == doctest::Approx(expect).epsilon(1e-12));
            }
            for (NodeId w : in[spy]) {
                if (!h.is_honest(w)) continue;
                const auto via = shortest_path_log_likelihood(h, in, spy, q, w);
                for (NodeId x : h.honest_nodes()) {
                    const auto hops = brute_hops(h, x, spy, w);
                    if (!hops) {
                        CHECK(via[x] == kForbidden);
                        continue;
                    }
                    const double expect = (static_cast<double>(*hops) - 1.0) * std::log((1 - q) / 2.0) + std::log(0.5);
                    CHECK(via[x] == doctest::Approx(expect).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("fluff-origin likelihood") {
    const double q = 0.3;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto h = random_regular_with_spies(8, 0.25, seed);
        const auto in = h.in_adjacency();
        for (NodeId origin : h.honest_nodes()) {
            const auto ll = fluff_origin_log_likelihood(h, in, origin, q);
            CHECK(ll[origin] == kForbidden);  // sources always take one stem hop
            for (NodeId x : h.honest_nodes()) {
                if (x == origin) continue;
                const auto hops = brute_hops(h, x, origin);
                if (!hops) {
                    CHECK(ll[x] == kForbidden);
                    continue;
                }
                const double expect =
                    std::log(q) + (static_cast<double>(*hops) - 1.0) * std::log((1 - q) / 2.0) + std::log(0.5);
                CHECK(ll[x] == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("matching estimator") {
    SUBCASE("single honest in-neighbor of the spy") {
        // only 1 reaches spy 2; 0 and 3 circle among themselves
        auto h = from_edges(4, {{0, 3}, {3, 0}, {1, 2}, {2, 0}});
        make_spy(h, 2);
        ObservationLog log;
        log.add({0, 1, 2, 0.6, Phase::stem});
        const auto m = matching_estimate(log, h, 0.0, 1);
        CHECK(m.accused[0] == 1);
    }
    SUBCASE("all-zero weights fall back to first spy") {
        auto h = from_edges(3, {{0, 1}, {1, 0}, {2, 0}});
        make_spy(h, 2);
        ObservationLog log;
        log.add({0, 1, 2, 0.6, Phase::stem});  // no edge 1 -> 2 and 2 has no honest in-neighbor
        CHECK(matching_estimate(log, h, 0.0, 1).accused[0] == 1);
    }
    SUBCASE("accusations stay honest") {
        const auto h = random_regular_with_spies(60, 0.2, 3);
        Rng rng = make_rng(3);
        auto r = sample_epoch_routing(h, ForwardingScheme::per_transaction, 0, rng);
        ObservationLog log;
        PropagationConfig pc;
        pc.stem.q = 0.0;
        const auto sources = h.honest_nodes();
        for (std::size_t i = 0; i < sources.size(); ++i)
            log.append(propagate(Tx{TxId(i), sources[i], 0, 0.0}, h, UndirectedView(h), r, pc, rng).records);
        const auto m = matching_estimate(log, h, 0.0, sources.size());
        for (NodeId v : m.accused)
            if (v != kNoNode) CHECK(h.is_honest(v));
    }
}

TEST_CASE("routing-aware estimator") {
    SUBCASE("equals matching on line graphs") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng = make_rng(seed);
            auto h = gen_line_cycle(40, rng);
            h.set_profiles(sample_profiles(40, 0.2, 1.0, rng));
            auto r = sample_epoch_routing(h, ForwardingScheme::one_to_one, 0, rng);
            ObservationLog log;
            PropagationConfig pc;
            pc.stem.q = 0.0;
            const auto sources = h.honest_nodes();
            for (std::size_t i = 0; i < sources.size(); ++i)
                log.append(propagate(Tx{TxId(i), sources[i], 0, 0.0}, h, UndirectedView(h), r, pc, rng).records);
            ObservationLog copy = log;
            CHECK(routing_aware_estimate(log, h, r, 0.0, sources.size()) == matching_estimate(copy, h, 0.0, sources.size()));
        }
    }
    SUBCASE("own edge straight into the spy wins") {
        // 0 -> 2(spy) directly; 1 -> 0 relays to 2 as well but one hop further
        auto h = from_edges(3, {{0, 2}, {1, 0}, {2, 1}});
        make_spy(h, 2);
        Rng rng = make_rng(1);
        auto r = sample_epoch_routing(h, ForwardingScheme::one_to_one, 0, rng);
        ObservationLog log;
        log.add({0, 0, 2, 0.3, Phase::stem});
        CHECK(routing_aware_estimate(log, h, r, 0.5, 1).accused[0] == 0);
    }
}

TEST_CASE("signature training") {
    SUBCASE("every path hits one spy") {
        auto h = from_edges(4, {{0, 1}, {1, 3}, {3, 0}, {2, 0}, {0, 2}});
        make_spy(h, 3);
        make_spy(h, 2);
        // node 1 can only reach spy 3
        PropagationConfig pc;
        pc.stem.q = 0.0;
        const auto table = train_signatures(h, UndirectedView(h), pc, ForwardingScheme::per_transaction, 500, 1);
        const auto idx = std::find(table.candidates.begin(), table.candidates.end(), NodeId{1}) - table.candidates.begin();
        const auto sig = table.signature(static_cast<std::size_t>(idx));
        CHECK(sig[table.spy_index(3)] >= 1.0 - 2 * table.epsilon);
    }
    SUBCASE("matches the exact first-spy distribution on 8 nodes") {
        const auto h = random_regular_with_spies(8, 0.25, 5);
        const auto spies = h.spy_nodes();
        // Absorbing chain: honest nodes forward uniformly; spies absorb.
        std::vector<std::vector<double>> absorb(8, std::vector<double>(spies.size(), 0.0));
        for (int iter = 0; iter < 5000; ++iter) {
            auto next = absorb;
            for (NodeId v : h.honest_nodes()) {
                std::fill(next[v].begin(), next[v].end(), 0.0);
                for (NodeId w : h.out(v)) {
                    const double share = 1.0 / static_cast<double>(h.out_degree(v));
                    if (h.is_spy(w)) {
                        const auto k = std::find(spies.begin(), spies.end(), w) - spies.begin();
                        next[v][static_cast<std::size_t>(k)] += share;
                    } else {
                        for (std::size_t k = 0; k < spies.size(); ++k) next[v][k] += share * absorb[w][k];
                    }
                }
            }
            absorb = next;
        }
        PropagationConfig pc;
        pc.stem.q = 0.0;
        const auto table = train_signatures(h, UndirectedView(h), pc, ForwardingScheme::per_transaction, 20000, 2);
        for (std::size_t c = 0; c < table.candidates.size(); ++c) {
            const auto sig = table.signature(c);
            const NodeId v = table.candidates[c];
            double mass = 0.0;
            for (double x : absorb[v]) mass += x;
            if (mass < 0.999) continue;  // spies unreachable from v
            CHECK(total_variation(sig, absorb[v]) < 0.05);
        }
    }
    SUBCASE("serial and parallel training agree") {
        const auto h = random_regular_with_spies(60, 0.2, 8);
        PropagationConfig pc;
        pc.stem.q = 0.1;
        const auto a = train_signatures(h, UndirectedView(h), pc, ForwardingScheme::one_to_one, 200, 3, ExecutionPolicy::serial);
        const auto b = train_signatures(h, UndirectedView(h), pc, ForwardingScheme::one_to_one, 200, 3, ExecutionPolicy::parallel);
        CHECK(a.pmf == b.pmf);
    }
    SUBCASE("smoothed signatures sum to one") {
        const auto h = random_regular_with_spies(40, 0.2, 9);
        PropagationConfig pc;
        pc.stem.q = 0.0;
        const auto t = train_signatures(h, UndirectedView(h), pc, ForwardingScheme::per_transaction, 100, 4);
        CHECK(t.epsilon == doctest::Approx(1.0 / (100.0 * static_cast<double>(t.spies.size()))));
        for (std::size_t c = 0; c < t.candidates.size(); ++c) {
            double s = 0.0;
            for (double x : t.signature(c)) s += x;
            CHECK(s == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("intersection classifier") {
    SignatureTable table;
    table.spies = {10, 11};
    table.epsilon = 1e-4;
    SUBCASE("one candidate") {
        table.candidates = {3};
        table.pmf = {0.5, 0.5};
        Rng rng = make_rng(1);
        const std::vector<std::uint32_t> hist{2, 0};
        CHECK(intersection_classify(hist, table, rng).accused == 3);
    }
    SUBCASE("disjoint supports") {
        table.candidates = {3, 4};
        table.pmf = {1.0 - 1e-4, 1e-4, 1e-4, 1.0 - 1e-4};
        Rng rng = make_rng(1);
        const std::vector<std::uint32_t> hist{0, 3};
        CHECK(intersection_classify(hist, table, rng).accused == 4);
    }
    SUBCASE("empty histogram is a random guess") {
        table.candidates = {3, 4};
        table.pmf = {0.5, 0.5, 0.5, 0.5};
        Rng rng = make_rng(1);
        const std::vector<std::uint32_t> hist{0, 0};
        const auto c = intersection_classify(hist, table, rng);
        CHECK(c.random_guess);
        CHECK((c.accused == 3 || c.accused == 4));
    }
}

TEST_CASE("per-source histograms") {
    const auto h = random_regular_with_spies(80, 0.2, 12);
    const auto spies = h.spy_nodes();
    const auto sources = h.honest_nodes();
    for (auto scheme : {ForwardingScheme::one_to_one, ForwardingScheme::per_transaction}) {
        Rng rng = make_rng(4);
        auto r = sample_epoch_routing(h, scheme, 0, rng);
        const std::size_t m = 20;
        ObservationLog log;
        std::vector<NodeId> truth;
        PropagationConfig pc;
        pc.stem.q = 0.0;
        for (NodeId v : sources)
            for (std::size_t s = 0; s < m; ++s) {
                const Tx tx{TxId(truth.size()), v, std::uint32_t(s), 0.0};
                truth.push_back(v);
                auto records = propagate(tx, h, UndirectedView(h), r, pc, rng).records;
                // a looping stem falls back to random diffusion; keep only the pseudorandom part
                std::erase_if(records, [](const Observation& o) { return o.phase == Phase::fluff; });
                log.append(records);
            }
        const auto hist = per_source_histograms(log, truth, sources, spies);
        std::size_t spread = 0;
        for (const auto& counts : hist) {
            const auto nonzero = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
            if (scheme == ForwardingScheme::one_to_one) CHECK(nonzero <= 1);
            spread += nonzero > 1;
        }
        if (scheme == ForwardingScheme::per_transaction) CHECK(spread > sources.size() / 2);
    }
}
