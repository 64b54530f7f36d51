#include "dandelion/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "dandelion/assignment.hpp"
#include "dandelion/errors.hpp"

namespace dandelion {

std::size_t Mapping::assigned_count() const {
    return static_cast<std::size_t>(std::count_if(accused.begin(), accused.end(), [](NodeId v) {
        return v != kNoNode;
    }));
}

Mapping first_spy_estimate(ObservationLog& log, std::size_t tx_count) {
    log.finalize();
    Mapping mapping(tx_count);
    const auto first = log.first_records(tx_count);
    for (TxId tx = 0; tx < tx_count; ++tx)
        if (first[tx] != nullptr) mapping.accused[tx] = first[tx]->deliverer;
    return mapping;
}

namespace {

bool can_relay(const Digraph& h, NodeId v) { return h.is_honest(v) && h.supports(v); }

double log_sum_exp(std::span<const double> xs) {
    double hi = kForbidden;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kForbidden) return kForbidden;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

// Rows are observed transactions, columns honest candidates. Rows without any
// feasible candidate keep their first-spy accusation and skip the assignment.
Mapping assign_from_rows(ObservationLog& log, const Digraph& h, std::size_t tx_count,
                         const std::vector<std::pair<TxId, std::vector<double>>>& rows) {
    Mapping mapping = first_spy_estimate(log, tx_count);
    const auto honest = h.honest_nodes();
    std::vector<const std::pair<TxId, std::vector<double>>*> feasible;
    for (const auto& row : rows) {
        const bool any = std::any_of(row.second.begin(), row.second.end(), [](double w) { return w != kForbidden; });
        if (any) feasible.push_back(&row);
    }
    if (feasible.empty() || honest.empty()) return mapping;

    // When transactions outnumber candidates, candidates are reused only after
    // each has been matched once.
    const std::size_t copies = (feasible.size() + honest.size() - 1) / honest.size();
    ScoreMatrix scores(feasible.size(), honest.size() * copies, kForbidden);
    for (std::size_t r = 0; r < feasible.size(); ++r) {
        const auto& weights = feasible[r]->second;
        for (std::size_t k = 0; k < copies; ++k)
            for (std::size_t c = 0; c < honest.size(); ++c) scores(r, k * honest.size() + c) = weights[c];
    }
    const auto assignment = max_weight_assignment(scores);
    for (std::size_t r = 0; r < feasible.size(); ++r)
        mapping.accused[feasible[r]->first] = honest[assignment[r] % honest.size()];
    return mapping;
}

}  // namespace

namespace {

// Layered reverse BFS from `target`, whose own continuation weight is `target_reach`.
std::vector<double> backward_likelihood(const Digraph& h, std::span<const std::vector<NodeId>> in_adj, NodeId target,
                                        double target_reach, double q, std::span<const NodeId> target_preds) {
    const std::size_t n = h.node_count();
    const double stay = std::log1p(-q);
    std::vector<int> dist(n, kUnreachable);
    std::vector<double> best(n, kForbidden);  // best continuation over next hops
    std::vector<double> reach(n, kForbidden);  // likelihood once the tx sits at a relay
    std::vector<double> result(n, kForbidden);
    std::deque<NodeId> queue{target};
    dist[target] = 0;
    reach[target] = target_reach;
    while (!queue.empty()) {
        const NodeId x = queue.front();
        queue.pop_front();
        if (x != target) {
            const double deg = std::log(static_cast<double>(h.out_degree(x)));
            if (h.is_honest(x)) result[x] = best[x] - deg;
            if (!can_relay(h, x)) continue;
            reach[x] = best[x] + (stay - deg);
        }
        for (NodeId w : x == target ? target_preds : std::span<const NodeId>(in_adj[x])) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[x] + 1;
                queue.push_back(w);
            }
            if (dist[w] == dist[x] + 1) best[w] = std::max(best[w], reach[x]);
        }
    }
    return result;
}

}  // namespace

std::vector<double> shortest_path_log_likelihood(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                                 NodeId spy, double q, NodeId deliverer) {
    const auto preds = deliverer != kNoNode ? std::span<const NodeId>(&deliverer, 1) : std::span<const NodeId>(in_adj[spy]);
    return backward_likelihood(h, in_adj, spy, 0.0, q, preds);
}

std::vector<double> fluff_origin_log_likelihood(const Digraph& h, std::span<const std::vector<NodeId>> in_adj,
                                                NodeId origin, double q) {
    if (!h.is_honest(origin)) return std::vector<double>(h.node_count(), kForbidden);
    if (!h.supports(origin)) {
        auto result = backward_likelihood(h, in_adj, origin, 0.0, q, in_adj[origin]);
        result[origin] = 0.0;
        return result;
    }
    return backward_likelihood(h, in_adj, origin, std::log(q), q, in_adj[origin]);
}

Mapping matching_estimate(ObservationLog& log, const Digraph& h, double q, std::size_t tx_count) {
    log.finalize();
    const auto first = log.first_records(tx_count);
    const auto in_adj = h.in_adjacency();
    const auto honest = h.honest_nodes();
    std::map<std::pair<NodeId, NodeId>, std::vector<double>> by_edge;
    std::vector<std::pair<TxId, std::vector<double>>> rows;
    for (TxId tx = 0; tx < tx_count; ++tx) {
        if (first[tx] == nullptr) continue;
        const NodeId spy = first[tx]->spy;
        const NodeId deliverer = first[tx]->deliverer;
        // A fluff record is read as the deliverer having started diffusion.
        const bool fluff = first[tx]->phase == Phase::fluff;
        const NodeId via = fluff ? deliverer : h.has_edge(deliverer, spy) ? deliverer : kNoNode;
        const NodeId key = fluff ? kNoNode : spy;
        auto it = by_edge.find({via, key});
        if (it == by_edge.end()) {
            auto weights = fluff ? fluff_origin_log_likelihood(h, in_adj, deliverer, q)
                                 : shortest_path_log_likelihood(h, in_adj, spy, q, via);
            it = by_edge.emplace(std::pair{via, key}, std::move(weights)).first;
        }
        std::vector<double> weights(honest.size());
        for (std::size_t c = 0; c < honest.size(); ++c) weights[c] = it->second[honest[c]];
        rows.emplace_back(tx, std::move(weights));
    }
    return assign_from_rows(log, h, tx_count, rows);
}

Mapping routing_aware_estimate(ObservationLog& log, const Digraph& h, const EpochRouting& routing, double q,
                               std::size_t tx_count) {
    log.finalize();
    const std::size_t n = h.node_count();
    const double stay = std::log1p(-q);

    std::vector<std::size_t> offset(n + 1, 0);
    for (NodeId v = 0; v < n; ++v) offset[v + 1] = offset[v] + h.out_degree(v);
    auto edge_index = [&](NodeId a, NodeId b) -> std::ptrdiff_t {
        const auto outs = h.out(a);
        const auto it = std::find(outs.begin(), outs.end(), b);
        if (it == outs.end()) return -1;
        return static_cast<std::ptrdiff_t>(offset[a] + static_cast<std::size_t>(it - outs.begin()));
    };
    std::vector<NodeId> tail(offset[n]);
    for (NodeId v = 0; v < n; ++v)
        for (std::size_t k = offset[v]; k < offset[v + 1]; ++k) tail[k] = v;
    auto head_of = [&](std::size_t e) { return h.out(tail[e])[e - offset[tail[e]]]; };

    // For every edge, the spy edge its deterministic relay chain ends on.
    enum : std::uint8_t { unvisited, in_progress, done };
    std::vector<std::uint8_t> state(offset[n], unvisited);
    std::vector<std::ptrdiff_t> terminal(offset[n], -1);
    std::vector<double> weight(offset[n], kForbidden);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < offset[n]; ++start) {
        if (state[start] != unvisited) continue;
        stack.clear();
        std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(start);
        while (cur >= 0 && state[static_cast<std::size_t>(cur)] == unvisited) {
            const auto e = static_cast<std::size_t>(cur);
            state[e] = in_progress;
            stack.push_back(e);
            const NodeId a = tail[e];
            const NodeId b = head_of(e);
            if (h.is_spy(b)) {
                terminal[e] = cur;
                weight[e] = 0.0;
                state[e] = done;
                stack.pop_back();
                break;
            }
            if (!can_relay(h, b)) {
                cur = -1;
                break;
            }
            const NodeId next = routing.relay_target(b, a);
            cur = next == kNoNode ? -1 : edge_index(b, next);
        }
        // A chain that dead-ends or closes a loop never reaches a spy.
        const bool reached = cur >= 0 && state[static_cast<std::size_t>(cur)] == done;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const std::size_t e = *it;
            if (reached) {
                terminal[e] = terminal[static_cast<std::size_t>(cur)];
                weight[e] = weight[static_cast<std::size_t>(cur)] + stay;
            }
            state[e] = done;
            cur = static_cast<std::ptrdiff_t>(e);
        }
    }

    const auto first = log.first_records(tx_count);
    const auto honest = h.honest_nodes();
    const auto in_adj = h.in_adjacency();
    std::map<std::ptrdiff_t, std::vector<double>> by_edge;
    std::map<NodeId, std::vector<double>> fallback;
    std::vector<std::pair<TxId, std::vector<double>>> rows;
    std::vector<double> terms;
    for (TxId tx = 0; tx < tx_count; ++tx) {
        if (first[tx] == nullptr) continue;
        const std::ptrdiff_t observed = edge_index(first[tx]->deliverer, first[tx]->spy);
        auto it = by_edge.find(observed);
        if (it == by_edge.end()) {
            std::vector<double> scores(honest.size(), kForbidden);
            if (observed >= 0) {
                for (std::size_t c = 0; c < honest.size(); ++c) {
                    const NodeId v = honest[c];
                    terms.clear();
                    for (std::size_t e = offset[v]; e < offset[v + 1]; ++e)
                        if (terminal[e] == observed) terms.push_back(weight[e]);
                    if (terms.empty()) continue;
                    scores[c] = log_sum_exp(terms) - std::log(static_cast<double>(h.out_degree(v)));
                }
            }
            it = by_edge.emplace(observed, std::move(scores)).first;
        }
        std::vector<double> weights = it->second;
        if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == kForbidden; })) {
            // Observation off the relay maps (e.g. a fluff sighting): use path likelihoods.
            const NodeId spy = first[tx]->spy;
            auto fb = fallback.find(spy);
            if (fb == fallback.end())
                fb = fallback.emplace(spy, shortest_path_log_likelihood(h, in_adj, spy, q)).first;
            for (std::size_t c = 0; c < honest.size(); ++c) weights[c] = fb->second[honest[c]];
        }
        rows.emplace_back(tx, std::move(weights));
    }
    return assign_from_rows(log, h, tx_count, rows);
}

std::size_t SignatureTable::spy_index(NodeId spy) const {
    const auto it = std::lower_bound(spies.begin(), spies.end(), spy);
    if (it == spies.end() || *it != spy) return spies.size();
    return static_cast<std::size_t>(it - spies.begin());
}

SignatureTable train_signatures(const Digraph& h, const UndirectedView& g, const PropagationConfig& config,
                                ForwardingScheme scheme, std::size_t simulations, std::uint64_t seed,
                                ExecutionPolicy policy) {
    if (simulations < 1) throw InvalidParameters("training needs at least one simulation per candidate");
    SignatureTable table;
    table.candidates = h.honest_nodes();
    table.spies = h.spy_nodes();
    table.training_count = simulations;
    const std::size_t spies = table.spies.size();
    table.pmf.assign(table.candidates.size() * spies, 0.0);
    if (spies == 0) return table;
    table.epsilon = 1.0 / (static_cast<double>(simulations) * static_cast<double>(spies));
    const auto in_adj = h.in_adjacency();

    for_each_index(table.candidates.size(), policy, [&](std::size_t c) {
        Rng rng = make_rng(seed, table.candidates[c]);
        LazyRouting routing(h, in_adj, scheme, rng);
        std::vector<double> counts(spies, 0.0);
        ObservationLog log;
        for (std::size_t k = 0; k < simulations; ++k) {
            routing.reset();
            const Tx tx{0, table.candidates[c], static_cast<std::uint32_t>(k), 0.0};
            const auto prop = propagate(tx, h, g, routing, config, rng);
            const Observation* first = nullptr;
            for (const auto& rec : prop.records) {
                if (first == nullptr || rec.time < first->time ||
                    (rec.time == first->time && rec.deliverer < first->deliverer))
                    first = &rec;
            }
            if (first != nullptr) counts[table.spy_index(first->spy)] += 1.0;
        }
        double total = 0.0;
        for (double& x : counts) {
            x = x / static_cast<double>(simulations) + table.epsilon;
            total += x;
        }
        double* row = table.pmf.data() + c * spies;
        for (std::size_t s = 0; s < spies; ++s) row[s] = counts[s] / total;
    });
    return table;
}

Classification intersection_classify(std::span<const std::uint32_t> histogram, const SignatureTable& table,
                                     Rng& rng) {
    Classification result;
    if (table.candidates.empty()) throw InvalidParameters("signature table has no candidates");
    if (histogram.size() != table.spies.size()) throw InvalidParameters("histogram size != spy count");
    std::uint64_t m = 0;
    for (auto c : histogram) m += c;
    if (m == 0) {
        result.accused = table.candidates[uniform_index(rng, table.candidates.size())];
        result.random_guess = true;
        return result;
    }
    if (table.candidates.size() == 1) {
        result.accused = table.candidates.front();
        return result;
    }
    const std::size_t spies = table.spies.size();
    const double eps = table.epsilon;
    const double norm = 1.0 + static_cast<double>(spies) * eps;
    std::vector<double> observed(spies);
    for (std::size_t s = 0; s < spies; ++s)
        observed[s] = (static_cast<double>(histogram[s]) / static_cast<double>(m) + eps) / norm;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < table.candidates.size(); ++c) {
        const auto sig = table.signature(c);
        double kl = 0.0;
        for (std::size_t s = 0; s < spies; ++s) kl += observed[s] * std::log(observed[s] / sig[s]);
        if (kl < best) {
            best = kl;
            result.accused = table.candidates[c];
        }
    }
    result.divergence = best;
    return result;
}

std::vector<std::vector<std::uint32_t>> per_source_histograms(ObservationLog& log, std::span<const NodeId> truth,
                                                              std::span<const NodeId> sources,
                                                              std::span<const NodeId> spies) {
    log.finalize();
    std::vector<std::size_t> source_slot;
    NodeId max_node = 0;
    for (NodeId v : sources) max_node = std::max(max_node, v);
    for (NodeId v : truth) max_node = std::max(max_node, v);
    source_slot.assign(static_cast<std::size_t>(max_node) + 1, sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) source_slot[sources[i]] = i;

    std::vector<std::vector<std::uint32_t>> histograms(sources.size(), std::vector<std::uint32_t>(spies.size(), 0));
    const auto first = log.first_records(truth.size());
    for (TxId tx = 0; tx < truth.size(); ++tx) {
        if (first[tx] == nullptr) continue;
        const std::size_t slot = source_slot[truth[tx]];
        if (slot == sources.size()) continue;
        const auto it = std::lower_bound(spies.begin(), spies.end(), first[tx]->spy);
        if (it == spies.end() || *it != first[tx]->spy) continue;
        ++histograms[slot][static_cast<std::size_t>(it - spies.begin())];
    }
    return histograms;
}

}  // namespace dandelion
