#include "dandelion/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dandelion/adversary.hpp"
#include "dandelion/analytics.hpp"
#include "dandelion/errors.hpp"
#include "dandelion/protocol.hpp"

namespace dandelion {

std::optional<double> TrialRow::find_aux(const std::string& key) const {
    for (const auto& [k, v] : aux)
        if (k == key) return v;
    return std::nullopt;
}

namespace {

// Stream tags for per-trial randomness.
constexpr std::uint64_t kTrainingStream = 0x7472616e;
constexpr std::uint64_t kClassifyStream = 0x636c6173;

TrialRow echo(const ExperimentConfig& c, std::size_t trial) {
    TrialRow row;
    row.experiment = c.experiment;
    row.topology = c.kind == ExperimentKind::black_hole ? "line" : std::string(to_string(c.topology));
    row.n = c.kind == ExperimentKind::black_hole ? c.k + 1 : c.n;
    row.eta = c.eta;
    row.d = c.topology == TopologyKind::line_cycle ? 2 : c.topology == TopologyKind::approx_4_regular ? 4 : c.d;
    row.p = c.p;
    row.q = c.q;
    row.beta = c.beta;
    row.scheme = std::string(to_string(c.scheme));
    row.estimator = c.kind == ExperimentKind::black_hole ? "none" : std::string(to_string(c.estimator));
    row.mode = std::string(to_string(c.mode));
    row.m = c.m;
    row.trial = trial;
    row.seed = c.seed;
    return row;
}

PropagationConfig propagation_config(const ExperimentConfig& c) {
    PropagationConfig pc;
    pc.stem.q = c.q;
    pc.stem.terminator = c.terminator;
    pc.stem.stop_at_first_spy = !c.full_propagation;
    pc.fluff.rate = c.diffusion_rate;
    pc.fluff.stop_at_first_spy = !c.full_propagation;
    pc.delta_hop = c.delta_hop;
    return pc;
}

TrialRow run_black_hole_trial(const ExperimentConfig& c, std::size_t trial) {
    TrialRow row = echo(c, trial);
    Rng rng = make_rng(c.seed, trial);
    const Digraph line = black_hole_line(c.k);
    EpochRouting routing = sample_epoch_routing(line, c.scheme, trial, rng);
    const double t_base = c.t_base > 0.0 ? c.t_base : timer_threshold(c.k, c.delta_hop, c.epsilon);
    const TimerConfig timers{t_base, c.delta_hop};
    StemOptions stem;
    stem.q = c.q;
    stem.terminator = c.terminator;

    std::size_t premature = 0, diffused = 0, dropped = 0, clean = 0;
    double delay_sum = 0.0;
    std::vector<double> by_index(c.k, 0.0);
    for (std::size_t s = 0; s < c.m; ++s) {
        const Tx tx{static_cast<TxId>(s), 0, static_cast<std::uint32_t>(s), 0.0};
        const auto out = simulate_black_hole(tx, line, routing, stem, timers, c.drop_policy, rng);
        premature += out.premature;
        diffused += out.diffused;
        dropped += out.dropped;
        if (out.dropped && !out.premature) {
            ++clean;
            delay_sum += out.extra_delay;
            if (out.diffusing_index < by_index.size()) by_index[out.diffusing_index] += 1.0;
        }
    }
    const double m = static_cast<double>(c.m);
    row.aux.emplace_back("k", static_cast<double>(c.k));
    row.aux.emplace_back("epsilon", c.epsilon);
    row.aux.emplace_back("t_base", t_base);
    row.aux.emplace_back("premature_fraction", static_cast<double>(premature) / m);
    row.aux.emplace_back("diffused_fraction", static_cast<double>(diffused) / m);
    row.aux.emplace_back("dropped_fraction", static_cast<double>(dropped) / m);
    row.aux.emplace_back("clean_drops", static_cast<double>(clean));
    row.aux.emplace_back("extra_delay_mean", clean > 0 ? delay_sum / static_cast<double>(clean) : 0.0);
    for (std::size_t i = 0; i < by_index.size(); ++i) row.aux.emplace_back("diffuser_at_" + std::to_string(i), by_index[i]);
    return row;
}

}  // namespace

Digraph black_hole_line(std::size_t k) {
    if (k < 1) throw InvalidParameters("black-hole line needs k >= 1");
    Digraph line(k + 1);
    for (NodeId v = 0; v < k; ++v) line.add_edge(v, v + 1);
    line.set_profile(static_cast<NodeId>(k), {Role::spy, true});
    return line;
}

TrialGraphs build_graphs(const ExperimentConfig& c, Rng& rng) {
    auto profiles = sample_profiles(c.n, c.p, c.beta, rng);
    TrialGraphs graphs;
    switch (c.topology) {
        case TopologyKind::exact_regular: graphs.h = gen_exact_d_regular(c.n, c.d, rng); break;
        case TopologyKind::line_cycle: graphs.h = gen_line_cycle(c.n, rng); break;
        case TopologyKind::approx_4_regular:
            graphs.g = gen_p2p_approx_regular(c.n, c.eta, rng);
            graphs.h = gen_anonymity_approx4(profiles, rng);
            break;
        case TopologyKind::approx_regular: {
            graphs.g = gen_p2p_approx_regular(c.n, c.eta, rng);
            graphs.g->set_profiles(profiles);
            const auto mode = c.mode == DeploymentMode::full ? DeploymentMode::version_checking : c.mode;
            graphs.h = embed_partial_deployment(*graphs.g, mode, c.d, rng);
            break;
        }
    }
    graphs.h.set_profiles(profiles);
    if (graphs.g) graphs.g->set_profiles(std::move(profiles));
    if (c.supernode) {
        graphs.h = apply_supernode_edges(graphs.h);
        if (graphs.g) graphs.g = apply_supernode_edges(*graphs.g);
    }
    return graphs;
}

TrialRow run_trial(const ExperimentConfig& c, std::size_t trial) {
    if (c.kind == ExperimentKind::black_hole) return run_black_hole_trial(c, trial);

    TrialRow row = echo(c, trial);
    Rng rng = make_rng(c.seed, trial);
    const TrialGraphs graphs = build_graphs(c, rng);
    const Digraph& h = graphs.h;
    const UndirectedView g(graphs.p2p());
    const double diffuser_probability = c.terminator == StemTerminator::epoch_diffuser ? c.q : 0.0;
    EpochRouting routing = sample_epoch_routing(h, c.scheme, trial, rng, diffuser_probability);
    const PropagationConfig pc = propagation_config(c);

    const auto sources = h.honest_nodes();
    const std::size_t tx_count = sources.size() * c.m;
    std::vector<NodeId> truth(tx_count);
    ObservationLog log;
    log.graph_known = c.graph_known;
    log.routing_known = c.routing_known;
    // Transaction ids are a random relabeling so they carry no hint of the source.
    std::vector<TxId> ids(tx_count);
    std::iota(ids.begin(), ids.end(), TxId{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    double stem_hops = 0.0;
    std::size_t observed = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        for (std::size_t s = 0; s < c.m; ++s) {
            const Tx tx{ids[i * c.m + s], sources[i], static_cast<std::uint32_t>(s), 0.0};
            truth[tx.id] = tx.source;
            if (c.stem_only) {
                const auto stem = stem_route(tx, h, routing, pc.stem, rng);
                stem_hops += static_cast<double>(stem.stem_length);
                observed += stem.observations.empty() ? 0 : 1;
                for (const auto& o : stem.observations)
                    log.add({o.tx, o.deliverer, o.spy, o.hop * c.delta_hop, Phase::stem});
            } else {
                const auto prop = propagate(tx, h, g, routing, pc, rng);
                stem_hops += static_cast<double>(prop.stem.stem_length);
                observed += prop.records.empty() ? 0 : 1;
                log.append(prop.records);
            }
        }
    }

    Mapping mapping;
    std::optional<double> intersection_recall;
    double random_guesses = 0.0;
    switch (c.estimator) {
        case EstimatorKind::first_spy: mapping = first_spy_estimate(log, tx_count); break;
        case EstimatorKind::matching: mapping = matching_estimate(log, h, c.q, tx_count); break;
        case EstimatorKind::routing_aware: mapping = routing_aware_estimate(log, h, routing, c.q, tx_count); break;
        case EstimatorKind::intersection: {
            const auto table = train_signatures(h, g, pc, c.scheme, c.training, derive_seed(c.seed, trial, kTrainingStream),
                                                ExecutionPolicy::serial);
            const auto histograms = per_source_histograms(log, truth, sources, table.spies);
            Rng classify_rng = make_rng(derive_seed(c.seed, trial, kClassifyStream));
            mapping = Mapping(tx_count);
            std::size_t correct = 0;
            for (std::size_t i = 0; i < sources.size(); ++i) {
                const auto verdict = intersection_classify(histograms[i], table, classify_rng);
                random_guesses += verdict.random_guess ? 1.0 : 0.0;
                correct += verdict.accused == sources[i] ? 1 : 0;
                for (std::size_t s = 0; s < c.m; ++s) mapping.accused[ids[i * c.m + s]] = verdict.accused;
            }
            intersection_recall = sources.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(sources.size());
            break;
        }
    }

    const auto report = precision_recall(mapping, truth, sources);
    row.avg_precision = report.avg_precision;
    row.avg_recall = report.avg_recall;
    const double txs = std::max<double>(1.0, static_cast<double>(tx_count));
    row.aux.emplace_back("stem_length_mean", stem_hops / txs);
    row.aux.emplace_back("observed_fraction", static_cast<double>(observed) / txs);
    if (intersection_recall) {
        row.aux.emplace_back("intersection_recall", *intersection_recall);
        row.aux.emplace_back("random_guess_fraction", random_guesses / std::max<double>(1.0, static_cast<double>(sources.size())));
    }
    if (c.mode != DeploymentMode::full) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < report.nodes.size(); ++i) {
            if (!h.supports(report.nodes[i])) continue;
            sum += report.recall[i];
            ++count;
        }
        row.aux.emplace_back("supporter_recall", count > 0 ? sum / static_cast<double>(count) : 0.0);
        const auto bounds = partial_deployment_recall_bounds(c.n, c.p, c.beta, c.q, c.eta, c.mode);
        row.aux.emplace_back("bound_lower", bounds.lower);
        row.aux.emplace_back("bound_upper", bounds.upper);
        row.aux.emplace_back("bound_refined_upper", bounds.refined_upper);
        row.aux.emplace_back("bound_finite_upper", bounds.finite_upper);
    }
    return row;
}

std::vector<TrialRow> run_experiment(ExperimentConfig config, ExecutionPolicy policy) {
    normalize(config);
    validate(config);
    std::vector<TrialRow> rows(config.trials);
    try {
        for_each_index(config.trials, policy, [&](std::size_t t) { rows[t] = run_trial(config, t); });
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("experiment '" + config.experiment + "' (n=" + std::to_string(config.n) +
                                 ", p=" + std::to_string(config.p) + ", seed=" + std::to_string(config.seed) +
                                 "): " + e.what());
    }
    return rows;
}

}  // namespace dandelion
