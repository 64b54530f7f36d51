#include "dandelion/presets.hpp"

#include <array>
#include <fstream>

#include "json.hpp"

#include "dandelion/csv.hpp"
#include "dandelion/errors.hpp"
#include "dandelion/experiment.hpp"

namespace dandelion {

namespace {

constexpr std::array kCatalog{
    PresetInfo{"fig4", "graph-learning"},
    PresetInfo{"fig5", "forwarding-schemes"},
    PresetInfo{"fig6", "intersection-attack"},
    PresetInfo{"fig7", "approx-vs-exact"},
    PresetInfo{"fig8", "honest-construction"},
    PresetInfo{"fig8m", "supernode-construction"},
    PresetInfo{"fig9", "partial-deployment-recall"},
    PresetInfo{"blackhole", "black-hole-timers"},
    PresetInfo{"tradeoff-appC", "routing-knowledge-tradeoff"},
};

std::vector<double> p_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);
    return grid;
}

std::vector<double> beta_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
    return grid;
}

ExperimentConfig base(const std::string& experiment, std::size_t trials) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.trials = trials;
    c.seed = 2018;
    return c;
}

Preset graph_learning() {
    Preset preset{"graph-learning", "fig4", "first-spy vs matching precision on line and 4-regular graphs", 5.0, {}};
    for (const auto topology : {TopologyKind::line_cycle, TopologyKind::exact_regular}) {
        Sweep sweep{std::string(topology == TopologyKind::line_cycle ? "line" : "regular4") + ".csv", "p",
                    {"estimator"}, {}, {}};
        for (const auto estimator : {EstimatorKind::first_spy, EstimatorKind::matching})
            for (double p : p_grid()) {
                auto c = base("graph-learning", 200);
                c.n = 50;
                c.topology = topology;
                c.estimator = estimator;
                c.p = p;
                c.stem_only = true;
                sweep.configs.push_back(c);
            }
        preset.sweeps.push_back(std::move(sweep));
    }
    return preset;
}

Preset forwarding_schemes() {
    Preset preset{"forwarding-schemes", "fig5", "first-spy precision per forwarding scheme on 4-regular graphs", 5.0, {}};
    Sweep sweep{"schemes.csv", "p", {"scheme"}, {}, {}};
    for (const auto scheme : {ForwardingScheme::per_transaction, ForwardingScheme::one_to_one,
                              ForwardingScheme::all_to_one, ForwardingScheme::per_incoming_edge})
        for (double p : p_grid()) {
            auto c = base("forwarding-schemes", 100);
            c.n = 200;
            c.scheme = scheme;
            c.p = p;
            c.stem_only = true;
            sweep.configs.push_back(c);
        }
    preset.sweeps.push_back(std::move(sweep));
    return preset;
}

Preset intersection_attack() {
    Preset preset{"intersection-attack", "fig6", "intersection classifier recall vs transactions per node", 30.0, {}};
    Sweep sweep{"intersection.csv", "m", {"scheme"}, {}, {}};
    for (const auto scheme : {ForwardingScheme::per_transaction, ForwardingScheme::one_to_one})
        for (std::size_t m : {1, 3, 5, 10}) {
            auto c = base("intersection-attack", 3);
            c.n = 1000;
            c.p = 0.3;
            c.m = m;
            c.scheme = scheme;
            c.estimator = EstimatorKind::intersection;
            c.training = 2000;
            c.stem_only = true;
            sweep.configs.push_back(c);
        }
    preset.sweeps.push_back(std::move(sweep));
    return preset;
}

Preset approx_vs_exact() {
    Preset preset{"approx-vs-exact", "fig7", "approximate vs exact 4-regular anonymity graphs", 10.0, {}};
    Sweep sweep{"approx_vs_exact.csv", "p", {"topology", "estimator"}, {}, {}};
    for (const auto topology : {TopologyKind::exact_regular, TopologyKind::approx_4_regular})
        for (const auto estimator : {EstimatorKind::first_spy, EstimatorKind::matching})
            for (double p : p_grid()) {
                auto c = base("approx-vs-exact", 200);
                c.n = 100;
                c.topology = topology;
                c.estimator = estimator;
                c.p = p;
                c.stem_only = true;
                sweep.configs.push_back(c);
            }
    preset.sweeps.push_back(std::move(sweep));
    return preset;
}

Preset construction(bool supernode) {
    Preset preset{supernode ? "supernode-construction" : "honest-construction", supernode ? "fig8m" : "fig8",
                  supernode ? "spies open outbound edges to every honest node" : "spies follow the graph construction",
                  10.0, {}};
    Sweep sweep{"construction.csv", "p", {"q"}, {}, {}};
    for (double q : {0.0, 0.2, 0.5})
        for (double p : p_grid()) {
            auto c = base(preset.name, 50);
            c.n = 500;
            c.topology = TopologyKind::approx_4_regular;
            c.estimator = EstimatorKind::matching;
            c.supernode = supernode;
            c.p = p;
            c.q = q;
            sweep.configs.push_back(c);
        }
    preset.sweeps.push_back(std::move(sweep));
    return preset;
}

Preset partial_deployment() {
    Preset preset{"partial-deployment-recall", "fig9", "first-spy recall under partial deployment with bounds", 15.0, {}};
    for (const auto mode : {DeploymentMode::version_checking, DeploymentMode::no_version_checking}) {
        Sweep sweep{std::string(to_string(mode)) + ".csv", "beta", {"mode"},
                    {"bound_lower", "bound_upper", "bound_refined_upper", "bound_finite_upper"}, {}};
        for (double beta : beta_grid()) {
            auto c = base("partial-deployment-recall", 20);
            c.n = 1000;
            c.eta = 8;
            c.p = 0.2;
            c.q = 0.2;
            c.beta = beta;
            c.topology = TopologyKind::approx_regular;
            c.mode = mode;
            sweep.configs.push_back(c);
        }
        preset.sweeps.push_back(std::move(sweep));
    }
    return preset;
}

Preset black_hole() {
    Preset preset{"black-hole-timers", "blackhole", "premature diffusion and extra delay vs timer tolerance", 5.0, {}};
    Sweep sweep{"blackhole.csv", "epsilon", {"n"}, {}, {}};
    for (std::size_t k : {5, 10})
        for (double epsilon : {0.01, 0.02, 0.05, 0.1, 0.2}) {
            auto c = base("black-hole-timers", 10);
            c.kind = ExperimentKind::black_hole;
            c.k = k;
            c.epsilon = epsilon;
            c.m = 1000;
            sweep.configs.push_back(c);
        }
    preset.sweeps.push_back(std::move(sweep));
    return preset;
}

Preset routing_tradeoff() {
    Preset preset{"routing-knowledge-tradeoff", "tradeoff-appC", "graph-only vs routing-aware matching", 10.0, {}};
    for (const auto topology : {TopologyKind::line_cycle, TopologyKind::exact_regular}) {
        Sweep sweep{std::string(topology == TopologyKind::line_cycle ? "line" : "regular4") + ".csv", "p",
                    {"estimator"}, {}, {}};
        for (const auto estimator : {EstimatorKind::first_spy, EstimatorKind::matching, EstimatorKind::routing_aware})
            for (double p : p_grid()) {
                auto c = base("routing-knowledge-tradeoff", 100);
                c.n = 100;
                c.topology = topology;
                c.scheme = ForwardingScheme::one_to_one;
                c.estimator = estimator;
                c.p = p;
                c.stem_only = true;
                sweep.configs.push_back(c);
            }
        preset.sweeps.push_back(std::move(sweep));
    }
    return preset;
}

}  // namespace

std::span<const PresetInfo> preset_catalog() { return kCatalog; }

Preset make_preset(std::string_view name, const Overrides& overrides) {
    std::string_view alias;
    for (const auto& info : kCatalog)
        if (name == info.alias || name == info.name) alias = info.alias;
    Preset preset;
    if (alias == "fig4") preset = graph_learning();
    else if (alias == "fig5") preset = forwarding_schemes();
    else if (alias == "fig6") preset = intersection_attack();
    else if (alias == "fig7") preset = approx_vs_exact();
    else if (alias == "fig8") preset = construction(false);
    else if (alias == "fig8m") preset = construction(true);
    else if (alias == "fig9") preset = partial_deployment();
    else if (alias == "blackhole") preset = black_hole();
    else if (alias == "tradeoff-appC") preset = routing_tradeoff();
    else throw ConfigError("unknown preset '" + std::string(name) + "'");

    for (auto& sweep : preset.sweeps)
        for (auto& c : sweep.configs) {
            apply_overrides(c, overrides);
            normalize(c);
            validate(c);
        }
    return preset;
}

std::string manifest_json(const Preset& preset) {
    nlohmann::ordered_json j;
    j["preset"] = preset.name;
    j["alias"] = preset.alias;
    j["description"] = preset.description;
    j["budget_minutes"] = preset.budget_minutes;
    j["csv_header"] = std::string(kCsvHeader);
    auto sweeps = nlohmann::ordered_json::array();
    for (const auto& sweep : preset.sweeps) {
        nlohmann::ordered_json s;
        s["file"] = sweep.file;
        s["x"] = sweep.x_axis;
        s["series"] = sweep.series;
        s["y"] = {"avg_precision", "avg_recall"};
        s["bands"] = sweep.bands;
        s["configs"] = sweep.configs.size();
        std::size_t trials = 0;
        for (const auto& c : sweep.configs) trials += c.trials;
        s["trials"] = trials;
        s["trials_per_config"] = sweep.configs.empty() ? 0 : sweep.configs.front().trials;
        s["seed"] = sweep.configs.empty() ? 0 : sweep.configs.front().seed;
        sweeps.push_back(std::move(s));
    }
    j["sweeps"] = std::move(sweeps);
    return j.dump(2) + "\n";
}

PresetOutput run_preset(const Preset& preset, const std::filesystem::path& out_dir, ExecutionPolicy policy) {
    std::filesystem::create_directories(out_dir);
    PresetOutput output;
    for (const auto& sweep : preset.sweeps) {
        std::vector<TrialRow> rows;
        for (const auto& c : sweep.configs) {
            auto part = run_experiment(c, policy);
            rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        const auto path = out_dir / sweep.file;
        write_csv(rows, path);
        output.csv_files.push_back(path);
    }
    output.manifest = out_dir / "manifest.json";
    std::ofstream out(output.manifest, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + output.manifest.string());
    out << manifest_json(preset);
    return output;
}

}  // namespace dandelion
