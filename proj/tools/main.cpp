#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "dandelion/analytics.hpp"
#include "dandelion/config.hpp"
#include "dandelion/csv.hpp"
#include "dandelion/errors.hpp"
#include "dandelion/experiment.hpp"
#include "dandelion/graph_io.hpp"
#include "dandelion/presets.hpp"

namespace {

using namespace dandelion;

constexpr int kConfigExit = 2;

// Flags mirror config keys; only flags given on the command line become overrides.
struct FlagSet {
    std::map<std::string, std::string> values;
    std::string config_path;
    bool serial = false;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "flat key = value config file");
        for (const char* key : {"n", "eta", "d", "p", "q", "beta", "m", "trials", "seed", "topology", "scheme",
                                "estimator", "mode", "out", "k", "epsilon", "t_base", "delta_hop", "kind",
                                "experiment", "training", "terminator", "drop_policy", "diffusion_rate"}) {
            std::string flag = std::string("--") + key;
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            app.add_option(flag, values[key], std::string("override ") + key);
        }
        app.add_flag("--supernode", values["supernode"], "spies open outbound edges to all honest nodes");
        app.add_flag("--stem-only", values["stem_only"], "ignore fluff-phase sightings");
        app.add_flag("--full-propagation", values["full_propagation"], "keep spreading past the first spy");
        app.add_flag("--serial", serial, "run trials on one thread");
    }

    Overrides overrides(const CLI::App& app) const {
        Overrides out;
        if (!config_path.empty()) out = read_config_file(config_path);
        for (const auto& [key, value] : values) {
            std::string flag = "--" + key;
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            if (app.count(flag) == 0) continue;
            const bool is_flag = key == "supernode" || key == "stem_only" || key == "full_propagation";
            out.emplace_back(key, is_flag ? std::string("true") : value);
        }
        return out;
    }

    ExperimentConfig config(const CLI::App& app) const {
        ExperimentConfig c;
        apply_overrides(c, overrides(app));
        normalize(c);
        validate(c);
        return c;
    }

    ExecutionPolicy policy() const { return serial ? ExecutionPolicy::serial : ExecutionPolicy::parallel; }
};

void gen_graph(const ExperimentConfig& c) {
    Rng rng = make_rng(c.seed);
    const auto graphs = build_graphs(c, rng);
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    serialize_graph(graphs.h, dir / "anonymity.edges");
    std::cout << "wrote " << (dir / "anonymity.edges").string() << " (" << graphs.h.edge_count() << " edges)\n";
    if (graphs.g) {
        serialize_graph(*graphs.g, dir / "p2p.edges");
        std::cout << "wrote " << (dir / "p2p.edges").string() << " (" << graphs.g->edge_count() << " edges)\n";
    }
}

void run(const ExperimentConfig& c, ExecutionPolicy policy) {
    const auto rows = run_experiment(c, policy);
    const auto path = std::filesystem::path(c.out) / (c.experiment + ".csv");
    write_csv(rows, path);
    double precision = 0.0, recall = 0.0;
    for (const auto& r : rows) {
        precision += r.avg_precision;
        recall += r.avg_recall;
    }
    const double t = static_cast<double>(rows.size());
    std::printf("%zu trials  precision %.6f  recall %.6f  -> %s\n", rows.size(), precision / t, recall / t,
                path.string().c_str());
}

void bounds(const ExperimentConfig& c) {
    BoundsParameters params;
    params.p = c.p;
    params.q = c.q;
    params.n = c.n;
    params.eta = c.eta;
    params.beta = c.beta;
    params.k = c.k;
    params.epsilon = c.epsilon;
    params.delta_hop = c.delta_hop;
    params.t_base = c.t_base;
    const auto report = bounds_report(params);
    std::cout << "name,value\n";
    for (const auto& [name, value] : report.values) std::printf("%s,%.6f\n", name.c_str(), value);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dandelion++ anonymity simulator"};
    app.require_subcommand(1);

    FlagSet gen_flags, run_flags, preset_flags, bounds_flags;
    auto* gen_cmd = app.add_subcommand("gen-graph", "generate and save the anonymity (and P2P) graph");
    gen_flags.attach(*gen_cmd);
    auto* run_cmd = app.add_subcommand("run", "run one experiment and write its CSV");
    run_flags.attach(*run_cmd);
    auto* preset_cmd = app.add_subcommand("preset", "run a named figure preset");
    std::string preset_name;
    preset_cmd->add_option("name", preset_name, "preset alias or name")->required();
    preset_flags.attach(*preset_cmd);
    auto* list_cmd = app.add_subcommand("list-presets", "print known presets");
    auto* bounds_cmd = app.add_subcommand("bounds", "print closed-form bounds as name,value CSV");
    bounds_flags.attach(*bounds_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*gen_cmd) {
            gen_graph(gen_flags.config(*gen_cmd));
        } else if (*run_cmd) {
            run(run_flags.config(*run_cmd), run_flags.policy());
        } else if (*preset_cmd) {
            const auto overrides = preset_flags.overrides(*preset_cmd);
            std::string out = "results";
            for (const auto& [key, value] : overrides)
                if (key == "out") out = value;
            const auto preset = make_preset(preset_name, overrides);
            const auto dir = std::filesystem::path(out) / preset.alias;
            const auto output = run_preset(preset, dir, preset_flags.policy());
            for (const auto& f : output.csv_files) std::cout << "wrote " << f.string() << "\n";
            std::cout << "wrote " << output.manifest.string() << "\n";
        } else if (*list_cmd) {
            for (const auto& info : preset_catalog()) std::cout << info.alias << "\t" << info.name << "\n";
        } else if (*bounds_cmd) {
            bounds(bounds_flags.config(*bounds_cmd));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
