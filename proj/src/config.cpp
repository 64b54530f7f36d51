#include "dandelion/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dandelion/errors.hpp"

namespace dandelion {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::first_spy: return "first-spy";
        case EstimatorKind::matching: return "matching";
        case EstimatorKind::routing_aware: return "routing-aware";
        case EstimatorKind::intersection: return "intersection";
    }
    return "unknown";
}

std::string_view to_string(ExperimentKind kind) {
    return kind == ExperimentKind::black_hole ? "black-hole" : "dissemination";
}

EstimatorKind parse_estimator(std::string_view s) {
    if (s == "first-spy") return EstimatorKind::first_spy;
    if (s == "matching") return EstimatorKind::matching;
    if (s == "routing-aware") return EstimatorKind::routing_aware;
    if (s == "intersection") return EstimatorKind::intersection;
    throw ConfigError("unknown estimator: " + std::string(s));
}

ExperimentKind parse_experiment_kind(std::string_view s) {
    if (s == "dissemination") return ExperimentKind::dissemination;
    if (s == "black-hole") return ExperimentKind::black_hole;
    throw ConfigError("unknown experiment kind: " + std::string(s));
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

template <class F>
auto rethrow_as_config(std::string_view key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("invalid value for " + std::string(key) + ": " + e.what());
    }
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "experiment", "kind",   "n",          "eta",      "d",        "p",
        "q",          "beta",   "m",          "trials",   "seed",     "topology",
        "mode",       "scheme", "estimator",  "terminator", "supernode", "graph_known",
        "routing_known", "stem_only", "full_propagation", "diffusion_rate", "delta_hop", "training",
        "k",          "epsilon", "t_base",    "drop_policy", "out"};
    return keys;
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    if (key == "experiment") c.experiment = std::string(v);
    else if (key == "kind") c.kind = parse_experiment_kind(v);
    else if (key == "n") c.n = parse_number<std::size_t>(key, v);
    else if (key == "eta") c.eta = parse_number<std::size_t>(key, v);
    else if (key == "d") c.d = parse_number<std::size_t>(key, v);
    else if (key == "p") c.p = parse_number<double>(key, v);
    else if (key == "q") c.q = parse_number<double>(key, v);
    else if (key == "beta") c.beta = parse_number<double>(key, v);
    else if (key == "m") c.m = parse_number<std::size_t>(key, v);
    else if (key == "trials") c.trials = parse_number<std::size_t>(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "topology") c.topology = rethrow_as_config(key, [&] { return parse_topology(v); });
    else if (key == "mode") c.mode = rethrow_as_config(key, [&] { return parse_deployment(v); });
    else if (key == "scheme") c.scheme = rethrow_as_config(key, [&] { return parse_scheme(v); });
    else if (key == "estimator") c.estimator = parse_estimator(v);
    else if (key == "terminator") {
        if (v == "per-hop-coin") c.terminator = StemTerminator::per_hop_coin;
        else if (v == "epoch-diffuser") c.terminator = StemTerminator::epoch_diffuser;
        else throw ConfigError("unknown terminator: " + std::string(v));
    }
    else if (key == "supernode") c.supernode = parse_bool(key, v);
    else if (key == "graph_known") c.graph_known = parse_bool(key, v);
    else if (key == "routing_known") c.routing_known = parse_bool(key, v);
    else if (key == "stem_only") c.stem_only = parse_bool(key, v);
    else if (key == "full_propagation") c.full_propagation = parse_bool(key, v);
    else if (key == "diffusion_rate") c.diffusion_rate = parse_number<double>(key, v);
    else if (key == "delta_hop") c.delta_hop = parse_number<double>(key, v);
    else if (key == "training") c.training = parse_number<std::size_t>(key, v);
    else if (key == "k") c.k = parse_number<std::size_t>(key, v);
    else if (key == "epsilon") c.epsilon = parse_number<double>(key, v);
    else if (key == "t_base") c.t_base = parse_number<double>(key, v);
    else if (key == "drop_policy") c.drop_policy = rethrow_as_config(key, [&] { return parse_drop_policy(v); });
    else if (key == "out") c.out = std::string(v);
    else throw ConfigError("unknown config key: " + std::string(key));
}

void apply_overrides(ExperimentConfig& config, const Overrides& overrides) {
    for (const auto& [key, value] : overrides) apply_setting(config, key, value);
}

Overrides parse_config_text(std::string_view text, const std::string& origin) {
    Overrides out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(origin, line_no, "missing key");
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

Overrides read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void normalize(ExperimentConfig& c) {
    if (c.estimator != EstimatorKind::first_spy) c.graph_known = true;
    if (c.estimator == EstimatorKind::routing_aware) c.routing_known = true;
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    auto probability = [&](double x, const char* name) {
        if (!(x >= 0.0 && x <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
    };
    probability(c.p, "p");
    probability(c.q, "q");
    probability(c.beta, "beta");
    if (c.trials < 1) fail("trials must be >= 1");
    if (c.m < 1) fail("m must be >= 1");
    if (!(c.delta_hop > 0.0)) fail("delta_hop must be positive");
    if (c.kind == ExperimentKind::black_hole) {
        if (c.k < 1) fail("k must be >= 1");
        if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
        if (c.t_base < 0.0) fail("t_base must be >= 0");
        if (c.k < 2 && c.t_base == 0.0) fail("k = 1 gives a zero timer threshold; set t_base");
        return;
    }
    if (c.n < 3) fail("n must be >= 3");
    if (!(c.diffusion_rate > 0.0)) fail("diffusion_rate must be positive");
    const bool p2p = c.topology == TopologyKind::approx_regular || c.topology == TopologyKind::approx_4_regular;
    if (p2p && (c.eta < 1 || c.n <= c.eta)) fail("need 1 <= eta < n");
    if (c.topology == TopologyKind::exact_regular || c.topology == TopologyKind::approx_regular) {
        if (c.d < 2 || c.d % 2 != 0) fail("d must be even and >= 2");
        if (c.d > c.n - 1) fail("d must be <= n - 1");
    }
    if (c.topology == TopologyKind::approx_regular && c.d / 2 > c.eta) fail("d/2 must be <= eta");
    if (c.mode != DeploymentMode::full && c.topology != TopologyKind::approx_regular) {
        fail("partial deployment needs topology approx-regular");
    }
    if (c.estimator == EstimatorKind::routing_aware && !is_pseudorandom(c.scheme)) {
        fail("routing-aware estimator needs a pseudorandom forwarding scheme");
    }
    if (c.estimator == EstimatorKind::intersection && c.training < 1) fail("training must be >= 1");
    if (c.estimator != EstimatorKind::first_spy && !c.graph_known) fail("estimator needs graph_known");
    if (c.estimator == EstimatorKind::routing_aware && !c.routing_known) fail("estimator needs routing_known");
}

}  // namespace dandelion
