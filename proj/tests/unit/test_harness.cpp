#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"

#include "dandelion/config.hpp"
#include "dandelion/csv.hpp"
#include "dandelion/errors.hpp"
#include "dandelion/experiment.hpp"
#include "dandelion/presets.hpp"

using namespace dandelion;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dandelion_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n' ? 1 : 0;
    return lines;
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n = 40;
    c.p = 0.2;
    c.q = 0.2;
    c.trials = 4;
    c.seed = 99;
    return c;
}

}  // namespace

TEST_CASE("config text") {
    SUBCASE("keys and comments") {
        const auto o = parse_config_text("# sweep\nn = 50\n  p=0.25  # inline\n\nestimator = matching\n", "cfg");
        REQUIRE(o.size() == 3);
        ExperimentConfig c;
        apply_overrides(c, o);
        normalize(c);
        CHECK(c.n == 50);
        CHECK(c.p == 0.25);
        CHECK(c.estimator == EstimatorKind::matching);
        CHECK(c.graph_known);
        CHECK_NOTHROW(validate(c));
    }
    SUBCASE("later settings win") {
        ExperimentConfig c;
        apply_overrides(c, {{"n", "10"}, {"n", "20"}});
        CHECK(c.n == 20);
    }
    SUBCASE("malformed line") {
        try {
            parse_config_text("n = 5\njunk\n", "x.cfg");
            FAIL("no throw");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("bad keys and values") {
        ExperimentConfig c;
        CHECK_THROWS_AS(apply_setting(c, "bogus", "1"), ConfigError);
        CHECK_THROWS_AS(apply_setting(c, "n", "ten"), ConfigError);
        CHECK_THROWS_AS(apply_setting(c, "topology", "torus"), ConfigError);
        CHECK_THROWS_AS(apply_setting(c, "supernode", "maybe"), ConfigError);
    }
    SUBCASE("validation") {
        ExperimentConfig c;
        c.p = 1.5;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ExperimentConfig{};
        c.trials = 0;
        CHECK_THROWS_AS(validate(c), ConfigError);
        c = ExperimentConfig{};
        c.estimator = EstimatorKind::routing_aware;
        normalize(c);
        CHECK_THROWS_AS(validate(c), ConfigError);  // per-transaction routing is not pseudorandom
        c = ExperimentConfig{};
        c.mode = DeploymentMode::version_checking;
        CHECK_THROWS_AS(validate(c), ConfigError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(read_config_file("/nonexistent/x.cfg"), ConfigError); }
}

TEST_CASE("csv format") {
    TrialRow row;
    row.experiment = "t";
    row.topology = "line";
    row.n = 10;
    row.p = 0.123456789;
    row.scheme = "per-transaction";
    row.estimator = "first-spy";
    row.mode = "full";
    row.avg_precision = 1.0 / 3.0;
    row.avg_recall = 0.25;

    SUBCASE("one row, no aux") {
        const auto text = format_csv({row});
        CHECK(count_lines(text) == 2);
        CHECK(text.substr(0, kCsvHeader.size()) == kCsvHeader);
        CHECK(text.find("0.333333") != std::string::npos);
        CHECK(text.find('\r') == std::string::npos);
    }
    SUBCASE("round trip") {
        row.aux = {{"intersection_recall", 0.75}, {"stem_length_mean", 4.5}};
        TrialRow second = row;
        second.trial = 1;
        second.aux.clear();
        const auto text = format_csv({row, second});
        CHECK(count_lines(text) == 4);
        const auto back = parse_csv(text, "mem");
        REQUIRE(back.size() == 2);
        CHECK(back[0].p == doctest::Approx(row.p).epsilon(1e-6));
        CHECK(back[0].avg_precision == doctest::Approx(row.avg_precision).epsilon(1e-6));
        CHECK(back[0].find_aux("intersection_recall").value() == doctest::Approx(0.75));
        CHECK(back[0].aux.size() == 2);
        CHECK(back[1].aux.empty());
        CHECK(back[1].trial == 1);
    }
    SUBCASE("file round trip") {
        const auto dir = scratch_dir("csv");
        write_csv({row}, dir / "a.csv");
        const auto back = read_csv(dir / "a.csv");
        REQUIRE(back.size() == 1);
        CHECK(back[0].topology == "line");
    }
    SUBCASE("bad header") { CHECK_THROWS(parse_csv("a,b\n1,2\n", "mem")); }
}

TEST_CASE("experiment runs") {
    SUBCASE("same seed gives identical csv") {
        const auto c = small_config();
        CHECK(format_csv(run_experiment(c)) == format_csv(run_experiment(c)));
    }
    SUBCASE("serial equals parallel") {
        auto c = small_config();
        c.estimator = EstimatorKind::matching;
        CHECK(format_csv(run_experiment(c, ExecutionPolicy::serial)) ==
              format_csv(run_experiment(c, ExecutionPolicy::parallel)));
    }
    SUBCASE("rows ordered by trial") {
        const auto rows = run_experiment(small_config());
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].trial == i);
    }
    SUBCASE("no spies, no recall") {
        for (const auto e : {EstimatorKind::first_spy, EstimatorKind::matching}) {
            auto c = small_config();
            c.p = 0.0;
            c.trials = 1;
            c.estimator = e;
            const auto rows = run_experiment(c);
            CHECK(rows[0].avg_recall == 0.0);
        }
    }
    SUBCASE("different seeds differ") {
        auto a = small_config();
        auto b = small_config();
        b.seed = 100;
        CHECK(format_csv(run_experiment(a)) != format_csv(run_experiment(b)));
    }
    SUBCASE("invalid config rejected") {
        auto c = small_config();
        c.q = -1.0;
        CHECK_THROWS_AS(run_experiment(c), ConfigError);
    }
    SUBCASE("black hole rows") {
        ExperimentConfig c;
        c.kind = ExperimentKind::black_hole;
        c.k = 5;
        c.epsilon = 0.1;
        c.m = 200;
        c.trials = 2;
        const auto rows = run_experiment(c);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].find_aux("premature_fraction").has_value());
        CHECK(rows[0].find_aux("diffused_fraction").value() == doctest::Approx(1.0));
    }
    SUBCASE("intersection rows carry the recall key") {
        auto c = small_config();
        c.estimator = EstimatorKind::intersection;
        c.training = 50;
        c.m = 2;
        c.trials = 1;
        normalize(c);
        const auto rows = run_experiment(c);
        CHECK(rows[0].find_aux("intersection_recall").has_value());
        CHECK(format_csv(rows).find("intersection_recall") != std::string::npos);
    }
}

TEST_CASE("presets") {
    CHECK_THROWS_AS(make_preset("fig99"), ConfigError);
    CHECK(preset_catalog().size() == 9);
    for (const auto& info : preset_catalog()) {
        const auto by_alias = make_preset(info.alias);
        const auto by_name = make_preset(info.name);
        CHECK(by_alias.name == by_name.name);
        CHECK(by_alias.alias == info.alias);
        CHECK_FALSE(by_alias.sweeps.empty());
        CHECK(by_alias.budget_minutes <= 30.0);
    }

    SUBCASE("fig7 has two topologies") {
        const auto preset = make_preset("fig7");
        REQUIRE(preset.sweeps.size() == 1);
        std::set<TopologyKind> topologies;
        for (const auto& c : preset.sweeps[0].configs) topologies.insert(c.topology);
        CHECK(topologies.size() == 2);
    }
    SUBCASE("fig9 bands and grid") {
        const auto preset = make_preset("partial-deployment-recall");
        CHECK(preset.sweeps.size() == 2);
        for (const auto& sweep : preset.sweeps) {
            CHECK(sweep.x_axis == "beta");
            CHECK(sweep.bands.size() == 4);
            for (const auto& c : sweep.configs) {
                CHECK(c.n == 1000);
                CHECK(c.p == 0.2);
                CHECK(c.q == 0.2);
                CHECK(c.eta == 8);
            }
        }
    }
    SUBCASE("overrides apply everywhere") {
        const auto preset = make_preset("fig5", {{"trials", "2"}, {"n", "30"}});
        for (const auto& c : preset.sweeps[0].configs) {
            CHECK(c.trials == 2);
            CHECK(c.n == 30);
        }
    }
    SUBCASE("manifest") {
        const auto manifest = manifest_json(make_preset("fig4"));
        CHECK(manifest.find("\"graph-learning\"") != std::string::npos);
        CHECK(manifest.find("\"estimator\"") != std::string::npos);
        CHECK(manifest.find("\"trials_per_config\": 200") != std::string::npos);
    }
    SUBCASE("run writes csv and manifest") {
        const auto preset = make_preset("blackhole", {{"trials", "1"}, {"m", "20"}});
        const auto dir = scratch_dir("preset");
        const auto out = run_preset(preset, dir);
        REQUIRE(out.csv_files.size() == 1);
        CHECK(std::filesystem::exists(out.manifest));
        const auto rows = read_csv(out.csv_files[0]);
        CHECK(rows.size() == 10);
    }
}
