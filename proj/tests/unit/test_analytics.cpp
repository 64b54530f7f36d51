#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "dandelion/analytics.hpp"
#include "dandelion/errors.hpp"
#include "test_util.hpp"

using namespace dandelion;
using namespace dandelion::testing;

TEST_CASE("precision and recall per node") {
    const std::vector<NodeId> nodes{0, 1, 2};

    SUBCASE("each tx to its source") {
        Mapping m;
        m.accused = {0, 1, 2};
        const std::vector<NodeId> truth{0, 1, 2};
        const auto r = precision_recall(m, truth, nodes);
        CHECK(r.avg_precision == doctest::Approx(1.0));
        CHECK(r.avg_recall == doctest::Approx(1.0));
        CHECK(r.assigned == 3);
    }
    SUBCASE("half right") {
        Mapping m;
        m.accused = {0, 0, 2};
        const std::vector<NodeId> truth{0, 1, 2};
        const auto r = precision_recall(m, truth, nodes);
        CHECK(r.precision[0] == doctest::Approx(0.5));
        CHECK(r.precision[1] == 0.0);
        CHECK(r.recall[1] == 0.0);
        CHECK(r.recall[0] == doctest::Approx(1.0));
    }
    SUBCASE("everything on one node") {
        Mapping m;
        m.accused = {1, 1, 1};
        const std::vector<NodeId> truth{0, 1, 2};
        const auto r = precision_recall(m, truth, nodes);
        CHECK(r.precision[1] == doctest::Approx(1.0 / 3.0));
        CHECK(r.recall[1] == doctest::Approx(1.0));
        CHECK(r.recall[0] == 0.0);
        CHECK(r.recall[2] == 0.0);
    }
    SUBCASE("unassigned counted") {
        Mapping m;
        m.accused = {kNoNode, 1, 2};
        const std::vector<NodeId> truth{0, 1, 2};
        const auto r = precision_recall(m, truth, nodes);
        CHECK(r.unassigned == 1);
        CHECK(r.recall[0] == 0.0);
    }
    SUBCASE("size mismatch") {
        Mapping m;
        m.accused = {0};
        const std::vector<NodeId> truth{0, 1};
        CHECK_THROWS_AS(precision_recall(m, truth, nodes), InvalidParameters);
    }
}

TEST_CASE("fundamental bounds") {
    CHECK(fundamental_bounds(0.0) == std::pair{0.0, 0.0});
    CHECK(fundamental_bounds(1.0) == std::pair{1.0, 1.0});
    const auto [d, r] = fundamental_bounds(0.2);
    CHECK(d == doctest::Approx(0.04));
    CHECK(r == doctest::Approx(0.2));
}

TEST_CASE("one-to-one first-spy precision") {
    CHECK(oto_first_spy_precision(0.2) == doctest::Approx(0.10986).epsilon(1e-4));
    CHECK(oto_first_spy_precision(1e-4) < 1e-6);
    CHECK(oto_first_spy_precision(1.0 - 1e-6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(oto_first_spy_precision(0.0), DomainError);
    CHECK_THROWS_AS(oto_first_spy_precision(1.0), DomainError);
}

TEST_CASE("ward pmf closed forms") {
    CHECK(ward_pmf(WardScheme::one_to_one, 1, 1.0 / 3.0) == doctest::Approx(0.5));
    CHECK(ward_pmf(WardScheme::all_to_one, 1, 0.0) == doctest::Approx(0.25));
    CHECK(ward_pmf(WardScheme::all_to_one, 2, 0.0) == doctest::Approx(0.125));
    CHECK_THROWS_AS(ward_pmf(WardScheme::one_to_one, 0, 0.3), InvalidParameters);
    CHECK_THROWS_AS(ward_pmf(WardScheme::one_to_one, 1, 0.0), DomainError);
    // large w stays finite in log space
    CHECK(std::isfinite(ward_log_pmf(WardScheme::all_to_one, 5000, 0.3)));

    for (const auto scheme : {WardScheme::one_to_one, WardScheme::all_to_one})
        for (double p : {0.1, 0.3, 0.7}) {
            const auto table = ward_pmf_table(scheme, p);
            double sum = 0.0;
            for (double x : table) sum += x;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("simulated ward sizes match the closed form") {
    Rng rng = make_rng(11);
    for (const auto scheme : {WardScheme::one_to_one, WardScheme::all_to_one}) {
        const auto sim = simulate_ward_size(scheme, 0.3, 100000, rng);
        const auto exact = ward_pmf_table(scheme, 0.3);
        CHECK(total_variation(sim, exact) < 0.02);
    }
    const auto one = simulate_ward_size(WardScheme::all_to_one, 0.3, 1, rng);
    std::size_t nonzero = 0;
    for (double x : one) nonzero += x > 0.0 ? 1 : 0;
    CHECK(nonzero == 1);
    CHECK_THROWS_AS(simulate_ward_size(WardScheme::one_to_one, 0.3, 0, rng), InvalidParameters);
}

TEST_CASE("all-to-one precision bounds") {
    CHECK(ato_precision_bounds(0.0) == std::pair{0.0, 0.0});
    const auto [lo, hi] = ato_precision_bounds(0.2);
    CHECK(lo == doctest::Approx(0.05));
    CHECK(hi == doctest::Approx(0.2352).epsilon(1e-3));
    for (int i = 0; i <= 20; ++i) {
        const auto [a, b] = ato_precision_bounds(i / 20.0);
        CHECK(a <= b);
    }
}

TEST_CASE("matching precision bounds") {
    const auto zero = matching_precision_bounds(0.0);
    CHECK(zero.lower == 0.0);
    CHECK(zero.upper == 0.0);
    const auto half = matching_precision_bounds(0.5);
    CHECK(half.lower == doctest::Approx(2.0 / 3.0));
    CHECK(half.upper_raw == doctest::Approx(4.0 / 3.0));
    CHECK(half.upper == 1.0);
    for (int i = 0; i < 20; ++i) {
        const auto b = matching_precision_bounds(i / 20.0);
        CHECK(b.upper_raw == 2.0 * b.lower);
    }
    CHECK_THROWS_AS(matching_precision_bounds(1.0), DomainError);
}

TEST_CASE("optimal precision check") {
    for (double p : {0.0, 0.1, 0.4}) CHECK(optimal_precision_check(0.3, 0.3, p).passed);
    const auto c = optimal_precision_check(0.05, 0.01, 0.0);
    CHECK(c.passed);
    CHECK(c.margin == doctest::Approx(0.03));
    CHECK_FALSE(optimal_precision_check(0.5, 0.01, 0.0).passed);
}

TEST_CASE("timer threshold") {
    CHECK(timer_threshold(1, 0.3, 0.1) == 0.0);
    CHECK(timer_threshold(10, 0.3, 0.1) == doctest::Approx(128.1).epsilon(1e-3));
    CHECK(timer_threshold(11, 0.3, 0.1) > timer_threshold(10, 0.3, 0.1));
    CHECK(timer_threshold(10, 0.3, 0.2) < timer_threshold(10, 0.3, 0.1));
    CHECK_THROWS_AS(timer_threshold(10, 0.3, 0.0), DomainError);
    CHECK_THROWS_AS(timer_threshold(10, 0.3, 1.0), DomainError);
    CHECK_THROWS_AS(timer_threshold(0, 0.3, 0.1), DomainError);
}

TEST_CASE("expected extra delay") {
    CHECK(expected_extra_delay(50.0, 1) == 50.0);
    CHECK(expected_extra_delay(128.1, 10) == doctest::Approx(12.81));

    // min of k timers each Exp(1/T)
    Rng rng = make_rng(5);
    const double t = 128.1;
    const std::size_t k = 10;
    std::exponential_distribution<double> timer(1.0 / t);
    std::vector<double> mins(20000);
    for (auto& x : mins) {
        x = timer(rng);
        for (std::size_t i = 1; i < k; ++i) x = std::min(x, timer(rng));
    }
    const auto s = mean_se(mins);
    CHECK(std::abs(s.mean - expected_extra_delay(t, k)) < 3.0 * s.se);
}

TEST_CASE("partial deployment recall bounds") {
    SUBCASE("full deployment") {
        const auto b = partial_deployment_recall_bounds(1000, 0.2, 1.0, 0.2, 8, DeploymentMode::version_checking);
        CHECK(b.f == 1.0);
        CHECK(b.lower == doctest::Approx(0.2));
    }
    SUBCASE("no version checking floor") {
        for (double beta : {0.1, 0.5, 0.9}) {
            const auto b =
                partial_deployment_recall_bounds(1000, 0.2, beta, 0.2, 8, DeploymentMode::no_version_checking);
            CHECK(b.lower == 0.2);
        }
    }
    SUBCASE("version checking upper near 1 as beta shrinks") {
        const auto b = partial_deployment_recall_bounds(1000, 0.2, 0.01, 0.2, 8, DeploymentMode::version_checking);
        CHECK(b.upper > 0.9);
    }
    SUBCASE("no deployment") {
        CHECK_THROWS_AS(partial_deployment_recall_bounds(1000, 0.0, 0.0, 0.2, 8, DeploymentMode::version_checking),
                        DomainError);
    }
    SUBCASE("lower below upper on the grid") {
        for (std::size_t n : {500, 1000})
            for (int pi = 1; pi <= 19; ++pi)
                for (int qi = 1; qi <= 19; qi += 2)
                    for (int bi = 1; bi <= 19; ++bi)
                        for (const auto mode : {DeploymentMode::version_checking, DeploymentMode::no_version_checking}) {
                            const auto b = partial_deployment_recall_bounds(n, 0.05 * pi, 0.05 * bi, 0.05 * qi, 8, mode);
                            REQUIRE(b.lower <= b.upper + 1e-12);
                            REQUIRE(b.lower <= b.refined_upper + 1e-12);
                        }
    }
    SUBCASE("zeta against sampling") {
        const std::size_t n = 1000, eta = 8;
        const double p = 0.2;
        const auto b = partial_deployment_recall_bounds(n, p, 0.5, 0.2, eta, DeploymentMode::version_checking);
        const auto nt = static_cast<std::size_t>((1.0 - p) * static_cast<double>(n));
        Rng rng = make_rng(3);
        std::binomial_distribution<std::size_t> z(nt - 1, b.phi);
        std::vector<double> xs(200000);
        for (auto& x : xs) x = 1.0 / static_cast<double>(z(rng) + 1);
        const auto s = mean_se(xs);
        CHECK(std::abs(s.mean - b.zeta) < 4.0 * s.se + 1e-3);
    }
}

TEST_CASE("bounds report") {
    BoundsParameters params;
    const auto r = bounds_report(params);
    CHECK(r.at("p") == 0.2);
    CHECK(r.at("timer_threshold") == doctest::Approx(128.1).epsilon(1e-3));
    CHECK(r.at("t_base") == r.at("timer_threshold"));
    CHECK(r.at("matching_precision_upper") <= 1.0);
    CHECK_THROWS_AS(r.at("nope"), std::out_of_range);
}
