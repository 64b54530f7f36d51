#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"

#include "dandelion/assignment.hpp"
#include "dandelion/rng.hpp"

using namespace dandelion;

namespace {

// Best score over all injective row -> column maps, fewest forbidden pairs first.
std::pair<std::size_t, double> brute_force(const ScoreMatrix& s) {
    std::vector<std::size_t> cols(s.cols());
    std::iota(cols.begin(), cols.end(), 0);
    std::pair<std::size_t, double> best{s.rows() + 1, kForbidden};
    do {
        std::size_t forbidden = 0;
        double total = 0.0;
        for (std::size_t r = 0; r < s.rows(); ++r) {
            if (s(r, cols[r]) == kForbidden) ++forbidden;
            else total += s(r, cols[r]);
        }
        if (forbidden < best.first || (forbidden == best.first && total > best.second)) best = {forbidden, total};
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

}  // namespace

TEST_CASE("assignment matches exhaustive search") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng = make_rng(seed);
        const std::size_t rows = 1 + uniform_index(rng, 5);
        const std::size_t cols = rows + uniform_index(rng, 3);
        ScoreMatrix s(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) s(r, c) = uniform01(rng) < 0.3 ? kForbidden : std::log(uniform01(rng));
        const auto a = max_weight_assignment(s);
        REQUIRE(a.size() == rows);
        CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == rows);
        const auto [forbidden, best] = brute_force(s);
        std::size_t used_forbidden = 0;
        double total = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (s(r, a[r]) == kForbidden) ++used_forbidden;
            else total += s(r, a[r]);
        }
        CHECK(used_forbidden == forbidden);
        CHECK(total == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("assignment small cases") {
    SUBCASE("diagonal preference") {
        ScoreMatrix s(2, 2, -5.0);
        s(0, 0) = -1.0;
        s(1, 1) = -1.0;
        CHECK(max_weight_assignment(s) == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("only feasible pairing") {
        ScoreMatrix s(2, 3, kForbidden);
        s(0, 2) = -3.0;
        s(1, 2) = -1.0;
        s(1, 0) = -9.0;
        const auto a = max_weight_assignment(s);
        CHECK(a == std::vector<std::size_t>{2, 0});
        CHECK(assignment_score(s, a) == doctest::Approx(-12.0));
    }
    SUBCASE("empty matrix") { CHECK(max_weight_assignment(ScoreMatrix(0, 3)).empty()); }
}
