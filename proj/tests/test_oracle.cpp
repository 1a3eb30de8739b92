#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "actscan/error.hpp"
#include "actscan/oracle.hpp"
#include "test_util.hpp"

using namespace actscan;

TEST_CASE("oracle on a single node matches the scan") {
    const RangeVector one = {{0.0, 0.5}};
    const auto o = exhaustive_scan(one, ScanConfig{});
    const auto s = scan(one, ScanConfig{}, NetworkLayout::single(1));
    CHECK(o.subset == std::vector<std::size_t>{0});
    CHECK(o.score == s.score);
    CHECK(o.alpha_star == s.alpha_star);
}

TEST_CASE("two-node instance picks the first node alone at alpha 0.2") {
    // candidates {0.2, 0.8, 1.0}; 40-digit evaluation of all 9 (subset, alpha) pairs:
    //   {0}@0.2 = ln 5, {0,1}@0.2 = 0.44628710262841951153, {0}@0.8 = 0.22314355131420975577,
    //   every other pair scores 0
    const RangeVector two = {{0.0, 0.2}, {0.8, 1.0}};
    const auto o = exhaustive_scan(two, ScanConfig{});
    CHECK(o.subset == std::vector<std::size_t>{0});
    CHECK(o.alpha_star == 0.2);
    CHECK(std::abs(o.score - 1.6094379124341003746) < 1e-15);
    CHECK(berk_jones(0.2, 1.0, 2) == doctest::Approx(0.44628710262841951153).epsilon(1e-14));
    CHECK(berk_jones(0.8, 1.0, 1) == doctest::Approx(0.22314355131420975577).epsilon(1e-14));

    const auto s = scan(two, ScanConfig{}, NetworkLayout::single(2));
    CHECK(s.subset == o.subset);
    CHECK(s.score == doctest::Approx(o.score).epsilon(1e-15));
}

TEST_CASE("oracle agrees with the scan on random instances") {
    std::mt19937_64 rng(2718);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> nodes(2, 12), bg(3, 20);
        const auto ranges = test::random_ranges(rng, nodes(rng), bg(rng), 0.35);
        const auto layout = NetworkLayout::single(ranges.size());
        ScanConfig cfg;
        cfg.alpha_max = trial % 2 ? 0.3 : 1.0;
        const auto o = exhaustive_scan(ranges, cfg);
        const auto s = scan(ranges, cfg, layout);
        CHECK(std::abs(o.score - s.score) <= 1e-9);
        // the scan's subset must itself attain the optimum
        const double rescored = berk_jones(s.alpha_star, subset_n_alpha(ranges, s.subset, s.alpha_star), s.n);
        CHECK(std::abs(rescored - o.score) <= 1e-9);
        ++compared;
    }
    CHECK(compared == 200);
}

TEST_CASE("oracle score is invariant to node permutation") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        auto ranges = test::random_ranges(rng, 2 + rng() % 9, 3 + rng() % 15);
        const auto before = exhaustive_scan(ranges, ScanConfig{});

        std::vector<std::size_t> perm = test::iota_nodes(ranges.size());
        std::shuffle(perm.begin(), perm.end(), rng);
        RangeVector permuted(ranges.size());
        for (std::size_t j = 0; j < ranges.size(); ++j) permuted[perm[j]] = ranges[j];
        const auto after = exhaustive_scan(permuted, ScanConfig{});

        CHECK(after.score == doctest::Approx(before.score).epsilon(1e-12));
        // relabeled subset has the same score
        std::vector<std::size_t> relabeled;
        for (auto node : before.subset) relabeled.push_back(perm[node]);
        std::sort(relabeled.begin(), relabeled.end());
        CHECK(berk_jones(before.alpha_star, subset_n_alpha(permuted, relabeled, before.alpha_star),
                         relabeled.size()) == doctest::Approx(after.score).epsilon(1e-12));
    }
}

TEST_CASE("oracle tie-break prefers smaller subsets") {
    // two identical nodes, both fully below the first candidate: {0} and {1}
    // tie with each other, {0,1} scores higher
    const RangeVector same = {{0.0, 0.1}, {0.0, 0.1}};
    const auto o = exhaustive_scan(same, ScanConfig{});
    CHECK(o.subset == std::vector<std::size_t>{0, 1});

    // all-zero scores resolve to the first singleton
    const RangeVector flat = {{0.0, 1.0}, {0.0, 1.0}};
    const auto z = exhaustive_scan(flat, ScanConfig{});
    CHECK(z.score == 0.0);
    CHECK(z.subset == std::vector<std::size_t>{0});
}

TEST_CASE("oracle refuses large or restricted inputs") {
    RangeVector big(kOracleMaxNodes + 1, PValueRange{0.0, 0.5});
    CHECK_THROWS_AS(exhaustive_scan(big, ScanConfig{}), Error);
    ScanConfig restricted;
    restricted.layer_restriction = std::vector<std::string>{"a"};
    CHECK_THROWS_AS(exhaustive_scan(RangeVector{{0.0, 0.5}}, restricted), Error);
    CHECK_THROWS_AS(exhaustive_scan(RangeVector{}, ScanConfig{}), Error);
}
