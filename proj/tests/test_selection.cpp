#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "egnn/selection.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("average ranks split ties evenly") {
    const std::vector<double> v = {10.0, 20.0, 20.0, 30.0};
    REQUIRE(egnn::average_ranks(v) == std::vector<double>{1.0, 2.5, 2.5, 4.0});

    const std::vector<double> distinct = {3.0, 1.0, 2.0};
    REQUIRE(egnn::average_ranks(distinct) == std::vector<double>{3.0, 1.0, 2.0});

    const std::vector<double> constant = {7.0, 7.0, 7.0};
    REQUIRE(egnn::average_ranks(constant) == std::vector<double>{2.0, 2.0, 2.0});
}

TEST_CASE("rank correlation fixed points") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> up = {10.0, 20.0, 30.0};
    const std::vector<double> down = {30.0, 20.0, 10.0};
    REQUIRE(egnn::spearman(a, up) == 1.0);
    REQUIRE(egnn::spearman(a, down) == -1.0);

    const std::vector<double> id4 = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> swapped = {1.0, 3.0, 2.0, 4.0};
    REQUIRE(egnn::spearman(id4, swapped) == 0.8);

    const std::vector<double> flat = {5.0, 5.0, 5.0};
    REQUIRE(egnn::spearman(flat, a) == 0.0);
}

TEST_CASE("rank correlation averages tied ranks") {
    const std::vector<double> tied = {1.0, 2.0, 2.0, 3.0};
    const std::vector<double> id4 = {1.0, 2.0, 3.0, 4.0};
    // ranks of tied are [1, 2.5, 2.5, 4]: cov 4.5, variances 4.5 and 5.
    REQUIRE_THAT(egnn::spearman(tied, id4), WithinAbs(4.5 / std::sqrt(22.5), 1e-15));
}

TEST_CASE("rank correlation is symmetric, bounded, and monotone-invariant") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(20), b(20);
        for (double& v : a) v = dist(rng);
        for (double& v : b) v = dist(rng);
        const double sp = egnn::spearman(a, b);
        REQUIRE(sp == egnn::spearman(b, a));
        REQUIRE(std::abs(sp) <= 1.0 + 1e-12);

        std::vector<double> warped(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) warped[i] = std::exp(a[i] / 10.0);
        REQUIRE(egnn::spearman(warped, b) == sp);
    }
}

TEST_CASE("rank correlation input validation") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    const std::vector<double> shorter = {1.0, 2.0};
    const std::vector<double> single = {1.0};
    REQUIRE_THROWS_AS(egnn::spearman(a, shorter), std::invalid_argument);
    REQUIRE_THROWS_AS(egnn::spearman(single, single), std::invalid_argument);
}

TEST_CASE("feature scoring puts the class-aligned feature first without a penalty") {
    const std::vector<int> y = {1, 2, 3, 4, 1, 2, 3, 4};
    std::vector<std::vector<double>> X;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double target = 2.0 * y[i] + 1.0;           // monotone in the label
        const double noise = static_cast<double>(i % 3);  // weakly associated
        X.push_back({noise, target});
    }
    const auto ranking = egnn::score_features(X, y, 0.0);
    REQUIRE(ranking.order.size() == 2);
    REQUIRE(ranking.order[0].index == 1);
    REQUIRE(ranking.order[0].class_assoc == 1.0);
    REQUIRE(ranking.order[0].score == 1.0);  // lambda 0 ignores redundancy
}

TEST_CASE("redundancy penalty demotes duplicated features") {
    // f0 and f1 are identical; f2 has the same class association (an adjacent
    // transposition of the identity shifts rank covariance by the same amount
    // wherever it lands) but is not duplicated.
    const std::vector<int> y = {1, 2, 3, 4, 5, 6};
    const std::vector<double> f0 = {1.0, 2.0, 3.0, 5.0, 4.0, 6.0};
    const std::vector<double> f2 = {2.0, 1.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<std::vector<double>> X;
    for (std::size_t i = 0; i < y.size(); ++i) X.push_back({f0[i], f0[i], f2[i]});

    const auto ranking = egnn::score_features(X, y, 1.0);
    REQUIRE(ranking.order[0].index == 2);
    REQUIRE(ranking.order[1].index == 0);  // tied duplicates keep index order
    REQUIRE(ranking.order[2].index == 1);
    REQUIRE(ranking.order[1].score == ranking.order[2].score);
    REQUIRE(ranking.order[0].class_assoc == ranking.order[1].class_assoc);
    REQUIRE(ranking.order[0].redundancy < ranking.order[1].redundancy);
    REQUIRE(ranking.lambda == 1.0);
}

TEST_CASE("a constant feature scores zero on both terms") {
    const std::vector<int> y = {1, 2, 1, 2, 1, 2};
    std::vector<std::vector<double>> X;
    for (std::size_t i = 0; i < y.size(); ++i)
        X.push_back({static_cast<double>(y[i]), 4.0});
    const auto ranking = egnn::score_features(X, y, 1.0);
    REQUIRE(ranking.order[1].index == 1);
    REQUIRE(ranking.order[1].class_assoc == 0.0);
    REQUIRE(ranking.order[1].redundancy == 0.0);
    REQUIRE(ranking.order[1].score == 0.0);
}

TEST_CASE("feature scores ignore positive rescaling") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<int> y(30);
    std::vector<std::vector<double>> X(30, std::vector<double>(3));
    for (std::size_t i = 0; i < X.size(); ++i) {
        y[i] = 1 + static_cast<int>(i % 4);
        for (double& v : X[i]) v = dist(rng);
    }
    auto scaled = X;
    for (auto& row : scaled) row[1] *= 1000.0;

    const auto base = egnn::score_features(X, y, 1.0);
    const auto redone = egnn::score_features(scaled, y, 1.0);
    for (std::size_t j = 0; j < base.order.size(); ++j) {
        REQUIRE(base.order[j].index == redone.order[j].index);
        REQUIRE(base.order[j].score == redone.order[j].score);
    }
}

TEST_CASE("feature scoring input validation") {
    const std::vector<int> y = {1, 2};
    REQUIRE_THROWS_AS(egnn::score_features({{1.0}}, std::vector<int>{1}, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(egnn::score_features({{1.0}, {2.0}}, std::vector<int>{1}, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(egnn::score_features({{1.0}, {2.0, 3.0}}, y, 1.0), std::invalid_argument);
}

TEST_CASE("band sums split class association by band and hemisphere") {
    const std::vector<std::string> names = {"Af3.Alpha.max", "Af4.Alpha.max", "O1.Delta.mean"};
    const std::vector<int> y = {1, 2, 3, 4};
    const std::vector<std::vector<double>> X = {
        {1.0, 4.0, 1.0}, {2.0, 3.0, 2.0}, {3.0, 2.0, 2.0}, {4.0, 1.0, 1.0}};

    const auto sums = egnn::band_correlation_sums(X, y, names);
    REQUIRE(sums.total.at("Alpha") == 2.0);  // two perfectly monotone columns
    REQUIRE(sums.total.at("Delta") == 0.0);  // symmetric column has no association
    REQUIRE(sums.left.at("Alpha") == 1.0);
    REQUIRE(sums.right.at("Alpha") == 1.0);
    REQUIRE(sums.left.at("Delta") == 0.0);
    REQUIRE(sums.right.count("Delta") == 0);

    REQUIRE_THROWS_AS(egnn::band_correlation_sums(X, y, std::vector<std::string>{"Af3.Alpha.max"}),
                      std::invalid_argument);
}

TEST_CASE("leave-k-out schedule walks nested rank prefixes") {
    std::vector<std::size_t> ranked(140);
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;

    const auto subsets = egnn::leave_k_out_schedule(ranked, 5, 10);
    REQUIRE(subsets.size() == 27);
    REQUIRE(subsets.front().size() == 140);
    REQUIRE(subsets.back().size() == 10);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        REQUIRE(subsets[i].size() == 140 - 5 * i);
        if (i > 0) {
            // each subset is a prefix of the one before it
            for (std::size_t j = 0; j < subsets[i].size(); ++j)
                REQUIRE(subsets[i][j] == subsets[i - 1][j]);
        }
    }
}

TEST_CASE("leave-k-out schedule edge shapes") {
    std::vector<std::size_t> ten(10);
    for (std::size_t i = 0; i < ten.size(); ++i) ten[i] = i;

    const auto pair = egnn::leave_k_out_schedule(ten, 5);
    REQUIRE(pair.size() == 2);
    REQUIRE(pair[0].size() == 10);
    REQUIRE(pair[1].size() == 5);

    const auto whole = egnn::leave_k_out_schedule(ten, 10);
    REQUIRE(whole.size() == 1);
    REQUIRE(whole[0] == ten);

    // min_size beyond the feature count clamps to the feature count
    const auto clamped = egnn::leave_k_out_schedule(ten, 3, 99);
    REQUIRE(clamped.size() == 1);
    REQUIRE(clamped[0] == ten);

    REQUIRE(egnn::leave_k_out_schedule(std::vector<std::size_t>{}, 2).empty());
    REQUIRE_THROWS_AS(egnn::leave_k_out_schedule(ten, 0), std::invalid_argument);
}

TEST_CASE("leave-k-out schedule follows the ranking order") {
    egnn::FeatureRanking ranking;
    ranking.order = {{7, 0.9, 0.9, 0.0}, {2, 0.5, 0.5, 0.0}, {5, 0.1, 0.1, 0.0}};
    const auto subsets = egnn::leave_k_out_schedule(ranking, 1);
    REQUIRE(subsets.size() == 3);
    REQUIRE(subsets[0] == std::vector<std::size_t>{7, 2, 5});
    REQUIRE(subsets[1] == std::vector<std::size_t>{7, 2});
    REQUIRE(subsets[2] == std::vector<std::size_t>{7});
}
