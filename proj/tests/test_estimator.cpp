#include <random>

#include <gtest/gtest.h>

#include "wordnorms/error.hpp"
#include "wordnorms/estimator.hpp"

namespace wordnorms {
namespace {

TokenDistribution raw(std::map<std::string, double> entries) { return {std::move(entries), ResponseSource::Mock}; }

ScaleDistribution scaled(std::map<int, double> probabilities) { return {std::move(probabilities), 1.0}; }

TEST(ExtractScaleDistribution, TrimsMergesAndRenormalizes) {
    const auto d = extract_scale_distribution(raw({{" 7", 0.5}, {"7", 0.2}, {"cat", 0.3}}), RatingScale(1, 9));
    ASSERT_EQ(d.probabilities.size(), 1u);
    EXPECT_EQ(d.probabilities.at(7), 1.0);
    EXPECT_NEAR(d.coverage_mass, 0.7, 1e-15);
}

TEST(ExtractScaleDistribution, KeepsBothEndsOfTheScale) {
    const auto d = extract_scale_distribution(raw({{"0", 0.5}, {"5", 0.5}}), RatingScale(0, 5));
    EXPECT_EQ(d.probabilities, (std::map<int, double>{{0, 0.5}, {5, 0.5}}));
    EXPECT_EQ(d.coverage_mass, 1.0);
}

TEST(ExtractScaleDistribution, NoRatingTokenIsAnError) {
    try {
        extract_scale_distribution(raw({{"yes", 0.9}, {"no", 0.1}}), RatingScale(1, 9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoValidToken);
    }
    EXPECT_THROW(extract_scale_distribution(raw({}), RatingScale(1, 9)), Error);
}

TEST(ExtractScaleDistribution, DropsOutOfScaleAndMultiDigitTokens) {
    const auto d = extract_scale_distribution(raw({{"0", 0.2}, {"10", 0.2}, {"-3", 0.1}, {"3.5", 0.1}, {"\n4", 0.4}}),
                                              RatingScale(1, 9));
    EXPECT_EQ(d.probabilities, (std::map<int, double>{{4, 1.0}}));
    EXPECT_NEAR(d.coverage_mass, 0.4, 1e-15);
}

TEST(WeightedEstimate, PointMassAndExpectedValue) {
    EXPECT_EQ(weighted_estimate(scaled({{7, 1.0}})), 7.0);
    EXPECT_EQ(weighted_estimate(scaled({{6, 0.1}, {7, 0.6}, {8, 0.3}})), 7.2);
}

TEST(WeightedEstimate, LemonGustatoryFixture) {
    EXPECT_NEAR(weighted_estimate(scaled({{4, 0.51}, {5, 0.49}})), 4.49, 1e-12);
}

TEST(ArgmaxEstimate, UniqueMaxTieAndPointMass) {
    EXPECT_EQ(argmax_estimate(scaled({{6, 0.1}, {7, 0.6}, {8, 0.3}})), 7);
    EXPECT_EQ(argmax_estimate(scaled({{3, 0.5}, {4, 0.5}})), 3);
    EXPECT_EQ(argmax_estimate(scaled({{2, 1.0}})), 2);
    EXPECT_EQ(argmax_estimate(scaled({{1, 0.3}, {5, 0.3}, {9, 0.3}})), 1);
}

TEST(Estimate, CombinesBothEstimatorsAndCoverage) {
    const NormFeature f = feature_registry().at(0);
    const auto e = estimate(raw({{"6", 0.05}, {"7", 0.3}, {" 7", 0.3}, {"8", 0.25}, {"I", 0.1}}), f, "dance", "m");
    EXPECT_EQ(e.argmax_value, 7);
    EXPECT_NEAR(e.weighted_value, (6 * 0.05 + 7 * 0.6 + 8 * 0.25) / 0.9, 1e-12);
    EXPECT_NEAR(e.coverage_mass, 0.9, 1e-12);
    EXPECT_TRUE(e.compliant());
    EXPECT_FALSE(e.compliant(0.95));
}

TokenDistribution random_raw(std::mt19937_64& rng, const RatingScale& scale) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::uniform_int_distribution<int> point(scale.min(), scale.max());
    std::bernoulli_distribution coin(0.5);
    std::map<std::string, double> entries;
    const int k = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) {
        const auto token = (coin(rng) ? " " : "") + std::to_string(point(rng));
        entries[token] += u(rng);
    }
    if (coin(rng)) entries["The"] = u(rng);
    double total = 0.0;
    for (const auto& [t, p] : entries) total += p;
    for (auto& [t, p] : entries) p /= total * 1.0000001;
    return raw(entries);
}

TEST(EstimatorProperties, ConvexityScalingIdempotenceAndPointMass) {
    std::mt19937_64 rng(11);
    const RatingScale scales[] = {RatingScale(1, 9), RatingScale(0, 5), RatingScale(1, 7)};
    for (int trial = 0; trial < 2000; ++trial) {
        const auto& scale = scales[trial % 3];
        const auto r = random_raw(rng, scale);
        const auto d = extract_scale_distribution(r, scale);

        double total = 0.0;
        for (const auto& [v, p] : d.probabilities) total += p;
        EXPECT_NEAR(total, 1.0, 1e-9);

        const double w = weighted_estimate(d);
        EXPECT_GE(w, d.probabilities.begin()->first);
        EXPECT_LE(w, d.probabilities.rbegin()->first);
        EXPECT_GE(w, scale.min());
        EXPECT_LE(w, scale.max());

        // Scaling raw mass by a positive constant changes nothing downstream.
        TokenDistribution shrunk = r;
        for (auto& [t, p] : shrunk.entries) p *= 0.37;
        const auto ds = extract_scale_distribution(shrunk, scale);
        EXPECT_EQ(argmax_estimate(ds), argmax_estimate(d));
        EXPECT_NEAR(weighted_estimate(ds), w, 1e-12);

        // Feeding the clean distribution back is a fixed point.
        TokenDistribution clean;
        for (const auto& [v, p] : d.probabilities) clean.entries[std::to_string(v)] = p;
        const auto again = extract_scale_distribution(clean, scale);
        for (const auto& [v, p] : d.probabilities) EXPECT_NEAR(again.probabilities.at(v), p, 1e-15);
        EXPECT_NEAR(again.coverage_mass, 1.0, 1e-9);

        const int point = scale.min() + static_cast<int>(rng() % static_cast<unsigned>(scale.points()));
        const auto mass = scaled({{point, 1.0}});
        EXPECT_EQ(weighted_estimate(mass), static_cast<double>(argmax_estimate(mass)));
    }
}

TEST(EstimateRecords, JsonLineRoundTrip) {
    const RatingEstimate e{"toast (bread)", "concreteness", "gpt-4o", 7, 6.912345678901234, 0.98765};
    EXPECT_EQ(parse_estimate_line(to_json_line(e)), e);
    EXPECT_THROW(parse_estimate_line("{\"word\":1}"), Error);
}

}  // namespace
}  // namespace wordnorms
