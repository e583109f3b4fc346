#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "wordnorms/error.hpp"
#include "wordnorms/metrics.hpp"

namespace wordnorms {
namespace {

using V = std::vector<double>;

TEST(Pearson, ExactLinearRelations) {
    EXPECT_DOUBLE_EQ(*pearson(V{1, 2, 3}, V{2, 4, 6}), 1.0);
    EXPECT_DOUBLE_EQ(*pearson(V{1, 2, 3}, V{6, 4, 2}), -1.0);
}

TEST(Pearson, HandEvaluatedValue) {
    // Deviations (-1.5,-0.5,0.5,1.5) and (-1.5,0.5,-0.5,1.5): cross 4.0, squares 5.0 each.
    EXPECT_NEAR(*pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}), 0.8, 1e-12);
    EXPECT_NEAR(*testing::oracle_pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}), 0.8, 1e-12);
}

TEST(Pearson, UndefinedCases) {
    EXPECT_FALSE(pearson(V{5, 5, 5}, V{1, 2, 3}).has_value());
    EXPECT_FALSE(pearson(V{1, 2, 3}, V{0.1, 0.1, 0.1}).has_value());
    EXPECT_FALSE(pearson(V{1}, V{2}).has_value());
    EXPECT_FALSE(pearson(V{}, V{}).has_value());
}

TEST(Pearson, LengthMismatch) {
    try {
        pearson(V{1, 2}, V{1, 2, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
    EXPECT_THROW(spearman(V{1, 2}, V{1}), Error);
}

TEST(Spearman, MonotonicAndTied) {
    EXPECT_DOUBLE_EQ(*spearman(V{1, 2, 3}, V{10, 20, 30}), 1.0);
    EXPECT_NEAR(*spearman(V{1, 2, 2, 4}, V{1, 2, 3, 4}), 4.5 / std::sqrt(22.5), 1e-12);
    EXPECT_NEAR(*testing::oracle_spearman(V{1, 2, 2, 4}, V{1, 2, 3, 4}), 4.5 / std::sqrt(22.5), 1e-12);
    EXPECT_FALSE(spearman(V{3, 3, 3, 3}, V{1, 2, 3, 4}).has_value());
}

TEST(AverageRanks, MatchesPairwiseOracle) {
    const V v{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5};
    EXPECT_EQ(average_ranks(v), testing::oracle_ranks(v));
    EXPECT_EQ(average_ranks(V{1, 2, 2, 4}), (V{1, 2.5, 2.5, 4}));
}

TEST(RoundSeries, HalfAwayFromZeroAndClamp) {
    EXPECT_EQ(round_series(V{1.01, 1.02}), (V{1, 1}));
    EXPECT_EQ(round_series(V{4.5, 2.49}), (V{5, 2}));
    EXPECT_EQ(round_series(V{9.4}, RatingScale(1, 9)), (V{9}));
    EXPECT_EQ(round_series(V{0.5, 5.5, 0.49}, RatingScale(0, 5)), (V{1, 5, 0}));
    EXPECT_EQ(round_series(V{9.6}, RatingScale(1, 9)), (V{9}));
}

// Random series with deliberate ties and constant runs, n <= 50.
std::pair<V, V> random_pair(std::mt19937_64& rng) {
    const std::size_t n = 2 + rng() % 49;
    V x(n);
    V y(n);
    const int mode = static_cast<int>(rng() % 5);
    std::uniform_real_distribution<double> u(-3.0, 9.0);
    std::uniform_int_distribution<int> digit(0, 4);
    for (std::size_t i = 0; i < n; ++i) {
        switch (mode) {
            case 0: x[i] = u(rng); y[i] = u(rng); break;
            case 1: x[i] = digit(rng); y[i] = digit(rng) + 0.5 * x[i]; break;
            case 2: x[i] = 2.5; y[i] = u(rng); break;
            case 3: x[i] = u(rng); y[i] = 2.0 * x[i] + 0.01 * u(rng); break;
            default: x[i] = std::round(u(rng)); y[i] = std::round(u(rng) / 3.0); break;
        }
    }
    return {x, y};
}

void expect_same(const Coefficient& got, const std::optional<double>& want) {
    ASSERT_EQ(got.has_value(), want.has_value());
    if (want) EXPECT_NEAR(*got, *want, 1e-12);
}

TEST(CorrelationOracles, RandomSeriesAgreeWithBruteForce) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto [x, y] = random_pair(rng);
        expect_same(pearson(x, y), testing::oracle_pearson(x, y));
        expect_same(spearman(x, y), testing::oracle_spearman(x, y));
    }
}

TEST(CorrelationProperties, AffineMonotoneSymmetryAndRange) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 3 + rng() % 60;
        V x(n);
        V y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            y[i] = u(rng);
        }
        double a = u(rng);
        if (std::abs(a) < 0.1) a = 0.5;
        const double b = u(rng);
        V affine(n);
        V monotone(n);
        for (std::size_t i = 0; i < n; ++i) {
            affine[i] = a * x[i] + b;
            monotone[i] = std::exp(x[i]) + x[i] * x[i] * x[i];
        }
        EXPECT_NEAR(*pearson(x, affine), a > 0 ? 1.0 : -1.0, 1e-12);
        EXPECT_NEAR(*spearman(monotone, y), *spearman(x, y), 1e-12);
        EXPECT_EQ(*pearson(x, y), *pearson(y, x));
        EXPECT_EQ(*spearman(x, y), *spearman(y, x));
        for (const auto c : {*pearson(x, y), *spearman(x, y)}) {
            EXPECT_GE(c, -1.0);
            EXPECT_LE(c, 1.0);
        }
    }
}

TEST(AlignmentMatrix, IdentityGivesOnes) {
    PairedSeries s{{"a", "b", "c", "d"}, {1.2, 3.7, 5.1, 8.8}, {1.2, 3.7, 5.1, 8.8}};
    const auto r = alignment_matrix(s, RatingScale(1, 9));
    EXPECT_EQ(*r.pearson_raw, 1.0);
    EXPECT_EQ(*r.spearman_raw, 1.0);
    EXPECT_EQ(*r.pearson_rounded, 1.0);
    EXPECT_EQ(*r.spearman_rounded, 1.0);
    EXPECT_FALSE(r.divergence_flag);
    EXPECT_EQ(r.n_words, 4u);
}

TEST(AlignmentMatrix, RoundedModelMatchesRoundedHuman) {
    const V human{1.4, 2.6, 3.5, 6.2, 8.9, 4.49};
    PairedSeries s{{}, human, round_series(human, RatingScale(1, 9))};
    const auto r = alignment_matrix(s, RatingScale(1, 9));
    EXPECT_EQ(*r.pearson_rounded, 1.0);
    EXPECT_EQ(*r.spearman_rounded, 1.0);
    EXPECT_LT(*r.pearson_raw, 1.0);
}

TEST(AlignmentMatrix, RoundingSideSwitch) {
    PairedSeries s{{}, {1.4, 2.6, 3.5, 6.2, 8.9}, {1.0, 3.0, 4.0, 6.0, 9.0}};
    MetricOptions human_only{0.15, RoundingSide::Human};
    EXPECT_EQ(*alignment_matrix(s, RatingScale(1, 9), human_only).pearson_rounded, 1.0);
    MetricOptions model_only{0.15, RoundingSide::Model};
    EXPECT_EQ(*alignment_matrix(s, RatingScale(1, 9), model_only).pearson_rounded,
              *alignment_matrix(s, RatingScale(1, 9), model_only).pearson_raw);
}

TEST(AlignmentMatrix, IndependentSeriesNearZero) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, 9.0);
    PairedSeries s;
    for (int i = 0; i < 1000; ++i) {
        s.human.push_back(u(rng));
        s.model.push_back(u(rng));
    }
    const auto r = alignment_matrix(s, RatingScale(1, 9));
    for (const auto& c : {r.pearson_raw, r.pearson_rounded, r.spearman_raw, r.spearman_rounded}) {
        ASSERT_TRUE(c.has_value());
        EXPECT_LT(std::abs(*c), 0.1);
    }
}

TEST(AlignmentMatrix, CollapsedRoundedSeriesIsUndefinedNotZero) {
    PairedSeries s{{}, {0.1, 0.2, 0.3, 0.4}, {0.2, 0.1, 0.4, 0.3}};
    const auto r = alignment_matrix(s, RatingScale(0, 5));
    EXPECT_TRUE(r.pearson_raw.has_value());
    EXPECT_FALSE(r.pearson_rounded.has_value());
    EXPECT_FALSE(r.spearman_rounded.has_value());
}

TEST(AlignmentMatrix, DivergenceFlagFollowsThreshold) {
    // One high outlier dominates Pearson; ranks of the bulk are reversed.
    PairedSeries s{{}, {0.1, 0.2, 0.3, 0.4, 0.5, 4.8}, {0.5, 0.4, 0.3, 0.2, 0.1, 4.9}};
    const auto r = alignment_matrix(s, RatingScale(0, 5));
    EXPECT_GT(*r.pearson_raw - *r.spearman_raw, 0.15);
    EXPECT_TRUE(r.divergence_flag);
    EXPECT_FALSE(alignment_matrix(s, RatingScale(0, 5), {2.0, RoundingSide::Both}).divergence_flag);
}

TEST(AlignmentMatrix, TooFewPairs) {
    try {
        alignment_matrix({{}, {1, 2}, {1, 2}}, RatingScale(1, 9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewPairs);
    }
}

}  // namespace
}  // namespace wordnorms
