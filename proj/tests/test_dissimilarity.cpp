#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nullboot/dissimilarity.hpp"
#include "nullboot/errors.hpp"

using namespace nullboot;

TEST(MixedDistance, SpecExamples) {
    const std::vector<VariableSpec> one{{"x", VarKind::continuous, {}, 1.0}};
    const MixedDataset d1(one, 3, {1.0, 4.0, 1.0});
    const auto m1 = mixed_type_distance(d1, MixedDistanceConfig::defaults(one));
    EXPECT_DOUBLE_EQ(m1(0, 1), 3.0);
    EXPECT_EQ(m1(0, 2), 0.0);

    const std::vector<VariableSpec> nom{{"h", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    const MixedDataset d2(nom, 2, {0, 1});
    EXPECT_DOUBLE_EQ(mixed_type_distance(d2, MixedDistanceConfig::defaults(nom))(0, 1), std::sqrt(2.0));
}

TEST(MixedDistance, LikertCodingAndWeights) {
    const std::vector<VariableSpec> specs{{"o", VarKind::ordinal, {"lo", "mid", "hi"}, 1.0},
                                          {"h", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    const MixedDataset d(specs, 2, {0, 0, 2, 2});
    MixedDistanceConfig cfg = MixedDistanceConfig::defaults(specs);
    cfg.weights = {0.25, 2.0};
    cfg.dummy_weights[1] = {1.0, 1.0, 3.0};
    // 0.25 * 2^2 + 2 * (1 + 3)
    EXPECT_DOUBLE_EQ(mixed_type_distance(d, cfg)(0, 1), std::sqrt(1.0 + 8.0));
}

TEST(MixedDistance, UniformWeightScalesBySqrt) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    const std::vector<VariableSpec> specs{{"x", VarKind::continuous, {}, 1.0}, {"y", VarKind::continuous, {}, 0.5},
                                          {"b", VarKind::binary, {"n", "y"}, 2.0}};
    std::vector<double> values;
    for (int i = 0; i < 10; ++i) {
        values.push_back(z(rng));
        values.push_back(z(rng));
        values.push_back(i % 2);
    }
    const MixedDataset d(specs, 10, values);
    MixedDistanceConfig cfg = MixedDistanceConfig::defaults(specs);
    const auto base = mixed_type_distance(d, cfg);
    for (auto& w : cfg.weights) w *= 4.0;
    const auto scaled = mixed_type_distance(d, cfg);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(scaled(i, j), 2.0 * base(i, j), 1e-12);
}

TEST(MixedDistance, RejectsShapeMismatch) {
    const std::vector<VariableSpec> specs{{"h", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    const MixedDataset d(specs, 2, {0, 1});
    MixedDistanceConfig cfg = MixedDistanceConfig::defaults(specs);
    cfg.dummy_weights[0] = {1.0};
    EXPECT_THROW(mixed_type_distance(d, cfg), ValidationError);
    cfg = MixedDistanceConfig::defaults(specs);
    cfg.weights.push_back(1.0);
    EXPECT_THROW(mixed_type_distance(d, cfg), ValidationError);
}

TEST(Kulczynski, SpecExamples) {
    // s1 = {A,B}, s2 = {B,C,D}, s3 = {A,B}, s4 = {E}
    const PresenceAbsenceData d({"s1", "s2", "s3", "s4"}, {"A", "B", "C", "D", "E"},
                                {1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1}, Adjacency(5));
    const auto k = kulczynski_matrix(d);
    EXPECT_NEAR(k(0, 1), 7.0 / 12.0, 1e-15);
    EXPECT_EQ(k(0, 2), 0.0);
    EXPECT_EQ(k(0, 3), 1.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_GE(k(i, j), 0.0);
            EXPECT_LE(k(i, j), 1.0);
        }
}

TEST(SeriesDistance, SpecExamples) {
    const CategoricalSeriesDataset d(2, 3, 7, {{0, 1}, {0, 2}, {0, 1}});
    const auto m = series_distance(d, default_series_costs(3));
    EXPECT_DOUBLE_EQ(m(0, 1), 0.5);
    EXPECT_EQ(m(0, 2), 0.0);

    const CategoricalSeriesDataset e(4, 2, 7, {{0, 1, 1, 0}, {0, kMissing, 1, kMissing}});
    EXPECT_DOUBLE_EQ(series_distance(e, default_series_costs(2))(0, 1), 2.0 / 4.0);
}

TEST(SeriesDistance, AllOnesCostsEqualNormalizedHamming) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cat(-1, 3);
    std::vector<std::vector<int>> series(8, std::vector<int>(30));
    for (auto& s : series)
        for (auto& c : s) c = cat(rng);
    const CategoricalSeriesDataset d(30, 4, 7, series);
    const auto m = series_distance(d, default_series_costs(4));
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            int diff = 0;
            for (std::size_t t = 0; t < 30; ++t) diff += series[i][t] != series[j][t];
            EXPECT_DOUBLE_EQ(m(i, j), diff / 30.0);
        }
}

TEST(SeriesDistance, RejectsInvalidCosts) {
    const CategoricalSeriesDataset d(2, 2, 7, {{0, 1}, {1, 1}});
    Eigen::MatrixXd c = default_series_costs(2);
    c(0, 1) = 2.0;
    EXPECT_THROW(series_distance(d, c), ValidationError);
    c = default_series_costs(2);
    c(1, 1) = 0.5;
    EXPECT_THROW(series_distance(d, c), ValidationError);
    EXPECT_THROW(series_distance(d, default_series_costs(3)), ValidationError);
}

TEST(EuclideanDistance, MatchesPointwiseNorm) {
    Eigen::MatrixXd p(3, 2);
    p << 0, 0, 3, 4, 1, 1;
    const auto d = euclidean_distance(p);
    EXPECT_DOUBLE_EQ(d(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(d(1, 2), std::sqrt(13.0));
}
