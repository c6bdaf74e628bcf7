#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nullboot/errors.hpp"
#include "nullboot/latent_gaussian.hpp"
#include "nullboot/log.hpp"
#include "nullboot/normal.hpp"

using namespace nullboot;

namespace {

struct QuietWarnings {
    WarningSink previous = set_warning_sink([](const std::string&) {});
    ~QuietWarnings() { set_warning_sink(previous); }
};

// Counts of a 2-way table obtained by cutting a simulated standard bivariate normal at the
// given inner thresholds.
Eigen::MatrixXd simulated_table(double rho, const std::vector<double>& rt, const std::vector<double>& ct, int n,
                                std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rt.size() + 1), static_cast<Eigen::Index>(ct.size() + 1));
    for (int i = 0; i < n; ++i) {
        const double a = z(rng);
        const double b = rho * a + std::sqrt(1 - rho * rho) * z(rng);
        const auto r = std::lower_bound(rt.begin(), rt.end(), a) - rt.begin();
        const auto c = std::lower_bound(ct.begin(), ct.end(), b) - ct.begin();
        t(r, c) += 1;
    }
    return t;
}

}  // namespace

TEST(Thresholds, CumulativeQuantiles) {
    const auto t = thresholds_from_counts(std::vector<double>{20, 30, 50});
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t[0], norm_quantile(0.2), 1e-15);
    EXPECT_NEAR(t[1], norm_quantile(0.5), 1e-15);
    EXPECT_THROW(thresholds_from_counts(std::vector<double>{1, 0, 2}), ValidationError);
}

TEST(Polychoric, IndependenceTableGivesZero) {
    const std::vector<double> rt{norm_quantile(0.3), norm_quantile(0.7)}, ct{norm_quantile(0.5)};
    const Eigen::MatrixXd probs = polychoric_cell_probabilities(0.0, rt, ct);
    EXPECT_NEAR(polychoric_correlation(probs * 1000.0, rt, ct), 0.0, 1e-3);
    EXPECT_NEAR(probs.sum(), 1.0, 1e-12);
}

TEST(Polychoric, RecoversSimulatedCorrelation) {
    std::mt19937_64 rng(67);
    const std::vector<double> cut{0.0};
    const Eigen::MatrixXd t = simulated_table(0.5, cut, cut, 5000, rng);
    const auto rt = thresholds_from_counts(std::vector<double>{t.row(0).sum(), t.row(1).sum()});
    const auto ct = thresholds_from_counts(std::vector<double>{t.col(0).sum(), t.col(1).sum()});
    EXPECT_NEAR(polychoric_correlation(t, rt, ct), 0.5, 0.05);
}

TEST(Polychoric, BoundaryAndDegenerateTables) {
    const std::vector<double> cut{0.0};
    Eigen::MatrixXd diag(2, 2);
    diag << 50, 0, 0, 50;
    EXPECT_NEAR(polychoric_correlation(diag, cut, cut), 0.999, 1e-6);
    Eigen::MatrixXd anti(2, 2);
    anti << 0, 50, 50, 0;
    EXPECT_NEAR(polychoric_correlation(anti, cut, cut), -0.999, 1e-6);
    Eigen::MatrixXd one_row(2, 2);
    one_row << 10, 20, 0, 0;
    EXPECT_THROW(polychoric_correlation(one_row, cut, cut), ValidationError);
    EXPECT_THROW(polychoric_correlation(diag, std::vector<double>{0.0, 1.0}, cut), ValidationError);
}

TEST(NominalOrdering, SortsByAverageDummyCorrelation) {
    // Level a goes with high x, b with low x, c in between: ascending order b, c, a.
    const std::vector<VariableSpec> specs{{"x", VarKind::continuous, {}, 1.0},
                                          {"g", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    std::vector<double> v;
    for (int i = 0; i < 30; ++i) {
        const double x = i;
        v.push_back(x);
        v.push_back(i < 10 ? 1 : (i < 20 ? 2 : 0));
    }
    EXPECT_EQ(nominal_ordering(MixedDataset(specs, 30, v), 1), (std::vector<int>{1, 2, 0}));
}

TEST(NominalOrdering, TiesKeepLevelOrderAndAbsentLevelsGoLast) {
    QuietWarnings quiet;
    const std::vector<VariableSpec> specs{{"g", VarKind::nominal, {"a", "b", "c"}, 1.0},
                                          {"h", VarKind::nominal, {"u", "v", "w"}, 1.0}};
    const MixedDataset d(specs, 4, {0, 0, 1, 1, 1, 2, 0, 0});
    EXPECT_EQ(nominal_ordering(d, 0), (std::vector<int>{0, 1, 2}));
    std::vector<std::string> seen;
    auto prev = set_warning_sink([&](const std::string& m) { seen.push_back(m); });
    const std::vector<VariableSpec> s2{{"x", VarKind::continuous, {}, 1.0}, {"g", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    const MixedDataset d2(s2, 4, {1, 1, 2, 2, 3, 1, 4, 2});
    EXPECT_EQ(nominal_ordering(d2, 1), (std::vector<int>{1, 2, 0}));
    set_warning_sink(prev);
    EXPECT_EQ(seen.size(), 1u);
    EXPECT_THROW(nominal_ordering(d2, 0), ValidationError);
}

TEST(ProjectToCorrelation, RepairsIndefiniteMatrix) {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
    const Eigen::MatrixXd p = project_to_correlation(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(p(i, i), 1.0, 1e-12);
    EXPECT_LT((p - p.transpose()).norm(), 1e-14);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    EXPECT_LT((project_to_correlation(id) - id).norm(), 1e-14);
}

TEST(OrdinalCodes, EqualCountBinsKeepTiesTogether) {
    const std::vector<VariableSpec> specs{{"x", VarKind::continuous, {}, 1.0}};
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(i < 30 ? 0.0 : i);
    const auto codes = ordinal_codes(MixedDataset(specs, 100, v), 0, 10);
    for (int i = 1; i < 30; ++i) EXPECT_EQ(codes[static_cast<std::size_t>(i)], codes[0]);
    for (int i = 1; i < 100; ++i) EXPECT_GE(codes[static_cast<std::size_t>(i)], codes[static_cast<std::size_t>(i - 1)]);
    EXPECT_EQ(codes[0], 0);
    const int top = *std::max_element(codes.begin(), codes.end());
    EXPECT_GE(top, 6);
    EXPECT_LE(top, 9);
}

namespace {

// Gaussian copula data: x0 continuous (log-normal with a floor), x1 ordinal terciles,
// x2 binary, x3 nominal whose latent order is (c, a, b).
MixedDataset copula_sample(const Eigen::MatrixXd& sigma, std::size_t n, std::mt19937_64& rng) {
    const std::vector<VariableSpec> specs{{"x", VarKind::continuous, {}, 1.0},
                                          {"o", VarKind::ordinal, {"1", "2", "3"}, 1.0},
                                          {"b", VarKind::binary, {"no", "yes"}, 1.0},
                                          {"g", VarKind::nominal, {"a", "b", "c"}, 1.0}};
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    const Eigen::MatrixXd L = llt.matrixL();
    std::normal_distribution<double> z;
    std::vector<double> v;
    const double t1 = norm_quantile(1.0 / 3), t2 = norm_quantile(2.0 / 3);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector4d e(z(rng), z(rng), z(rng), z(rng));
        const Eigen::Vector4d y = L * e;
        v.push_back(std::max(0.0, std::exp(y(0)) - 0.3));
        v.push_back(y(1) <= t1 ? 0 : (y(1) <= t2 ? 1 : 2));
        v.push_back(y(2) <= 0.3 ? 0 : 1);
        v.push_back(y(3) <= -0.5 ? 2 : (y(3) <= 0.5 ? 0 : 1));
    }
    return MixedDataset(specs, n, v);
}

}  // namespace

TEST(LatentGaussian, RecoversCopulaCorrelations) {
    QuietWarnings quiet;
    std::mt19937_64 rng(71);
    Eigen::Matrix4d sigma;
    sigma << 1, 0.5, 0, 0.5, 0.5, 1, -0.5, 0.5, 0, -0.5, 1, 0, 0.5, 0.5, 0, 1;
    const MixedDataset d = copula_sample(sigma, 5000, rng);
    const auto params = estimate_latent_gaussian(d);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_NEAR(params.sigma(a, b), sigma(a, b), 0.05) << a << ',' << b;
    EXPECT_EQ(params.marginals[3].ordering, (std::vector<int>{2, 0, 1}));
    EXPECT_EQ(params.marginals[3].category_levels, (std::vector<int>{2, 0, 1}));
    ASSERT_EQ(params.marginals[1].thresholds.size(), 2u);
    EXPECT_NEAR(params.marginals[1].thresholds[0], norm_quantile(1.0 / 3), 0.05);
    EXPECT_GT(params.marginals[0].floor_probability, 0.1);
    EXPECT_EQ(params.marginals[0].floor_value, 0.0);
    ASSERT_TRUE(params.marginals[0].density.has_value());
    EXPECT_EQ(count_modes(params.marginals[0].density->grid_density()), 1u);
}

TEST(LatentGaussian, IndependentColumnsGiveIdentity) {
    QuietWarnings quiet;
    std::mt19937_64 rng(73);
    const MixedDataset d = copula_sample(Eigen::Matrix4d::Identity(), 3000, rng);
    const auto params = estimate_latent_gaussian(d);
    EXPECT_LT((params.sigma - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(LatentGaussian, SamplerReproducesMarginalsAndFloorMass) {
    QuietWarnings quiet;
    std::mt19937_64 rng(79);
    Eigen::Matrix4d sigma;
    sigma << 1, 0.3, 0, 0, 0.3, 1, 0, 0, 0, 0, 1, 0.2, 0, 0, 0.2, 1;
    const auto params = estimate_latent_gaussian(copula_sample(sigma, 2000, rng));
    const std::size_t n = 10000;
    const MixedDataset s = sample_latent_gaussian(params, n, 99);
    // Categorical frequencies against the threshold model, 99% binomial bands.
    for (std::size_t j = 1; j < 4; ++j) {
        const auto& m = params.marginals[j];
        std::vector<double> bounds{-INFINITY};
        bounds.insert(bounds.end(), m.thresholds.begin(), m.thresholds.end());
        bounds.push_back(INFINITY);
        for (std::size_t g = 0; g < m.category_levels.size(); ++g) {
            const double p = norm_cdf(bounds[g + 1]) - norm_cdf(bounds[g]);
            double count = 0;
            for (std::size_t i = 0; i < n; ++i) count += s.level(i, j) == m.category_levels[g];
            EXPECT_NEAR(count / n, p, 2.576 * std::sqrt(p * (1 - p) / n));
        }
    }
    const double pf = params.marginals[0].floor_probability;
    double at_floor = 0;
    for (std::size_t i = 0; i < n; ++i) at_floor += s.value(i, 0) == params.marginals[0].floor_value;
    EXPECT_NEAR(at_floor / n, pf, 2.576 * std::sqrt(pf * (1 - pf) / n));
    EXPECT_EQ(sample_latent_gaussian(params, 50, 5), sample_latent_gaussian(params, 50, 5));
    EXPECT_NE(sample_latent_gaussian(params, 50, 5), sample_latent_gaussian(params, 50, 6));
}

TEST(LatentGaussian, IdentitySigmaSamplesLookIndependent) {
    QuietWarnings quiet;
    std::mt19937_64 rng(83);
    auto params = estimate_latent_gaussian(copula_sample(Eigen::Matrix4d::Identity(), 1000, rng));
    params.sigma = Eigen::MatrixXd::Identity(4, 4);
    const auto re = estimate_latent_gaussian(sample_latent_gaussian(params, 5000, 3));
    EXPECT_LT((re.sigma - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
}
