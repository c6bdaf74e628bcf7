#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nullboot/density.hpp"
#include "nullboot/errors.hpp"
#include "nullboot/normal.hpp"
#include "oracles.hpp"

using namespace nullboot;

TEST(Normal, QuantileInvertsCdf) {
    for (double p : {1e-10, 0.01, 0.2, 0.5, 0.77, 0.999999}) EXPECT_NEAR(norm_cdf(norm_quantile(p)), p, 1e-14);
    EXPECT_EQ(norm_quantile(0.0), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(norm_quantile(1.0), std::numeric_limits<double>::infinity());
}

TEST(BivariateNormal, MatchesQuadratureOracle) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> lim(-3.0, 3.0), r(-0.99, 0.99);
    for (int rep = 0; rep < 300; ++rep) {
        const double h = lim(rng), k = lim(rng), rho = r(rng);
        EXPECT_NEAR(bivariate_normal_cdf(h, k, rho), oracle::bvn_cdf(h, k, rho), 1e-10) << h << ' ' << k << ' ' << rho;
    }
}

TEST(BivariateNormal, InfiniteLimitsAndBoundaryCorrelation) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(bivariate_normal_cdf(inf, 0.3, 0.4), norm_cdf(0.3), 1e-15);
    EXPECT_EQ(bivariate_normal_cdf(-inf, 0.3, 0.4), 0.0);
    EXPECT_NEAR(bivariate_normal_cdf(inf, inf, 0.4), 1.0, 1e-15);
    EXPECT_NEAR(bivariate_normal_cdf(0.0, 0.0, 0.0), 0.25, 1e-15);
    EXPECT_NEAR(bivariate_normal_cdf(0.2, 0.5, 1.0), norm_cdf(0.2), 1e-14);
    EXPECT_NEAR(bivariate_normal_cdf(0.2, 0.5, -1.0), std::max(0.0, norm_cdf(0.2) + norm_cdf(0.5) - 1.0), 1e-14);
}

namespace {

// Mode count of the Gaussian KDE at bandwidth h on 512 points over [min-3h, max+3h], computed
// without the library's grid code.
std::size_t kde_modes(std::vector<double> x, double h) {
    std::sort(x.begin(), x.end());
    const double lo = x.front() - 3 * h, hi = x.back() + 3 * h;
    std::vector<double> d(512);
    for (std::size_t g = 0; g < 512; ++g) {
        const double t = lo + (hi - lo) * static_cast<double>(g) / 511.0;
        for (double v : x) d[g] += std::exp(-0.5 * (t - v) * (t - v) / (h * h));
    }
    const double eps = 1e-10 * *std::max_element(d.begin(), d.end());
    std::size_t modes = 0;
    bool rising = false;
    double prev = d[0];
    for (std::size_t g = 1; g < d.size(); ++g) {
        if (d[g] > prev + eps) {
            rising = true;
            prev = d[g];
        } else if (d[g] < prev - eps) {
            if (rising) ++modes;
            rising = false;
            prev = d[g];
        }
    }
    return modes + (rising ? 1 : 0);
}

}  // namespace

TEST(UnimodalDensity, NormalSamplesEnlargeOnlyWhenTheInitialEstimateIsMultimodal) {
    std::size_t untouched = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> z;
        std::vector<double> x(1000);
        for (auto& v : x) v = z(rng);
        const auto d = UnimodalDensity::fit(x);
        const bool unimodal = kde_modes(x, d.initial_bandwidth()) == 1;
        EXPECT_EQ(d.enlargement_steps() == 0, unimodal) << seed;
        untouched += unimodal;
        EXPECT_EQ(count_modes(d.grid_density()), 1u);
        EXPECT_NEAR(d.total_mass(), 1.0, 1e-6);
    }
    EXPECT_GT(untouched, 0u);
}

TEST(UnimodalDensity, BimodalSampleIsSmoothedToOneMode) {
    std::mt19937_64 rng(59);
    std::normal_distribution<double> z;
    std::vector<double> x;
    for (int i = 0; i < 300; ++i) x.push_back(z(rng) + (i % 2 ? 8.0 : 0.0));
    const auto d = UnimodalDensity::fit(x);
    EXPECT_GT(d.enlargement_steps(), 0u);
    EXPECT_EQ(count_modes(d.grid_density()), 1u);
    EXPECT_NEAR(d.bandwidth(), d.initial_bandwidth() * (1.0 + d.enlargement_steps() / 20.0), 1e-12);
    EXPECT_NEAR(d.total_mass(), 1.0, 1e-6);
}

TEST(UnimodalDensity, QuantileInvertsCdfAndNeedsTenPoints) {
    std::mt19937_64 rng(61);
    std::exponential_distribution<double> e;
    std::vector<double> x(200);
    for (auto& v : x) v = e(rng);
    const auto d = UnimodalDensity::fit(x);
    for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-9);
    EXPECT_THROW(UnimodalDensity::fit(std::vector<double>(9, 1.0)), ValidationError);
    const auto t = d.truncated_below(0.5);
    EXPECT_NEAR(t.cdf(0.5), 0.0, 1e-12);
    EXPECT_NEAR(t.total_mass(), 1.0, 1e-6);
}

TEST(CountModes, PlateausCountOnce) {
    EXPECT_EQ(count_modes(std::vector<double>{0, 1, 1, 0}), 1u);
    EXPECT_EQ(count_modes(std::vector<double>{0, 1, 0, 1, 0}), 2u);
    EXPECT_EQ(count_modes(std::vector<double>{3, 2, 1}), 1u);
}
