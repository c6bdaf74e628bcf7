#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nullboot/clustering.hpp"
#include "nullboot/dissimilarity.hpp"
#include "nullboot/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nullboot;

namespace {

DissimilarityMatrix line(std::vector<double> x) {
    Eigen::MatrixXd p(static_cast<Eigen::Index>(x.size()), 1);
    for (std::size_t i = 0; i < x.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = x[i];
    return euclidean_distance(p);
}

oracle::Matrix as_matrix(const DissimilarityMatrix& d) {
    oracle::Matrix m(d.size(), std::vector<double>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) m[i][j] = d(i, j);
    return m;
}

}  // namespace

TEST(Pam, FourPointLine) {
    const auto d = line({0, 1, 10, 11});
    const Partition p = pam(d, 2);
    EXPECT_EQ(p.labels(), (std::vector<int>{0, 0, 1, 1}));
    EXPECT_DOUBLE_EQ(medoid_objective(d, p.medoids()), 2.0);
    EXPECT_DOUBLE_EQ(oracle::exhaustive_pam_optimum(as_matrix(d), 2), 2.0);
}

TEST(Pam, KEqualsNGivesSingletons) {
    const auto d = line({0, 3, 4, 9});
    const Partition p = pam(d, 4);
    EXPECT_EQ(p.k(), 4u);
    EXPECT_EQ(medoid_objective(d, p.medoids()), 0.0);
    EXPECT_THROW(pam(d, 5), ValidationError);
    EXPECT_THROW(pam(d, 1), ValidationError);
}

TEST(Pam, RecoversSeparatedBlobs) {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd centres(3, 2);
    centres << 0, 0, 20, 0, 10, 15;
    const auto d = euclidean_distance(gaussian_blobs(centres, 4, 1.0, rng));
    const Partition p = pam(d, 3);
    EXPECT_EQ(oracle::canonical(p.labels()), (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}));
    EXPECT_NEAR(medoid_objective(d, p.medoids()), oracle::exhaustive_pam_optimum(as_matrix(d), 3), 1e-12);
}

TEST(Pam, SwapLocalOptimumOnRandomInstances) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto m = oracle::random_dissimilarity(15, rng);
        const DissimilarityMatrix d(15, oracle::flatten(m));
        const Partition p = pam(d, 2 + rep % 4);
        EXPECT_TRUE(oracle::swap_locally_optimal(m, p.medoids()));
        for (std::size_t i = 0; i < 15; ++i) {
            const double own = d(i, p.medoids()[static_cast<std::size_t>(p.label(i))]);
            for (std::size_t med : p.medoids()) EXPECT_LE(own, d(i, med));
        }
    }
}

TEST(Linkage, BaseCaseAndHandExample) {
    const auto two = linkage_cluster(line({0, 2.5}), Linkage::average);
    ASSERT_EQ(two.merges.size(), 1u);
    EXPECT_EQ(two.merges[0], (Merge{0, 1, 2.5}));

    const auto tree = linkage_cluster(line({0, 1, 10}), Linkage::complete);
    ASSERT_EQ(tree.merges.size(), 2u);
    EXPECT_EQ(tree.merges[0], (Merge{0, 1, 1.0}));
    EXPECT_EQ(tree.merges[1], (Merge{2, 3, 10.0}));
    EXPECT_EQ(cut_tree(tree, 2).labels(), (std::vector<int>{0, 0, 1}));
    EXPECT_EQ(cut_tree(tree, 1).labels(), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(cut_tree(tree, 3).labels(), (std::vector<int>{0, 1, 2}));
    EXPECT_THROW(cut_tree(tree, 4), ValidationError);
    EXPECT_THROW(cut_tree(tree, 0), ValidationError);
}

TEST(Linkage, MatchesNaiveOracle) {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 5 + static_cast<std::size_t>(rep) * 3;
        const auto m = oracle::random_dissimilarity(n, rng);
        const DissimilarityMatrix d(n, oracle::flatten(m));
        for (bool complete : {false, true}) {
            std::vector<std::vector<std::vector<std::size_t>>> history;
            const auto expected = oracle::naive_linkage(m, complete, &history);
            const auto tree = linkage_cluster(d, complete ? Linkage::complete : Linkage::average);
            ASSERT_EQ(tree.merges.size(), expected.size());
            for (std::size_t s = 0; s < expected.size(); ++s) {
                EXPECT_EQ(tree.merges[s].a, expected[s].a);
                EXPECT_EQ(tree.merges[s].b, expected[s].b);
                EXPECT_NEAR(tree.merges[s].height, expected[s].height, 1e-12 * expected[s].height);
            }
            for (std::size_t k = 1; k <= n; ++k)
                EXPECT_EQ(cut_tree(tree, k).labels(), oracle::labels_from_groups(history[n - k], n));
        }
    }
}

TEST(Linkage, CompleteHeightsDominateAverage) {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        const auto m = oracle::random_dissimilarity(20, rng);
        const DissimilarityMatrix d(20, oracle::flatten(m));
        const auto avg = linkage_cluster(d, Linkage::average);
        const auto cmp = linkage_cluster(d, Linkage::complete);
        for (std::size_t s = 0; s < avg.merges.size(); ++s) {
            EXPECT_GE(cmp.merges[s].height, avg.merges[s].height - 1e-12);
            if (s > 0) {
                EXPECT_GE(avg.merges[s].height, avg.merges[s - 1].height - 1e-12);
                EXPECT_GE(cmp.merges[s].height, cmp.merges[s - 1].height);
            }
        }
    }
}

TEST(Mds, RecoversEuclideanConfiguration) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z;
    Eigen::MatrixXd p(30, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = z(rng);
    const auto d = euclidean_distance(p);
    const auto mds = classical_mds(d, 3);
    const auto back = euclidean_distance(mds.coords);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(back(i, j), d(i, j), 1e-8);
    for (Eigen::Index e = 1; e < mds.eigenvalues.size(); ++e) EXPECT_GE(mds.eigenvalues(e - 1), mds.eigenvalues(e));
}

TEST(Mds, TwoPointsByHand) {
    const auto mds = classical_mds(DissimilarityMatrix(2, {0, 2, 2, 0}), 1);
    EXPECT_NEAR(std::abs(mds.coords(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(mds.coords(0, 0), -mds.coords(1, 0), 1e-12);
    EXPECT_THROW(classical_mds(DissimilarityMatrix(2, {0, 2, 2, 0}), 2), ValidationError);
}

TEST(Gmm, SingleGaussianClosedForm) {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> z;
    Eigen::MatrixXd y(200, 2);
    for (Eigen::Index i = 0; i < 200; ++i) {
        y(i, 0) = z(rng);
        y(i, 1) = 0.5 * y(i, 0) + z(rng);
    }
    GmmOptions opt;
    opt.with_noise = false;
    const GmmFit fit = gmm_noise_fit(y, 1, opt);
    const Eigen::RowVectorXd mean = y.colwise().mean();
    const Eigen::MatrixXd c = y.rowwise() - mean;
    const Eigen::MatrixXd cov = c.transpose() * c / 200.0;
    EXPECT_LT((fit.means[0] - mean.transpose()).norm(), 1e-12);
    EXPECT_LT((fit.covariances[0] - cov).norm(), 1e-12);
    const double closed = -0.5 * 200.0 * (2.0 * std::log(2.0 * std::numbers::pi) + std::log(cov.determinant()) + 2.0);
    EXPECT_NEAR(fit.loglik, closed, 1e-9 * std::abs(closed));
    EXPECT_EQ(fit.n_params, 5u);
}

TEST(Gmm, SeparatedClustersGiveCrispResponsibilities) {
    std::mt19937_64 rng(41);
    Eigen::MatrixXd centres(2, 2);
    centres << 0, 0, 12, 12;
    const Eigen::MatrixXd y = gaussian_blobs(centres, 60, 1.0, rng);
    const GmmFit fit = gmm_noise_fit(y, 2, {});
    ASSERT_EQ(fit.responsibilities.cols(), 3);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        EXPECT_NEAR(fit.responsibilities.row(i).sum(), 1.0, 1e-12);
        EXPECT_GT(fit.responsibilities.row(i).maxCoeff(), 0.95);
    }
    std::vector<double> m0{fit.means[0](0), fit.means[1](0)};
    std::sort(m0.begin(), m0.end());
    EXPECT_NEAR(m0[0], 0.0, 0.5);
    EXPECT_NEAR(m0[1], 12.0, 0.5);
    for (std::size_t t = 1; t < fit.loglik_trace.size(); ++t)
        EXPECT_GE(fit.loglik_trace[t], fit.loglik_trace[t - 1] - 1e-9);
    double wsum = 0;
    for (double w : fit.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    EXPECT_EQ(fit.n_params, gmm_parameter_count(2, 2, true));
    EXPECT_EQ(fit.n_params, 1u + 4u + 6u + 1u);
}

TEST(Gmm, RowOrderDoesNotChangeLikelihood) {
    std::mt19937_64 rng(43);
    Eigen::MatrixXd centres(3, 2);
    centres << 0, 0, 8, 0, 4, 7;
    const Eigen::MatrixXd y = gaussian_blobs(centres, 30, 1.0, rng);
    Eigen::MatrixXd shuffled = y;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(y.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index i = 0; i < y.rows(); ++i) shuffled.row(i) = y.row(perm[static_cast<std::size_t>(i)]);
    const GmmFit a = gmm_noise_fit(y, 3, {});
    const GmmFit b = gmm_noise_fit(shuffled, 3, {});
    EXPECT_NEAR(a.loglik, b.loglik, 1e-6 * std::abs(a.loglik));
}

TEST(Gmm, RejectsTooFewPoints) {
    Eigen::MatrixXd y(3, 2);
    y << 0, 0, 1, 0, 0, 1;
    EXPECT_THROW(gmm_noise_fit(y, 1, {}), ValidationError);
    EXPECT_THROW(gmm_noise_fit(Eigen::MatrixXd::Random(10, 2), 0, {}), ValidationError);
}
