#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/data_model.hpp"

namespace nullboot {

// Partitioning around medoids: greedy BUILD followed by best-improvement SWAP until no single
// medoid/non-medoid exchange lowers the objective. Clusters are numbered by ascending medoid
// index; distance ties go to the lower medoid. Requires 2 <= k <= n.
Partition pam(const DissimilarityMatrix& d, std::size_t k);

// Sum over objects of the distance to the nearest of `medoids`.
double medoid_objective(const DissimilarityMatrix& d, std::span<const std::size_t> medoids);

enum class Linkage { average, complete };

// One agglomeration step. Leaves are 0..n-1; merge s creates cluster n+s. a < b.
struct Merge {
    std::size_t a;
    std::size_t b;
    double height;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::size_t n = 0;
    Linkage linkage = Linkage::average;
    std::vector<Merge> merges;  // n-1 entries
};

// Standard agglomerative clustering; average linkage uses the mean inter-cluster
// dissimilarity, complete linkage the maximum. Equal heights go to the pair whose smallest
// member indices are lexicographically lowest.
Dendrogram linkage_cluster(const DissimilarityMatrix& d, Linkage linkage);

// Partition with exactly k clusters from the first n-k merges. Clusters are numbered in order
// of their lowest member index.
Partition cut_tree(const Dendrogram& tree, std::size_t k);

struct MdsResult {
    Eigen::MatrixXd coords;       // n x q, columns by descending eigenvalue
    Eigen::VectorXd eigenvalues;  // all n eigenvalues of the doubly centred matrix, descending
};

// Classical (Torgerson) scaling into q dimensions. Negative eigenvalues among the top q yield
// zero columns. Each column's sign is fixed so its first non-negligible entry is positive.
MdsResult classical_mds(const DissimilarityMatrix& d, std::size_t q);

struct GmmOptions {
    bool with_noise = true;
    std::size_t restarts = 10;
    std::size_t max_iter = 500;
    double tol = 1e-8;
    double floor_factor = 1e-8;         // eigenvalue floor relative to the mean variance of Y
    double noise_init_fraction = 0.05;  // initially marked as noise: largest nearest-neighbour distances
    std::uint64_t seed = 0;
};

struct GmmFit {
    std::size_t k = 0;
    std::size_t q = 0;
    bool with_noise = false;
    std::vector<double> weights;  // k Gaussian proportions, then the noise proportion if present
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    double noise_density = 0.0;  // 1 / volume of the bounding box of Y
    double loglik = 0.0;
    std::size_t n_params = 0;
    Eigen::MatrixXd responsibilities;  // n x (k + noise)
    std::vector<double> loglik_trace;  // per EM iteration of the selected restart
    bool regularized = false;          // an eigenvalue floor was active in the final fit
    bool converged = false;
    std::size_t restart = 0;

    // Most probable component per object; kNoise for the noise component.
    std::vector<int> map_labels() const;
};

std::size_t gmm_parameter_count(std::size_t k, std::size_t q, bool with_noise);

// EM for a k-component unconstrained-covariance Gaussian mixture, optionally with a uniform
// noise component over the bounding box of Y. Restart 0 is seeded from PAM on Euclidean
// distances; further restarts from k random data points. Requires n > q + 1.
GmmFit gmm_noise_fit(const Eigen::MatrixXd& y, std::size_t k, const GmmOptions& options = {});

}  // namespace nullboot
