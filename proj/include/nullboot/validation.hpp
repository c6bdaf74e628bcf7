#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/clustering.hpp"
#include "nullboot/data_model.hpp"

namespace nullboot {

// Average silhouette width over clustered objects. Singleton clusters give s(i) = 0 and noise
// objects are left out. Requires at least two clusters.
double asw(const DissimilarityMatrix& d, const Partition& part);

enum class ClusterMethod { pam, average_linkage, complete_linkage };

std::string_view to_string(ClusterMethod method);
ClusterMethod parse_cluster_method(std::string_view text);

// Partition of the objects of `d` into k clusters by the given distance-based method.
Partition cluster_by(const DissimilarityMatrix& d, std::size_t k, ClusterMethod method);

struct PredictionStrengthConfig {
    std::size_t b = 50;
    ClusterMethod method = ClusterMethod::pam;
    std::uint64_t seed = 0;

    void validate() const;
};

// Cluster index (0-based) assigned to object `x` by the prediction rule of `method`, given the
// clustering `part` of `members` (object indices into d). PAM: nearest medoid; average
// linkage: smallest mean distance; complete linkage: smallest maximum distance. Ties go to
// the lower cluster index.
int predict_cluster(const DissimilarityMatrix& d, std::size_t x, std::span<const std::size_t> members,
                    const Partition& part, ClusterMethod method);

// Mean over b random half-splits and both directions of the minimum, over the clusters of
// one half, of the proportion of within-cluster pairs that the other half's clustering also
// puts together. Clusters with fewer than two members count as 1. The same seed gives the
// same splits for every k. Requires 2 <= k <= floor(n/2).
double prediction_strength(const DissimilarityMatrix& d, std::size_t k, const PredictionStrengthConfig& cfg);
double prediction_strength(const Eigen::MatrixXd& points, std::size_t k, const PredictionStrengthConfig& cfg);

// 2 * loglik - n_params * log(n).
double bic(const GmmFit& fit, std::size_t n);
double bic_value(double loglik, std::size_t n_params, std::size_t n);

enum class BicAdjustment {
    absolute_denominator,  // (BIC(k) - BIC(1)) / |BIC(1)|, larger means stronger clustering
    raw,                   // (BIC(k) - BIC(1)) / BIC(1)
};

std::string_view to_string(BicAdjustment mode);
BicAdjustment parse_bic_adjustment(std::string_view text);

// BIC profile relative to k = 1. Throws ValidationError if k = 1 is missing or BIC(1) = 0.
std::map<std::size_t, double> adjusted_bic_profile(const std::map<std::size_t, double>& bics,
                                                   BicAdjustment mode = BicAdjustment::absolute_denominator);

}  // namespace nullboot
