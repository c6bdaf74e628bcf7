#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nullboot/data_model.hpp"

namespace nullboot {

// Per-variable weights plus per-level weights for the dummy coding of nominal variables.
struct MixedDistanceConfig {
    std::vector<double> weights;
    std::vector<std::vector<double>> dummy_weights;  // empty for non-nominal variables

    // Weights from each VariableSpec, unit dummy weights.
    static MixedDistanceConfig defaults(const std::vector<VariableSpec>& specs);
    void validate(const std::vector<VariableSpec>& specs) const;

    bool operator==(const MixedDistanceConfig&) const = default;
};

// d(i,j) = sqrt(sum_v w_v * delta_v(i,j)^2). Continuous and ordinal/binary variables contribute
// their coordinate difference (ordinal levels Likert-coded 1,2,3,...); a nominal variable
// contributes sum_l u_l * (dummy_il - dummy_jl)^2 with dummy weights u.
DissimilarityMatrix mixed_type_distance(const MixedDataset& data, const MixedDistanceConfig& cfg);

// 1 - (|A∩B|/|A| + |A∩B|/|B|) / 2 between species ranges.
DissimilarityMatrix kulczynski_matrix(const PresenceAbsenceData& data);

// (h+1) x (h+1) costs; index h is the missing pseudo-category.
Eigen::MatrixXd default_series_costs(int h);

// Mean per-day cost between two series, missing days mapped to the pseudo-category.
DissimilarityMatrix series_distance(const CategoricalSeriesDataset& data, const Eigen::MatrixXd& category_costs);

// Euclidean distances between the rows of `points`.
DissimilarityMatrix euclidean_distance(const Eigen::MatrixXd& points);

}  // namespace nullboot
