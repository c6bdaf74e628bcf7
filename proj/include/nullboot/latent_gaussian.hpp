#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/data_model.hpp"
#include "nullboot/density.hpp"

namespace nullboot {

// Inner cutpoints Phi^-1(cumulative relative frequency) for categories with the given counts.
// All counts must be positive.
std::vector<double> thresholds_from_counts(std::span<const double> counts);

// Two-step polychoric correlation: maximizes the bivariate normal likelihood of `table`
// (rows x cols counts) over rho in [-0.999, 0.999] with the inner cutpoints held fixed.
// Throws ValidationError when all mass sits in one row or one column.
double polychoric_correlation(const Eigen::MatrixXd& table, std::span<const double> row_thresholds,
                              std::span<const double> col_thresholds);

// Bivariate normal probabilities of every cell of the threshold grid.
Eigen::MatrixXd polychoric_cell_probabilities(double rho, std::span<const double> row_thresholds,
                                              std::span<const double> col_thresholds);

// Level order for nominal variable j: ascending average Pearson correlation between each
// level's dummy and the continuous, ordinal and binary variables. Stable for ties; levels with
// a constant dummy go last with a warning. Returns original level indices in latent order.
std::vector<int> nominal_ordering(const MixedDataset& data, std::size_t j);

// Per-variable part of the latent Gaussian null model.
struct LatentMarginal {
    // Categorical: latent category g (z in (thresholds[g-1], thresholds[g]]) emits level
    // category_levels[g]. Only categories observed in the data appear.
    std::vector<int> category_levels;
    std::vector<double> thresholds;
    std::vector<int> ordering;  // nominal variables: full level permutation used

    // Continuous: point mass floor_probability at floor_value, density above it.
    double floor_value = 0.0;
    double floor_probability = 0.0;
    std::optional<UnimodalDensity> density;
};

struct LatentGaussianParams {
    std::vector<VariableSpec> specs;
    Eigen::MatrixXd sigma;  // latent correlation matrix, positive semi-definite
    std::vector<LatentMarginal> marginals;
    std::size_t cont_bins = 10;
    double projection_shift = 0.0;  // largest entry change made by the PSD repair
};

// Nearest correlation matrix by eigenvalue clipping and rescaling to unit diagonal.
Eigen::MatrixXd project_to_correlation(const Eigen::MatrixXd& m);

// Ordinal codes used for correlation estimation: continuous variables are cut into
// `cont_bins` near-equal-count classes (ties kept together), nominal variables follow
// `ordering`. Codes are compressed to observed classes, 0-based.
std::vector<int> ordinal_codes(const MixedDataset& data, std::size_t j, std::size_t cont_bins,
                               std::span<const int> ordering = {});

LatentGaussianParams estimate_latent_gaussian(const MixedDataset& data, std::size_t cont_bins = 10);

MixedDataset sample_latent_gaussian(const LatentGaussianParams& params, std::size_t n, std::uint64_t seed);

}  // namespace nullboot
