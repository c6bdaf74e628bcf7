#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nullboot/rng.hpp"

namespace nullboot {

// Number of local maxima of a sampled curve; plateaus count once and changes below
// 1e-10 * max are ignored.
std::size_t count_modes(std::span<const double> values);

// Gaussian kernel density estimate forced to be unimodal, represented as a piecewise-linear
// density on a 512-point grid and normalized over that grid.
class UnimodalDensity {
public:
    static constexpr std::size_t kGridSize = 512;

    // Initial bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5); while the estimate on the grid
    // [min - 3h, max + 3h] has more than one mode, h grows by initial_h / 20.
    // Requires at least 10 observations.
    static UnimodalDensity fit(std::span<const double> values);

    // Rebuilds a density from its grid representation (serialization).
    static UnimodalDensity from_grid(std::vector<double> grid, std::vector<double> density, double bandwidth,
                                     double initial_bandwidth, std::size_t steps);

    double bandwidth() const { return bandwidth_; }
    double initial_bandwidth() const { return initial_bandwidth_; }
    std::size_t enlargement_steps() const { return steps_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& grid_density() const { return density_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double quantile(double u) const;
    double sample(Rng& rng) const;
    // Trapezoidal integral of the grid density.
    double total_mass() const;

    // Conditional density on [lo, inf), renormalized.
    UnimodalDensity truncated_below(double lo) const;

private:
    void build_cdf();

    std::vector<double> grid_;
    std::vector<double> density_;
    std::vector<double> cdf_;
    double bandwidth_ = 0.0;
    double initial_bandwidth_ = 0.0;
    std::size_t steps_ = 0;
};

}  // namespace nullboot
