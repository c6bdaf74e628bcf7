#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nullboot/data_model.hpp"

namespace nullboot {

struct SpatialRangeParams {
    double p_d = 0.0;                        // disjunction probability
    std::vector<std::size_t> species_sizes;  // empirical bag of range sizes (P_S)
    std::vector<double> attractivity;        // P_I over regions
    Adjacency neighbors;
    std::vector<std::string> region_names;

    void validate() const;
};

// Connected components of the subgraph induced by `range`.
std::size_t connectivity_components(std::span<const std::size_t> range, const Adjacency& neighbors);

// sum(a_i - 1) / sum(n_i - 1) with a_i the component count and n_i the size of range i.
// Throws ValidationError when every range is a single region.
double disjunction_ratio(const PresenceAbsenceData& data);

// Attractivity proportional to the number of species per region; sizes from the data.
SpatialRangeParams empirical_spatial_params(const PresenceAbsenceData& data, double p_d);

struct DisjunctionEstimate {
    double p_d = 0.0;
    double q_d = 0.0;  // observed ratio
    double intercept = 0.0;
    double slope = 0.0;
    std::vector<double> grid;
    std::vector<double> mean_q;  // mean simulated ratio per grid value
};

std::vector<double> default_disjunction_grid();

// Simulates the null model `reps` times at every grid value of p_d (sizes and attractivity
// held at their empirical values), regresses mean simulated q_d on p_d, and inverts the line
// at the observed q_d. The result is clipped to [0, 1].
DisjunctionEstimate estimate_disjunction(const PresenceAbsenceData& data, std::span<const double> grid, std::size_t reps,
                                         std::uint64_t seed, std::size_t workers = 1);

SpatialRangeParams estimate_spatial(const PresenceAbsenceData& data, std::span<const double> grid, std::size_t reps,
                                    std::uint64_t seed, DisjunctionEstimate* report = nullptr, std::size_t workers = 1);

// Grows each species range from an attractivity-weighted seed region: with probability p_d the
// next region comes from the non-neighbours of the current range, otherwise from its
// neighbours; if one of the two sets is empty the other is used. Regions with zero
// attractivity are never drawn.
PresenceAbsenceData sample_spatial(const SpatialRangeParams& params, std::size_t n_species, std::uint64_t seed);

}  // namespace nullboot
