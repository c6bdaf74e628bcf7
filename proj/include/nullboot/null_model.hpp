#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "nullboot/data_model.hpp"
#include "nullboot/latent_gaussian.hpp"
#include "nullboot/markov_model.hpp"
#include "nullboot/spatial_model.hpp"

namespace nullboot {

using Dataset = std::variant<MixedDataset, CategoricalSeriesDataset, PresenceAbsenceData>;
using NullModelParams = std::variant<LatentGaussianParams, MarkovDosageParams, SpatialRangeParams>;

enum class NullFamily { latent_gaussian, markov, spatial };

std::string_view to_string(NullFamily family);
NullFamily parse_null_family(std::string_view text);

// The family whose data shape matches `data` / `params`.
NullFamily family_of(const Dataset& data);
NullFamily family_of(const NullModelParams& params);

std::size_t dataset_size(const Dataset& data);

struct EstimationOptions {
    std::size_t cont_bins = 10;
    std::vector<double> disjunction_grid;  // empty: default grid
    std::size_t disjunction_reps = 20;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

// Diagnostics of an estimation run. Only the fields of the fitted family are set.
struct EstimationReport {
    NullFamily family = NullFamily::latent_gaussian;
    std::optional<double> sigma_condition_number;
    std::optional<double> projection_shift;
    std::optional<DisjunctionEstimate> disjunction;
};

struct FittedNullModel {
    NullModelParams params;
    EstimationReport report;
};

// Fits `family` to `data`. Throws ValidationError("shape mismatch ...") when the data shape
// does not belong to the family.
FittedNullModel estimate_null(const Dataset& data, NullFamily family, const EstimationOptions& options = {});

// One synthetic dataset of n objects (n series of the fitted length, or n species).
Dataset sample_null(const NullModelParams& params, std::size_t n, std::uint64_t seed);

}  // namespace nullboot
