#include "nullboot/null_model.hpp"

#include <limits>
#include <string>
#include <type_traits>

#include <Eigen/Eigenvalues>

#include "nullboot/errors.hpp"

namespace nullboot {

std::string_view to_string(NullFamily family) {
    switch (family) {
        case NullFamily::latent_gaussian: return "latent-gaussian";
        case NullFamily::markov: return "markov";
        case NullFamily::spatial: return "spatial";
    }
    return "latent-gaussian";
}

NullFamily parse_null_family(std::string_view text) {
    if (text == "latent-gaussian") return NullFamily::latent_gaussian;
    if (text == "markov") return NullFamily::markov;
    if (text == "spatial") return NullFamily::spatial;
    throw ValidationError("unknown null model family '" + std::string(text) + "'");
}

NullFamily family_of(const Dataset& data) { return static_cast<NullFamily>(data.index()); }
NullFamily family_of(const NullModelParams& params) { return static_cast<NullFamily>(params.index()); }

std::size_t dataset_size(const Dataset& data) {
    return std::visit(
        [](const auto& d) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PresenceAbsenceData>)
                return d.n_species();
            else
                return d.n();
        },
        data);
}

FittedNullModel estimate_null(const Dataset& data, NullFamily family, const EstimationOptions& options) {
    if (family_of(data) != family)
        throw ValidationError("shape mismatch: " + std::string(to_string(family)) +
                              " null model cannot be fitted to this data type");
    EstimationReport report;
    report.family = family;
    switch (family) {
        case NullFamily::latent_gaussian: {
            auto params = estimate_latent_gaussian(std::get<MixedDataset>(data), options.cont_bins);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(params.sigma, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff();
            const double hi = es.eigenvalues().maxCoeff();
            report.sigma_condition_number = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
            report.projection_shift = params.projection_shift;
            return {std::move(params), report};
        }
        case NullFamily::markov:
            return {estimate_markov(std::get<CategoricalSeriesDataset>(data)), report};
        case NullFamily::spatial: {
            const auto& pa = std::get<PresenceAbsenceData>(data);
            const std::vector<double> grid =
                options.disjunction_grid.empty() ? default_disjunction_grid() : options.disjunction_grid;
            DisjunctionEstimate est;
            auto params = estimate_spatial(pa, grid, options.disjunction_reps, options.seed, &est, options.workers);
            report.disjunction = est;
            return {std::move(params), report};
        }
    }
    throw ValidationError("unknown null model family");
}

Dataset sample_null(const NullModelParams& params, std::size_t n, std::uint64_t seed) {
    switch (family_of(params)) {
        case NullFamily::latent_gaussian:
            return sample_latent_gaussian(std::get<LatentGaussianParams>(params), n, seed);
        case NullFamily::markov: {
            const auto& p = std::get<MarkovDosageParams>(params);
            return sample_markov(p, n, p.T, seed);
        }
        case NullFamily::spatial:
            return sample_spatial(std::get<SpatialRangeParams>(params), n, seed);
    }
    throw ValidationError("unknown null model family");
}

}  // namespace nullboot
