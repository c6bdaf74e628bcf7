#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/clustering.hpp"
#include "nullboot/dissimilarity.hpp"
#include "nullboot/null_model.hpp"
#include "nullboot/validation.hpp"

namespace nullboot {

enum class Method { pam, average_linkage, complete_linkage, gmm_noise };
enum class ValidationIndex { asw, prediction_strength, bic, adjusted_bic };
enum class Aggregation { mean_rank, mean_raw, bonferroni };

std::string_view to_string(Method method);
std::string_view to_string(ValidationIndex index);
std::string_view to_string(Aggregation mode);
Method parse_method(std::string_view text);
ValidationIndex parse_index(std::string_view text);
Aggregation parse_aggregation(std::string_view text);

// Everything that turns a dataset into the index profile V(k), k in K, plus the bootstrap
// settings.
struct PipelineSpec {
    NullFamily family = NullFamily::latent_gaussian;
    Method method = Method::pam;
    ValidationIndex index = ValidationIndex::asw;
    std::vector<std::size_t> K;
    std::size_t m = 99;
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    std::size_t ps_b = 50;
    std::optional<MixedDistanceConfig> mixed_distance;  // default: from the variable specs
    std::optional<Eigen::MatrixXd> series_costs;        // default: default_series_costs(h)
    std::size_t mds_dim = 4;
    GmmOptions gmm;
    BicAdjustment bic_adjustment = BicAdjustment::absolute_denominator;
    EstimationOptions estimation;  // seed and workers are taken from this spec

    std::optional<NullModelParams> params;  // pre-fitted null model; estimated from the data if absent

    // Called after each finished replicate with (finished, m). May be called from worker threads,
    // never concurrently.
    std::function<void(std::size_t, std::size_t)> progress;

    void validate() const;
};

// Dissimilarities used by the pipeline for `data`.
DissimilarityMatrix pipeline_distance(const Dataset& data, const PipelineSpec& spec);

// V(k) for every k in spec.K, computed on one dataset. `seed` drives the randomized parts
// (prediction strength splits, EM restarts).
std::vector<double> evaluate_pipeline(const Dataset& data, const PipelineSpec& spec, std::uint64_t seed);

struct BootstrapResult {
    std::vector<std::size_t> K;
    std::vector<double> observed;     // V(X, C(X, k)) per k in K
    Eigen::MatrixXd replicates;       // m x |K|
    std::vector<double> per_k_p;
    double aggregate_p = 1.0;         // mean-rank
    double aggregate_p_mean_raw = 1.0;
    double aggregate_p_bonferroni = 1.0;
    std::vector<double> ev;
    std::vector<double> sv;
    std::vector<double> calibrated;
    std::size_t k_hat = 0;
    std::uint64_t observed_seed = 0;
    std::vector<std::uint64_t> replicate_seeds;  // seed of the successful attempt
    std::vector<std::size_t> attempts;           // attempts used per replicate
};

// (#{q : replicates[q] >= observed} + 1) / (m + 1).
double per_k_pvalue(double observed, std::span<const double> replicates);

// Aggregated p-value over k. `replicates` is m x |K|, `observed` has |K| entries.
double aggregate_pvalue(std::span<const double> observed, const Eigen::MatrixXd& replicates, Aggregation mode);

struct Calibration {
    std::vector<double> ev;
    std::vector<double> sv;
    std::vector<double> calibrated;
    std::size_t best = 0;  // position in K of the maximum; ties (relative 1e-12) go to the first
};

// (V_obs - mean) / sd per k with the sample standard deviation of the replicates. A zero
// standard deviation yields +inf, -inf or 0 by the sign of V_obs - mean; so does m = 1.
Calibration calibrate(std::span<const double> observed, const Eigen::MatrixXd& replicates);

// Fills every derived field of `result` from K, observed and replicates.
void summarize(BootstrapResult& result);

// Estimates (or takes) the null model, evaluates the pipeline on the data and on m replicates
// drawn from the null model, and summarizes. A failing replicate is redrawn with a fresh seed
// up to 3 times. Output does not depend on spec.workers.
BootstrapResult run_bootstrap(const Dataset& data, const PipelineSpec& spec, EstimationReport* report = nullptr);

}  // namespace nullboot
