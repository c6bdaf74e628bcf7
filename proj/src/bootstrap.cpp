#include "nullboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "nullboot/errors.hpp"
#include "nullboot/parallel.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::pam: return "pam";
        case Method::average_linkage: return "average-linkage";
        case Method::complete_linkage: return "complete-linkage";
        case Method::gmm_noise: return "gmm-noise";
    }
    return "pam";
}

std::string_view to_string(ValidationIndex index) {
    switch (index) {
        case ValidationIndex::asw: return "asw";
        case ValidationIndex::prediction_strength: return "prediction-strength";
        case ValidationIndex::bic: return "bic";
        case ValidationIndex::adjusted_bic: return "adjusted-bic";
    }
    return "asw";
}

std::string_view to_string(Aggregation mode) {
    switch (mode) {
        case Aggregation::mean_rank: return "mean-rank";
        case Aggregation::mean_raw: return "mean-raw";
        case Aggregation::bonferroni: return "bonferroni";
    }
    return "mean-rank";
}

Method parse_method(std::string_view text) {
    if (text == "gmm-noise") return Method::gmm_noise;
    switch (parse_cluster_method(text)) {
        case ClusterMethod::pam: return Method::pam;
        case ClusterMethod::average_linkage: return Method::average_linkage;
        case ClusterMethod::complete_linkage: return Method::complete_linkage;
    }
    return Method::pam;
}

ValidationIndex parse_index(std::string_view text) {
    if (text == "asw") return ValidationIndex::asw;
    if (text == "prediction-strength" || text == "ps") return ValidationIndex::prediction_strength;
    if (text == "bic") return ValidationIndex::bic;
    if (text == "adjusted-bic") return ValidationIndex::adjusted_bic;
    throw ValidationError("unknown validation index '" + std::string(text) + "'");
}

Aggregation parse_aggregation(std::string_view text) {
    if (text == "mean-rank") return Aggregation::mean_rank;
    if (text == "mean-raw") return Aggregation::mean_raw;
    if (text == "bonferroni") return Aggregation::bonferroni;
    throw ValidationError("unknown aggregation '" + std::string(text) + "'");
}

namespace {

ClusterMethod distance_method(Method m) {
    switch (m) {
        case Method::pam: return ClusterMethod::pam;
        case Method::average_linkage: return ClusterMethod::average_linkage;
        case Method::complete_linkage: return ClusterMethod::complete_linkage;
        case Method::gmm_noise: break;
    }
    throw ValidationError("gmm-noise is not a dissimilarity-based method");
}

bool uses_gmm(ValidationIndex index) {
    return index == ValidationIndex::bic || index == ValidationIndex::adjusted_bic;
}

}  // namespace

void PipelineSpec::validate() const {
    if (m < 1) throw ValidationError("m >= 1 required");
    if (K.empty()) throw ValidationError("K must not be empty");
    for (std::size_t i = 1; i < K.size(); ++i)
        if (K[i] <= K[i - 1]) throw ValidationError("K must be strictly increasing");
    if (uses_gmm(index) != (method == Method::gmm_noise))
        throw ValidationError("index " + std::string(to_string(index)) + " cannot be combined with method " +
                              std::string(to_string(method)));
    const std::size_t k_min = uses_gmm(index) ? 1 : 2;
    if (K.front() < k_min)
        throw ValidationError("K must start at " + std::to_string(k_min) + " or above for index " +
                              std::string(to_string(index)));
    if (ps_b < 1) throw ValidationError("prediction strength b >= 1 required");
    if (mds_dim < 1) throw ValidationError("mds dimension >= 1 required");
    if (workers < 1) throw ValidationError("workers >= 1 required");
    if (params && family_of(*params) != family) throw ValidationError("null model parameters do not match the family");
}

DissimilarityMatrix pipeline_distance(const Dataset& data, const PipelineSpec& spec) {
    if (const auto* mixed = std::get_if<MixedDataset>(&data))
        return mixed_type_distance(*mixed, spec.mixed_distance ? *spec.mixed_distance
                                                                : MixedDistanceConfig::defaults(mixed->specs()));
    if (const auto* series = std::get_if<CategoricalSeriesDataset>(&data))
        return series_distance(*series, spec.series_costs ? *spec.series_costs : default_series_costs(series->h()));
    return kulczynski_matrix(std::get<PresenceAbsenceData>(data));
}

std::vector<double> evaluate_pipeline(const Dataset& data, const PipelineSpec& spec, std::uint64_t seed) {
    const DissimilarityMatrix d = pipeline_distance(data, spec);
    std::vector<double> v;
    v.reserve(spec.K.size());
    switch (spec.index) {
        case ValidationIndex::asw:
            for (std::size_t k : spec.K) v.push_back(asw(d, cluster_by(d, k, distance_method(spec.method))));
            break;
        case ValidationIndex::prediction_strength: {
            const PredictionStrengthConfig cfg{spec.ps_b, distance_method(spec.method), seed};
            for (std::size_t k : spec.K) v.push_back(prediction_strength(d, k, cfg));
            break;
        }
        case ValidationIndex::bic:
        case ValidationIndex::adjusted_bic: {
            const std::size_t q = std::min(spec.mds_dim, d.size() - 1);
            const Eigen::MatrixXd y = classical_mds(d, q).coords;
            std::map<std::size_t, double> bics;
            auto fit_k = [&](std::size_t k) {
                GmmOptions opts = spec.gmm;
                opts.seed = derive_seed(seed, k);
                const GmmFit fit = gmm_noise_fit(y, k, opts);
                const double b = bic(fit, d.size());
                if (!std::isfinite(b)) throw NumericalError("non-finite BIC at k = " + std::to_string(k));
                bics[k] = b;
            };
            if (spec.index == ValidationIndex::adjusted_bic) fit_k(1);
            for (std::size_t k : spec.K)
                if (!bics.count(k)) fit_k(k);
            const auto profile = spec.index == ValidationIndex::adjusted_bic
                                     ? adjusted_bic_profile(bics, spec.bic_adjustment)
                                     : bics;
            for (std::size_t k : spec.K) v.push_back(profile.at(k));
            break;
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i])) throw NumericalError("non-finite index value at k = " + std::to_string(spec.K[i]));
    return v;
}

double per_k_pvalue(double observed, std::span<const double> replicates) {
    if (replicates.empty()) throw ValidationError("per_k_pvalue: m >= 1 required");
    const auto count = std::count_if(replicates.begin(), replicates.end(), [&](double v) { return v >= observed; });
    return static_cast<double>(count + 1) / static_cast<double>(replicates.size() + 1);
}

double aggregate_pvalue(std::span<const double> observed, const Eigen::MatrixXd& replicates, Aggregation mode) {
    const auto m = static_cast<std::size_t>(replicates.rows());
    const auto nk = static_cast<std::size_t>(replicates.cols());
    if (m < 1) throw ValidationError("aggregate_pvalue: m >= 1 required");
    if (observed.size() != nk || nk == 0) throw ValidationError("aggregate_pvalue: observed and replicate shapes differ");
    auto value = [&](std::size_t i, std::size_t k) {
        return i == m ? observed[k] : replicates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    };
    const double denom = static_cast<double>(m + 1);
    switch (mode) {
        case Aggregation::mean_rank: {
            // Rank sums are kept as integer counts: p~_k(X_i) * (m + 1) = 1 + #{j != i : V_jk >= V_ik}.
            std::vector<long long> sums(m + 1, 0);
            for (std::size_t k = 0; k < nk; ++k)
                for (std::size_t i = 0; i <= m; ++i) {
                    long long c = 1;
                    const double vi = value(i, k);
                    for (std::size_t j = 0; j <= m; ++j)
                        if (j != i && value(j, k) >= vi) ++c;
                    sums[i] += c;
                }
            const auto count = std::count_if(sums.begin(), sums.end() - 1, [&](long long s) { return s <= sums[m]; });
            return static_cast<double>(count + 1) / denom;
        }
        case Aggregation::mean_raw: {
            std::vector<double> sums(m + 1, 0.0);
            for (std::size_t i = 0; i <= m; ++i)
                for (std::size_t k = 0; k < nk; ++k) sums[i] += value(i, k);
            const auto count = std::count_if(sums.begin(), sums.end() - 1, [&](double s) { return s >= sums[m]; });
            return static_cast<double>(count + 1) / denom;
        }
        case Aggregation::bonferroni: {
            // Smallest exceedance count, so |K| * (count + 1) / (m + 1) is rounded once.
            std::size_t fewest = m;
            for (std::size_t k = 0; k < nk; ++k) {
                const auto col = replicates.col(static_cast<Eigen::Index>(k));
                const auto count = static_cast<std::size_t>(
                    std::count_if(col.begin(), col.end(), [&](double v) { return v >= observed[k]; }));
                fewest = std::min(fewest, count);
            }
            return std::min(1.0, static_cast<double>(nk * (fewest + 1)) / denom);
        }
    }
    throw ValidationError("unknown aggregation");
}

Calibration calibrate(std::span<const double> observed, const Eigen::MatrixXd& replicates) {
    const auto m = static_cast<std::size_t>(replicates.rows());
    const auto nk = static_cast<std::size_t>(replicates.cols());
    if (m < 1) throw ValidationError("calibrate: m >= 1 required");
    if (observed.size() != nk || nk == 0) throw ValidationError("calibrate: observed and replicate shapes differ");
    Calibration cal;
    for (std::size_t k = 0; k < nk; ++k) {
        const auto col = replicates.col(static_cast<Eigen::Index>(k));
        double ev, sv;
        if (col.maxCoeff() == col.minCoeff()) {
            ev = col(0);
            sv = 0.0;
        } else {
            ev = col.mean();
            sv = m > 1 ? std::sqrt((col.array() - ev).square().sum() / static_cast<double>(m - 1)) : 0.0;
        }
        const double diff = observed[k] - ev;
        double c;
        if (sv > 0)
            c = diff / sv;
        else if (diff > 0)
            c = std::numeric_limits<double>::infinity();
        else if (diff < 0)
            c = -std::numeric_limits<double>::infinity();
        else
            c = 0.0;
        cal.ev.push_back(ev);
        cal.sv.push_back(sv);
        cal.calibrated.push_back(c);
    }
    // Values within a relative 1e-12 of the maximum count as tied; the smallest k wins.
    const double top = *std::max_element(cal.calibrated.begin(), cal.calibrated.end());
    const double slack = std::isfinite(top) ? 1e-12 * std::max(1.0, std::abs(top)) : 0.0;
    for (std::size_t k = 0; k < nk; ++k)
        if (cal.calibrated[k] >= top - slack) {
            cal.best = k;
            break;
        }
    return cal;
}

void summarize(BootstrapResult& r) {
    const auto nk = r.K.size();
    if (r.observed.size() != nk || static_cast<std::size_t>(r.replicates.cols()) != nk)
        throw ValidationError("bootstrap result: K, observed and replicate shapes differ");
    const auto m = static_cast<std::size_t>(r.replicates.rows());
    r.per_k_p.clear();
    for (std::size_t k = 0; k < nk; ++k) {
        const Eigen::VectorXd col = r.replicates.col(static_cast<Eigen::Index>(k));
        r.per_k_p.push_back(per_k_pvalue(r.observed[k], {col.data(), m}));
    }
    r.aggregate_p = aggregate_pvalue(r.observed, r.replicates, Aggregation::mean_rank);
    r.aggregate_p_mean_raw = aggregate_pvalue(r.observed, r.replicates, Aggregation::mean_raw);
    r.aggregate_p_bonferroni = aggregate_pvalue(r.observed, r.replicates, Aggregation::bonferroni);
    Calibration cal = calibrate(r.observed, r.replicates);
    r.ev = std::move(cal.ev);
    r.sv = std::move(cal.sv);
    r.calibrated = std::move(cal.calibrated);
    r.k_hat = r.K[cal.best];
}

BootstrapResult run_bootstrap(const Dataset& data, const PipelineSpec& spec, EstimationReport* report) {
    spec.validate();
    if (family_of(data) != spec.family)
        throw ValidationError("shape mismatch: data cannot be modelled by the " + std::string(to_string(spec.family)) +
                              " family");

    std::optional<FittedNullModel> fitted;
    if (spec.params) {
        EstimationReport given;
        given.family = spec.family;
        fitted = FittedNullModel{*spec.params, given};
    } else {
        EstimationOptions opts = spec.estimation;
        opts.seed = derive_seed(spec.seed, 0);
        opts.workers = spec.workers;
        fitted = estimate_null(data, spec.family, opts);
    }
    if (report) *report = fitted->report;
    const NullModelParams& params = fitted->params;

    BootstrapResult result;
    result.K = spec.K;
    result.observed_seed = derive_seed(spec.seed, 1);
    result.observed = evaluate_pipeline(data, spec, result.observed_seed);

    const std::size_t n = dataset_size(data);
    const std::size_t nk = spec.K.size();
    constexpr std::size_t kAttempts = 4;
    result.replicates.resize(static_cast<Eigen::Index>(spec.m), static_cast<Eigen::Index>(nk));
    result.replicate_seeds.assign(spec.m, 0);
    result.attempts.assign(spec.m, 0);
    std::mutex progress_mutex;
    std::size_t finished = 0;

    parallel_for(spec.m, spec.workers, [&](std::size_t q) {
        const std::uint64_t base = derive_seed(spec.seed, 2, q);
        std::string last_error;
        std::uint64_t seed = base;
        for (std::size_t attempt = 0; attempt < kAttempts; ++attempt) {
            seed = attempt == 0 ? base : derive_seed(base, attempt);
            try {
                const Dataset replicate = sample_null(params, n, derive_seed(seed, 0));
                const std::vector<double> v = evaluate_pipeline(replicate, spec, derive_seed(seed, 1));
                for (std::size_t k = 0; k < nk; ++k)
                    result.replicates(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)) = v[k];
                result.replicate_seeds[q] = seed;
                result.attempts[q] = attempt + 1;
                last_error.clear();
                break;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (result.attempts[q] == 0)
            throw NumericalError("replicate " + std::to_string(q) + " failed " + std::to_string(kAttempts) +
                                 " times (last seed " + std::to_string(seed) + "): " + last_error);
        if (spec.progress) {
            std::lock_guard lock(progress_mutex);
            spec.progress(++finished, spec.m);
        }
    });

    summarize(result);
    return result;
}

}  // namespace nullboot
