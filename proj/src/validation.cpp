#include "nullboot/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nullboot/dissimilarity.hpp"
#include "nullboot/errors.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

double asw(const DissimilarityMatrix& d, const Partition& part) {
    const std::size_t n = d.size();
    if (part.size() != n) throw ValidationError("asw: partition size does not match dissimilarities");
    if (part.k() < 2) throw ValidationError("asw: k >= 2 required");
    const auto sizes = part.cluster_sizes();
    std::vector<double> sums(part.k());
    double total = 0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int li = part.label(i);
        if (li == kNoise) continue;
        ++counted;
        if (sizes[static_cast<std::size_t>(li)] == 1) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const int lj = part.label(j);
            if (lj != kNoise && j != i) sums[static_cast<std::size_t>(lj)] += d(i, j);
        }
        const double a = sums[static_cast<std::size_t>(li)] / static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < part.k(); ++c)
            if (static_cast<int>(c) != li) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        const double m = std::max(a, b);
        if (m > 0) total += (b - a) / m;
    }
    return counted ? total / static_cast<double>(counted) : 0.0;
}

std::string_view to_string(ClusterMethod method) {
    switch (method) {
        case ClusterMethod::pam: return "pam";
        case ClusterMethod::average_linkage: return "average-linkage";
        case ClusterMethod::complete_linkage: return "complete-linkage";
    }
    return "pam";
}

ClusterMethod parse_cluster_method(std::string_view text) {
    if (text == "pam") return ClusterMethod::pam;
    if (text == "average-linkage" || text == "average") return ClusterMethod::average_linkage;
    if (text == "complete-linkage" || text == "complete") return ClusterMethod::complete_linkage;
    throw ValidationError("unknown clustering method '" + std::string(text) + "'");
}

Partition cluster_by(const DissimilarityMatrix& d, std::size_t k, ClusterMethod method) {
    switch (method) {
        case ClusterMethod::pam: return pam(d, k);
        case ClusterMethod::average_linkage: return cut_tree(linkage_cluster(d, Linkage::average), k);
        case ClusterMethod::complete_linkage: return cut_tree(linkage_cluster(d, Linkage::complete), k);
    }
    throw ValidationError("unknown clustering method");
}

void PredictionStrengthConfig::validate() const {
    if (b < 1) throw ValidationError("prediction strength: b >= 1 required");
}

int predict_cluster(const DissimilarityMatrix& d, std::size_t x, std::span<const std::size_t> members,
                    const Partition& part, ClusterMethod method) {
    if (method == ClusterMethod::pam) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < part.k(); ++c) {
            const double v = d(x, members[part.medoids()[c]]);
            if (v < best_d) {
                best_d = v;
                best = static_cast<int>(c);
            }
        }
        return best;
    }
    std::vector<double> agg(part.k(), 0.0);
    std::vector<std::size_t> count(part.k(), 0);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const int l = part.label(i);
        if (l == kNoise) continue;
        const auto c = static_cast<std::size_t>(l);
        const double v = d(x, members[i]);
        if (method == ClusterMethod::average_linkage)
            agg[c] += v;
        else
            agg[c] = std::max(agg[c], v);
        ++count[c];
    }
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < part.k(); ++c) {
        const double v = method == ClusterMethod::average_linkage ? agg[c] / static_cast<double>(count[c]) : agg[c];
        if (v < best_v) {
            best_v = v;
            best = static_cast<int>(c);
        }
    }
    return best;
}

namespace {

// Minimum over the clusters of `own` of the fraction of co-member pairs that `predicted`
// also keeps together.
double min_pair_agreement(const Partition& own, const std::vector<int>& predicted) {
    double worst = 1.0;
    for (const auto& cluster : own.members()) {
        if (cluster.size() < 2) continue;
        std::size_t agree = 0;
        for (std::size_t a = 0; a < cluster.size(); ++a)
            for (std::size_t b = a + 1; b < cluster.size(); ++b)
                if (predicted[cluster[a]] == predicted[cluster[b]]) ++agree;
        const double pairs = static_cast<double>(cluster.size() * (cluster.size() - 1) / 2);
        worst = std::min(worst, static_cast<double>(agree) / pairs);
    }
    return worst;
}

}  // namespace

double prediction_strength(const DissimilarityMatrix& d, std::size_t k, const PredictionStrengthConfig& cfg) {
    cfg.validate();
    const std::size_t n = d.size();
    if (n < 4) throw ValidationError("prediction strength: n >= 4 required");
    if (k < 2 || k > n / 2) throw ValidationError("prediction strength: k must lie in 2..floor(n/2)");
    double total = 0;
    std::vector<std::size_t> perm(n);
    for (std::size_t s = 0; s < cfg.b; ++s) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, s));
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> half[2] = {{perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n / 2)},
                                            {perm.begin() + static_cast<std::ptrdiff_t>(n / 2), perm.end()}};
        std::sort(half[0].begin(), half[0].end());
        std::sort(half[1].begin(), half[1].end());
        const Partition part[2] = {cluster_by(d.subset(half[0]), k, cfg.method),
                                   cluster_by(d.subset(half[1]), k, cfg.method)};
        for (int h = 0; h < 2; ++h) {
            const int other = 1 - h;
            std::vector<int> predicted(half[h].size());
            for (std::size_t i = 0; i < half[h].size(); ++i)
                predicted[i] = predict_cluster(d, half[h][i], half[other], part[other], cfg.method);
            total += min_pair_agreement(part[h], predicted);
        }
    }
    return total / static_cast<double>(2 * cfg.b);
}

double prediction_strength(const Eigen::MatrixXd& points, std::size_t k, const PredictionStrengthConfig& cfg) {
    return prediction_strength(euclidean_distance(points), k, cfg);
}

double bic_value(double loglik, std::size_t n_params, std::size_t n) {
    if (n < 1) throw ValidationError("bic: n >= 1 required");
    return 2.0 * loglik - static_cast<double>(n_params) * std::log(static_cast<double>(n));
}

double bic(const GmmFit& fit, std::size_t n) { return bic_value(fit.loglik, fit.n_params, n); }

std::string_view to_string(BicAdjustment mode) {
    return mode == BicAdjustment::raw ? "raw" : "absolute";
}

BicAdjustment parse_bic_adjustment(std::string_view text) {
    if (text == "raw") return BicAdjustment::raw;
    if (text == "absolute") return BicAdjustment::absolute_denominator;
    throw ValidationError("unknown BIC adjustment '" + std::string(text) + "'");
}

std::map<std::size_t, double> adjusted_bic_profile(const std::map<std::size_t, double>& bics, BicAdjustment mode) {
    const auto one = bics.find(1);
    if (one == bics.end()) throw ValidationError("adjusted BIC needs the k = 1 value");
    const double base = one->second;
    if (base == 0.0) throw ValidationError("adjusted BIC undefined: BIC(1) = 0");
    const double denom = mode == BicAdjustment::raw ? base : std::abs(base);
    std::map<std::size_t, double> out;
    for (const auto& [k, v] : bics) out[k] = (v - base) / denom;
    return out;
}

}  // namespace nullboot
