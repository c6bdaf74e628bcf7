#include "nullboot/dissimilarity.hpp"

#include <cmath>
#include <string>

#include "nullboot/errors.hpp"

namespace nullboot {

MixedDistanceConfig MixedDistanceConfig::defaults(const std::vector<VariableSpec>& specs) {
    MixedDistanceConfig cfg;
    for (const auto& s : specs) {
        cfg.weights.push_back(s.weight);
        cfg.dummy_weights.emplace_back(s.kind == VarKind::nominal ? std::vector<double>(s.level_count(), 1.0)
                                                                 : std::vector<double>{});
    }
    return cfg;
}

void MixedDistanceConfig::validate(const std::vector<VariableSpec>& specs) const {
    if (weights.size() != specs.size()) throw ValidationError("weight vector shape mismatch");
    if (dummy_weights.size() != specs.size()) throw ValidationError("dummy weight list shape mismatch");
    for (std::size_t j = 0; j < specs.size(); ++j) {
        if (!(weights[j] >= 0.0) || !std::isfinite(weights[j]))
            throw ValidationError("variable '" + specs[j].name + "': weight must be finite and >= 0");
        const auto& dw = dummy_weights[j];
        if (specs[j].kind == VarKind::nominal) {
            if (dw.size() != specs[j].level_count())
                throw ValidationError("variable '" + specs[j].name + "': dummy weight vector must match level count");
            for (double u : dw)
                if (!(u >= 0.0) || !std::isfinite(u))
                    throw ValidationError("variable '" + specs[j].name + "': dummy weights must be >= 0");
        } else if (!dw.empty()) {
            throw ValidationError("variable '" + specs[j].name + "': dummy weights only apply to nominal variables");
        }
    }
}

namespace {

DissimilarityMatrix from_upper(std::size_t n, std::vector<double>& d) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j];
    return DissimilarityMatrix(n, std::move(d));
}

}  // namespace

DissimilarityMatrix mixed_type_distance(const MixedDataset& data, const MixedDistanceConfig& cfg) {
    cfg.validate(data.specs());
    const std::size_t n = data.n(), p = data.p();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t v = 0; v < p; ++v) {
                const double w = cfg.weights[v];
                if (w == 0.0) continue;
                if (data.spec(v).kind == VarKind::nominal) {
                    const int a = data.level(i, v), b = data.level(j, v);
                    if (a != b) sum += w * (cfg.dummy_weights[v][a] + cfg.dummy_weights[v][b]);
                } else {
                    const double delta = data.value(i, v) - data.value(j, v);
                    sum += w * delta * delta;
                }
            }
            d[i * n + j] = std::sqrt(sum);
        }
    }
    return from_upper(n, d);
}

DissimilarityMatrix kulczynski_matrix(const PresenceAbsenceData& data) {
    const std::size_t n = data.n_species(), r = data.n_regions();
    std::vector<double> sizes(n);
    for (std::size_t s = 0; s < n; ++s) sizes[s] = static_cast<double>(data.range_size(s));
    const auto pres = data.presence();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            std::size_t common = 0;
            for (std::size_t t = 0; t < r; ++t) common += pres[a * r + t] & pres[b * r + t];
            const double c = static_cast<double>(common);
            const double v = 1.0 - 0.5 * (c / sizes[a] + c / sizes[b]);
            d[a * n + b] = v < 0.0 ? 0.0 : v;
        }
    }
    return from_upper(n, d);
}

Eigen::MatrixXd default_series_costs(int h) {
    if (h < 1) throw ValidationError("h >= 1 required");
    Eigen::MatrixXd c = Eigen::MatrixXd::Ones(h + 1, h + 1);
    c.diagonal().setZero();
    return c;
}

DissimilarityMatrix series_distance(const CategoricalSeriesDataset& data, const Eigen::MatrixXd& costs) {
    const int h = data.h();
    if (costs.rows() != h + 1 || costs.cols() != h + 1)
        throw ValidationError("cost matrix must be (h+1) x (h+1)");
    for (int a = 0; a <= h; ++a) {
        if (costs(a, a) != 0.0) throw ValidationError("cost matrix must have a zero diagonal");
        for (int b = 0; b <= h; ++b) {
            if (!(costs(a, b) >= 0.0) || !std::isfinite(costs(a, b)))
                throw ValidationError("cost matrix entries must be finite and >= 0");
            if (costs(a, b) != costs(b, a)) throw ValidationError("cost matrix must be symmetric");
        }
    }
    const std::size_t n = data.n(), T = data.T();
    auto code = [h](int c) { return c == kMissing ? h : c; };
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto si = data.series(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto sj = data.series(j);
            double sum = 0.0;
            for (std::size_t t = 0; t < T; ++t) sum += costs(code(si[t]), code(sj[t]));
            d[i * n + j] = sum / static_cast<double>(T);
        }
    }
    return from_upper(n, d);
}

DissimilarityMatrix euclidean_distance(const Eigen::MatrixXd& points) {
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
    return from_upper(n, d);
}

}  // namespace nullboot
