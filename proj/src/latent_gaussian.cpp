#include "nullboot/latent_gaussian.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nullboot/errors.hpp"
#include "nullboot/log.hpp"
#include "nullboot/normal.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoBound = 0.999;

std::vector<double> extended(std::span<const double> inner) {
    std::vector<double> out;
    out.reserve(inner.size() + 2);
    out.push_back(-kInf);
    out.insert(out.end(), inner.begin(), inner.end());
    out.push_back(kInf);
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0 || sbb <= 0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<double> thresholds_from_counts(std::span<const double> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (!(total > 0)) throw ValidationError("thresholds need a positive total count");
    std::vector<double> out;
    double cum = 0.0;
    for (std::size_t g = 0; g + 1 < counts.size(); ++g) {
        if (!(counts[g] > 0)) throw ValidationError("thresholds need positive category counts");
        cum += counts[g];
        out.push_back(norm_quantile(cum / total));
    }
    return out;
}

Eigen::MatrixXd polychoric_cell_probabilities(double rho, std::span<const double> row_thresholds,
                                              std::span<const double> col_thresholds) {
    const auto u = extended(row_thresholds);
    const auto v = extended(col_thresholds);
    const auto R = static_cast<Eigen::Index>(u.size() - 1), C = static_cast<Eigen::Index>(v.size() - 1);
    Eigen::MatrixXd F(R + 1, C + 1);
    for (Eigen::Index a = 0; a <= R; ++a)
        for (Eigen::Index b = 0; b <= C; ++b)
            F(a, b) = bivariate_normal_cdf(u[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)], rho);
    Eigen::MatrixXd P(R, C);
    for (Eigen::Index a = 0; a < R; ++a)
        for (Eigen::Index b = 0; b < C; ++b) P(a, b) = F(a + 1, b + 1) - F(a, b + 1) - F(a + 1, b) + F(a, b);
    return P;
}

double polychoric_correlation(const Eigen::MatrixXd& table, std::span<const double> row_thresholds,
                              std::span<const double> col_thresholds) {
    if (static_cast<std::size_t>(table.rows()) != row_thresholds.size() + 1 ||
        static_cast<std::size_t>(table.cols()) != col_thresholds.size() + 1)
        throw ValidationError("polychoric: thresholds inconsistent with table dimensions");
    if ((table.array() < 0).any() || !table.allFinite()) throw ValidationError("polychoric: table must be nonnegative");
    if (!(table.sum() > 0)) throw ValidationError("polychoric: table total must be positive");
    const auto nonempty_rows = (table.rowwise().sum().array() > 0).count();
    const auto nonempty_cols = (table.colwise().sum().array() > 0).count();
    if (nonempty_rows < 2 || nonempty_cols < 2)
        throw ValidationError("polychoric: table concentrated in one row or column, correlation undefined");
    for (std::size_t g = 1; g < row_thresholds.size(); ++g)
        if (!(row_thresholds[g] > row_thresholds[g - 1])) throw ValidationError("polychoric: thresholds must increase");
    for (std::size_t g = 1; g < col_thresholds.size(); ++g)
        if (!(col_thresholds[g] > col_thresholds[g - 1])) throw ValidationError("polychoric: thresholds must increase");

    auto negloglik = [&](double rho) {
        const Eigen::MatrixXd P = polychoric_cell_probabilities(rho, row_thresholds, col_thresholds);
        double ll = 0.0;
        for (Eigen::Index a = 0; a < table.rows(); ++a)
            for (Eigen::Index b = 0; b < table.cols(); ++b)
                if (table(a, b) > 0) ll += table(a, b) * std::log(std::max(P(a, b), 1e-300));
        return -ll;
    };

    constexpr int kGrid = 80;
    std::vector<double> grid(kGrid + 1), value(kGrid + 1);
    std::size_t best = 0;
    for (int g = 0; g <= kGrid; ++g) {
        grid[g] = -kRhoBound + 2.0 * kRhoBound * g / kGrid;
        value[g] = negloglik(grid[g]);
        if (value[g] < value[best]) best = static_cast<std::size_t>(g);
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min<std::size_t>(best + 1, kGrid)];
    const auto [rho, f] = boost::math::tools::brent_find_minima(negloglik, lo, hi, 48);
    const double result = f <= value[best] ? rho : grid[best];
    return std::clamp(result, -kRhoBound, kRhoBound);
}

std::vector<int> nominal_ordering(const MixedDataset& data, std::size_t j) {
    if (data.spec(j).kind != VarKind::nominal) throw ValidationError("nominal_ordering: variable is not nominal");
    const std::size_t h = data.spec(j).level_count();
    std::vector<std::vector<double>> refs;
    for (std::size_t v = 0; v < data.p(); ++v)
        if (data.spec(v).kind != VarKind::nominal) refs.push_back(data.column(v));

    std::vector<double> avg(h, 0.0);
    std::vector<char> constant(h, 0);
    std::vector<double> dummy(data.n());
    for (std::size_t g = 0; g < h; ++g) {
        double present = 0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            dummy[i] = data.level(i, j) == static_cast<int>(g) ? 1.0 : 0.0;
            present += dummy[i];
        }
        if (present == 0 || present == static_cast<double>(data.n())) {
            constant[g] = 1;
            warn("nominal_ordering: level '" + data.spec(j).levels[g] + "' of '" + data.spec(j).name +
                 "' has a constant dummy; placed last");
            continue;
        }
        double sum = 0;
        std::size_t used = 0;
        for (const auto& r : refs) {
            const double c = pearson(dummy, r);
            if (std::isnan(c)) continue;
            sum += c;
            ++used;
        }
        avg[g] = used ? sum / static_cast<double>(used) : 0.0;
    }
    std::vector<int> order(h);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (constant[a] != constant[b]) return constant[a] < constant[b];
        if (constant[a]) return false;
        return avg[a] < avg[b];
    });
    return order;
}

Eigen::MatrixXd project_to_correlation(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("correlation projection: eigendecomposition failed");
    if (es.eigenvalues().minCoeff() >= 0.0) return 0.5 * (m + m.transpose());
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::VectorXd d = out.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    out = d.asDiagonal() * out * d.asDiagonal();
    out = 0.5 * (out + out.transpose());
    out.diagonal().setOnes();
    return out;
}

std::vector<int> ordinal_codes(const MixedDataset& data, std::size_t j, std::size_t cont_bins,
                               std::span<const int> ordering) {
    const std::size_t n = data.n();
    const auto& spec = data.spec(j);
    std::vector<int> raw(n);
    if (spec.kind == VarKind::continuous) {
        if (cont_bins < 2) throw ValidationError("cont_bins >= 2 required");
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data.value(a, j) < data.value(b, j); });
        std::size_t start = 0;
        while (start < n) {
            std::size_t end = start;
            while (end < n && data.value(idx[end], j) == data.value(idx[start], j)) ++end;
            const auto bin = static_cast<int>(std::min(cont_bins - 1, start * cont_bins / n));
            for (std::size_t t = start; t < end; ++t) raw[idx[t]] = bin;
            start = end;
        }
    } else {
        std::vector<int> rank(spec.level_count());
        if (!ordering.empty()) {
            if (ordering.size() != spec.level_count()) throw ValidationError("ordering size does not match level count");
            for (std::size_t g = 0; g < ordering.size(); ++g) rank[static_cast<std::size_t>(ordering[g])] = static_cast<int>(g);
        } else {
            std::iota(rank.begin(), rank.end(), 0);
        }
        for (std::size_t i = 0; i < n; ++i) raw[i] = rank[static_cast<std::size_t>(data.level(i, j))];
    }
    const int top = *std::max_element(raw.begin(), raw.end());
    std::vector<int> remap(static_cast<std::size_t>(top) + 1, -1);
    for (int r : raw) remap[static_cast<std::size_t>(r)] = 0;
    int next = 0;
    for (auto& r : remap)
        if (r == 0) r = next++;
    for (auto& r : raw) r = remap[static_cast<std::size_t>(r)];
    return raw;
}

LatentGaussianParams estimate_latent_gaussian(const MixedDataset& data, std::size_t cont_bins) {
    const std::size_t n = data.n(), p = data.p();
    LatentGaussianParams params;
    params.specs = data.specs();
    params.cont_bins = cont_bins;
    params.marginals.resize(p);

    std::vector<std::vector<int>> codes(p);
    std::vector<std::size_t> ncat(p);
    std::vector<std::vector<double>> thresholds(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto& marg = params.marginals[j];
        const auto& spec = data.spec(j);
        if (spec.kind == VarKind::nominal) marg.ordering = nominal_ordering(data, j);
        codes[j] = ordinal_codes(data, j, cont_bins, marg.ordering);
        ncat[j] = static_cast<std::size_t>(*std::max_element(codes[j].begin(), codes[j].end())) + 1;
        std::vector<double> counts(ncat[j], 0.0);
        for (int c : codes[j]) counts[static_cast<std::size_t>(c)] += 1.0;
        thresholds[j] = thresholds_from_counts(counts);

        if (spec.is_categorical()) {
            std::vector<int> latent_order(spec.level_count());
            if (!marg.ordering.empty())
                latent_order = marg.ordering;
            else
                std::iota(latent_order.begin(), latent_order.end(), 0);
            std::vector<char> seen(spec.level_count(), 0);
            for (std::size_t i = 0; i < n; ++i) seen[static_cast<std::size_t>(data.level(i, j))] = 1;
            for (int lvl : latent_order)
                if (seen[static_cast<std::size_t>(lvl)]) marg.category_levels.push_back(lvl);
            marg.thresholds = thresholds[j];
        } else {
            const auto col = data.column(j);
            const double floor = *std::min_element(col.begin(), col.end());
            const auto at_floor = static_cast<std::size_t>(std::count(col.begin(), col.end(), floor));
            marg.floor_value = floor;
            if (at_floor >= 2) {
                marg.floor_probability = static_cast<double>(at_floor) / static_cast<double>(n);
                std::vector<double> above;
                for (double v : col)
                    if (v > floor) above.push_back(v);
                if (above.size() < 10)
                    throw ValidationError("variable '" + spec.name + "': insufficient data above the floor value for a density fit");
                marg.density = UnimodalDensity::fit(above).truncated_below(floor);
            } else {
                marg.floor_probability = 0.0;
                marg.density = UnimodalDensity::fit(col);
            }
        }
    }

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ncat[a]), static_cast<Eigen::Index>(ncat[b]));
            for (std::size_t i = 0; i < n; ++i) table(codes[a][i], codes[b][i]) += 1.0;
            double rho = 0.0;
            if (ncat[a] >= 2 && ncat[b] >= 2) {
                rho = polychoric_correlation(table, thresholds[a], thresholds[b]);
            } else {
                warn("latent correlation between '" + data.spec(a).name + "' and '" + data.spec(b).name +
                     "' undefined (single observed category); set to 0");
            }
            sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rho;
            sigma(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = rho;
        }
    }
    params.sigma = project_to_correlation(sigma);
    params.projection_shift = (params.sigma - sigma).cwiseAbs().maxCoeff();
    if (params.projection_shift > 0.1)
        warn("latent correlation matrix repair moved an entry by " + std::to_string(params.projection_shift));
    return params;
}

MixedDataset sample_latent_gaussian(const LatentGaussianParams& params, std::size_t n, std::uint64_t seed) {
    const std::size_t p = params.specs.size();
    if (params.marginals.size() != p || static_cast<std::size_t>(params.sigma.rows()) != p)
        throw ValidationError("latent Gaussian parameters are inconsistent");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(params.sigma);
    const Eigen::MatrixXd factor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> values(n * p);
    Eigen::VectorXd e(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < e.size(); ++c) e(c) = normal(rng);
        const Eigen::VectorXd z = factor * e;
        for (std::size_t j = 0; j < p; ++j) {
            const auto& marg = params.marginals[j];
            const double zj = z(static_cast<Eigen::Index>(j));
            double x;
            if (params.specs[j].is_categorical()) {
                const auto g = static_cast<std::size_t>(
                    std::lower_bound(marg.thresholds.begin(), marg.thresholds.end(), zj) - marg.thresholds.begin());
                x = marg.category_levels.at(g);
            } else {
                const double u = norm_cdf(zj);
                if (u <= marg.floor_probability || !marg.density) {
                    x = marg.floor_value;
                } else {
                    const double w = (u - marg.floor_probability) / (1.0 - marg.floor_probability);
                    x = marg.density->quantile(w);
                    if (marg.floor_probability > 0 && x <= marg.floor_value)
                        x = std::nextafter(marg.floor_value, std::numeric_limits<double>::infinity());
                }
            }
            values[i * p + j] = x;
        }
    }
    return MixedDataset(params.specs, n, std::move(values));
}

}  // namespace nullboot
