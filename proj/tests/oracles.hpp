#pragma once

// Brute-force reference implementations used by the unit and acceptance tests. They favour
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/rational.hpp>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix random_dissimilarity(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
    return d;
}

inline std::vector<double> flatten(const Matrix& d) {
    std::vector<double> v;
    for (const auto& row : d) v.insert(v.end(), row.begin(), row.end());
    return v;
}

// Silhouette straight from its definition, looping over cluster member lists.
inline double silhouette(const Matrix& d, const std::vector<int>& labels) {
    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) clusters[labels[i]].push_back(i);
    double total = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        ++count;
        const auto& own = clusters[labels[i]];
        if (own.size() == 1) continue;
        double a = 0;
        for (std::size_t j : own)
            if (j != i) a += d[i][j];
        a /= static_cast<double>(own.size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, members] : clusters) {
            if (label == labels[i]) continue;
            double s = 0;
            for (std::size_t j : members) s += d[i][j];
            b = std::min(b, s / static_cast<double>(members.size()));
        }
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(count);
}

inline double medoid_cost(const Matrix& d, const std::vector<std::size_t>& medoids) {
    double total = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m : medoids) best = std::min(best, d[i][m]);
        total += best;
    }
    return total;
}

// Minimum medoid objective over all k-subsets.
inline double exhaustive_pam_optimum(const Matrix& d, std::size_t k) {
    const std::size_t n = d.size();
    std::vector<int> select(n, 0);
    std::fill(select.end() - static_cast<std::ptrdiff_t>(k), select.end(), 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        std::vector<std::size_t> medoids;
        for (std::size_t i = 0; i < n; ++i)
            if (select[i]) medoids.push_back(i);
        best = std::min(best, medoid_cost(d, medoids));
    } while (std::next_permutation(select.begin(), select.end()));
    return best;
}

// True if no single medoid/non-medoid exchange lowers the objective by more than `tol`.
inline bool swap_locally_optimal(const Matrix& d, const std::vector<std::size_t>& medoids, double tol = 1e-12) {
    const double base = medoid_cost(d, medoids);
    for (std::size_t slot = 0; slot < medoids.size(); ++slot)
        for (std::size_t h = 0; h < d.size(); ++h) {
            if (std::find(medoids.begin(), medoids.end(), h) != medoids.end()) continue;
            auto trial = medoids;
            trial[slot] = h;
            if (medoid_cost(d, trial) < base - tol * (1.0 + base)) return false;
        }
    return true;
}

struct MergeStep {
    std::size_t a, b;
    double height;
};

// Agglomeration recomputing every inter-cluster distance from the member lists at each step.
// Clusters are identified scipy-style (leaves 0..n-1, merge s creates n+s). Equal heights go to
// the pair with lexicographically smallest (min member, min member).
inline std::vector<MergeStep> naive_linkage(const Matrix& d, bool complete,
                                            std::vector<std::vector<std::vector<std::size_t>>>* history = nullptr) {
    const std::size_t n = d.size();
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
        members.push_back({i});
        ids.push_back(i);
    }
    if (history) history->push_back(members);
    std::vector<MergeStep> steps;
    for (std::size_t s = 0; s + 1 < n; ++s) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        std::pair<std::size_t, std::size_t> best_key{n, n};
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                double h = 0.0;
                for (std::size_t i : members[x])
                    for (std::size_t j : members[y]) h = complete ? std::max(h, d[i][j]) : h + d[i][j];
                if (!complete) h /= static_cast<double>(members[x].size() * members[y].size());
                auto mx = *std::min_element(members[x].begin(), members[x].end());
                auto my = *std::min_element(members[y].begin(), members[y].end());
                const std::pair<std::size_t, std::size_t> key{std::min(mx, my), std::max(mx, my)};
                if (h < best || (h == best && key < best_key)) {
                    best = h;
                    best_key = key;
                    ba = x;
                    bb = y;
                }
            }
        steps.push_back({std::min(ids[ba], ids[bb]), std::max(ids[ba], ids[bb]), best});
        members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
        ids[ba] = n + s;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(bb));
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bb));
        if (history) history->push_back(members);
    }
    return steps;
}

// Labels numbered by first appearance, for comparing partitions up to relabeling.
inline std::vector<int> canonical(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out;
    for (int l : labels) {
        if (l < 0) {
            out.push_back(l);
            continue;
        }
        auto it = remap.find(l);
        if (it == remap.end()) it = remap.emplace(l, static_cast<int>(remap.size())).first;
        out.push_back(it->second);
    }
    return out;
}

inline std::vector<int> labels_from_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
    std::vector<int> labels(n, -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t i : groups[g]) labels[i] = static_cast<int>(g);
    return canonical(labels);
}

using Rational = boost::rational<long long>;

struct RankTableAnswer {
    std::vector<Rational> per_k;
    Rational mean_rank;
    Rational mean_raw;
    Rational bonferroni;
    std::vector<double> calibrated;
    std::size_t best = 0;  // exact argmax of the calibrated profile, first on ties
};

// Exhaustive evaluation over the (m+1) x |K| table whose last row is the observed dataset.
// Values are rationals so that every comparison is exact.
inline RankTableAnswer rank_table(const std::vector<std::vector<Rational>>& table) {
    const std::size_t rows = table.size();
    const std::size_t m = rows - 1;
    const std::size_t nk = table[0].size();
    const Rational denom(static_cast<long long>(m + 1));
    auto ptilde = [&](std::size_t i, std::size_t k) {
        long long c = 0;
        for (std::size_t j = 0; j < rows; ++j)
            if (j != i && table[j][k] >= table[i][k]) ++c;
        return Rational(c + 1) / denom;
    };
    RankTableAnswer ans;
    Rational obs_sum(0);
    for (std::size_t k = 0; k < nk; ++k) {
        ans.per_k.push_back(ptilde(m, k));
        obs_sum += ans.per_k.back();
    }
    long long below = 0;
    for (std::size_t i = 0; i < m; ++i) {
        Rational s(0);
        for (std::size_t k = 0; k < nk; ++k) s += ptilde(i, k);
        if (s <= obs_sum) ++below;
    }
    ans.mean_rank = Rational(below + 1) / denom;

    Rational obs_raw(0);
    for (std::size_t k = 0; k < nk; ++k) obs_raw += table[m][k];
    long long above = 0;
    for (std::size_t i = 0; i < m; ++i) {
        Rational s(0);
        for (std::size_t k = 0; k < nk; ++k) s += table[i][k];
        if (s >= obs_raw) ++above;
    }
    ans.mean_raw = Rational(above + 1) / denom;

    Rational lowest = *std::min_element(ans.per_k.begin(), ans.per_k.end());
    ans.bonferroni = std::min(Rational(1), Rational(static_cast<long long>(nk)) * lowest);

    // Calibrated values as exact (sign, square) pairs: c = diff / sqrt(var).
    struct Exact {
        int sign;        // of diff
        bool infinite;   // var == 0 and diff != 0
        Rational square; // diff^2 / var when finite
    };
    std::vector<Exact> exact;
    for (std::size_t k = 0; k < nk; ++k) {
        Rational mean(0);
        for (std::size_t i = 0; i < m; ++i) mean += table[i][k];
        mean /= Rational(static_cast<long long>(m));
        Rational var(0);
        for (std::size_t i = 0; i < m; ++i) var += (table[i][k] - mean) * (table[i][k] - mean);
        const Rational diff = table[m][k] - mean;
        const Rational zero(0);
        const int sign = diff > zero ? 1 : (diff < zero ? -1 : 0);
        if (m < 2 || var == zero) {
            exact.push_back({sign, sign != 0, Rational(0)});
            ans.calibrated.push_back(sign > 0 ? std::numeric_limits<double>::infinity()
                                              : (sign < 0 ? -std::numeric_limits<double>::infinity() : 0.0));
        } else {
            var /= Rational(static_cast<long long>(m - 1));
            const Rational sq = diff * diff / var;
            exact.push_back({sign, false, sq});
            ans.calibrated.push_back(sign * std::sqrt(boost::rational_cast<double>(sq)));
        }
    }
    // a > b in the exact order of the calibrated values.
    auto greater = [](const Exact& a, const Exact& b) {
        auto rank = [](const Exact& e) { return e.infinite ? e.sign * 2 : 0; };
        if (rank(a) != rank(b)) return rank(a) > rank(b);
        if (a.infinite) return false;
        const Rational va = a.sign >= 0 ? a.square : -a.square;
        const Rational vb = b.sign >= 0 ? b.square : -b.square;
        return va > vb;
    };
    for (std::size_t k = 1; k < nk; ++k)
        if (greater(exact[k], exact[ans.best])) ans.best = k;
    return ans;
}

// Bivariate normal CDF by Plackett's identity: Phi(h)Phi(k) + int_0^rho phi2(h, k; r) dr.
inline double bvn_cdf(double h, double k, double rho) {
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    auto phi2 = [&](double r) {
        const double s = 1.0 - r * r;
        return std::exp(-(h * h - 2.0 * r * h * k + k * k) / (2.0 * s)) / (2.0 * M_PI * std::sqrt(s));
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(phi2, 0.0, rho, 15, 1e-14);
    return Phi(h) * Phi(k) + integral;
}

}  // namespace oracle
