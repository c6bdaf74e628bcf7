#include "nullboot/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nullboot/errors.hpp"

namespace nullboot {

std::size_t count_modes(std::span<const double> values) {
    if (values.empty()) return 0;
    const double top = *std::max_element(values.begin(), values.end());
    const double eps = 1e-10 * std::abs(top);
    std::size_t modes = 0;
    int last_dir = 0;  // +1 rising, -1 falling, 0 none yet
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double diff = values[i] - values[i - 1];
        if (std::abs(diff) <= eps) continue;
        const int dir = diff > 0 ? 1 : -1;
        if (last_dir == 1 && dir == -1) ++modes;
        last_dir = dir;
    }
    if (last_dir == 1) ++modes;  // still rising at the right edge
    if (modes == 0 && top > 0) modes = 1;
    return modes;
}

namespace {

double quantile_type7(std::vector<double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double default_bandwidth(const std::vector<double>& sorted) {
    const double n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
    double lo = std::min(sd, iqr / 1.34);
    if (!(lo > 0)) lo = sd > 0 ? sd : (std::abs(sorted.front()) > 0 ? std::abs(sorted.front()) : 1.0);
    return 0.9 * lo * std::pow(n, -0.2);
}

void evaluate_kde(const std::vector<double>& x, double h, std::vector<double>& grid, std::vector<double>& dens) {
    const std::size_t m = UnimodalDensity::kGridSize;
    const double lo = x.front() - 3.0 * h, hi = x.back() + 3.0 * h;
    grid.resize(m);
    dens.assign(m, 0.0);
    for (std::size_t g = 0; g < m; ++g) grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(m - 1);
    const double norm = 1.0 / (static_cast<double>(x.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < m; ++g) {
        double s = 0.0;
        for (double xi : x) {
            const double z = (grid[g] - xi) / h;
            if (std::abs(z) < 40.0) s += std::exp(-0.5 * z * z);
        }
        dens[g] = s * norm;
    }
}

}  // namespace

UnimodalDensity UnimodalDensity::fit(std::span<const double> values) {
    if (values.size() < 10) throw ValidationError("unimodal_density_fit: insufficient data (at least 10 observations required)");
    std::vector<double> x(values.begin(), values.end());
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("unimodal_density_fit: non-finite observation");
    std::sort(x.begin(), x.end());
    const double h0 = default_bandwidth(x);
    UnimodalDensity out;
    out.initial_bandwidth_ = h0;
    double h = h0;
    for (std::size_t step = 0;; ++step) {
        evaluate_kde(x, h, out.grid_, out.density_);
        if (count_modes(out.density_) <= 1) {
            out.bandwidth_ = h;
            out.steps_ = step;
            break;
        }
        if (step > 100000) throw NumericalError("unimodal_density_fit: no unimodal bandwidth found");
        h += h0 / 20.0;
    }
    out.build_cdf();
    return out;
}

UnimodalDensity UnimodalDensity::from_grid(std::vector<double> grid, std::vector<double> density, double bandwidth,
                                           double initial_bandwidth, std::size_t steps) {
    if (grid.size() < 2 || grid.size() != density.size()) throw ValidationError("density grid malformed");
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (!(grid[g] > grid[g - 1])) throw ValidationError("density grid must be increasing");
    for (double v : density)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("density values must be finite and >= 0");
    UnimodalDensity out;
    out.grid_ = std::move(grid);
    out.density_ = std::move(density);
    out.bandwidth_ = bandwidth;
    out.initial_bandwidth_ = initial_bandwidth;
    out.steps_ = steps;
    out.build_cdf();
    return out;
}

void UnimodalDensity::build_cdf() {
    // Densities already normalized (e.g. read back from a file) are kept bit for bit.
    const double mass = total_mass();
    if (!(mass > 0.0)) throw NumericalError("density has zero mass on its grid");
    if (std::abs(mass - 1.0) > 1e-12)
        for (auto& v : density_) v /= mass;
    cdf_.assign(grid_.size(), 0.0);
    for (std::size_t g = 1; g < grid_.size(); ++g)
        cdf_[g] = cdf_[g - 1] + 0.5 * (density_[g] + density_[g - 1]) * (grid_[g] - grid_[g - 1]);
    const double total = cdf_.back();
    for (auto& v : cdf_) v /= total;
    cdf_.back() = 1.0;
}

double UnimodalDensity::total_mass() const {
    double s = 0.0;
    for (std::size_t g = 1; g < grid_.size(); ++g) s += 0.5 * (density_[g] + density_[g - 1]) * (grid_[g] - grid_[g - 1]);
    return s;
}

double UnimodalDensity::pdf(double x) const {
    if (x < grid_.front() || x > grid_.back()) return 0.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(it - grid_.begin()), grid_.size() - 1);
    const double t = (x - grid_[g - 1]) / (grid_[g] - grid_[g - 1]);
    return density_[g - 1] + t * (density_[g] - density_[g - 1]);
}

double UnimodalDensity::cdf(double x) const {
    if (x <= grid_.front()) return 0.0;
    if (x >= grid_.back()) return 1.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t g = static_cast<std::size_t>(it - grid_.begin());
    const double dx = x - grid_[g - 1];
    const double slope = (density_[g] - density_[g - 1]) / (grid_[g] - grid_[g - 1]);
    return cdf_[g - 1] + density_[g - 1] * dx + 0.5 * slope * dx * dx;
}

double UnimodalDensity::quantile(double u) const {
    if (u <= 0.0) return grid_.front();
    if (u >= 1.0) return grid_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t g = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), 1, grid_.size() - 1);
    // Solve cdf_[g-1] + f0*t + slope*t^2/2 = u for t in [0, width].
    const double width = grid_[g] - grid_[g - 1];
    const double f0 = density_[g - 1];
    const double slope = (density_[g] - f0) / width;
    const double target = u - cdf_[g - 1];
    double t;
    if (std::abs(slope) < 1e-300) {
        t = f0 > 0 ? target / f0 : 0.5 * width;
    } else {
        const double denom = f0 + std::sqrt(std::max(0.0, f0 * f0 + 2.0 * slope * target));
        t = denom > 0 ? 2.0 * target / denom : 0.0;
    }
    return grid_[g - 1] + std::clamp(t, 0.0, width);
}

double UnimodalDensity::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return quantile(unif(rng));
}

UnimodalDensity UnimodalDensity::truncated_below(double lo) const {
    if (lo <= grid_.front()) return *this;
    if (lo >= grid_.back()) throw NumericalError("density truncation point lies beyond its support");
    std::vector<double> g{lo}, d{pdf(lo)};
    for (std::size_t i = 0; i < grid_.size(); ++i)
        if (grid_[i] > lo) {
            g.push_back(grid_[i]);
            d.push_back(density_[i]);
        }
    return from_grid(std::move(g), std::move(d), bandwidth_, initial_bandwidth_, steps_);
}

}  // namespace nullboot
