#include "nullboot/spatial_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nullboot/errors.hpp"
#include "nullboot/log.hpp"
#include "nullboot/parallel.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

void SpatialRangeParams::validate() const {
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw ValidationError("spatial parameters: p_d must lie in [0, 1]");
    const std::size_t R = attractivity.size();
    if (R == 0) throw ValidationError("spatial parameters: no regions");
    if (neighbors.size() != R || region_names.size() != R) throw ValidationError("spatial parameters: region count mismatch");
    double total = 0;
    for (double a : attractivity) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("spatial parameters: attractivity must be >= 0");
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("spatial parameters: attractivity must sum to 1");
    const auto positive = static_cast<std::size_t>(std::count_if(attractivity.begin(), attractivity.end(), [](double a) { return a > 0; }));
    if (species_sizes.empty()) throw ValidationError("spatial parameters: empty species size distribution");
    for (std::size_t s : species_sizes)
        if (s < 1 || s > positive) throw ValidationError("spatial parameters: species size outside 1..(regions with positive attractivity)");
    normalize_adjacency(neighbors, R);
}

std::size_t connectivity_components(std::span<const std::size_t> range, const Adjacency& neighbors) {
    if (range.empty()) throw ValidationError("connectivity_components: empty range");
    std::vector<char> in(neighbors.size(), 0), seen(neighbors.size(), 0);
    for (std::size_t r : range) {
        if (r >= neighbors.size()) throw ValidationError("connectivity_components: unknown region");
        in[r] = 1;
    }
    std::size_t components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start : range) {
        if (seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : neighbors[v])
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
    }
    return components;
}

double disjunction_ratio(const PresenceAbsenceData& data) {
    double num = 0, den = 0;
    for (std::size_t s = 0; s < data.n_species(); ++s) {
        const auto range = data.range(s);
        num += static_cast<double>(connectivity_components(range, data.neighbors()) - 1);
        den += static_cast<double>(range.size() - 1);
    }
    if (den == 0) throw ValidationError("q_d undefined: every species occupies a single region");
    return num / den;
}

SpatialRangeParams empirical_spatial_params(const PresenceAbsenceData& data, double p_d) {
    SpatialRangeParams params;
    params.p_d = p_d;
    params.attractivity.assign(data.n_regions(), 0.0);
    double total = 0;
    for (std::size_t s = 0; s < data.n_species(); ++s) {
        params.species_sizes.push_back(data.range_size(s));
        for (std::size_t r = 0; r < data.n_regions(); ++r)
            if (data.present(s, r)) {
                params.attractivity[r] += 1.0;
                total += 1.0;
            }
    }
    for (auto& a : params.attractivity) a /= total;
    params.neighbors = data.neighbors();
    params.region_names = data.region_names();
    return params;
}

std::vector<double> default_disjunction_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 9; ++i) g.push_back(i / 10.0);
    return g;
}

namespace {

std::size_t weighted_pick(const std::vector<std::size_t>& set, const std::vector<double>& weight, Rng& rng) {
    double total = 0;
    for (std::size_t r : set) total += weight[r];
    std::uniform_real_distribution<double> u(0.0, total);
    double x = u(rng);
    for (std::size_t r : set) {
        x -= weight[r];
        if (x < 0) return r;
    }
    // Rounding at the upper end: last region with positive weight.
    for (auto it = set.rbegin(); it != set.rend(); ++it)
        if (weight[*it] > 0) return *it;
    return set.back();
}

}  // namespace

PresenceAbsenceData sample_spatial(const SpatialRangeParams& params, std::size_t n_species, std::uint64_t seed) {
    params.validate();
    const std::size_t R = params.attractivity.size();
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> size_pick(0, params.species_sizes.size() - 1);
    std::bernoulli_distribution disjoin(params.p_d);
    std::vector<std::size_t> all;
    for (std::size_t r = 0; r < R; ++r)
        if (params.attractivity[r] > 0) all.push_back(r);

    std::vector<std::uint8_t> presence(n_species * R, 0);
    std::vector<char> chosen(R), near(R);
    std::vector<std::size_t> n0, n1;
    for (std::size_t s = 0; s < n_species; ++s) {
        const std::size_t size = params.species_sizes[size_pick(rng)];
        std::fill(chosen.begin(), chosen.end(), 0);
        std::fill(near.begin(), near.end(), 0);
        auto add = [&](std::size_t r) {
            chosen[r] = 1;
            presence[s * R + r] = 1;
            for (std::size_t w : params.neighbors[r]) near[w] = 1;
        };
        add(weighted_pick(all, params.attractivity, rng));
        for (std::size_t j = 1; j < size; ++j) {
            n0.clear();
            n1.clear();
            for (std::size_t r : all) {
                if (chosen[r]) continue;
                (near[r] ? n1 : n0).push_back(r);
            }
            const std::vector<std::size_t>* from;
            if (!n0.empty() && !n1.empty())
                from = disjoin(rng) ? &n0 : &n1;
            else
                from = n0.empty() ? &n1 : &n0;
            add(weighted_pick(*from, params.attractivity, rng));
        }
    }
    std::vector<std::string> species(n_species);
    for (std::size_t s = 0; s < n_species; ++s) species[s] = "species" + std::to_string(s + 1);
    return PresenceAbsenceData(std::move(species), params.region_names, std::move(presence), params.neighbors);
}

DisjunctionEstimate estimate_disjunction(const PresenceAbsenceData& data, std::span<const double> grid, std::size_t reps,
                                         std::uint64_t seed, std::size_t workers) {
    if (grid.size() < 2) throw ValidationError("estimate_disjunction: grid needs at least two values");
    if (reps < 1) throw ValidationError("estimate_disjunction: reps >= 1 required");
    for (double g : grid)
        if (!(g >= 0.0 && g <= 1.0)) throw ValidationError("estimate_disjunction: grid values must lie in [0, 1]");
    DisjunctionEstimate est;
    est.q_d = disjunction_ratio(data);
    est.grid.assign(grid.begin(), grid.end());
    est.mean_q.assign(grid.size(), 0.0);
    const SpatialRangeParams base = empirical_spatial_params(data, 0.0);

    parallel_for(grid.size(), workers, [&](std::size_t g) {
        SpatialRangeParams params = base;
        params.p_d = grid[g];
        double sum = 0;
        for (std::size_t r = 0; r < reps; ++r)
            sum += disjunction_ratio(sample_spatial(params, data.n_species(), derive_seed(seed, g, r)));
        est.mean_q[g] = sum / static_cast<double>(reps);
    });

    const double m = static_cast<double>(grid.size());
    const double mx = std::accumulate(est.grid.begin(), est.grid.end(), 0.0) / m;
    const double my = std::accumulate(est.mean_q.begin(), est.mean_q.end(), 0.0) / m;
    double sxy = 0, sxx = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        sxy += (est.grid[g] - mx) * (est.mean_q[g] - my);
        sxx += (est.grid[g] - mx) * (est.grid[g] - mx);
    }
    if (sxx == 0) throw ValidationError("estimate_disjunction: grid values must not all be equal");
    est.slope = sxy / sxx;
    est.intercept = my - est.slope * mx;
    if (est.slope > 0) {
        est.p_d = std::clamp((est.q_d - est.intercept) / est.slope, 0.0, 1.0);
    } else {
        warn("estimate_disjunction: simulated q_d does not increase with p_d; falling back to the naive ratio");
        est.p_d = std::clamp(est.q_d, 0.0, 1.0);
    }
    return est;
}

SpatialRangeParams estimate_spatial(const PresenceAbsenceData& data, std::span<const double> grid, std::size_t reps,
                                    std::uint64_t seed, DisjunctionEstimate* report, std::size_t workers) {
    const DisjunctionEstimate est = estimate_disjunction(data, grid, reps, seed, workers);
    if (report) *report = est;
    return empirical_spatial_params(data, est.p_d);
}

}  // namespace nullboot
