#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nullboot {

enum class VarKind { continuous, ordinal, nominal, binary };

std::string_view to_string(VarKind kind);
VarKind parse_var_kind(std::string_view text);

struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::continuous;
    std::vector<std::string> levels;  // ordered; empty for continuous
    double weight = 1.0;

    bool is_categorical() const { return kind != VarKind::continuous; }
    std::size_t level_count() const { return levels.size(); }
    // Index of `label` in levels, or -1.
    int find_level(std::string_view label) const;
    void validate() const;

    bool operator==(const VariableSpec&) const = default;
};

// n x p table. Continuous cells hold the real value; categorical cells hold the 0-based level
// index (Likert code minus one for ordinal variables).
class MixedDataset {
public:
    MixedDataset(std::vector<VariableSpec> specs, std::size_t n, std::vector<double> values);

    std::size_t n() const { return n_; }
    std::size_t p() const { return specs_.size(); }
    const std::vector<VariableSpec>& specs() const { return specs_; }
    const VariableSpec& spec(std::size_t j) const { return specs_[j]; }

    double value(std::size_t i, std::size_t j) const { return values_[i * p() + j]; }
    int level(std::size_t i, std::size_t j) const { return static_cast<int>(values_[i * p() + j]); }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * p(), p()}; }
    std::span<const double> values() const { return values_; }
    std::vector<double> column(std::size_t j) const;

    bool operator==(const MixedDataset&) const = default;

private:
    std::vector<VariableSpec> specs_;
    std::size_t n_;
    std::vector<double> values_;
};

inline constexpr int kMissing = -1;

// n categorical series of common length T. Categories are stored 0-based (0..h-1); files use
// 1..h. kMissing marks an unobserved day.
class CategoricalSeriesDataset {
public:
    CategoricalSeriesDataset(std::size_t T, int h, int prescription_period,
                             std::vector<std::vector<int>> series);

    std::size_t n() const { return series_.size(); }
    std::size_t T() const { return T_; }
    int h() const { return h_; }
    int prescription_period() const { return period_; }
    int at(std::size_t i, std::size_t t) const { return series_[i][t]; }
    std::span<const int> series(std::size_t i) const { return series_[i]; }

    bool operator==(const CategoricalSeriesDataset&) const = default;

private:
    std::size_t T_;
    int h_;
    int period_;
    std::vector<std::vector<int>> series_;
};

using Adjacency = std::vector<std::vector<std::size_t>>;

// Binary species x regions incidence with a symmetric, irreflexive region adjacency.
class PresenceAbsenceData {
public:
    PresenceAbsenceData(std::vector<std::string> species, std::vector<std::string> regions,
                        std::vector<std::uint8_t> presence, Adjacency neighbors);

    std::size_t n_species() const { return species_.size(); }
    std::size_t n_regions() const { return regions_.size(); }
    bool present(std::size_t s, std::size_t r) const { return presence_[s * n_regions() + r] != 0; }
    std::vector<std::size_t> range(std::size_t s) const;
    std::size_t range_size(std::size_t s) const;
    const Adjacency& neighbors() const { return neighbors_; }
    bool adjacent(std::size_t a, std::size_t b) const;
    const std::vector<std::string>& species_names() const { return species_; }
    const std::vector<std::string>& region_names() const { return regions_; }
    std::span<const std::uint8_t> presence() const { return presence_; }

    bool operator==(const PresenceAbsenceData&) const = default;

private:
    std::vector<std::string> species_;
    std::vector<std::string> regions_;
    std::vector<std::uint8_t> presence_;
    Adjacency neighbors_;  // sorted lists
};

// Throws ValidationError unless `neighbors` is a symmetric, irreflexive adjacency over
// n_regions nodes. Sorts each list and removes duplicates.
Adjacency normalize_adjacency(Adjacency neighbors, std::size_t n_regions);

class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;
    // Row-major n x n values; validated (symmetric, zero diagonal, finite, nonnegative).
    DissimilarityMatrix(std::size_t n, std::vector<double> values);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::span<const double> values() const { return d_; }
    DissimilarityMatrix subset(std::span<const std::size_t> index) const;

    bool operator==(const DissimilarityMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

inline constexpr int kNoise = -1;

// Assignment of n objects to clusters 0..k-1, with kNoise for unassigned objects.
class Partition {
public:
    Partition(std::vector<int> labels, std::size_t k, std::vector<std::size_t> medoids = {});

    // Relabels clusters consecutively in order of first appearance, dropping empty labels.
    static Partition compact(std::vector<int> labels);

    std::size_t size() const { return labels_.size(); }
    std::size_t k() const { return k_; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::size_t>& medoids() const { return medoids_; }
    bool has_noise() const;
    std::vector<std::size_t> cluster_sizes() const;
    std::vector<std::vector<std::size_t>> members() const;

    bool operator==(const Partition&) const = default;

private:
    std::vector<int> labels_;
    std::size_t k_;
    std::vector<std::size_t> medoids_;
};

}  // namespace nullboot
