#include "nullboot/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "nullboot/errors.hpp"

namespace nullboot {

std::string_view to_string(VarKind kind) {
    switch (kind) {
        case VarKind::continuous: return "continuous";
        case VarKind::ordinal: return "ordinal";
        case VarKind::nominal: return "nominal";
        case VarKind::binary: return "binary";
    }
    return "continuous";
}

VarKind parse_var_kind(std::string_view text) {
    if (text == "continuous") return VarKind::continuous;
    if (text == "ordinal") return VarKind::ordinal;
    if (text == "nominal") return VarKind::nominal;
    if (text == "binary") return VarKind::binary;
    throw ValidationError("unknown variable kind '" + std::string(text) + "'");
}

int VariableSpec::find_level(std::string_view label) const {
    for (std::size_t g = 0; g < levels.size(); ++g)
        if (levels[g] == label) return static_cast<int>(g);
    return -1;
}

void VariableSpec::validate() const {
    if (name.empty()) throw ValidationError("variable name must be nonempty");
    if (!(weight >= 0.0) || !std::isfinite(weight))
        throw ValidationError("variable '" + name + "': weight must be finite and >= 0");
    if (kind == VarKind::continuous) {
        if (!levels.empty()) throw ValidationError("variable '" + name + "': continuous variables take no levels");
        return;
    }
    if (levels.empty()) throw ValidationError("variable '" + name + "': categorical variables need levels");
    if (kind == VarKind::binary && levels.size() != 2)
        throw ValidationError("variable '" + name + "': binary variables need exactly 2 levels");
    std::set<std::string> seen(levels.begin(), levels.end());
    if (seen.size() != levels.size()) throw ValidationError("variable '" + name + "': duplicate level labels");
}

MixedDataset::MixedDataset(std::vector<VariableSpec> specs, std::size_t n, std::vector<double> values)
    : specs_(std::move(specs)), n_(n), values_(std::move(values)) {
    if (specs_.empty()) throw ValidationError("dataset needs at least one variable");
    if (n_ < 2) throw ValidationError("n >= 2 required");
    if (values_.size() != n_ * specs_.size()) throw ValidationError("value count does not match n x p");
    std::set<std::string> names;
    for (const auto& s : specs_) {
        s.validate();
        if (!names.insert(s.name).second) throw ValidationError("duplicate variable name '" + s.name + "'");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < p(); ++j) {
            const double v = value(i, j);
            if (!std::isfinite(v))
                throw ValidationError("row " + std::to_string(i + 1) + ", variable '" + specs_[j].name + "': missing or non-finite value");
            if (specs_[j].is_categorical()) {
                if (v != std::floor(v) || v < 0 || v >= static_cast<double>(specs_[j].level_count()))
                    throw ValidationError("row " + std::to_string(i + 1) + ", variable '" + specs_[j].name + "': level index out of range");
            }
        }
    }
}

std::vector<double> MixedDataset::column(std::size_t j) const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = value(i, j);
    return out;
}

CategoricalSeriesDataset::CategoricalSeriesDataset(std::size_t T, int h, int prescription_period,
                                                   std::vector<std::vector<int>> series)
    : T_(T), h_(h), period_(prescription_period), series_(std::move(series)) {
    if (T_ < 2) throw ValidationError("series length T >= 2 required");
    if (h_ < 1) throw ValidationError("number of categories h >= 1 required");
    if (period_ < 1) throw ValidationError("prescription_period >= 1 required");
    if (series_.size() < 2) throw ValidationError("n >= 2 required");
    for (std::size_t i = 0; i < series_.size(); ++i) {
        if (series_[i].size() != T_)
            throw ValidationError("series " + std::to_string(i + 1) + ": length mismatch (expected " + std::to_string(T_) + ")");
        for (int c : series_[i])
            if (c != kMissing && (c < 0 || c >= h_))
                throw ValidationError("series " + std::to_string(i + 1) + ": category out of range");
    }
}

Adjacency normalize_adjacency(Adjacency neighbors, std::size_t n_regions) {
    if (neighbors.size() != n_regions) throw ValidationError("adjacency must list every region");
    for (std::size_t r = 0; r < n_regions; ++r) {
        auto& list = neighbors[r];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        for (std::size_t s : list) {
            if (s >= n_regions) throw ValidationError("adjacency refers to an unknown region");
            if (s == r) throw ValidationError("irreflexive adjacency required");
        }
    }
    for (std::size_t r = 0; r < n_regions; ++r)
        for (std::size_t s : neighbors[r])
            if (!std::binary_search(neighbors[s].begin(), neighbors[s].end(), r))
                throw ValidationError("adjacency must be symmetric");
    return neighbors;
}

PresenceAbsenceData::PresenceAbsenceData(std::vector<std::string> species, std::vector<std::string> regions,
                                         std::vector<std::uint8_t> presence, Adjacency neighbors)
    : species_(std::move(species)), regions_(std::move(regions)), presence_(std::move(presence)) {
    if (species_.size() < 2) throw ValidationError("at least 2 species required");
    if (regions_.empty()) throw ValidationError("at least one region required");
    if (presence_.size() != species_.size() * regions_.size())
        throw ValidationError("presence matrix size does not match species x regions");
    for (auto& v : presence_) {
        if (v > 1) throw ValidationError("presence entries must be 0 or 1");
    }
    for (std::size_t s = 0; s < n_species(); ++s)
        if (range_size(s) == 0) throw ValidationError("species '" + species_[s] + "' has no presences");
    neighbors_ = normalize_adjacency(std::move(neighbors), regions_.size());
}

std::vector<std::size_t> PresenceAbsenceData::range(std::size_t s) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < n_regions(); ++r)
        if (present(s, r)) out.push_back(r);
    return out;
}

std::size_t PresenceAbsenceData::range_size(std::size_t s) const {
    const auto* row = presence_.data() + s * n_regions();
    return static_cast<std::size_t>(std::count(row, row + n_regions(), std::uint8_t{1}));
}

bool PresenceAbsenceData::adjacent(std::size_t a, std::size_t b) const {
    return std::binary_search(neighbors_[a].begin(), neighbors_[a].end(), b);
}

DissimilarityMatrix::DissimilarityMatrix(std::size_t n, std::vector<double> values) : n_(n), d_(std::move(values)) {
    if (d_.size() != n_ * n_) throw ValidationError("dissimilarity matrix must be n x n");
    for (std::size_t i = 0; i < n_; ++i) {
        if (d_[i * n_ + i] != 0.0) throw ValidationError("dissimilarity diagonal must be zero");
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double a = d_[i * n_ + j], b = d_[j * n_ + i];
            if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("dissimilarities must be finite");
            if (a < 0.0 || b < 0.0) throw ValidationError("dissimilarities must be nonnegative");
            if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) throw ValidationError("dissimilarity matrix must be symmetric");
        }
    }
}

DissimilarityMatrix DissimilarityMatrix::subset(std::span<const std::size_t> index) const {
    const std::size_t m = index.size();
    std::vector<double> out(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) out[a * m + b] = (*this)(index[a], index[b]);
    DissimilarityMatrix sub;
    sub.n_ = m;
    sub.d_ = std::move(out);
    return sub;
}

Partition::Partition(std::vector<int> labels, std::size_t k, std::vector<std::size_t> medoids)
    : labels_(std::move(labels)), k_(k), medoids_(std::move(medoids)) {
    if (k_ < 1) throw ValidationError("partition needs k >= 1");
    std::vector<std::size_t> sizes(k_, 0);
    for (int l : labels_) {
        if (l == kNoise) continue;
        if (l < 0 || static_cast<std::size_t>(l) >= k_) throw ValidationError("partition label out of range");
        ++sizes[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < k_; ++c)
        if (sizes[c] == 0) throw ValidationError("partition cluster " + std::to_string(c) + " is empty");
    if (!medoids_.empty()) {
        if (medoids_.size() != k_) throw ValidationError("partition needs one medoid per cluster");
        for (std::size_t c = 0; c < k_; ++c)
            if (medoids_[c] >= labels_.size() || labels_[medoids_[c]] != static_cast<int>(c))
                throw ValidationError("medoid of cluster " + std::to_string(c) + " must carry its label");
    }
}

Partition Partition::compact(std::vector<int> labels) {
    std::vector<int> remap;
    for (int& l : labels) {
        if (l == kNoise) continue;
        if (l < 0) throw ValidationError("negative cluster label");
        if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
        int& target = remap[static_cast<std::size_t>(l)];
        if (target < 0) target = static_cast<int>(std::count_if(remap.begin(), remap.end(), [](int x) { return x >= 0; }));
        l = target;
    }
    const auto k = static_cast<std::size_t>(std::count_if(remap.begin(), remap.end(), [](int x) { return x >= 0; }));
    if (k == 0) throw ValidationError("partition has no clustered objects");
    return Partition(std::move(labels), k);
}

bool Partition::has_noise() const { return std::find(labels_.begin(), labels_.end(), kNoise) != labels_.end(); }

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(k_, 0);
    for (int l : labels_)
        if (l != kNoise) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

std::vector<std::vector<std::size_t>> Partition::members() const {
    std::vector<std::vector<std::size_t>> out(k_);
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] != kNoise) out[static_cast<std::size_t>(labels_[i])].push_back(i);
    return out;
}

}  // namespace nullboot
