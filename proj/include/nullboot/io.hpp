#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/data_model.hpp"
#include "nullboot/dissimilarity.hpp"

namespace nullboot {

// Variable declarations for a mixed-type CSV, plus the distance weights they imply.
//
// Schema files are INI text, one section per column in column order:
//
//     [housing]
//     kind = nominal
//     levels = owns,rents,condo
//     weight = 0.5
//     dummy_weights = 1,0.5,1
struct Schema {
    std::vector<VariableSpec> variables;
    MixedDistanceConfig distance;
};

Schema read_schema(const std::filesystem::path& path);
void write_schema(const std::filesystem::path& path, const Schema& schema);

// Comma-separated, header row of variable names matching the schema order.
MixedDataset read_mixed_csv(const std::filesystem::path& path, const std::vector<VariableSpec>& schema);
void write_mixed_csv(const std::filesystem::path& path, const MixedDataset& data);

// One series per row, one day per column, categories 1..h, "NA" for missing. A header row
// is required. T = 0 takes the length from the header.
CategoricalSeriesDataset read_series_csv(const std::filesystem::path& path, std::size_t T, int h,
                                         int prescription_period);
void write_series_csv(const std::filesystem::path& path, const CategoricalSeriesDataset& data);

// Matrix file: header "species,<region>,...", then one 0/1 row per species led by its name.
// Neighbor file: "regionA,regionB" per line; names or 1-based region numbers.
PresenceAbsenceData read_presence_absence(const std::filesystem::path& matrix_path,
                                          const std::filesystem::path& neighbors_path);
void write_presence_absence(const std::filesystem::path& matrix_path, const std::filesystem::path& neighbors_path,
                            const PresenceAbsenceData& data);

void write_dissimilarity_csv(const std::filesystem::path& path, const DissimilarityMatrix& d);
// Square numeric CSV without header.
Eigen::MatrixXd read_numeric_matrix_csv(const std::filesystem::path& path);

// Exact textual form of a double (shortest representation that round-trips).
std::string format_double(double v);

}  // namespace nullboot
