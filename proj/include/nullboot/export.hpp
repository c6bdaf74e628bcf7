#pragma once

#include <filesystem>
#include <string>

#include "nullboot/bootstrap.hpp"
#include "nullboot/serialize.hpp"

namespace nullboot {

// Rows "observed", then 1..m; one column per k in K.
void write_replicates_csv(const std::filesystem::path& path, const BootstrapResult& result);

// Bootstrap validity plot: one grey polyline per replicate and the observed profile on top,
// index value against k with one tick per k in K.
std::string validity_svg(const BootstrapResult& result, const std::string& index_label);
void write_validity_svg(const std::filesystem::path& path, const BootstrapResult& result,
                        const std::string& index_label);

// Per-k table (V, EV, SV, calibrated, p_k), the three aggregated p-values and k_hat.
std::string summary_table(const BootstrapResult& result);

struct ExportPaths {
    std::filesystem::path json;
    std::filesystem::path csv;
    std::filesystem::path svg;
};

// Writes result.json, replicates.csv and validity.svg into `dir` (created if needed).
ExportPaths export_result(const BootstrapResult& result, const Json& config, const std::filesystem::path& dir);

}  // namespace nullboot
