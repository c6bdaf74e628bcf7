#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "nullboot/bootstrap.hpp"
#include "nullboot/io.hpp"
#include "nullboot/serialize.hpp"

namespace nullboot {

enum class DataFormat { mixed, series, presence_absence };

std::string_view to_string(DataFormat format);
DataFormat parse_data_format(std::string_view text);

// Run configuration, read from an INI file. Relative paths resolve against the file's
// directory.
//
//     [data]
//     format = mixed              ; mixed | series | presence-absence
//     path = persons.csv
//     schema = persons.ini        ; mixed
//     h = 4                       ; series: categories, T (0 = from header), prescription_period
//     neighbors = neighbors.csv   ; presence-absence
//
//     [null]
//     family = latent-gaussian    ; latent-gaussian | markov | spatial
//     params = fitted.json        ; optional pre-fitted parameters
//     cont_bins = 10
//     disjunction_grid = 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9
//     disjunction_reps = 20
//
//     [pipeline]
//     method = pam                ; pam | average-linkage | complete-linkage | gmm-noise
//     index = asw                 ; asw | prediction-strength | bic | adjusted-bic
//     K = 2-10                    ; range or comma list
//     m = 99
//     seed = 1
//     b = 50
//     mds_dim = 4
//     bic_adjustment = absolute   ; absolute | raw
//     gmm_noise = true
//     gmm_restarts = 10
//     gmm_max_iter = 500
//     gmm_tol = 1e-8
//
//     [distance]
//     series_costs = costs.csv    ; optional (h+1) x (h+1) matrix
//
//     [output]
//     dir = results
struct RunConfig {
    std::filesystem::path source;  // the config file itself

    DataFormat format = DataFormat::mixed;
    std::filesystem::path data_path;
    std::filesystem::path schema_path;
    std::filesystem::path neighbors_path;
    std::size_t series_T = 0;
    int series_h = 0;
    int prescription_period = 7;

    std::optional<std::filesystem::path> params_path;
    std::optional<std::filesystem::path> series_costs_path;
    std::filesystem::path output_dir = "results";

    PipelineSpec pipeline;  // everything except data-dependent defaults

    // Checks invariants and that all referenced input files exist.
    void validate() const;
};

RunConfig read_run_config(const std::filesystem::path& path);

// "2-10" or "2,3,5".
std::vector<std::size_t> parse_k_set(std::string_view text);

// Loads the dataset described by the config.
Dataset load_dataset(const RunConfig& config);

// Pipeline spec with the config's file-backed pieces (schema weights, cost matrix,
// pre-fitted parameters) resolved.
PipelineSpec resolve_pipeline(const RunConfig& config);

// Provenance echo stored in result documents.
Json config_to_json(const RunConfig& config, const PipelineSpec& spec);

}  // namespace nullboot
