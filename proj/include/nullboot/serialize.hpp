#pragma once

#include <filesystem>

#include <json.hpp>

#include "nullboot/bootstrap.hpp"
#include "nullboot/clustering.hpp"
#include "nullboot/null_model.hpp"

namespace nullboot {

using Json = nlohmann::ordered_json;

// Version of the parameter and result documents; readers reject any other value.
inline constexpr int kSchemaVersion = 1;

// Doubles are written as JSON numbers in shortest round-trip form; infinities and NaN as the
// strings "inf", "-inf" and "nan".
Json encode_double(double v);
double decode_double(const Json& j);

Json params_to_json(const NullModelParams& params);
NullModelParams params_from_json(const Json& j);

Json report_to_json(const EstimationReport& report);

// {"schema_version", "family", "params", "report"}.
Json null_model_document(const FittedNullModel& model);
FittedNullModel read_null_model_document(const Json& doc);

Json gmm_fit_to_json(const GmmFit& fit);

// Every PipelineSpec setting that can change results (worker count and callbacks excluded).
Json pipeline_to_json(const PipelineSpec& spec);

// Result document: {"schema_version", "config", "result": {...}}.
Json result_document(const BootstrapResult& result, const Json& config);

struct ResultDocument {
    BootstrapResult result;
    Json config;
};
ResultDocument read_result_document(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace nullboot
