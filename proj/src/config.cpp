#include "nullboot/config.hpp"

#include <charconv>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nullboot/errors.hpp"

namespace nullboot {

std::string_view to_string(DataFormat format) {
    switch (format) {
        case DataFormat::mixed: return "mixed";
        case DataFormat::series: return "series";
        case DataFormat::presence_absence: return "presence-absence";
    }
    return "mixed";
}

DataFormat parse_data_format(std::string_view text) {
    if (text == "mixed") return DataFormat::mixed;
    if (text == "series") return DataFormat::series;
    if (text == "presence-absence") return DataFormat::presence_absence;
    throw ValidationError("unknown data format '" + std::string(text) + "'");
}

namespace {

std::string trimmed(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& raw, const std::string& key) {
    const std::string s = trimmed(raw);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("config: bad value for " + key + ": '" + raw + "'");
    return value;
}

// Negative numbers are rejected before unsigned parsing.
std::size_t parse_count(const std::string& raw, const std::string& key) {
    const std::string s = trimmed(raw);
    if (!s.empty() && s[0] == '-') throw ValidationError("config: " + key + " must be positive");
    return parse_number<std::size_t>(s, key);
}

bool parse_bool(const std::string& raw, const std::string& key) {
    const std::string s = trimmed(raw);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ValidationError("config: bad boolean for " + key + ": '" + raw + "'");
}

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        out.push_back(parse_number<double>(text.substr(start, end - start), key));
        start = end + 1;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> parse_k_set(std::string_view text) {
    const std::string s = trimmed(text);
    std::vector<std::size_t> ks;
    if (s.empty()) throw ValidationError("config: K must not be empty");
    if (const auto dash = s.find('-'); dash != std::string::npos && dash > 0) {
        const auto lo = parse_count(s.substr(0, dash), "K");
        const auto hi = parse_count(s.substr(dash + 1), "K");
        if (hi < lo) throw ValidationError("config: K range '" + s + "' is empty");
        for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
        return ks;
    }
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(',', start), s.size());
        ks.push_back(parse_count(s.substr(start, end - start), "K"));
        start = end + 1;
    }
    return ks;
}

RunConfig read_run_config(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    if (!std::filesystem::exists(path)) throw ValidationError("config file not found: " + path.string());
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("config: " + std::string(e.what()));
    }
    const std::filesystem::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(trimmed(p));
        return fp.is_absolute() ? fp : base / fp;
    };
    auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };

    RunConfig c;
    c.source = path;
    const auto format = get("data.format");
    if (!format) throw ValidationError("config: data.format is required");
    c.format = parse_data_format(trimmed(*format));
    const auto data = get("data.path");
    if (!data) throw ValidationError("config: data.path is required");
    c.data_path = resolve(*data);
    if (auto v = get("data.schema")) c.schema_path = resolve(*v);
    if (auto v = get("data.neighbors")) c.neighbors_path = resolve(*v);
    if (auto v = get("data.T")) c.series_T = parse_count(*v, "data.T");
    if (auto v = get("data.h")) c.series_h = parse_number<int>(*v, "data.h");
    if (auto v = get("data.prescription_period"))
        c.prescription_period = parse_number<int>(*v, "data.prescription_period");

    PipelineSpec& p = c.pipeline;
    const auto family = get("null.family");
    if (!family) throw ValidationError("config: null.family is required");
    p.family = parse_null_family(trimmed(*family));
    if (auto v = get("null.params")) c.params_path = resolve(*v);
    if (auto v = get("null.cont_bins")) p.estimation.cont_bins = parse_count(*v, "null.cont_bins");
    if (auto v = get("null.disjunction_grid")) p.estimation.disjunction_grid = parse_doubles(*v, "null.disjunction_grid");
    if (auto v = get("null.disjunction_reps")) p.estimation.disjunction_reps = parse_count(*v, "null.disjunction_reps");

    if (auto v = get("pipeline.method")) p.method = parse_method(trimmed(*v));
    if (auto v = get("pipeline.index")) p.index = parse_index(trimmed(*v));
    const auto ks = get("pipeline.K");
    if (!ks) throw ValidationError("config: pipeline.K is required");
    p.K = parse_k_set(*ks);
    if (auto v = get("pipeline.m")) p.m = parse_count(*v, "pipeline.m");
    if (auto v = get("pipeline.seed")) p.seed = parse_number<std::uint64_t>(trimmed(*v), "pipeline.seed");
    if (auto v = get("pipeline.b")) p.ps_b = parse_count(*v, "pipeline.b");
    if (auto v = get("pipeline.mds_dim")) p.mds_dim = parse_count(*v, "pipeline.mds_dim");
    if (auto v = get("pipeline.bic_adjustment")) p.bic_adjustment = parse_bic_adjustment(trimmed(*v));
    if (auto v = get("pipeline.gmm_noise")) p.gmm.with_noise = parse_bool(*v, "pipeline.gmm_noise");
    if (auto v = get("pipeline.gmm_restarts")) p.gmm.restarts = parse_count(*v, "pipeline.gmm_restarts");
    if (auto v = get("pipeline.gmm_max_iter")) p.gmm.max_iter = parse_count(*v, "pipeline.gmm_max_iter");
    if (auto v = get("pipeline.gmm_tol")) p.gmm.tol = parse_number<double>(*v, "pipeline.gmm_tol");

    if (auto v = get("distance.series_costs")) c.series_costs_path = resolve(*v);
    if (auto v = get("output.dir")) c.output_dir = resolve(*v);
    else c.output_dir = base / "results";
    c.validate();
    return c;
}

void RunConfig::validate() const {
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (p.empty()) throw ValidationError(std::string("config: ") + what + " is required");
        if (!std::filesystem::exists(p)) throw ValidationError(std::string("config: ") + what + " not found: " + p.string());
    };
    must_exist(data_path, "data.path");
    switch (format) {
        case DataFormat::mixed: must_exist(schema_path, "data.schema"); break;
        case DataFormat::series:
            if (series_h < 1) throw ValidationError("config: data.h >= 1 required for series data");
            if (prescription_period < 1) throw ValidationError("config: data.prescription_period >= 1 required");
            break;
        case DataFormat::presence_absence: must_exist(neighbors_path, "data.neighbors"); break;
    }
    if (params_path) must_exist(*params_path, "null.params");
    if (series_costs_path) must_exist(*series_costs_path, "distance.series_costs");
    if (pipeline.ps_b < 1) throw ValidationError("config: b must be positive");
    pipeline.validate();
}

Dataset load_dataset(const RunConfig& c) {
    switch (c.format) {
        case DataFormat::mixed: return read_mixed_csv(c.data_path, read_schema(c.schema_path).variables);
        case DataFormat::series: return read_series_csv(c.data_path, c.series_T, c.series_h, c.prescription_period);
        case DataFormat::presence_absence: return read_presence_absence(c.data_path, c.neighbors_path);
    }
    throw ValidationError("unknown data format");
}

PipelineSpec resolve_pipeline(const RunConfig& c) {
    PipelineSpec spec = c.pipeline;
    if (c.format == DataFormat::mixed) spec.mixed_distance = read_schema(c.schema_path).distance;
    if (c.series_costs_path) spec.series_costs = read_numeric_matrix_csv(*c.series_costs_path);
    if (c.params_path) spec.params = read_null_model_document(read_json_file(*c.params_path)).params;
    return spec;
}

Json config_to_json(const RunConfig& c, const PipelineSpec& spec) {
    Json j = pipeline_to_json(spec);
    Json data;
    data["format"] = std::string(to_string(c.format));
    data["path"] = c.data_path.filename().string();
    if (!c.schema_path.empty()) data["schema"] = c.schema_path.filename().string();
    if (!c.neighbors_path.empty()) data["neighbors"] = c.neighbors_path.filename().string();
    if (c.format == DataFormat::series) {
        data["T"] = c.series_T;
        data["h"] = c.series_h;
        data["prescription_period"] = c.prescription_period;
    }
    j["data"] = std::move(data);
    return j;
}

}  // namespace nullboot
