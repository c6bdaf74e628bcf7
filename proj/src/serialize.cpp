#include "nullboot/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "nullboot/errors.hpp"

namespace nullboot {

Json encode_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double decode_double(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ValidationError("expected a number, got " + j.dump());
}

namespace {

Json doubles(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(encode_double(x));
    return a;
}

std::vector<double> read_doubles(const Json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(decode_double(x));
    return v;
}

Json matrix(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(encode_double(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd read_matrix(const Json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols)
            throw ValidationError("ragged matrix in JSON document");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = decode_double(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
}

Json vector_json(const Eigen::VectorXd& v) { return doubles({v.data(), static_cast<std::size_t>(v.size())}); }

Json spec_to_json(const VariableSpec& s) {
    Json j;
    j["name"] = s.name;
    j["kind"] = std::string(to_string(s.kind));
    j["levels"] = s.levels;
    j["weight"] = encode_double(s.weight);
    return j;
}

VariableSpec spec_from_json(const Json& j) {
    VariableSpec s;
    s.name = j.at("name").get<std::string>();
    s.kind = parse_var_kind(j.at("kind").get<std::string>());
    s.levels = j.at("levels").get<std::vector<std::string>>();
    s.weight = decode_double(j.at("weight"));
    s.validate();
    return s;
}

Json latent_to_json(const LatentGaussianParams& p) {
    Json j;
    j["cont_bins"] = p.cont_bins;
    j["projection_shift"] = encode_double(p.projection_shift);
    j["variables"] = Json::array();
    for (const auto& s : p.specs) j["variables"].push_back(spec_to_json(s));
    j["sigma"] = matrix(p.sigma);
    j["marginals"] = Json::array();
    for (const auto& m : p.marginals) {
        Json mj;
        mj["category_levels"] = m.category_levels;
        mj["thresholds"] = doubles(m.thresholds);
        mj["ordering"] = m.ordering;
        mj["floor_value"] = encode_double(m.floor_value);
        mj["floor_probability"] = encode_double(m.floor_probability);
        if (m.density) {
            Json dj;
            dj["bandwidth"] = encode_double(m.density->bandwidth());
            dj["initial_bandwidth"] = encode_double(m.density->initial_bandwidth());
            dj["enlargement_steps"] = m.density->enlargement_steps();
            dj["grid"] = doubles(m.density->grid());
            dj["density"] = doubles(m.density->grid_density());
            mj["density"] = std::move(dj);
        } else {
            mj["density"] = nullptr;
        }
        j["marginals"].push_back(std::move(mj));
    }
    return j;
}

LatentGaussianParams latent_from_json(const Json& j) {
    LatentGaussianParams p;
    p.cont_bins = j.at("cont_bins").get<std::size_t>();
    p.projection_shift = decode_double(j.at("projection_shift"));
    for (const auto& s : j.at("variables")) p.specs.push_back(spec_from_json(s));
    p.sigma = read_matrix(j.at("sigma"));
    const auto pdim = static_cast<Eigen::Index>(p.specs.size());
    if (p.sigma.rows() != pdim || p.sigma.cols() != pdim) throw ValidationError("sigma must be p x p");
    for (const auto& mj : j.at("marginals")) {
        LatentMarginal m;
        m.category_levels = mj.at("category_levels").get<std::vector<int>>();
        m.thresholds = read_doubles(mj.at("thresholds"));
        m.ordering = mj.at("ordering").get<std::vector<int>>();
        m.floor_value = decode_double(mj.at("floor_value"));
        m.floor_probability = decode_double(mj.at("floor_probability"));
        const auto& dj = mj.at("density");
        if (!dj.is_null())
            m.density = UnimodalDensity::from_grid(read_doubles(dj.at("grid")), read_doubles(dj.at("density")),
                                                   decode_double(dj.at("bandwidth")),
                                                   decode_double(dj.at("initial_bandwidth")),
                                                   dj.at("enlargement_steps").get<std::size_t>());
        p.marginals.push_back(std::move(m));
    }
    if (p.marginals.size() != p.specs.size()) throw ValidationError("one marginal per variable required");
    for (std::size_t v = 0; v < p.specs.size(); ++v)
        if (p.specs[v].is_categorical() == p.marginals[v].density.has_value())
            throw ValidationError("marginal of '" + p.specs[v].name + "' does not match its kind");
    return p;
}

std::string pattern_string(const std::vector<std::uint8_t>& pattern) {
    std::string s;
    for (auto b : pattern) s.push_back(b ? '1' : '0');
    return s;
}

Json markov_to_json(const MarkovDosageParams& p) {
    Json j;
    j["h"] = p.h;
    j["T"] = p.T;
    j["prescription_period"] = p.prescription_period;
    j["initial"] = doubles(p.initial);
    j["p2"] = matrix(p.p2);
    j["p3"] = matrix(p.p3);
    j["plater"] = matrix(p.plater);
    j["pnormal"] = matrix(p.pnormal);
    j["missingness"] = Json::array();
    for (const auto& pat : p.missingness) j["missingness"].push_back(pattern_string(pat));
    return j;
}

MarkovDosageParams markov_from_json(const Json& j) {
    MarkovDosageParams p;
    p.h = j.at("h").get<int>();
    p.T = j.at("T").get<std::size_t>();
    p.prescription_period = j.at("prescription_period").get<int>();
    p.initial = read_doubles(j.at("initial"));
    p.p2 = read_matrix(j.at("p2"));
    p.p3 = read_matrix(j.at("p3"));
    p.plater = read_matrix(j.at("plater"));
    p.pnormal = read_matrix(j.at("pnormal"));
    for (const auto& s : j.at("missingness")) {
        std::vector<std::uint8_t> pat;
        for (char c : s.get<std::string>()) {
            if (c != '0' && c != '1') throw ValidationError("missingness patterns are strings of 0 and 1");
            pat.push_back(c == '1');
        }
        p.missingness.push_back(std::move(pat));
    }
    p.validate();
    return p;
}

Json spatial_to_json(const SpatialRangeParams& p) {
    Json j;
    j["p_d"] = encode_double(p.p_d);
    j["species_sizes"] = p.species_sizes;
    j["attractivity"] = doubles(p.attractivity);
    j["region_names"] = p.region_names;
    j["neighbors"] = p.neighbors;
    return j;
}

SpatialRangeParams spatial_from_json(const Json& j) {
    SpatialRangeParams p;
    p.p_d = decode_double(j.at("p_d"));
    p.species_sizes = j.at("species_sizes").get<std::vector<std::size_t>>();
    p.attractivity = read_doubles(j.at("attractivity"));
    p.region_names = j.at("region_names").get<std::vector<std::string>>();
    p.neighbors = j.at("neighbors").get<Adjacency>();
    p.validate();
    return p;
}

void check_version(const Json& doc) {
    if (!doc.is_object() || !doc.contains("schema_version"))
        throw ValidationError("not a nullboot document: schema_version missing");
    const int v = doc.at("schema_version").get<int>();
    if (v != kSchemaVersion)
        throw ValidationError("schema version mismatch: file has " + std::to_string(v) + ", expected " +
                              std::to_string(kSchemaVersion));
}

// Converts library exceptions from malformed documents into validation errors.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed JSON document: ") + e.what());
    }
}

}  // namespace

Json params_to_json(const NullModelParams& params) {
    switch (family_of(params)) {
        case NullFamily::latent_gaussian: return latent_to_json(std::get<LatentGaussianParams>(params));
        case NullFamily::markov: return markov_to_json(std::get<MarkovDosageParams>(params));
        case NullFamily::spatial: return spatial_to_json(std::get<SpatialRangeParams>(params));
    }
    return {};
}

NullModelParams params_from_json(const Json& j) {
    return guarded([&]() -> NullModelParams {
        switch (parse_null_family(j.at("family").get<std::string>())) {
            case NullFamily::latent_gaussian: return latent_from_json(j.at("params"));
            case NullFamily::markov: return markov_from_json(j.at("params"));
            case NullFamily::spatial: return spatial_from_json(j.at("params"));
        }
        throw ValidationError("unknown family");
    });
}

Json report_to_json(const EstimationReport& r) {
    Json j = Json::object();
    if (r.sigma_condition_number) j["sigma_condition_number"] = encode_double(*r.sigma_condition_number);
    if (r.projection_shift) j["projection_shift"] = encode_double(*r.projection_shift);
    if (r.disjunction) {
        const auto& d = *r.disjunction;
        j["q_d"] = encode_double(d.q_d);
        j["p_d"] = encode_double(d.p_d);
        j["regression_intercept"] = encode_double(d.intercept);
        j["regression_slope"] = encode_double(d.slope);
        j["grid"] = doubles(d.grid);
        j["mean_simulated_q_d"] = doubles(d.mean_q);
    }
    return j;
}

Json null_model_document(const FittedNullModel& model) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["family"] = std::string(to_string(family_of(model.params)));
    doc["params"] = params_to_json(model.params);
    doc["report"] = report_to_json(model.report);
    return doc;
}

FittedNullModel read_null_model_document(const Json& doc) {
    check_version(doc);
    FittedNullModel model{params_from_json(doc), {}};
    model.report.family = family_of(model.params);
    if (const auto it = doc.find("report"); it != doc.end()) guarded([&] {
        const Json& j = *it;
        if (j.contains("sigma_condition_number")) model.report.sigma_condition_number = decode_double(j["sigma_condition_number"]);
        if (j.contains("projection_shift")) model.report.projection_shift = decode_double(j["projection_shift"]);
        if (j.contains("q_d")) {
            DisjunctionEstimate d;
            d.q_d = decode_double(j.at("q_d"));
            d.p_d = decode_double(j.at("p_d"));
            d.intercept = decode_double(j.at("regression_intercept"));
            d.slope = decode_double(j.at("regression_slope"));
            d.grid = read_doubles(j.at("grid"));
            d.mean_q = read_doubles(j.at("mean_simulated_q_d"));
            model.report.disjunction = std::move(d);
        }
    });
    return model;
}

Json gmm_fit_to_json(const GmmFit& fit) {
    Json j;
    j["k"] = fit.k;
    j["q"] = fit.q;
    j["with_noise"] = fit.with_noise;
    j["weights"] = doubles(fit.weights);
    j["means"] = Json::array();
    for (const auto& m : fit.means) j["means"].push_back(vector_json(m));
    j["covariances"] = Json::array();
    for (const auto& c : fit.covariances) j["covariances"].push_back(matrix(c));
    j["noise_density"] = encode_double(fit.noise_density);
    j["loglik"] = encode_double(fit.loglik);
    j["n_params"] = fit.n_params;
    j["regularized"] = fit.regularized;
    j["converged"] = fit.converged;
    j["restart"] = fit.restart;
    j["iterations"] = fit.loglik_trace.size();
    return j;
}

Json pipeline_to_json(const PipelineSpec& spec) {
    Json j;
    j["family"] = std::string(to_string(spec.family));
    j["method"] = std::string(to_string(spec.method));
    j["index"] = std::string(to_string(spec.index));
    j["K"] = spec.K;
    j["m"] = spec.m;
    j["seed"] = spec.seed;
    j["ps_b"] = spec.ps_b;
    if (spec.mixed_distance) {
        j["distance_weights"] = doubles(spec.mixed_distance->weights);
        Json dw = Json::array();
        for (const auto& w : spec.mixed_distance->dummy_weights) dw.push_back(doubles(w));
        j["dummy_weights"] = std::move(dw);
    }
    if (spec.series_costs) j["series_costs"] = matrix(*spec.series_costs);
    j["mds_dim"] = spec.mds_dim;
    Json g;
    g["with_noise"] = spec.gmm.with_noise;
    g["restarts"] = spec.gmm.restarts;
    g["max_iter"] = spec.gmm.max_iter;
    g["tol"] = encode_double(spec.gmm.tol);
    g["floor_factor"] = encode_double(spec.gmm.floor_factor);
    g["noise_init_fraction"] = encode_double(spec.gmm.noise_init_fraction);
    j["gmm"] = std::move(g);
    j["bic_adjustment"] = std::string(to_string(spec.bic_adjustment));
    j["cont_bins"] = spec.estimation.cont_bins;
    j["disjunction_grid"] =
        doubles(spec.estimation.disjunction_grid.empty() ? default_disjunction_grid() : spec.estimation.disjunction_grid);
    j["disjunction_reps"] = spec.estimation.disjunction_reps;
    j["prefitted_params"] = spec.params.has_value();
    return j;
}

Json result_document(const BootstrapResult& r, const Json& config) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config;
    Json j;
    j["K"] = r.K;
    j["m"] = r.replicates.rows();
    j["observed"] = doubles(r.observed);
    j["replicates"] = matrix(r.replicates);
    j["per_k_p"] = doubles(r.per_k_p);
    j["aggregate_p"] = encode_double(r.aggregate_p);
    j["aggregate_p_mean_raw"] = encode_double(r.aggregate_p_mean_raw);
    j["aggregate_p_bonferroni"] = encode_double(r.aggregate_p_bonferroni);
    j["ev"] = doubles(r.ev);
    j["sv"] = doubles(r.sv);
    j["calibrated"] = doubles(r.calibrated);
    j["k_hat"] = r.k_hat;
    j["observed_seed"] = r.observed_seed;
    j["replicate_seeds"] = r.replicate_seeds;
    j["attempts"] = r.attempts;
    doc["result"] = std::move(j);
    return doc;
}

ResultDocument read_result_document(const Json& doc) {
    check_version(doc);
    return guarded([&] {
        ResultDocument out;
        out.config = doc.at("config");
        const auto& j = doc.at("result");
        auto& r = out.result;
        r.K = j.at("K").get<std::vector<std::size_t>>();
        r.observed = read_doubles(j.at("observed"));
        r.replicates = read_matrix(j.at("replicates"), static_cast<Eigen::Index>(r.K.size()));
        if (r.replicates.rows() != j.at("m").get<Eigen::Index>() ||
            r.replicates.cols() != static_cast<Eigen::Index>(r.K.size()) || r.observed.size() != r.K.size())
            throw ValidationError("result document: inconsistent shapes");
        r.per_k_p = read_doubles(j.at("per_k_p"));
        r.aggregate_p = decode_double(j.at("aggregate_p"));
        r.aggregate_p_mean_raw = decode_double(j.at("aggregate_p_mean_raw"));
        r.aggregate_p_bonferroni = decode_double(j.at("aggregate_p_bonferroni"));
        r.ev = read_doubles(j.at("ev"));
        r.sv = read_doubles(j.at("sv"));
        r.calibrated = read_doubles(j.at("calibrated"));
        r.k_hat = j.at("k_hat").get<std::size_t>();
        r.observed_seed = j.at("observed_seed").get<std::uint64_t>();
        r.replicate_seeds = j.at("replicate_seeds").get<std::vector<std::uint64_t>>();
        r.attempts = j.at("attempts").get<std::vector<std::size_t>>();
        return out;
    });
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace nullboot
