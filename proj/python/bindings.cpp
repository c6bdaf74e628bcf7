#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nullboot/bootstrap.hpp"
#include "nullboot/clustering.hpp"
#include "nullboot/config.hpp"
#include "nullboot/dissimilarity.hpp"
#include "nullboot/errors.hpp"
#include "nullboot/export.hpp"
#include "nullboot/latent_gaussian.hpp"
#include "nullboot/serialize.hpp"
#include "nullboot/validation.hpp"

namespace py = pybind11;
using namespace nullboot;

namespace {

DissimilarityMatrix to_dissimilarity(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("dissimilarity matrix must be square");
    std::vector<double> values(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) values[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return DissimilarityMatrix(static_cast<std::size_t>(m.rows()), std::move(values));
}

Eigen::MatrixXd to_eigen(const DissimilarityMatrix& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return m;
}

Partition to_partition(const std::vector<int>& labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return Partition(labels, static_cast<std::size_t>(k));
}

PresenceAbsenceData to_presence(const Eigen::MatrixXd& presence, const Adjacency& neighbors) {
    const auto s = static_cast<std::size_t>(presence.rows()), r = static_cast<std::size_t>(presence.cols());
    std::vector<std::string> species, regions;
    for (std::size_t i = 0; i < s; ++i) species.push_back("s" + std::to_string(i + 1));
    for (std::size_t j = 0; j < r; ++j) regions.push_back("r" + std::to_string(j + 1));
    std::vector<std::uint8_t> cells;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < r; ++j)
            cells.push_back(presence(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0 ? 1 : 0);
    return PresenceAbsenceData(species, regions, cells, normalize_adjacency(neighbors, r));
}

std::string run_config(const std::string& path, std::size_t workers, std::optional<std::uint64_t> seed,
                       std::optional<std::size_t> m, bool write_outputs) {
    RunConfig c = read_run_config(path);
    if (seed) c.pipeline.seed = *seed;
    if (m) c.pipeline.m = *m;
    c.pipeline.workers = workers;
    c.validate();
    const Dataset data = load_dataset(c);
    PipelineSpec spec = resolve_pipeline(c);
    EstimationReport report;
    BootstrapResult result;
    {
        py::gil_scoped_release release;
        result = run_bootstrap(data, spec, &report);
    }
    const Json config = config_to_json(c, spec);
    if (write_outputs) export_result(result, config, c.output_dir);
    return result_document(result, config).dump();
}

std::string estimate_config(const std::string& path, std::size_t workers) {
    const RunConfig c = read_run_config(path);
    c.validate();
    const Dataset data = load_dataset(c);
    EstimationOptions opts = c.pipeline.estimation;
    opts.seed = c.pipeline.seed;
    opts.workers = workers;
    py::gil_scoped_release release;
    return null_model_document(estimate_null(data, c.pipeline.family, opts)).dump();
}

std::string bootstrap_points(const Eigen::MatrixXd& points, const std::vector<std::size_t>& K, std::size_t m,
                             std::uint64_t seed, const std::string& method, const std::string& index,
                             std::size_t workers) {
    std::vector<VariableSpec> specs;
    for (Eigen::Index j = 0; j < points.cols(); ++j) specs.push_back({"x" + std::to_string(j + 1), VarKind::continuous, {}, 1.0});
    std::vector<double> values;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = 0; j < points.cols(); ++j) values.push_back(points(i, j));
    const Dataset data = MixedDataset(specs, static_cast<std::size_t>(points.rows()), std::move(values));
    PipelineSpec spec;
    spec.family = NullFamily::latent_gaussian;
    spec.method = parse_method(method);
    spec.index = parse_index(index);
    spec.K = K;
    spec.m = m;
    spec.seed = seed;
    spec.workers = workers;
    spec.validate();
    BootstrapResult result;
    {
        py::gil_scoped_release release;
        result = run_bootstrap(data, spec);
    }
    return result_document(result, pipeline_to_json(spec)).dump();
}

py::dict gmm_dict(const GmmFit& fit, std::size_t n) {
    py::dict out;
    out["k"] = fit.k;
    out["with_noise"] = fit.with_noise;
    out["loglik"] = fit.loglik;
    out["bic"] = bic(fit, n);
    out["n_params"] = fit.n_params;
    out["weights"] = fit.weights;
    out["means"] = fit.means;
    out["covariances"] = fit.covariances;
    out["labels"] = fit.map_labels();
    out["loglik_trace"] = fit.loglik_trace;
    out["converged"] = fit.converged;
    return out;
}

}  // namespace

PYBIND11_MODULE(_nullboot, mod) {
    mod.doc() = "Parametric-bootstrap tests for clustering structure";

    py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

    mod.def("run_config_json", &run_config, py::arg("path"), py::arg("workers") = 1, py::arg("seed") = py::none(),
            py::arg("m") = py::none(), py::arg("write_outputs") = false);
    mod.def("estimate_config_json", &estimate_config, py::arg("path"), py::arg("workers") = 1);
    mod.def("bootstrap_points_json", &bootstrap_points, py::arg("points"), py::arg("K"), py::arg("m") = 99,
            py::arg("seed") = 1, py::arg("method") = "pam", py::arg("index") = "asw", py::arg("workers") = 1);

    mod.def("euclidean_distance", [](const Eigen::MatrixXd& points) { return to_eigen(euclidean_distance(points)); });
    mod.def(
        "kulczynski",
        [](const Eigen::MatrixXd& presence) {
            const Adjacency none(static_cast<std::size_t>(presence.cols()));
            return to_eigen(kulczynski_matrix(to_presence(presence, none)));
        },
        py::arg("presence"));

    mod.def(
        "pam",
        [](const Eigen::MatrixXd& d, std::size_t k) {
            const Partition p = pam(to_dissimilarity(d), k);
            return py::make_tuple(p.labels(), p.medoids());
        },
        py::arg("d"), py::arg("k"));
    mod.def(
        "linkage",
        [](const Eigen::MatrixXd& d, const std::string& method) {
            const Dendrogram tree =
                linkage_cluster(to_dissimilarity(d), method == "complete" ? Linkage::complete : Linkage::average);
            Eigen::MatrixXd z(static_cast<Eigen::Index>(tree.merges.size()), 3);
            for (std::size_t s = 0; s < tree.merges.size(); ++s)
                z.row(static_cast<Eigen::Index>(s)) << static_cast<double>(tree.merges[s].a),
                    static_cast<double>(tree.merges[s].b), tree.merges[s].height;
            return z;
        },
        py::arg("d"), py::arg("method") = "average");
    mod.def(
        "cluster",
        [](const Eigen::MatrixXd& d, std::size_t k, const std::string& method) {
            return cluster_by(to_dissimilarity(d), k, parse_cluster_method(method)).labels();
        },
        py::arg("d"), py::arg("k"), py::arg("method") = "pam");
    mod.def(
        "classical_mds",
        [](const Eigen::MatrixXd& d, std::size_t q) {
            MdsResult r = classical_mds(to_dissimilarity(d), q);
            return py::make_tuple(r.coords, r.eigenvalues);
        },
        py::arg("d"), py::arg("q"));
    mod.def(
        "gmm_noise_fit",
        [](const Eigen::MatrixXd& y, std::size_t k, bool with_noise, std::size_t restarts, std::uint64_t seed) {
            GmmOptions opt;
            opt.with_noise = with_noise;
            opt.restarts = restarts;
            opt.seed = seed;
            return gmm_dict(gmm_noise_fit(y, k, opt), static_cast<std::size_t>(y.rows()));
        },
        py::arg("y"), py::arg("k"), py::arg("with_noise") = true, py::arg("restarts") = 10, py::arg("seed") = 0);

    mod.def(
        "asw", [](const Eigen::MatrixXd& d, const std::vector<int>& labels) { return asw(to_dissimilarity(d), to_partition(labels)); },
        py::arg("d"), py::arg("labels"));
    mod.def(
        "prediction_strength",
        [](const Eigen::MatrixXd& d, std::size_t k, std::size_t b, const std::string& method, std::uint64_t seed) {
            PredictionStrengthConfig cfg;
            cfg.b = b;
            cfg.method = parse_cluster_method(method);
            cfg.seed = seed;
            return prediction_strength(to_dissimilarity(d), k, cfg);
        },
        py::arg("d"), py::arg("k"), py::arg("b") = 50, py::arg("method") = "pam", py::arg("seed") = 0);

    mod.def(
        "per_k_pvalue", [](double observed, const std::vector<double>& replicates) { return per_k_pvalue(observed, replicates); },
        py::arg("observed"), py::arg("replicates"));
    mod.def(
        "aggregate_pvalue",
        [](const std::vector<double>& observed, const Eigen::MatrixXd& replicates, const std::string& mode) {
            return aggregate_pvalue(observed, replicates, parse_aggregation(mode));
        },
        py::arg("observed"), py::arg("replicates"), py::arg("mode") = "mean-rank");
    mod.def(
        "calibrate",
        [](const std::vector<double>& observed, const Eigen::MatrixXd& replicates) {
            const Calibration c = calibrate(observed, replicates);
            py::dict out;
            out["ev"] = c.ev;
            out["sv"] = c.sv;
            out["calibrated"] = c.calibrated;
            out["best"] = c.best;
            return out;
        },
        py::arg("observed"), py::arg("replicates"));

    mod.def(
        "polychoric",
        [](const Eigen::MatrixXd& table) {
            std::vector<double> rows, cols;
            for (Eigen::Index i = 0; i < table.rows(); ++i) rows.push_back(table.row(i).sum());
            for (Eigen::Index j = 0; j < table.cols(); ++j) cols.push_back(table.col(j).sum());
            return polychoric_correlation(table, thresholds_from_counts(rows), thresholds_from_counts(cols));
        },
        py::arg("table"));
}
