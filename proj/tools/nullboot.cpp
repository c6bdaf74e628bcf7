#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nullboot/bootstrap.hpp"
#include "nullboot/config.hpp"
#include "nullboot/errors.hpp"
#include "nullboot/export.hpp"
#include "nullboot/io.hpp"
#include "nullboot/serialize.hpp"

namespace fs = std::filesystem;
using namespace nullboot;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
};

RunConfig load_config(const fs::path& path, const Overrides& o) {
    RunConfig c = read_run_config(path);
    if (o.seed) c.pipeline.seed = *o.seed;
    c.pipeline.workers = o.workers;
    return c;
}

void print_report(const Json& report) {
    for (const auto& [key, value] : report.items()) std::cout << key << " = " << value.dump() << '\n';
}

int cmd_estimate_null(const fs::path& config_path, std::optional<fs::path> out, const Overrides& o) {
    const RunConfig c = load_config(config_path, o);
    const Dataset data = load_dataset(c);
    EstimationOptions opts = c.pipeline.estimation;
    opts.seed = derive_seed(c.pipeline.seed, 0);
    opts.workers = c.pipeline.workers;
    const FittedNullModel model = estimate_null(data, c.pipeline.family, opts);
    const fs::path path = out ? *out : c.output_dir / "params.json";
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_json_file(path, null_model_document(model));
    std::cout << "family = " << to_string(c.pipeline.family) << '\n';
    print_report(report_to_json(model.report));
    std::cout << "params written to " << path.string() << '\n';
    return 0;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
    return out.parent_path() / (out.stem().string() + suffix);
}

int cmd_sample(const fs::path& params_path, std::size_t n, std::uint64_t seed, const fs::path& out,
               std::optional<fs::path> aux_out) {
    const FittedNullModel model = read_null_model_document(read_json_file(params_path));
    const Dataset data = sample_null(model.params, n, seed);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    if (const auto* mixed = std::get_if<MixedDataset>(&data)) {
        write_mixed_csv(out, *mixed);
        const fs::path schema_path = aux_out ? *aux_out : sibling(out, ".schema.ini");
        write_schema(schema_path, Schema{mixed->specs(), MixedDistanceConfig::defaults(mixed->specs())});
        std::cout << "wrote " << out.string() << " and " << schema_path.string() << '\n';
    } else if (const auto* series = std::get_if<CategoricalSeriesDataset>(&data)) {
        write_series_csv(out, *series);
        std::cout << "wrote " << out.string() << '\n';
    } else {
        const fs::path nb = aux_out ? *aux_out : sibling(out, ".neighbors.csv");
        write_presence_absence(out, nb, std::get<PresenceAbsenceData>(data));
        std::cout << "wrote " << out.string() << " and " << nb.string() << '\n';
    }
    return 0;
}

int cmd_run(const fs::path& config_path, std::optional<fs::path> out, const Overrides& o) {
    RunConfig c = load_config(config_path, o);
    if (out) c.output_dir = *out;
    const Dataset data = load_dataset(c);
    PipelineSpec spec = resolve_pipeline(c);
    const std::size_t batch = std::max<std::size_t>(1, spec.m / 20);
    spec.progress = [batch](std::size_t done, std::size_t total) {
        if (done % batch == 0 || done == total) std::cerr << "replicates " << done << '/' << total << '\n';
    };
    EstimationReport report;
    const BootstrapResult result = run_bootstrap(data, spec, &report);
    const ExportPaths paths = export_result(result, config_to_json(c, spec), c.output_dir);
    const Json rep = report_to_json(report);
    if (!rep.empty()) {
        std::cout << "null model estimation:\n";
        print_report(rep);
    }
    std::cout << summary_table(result);
    std::cout << "results: " << paths.json.string() << ", " << paths.csv.string() << ", " << paths.svg.string()
              << '\n';
    return 0;
}

int cmd_report(const fs::path& result_path, std::optional<fs::path> out) {
    if (!fs::exists(result_path)) throw ValidationError("result file not found: " + result_path.string());
    const ResultDocument doc = read_result_document(read_json_file(result_path));
    const fs::path svg = out ? *out : result_path.parent_path() / "validity.svg";
    const std::string label = doc.config.contains("index") ? doc.config["index"].get<std::string>() : "V";
    write_validity_svg(svg, doc.result, label);
    std::cout << summary_table(doc.result);
    std::cout << "plot: " << svg.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric bootstrap validation of the number of clusters against fitted null models"};
    app.require_subcommand(1);

    Overrides overrides;
    std::uint64_t seed_value = 0;
    fs::path config_path, params_path, result_path;
    std::optional<fs::path> out, aux_out;
    std::size_t n = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", overrides.seed, "Master seed (overrides the config)");
        cmd->add_option("--workers", overrides.workers, "Worker threads; results do not depend on it")
            ->check(CLI::PositiveNumber);
    };

    auto* estimate = app.add_subcommand("estimate-null", "Fit the configured null model and write its parameters");
    add_common(estimate);
    estimate->add_option("--out", out, "Parameter file (default <output dir>/params.json)");

    auto* sample = app.add_subcommand("sample", "Draw one synthetic dataset from fitted parameters");
    sample->add_option("--params", params_path, "Parameter file from estimate-null")->required()->check(CLI::ExistingFile);
    sample->add_option("--n", n, "Number of objects (rows, series or species)")->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed_value, "Seed")->required();
    sample->add_option("--out", out, "Dataset file")->required();
    sample->add_option("--aux-out", aux_out, "Schema (mixed) or neighbor (presence-absence) file");

    auto* run = app.add_subcommand("run", "Run the bootstrap test and write result files");
    add_common(run);
    run->add_option("--out", out, "Output directory (overrides the config)");

    auto* report = app.add_subcommand("report", "Regenerate plot and summary from a result file");
    report->add_option("--result", result_path, "result.json")->required();
    report->add_option("--out", out, "SVG path (default next to the result file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*estimate) return cmd_estimate_null(config_path, out, overrides);
        if (*sample) return cmd_sample(params_path, n, seed_value, *out, aux_out);
        if (*run) return cmd_run(config_path, out, overrides);
        if (*report) return cmd_report(result_path, out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
