#include "nullboot/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nullboot/io.hpp"

namespace nullboot {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fixed(double v, int digits) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

void write_replicates_csv(const std::filesystem::path& path, const BootstrapResult& r) {
    auto out = open_out(path);
    out << "row";
    for (std::size_t k : r.K) out << ",k" << k;
    out << "\nobserved";
    for (double v : r.observed) out << ',' << format_double(v);
    out << '\n';
    for (Eigen::Index q = 0; q < r.replicates.rows(); ++q) {
        out << q + 1;
        for (Eigen::Index k = 0; k < r.replicates.cols(); ++k) out << ',' << format_double(r.replicates(q, k));
        out << '\n';
    }
    finish(out, path);
}

std::string validity_svg(const BootstrapResult& r, const std::string& index_label) {
    constexpr double width = 720, height = 480, left = 70, right = 20, top = 40, bottom = 60;
    const double kmin = static_cast<double>(r.K.front());
    const double kmax = static_cast<double>(r.K.back());
    double lo = *std::min_element(r.observed.begin(), r.observed.end());
    double hi = *std::max_element(r.observed.begin(), r.observed.end());
    if (r.replicates.size() > 0) {
        lo = std::min(lo, r.replicates.minCoeff());
        hi = std::max(hi, r.replicates.maxCoeff());
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto x = [&](double k) {
        return kmax == kmin ? left + (width - left - right) / 2
                            : left + (k - kmin) / (kmax - kmin) * (width - left - right);
    };
    auto y = [&](double v) { return top + (hi - v) / (hi - lo) * (height - top - bottom); };
    auto polyline = [&](auto value, const char* cls, const char* style) {
        std::ostringstream s;
        s << "<polyline class=\"" << cls << "\" fill=\"none\" " << style << " points=\"";
        for (std::size_t i = 0; i < r.K.size(); ++i)
            s << (i ? " " : "") << fixed(x(static_cast<double>(r.K[i])), 2) << ',' << fixed(y(value(i)), 2);
        s << "\"/>\n";
        return s.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">Bootstrap validity plot</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (std::size_t k : r.K) {
        const double xk = x(static_cast<double>(k));
        svg << "<g class=\"xtick\"><line x1=\"" << fixed(xk, 2) << "\" y1=\"" << height - bottom << "\" x2=\""
            << fixed(xk, 2) << "\" y2=\"" << height - bottom + 5 << "\" stroke=\"black\"/><text x=\"" << fixed(xk, 2)
            << "\" y=\"" << height - bottom + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"12\">" << k << "</text></g>\n";
    }
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y(v) + 4, 2)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(v, 3) << "</text>\n";
    }
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">number of clusters k</text>\n";
    svg << "<text transform=\"translate(18," << (top + height - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << index_label
        << "</text>\n";
    for (Eigen::Index q = 0; q < r.replicates.rows(); ++q)
        svg << polyline([&](std::size_t i) { return r.replicates(q, static_cast<Eigen::Index>(i)); }, "replicate",
                        "stroke=\"#b0b0b0\" stroke-width=\"1\"");
    svg << polyline([&](std::size_t i) { return r.observed[i]; }, "observed",
                    "stroke=\"#c0392b\" stroke-width=\"2.5\"");
    svg << "</svg>\n";
    return svg.str();
}

void write_validity_svg(const std::filesystem::path& path, const BootstrapResult& r, const std::string& index_label) {
    auto out = open_out(path);
    out << validity_svg(r, index_label);
    finish(out, path);
}

std::string summary_table(const BootstrapResult& r) {
    std::ostringstream s;
    char line[160];
    std::snprintf(line, sizeof line, "%4s %12s %12s %12s %12s %10s\n", "k", "V(X)", "EV", "SV", "calibrated", "p_k");
    s << line;
    for (std::size_t i = 0; i < r.K.size(); ++i) {
        std::snprintf(line, sizeof line, "%4zu %12s %12s %12s %12s %10s\n", r.K[i], fixed(r.observed[i], 6).c_str(),
                      fixed(r.ev[i], 6).c_str(), fixed(r.sv[i], 6).c_str(), fixed(r.calibrated[i], 4).c_str(),
                      fixed(r.per_k_p[i], 4).c_str());
        s << line;
    }
    s << "m = " << r.replicates.rows() << '\n';
    s << "aggregate p (mean-rank)  = " << fixed(r.aggregate_p, 4) << '\n';
    s << "aggregate p (mean-raw)   = " << fixed(r.aggregate_p_mean_raw, 4) << '\n';
    s << "aggregate p (bonferroni) = " << fixed(r.aggregate_p_bonferroni, 4) << '\n';
    s << "k_hat = " << r.k_hat << '\n';
    return s.str();
}

ExportPaths export_result(const BootstrapResult& result, const Json& config, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    ExportPaths paths{dir / "result.json", dir / "replicates.csv", dir / "validity.svg"};
    write_json_file(paths.json, result_document(result, config));
    write_replicates_csv(paths.csv, result);
    const std::string label = config.contains("index") ? config["index"].get<std::string>() : "V";
    write_validity_svg(paths.svg, result, label);
    return paths;
}

}  // namespace nullboot
