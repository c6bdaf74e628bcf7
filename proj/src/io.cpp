#include "nullboot/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nullboot/errors.hpp"
#include "nullboot/log.hpp"

namespace nullboot {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r' || s[a] == '\n')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r' || s[b - 1] == '\n')) --b;
    std::string out(s.substr(a, b - a));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool header_done = !has_header;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!header_done) {
            t.header = split(line);
            header_done = true;
            continue;
        }
        t.rows.push_back(split(line));
        t.line_numbers.push_back(lineno);
    }
    if (!header_done) throw ValidationError("'" + path.string() + "': missing header row");
    return t;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
    return "'" + path.string() + "' line " + std::to_string(line) + ": ";
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(const std::string& s, long& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split(text)) {
        double v;
        if (!parse_double(tok, v)) throw ValidationError(what + ": '" + tok + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Schema read_schema(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("schema: " + std::string(e.what()));
    }
    Schema schema;
    for (const auto& [name, section] : tree) {
        if (section.empty()) throw ValidationError("schema: entry '" + name + "' must be a [section]");
        VariableSpec spec;
        spec.name = name;
        spec.kind = parse_var_kind(section.get<std::string>("kind", "continuous"));
        if (auto levels = section.get_optional<std::string>("levels")) spec.levels = split(*levels);
        if (auto w = section.get_optional<std::string>("weight")) {
            if (!parse_double(trim(*w), spec.weight)) throw ValidationError("schema: variable '" + name + "': bad weight");
        }
        spec.validate();
        std::vector<double> dummy;
        if (spec.kind == VarKind::nominal) {
            if (auto dw = section.get_optional<std::string>("dummy_weights"))
                dummy = parse_double_list(*dw, "schema: variable '" + name + "' dummy_weights");
            else
                dummy.assign(spec.level_count(), 1.0);
        } else if (section.get_optional<std::string>("dummy_weights")) {
            throw ValidationError("schema: variable '" + name + "': dummy_weights only apply to nominal variables");
        }
        schema.distance.weights.push_back(spec.weight);
        schema.distance.dummy_weights.push_back(std::move(dummy));
        schema.variables.push_back(std::move(spec));
    }
    if (schema.variables.empty()) throw ValidationError("schema declares no variables");
    schema.distance.validate(schema.variables);
    return schema;
}

void write_schema(const std::filesystem::path& path, const Schema& schema) {
    auto out = open_out(path);
    for (std::size_t j = 0; j < schema.variables.size(); ++j) {
        const auto& v = schema.variables[j];
        out << '[' << v.name << "]\n";
        out << "kind = " << to_string(v.kind) << '\n';
        if (!v.levels.empty()) out << "levels = " << join(v.levels) << '\n';
        out << "weight = " << format_double(schema.distance.weights.at(j)) << '\n';
        if (v.kind == VarKind::nominal) {
            std::vector<std::string> parts;
            for (double u : schema.distance.dummy_weights.at(j)) parts.push_back(format_double(u));
            out << "dummy_weights = " << join(parts) << '\n';
        }
        out << '\n';
    }
}

MixedDataset read_mixed_csv(const std::filesystem::path& path, const std::vector<VariableSpec>& schema) {
    const auto t = read_csv(path, true);
    if (t.header.size() != schema.size()) throw ValidationError("'" + path.string() + "': header does not match schema");
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (t.header[j] != schema[j].name)
            throw ValidationError("'" + path.string() + "': header column '" + t.header[j] + "' does not match schema name '" +
                                  schema[j].name + "'");
    if (t.rows.size() < 2) throw ValidationError("'" + path.string() + "': n >= 2 required");
    std::vector<double> values;
    values.reserve(t.rows.size() * schema.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != schema.size())
            throw ValidationError(where(path, t.line_numbers[i]) + "row length mismatch");
        for (std::size_t j = 0; j < schema.size(); ++j) {
            const auto& cell = row[j];
            if (schema[j].is_categorical()) {
                const int g = schema[j].find_level(cell);
                if (g < 0)
                    throw ValidationError(where(path, t.line_numbers[i]) + "unknown level '" + cell + "' for variable '" +
                                          schema[j].name + "'");
                values.push_back(g);
            } else {
                double v;
                if (!parse_double(cell, v))
                    throw ValidationError(where(path, t.line_numbers[i]) + "non-numeric value '" + cell + "' for variable '" +
                                          schema[j].name + "'");
                values.push_back(v);
            }
        }
    }
    return MixedDataset(schema, t.rows.size(), std::move(values));
}

void write_mixed_csv(const std::filesystem::path& path, const MixedDataset& data) {
    auto out = open_out(path);
    std::vector<std::string> names;
    for (const auto& s : data.specs()) names.push_back(s.name);
    out << join(names) << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) {
            if (j) out << ',';
            if (data.spec(j).is_categorical())
                out << data.spec(j).levels[static_cast<std::size_t>(data.level(i, j))];
            else
                out << format_double(data.value(i, j));
        }
        out << '\n';
    }
}

CategoricalSeriesDataset read_series_csv(const std::filesystem::path& path, std::size_t T, int h,
                                         int prescription_period) {
    const auto t = read_csv(path, true);
    if (T == 0) T = t.header.size();
    if (t.header.size() != T) throw ValidationError("'" + path.string() + "': header length mismatch (expected T columns)");
    std::vector<std::vector<int>> series;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != T) throw ValidationError(where(path, t.line_numbers[i]) + "length mismatch");
        std::vector<int> s(T);
        for (std::size_t d = 0; d < T; ++d) {
            if (row[d] == "NA") {
                s[d] = kMissing;
                continue;
            }
            long c;
            if (!parse_int(row[d], c)) throw ValidationError(where(path, t.line_numbers[i]) + "non-integer category '" + row[d] + "'");
            if (c < 1 || c > h) throw ValidationError(where(path, t.line_numbers[i]) + "category out of range");
            s[d] = static_cast<int>(c - 1);
        }
        series.push_back(std::move(s));
    }
    return CategoricalSeriesDataset(T, h, prescription_period, std::move(series));
}

void write_series_csv(const std::filesystem::path& path, const CategoricalSeriesDataset& data) {
    auto out = open_out(path);
    for (std::size_t d = 0; d < data.T(); ++d) out << (d ? "," : "") << "day" << d + 1;
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t d = 0; d < data.T(); ++d) {
            if (d) out << ',';
            const int c = data.at(i, d);
            if (c == kMissing)
                out << "NA";
            else
                out << c + 1;
        }
        out << '\n';
    }
}

PresenceAbsenceData read_presence_absence(const std::filesystem::path& matrix_path,
                                          const std::filesystem::path& neighbors_path) {
    const auto t = read_csv(matrix_path, true);
    if (t.header.size() < 2) throw ValidationError("'" + matrix_path.string() + "': header needs a name column and regions");
    std::vector<std::string> regions(t.header.begin() + 1, t.header.end());
    const std::size_t R = regions.size();
    std::vector<std::string> species;
    std::vector<std::uint8_t> presence;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != R + 1) throw ValidationError(where(matrix_path, t.line_numbers[i]) + "row length mismatch");
        species.push_back(row[0]);
        std::size_t count = 0;
        for (std::size_t r = 0; r < R; ++r) {
            if (row[r + 1] == "1") {
                presence.push_back(1);
                ++count;
            } else if (row[r + 1] == "0") {
                presence.push_back(0);
            } else {
                throw ValidationError(where(matrix_path, t.line_numbers[i]) + "entries must be 0 or 1");
            }
        }
        if (count == 0) throw ValidationError(where(matrix_path, t.line_numbers[i]) + "species '" + row[0] + "' has zero presences");
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < R; ++r) index[regions[r]] = r;
    auto resolve = [&](const std::string& tok, std::size_t line) {
        if (auto it = index.find(tok); it != index.end()) return it->second;
        long v;
        if (parse_int(tok, v) && v >= 1 && static_cast<std::size_t>(v) <= R) return static_cast<std::size_t>(v - 1);
        throw ValidationError(where(neighbors_path, line) + "unknown region '" + tok + "'");
    };
    const auto nb = read_csv(neighbors_path, false);
    std::set<std::pair<std::size_t, std::size_t>> directed;
    for (std::size_t i = 0; i < nb.rows.size(); ++i) {
        const auto& row = nb.rows[i];
        if (row.size() != 2) throw ValidationError(where(neighbors_path, nb.line_numbers[i]) + "expected 'regionA,regionB'");
        // A header line naming no known region is tolerated on the first line.
        if (i == 0 && !index.count(row[0]) && !index.count(row[1])) {
            long tmp;
            if (!parse_int(row[0], tmp) || !parse_int(row[1], tmp)) continue;
        }
        const auto a = resolve(row[0], nb.line_numbers[i]);
        const auto b = resolve(row[1], nb.line_numbers[i]);
        if (a == b) throw ValidationError(where(neighbors_path, nb.line_numbers[i]) + "irreflexive adjacency required");
        directed.emplace(a, b);
    }
    bool any_reversed = false;
    for (const auto& [a, b] : directed) any_reversed |= (a < b) && directed.count({b, a});
    Adjacency adj(R);
    std::size_t one_sided = 0;
    for (const auto& [a, b] : directed) {
        adj[a].push_back(b);
        adj[b].push_back(a);
        if (any_reversed && !directed.count({b, a})) ++one_sided;
    }
    if (one_sided > 0)
        warn("'" + neighbors_path.string() + "': " + std::to_string(one_sided) +
             " neighbor declarations lack their reverse; adjacency symmetrized");
    return PresenceAbsenceData(std::move(species), std::move(regions), std::move(presence), std::move(adj));
}

void write_presence_absence(const std::filesystem::path& matrix_path, const std::filesystem::path& neighbors_path,
                            const PresenceAbsenceData& data) {
    {
        auto out = open_out(matrix_path);
        out << "species," << join(data.region_names()) << '\n';
        for (std::size_t s = 0; s < data.n_species(); ++s) {
            out << data.species_names()[s];
            for (std::size_t r = 0; r < data.n_regions(); ++r) out << ',' << (data.present(s, r) ? 1 : 0);
            out << '\n';
        }
    }
    auto out = open_out(neighbors_path);
    for (std::size_t a = 0; a < data.n_regions(); ++a)
        for (std::size_t b : data.neighbors()[a])
            if (a < b) out << data.region_names()[a] << ',' << data.region_names()[b] << '\n';
}

void write_dissimilarity_csv(const std::filesystem::path& path, const DissimilarityMatrix& d) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) out << (j ? "," : "") << format_double(d(i, j));
        out << '\n';
    }
}

Eigen::MatrixXd read_numeric_matrix_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path, false);
    if (t.rows.empty()) throw ValidationError("'" + path.string() + "': empty matrix");
    const auto cols = t.rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].size() != cols) throw ValidationError(where(path, t.line_numbers[i]) + "row length mismatch");
        for (std::size_t j = 0; j < cols; ++j) {
            double v;
            if (!parse_double(t.rows[i][j], v)) throw ValidationError(where(path, t.line_numbers[i]) + "non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return m;
}

}  // namespace nullboot
