#include "faultforge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace faultforge::corpus {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "?"; }

double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("malformed numeric cell '" + s + "'", row, col);
    return value;
}

long parse_count(const std::string& s, std::size_t row, std::size_t col) {
    long value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("malformed bug count '" + s + "'", row, col);
    if (value < 0) throw ParseError("negative bug count '" + s + "'", row, col);
    return value;
}

std::string file_stem(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return name;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

Dataset parse_csv(const std::string& text, const FeatureSchema& schema, const std::string& origin) {
    schema.validate();
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(origin + ": empty file, missing header");

    const std::vector<std::string> header = split_line(line);
    std::vector<std::string> header_lc(header.size());
    std::transform(header.begin(), header.end(), header_lc.begin(), lower);

    // Leading provenance columns are optional and recognized by name.
    std::size_t meta_cols = 0;
    int project_col = -1, version_col = -1, name_col = -1;
    while (meta_cols < header_lc.size()) {
        const std::string& h = header_lc[meta_cols];
        if (h == "project" && project_col < 0)
            project_col = static_cast<int>(meta_cols);
        else if (h == "version" && version_col < 0)
            version_col = static_cast<int>(meta_cols);
        else if ((h == "name" || h == "class" || h == "classname") && name_col < 0)
            name_col = static_cast<int>(meta_cols);
        else
            break;
        ++meta_cols;
    }

    const std::size_t expected = meta_cols + schema.size() + 1;
    if (header.size() != expected)
        throw SchemaError(origin + ": header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(expected) +
                          " (metrics + bug count)");
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (header_lc[meta_cols + j] != lower(schema.names[j]))
            throw SchemaError(origin + ": header column '" + header[meta_cols + j] +
                              "' does not match schema feature '" + schema.names[j] + "'");
    }
    const std::string& last = header_lc.back();
    if (last != "bug" && last != "bugs" && last != "defects" && last != "bug_count")
        throw SchemaError(origin + ": last column '" + header.back() + "' is not a bug count");

    Dataset d;
    d.schema = schema;
    std::vector<MetricRow> parsed;
    std::size_t file_row = 1;
    while (std::getline(in, line)) {
        ++file_row;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != expected)
            throw ParseError(origin + ": expected " + std::to_string(expected) + " cells, found " +
                                 std::to_string(cells.size()),
                             file_row, cells.size());
        MetricRow row;
        row.tag.project = project_col >= 0 ? cells[static_cast<std::size_t>(project_col)] : origin;
        row.tag.version = version_col >= 0 ? cells[static_cast<std::size_t>(version_col)] : "";
        row.tag.class_name = name_col >= 0 ? cells[static_cast<std::size_t>(name_col)] : "";
        row.metrics.resize(schema.size());
        for (std::size_t j = 0; j < schema.size(); ++j) {
            const std::string& cell = cells[meta_cols + j];
            row.metrics[j] = is_missing_token(cell) ? Matrix::missing()
                                                    : parse_cell(cell, file_row, meta_cols + j + 1);
        }
        row.bug_count = parse_count(cells.back(), file_row, expected);
        parsed.push_back(std::move(row));
    }

    d.X = Matrix(parsed.size(), schema.size());
    d.y.resize(parsed.size());
    d.tags.resize(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        std::copy(parsed[i].metrics.begin(), parsed[i].metrics.end(), d.X.row(i).begin());
        d.y[i] = parsed[i].bug_count > 0 ? 1 : 0;
        d.tags[i] = std::move(parsed[i].tag);
    }
    d.check();
    return d;
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema, file_stem(path));
}

std::string to_csv(const Dataset& d) {
    std::string out = "project,version,name";
    for (const auto& n : d.schema.names) out += "," + n;
    out += ",bug\n";
    char num[64];
    for (std::size_t i = 0; i < d.rows(); ++i) {
        out += d.tags[i].project + "," + d.tags[i].version + "," + d.tags[i].class_name;
        for (std::size_t j = 0; j < d.X.cols(); ++j) {
            const double v = d.X.at(i, j);
            if (is_missing(v)) {
                out += ",?";
            } else {
                std::snprintf(num, sizeof(num), "%.17g", v);
                out += ",";
                out += num;
            }
        }
        out += "," + std::to_string(d.y[i]) + "\n";
    }
    return out;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write dataset file: " + path);
    out << to_csv(d);
}

Dataset deduplicate(const Dataset& d) {
    // Key on the exact bit pattern of every metric plus the label, so a NaN
    // (missing) cell equals another missing cell and nothing else.
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        std::string key;
        key.resize(d.X.cols() * sizeof(double) + 1);
        std::memcpy(key.data(), d.X.row(i).data(), d.X.cols() * sizeof(double));
        key[d.X.cols() * sizeof(double)] = static_cast<char>(d.y[i]);
        if (seen.emplace(std::move(key), i).second) keep.push_back(i);
    }
    Dataset out;
    out.schema = d.schema;
    out.X = d.X.gather_rows(keep);
    out.y.reserve(keep.size());
    out.tags.reserve(keep.size());
    for (std::size_t i : keep) {
        out.y.push_back(d.y[i]);
        out.tags.push_back(d.tags[i]);
    }
    return out;
}

std::vector<ProjectSummary> summarize(const Dataset& d) {
    std::vector<ProjectSummary> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const std::string& key = d.tags[i].project;
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            out.push_back({key, 0, 0, 0.0});
        }
        ProjectSummary& s = out[it->second];
        ++s.instances;
        s.defective += static_cast<std::size_t>(d.y[i]);
    }
    for (ProjectSummary& s : out)
        s.rate = s.instances == 0
                     ? 0.0
                     : std::round(1000.0 * static_cast<double>(s.defective) /
                                  static_cast<double>(s.instances)) /
                           1000.0;
    return out;
}

Dataset pool(const std::vector<Dataset>& parts) {
    if (parts.empty()) throw Error("nothing to pool");
    Dataset out;
    out.schema = parts.front().schema;
    std::size_t total = 0;
    for (const Dataset& p : parts) {
        if (!(p.schema == out.schema)) throw SchemaError("pooled datasets must share a schema");
        total += p.rows();
    }
    out.X = Matrix(total, out.schema.size());
    out.y.reserve(total);
    out.tags.reserve(total);
    std::size_t r = 0;
    for (const Dataset& p : parts) {
        for (std::size_t i = 0; i < p.rows(); ++i, ++r)
            std::copy(p.X.row(i).begin(), p.X.row(i).end(), out.X.row(r).begin());
        out.y.insert(out.y.end(), p.y.begin(), p.y.end());
        out.tags.insert(out.tags.end(), p.tags.begin(), p.tags.end());
    }
    return out;
}

}  // namespace faultforge::corpus
