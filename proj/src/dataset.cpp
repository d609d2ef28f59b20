#include "hullforge/dataset.hpp"

#include <fstream>
#include <sstream>

#include "hullforge/errors.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

} // namespace

LoadReport load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open for reading: " + path);

    std::string line;
    if (!std::getline(is, line)) throw EmptyFile("no header in " + path);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto& names = param_names();
    const auto header = split_csv(line);
    if (header.size() < names.size()) {
        throw HeaderMismatch("expected " + std::to_string(names.size()) + " columns, found " +
                             std::to_string(header.size()) + "; first missing column is '" +
                             names[header.size()] + "'");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (trim(header[i]) != names[i]) {
            throw HeaderMismatch("column " + std::to_string(i + 1) + " is '" + trim(header[i]) +
                                 "', expected '" + names[i] + "'");
        }
    }

    LoadReport report;
    std::vector<double> values;
    std::vector<double> row(kParamCount);
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string clean = trim(line);
        if (clean.empty()) continue;
        const auto cells = split_csv(clean);
        if (cells.size() < kParamCount) {
            throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                             std::to_string(kParamCount) + " cells, found " +
                             std::to_string(cells.size()));
        }
        ++report.total_rows;
        for (std::size_t i = 0; i < kParamCount; ++i) {
            if (!parse_double(trim(cells[i]), row[i])) {
                throw ParseError("line " + std::to_string(line_no) + ": cell '" +
                                 trim(cells[i]) + "' is not a number");
            }
        }
        try {
            const HullParameters p = validate_params(row);
            const auto v = p.values();
            values.insert(values.end(), v.begin(), v.end());
        } catch (const Error& e) {
            report.rejected.push_back({line_no, e.what()});
        }
    }

    const std::size_t n = values.size() / kParamCount;
    report.rows = Matrix(n, kParamCount);
    std::copy(values.begin(), values.end(), report.rows.data.begin());
    return report;
}

void save_dataset(const std::string& path, const Matrix& rows,
                  const std::vector<std::string>& extra_names, const Matrix& extra_cols) {
    if (rows.cols != kParamCount) {
        throw ArityError("dataset rows must have " + std::to_string(kParamCount) + " columns");
    }
    if (!extra_names.empty() &&
        (extra_cols.rows != rows.rows || extra_cols.cols != extra_names.size())) {
        throw ArityError("extra column block does not match extra names");
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    const auto& names = param_names();
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    for (const auto& name : extra_names) os << "," << name;
    os << "\n";
    for (std::size_t r = 0; r < rows.rows; ++r) {
        for (std::size_t c = 0; c < rows.cols; ++c) {
            os << (c ? "," : "") << format_double(rows(r, c));
        }
        for (std::size_t c = 0; c < extra_cols.cols; ++c) {
            os << "," << format_double(extra_cols(r, c));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& rows) {
    if (!header.empty() && rows.rows > 0 && header.size() != rows.cols) {
        throw ArityError("csv header does not match column count");
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    if (!header.empty()) os << "\n";
    for (std::size_t r = 0; r < rows.rows; ++r) {
        for (std::size_t c = 0; c < rows.cols; ++c) {
            os << (c ? "," : "") << format_double(rows(r, c));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

} // namespace hullforge
