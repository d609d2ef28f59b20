#pragma once

#include <string>
#include <vector>

#include "hullforge/common.hpp"

namespace hullforge {

struct RowIssue {
    std::size_t line = 0; // 1-based line number in the file
    std::string message;
};

struct LoadReport {
    Matrix rows;                 // validated rows only, n x 45
    std::vector<RowIssue> rejected;
    std::size_t total_rows = 0;  // data rows encountered (valid + rejected)
};

// Reads a hull parameter CSV: canonical 45-column header, comma
// separated, '.' decimal point. Rows failing validation are excluded
// and reported with their line numbers. Throws HeaderMismatch,
// EmptyFile, ParseError, IoError.
LoadReport load_dataset(const std::string& path);

// Writes rows under the canonical header, plus optional extra columns.
// All numbers are shortest-round-trip formatted, so identical inputs
// produce identical bytes.
void save_dataset(const std::string& path, const Matrix& rows,
                  const std::vector<std::string>& extra_names = {},
                  const Matrix& extra_cols = {});

// Generic CSV helpers used by the CLI artifacts.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& rows);

} // namespace hullforge
