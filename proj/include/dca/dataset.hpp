#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dca/numerics.hpp"

namespace dca {

struct Dataset {
  DataMatrix matrix;
  std::vector<std::string> variable_names;  // empty without a header row
  std::string source;
  NodeSet zero_variance;  // columns excluded from testing
  std::vector<std::string> warnings;
};

/// Comma-separated numbers, one row per sample. Quoted fields follow RFC 4180.
/// Only '.' is accepted as decimal point. Errors name the 1-based line and
/// column of the offending cell.
Dataset parse_csv(std::string_view text, bool has_header, bool standardize, const std::string& source = "<memory>");
Dataset ingest_csv(const std::string& path, bool has_header, bool standardize);

/// Square matrix from a CSV file without header, validated as exactly
/// symmetric.
SymMatrix read_sym_matrix_csv(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace dca
