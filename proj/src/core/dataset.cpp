#include "dca/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dca/errors.hpp"

namespace dca {

namespace {

struct Cell {
  std::string text;
  bool quoted = false;
};

using Row = std::vector<Cell>;

std::string where(int line, int column) { return "line " + std::to_string(line) + ", column " + std::to_string(column); }

// Splits text into records; line numbers are those of each record's first line.
std::vector<std::pair<int, Row>> split_records(std::string_view text) {
  std::vector<std::pair<int, Row>> rows;
  Row row;
  Cell cell;
  int line = 1;
  int record_line = 1;
  bool in_quotes = false;
  bool after_quote = false;
  bool row_has_content = false;
  std::size_t i = 0;

  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell = Cell{};
    after_quote = false;
  };
  auto end_row = [&] {
    end_cell();
    const bool blank = row.size() == 1 && row[0].text.empty() && !row[0].quoted;
    if (!blank) rows.emplace_back(record_line, std::move(row));
    row.clear();
    row_has_content = false;
  };

  while (i < text.size()) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (ch == '\n') ++line;
        cell.text.push_back(ch);
      }
      ++i;
      continue;
    }
    if (ch == '"') {
      if (after_quote || !cell.text.empty())
        fail(ErrorCode::ParseError, "unexpected quote at " + where(line, static_cast<int>(row.size()) + 1));
      in_quotes = true;
      cell.quoted = true;
      row_has_content = true;
    } else if (ch == ',') {
      end_cell();
      row_has_content = true;
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled with the '\n'
    } else if (ch == '\n') {
      end_row();
      ++line;
      record_line = line;
    } else {
      if (after_quote && ch != ' ' && ch != '\t')
        fail(ErrorCode::ParseError, "text after closing quote at " + where(line, static_cast<int>(row.size()) + 1));
      if (!after_quote) cell.text.push_back(ch);
      row_has_content = true;
    }
    ++i;
  }
  if (in_quotes) fail(ErrorCode::ParseError, "unterminated quoted field starting on line " + std::to_string(record_line));
  if (row_has_content || !cell.text.empty() || !row.empty()) end_row();
  return rows;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(const Cell& cell, int line, int column) {
  std::string_view s = trim(cell.text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::general);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    fail(ErrorCode::NonNumericCell, "parse error: non-numeric cell '" + cell.text + "' at " + where(line, column));
  return value;
}

}  // namespace

Dataset parse_csv(std::string_view text, bool has_header, bool standardize, const std::string& source) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  auto records = split_records(text);
  std::vector<std::string> names;
  std::size_t first = 0;
  if (has_header) {
    if (records.empty()) fail(ErrorCode::ParseError, source + ": missing header row");
    for (const Cell& c : records[0].second) names.emplace_back(trim(c.text));
    first = 1;
  }
  if (records.size() <= first) fail(ErrorCode::ParseError, source + ": no data rows");
  const std::size_t p = has_header ? names.size() : records[first].second.size();
  const auto n = static_cast<Eigen::Index>(records.size() - first);
  Matrix values(n, static_cast<Eigen::Index>(p));
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& [line, row] = records[r];
    if (row.size() != p)
      fail(ErrorCode::ParseError, source + ": line " + std::to_string(line) + " has " + std::to_string(row.size()) +
                                      " fields, expected " + std::to_string(p));
    for (std::size_t c = 0; c < p; ++c)
      values(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) =
          parse_number(row[c], line, static_cast<int>(c) + 1);
  }
  if (p < 2) fail(ErrorCode::ParseError, source + ": need at least two columns");

  const Vector var = column_variances(values);
  NodeSet zero;
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < p; ++c) {
    if (var[static_cast<Eigen::Index>(c)] > 0.0) continue;
    zero.push_back(static_cast<int>(c));
    warnings.push_back("column " + std::to_string(c + 1) + (names.empty() ? "" : " (" + names[c] + ")") +
                       " has zero variance and is excluded from testing");
  }
  if (standardize) {
    values = center_columns(values);
    for (std::size_t c = 0; c < p; ++c) {
      const double v = var[static_cast<Eigen::Index>(c)];
      if (v > 0.0) values.col(static_cast<Eigen::Index>(c)) /= std::sqrt(v);
    }
  }
  return Dataset{DataMatrix(std::move(values)), std::move(names), source, std::move(zero), std::move(warnings)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  return buf.str();
}

Dataset ingest_csv(const std::string& path, bool has_header, bool standardize) {
  return parse_csv(read_text_file(path), has_header, standardize, path);
}

SymMatrix read_sym_matrix_csv(const std::string& path) {
  const Dataset d = parse_csv(read_text_file(path), false, false, path);
  const Matrix& m = d.matrix.values();
  if (m.rows() != m.cols())
    fail(ErrorCode::InvalidArgument, path + ": matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                         ", expected square");
  return SymMatrix(m);
}

}  // namespace dca
