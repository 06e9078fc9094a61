#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/errors.hpp"

namespace bpr {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& cell) {
  std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open file: " + path);

  std::string header_line;
  if (!std::getline(in, header_line))
    throw DataError("load_csv: empty file: " + path);
  char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';

  std::vector<std::string> header = split_line(header_line, delim);
  const std::size_t ncol = header.size();
  for (auto& h : header) h = trim(h);

  std::vector<std::vector<std::string>> cells(ncol);
  std::string line;
  std::size_t row = 1;  // header is row 0
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_line(line, delim);
    if (fields.size() != ncol) {
      std::ostringstream msg;
      msg << "load_csv: row " << row << " has " << fields.size()
          << " fields, expected " << ncol;
      throw DataError(msg.str());
    }
    for (std::size_t c = 0; c < ncol; ++c) cells[c].push_back(fields[c]);
    ++row;
  }
  const std::size_t nrow = cells.empty() ? 0 : cells[0].size();
  if (nrow == 0) throw DataError("load_csv: no data rows in " + path);

  // Classify each column: numeric (all cells parse), textual (none parse,
  // skipped), or mixed (error at the first bad cell).  Empty-header columns
  // are row labels and dropped.
  enum class Kind { Numeric, Textual, Dropped };
  std::vector<Kind> kind(ncol, Kind::Numeric);
  std::vector<Eigen::VectorXd> numeric(ncol);
  for (std::size_t c = 0; c < ncol; ++c) {
    if (header[c].empty()) {
      kind[c] = Kind::Dropped;
      continue;
    }
    std::size_t parsed = 0;
    Eigen::VectorXd col(static_cast<Eigen::Index>(nrow));
    std::size_t first_bad = 0;
    for (std::size_t r = 0; r < nrow; ++r) {
      auto v = parse_double(cells[c][r]);
      if (v) {
        col(static_cast<Eigen::Index>(r)) = *v;
        ++parsed;
      } else if (parsed == r) {
        first_bad = r;
      }
    }
    if (parsed == nrow) {
      numeric[c] = std::move(col);
    } else if (parsed == 0) {
      kind[c] = Kind::Textual;
    } else {
      // Re-scan for the first offending cell for a precise message.
      for (std::size_t r = 0; r < nrow; ++r) {
        if (!parse_double(cells[c][r])) {
          first_bad = r;
          break;
        }
      }
      std::ostringstream msg;
      msg << "load_csv: non-numeric cell at row " << (first_bad + 1)
          << ", column '" << header[c] << "'";
      throw DataError(msg.str());
    }
  }

  // Resolve the response column: exact name match first, then 0-based index.
  std::size_t resp = ncol;
  for (std::size_t c = 0; c < ncol; ++c)
    if (header[c] == response_column) resp = c;
  if (resp == ncol) {
    int idx = -1;
    std::string t = trim(response_column);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
    if (ec == std::errc() && p == t.data() + t.size() && idx >= 0 &&
        static_cast<std::size_t>(idx) < ncol)
      resp = static_cast<std::size_t>(idx);
  }
  if (resp == ncol)
    throw DataError("load_csv: response column '" + response_column +
                    "' not found");
  if (kind[resp] != Kind::Numeric || numeric[resp].size() == 0)
    throw DataError("load_csv: response column '" + header[resp] +
                    "' is not numeric");

  Dataset d;
  d.y = numeric[resp];
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < ncol; ++c)
    if (c != resp && kind[c] == Kind::Numeric) keep.push_back(c);
  if (keep.empty()) throw DataError("load_csv: no numeric predictor columns");
  d.X.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    d.X.col(static_cast<Eigen::Index>(k)) = numeric[keep[k]];
    d.names.push_back(header[keep[k]]);
  }
  d.validate();
  return d;
}

}  // namespace bpr
