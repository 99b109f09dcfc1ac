#include "frpsa/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "frpsa/errors.hpp"

namespace frpsa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_line(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Empty and non-numeric cells are both treated as missing so screening
// handles them uniformly.
double parse_cell(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return kNaN;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return kNaN;
  return value;
}

int find_column(const std::vector<std::string>& columns, std::string_view name) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

bool Dataset::has_missing() const { return values.hasNaN(); }

int Dataset::column_index(std::string_view name) const {
  const int idx = find_column(columns, name);
  if (idx < 0) throw input_error("dataset has no column named '" + std::string(name) + "'");
  return idx;
}

int StandardizedDataset::column_index(std::string_view name) const {
  const int idx = find_column(columns, name);
  if (idx < 0) throw input_error("dataset has no column named '" + std::string(name) + "'");
  return idx;
}

Dataset parse_csv(std::string_view text, char delimiter, std::string_view origin) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw input_error(std::string(origin) + ": empty file, expected a header row");

  Dataset d;
  for (std::string_view cell : split_line(lines[0], delimiter)) {
    const std::string name(trim(cell));
    if (name.empty()) {
      throw input_error(std::string(origin) + ": header column " +
                        std::to_string(d.columns.size() + 1) + " is empty");
    }
    if (find_column(d.columns, name) >= 0) {
      throw input_error(std::string(origin) + ": duplicate header name '" + name + "'");
    }
    d.columns.push_back(name);
  }

  const auto p = d.columns.size();
  const auto n = lines.size() - 1;
  if (n == 0) throw input_error(std::string(origin) + ": no data rows after the header");

  d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < n; ++r) {
    const auto cells = split_line(lines[r + 1], delimiter);
    if (cells.size() != p) {
      throw input_error(std::string(origin) + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " + std::to_string(p));
    }
    for (std::size_t c = 0; c < p; ++c) {
      d.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_cell(cells[c]);
    }
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("read failure on '" + path.string() + "'");
  return parse_csv(buf.str(), delimiter, path.string());
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    if (c) out += ',';
    out += d.columns[c];
  }
  out += '\n';
  char buf[64];
  for (int r = 0; r < d.n_cases(); ++r) {
    for (int c = 0; c < d.n_columns(); ++c) {
      if (c) out += ',';
      const double v = d.values(r, c);
      if (std::isnan(v)) continue;  // missing -> empty cell
      std::snprintf(buf, sizeof buf, "%.10g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << to_csv(d);
  if (!out) throw io_error("write failure on '" + path.string() + "'");
}

std::pair<Dataset, ScreeningSummary> screen_cases(const Dataset& d) {
  ScreeningSummary summary;
  summary.received = d.n_cases();

  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(d.n_cases()));
  for (int r = 0; r < d.n_cases(); ++r) {
    if (!d.values.row(r).hasNaN()) keep.push_back(r);
  }
  summary.valid = static_cast<int>(keep.size());
  summary.excluded = summary.received - summary.valid;
  if (keep.empty()) {
    throw input_error("screening excluded every case (" + std::to_string(summary.received) +
                      " received, all incomplete)");
  }

  Dataset out;
  out.columns = d.columns;
  out.values.resize(static_cast<Eigen::Index>(keep.size()), d.values.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.values.row(static_cast<Eigen::Index>(i)) = d.values.row(keep[i]);
  return {std::move(out), summary};
}

StandardizedDataset standardize(const Dataset& d) {
  if (d.n_cases() < 2) throw input_error("standardize: need at least 2 cases");
  if (d.has_missing()) throw input_error("standardize: dataset still contains missing cells; screen first");

  StandardizedDataset out;
  out.columns = d.columns;
  out.values.resizeLike(d.values);
  out.means.resize(d.n_columns());
  out.sds.resize(d.n_columns());

  const double n = d.n_cases();
  for (int c = 0; c < d.n_columns(); ++c) {
    const double m = d.values.col(c).mean();
    const double ss = (d.values.col(c).array() - m).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) {
      throw numeric_error("standardize: column '" + d.columns[static_cast<std::size_t>(c)] +
                          "' has zero variance");
    }
    out.means(c) = m;
    out.sds(c) = sd;
    out.values.col(c) = (d.values.col(c).array() - m) / sd;
  }
  return out;
}

}  // namespace frpsa
