#include "lmpso/symreg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lmpso/swarm/prompt_template.hpp"

namespace lmpso::symreg {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

}  // namespace

void Dataset::validate() const {
  if (dim == 0) throw std::invalid_argument("dataset needs at least one feature");
  if (y.empty()) throw std::invalid_argument("dataset has no rows");
  if (X.size() != y.size() * dim) throw std::invalid_argument("X shape does not match y");
  for (double v : X) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite target value");
  }
}

Dataset parse_csv(std::string_view text, std::string name) {
  Dataset data;
  data.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  char delim = ',';
  std::size_t columns = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!have_header) {
      delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
      const auto names = split(line, delim);
      if (names.size() < 2) throw SchemaError(line_no, 0, "need at least one feature column and a target");
      columns = names.size();
      for (std::size_t c = 0; c + 1 < columns; ++c) data.feature_names.emplace_back(trim(names[c]));
      data.dim = columns - 1;
      have_header = true;
      continue;
    }
    const auto cells = split(line, delim);
    if (cells.size() != columns) {
      throw SchemaError(line_no, std::min(cells.size(), columns),
                        "expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        throw SchemaError(line_no, c, "not a finite number: '" + std::string(trim(cells[c])) + "'");
      }
      (c + 1 < columns ? data.X : data.y).push_back(v);
    }
  }
  if (!have_header) throw SchemaError(1, 0, "missing header row");
  if (data.y.empty()) throw SchemaError(line_no, 0, "no data rows");
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return parse_csv(buf.str(), path.stem().string());
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t c = 0; c < data.dim; ++c) out += "x" + std::to_string(c) + ",";
  out += "y\n";
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (double v : data.row(r)) out += swarm::format_number(v) + ",";
    out += swarm::format_number(data.y[r]) + "\n";
  }
  return out;
}

}  // namespace lmpso::symreg
