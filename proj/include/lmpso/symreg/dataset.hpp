#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmpso::symreg {

/// Regression data. X is row-major, rows() x dim.
struct Dataset {
  std::string name;
  std::size_t dim = 0;
  std::vector<double> X;
  std::vector<double> y;
  std::vector<std::string> feature_names;

  std::size_t rows() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const noexcept { return {X.data() + i * dim, dim}; }

  /// Throws std::invalid_argument on shape mismatch, dim == 0, no rows or non-finite values.
  void validate() const;
  bool operator==(const Dataset&) const = default;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  /// `row` is the 1-based line number in the file, `col` the 0-based column.
  SchemaError(std::size_t row, std::size_t col, const std::string& message)
      : std::runtime_error("line " + std::to_string(row) + ", column " + std::to_string(col) + ": " +
                           message),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// Header row then numeric rows, comma or tab delimited (decided by the header
/// line), last column is the target. Blank lines are skipped.
Dataset parse_csv(std::string_view text, std::string name = "");
Dataset load_csv(const std::filesystem::path& path);

/// Comma-delimited with header x0..x{dim-1},y. Values use shortest round-trip form.
std::string to_csv(const Dataset& data);

}  // namespace lmpso::symreg
