#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace palab {

using Vec = std::vector<double>;

// Thrown when two objects disagree on the size of a named axis.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& axis, std::size_t expected, std::size_t got);
  const std::string& axis() const { return axis_; }

 private:
  std::string axis_;
};

// Small dense row-major matrix. Instances in this project are tiny, so no
// expression templates or views beyond row spans.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vec column(std::size_t c) const;
  std::vector<Vec> to_rows() const;

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double norm_l1(std::span<const double> a);
double norm_linf(std::span<const double> a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// a + t * (b - a)
Vec lerp(std::span<const double> a, std::span<const double> b, double t);

}  // namespace palab
