#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. u not in (0,1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or kernel parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown (underflow of a quantity that must be nonzero, wrong sign, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Degenerate data: constant columns, identical points.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for the requested model family.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or stream.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major n x d matrix of points.
class PointMatrix {
 public:
  PointMatrix() = default;
  PointMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  PointMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ParameterError("PointMatrix: data size does not match shape");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Classic Kahan accumulator: y = x - c; t = s + y; c = (t - s) - y; s = t.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }
  double compensation() const { return comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace csd
