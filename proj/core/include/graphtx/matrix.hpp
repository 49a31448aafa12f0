#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gtx {

/// Dense row-major matrix of doubles, the universal numeric carrier.
/// Values are immutable by convention once handed to the tape or a Graph;
/// mutating accessors exist for construction code only.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}
  Matrix(int rows, int cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }
  static Matrix identity(int n);
  static Matrix filled(int rows, int cols, double v);
  static Matrix row_vector(const std::vector<double>& v);
  static Matrix column_vector(const std::vector<double>& v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  double* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
  const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& vec() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  /// True iff every entry is finite. Input-ingestion paths reject on false;
  /// internal computations may legitimately carry the -inf mask sentinel.
  bool all_finite() const;

  std::string shape_str() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// ---- plain (non-tape) kernels; fixed accumulation order, deterministic ----

Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// Row-wise softmax with max subtraction. Entries equal to -inf map to
/// exactly 0. A row that is entirely -inf is a degenerate mask -> throws.
Matrix row_softmax(const Matrix& a);

/// Per row: (x - mean) / sqrt(pop_var + eps) * gain + bias.
Matrix layer_norm(const Matrix& x, const std::vector<double>& gain, const std::vector<double>& bias,
                  double eps);

Matrix relu(const Matrix& a);
Matrix gelu(const Matrix& a);  // exact erf form

double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool bit_equal(const Matrix& a, const Matrix& b);

}  // namespace gtx
