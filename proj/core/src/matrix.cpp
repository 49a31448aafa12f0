#include "graphtx/matrix.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace gtx {

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (static_cast<size_t>(rows_) * cols_ != data_.size())
    throw std::invalid_argument("Matrix: rows*cols != data length");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::filled(int rows, int cols, double v) {
  Matrix m(rows, cols);
  std::fill(m.data_.begin(), m.data_.end(), v);
  return m;
}

Matrix Matrix::row_vector(const std::vector<double>& v) {
  return Matrix(1, static_cast<int>(v.size()), v);
}

Matrix Matrix::column_vector(const std::vector<double>& v) {
  return Matrix(static_cast<int>(v.size()), 1, v);
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

static void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dims " + a.shape_str() + " vs " + b.shape_str());
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Matrix c(m, n);
  for (int i = 0; i < m; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int p = 0; p < k; ++p) {
      const double aip = ai[p];
      if (aip == 0.0) continue;
      const double* bp = b.row(p);
      for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_nt: inner dims " + a.shape_str() + " vs " + b.shape_str());
  const int m = a.rows(), k = a.cols(), n = b.rows();
  Matrix c(m, n);
  for (int i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < n; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_tn: inner dims " + a.shape_str() + " vs " + b.shape_str());
  const int m = a.cols(), k = a.rows(), n = b.cols();
  Matrix c(m, n);
  for (int p = 0; p < k; ++p) {
    const double* ap = a.row(p);
    const double* bp = b.row(p);
    for (int i = 0; i < m; ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      double* ci = c.row(i);
      for (int j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix c = a;
  double* cd = c.data();
  const double* bd = b.data();
  for (size_t i = 0; i < c.size(); ++i) cd[i] += bd[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sub");
  Matrix c = a;
  double* cd = c.data();
  const double* bd = b.data();
  for (size_t i = 0; i < c.size(); ++i) cd[i] -= bd[i];
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "hadamard");
  Matrix c = a;
  double* cd = c.data();
  const double* bd = b.data();
  for (size_t i = 0; i < c.size(); ++i) cd[i] *= bd[i];
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  double* cd = c.data();
  for (size_t i = 0; i < c.size(); ++i) cd[i] *= s;
  return c;
}

Matrix row_softmax(const Matrix& a) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* x = a.row(i);
    double* y = out.row(i);
    double mx = neg_inf;
    for (int j = 0; j < a.cols(); ++j) mx = std::max(mx, x[j]);
    if (mx == neg_inf)
      throw std::domain_error("row_softmax: row " + std::to_string(i) + " fully masked");
    double sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
      y[j] = x[j] == neg_inf ? 0.0 : std::exp(x[j] - mx);
      sum += y[j];
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < a.cols(); ++j) y[j] *= inv;
  }
  return out;
}

Matrix layer_norm(const Matrix& x, const std::vector<double>& gain, const std::vector<double>& bias,
                  double eps) {
  const int d = x.cols();
  if (static_cast<int>(gain.size()) != d || static_cast<int>(bias.size()) != d)
    throw std::invalid_argument("layer_norm: gain/bias length != cols");
  Matrix out(x.rows(), d);
  for (int i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    double* yi = out.row(i);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += xi[j];
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) {
      const double c = xi[j] - mean;
      var += c * c;
    }
    var /= d;  // population variance
    const double inv = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < d; ++j) yi[j] = (xi[j] - mean) * inv * gain[j] + bias[j];
  }
  return out;
}

Matrix relu(const Matrix& a) {
  Matrix c = a;
  double* cd = c.data();
  for (size_t i = 0; i < c.size(); ++i) cd[i] = cd[i] > 0.0 ? cd[i] : 0.0;
  return c;
}

Matrix gelu(const Matrix& a) {
  Matrix c = a;
  double* cd = c.data();
  for (size_t i = 0; i < c.size(); ++i)
    cd[i] = 0.5 * cd[i] * (1.0 + std::erf(cd[i] * M_SQRT1_2));
  return c;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace gtx
