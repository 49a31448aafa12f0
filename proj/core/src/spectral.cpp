#include "graphtx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gtx {

namespace {

double offdiag_mass(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

/// Make the largest-magnitude entry of column c positive, ties by lowest index.
void canonicalize_column(Matrix& m, int c) {
  int best = 0;
  double best_abs = -1.0;
  for (int i = 0; i < m.rows(); ++i) {
    const double a = std::fabs(m(i, c));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (m(best, c) < 0.0)
    for (int i = 0; i < m.rows(); ++i) m(i, c) = -m(i, c);
}

}  // namespace

EigResult sym_eig(const Matrix& s) {
  const int n = s.rows();
  if (n != s.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(s(i, j) - s(j, i)) > 1e-10)
        throw std::invalid_argument("sym_eig: matrix not symmetric within 1e-10");

  Matrix a = s;
  Matrix u = Matrix::identity(n);
  const double norm = frobenius_norm(s);
  const double tol = 1e-12 * (norm > 0.0 ? norm : 1.0);

  for (int sweep = 0; sweep < 100 && offdiag_mass(a) > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        // A <- J^T A J on rows/cols p and q
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double ukp = u(k, p), ukq = u(k, q);
          u(k, p) = c * ukp - sn * ukq;
          u(k, q) = sn * ukp + c * ukq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](int i, int j) { return a(i, i) < a(j, j); });

  EigResult res;
  res.values.resize(n);
  res.vectors = Matrix(n, n);
  for (int c = 0; c < n; ++c) {
    res.values[c] = a(order[c], order[c]);
    for (int r = 0; r < n; ++r) res.vectors(r, c) = u(r, order[c]);
    canonicalize_column(res.vectors, c);
  }
  return res;
}

SvdResult svd(const Matrix& a) {
  const int m = a.rows(), n = a.cols();
  const int k = std::min(m, n);
  const Matrix ata = matmul_tn(a, a);
  // symmetrize away roundoff so the eig precondition holds
  Matrix sym(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sym(i, j) = 0.5 * (ata(i, j) + ata(j, i));
  EigResult eig = sym_eig(sym);

  SvdResult res;
  res.values.resize(k);
  res.u = Matrix(m, k);
  res.v = Matrix(n, k);
  // The A^T A route squares the condition number, so sigmas below about
  // sqrt(eps)*||A|| are numerically indistinguishable from zero.
  const double sigma_floor = 1e-7 * std::max(frobenius_norm(a), 1.0);

  for (int c = 0; c < k; ++c) {
    const int e = n - 1 - c;  // eigenvalues ascend, singular values descend
    const double lam = std::max(eig.values[e], 0.0);
    const double sigma = std::sqrt(lam);
    for (int r = 0; r < n; ++r) res.v(r, c) = eig.vectors(r, e);
    if (sigma > sigma_floor) {
      res.values[c] = sigma;
      for (int r = 0; r < m; ++r) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(r, j) * res.v(j, c);
        res.u(r, c) = s / sigma;
      }
    } else {
      res.values[c] = 0.0;
    }
  }

  // complete zero-sigma columns of U to an orthonormal set, deterministically
  for (int c = 0; c < k; ++c) {
    if (res.values[c] > sigma_floor) continue;
    for (int cand = 0; cand < m + k; ++cand) {
      std::vector<double> w(m, 0.0);
      if (cand < m)
        w[cand] = 1.0;
      else
        for (int r = 0; r < m; ++r) w[r] = 1.0 / std::sqrt(static_cast<double>(m) + r);
      for (int prev = 0; prev < c; ++prev) {
        double dot = 0.0;
        for (int r = 0; r < m; ++r) dot += w[r] * res.u(r, prev);
        for (int r = 0; r < m; ++r) w[r] -= dot * res.u(r, prev);
      }
      double nrm = 0.0;
      for (double x : w) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {
        for (int r = 0; r < m; ++r) res.u(r, c) = w[r] / nrm;
        break;
      }
    }
  }

  // joint sign canonicalization per (u_i, v_i) pair, driven by u_i
  for (int c = 0; c < k; ++c) {
    int best = 0;
    double best_abs = -1.0;
    for (int r = 0; r < m; ++r) {
      const double v = std::fabs(res.u(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (res.u(best, c) < 0.0) {
      for (int r = 0; r < m; ++r) res.u(r, c) = -res.u(r, c);
      for (int r = 0; r < n; ++r) res.v(r, c) = -res.v(r, c);
    }
  }
  return res;
}

double reconstruction_error(const Matrix& a, const Matrix& u, const std::vector<double>& w,
                            const Matrix& v) {
  Matrix us = u;
  for (int c = 0; c < us.cols(); ++c)
    for (int r = 0; r < us.rows(); ++r) us(r, c) *= w[c];
  return frobenius_norm(sub(a, matmul_nt(us, v)));
}

}  // namespace gtx
