#include <algorithm>

#include "doctest.h"
#include "graphtx/matrix.hpp"
#include "graphtx/rng.hpp"
#include "graphtx/spectral.hpp"
#include "test_util.hpp"

using namespace gtx;
using gtxtest::random_matrix;
using gtxtest::random_symmetric;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("sym_eig identity and K2 laplacian") {
  EigResult r = sym_eig(Matrix::identity(3));
  for (double v : r.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  Matrix k2{{1, -1}, {-1, 1}};
  EigResult e = sym_eig(k2);
  CHECK(e.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sym_eig rejects non-symmetric input") {
  Matrix a{{1, 2}, {3, 4}};
  CHECK_THROWS_AS(sym_eig(a), std::invalid_argument);
}

TEST_CASE("sym_eig reconstruction and orthonormality on random symmetric") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    Matrix s = random_symmetric(5, rng);
    EigResult r = sym_eig(s);
    // U Lambda U^T == S
    Matrix ul = r.vectors;
    for (int c = 0; c < 5; ++c)
      for (int i = 0; i < 5; ++i) ul(i, c) *= r.values[c];
    CHECK(frobenius_norm(sub(matmul_nt(ul, r.vectors), s)) <= 1e-8 * frobenius_norm(s));
    // U^T U == I
    CHECK(frobenius_norm(sub(matmul_tn(r.vectors, r.vectors), Matrix::identity(5))) <= 1e-10);
    // ascending
    CHECK(std::is_sorted(r.values.begin(), r.values.end()));
  }
}

TEST_CASE("sym_eig sign canonicalization is deterministic") {
  Rng rng(22);
  Matrix s = random_symmetric(6, rng);
  EigResult a = sym_eig(s);
  EigResult b = sym_eig(s);
  CHECK(bit_equal(a.vectors, b.vectors));
  for (int c = 0; c < 6; ++c) {
    int best = 0;
    for (int i = 0; i < 6; ++i)
      if (std::fabs(a.vectors(i, c)) > std::fabs(a.vectors(best, c))) best = i;
    CHECK(a.vectors(best, c) > 0.0);
  }
}

TEST_CASE("svd diagonal and identity") {
  Matrix d{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}};
  SvdResult r = svd(d);
  CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.values[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.values[2] == doctest::Approx(1.0).epsilon(1e-10));

  SvdResult ri = svd(Matrix::identity(4));
  for (double v : ri.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("svd reconstruction, orthonormality, descending order") {
  Rng rng(23);
  for (int t = 0; t < 8; ++t) {
    const int m = 3 + static_cast<int>(rng.below(4));
    const int n = 3 + static_cast<int>(rng.below(4));
    Matrix a = random_matrix(m, n, rng);
    SvdResult r = svd(a);
    CHECK(reconstruction_error(a, r.u, r.values, r.v) <= 1e-8 * frobenius_norm(a));
    const int k = static_cast<int>(r.values.size());
    CHECK(frobenius_norm(sub(matmul_tn(r.u, r.u), Matrix::identity(k))) <= 1e-8);
    CHECK(frobenius_norm(sub(matmul_tn(r.v, r.v), Matrix::identity(k))) <= 1e-8);
    for (size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] <= r.values[i - 1] + 1e-15);
    for (double s : r.values) CHECK(s >= 0.0);
  }
}

TEST_CASE("svd rank-2 truncation achieves the Eckart-Young optimum") {
  Rng rng(24);
  Matrix a = random_matrix(6, 6, rng);
  SvdResult r = svd(a);
  // truncated reconstruction from our solver
  auto truncated_err = [&](int rank) {
    std::vector<double> w = r.values;
    for (size_t i = rank; i < w.size(); ++i) w[i] = 0.0;
    return reconstruction_error(a, r.u, w, r.v);
  };
  // optimum from the full decomposition: sqrt(sum of squared dropped sigmas)
  double opt = 0.0;
  for (size_t i = 2; i < r.values.size(); ++i) opt += r.values[i] * r.values[i];
  opt = std::sqrt(opt);
  CHECK(std::fabs(truncated_err(2) - opt) < 1e-8);
}

TEST_CASE("svd truncation error is monotone nonincreasing in r (property)") {
  Rng rng(25);
  for (int t = 0; t < 5; ++t) {
    Matrix a = random_matrix(6, 6, rng);
    SvdResult r = svd(a);
    double prev = frobenius_norm(a) + 1.0;
    for (int rank = 0; rank <= 6; ++rank) {
      std::vector<double> w = r.values;
      for (size_t i = rank; i < w.size(); ++i) w[i] = 0.0;
      const double err = reconstruction_error(a, r.u, w, r.v);
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("svd handles rank-deficient input via completion") {
  Matrix a(4, 4);  // rank 1
  for (int j = 0; j < 4; ++j) a(0, j) = 1.0;
  SvdResult r = svd(a);
  CHECK(r.values[0] == doctest::Approx(2.0).epsilon(1e-10));
  for (size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] < 1e-10);
  CHECK(frobenius_norm(sub(matmul_tn(r.u, r.u), Matrix::identity(4))) <= 1e-8);
  CHECK(reconstruction_error(a, r.u, r.values, r.v) <= 1e-8 * frobenius_norm(a));
}

TEST_SUITE_END();
