#pragma once

#include <cstdint>
#include <string>

#include <sparsereg/sparsereg.hpp>

namespace sparsereg::testing {

inline Matrix random_matrix(RandomStream& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Vector random_vector(RandomStream& rng, Eigen::Index size) {
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

/// n x d design with (1/n) X^T X = I (needs n >= d).
inline Matrix orthonormal_design(RandomStream& rng, Eigen::Index n, Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  Matrix q = qr.householderQ();
  return q.leftCols(d) * std::sqrt(static_cast<double>(n));
}

/// Random PSD Gram matrix with unit diagonal: normalized columns of a random n x d design.
inline GramMatrix random_correlation(RandomStream& rng, Eigen::Index d, Eigen::Index n = 0) {
  if (n == 0) n = d + 2;
  return gram(DesignMatrix(normalize_columns(random_matrix(rng, n, d))));
}

inline GramMatrix two_by_two(double c) {
  Matrix a(2, 2);
  a << 1.0, c, c, 1.0;
  return GramMatrix(a);
}

/// Scratch path under the build tree's temp directory.
inline std::string temp_path(const std::string& name) {
  const char* dir = std::getenv("TMPDIR");
  return std::string(dir ? dir : "/tmp") + "/sparsereg_test_" + name;
}

}  // namespace sparsereg::testing
