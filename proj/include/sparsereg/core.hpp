#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsereg/error.hpp"

namespace sparsereg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free, 0-based feature indices.
using IndexSet = std::vector<std::size_t>;

namespace detail {

inline bool all_finite(const Eigen::Ref<const Matrix>& m) {
  return m.allFinite();
}

inline IndexSet normalized_index_set(IndexSet indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return indices;
}

}  // namespace detail

/// n x d matrix whose rows are the input vectors x_1..x_n.
class DesignMatrix {
 public:
  explicit DesignMatrix(Matrix values) : values_(std::move(values)) {
    detail::require(values_.rows() >= 1 && values_.cols() >= 1,
                    ErrorKind::DomainError, "design matrix must have n >= 1 and d >= 1");
    detail::require(detail::all_finite(values_), ErrorKind::DomainError,
                    "design matrix contains non-finite entries");
  }

  const Matrix& values() const noexcept { return values_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(values_.cols()); }

 private:
  Matrix values_;
};

/// Observed outputs y_1..y_n.
class ResponseVector {
 public:
  explicit ResponseVector(Vector values) : values_(std::move(values)) {
    detail::require(values_.allFinite(), ErrorKind::DomainError,
                    "response vector contains non-finite entries");
  }

  const Vector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

 private:
  Vector values_;
};

/// Linear model coefficients beta in R^d.
class CoefVector {
 public:
  CoefVector() = default;
  explicit CoefVector(Vector values) : values_(std::move(values)) {
    detail::require(values_.allFinite(), ErrorKind::DomainError,
                    "coefficient vector contains non-finite entries");
  }

  static CoefVector zeros(std::size_t d) { return CoefVector(Vector::Zero(static_cast<Eigen::Index>(d))); }

  const Vector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t j) const { return values_(static_cast<Eigen::Index>(j)); }

 private:
  Vector values_;
};

/// Empirical second-moment matrix (1/n) sum_i x_i x_i^T together with its column scale
/// a = sqrt(max_j A_jj).
class GramMatrix {
 public:
  /// Wraps an explicitly supplied matrix (e.g. read from disk). Symmetry and PSD are checked.
  explicit GramMatrix(Matrix values) : values_(std::move(values)) {
    detail::require(values_.rows() == values_.cols() && values_.rows() >= 1,
                    ErrorKind::DimensionMismatch, "gram matrix must be square and non-empty");
    detail::require(values_.allFinite(), ErrorKind::DomainError, "gram matrix contains non-finite entries");
    const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
    detail::require((values_ - values_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                    ErrorKind::DomainError, "gram matrix is not symmetric");
    values_ = 0.5 * (values_ + values_.transpose());
    if (values_.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(values_, Eigen::EigenvaluesOnly);
      detail::require(eig.eigenvalues().minCoeff() >= -1e-10 * scale, ErrorKind::DomainError,
                      "gram matrix is not positive semi-definite");
    }
    column_scale_ = std::sqrt(std::max(0.0, values_.diagonal().maxCoeff()));
  }

  const Matrix& values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  double column_scale() const noexcept { return column_scale_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Matrix values_;
  double column_scale_ = 0.0;
};

/// A norm index p in [1, inf].
class NormIndex {
 public:
  explicit NormIndex(double p) : p_(p) {
    detail::require(!std::isnan(p) && p >= 1.0, ErrorKind::DomainError,
                    "norm index must satisfy p >= 1");
  }

  static NormIndex one() { return NormIndex(1.0); }
  static NormIndex two() { return NormIndex(2.0); }
  static NormIndex inf() { return NormIndex(std::numeric_limits<double>::infinity()); }

  /// Accepts "1", "2", "inf" or any real >= 1.
  static NormIndex parse(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "infinity") return inf();
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(text, &used);
    } catch (const std::exception&) {
      detail::fail(ErrorKind::ParseError, "invalid norm index '" + text + "'");
    }
    detail::require(used == text.size(), ErrorKind::ParseError, "invalid norm index '" + text + "'");
    return NormIndex(p);
  }

  double value() const noexcept { return p_; }
  bool is_inf() const noexcept { return std::isinf(p_); }
  /// 1/p, with 1/inf = 0.
  double inverse() const noexcept { return is_inf() ? 0.0 : 1.0 / p_; }

  /// True for the indices that admit exact operator norms: 1, 2 and inf.
  bool is_standard() const noexcept { return p_ == 1.0 || p_ == 2.0 || is_inf(); }

  std::string label() const {
    if (is_inf()) return "inf";
    if (p_ == std::floor(p_)) return std::to_string(static_cast<long long>(p_));
    return std::to_string(p_);
  }

  friend bool operator==(const NormIndex& a, const NormIndex& b) { return a.p_ == b.p_; }

 private:
  double p_;
};

/// (sum_j |v_j|^p)^(1/p), or max_j |v_j| for p = inf.
inline double p_norm(const Eigen::Ref<const Vector>& v, NormIndex p) {
  if (v.size() == 0) return 0.0;
  if (p.is_inf()) return v.cwiseAbs().maxCoeff();
  if (p.value() == 1.0) return v.cwiseAbs().sum();
  if (p.value() == 2.0) return v.norm();
  // Scale by the max magnitude to keep large p from overflowing.
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v(j)) / peak, p.value());
  return peak * std::pow(acc, 1.0 / p.value());
}

/// Indices ordered by decreasing |beta_j|; equal magnitudes keep the lower index first.
inline std::vector<std::size_t> magnitude_order(const Eigen::Ref<const Vector>& beta) {
  std::vector<std::size_t> order(static_cast<std::size_t>(beta.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(beta(static_cast<Eigen::Index>(a))) > std::abs(beta(static_cast<Eigen::Index>(b)));
  });
  return order;
}

/// r_k^(p)(beta): p-norm of the d - k smallest-magnitude entries.
inline double tail_norm(const CoefVector& beta, std::size_t k, NormIndex p) {
  const std::size_t d = beta.size();
  detail::require(k <= d, ErrorKind::DomainError, "tail_norm requires k <= d");
  const auto order = magnitude_order(beta.values());
  Vector tail(static_cast<Eigen::Index>(d - k));
  for (std::size_t i = k; i < d; ++i) tail(static_cast<Eigen::Index>(i - k)) = beta[order[i]];
  return p_norm(tail, p);
}

/// supp_alpha(beta) = {j : |beta_j| > alpha}.
inline IndexSet support_threshold(const CoefVector& beta, double alpha) {
  detail::require(alpha >= 0.0, ErrorKind::DomainError, "support threshold requires alpha >= 0");
  IndexSet out;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > alpha) out.push_back(j);
  }
  return out;
}

/// A = (1/n) X^T X.
inline GramMatrix gram(const DesignMatrix& x) {
  const double n = static_cast<double>(x.n());
  Matrix a = Matrix::Zero(x.values().cols(), x.values().cols());
  a.selfadjointView<Eigen::Lower>().rankUpdate(x.values().transpose(), 1.0 / n);
  a = a.selfadjointView<Eigen::Lower>();
  return GramMatrix(std::move(a));
}

namespace detail {

inline void check_dims(const DesignMatrix& x, const ResponseVector& y) {
  require(y.size() == x.n(), ErrorKind::DimensionMismatch,
          "response length " + std::to_string(y.size()) + " does not match n = " + std::to_string(x.n()));
}

inline void check_dims(const DesignMatrix& x, const CoefVector& beta) {
  require(beta.size() == x.d(), ErrorKind::DimensionMismatch,
          "coefficient length " + std::to_string(beta.size()) + " does not match d = " + std::to_string(x.d()));
}

}  // namespace detail

/// (1/n) sum_i (beta^T x_i - y_i) x_i.
inline CoefVector residual_correlation(const DesignMatrix& x, const ResponseVector& target, const CoefVector& beta) {
  detail::check_dims(x, target);
  detail::check_dims(x, beta);
  const Vector residual = x.values() * beta.values() - target.values();
  return CoefVector(x.values().transpose() * residual / static_cast<double>(x.n()));
}

/// Mean squared residual (1/n) sum_i (beta^T x_i - y_i)^2.
inline double mean_squared_error(const DesignMatrix& x, const ResponseVector& y, const CoefVector& beta) {
  detail::check_dims(x, y);
  detail::check_dims(x, beta);
  return (x.values() * beta.values() - y.values()).squaredNorm() / static_cast<double>(x.n());
}

/// Rescales every column so that sum_i x_ij^2 = n. All-zero columns are left untouched.
inline Matrix normalize_columns(Matrix values) {
  const double n = static_cast<double>(values.rows());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const double norm = values.col(j).norm();
    if (norm > 0.0) values.col(j) *= std::sqrt(n) / norm;
  }
  return values;
}

}  // namespace sparsereg
