#pragma once

// Greedy single-coordinate corrections of a reference vector beta_bar toward the noiseless mean
// response Ey. After k steps the residual correlation is at most a/sqrt(k+1) times the
// least-squares approximation error of beta_bar, and at most k coordinates have moved.

#include <cmath>
#include <optional>
#include <vector>

#include "sparsereg/core.hpp"

namespace sparsereg {

struct GreedyTrace {
  /// beta^(0) = beta_bar, then one iterate per step.
  std::vector<CoefVector> iterates;
  /// 0-based coordinate picked at step k (entry k-1).
  std::vector<std::size_t> picked_indices;
  std::vector<double> step_sizes;
  /// ||(1/n) sum_i (beta^(k)^T x_i - Ey_i) x_i||_inf for every iterate.
  std::vector<double> residual_corr_inf;
  /// sum_i (beta^(k)^T x_i - Ey_i)^2 for every iterate.
  std::vector<double> energy;
  double column_scale = 0.0;
};

struct GreedyCertificate {
  std::size_t k_star = 0;
  bool bound_holds = false;
  double threshold = 0.0;
  double approx_err = 0.0;
  std::optional<double> displacement;
  std::optional<double> displacement_bound;

  bool displacement_holds(double tolerance = 1e-10) const {
    return !displacement || !displacement_bound || *displacement <= *displacement_bound + tolerance;
  }
};

namespace detail {

inline double column_scale(const DesignMatrix& x) {
  return std::sqrt((x.values().colwise().squaredNorm() / static_cast<double>(x.n())).maxCoeff());
}

}  // namespace detail

/// Runs up to k_max steps; stops early once the residual correlation is at most 1e-14.
inline GreedyTrace greedy_correct(const DesignMatrix& x, const ResponseVector& mean_response,
                                  const CoefVector& beta_bar, std::size_t k_max) {
  detail::check_dims(x, mean_response);
  detail::check_dims(x, beta_bar);
  GreedyTrace trace;
  trace.column_scale = detail::column_scale(x);
  detail::require(trace.column_scale > 0.0, ErrorKind::ZeroColumnScale, "all design columns are zero");
  const double n = static_cast<double>(x.n());
  const double a2 = trace.column_scale * trace.column_scale;

  Vector beta = beta_bar.values();
  Vector residual = x.values() * beta - mean_response.values();
  auto record = [&]() {
    const Vector corr = x.values().transpose() * residual / n;
    trace.iterates.emplace_back(beta);
    trace.residual_corr_inf.push_back(corr.cwiseAbs().maxCoeff());
    trace.energy.push_back(residual.squaredNorm());
    return corr;
  };

  Vector corr = record();
  for (std::size_t step = 1; step <= k_max; ++step) {
    if (trace.residual_corr_inf.back() <= 1e-14) break;
    Eigen::Index j = 0;
    for (Eigen::Index i = 1; i < corr.size(); ++i) {
      if (std::abs(corr(i)) > std::abs(corr(j))) j = i;
    }
    const double step_size = -corr(j) / a2;
    beta(j) += step_size;
    residual = x.values() * beta - mean_response.values();
    trace.picked_indices.push_back(static_cast<std::size_t>(j));
    trace.step_sizes.push_back(step_size);
    corr = record();
  }
  return trace;
}

/// First iterate k* <= k whose residual correlation is within (a/sqrt(k+1)) * approx_err.
/// With mu2_k (the smallest k-sparse eigenvalue) the displacement ||beta^(k*) - beta_bar||_2 is
/// also checked against 2 approx_err / sqrt(mu2_k).
inline GreedyCertificate prop51_certificate(const GreedyTrace& trace, const DesignMatrix& x,
                                            const ResponseVector& mean_response, const CoefVector& beta_bar,
                                            std::size_t k, std::optional<double> mu2_k = std::nullopt) {
  detail::check_dims(x, mean_response);
  detail::check_dims(x, beta_bar);
  detail::require(!trace.iterates.empty(), ErrorKind::DomainError, "greedy trace is empty");
  GreedyCertificate cert;
  cert.approx_err = std::sqrt(mean_squared_error(x, mean_response, beta_bar));
  cert.threshold = detail::column_scale(x) / std::sqrt(static_cast<double>(k) + 1.0) * cert.approx_err;
  const std::size_t last = std::min(k, trace.iterates.size() - 1);
  for (std::size_t i = 0; i <= last; ++i) {
    if (trace.residual_corr_inf[i] <= cert.threshold * (1.0 + 1e-12) + 1e-15) {
      cert.k_star = i;
      cert.bound_holds = true;
      break;
    }
  }
  detail::require(cert.bound_holds, ErrorKind::CertificateNotFound,
                  "no greedy iterate within " + std::to_string(k) + " steps meets the residual-correlation bound");
  cert.displacement = (trace.iterates[cert.k_star].values() - beta_bar.values()).norm();
  if (mu2_k && *mu2_k > 0.0) cert.displacement_bound = 2.0 * cert.approx_err / std::sqrt(*mu2_k);
  return cert;
}

}  // namespace sparsereg
