#pragma once

// Worst-case sub-block quantities of a PSD matrix A. Every quantity is a sup or inf over all index
// sets I (|I| = k) and, where a second block is involved, all disjoint J (|J| = ell):
//
//   rho   = sup ||A_II v||_p / ||v||_p          mu    = inf ||A_II v||_p / ||v||_p
//   theta = sup ||A_IJ u||_p / ||u||_inf        gamma = sup ||A_II^-1 A_IJ u||_p / ||u||_inf
//   omega = inf max(0, v^T A_II v^(p-1)) / ||v||_p^p
//   pi    = sup (v^(p-1))^T A_IJ u ||v||_p / (max(0, v^T A_II v^(p-1)) ||u||_inf)
//
// Only p in {1, 2, inf} is supported. The sups over the inf-norm ball are attained at sign vertices,
// so theta and gamma are exact. omega is exact for p = 2 and a certified lower bound otherwise;
// pi is only ever reported as a certified upper bound plus an optional heuristic lower estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/core.hpp"
#include "sparsereg/random.hpp"

namespace sparsereg {

enum class Exactness { Exact, LowerBound, UpperBound, HeuristicLower };

inline std::string to_string(Exactness e) {
  switch (e) {
    case Exactness::Exact: return "exact";
    case Exactness::LowerBound: return "lower_bound";
    case Exactness::UpperBound: return "upper_bound";
    case Exactness::HeuristicLower: return "heuristic_lower";
  }
  return "unknown";
}

inline Exactness parse_exactness(const std::string& text) {
  if (text == "exact") return Exactness::Exact;
  if (text == "lower_bound") return Exactness::LowerBound;
  if (text == "upper_bound") return Exactness::UpperBound;
  if (text == "heuristic_lower") return Exactness::HeuristicLower;
  detail::fail(ErrorKind::ParseError, "unknown exactness label '" + text + "'");
}

/// A computed value together with how it relates to the true quantity.
/// `degenerate` marks values forced to +inf by a zero denominator or a singular block.
struct Quantity {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  bool degenerate = false;

  bool is_infinite() const { return std::isinf(value); }
};

struct DiagnosticsConfig {
  /// Maximum number of (subset, sign pattern) evaluations per quantity.
  std::size_t budget = 200000;
  bool pi_heuristic = true;
  std::size_t pi_restarts = 2;
  std::uint64_t seed = 0x5eed;
};

struct SubsetQuantities {
  std::size_t k = 0;
  std::size_t ell = 0;
  NormIndex p = NormIndex::two();
  Quantity rho;
  Quantity mu;
  Quantity omega;
  Quantity theta;
  Quantity gamma;
  Quantity pi;
  std::optional<double> pi_heuristic;
  Quantity theta_bar;
};

struct RhoMu {
  double rho = 0.0;
  double mu = 0.0;
};

namespace detail {

inline void require_standard(NormIndex p) {
  require(p.is_standard(), ErrorKind::DomainError, "design diagnostics support p in {1, 2, inf} only");
}

inline double binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (std::size_t i = 1; i <= r; ++i) out = out * static_cast<double>(n - r + i) / static_cast<double>(i);
  return std::round(out);
}

inline void check_budget(double evaluations, std::size_t budget, const std::string& what) {
  require(evaluations <= static_cast<double>(budget), ErrorKind::CombinatorialBudgetExceeded,
          what + " needs " + std::to_string(static_cast<long long>(evaluations)) +
              " evaluations, budget is " + std::to_string(budget));
}

/// Calls fn(subset) for every r-subset of pool, in lexicographic order of positions.
inline void for_each_combination(const std::vector<std::size_t>& pool, std::size_t r,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn) {
  const std::size_t n = pool.size();
  if (r > n) return;
  std::vector<std::size_t> pos(r);
  for (std::size_t i = 0; i < r; ++i) pos[i] = i;
  std::vector<std::size_t> subset(r);
  while (true) {
    for (std::size_t i = 0; i < r; ++i) subset[i] = pool[pos[i]];
    fn(subset);
    std::size_t i = r;
    while (i > 0 && pos[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++pos[i - 1];
    for (std::size_t j = i; j < r; ++j) pos[j] = pos[j - 1] + 1;
  }
}

inline std::vector<std::size_t> iota_pool(std::size_t d) {
  std::vector<std::size_t> pool(d);
  for (std::size_t i = 0; i < d; ++i) pool[i] = i;
  return pool;
}

inline std::vector<std::size_t> complement(std::size_t d, const std::vector<std::size_t>& subset) {
  std::vector<bool> used(d, false);
  for (auto i : subset) used[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d; ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

inline Matrix block(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

/// Induced p-norm for p in {1, 2, inf}.
inline double operator_norm(const Matrix& m, NormIndex p) {
  if (m.size() == 0) return 0.0;
  if (p.is_inf()) return m.cwiseAbs().rowwise().sum().maxCoeff();
  if (p.value() == 1.0) return m.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Inverse of a square block, or nullopt when numerically singular.
inline std::optional<Matrix> checked_inverse(const Matrix& m) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return std::nullopt;
  return lu.inverse();
}

/// All sign vectors with first entry +1; the rest of the cube's vertices are their negations.
inline std::vector<Vector> sign_vertices(std::size_t ell) {
  std::vector<Vector> out;
  if (ell == 0) return out;
  const std::size_t count = std::size_t{1} << (ell - 1);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vector u = Vector::Ones(static_cast<Eigen::Index>(ell));
    for (std::size_t b = 1; b < ell; ++b) {
      if ((mask >> (b - 1)) & 1U) u(static_cast<Eigen::Index>(b)) = -1.0;
    }
    out.push_back(std::move(u));
  }
  return out;
}

inline double sign_pattern_count(std::size_t ell, NormIndex p) {
  return p.is_inf() ? 1.0 : std::ldexp(1.0, static_cast<int>(ell) - 1);
}

/// sup over the inf-norm unit ball of ||B u||_p.
inline double sup_over_sign_vertices(const Matrix& b, NormIndex p, const std::vector<Vector>& vertices) {
  if (p.is_inf()) return b.size() == 0 ? 0.0 : b.cwiseAbs().rowwise().sum().maxCoeff();
  double best = 0.0;
  for (const auto& u : vertices) best = std::max(best, p_norm(b * u, p));
  return best;
}

/// Smallest eigenvalue of a symmetric block, with the PSD convention that round-off negatives are 0.
inline double psd_floor(double eigenvalue) { return std::max(0.0, eigenvalue); }

inline void check_sizes(const GramMatrix& a, std::size_t k, std::size_t ell) {
  require(k >= 1, ErrorKind::DomainError, "block size k must be >= 1");
  require(k + ell <= a.dim(), ErrorKind::DomainError,
          "block sizes k + ell = " + std::to_string(k + ell) + " exceed d = " + std::to_string(a.dim()));
}

}  // namespace detail

/// M_A = max_{i != j} |A_ij|; requires a unit diagonal.
inline double mutual_coherence(const GramMatrix& a) {
  const Matrix& m = a.values();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    detail::require(std::abs(m(i, i) - 1.0) <= 1e-10, ErrorKind::NonNormalizedDiagonal,
                    "mutual coherence requires a unit diagonal");
  }
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j) best = std::max(best, std::abs(m(i, j)));
    }
  }
  return best;
}

/// Extreme p-operator gains over all k x k diagonal blocks. mu is 0 if any block is singular.
inline RhoMu rho_mu(const GramMatrix& a, std::size_t k, NormIndex p, const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  detail::check_sizes(a, k, 0);
  const std::size_t d = a.dim();
  detail::check_budget(detail::binomial(d, k), config.budget, "rho/mu");
  RhoMu out{0.0, std::numeric_limits<double>::infinity()};
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& subset) {
    const Matrix block = detail::block(a.values(), subset, subset);
    if (p.value() == 2.0) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
      const auto& ev = eig.eigenvalues();
      out.rho = std::max(out.rho, std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))));
      out.mu = std::min(out.mu, detail::psd_floor(ev(0)));
      return;
    }
    out.rho = std::max(out.rho, detail::operator_norm(block, p));
    const auto inv = detail::checked_inverse(block);
    out.mu = std::min(out.mu, inv ? 1.0 / detail::operator_norm(*inv, p) : 0.0);
  });
  return out;
}

/// max(rho_s - 1, 1 - mu_s) at p = 2: the restricted-isometry deviation used by the Dantzig bound.
inline double rip_deviation(const GramMatrix& a, std::size_t s, const DiagnosticsConfig& config = {}) {
  const auto rm = rho_mu(a, s, NormIndex::two(), config);
  return std::max(rm.rho - 1.0, 1.0 - rm.mu);
}

/// sup over disjoint (I, J) and u of ||A_IJ u||_p / ||u||_inf.
inline double theta(const GramMatrix& a, std::size_t k, std::size_t ell, NormIndex p,
                    const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  detail::check_sizes(a, k, ell);
  const std::size_t d = a.dim();
  detail::check_budget(detail::binomial(d, k) * detail::binomial(d - k, ell) * detail::sign_pattern_count(ell, p),
                       config.budget, "theta");
  const auto vertices = detail::sign_vertices(ell);
  double best = 0.0;
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& rows) {
    detail::for_each_combination(detail::complement(d, rows), ell, [&](const std::vector<std::size_t>& cols) {
      best = std::max(best, detail::sup_over_sign_vertices(detail::block(a.values(), rows, cols), p, vertices));
    });
  });
  return best;
}

/// As theta with A_IJ replaced by A_II^-1 A_IJ. A singular A_II makes the value +inf (degenerate).
inline Quantity gamma(const GramMatrix& a, std::size_t k, std::size_t ell, NormIndex p,
                      const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  detail::check_sizes(a, k, ell);
  const std::size_t d = a.dim();
  detail::check_budget(detail::binomial(d, k) * detail::binomial(d - k, ell) * detail::sign_pattern_count(ell, p),
                       config.budget, "gamma");
  const auto vertices = detail::sign_vertices(ell);
  Quantity out{0.0, Exactness::Exact, false};
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& rows) {
    if (out.degenerate) return;
    const auto inv = detail::checked_inverse(detail::block(a.values(), rows, rows));
    if (!inv) {
      out.value = std::numeric_limits<double>::infinity();
      out.degenerate = true;
      return;
    }
    detail::for_each_combination(detail::complement(d, rows), ell, [&](const std::vector<std::size_t>& cols) {
      const Matrix b = (*inv) * detail::block(a.values(), rows, cols);
      out.value = std::max(out.value, detail::sup_over_sign_vertices(b, p, vertices));
    });
  });
  return out;
}

/// min_i A_ii - sup_I ||A_II - diag(A_II)||_p, which lower-bounds omega (and may be negative).
inline double diagonal_dominance_bound(const GramMatrix& a, std::size_t k, NormIndex p,
                                       const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  detail::check_sizes(a, k, 0);
  const std::size_t d = a.dim();
  detail::check_budget(detail::binomial(d, k), config.budget, "diagonal dominance bound");
  double worst = 0.0;
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& subset) {
    Matrix off = detail::block(a.values(), subset, subset);
    off.diagonal().setZero();
    worst = std::max(worst, detail::operator_norm(off, p));
  });
  return a.values().diagonal().minCoeff() - worst;
}

/// Exact for p = 2 (smallest block eigenvalue, floored at 0); otherwise the diagonal-dominance
/// lower bound, floored at 0.
inline Quantity omega(const GramMatrix& a, std::size_t k, NormIndex p, const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  if (p.value() == 2.0) return Quantity{rho_mu(a, k, p, config).mu, Exactness::Exact, false};
  return Quantity{std::max(0.0, diagonal_dominance_bound(a, k, p, config)), Exactness::LowerBound, false};
}

namespace detail {

/// One evaluation of the pi ratio; +inf when the denominator vanishes under a positive numerator.
inline double pi_ratio(const Vector& v, const Matrix& a_ii, const Vector& b, NormIndex p) {
  Vector vp(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double s = v(i) > 0.0 ? 1.0 : (v(i) < 0.0 ? -1.0 : 0.0);
    vp(i) = p.value() == 1.0 ? s : s * std::pow(std::abs(v(i)), p.value() - 1.0);
  }
  const double numerator = std::abs(vp.dot(b)) * p_norm(v, p);
  const double denominator = std::max(0.0, v.dot(a_ii * vp)) * 1.0;
  if (numerator <= 0.0) return 0.0;
  if (denominator <= 0.0) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

}  // namespace detail

struct PiEstimate {
  Quantity upper;
  std::optional<double> heuristic_lower;
};

/// Certified upper bound on pi as the smaller of theta/omega and, for p = 2,
/// (sqrt(ell)/2) sqrt(rho_ell / mu_{k+ell} - 1). When enabled, a local search over (v, u) gives a
/// heuristic lower estimate (p in {1, 2}; every evaluated point is a genuine value of the ratio).
inline PiEstimate pi(const GramMatrix& a, std::size_t k, std::size_t ell, NormIndex p,
                     const DiagnosticsConfig& config = {}) {
  detail::require_standard(p);
  detail::check_sizes(a, k, ell);
  const std::size_t d = a.dim();
  const double inf = std::numeric_limits<double>::infinity();

  const double th = theta(a, k, ell, p, config);
  const Quantity om = omega(a, k, p, config);
  double route_ratio = th == 0.0 ? 0.0 : (om.value > 0.0 ? th / om.value : inf);
  double bound = route_ratio;
  if (p.value() == 2.0) {
    const double rho_ell = rho_mu(a, ell, p, config).rho;
    const double mu_joint = rho_mu(a, k + ell, p, config).mu;
    const double route_eigen = mu_joint > 0.0
                                   ? 0.5 * std::sqrt(static_cast<double>(ell)) * std::sqrt(std::max(0.0, rho_ell / mu_joint - 1.0))
                                   : inf;
    bound = std::min(bound, route_eigen);
  }
  PiEstimate out{Quantity{bound, Exactness::UpperBound, std::isinf(bound)}, std::nullopt};

  if (!config.pi_heuristic || p.is_inf()) return out;
  detail::check_budget(detail::binomial(d, k) * detail::binomial(d - k, ell) * detail::sign_pattern_count(ell, p),
                       config.budget, "pi heuristic");
  RandomStream rng(config.seed, k * 1000 + ell);
  const auto vertices = detail::sign_vertices(ell);
  double best = 0.0;
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& rows) {
    const Matrix a_ii = detail::block(a.values(), rows, rows);
    const auto inv = detail::checked_inverse(a_ii);
    detail::for_each_combination(detail::complement(d, rows), ell, [&](const std::vector<std::size_t>& cols) {
      const Matrix a_ij = detail::block(a.values(), rows, cols);
      for (const auto& u : vertices) {
        const Vector b = a_ij * u;
        std::vector<Vector> starts{b};
        if (inv) starts.push_back((*inv) * b);
        for (std::size_t i = 0; i < k; ++i) starts.push_back(Vector::Unit(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)));
        for (std::size_t r = 0; r < config.pi_restarts; ++r) {
          Vector v(static_cast<Eigen::Index>(k));
          for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
          starts.push_back(std::move(v));
        }
        for (auto& v : starts) {
          double value = detail::pi_ratio(v, a_ii, b, p);
          // Shrinking random perturbations; keep any improvement.
          double step = 0.5 * std::max(1e-12, v.norm());
          for (int it = 0; it < 12; ++it, step *= 0.6) {
            Vector trial = v;
            for (Eigen::Index i = 0; i < trial.size(); ++i) trial(i) += step * rng.normal();
            const double tv = detail::pi_ratio(trial, a_ii, b, p);
            if (tv > value) {
              value = tv;
              v = std::move(trial);
            }
          }
          best = std::max(best, value);
        }
      }
    });
  });
  out.heuristic_lower = best;
  return out;
}

/// sup over disjoint (I, J) of the spectral norm of A_IJ.
inline double theta_bar(const GramMatrix& a, std::size_t k, std::size_t ell, const DiagnosticsConfig& config = {}) {
  detail::check_sizes(a, k, ell);
  const std::size_t d = a.dim();
  detail::check_budget(detail::binomial(d, k) * detail::binomial(d - k, ell), config.budget, "theta_bar");
  double best = 0.0;
  detail::for_each_combination(detail::iota_pool(d), k, [&](const std::vector<std::size_t>& rows) {
    detail::for_each_combination(detail::complement(d, rows), ell, [&](const std::vector<std::size_t>& cols) {
      best = std::max(best, detail::operator_norm(detail::block(a.values(), rows, cols), NormIndex::two()));
    });
  });
  return best;
}

/// All quantities at (k, ell, p). Requires k + ell <= d and ell >= 1.
inline SubsetQuantities compute_quantities(const GramMatrix& a, std::size_t k, std::size_t ell, NormIndex p,
                                           const DiagnosticsConfig& config = {}) {
  detail::require(ell >= 1, ErrorKind::DomainError, "ell must be >= 1");
  SubsetQuantities q;
  q.k = k;
  q.ell = ell;
  q.p = p;
  const auto rm = rho_mu(a, k, p, config);
  q.rho = Quantity{rm.rho, Exactness::Exact, false};
  q.mu = Quantity{rm.mu, Exactness::Exact, false};
  q.omega = omega(a, k, p, config);
  q.theta = Quantity{theta(a, k, ell, p, config), Exactness::Exact, false};
  q.gamma = gamma(a, k, ell, p, config);
  const auto pe = pi(a, k, ell, p, config);
  q.pi = pe.upper;
  q.pi_heuristic = pe.heuristic_lower;
  q.theta_bar = Quantity{theta_bar(a, k, ell, config), Exactness::Exact, false};
  return q;
}

/// One evaluated inequality lhs <= rhs; slack = rhs - lhs.
struct InequalityCheck {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool evaluated = true;

  bool holds(double tolerance = 1e-9) const { return !evaluated || slack >= -tolerance; }
};

namespace detail {

inline InequalityCheck make_check(std::string label, double lhs, double rhs) {
  InequalityCheck c{std::move(label), lhs, rhs, 0.0, true};
  if (std::isinf(lhs) && std::isinf(rhs)) {
    c.evaluated = false;
  } else if (std::isinf(rhs)) {
    c.slack = std::numeric_limits<double>::infinity();
  } else {
    c.slack = rhs - lhs;
  }
  return c;
}

inline double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace detail

/// Evaluates the sub-block inequality suite for p in {1, 2, inf} at (k, ell).
/// Inequalities involving pi are checked against its heuristic lower estimate.
inline std::vector<InequalityCheck> check_prop31(const GramMatrix& a, std::size_t k, std::size_t ell,
                                                 const DiagnosticsConfig& config = {}) {
  detail::check_sizes(a, k, ell);
  detail::require(ell >= 1, ErrorKind::DomainError, "ell must be >= 1");
  std::vector<InequalityCheck> out;
  const NormIndex norms[] = {NormIndex::one(), NormIndex::two(), NormIndex::inf()};
  const NormIndex two = NormIndex::two();

  const auto rm2_k = rho_mu(a, k, two, config);
  const auto rm2_ell = rho_mu(a, ell, two, config);
  const auto rm2_joint = rho_mu(a, k + ell, two, config);
  const double theta2 = theta(a, k, ell, two, config);
  const Quantity gamma2 = gamma(a, k, ell, two, config);
  const double sk = std::sqrt(static_cast<double>(ell));

  out.push_back(detail::make_check(
      "theta2 <= sqrt(ell) sqrt((rho2_k - mu2_{k+ell})(rho2_ell - mu2_{k+ell}))", theta2,
      sk * std::sqrt(std::max(0.0, (rm2_k.rho - rm2_joint.mu) * (rm2_ell.rho - rm2_joint.mu)))));

  for (const auto& p : norms) {
    const std::string tag = p.label();
    const auto rm = p.value() == 2.0 ? rm2_k : rho_mu(a, k, p, config);
    const double th = p.value() == 2.0 ? theta2 : theta(a, k, ell, p, config);
    const Quantity ga = p.value() == 2.0 ? gamma2 : gamma(a, k, ell, p, config);
    const double dominance = diagonal_dominance_bound(a, k, p, config);
    const double factor = std::pow(static_cast<double>(k), std::max(0.0, p.inverse() - 0.5));

    out.push_back(detail::make_check("mu" + tag + " <= rho" + tag, rm.mu, rm.rho));
    if (p.value() != 2.0) {
      out.push_back(detail::make_check("theta" + tag + " <= k^max(0,1/p-1/2) theta2", th, factor * theta2));
      out.push_back(detail::make_check("gamma" + tag + " <= k^max(0,1/p-1/2) gamma2", ga.value, factor * gamma2.value));
    }
    out.push_back(detail::make_check("gamma" + tag + " <= theta" + tag + "/mu" + tag, ga.value,
                                     detail::safe_ratio(th, rm.mu)));

    if (p.value() == 2.0) {
      const double om = rm.mu;  // omega2 is the floored smallest block eigenvalue, as is mu2
      out.push_back(detail::make_check("diag_bound2 <= omega2", dominance, om));
      out.push_back(detail::make_check("omega2 <= mu2", om, rm.mu));
      const double om_direct = omega(a, k, p, config).value;
      InequalityCheck eq = detail::make_check("omega2 == mu2", std::abs(om_direct - rm.mu), 0.0);
      out.push_back(eq);
    } else {
      // omega is only bounded from below here; the chain still forces the bound below mu.
      out.push_back(detail::make_check("diag_bound" + tag + " <= mu" + tag, dominance, rm.mu));
    }

    if (!p.is_inf() && config.pi_heuristic) {
      const auto pe = pi(a, k, ell, p, config);
      const double om = omega(a, k, p, config).value;
      out.push_back(detail::make_check("pi" + tag + "(heuristic) <= theta" + tag + "/omega" + tag,
                                       *pe.heuristic_lower, detail::safe_ratio(th, om)));
      if (p.value() == 2.0) {
        const double route = rm2_joint.mu > 0.0
                                 ? 0.5 * sk * std::sqrt(std::max(0.0, rm2_ell.rho / rm2_joint.mu - 1.0))
                                 : std::numeric_limits<double>::infinity();
        out.push_back(detail::make_check("pi2(heuristic) <= (sqrt(ell)/2) sqrt(rho2_ell/mu2_{k+ell} - 1)",
                                         *pe.heuristic_lower, route));
      }
    }
  }
  return out;
}

struct IncoherenceBound {
  std::string label;
  double bound = 0.0;
  double computed = 0.0;
  double slack = 0.0;
};

struct IncoherenceReport {
  double coherence = 0.0;
  std::vector<IncoherenceBound> bounds;

  bool all_hold(double tolerance = 1e-9) const {
    return std::all_of(bounds.begin(), bounds.end(), [&](const auto& b) { return b.slack >= -tolerance; });
  }
};

/// Mutual-coherence bounds on every sub-block quantity, with slack against the computed values.
/// pi is compared through its certified upper bound, which is the stronger check.
inline IncoherenceReport incoherence_bounds(const GramMatrix& a, std::size_t k, std::size_t ell, NormIndex p,
                                            const DiagnosticsConfig& config = {}) {
  IncoherenceReport report;
  report.coherence = mutual_coherence(a);
  const double m = report.coherence;
  const double kd = static_cast<double>(k);
  const double ld = static_cast<double>(ell);
  DiagnosticsConfig cfg = config;
  cfg.pi_heuristic = false;
  const auto q = compute_quantities(a, k, ell, p, cfg);

  const double off = m * std::pow(kd, p.inverse()) * ld;
  const double denom = std::max(0.0, 1.0 - m * kd);
  const double ratio_bound = detail::safe_ratio(off, denom);
  auto upper = [&](std::string label, double bound, double computed) {
    const double slack = std::isinf(bound) ? std::numeric_limits<double>::infinity()
                                           : (std::isinf(computed) ? -std::numeric_limits<double>::infinity() : bound - computed);
    report.bounds.push_back(IncoherenceBound{std::move(label), bound, computed, slack});
  };
  auto lower = [&](std::string label, double bound, double computed) {
    report.bounds.push_back(IncoherenceBound{std::move(label), bound, computed, computed - bound});
  };
  upper("rho <= 1 + M k", 1.0 + m * kd, q.rho.value);
  lower("mu >= 1 - M k", 1.0 - m * kd, q.mu.value);
  lower("omega >= 1 - M k", 1.0 - m * kd, q.omega.value);
  upper("theta <= M k^(1/p) ell", off, q.theta.value);
  upper("pi <= M k^(1/p) ell / max(0, 1 - M k)", ratio_bound, q.pi.value);
  upper("gamma <= M k^(1/p) ell / max(0, 1 - M k)", ratio_bound, q.gamma.value);
  return report;
}

}  // namespace sparsereg
