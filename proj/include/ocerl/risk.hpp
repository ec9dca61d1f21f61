#pragma once

// Optimized certainty equivalents of finite discrete distributions.
//
// OCE_u(X) = max_b { b + E[u(X - b)] } for a concave, non-decreasing utility
// u with u(0) = 0 and 1 in the superdifferential at 0. The five utility
// families below cover expectation, CVaR, entropic risk, capped mean-variance
// and the mean-CVaR mixture.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ocerl {

enum class UtilityKind { Mean, CVaR, Entropic, MeanVariance, MeanCVaR };

/// A parameterized OCE utility together with the range [z_min, z_max] of the
/// returns it will be applied to. The range only affects domain checks in
/// eval_utility() and the scale vmax().
class UtilitySpec {
 public:
  static UtilitySpec mean(double z_min = 0.0, double z_max = 1.0);
  /// tau in (0, 1].
  static UtilitySpec cvar(double tau, double z_min = 0.0, double z_max = 1.0);
  /// beta < 0.
  static UtilitySpec entropic(double beta, double z_min = 0.0, double z_max = 1.0);
  /// c > 0.
  static UtilitySpec mean_variance(double c, double z_min = 0.0, double z_max = 1.0);
  /// 0 <= kappa1 < 1 < kappa2.
  static UtilitySpec mean_cvar(double kappa1, double kappa2, double z_min = 0.0,
                               double z_max = 1.0);

  UtilityKind kind() const noexcept { return kind_; }
  double tau() const noexcept { return p1_; }
  double beta() const noexcept { return p1_; }
  double c() const noexcept { return p1_; }
  double kappa1() const noexcept { return p1_; }
  double kappa2() const noexcept { return p2_; }
  double z_min() const noexcept { return z_min_; }
  double z_max() const noexcept { return z_max_; }

  /// u(t) without domain checks; the DP layers call this on every budget.
  double operator()(double t) const noexcept;

  /// max |u(c)| over c in [-W, W], W = z_max - z_min.
  double vmax() const;

  /// Mean, CVaR and MeanCVaR have piecewise-linear utilities with a single
  /// kink at 0, so the dual objective peaks at an atom.
  bool piecewise_linear() const noexcept;

  UtilitySpec with_range(double z_min, double z_max) const;

  /// Short label such as "CVaR_0.25" or "Entr_-1".
  std::string label() const;

  bool operator==(const UtilitySpec&) const = default;

 private:
  UtilitySpec(UtilityKind kind, double p1, double p2, double z_min, double z_max);

  UtilityKind kind_;
  double p1_;
  double p2_;
  double z_min_;
  double z_max_;
};

/// u(t), throwing RangeError when t lies outside
/// [z_min - z_max, z_max - z_min].
double eval_utility(const UtilitySpec& u, double t);

struct Atom {
  double value;
  double prob;

  bool operator==(const Atom&) const = default;
};

/// Finite-support distribution, atoms strictly increasing in value.
///
/// Construction sorts, merges equal values and validates: probabilities must
/// be non-negative and sum to one within 1e-12 (the sum is then renormalized);
/// anything further off is rejected rather than silently rescaled.
class DiscreteDist {
 public:
  explicit DiscreteDist(std::vector<Atom> atoms);

  static DiscreteDist point(double value);

  /// Atoms given as integer multiples of quantum; merges on the integer key.
  static DiscreteDist from_lattice(std::span<const std::pair<long long, double>> atoms,
                                   double quantum);

  /// lambda * d1 + (1 - lambda) * d2 as a mixture of laws.
  static DiscreteDist mixture(const DiscreteDist& d1, const DiscreteDist& d2, double lambda);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }

  double mean() const;
  double variance() const;
  DiscreteDist shifted(double s) const;

  bool operator==(const DiscreteDist&) const = default;

 private:
  std::vector<Atom> atoms_;
};

struct OceResult {
  double value;
  double b_star;
};

inline constexpr double kDefaultRefineTol = 1e-10;

/// Maximizes g(b) = b + sum_i p_i u(v_i - b).
///
/// Piecewise-linear utilities are maximized exactly by evaluating g at every
/// atom; smooth utilities by bisection on the sign of g' over [min v, max v]
/// down to refine_tol in b. The smallest maximizer is reported on ties.
OceResult oce_dual(const UtilitySpec& u, const DiscreteDist& dist,
                   double refine_tol = kDefaultRefineTol);

/// Average of the lowest tau probability mass.
double cvar_closed_form(double tau, const DiscreteDist& dist);

/// (1/beta) ln E[exp(beta X)], evaluated with a log-sum-exp shift.
double entropic_closed_form(double beta, const DiscreteDist& dist);

/// E[X] - c Var(X). Equals the capped-quadratic OCE only when every
/// deviation above the mean stays below 1/(2c).
double mean_variance_direct(double c, const DiscreteDist& dist);

/// (OCE with the mean-CVaR utility, kappa1 E[X] + (1 - kappa1) CVaR_tau[X])
/// with tau = (1 - kappa1) / (kappa2 - kappa1).
std::pair<double, double> mean_cvar_identity_check(double kappa1, double kappa2,
                                                   const DiscreteDist& dist);

/// Value reported for benchmark tables: E[X] - c Var(X) for mean-variance
/// utilities, the OCE otherwise.
double reporting_value(const UtilitySpec& u, const DiscreteDist& dist,
                       double refine_tol = kDefaultRefineTol);

}  // namespace ocerl
