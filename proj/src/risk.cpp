#include "ocerl/risk.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace ocerl {

namespace {

constexpr double kProbSlack = 1e-12;

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void check_range(double z_min, double z_max) {
  if (!(std::isfinite(z_min) && std::isfinite(z_max)) || z_min > z_max)
    throw ArgumentError("utility value range must satisfy z_min <= z_max");
}

}  // namespace

UtilitySpec::UtilitySpec(UtilityKind kind, double p1, double p2, double z_min, double z_max)
    : kind_(kind), p1_(p1), p2_(p2), z_min_(z_min), z_max_(z_max) {
  check_range(z_min, z_max);
}

UtilitySpec UtilitySpec::mean(double z_min, double z_max) {
  return UtilitySpec(UtilityKind::Mean, 0.0, 0.0, z_min, z_max);
}

UtilitySpec UtilitySpec::cvar(double tau, double z_min, double z_max) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("CVaR level tau must lie in (0, 1]");
  return UtilitySpec(UtilityKind::CVaR, tau, 0.0, z_min, z_max);
}

UtilitySpec UtilitySpec::entropic(double beta, double z_min, double z_max) {
  if (!(beta < 0.0) || !std::isfinite(beta))
    throw ArgumentError("entropic risk parameter beta must be negative");
  return UtilitySpec(UtilityKind::Entropic, beta, 0.0, z_min, z_max);
}

UtilitySpec UtilitySpec::mean_variance(double c, double z_min, double z_max) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ArgumentError("mean-variance weight c must be positive");
  return UtilitySpec(UtilityKind::MeanVariance, c, 0.0, z_min, z_max);
}

UtilitySpec UtilitySpec::mean_cvar(double kappa1, double kappa2, double z_min, double z_max) {
  if (!(kappa1 >= 0.0 && kappa1 < 1.0 && kappa2 > 1.0) || !std::isfinite(kappa2))
    throw ArgumentError("mean-CVaR utility needs 0 <= kappa1 < 1 < kappa2");
  return UtilitySpec(UtilityKind::MeanCVaR, kappa1, kappa2, z_min, z_max);
}

double UtilitySpec::operator()(double t) const noexcept {
  switch (kind_) {
    case UtilityKind::Mean:
      return t;
    case UtilityKind::CVaR:
      return -std::max(-t, 0.0) / p1_;
    case UtilityKind::Entropic:
      return std::expm1(p1_ * t) / p1_;
    case UtilityKind::MeanVariance:
      return t <= 1.0 / (2.0 * p1_) ? t - p1_ * t * t : 1.0 / (4.0 * p1_);
    case UtilityKind::MeanCVaR:
      return p1_ * std::max(t, 0.0) - p2_ * std::max(-t, 0.0);
  }
  return 0.0;
}

double UtilitySpec::vmax() const {
  // u is monotone with u(0) = 0, so |u| peaks at an endpoint.
  const double w = z_max_ - z_min_;
  return std::max(std::abs((*this)(-w)), std::abs((*this)(w)));
}

bool UtilitySpec::piecewise_linear() const noexcept {
  return kind_ == UtilityKind::Mean || kind_ == UtilityKind::CVaR ||
         kind_ == UtilityKind::MeanCVaR;
}

UtilitySpec UtilitySpec::with_range(double z_min, double z_max) const {
  return UtilitySpec(kind_, p1_, p2_, z_min, z_max);
}

std::string UtilitySpec::label() const {
  switch (kind_) {
    case UtilityKind::Mean:
      return "Mean";
    case UtilityKind::CVaR:
      return "CVaR_" + fmt_g(p1_);
    case UtilityKind::Entropic:
      return "Entr_" + fmt_g(p1_);
    case UtilityKind::MeanVariance:
      return "MV_" + fmt_g(p1_);
    case UtilityKind::MeanCVaR:
      return "MeanCVaR_" + fmt_g(p1_) + "_" + fmt_g(p2_);
  }
  return "?";
}

double eval_utility(const UtilitySpec& u, double t) {
  const double w = u.z_max() - u.z_min();
  const double slack = 1e-12 * (1.0 + w);
  if (!(t >= -w - slack && t <= w + slack))
    throw RangeError("utility argument " + fmt_g(t) + " outside [" + fmt_g(-w) + ", " +
                     fmt_g(w) + "]");
  return u(t);
}

// ---------------------------------------------------------------------------

DiscreteDist::DiscreteDist(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ArgumentError("distribution must have at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) throw ConstructionError("atom value must be finite");
    if (!(a.prob >= 0.0)) throw ConstructionError("atom probability must be non-negative");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > kProbSlack)
    throw ConstructionError("probabilities sum to " + fmt_g(total) + ", not 1");

  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.value < y.value; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().value == a.value)
      atoms_.back().prob += a.prob;
    else
      atoms_.push_back(a);
  }
  std::erase_if(atoms_, [](const Atom& a) { return a.prob == 0.0; });
  if (atoms_.empty()) throw ConstructionError("distribution has no positive mass");
  if (total != 1.0)
    for (auto& a : atoms_) a.prob /= total;
}

DiscreteDist DiscreteDist::point(double value) { return DiscreteDist({{value, 1.0}}); }

DiscreteDist DiscreteDist::from_lattice(std::span<const std::pair<long long, double>> atoms,
                                        double quantum) {
  std::map<long long, double> merged;
  for (const auto& [ticks, p] : atoms) merged[ticks] += p;
  std::vector<Atom> out;
  out.reserve(merged.size());
  for (const auto& [ticks, p] : merged) out.push_back({static_cast<double>(ticks) * quantum, p});
  return DiscreteDist(std::move(out));
}

DiscreteDist DiscreteDist::mixture(const DiscreteDist& d1, const DiscreteDist& d2,
                                   double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ArgumentError("mixture weight must lie in [0, 1]");
  std::vector<Atom> out;
  for (const auto& a : d1.atoms_) out.push_back({a.value, lambda * a.prob});
  for (const auto& a : d2.atoms_) out.push_back({a.value, (1.0 - lambda) * a.prob});
  return DiscreteDist(std::move(out));
}

double DiscreteDist::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.prob * a.value;
  return m;
}

double DiscreteDist::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& a : atoms_) v += a.prob * (a.value - m) * (a.value - m);
  return v;
}

DiscreteDist DiscreteDist::shifted(double s) const {
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.value += s;
  return DiscreteDist(std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

double dual_objective(const UtilitySpec& u, const DiscreteDist& dist, double b) {
  double e = 0.0;
  for (const auto& a : dist.atoms()) e += a.prob * u(a.value - b);
  return b + e;
}

double utility_slope(const UtilitySpec& u, double t) {
  switch (u.kind()) {
    case UtilityKind::Entropic:
      return std::exp(u.beta() * t);
    case UtilityKind::MeanVariance:
      return t <= 1.0 / (2.0 * u.c()) ? 1.0 - 2.0 * u.c() * t : 0.0;
    default:
      // Piecewise-linear utilities never reach the slope bisection.
      return 1.0;
  }
}

double dual_slope(const UtilitySpec& u, const DiscreteDist& dist, double b) {
  double e = 0.0;
  for (const auto& a : dist.atoms()) e += a.prob * utility_slope(u, a.value - b);
  return 1.0 - e;
}

}  // namespace

OceResult oce_dual(const UtilitySpec& u, const DiscreteDist& dist, double refine_tol) {
  if (!(refine_tol > 0.0)) throw ArgumentError("refine_tol must be positive");
  const auto& atoms = dist.atoms();

  if (u.kind() == UtilityKind::Mean) return {dist.mean(), atoms.front().value};

  if (u.piecewise_linear()) {
    // Concave and piecewise linear with kinks at the atoms.
    double best = -INFINITY;
    std::vector<double> g(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      g[i] = dual_objective(u, dist, atoms[i].value);
      best = std::max(best, g[i]);
    }
    const double eps = 1e-13 * (1.0 + std::abs(best));
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (g[i] >= best - eps) return {best, atoms[i].value};
  }

  // Smooth concave objective; the maximizer lies in [min v, max v] and is the
  // first b where g'(b) = 1 - E[u'(X - b)] stops being positive. Bisecting on
  // the sign of g' resolves b to refine_tol, which comparing g values cannot
  // do near a flat maximum.
  double lo = atoms.front().value;
  double hi = atoms.back().value;
  while (hi - lo > refine_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dual_slope(u, dist, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double b = 0.5 * (lo + hi);
  return {dual_objective(u, dist, b), b};
}

double cvar_closed_form(double tau, const DiscreteDist& dist) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("CVaR level tau must lie in (0, 1]");
  double taken = 0.0;
  double acc = 0.0;
  for (const auto& a : dist.atoms()) {
    const double m = std::min(a.prob, tau - taken);
    if (m <= 0.0) break;
    acc += m * a.value;
    taken += m;
  }
  return acc / tau;
}

double entropic_closed_form(double beta, const DiscreteDist& dist) {
  if (beta == 0.0 || !std::isfinite(beta)) throw ArgumentError("beta must be finite and nonzero");
  double shift = -INFINITY;
  for (const auto& a : dist.atoms()) shift = std::max(shift, beta * a.value);
  double s = 0.0;
  for (const auto& a : dist.atoms()) s += a.prob * std::exp(beta * a.value - shift);
  return (shift + std::log(s)) / beta;
}

double mean_variance_direct(double c, const DiscreteDist& dist) {
  if (!(c > 0.0)) throw ArgumentError("mean-variance weight c must be positive");
  return dist.mean() - c * dist.variance();
}

std::pair<double, double> mean_cvar_identity_check(double kappa1, double kappa2,
                                                   const DiscreteDist& dist) {
  if (!(kappa1 >= 0.0 && kappa1 < 1.0 && kappa2 > 1.0))
    throw ArgumentError("mean-CVaR identity needs 0 <= kappa1 < 1 < kappa2");
  const double lhs = oce_dual(UtilitySpec::mean_cvar(kappa1, kappa2), dist).value;
  const double tau = (1.0 - kappa1) / (kappa2 - kappa1);
  const double rhs = kappa1 * dist.mean() + (1.0 - kappa1) * cvar_closed_form(tau, dist);
  return {lhs, rhs};
}

double reporting_value(const UtilitySpec& u, const DiscreteDist& dist, double refine_tol) {
  if (u.kind() == UtilityKind::MeanVariance) return mean_variance_direct(u.c(), dist);
  return oce_dual(u, dist, refine_tol).value;
}

}  // namespace ocerl
